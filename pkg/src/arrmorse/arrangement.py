"""Arrangements of affine complex hyperplanes, weights, and pointwise evaluation.

An affine functional is xi(z) = a . z + c (bilinear, no conjugation).  The
complement M = C^n minus the union of the zero sets is where every analytic
quantity in the package lives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateHyperplane,
    LengthMismatch,
    MalformedInput,
    PointOnArrangement,
    ZeroLinearPart,
)

ON_HYPERPLANE_THRESHOLD = 1e-300
_MAX_DENOMINATOR = 10**6


def _as_rational(x) -> Fraction | None:
    """Exact rational for x if it has a small-denominator representation."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            return None
    x = float(x)
    if not np.isfinite(x):
        return None
    fr = Fraction(x).limit_denominator(_MAX_DENOMINATOR)
    return fr if float(fr) == x else None


def _gaussian(value) -> tuple[complex, tuple[Fraction, Fraction] | None]:
    """Convert a scalar or [re, im] pair to (complex, exact pair or None)."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise MalformedInput(f"complex entry must be [re, im], got {value!r}")
        re, im = value
    elif isinstance(value, complex) or isinstance(value, np.complexfloating):
        re, im = value.real, value.imag
    else:
        re, im = value, 0
    try:
        z = complex(float(Fraction(re) if isinstance(re, str) else re),
                    float(Fraction(im) if isinstance(im, str) else im))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad complex entry {value!r}") from exc
    qre, qim = _as_rational(re), _as_rational(im)
    exact = (qre, qim) if qre is not None and qim is not None else None
    return z, exact


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Zero set of xi(z) = linear_part . z + offset."""

    linear_part: np.ndarray
    offset: complex
    exact: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        a = np.asarray(self.linear_part, dtype=complex).reshape(-1)
        if a.size == 0 or not np.any(a != 0):
            raise ZeroLinearPart("hyperplane has zero linear part")
        a.setflags(write=False)
        object.__setattr__(self, "linear_part", a)
        object.__setattr__(self, "offset", complex(self.offset))

    @classmethod
    def from_coefficients(cls, a: Iterable, c=0) -> "Hyperplane":
        """Build from scalars or [re, im] pairs, keeping exact rationals when possible."""
        pairs = [_gaussian(x) for x in a]
        off, off_exact = _gaussian(c)
        lin = np.array([p[0] for p in pairs], dtype=complex)
        exact = None
        if off_exact is not None and all(p[1] is not None for p in pairs):
            exact = (tuple(p[1] for p in pairs), off_exact)
        return cls(lin, off, exact)

    @property
    def dim(self) -> int:
        return self.linear_part.size

    def __call__(self, z) -> complex:
        return complex(self.linear_part @ np.asarray(z, dtype=complex) + self.offset)


@dataclass(frozen=True, eq=False)
class Arrangement:
    ambient_dim: int
    hyperplanes: tuple

    def __post_init__(self):
        hs = tuple(self.hyperplanes)
        if self.ambient_dim < 1:
            raise MalformedInput("ambient_dim must be positive")
        if not hs:
            raise MalformedInput("arrangement needs at least one hyperplane")
        for h in hs:
            if h.dim != self.ambient_dim:
                raise LengthMismatch(
                    f"hyperplane of dimension {h.dim} in C^{self.ambient_dim}"
                )
        object.__setattr__(self, "hyperplanes", hs)
        A = np.array([h.linear_part for h in hs], dtype=complex)
        c = np.array([h.offset for h in hs], dtype=complex)
        rows = np.hstack([A, c[:, None]])
        unit = rows / np.linalg.norm(rows, axis=1)[:, None]
        overlap = np.abs(unit.conj() @ unit.T)
        np.fill_diagonal(overlap, 0.0)
        if np.any(overlap > 1.0 - 1e-12):
            i, j = np.argwhere(overlap > 1.0 - 1e-12)[0]
            raise DuplicateHyperplane(f"hyperplanes {i} and {j} have the same zero set")
        for arr in (A, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "row_norms", np.linalg.norm(A, axis=1))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], offsets: Sequence | None = None) -> "Arrangement":
        """Arrangement from linear parts (and offsets, default 0)."""
        if offsets is None:
            offsets = [0] * len(rows)
        hs = [Hyperplane.from_coefficients(a, c) for a, c in zip(rows, offsets)]
        return cls(hs[0].dim, tuple(hs))

    @property
    def m(self) -> int:
        return len(self.hyperplanes)

    @property
    def n(self) -> int:
        return self.ambient_dim

    @property
    def is_exact(self) -> bool:
        return all(h.exact is not None for h in self.hyperplanes)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.A.imag == 0) and np.all(self.c.imag == 0))

    def values(self, z) -> np.ndarray:
        """All xi_i(z) at once."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.ambient_dim:
            raise LengthMismatch(f"point of length {z.shape[-1]} in C^{self.ambient_dim}")
        return z @ self.A.T + self.c

    def distances(self, z) -> np.ndarray:
        return np.abs(self.values(z)) / self.row_norms

    def distance_to_union(self, z) -> float:
        return float(np.min(self.distances(z)))

    def subarrangement(self, indices: Iterable[int]) -> "Arrangement":
        return Arrangement(self.ambient_dim, tuple(self.hyperplanes[i] for i in indices))


class Weights:
    """Real weight vector; entries are Fraction when given exactly, float otherwise."""

    __slots__ = ("values", "array")

    def __init__(self, values: Iterable):
        vals = []
        for v in values:
            if isinstance(v, bool):
                raise MalformedInput("boolean weight")
            if isinstance(v, Fraction):
                vals.append(v)
            elif isinstance(v, (str, int, np.integer)):
                try:
                    vals.append(Fraction(v.strip() if isinstance(v, str) else int(v)))
                except (ValueError, ZeroDivisionError) as exc:
                    raise MalformedInput(f"bad weight {v!r}") from exc
            elif isinstance(v, (float, np.floating)):
                if not np.isfinite(v):
                    raise MalformedInput(f"non-finite weight {v!r}")
                vals.append(float(v))
            else:
                raise MalformedInput(f"bad weight {v!r}")
        self.values = tuple(vals)
        arr = np.array([float(v) for v in vals], dtype=float)
        arr.setflags(write=False)
        self.array = arr

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"Weights({[_weight_token(v) for v in self.values]})"

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values)

    @property
    def is_positive(self) -> bool:
        return bool(np.all(self.array > 0))

    def check(self, arr: Arrangement) -> None:
        if len(self) != arr.m:
            raise LengthMismatch(f"{len(self)} weights for {arr.m} hyperplanes")


def _weight_token(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def evaluate_xi(arr: Arrangement, i: int, z) -> complex:
    """xi_i(z) for a 1-based hyperplane index i."""
    if not 1 <= i <= arr.m:
        raise IndexError(f"hyperplane index {i} outside 1..{arr.m}")
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != arr.ambient_dim:
        raise LengthMismatch(f"point of length {z.size} in C^{arr.ambient_dim}")
    return arr.hyperplanes[i - 1](z)


def checked_values(arr: Arrangement, z) -> np.ndarray:
    """xi_i(z) for all i, raising PointOnArrangement on a zero."""
    vals = arr.values(z)
    mags = np.abs(vals)
    k = int(np.argmin(mags))
    if mags[k] < ON_HYPERPLANE_THRESHOLD:
        raise PointOnArrangement(k, float(mags[k]))
    return vals


def log_f_alpha(arr: Arrangement, w: Weights, z) -> float:
    """sum_i alpha_i log|xi_i(z)|, i.e. log of prod |xi_i|^alpha_i."""
    vals = checked_values(arr, z)
    return float(np.dot(w.array, np.log(np.abs(vals))))


def parse_arrangement(text: bytes | str) -> tuple[Arrangement, Weights]:
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedInput("top level must be an object")
    try:
        n = data["ambient_dim"]
        raw = data["hyperplanes"]
        raw_w = data["weights"]
    except KeyError as exc:
        raise MalformedInput(f"missing key {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MalformedInput("ambient_dim must be a positive integer")
    if not isinstance(raw, list) or not raw:
        raise MalformedInput("hyperplanes must be a non-empty list")
    hs = []
    for k, h in enumerate(raw):
        if not isinstance(h, dict) or "a" not in h:
            raise MalformedInput(f"hyperplane {k} lacks 'a'")
        a = h["a"]
        if not isinstance(a, list) or len(a) != n:
            raise LengthMismatch(f"hyperplane {k}: expected {n} coefficients")
        hs.append(Hyperplane.from_coefficients(a, h.get("c", [0, 0])))
    arr = Arrangement(n, tuple(hs))
    if not isinstance(raw_w, list):
        raise MalformedInput("weights must be a list")
    w = Weights(raw_w)
    w.check(arr)
    return arr, w


def _number(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def _exact_token(q: Fraction):
    return int(q) if q.denominator == 1 else float(q) if float(q) == q else str(q)


def to_json_dict(arr: Arrangement, w: Weights | None = None) -> dict:
    hyperplanes = []
    for h in arr.hyperplanes:
        if h.exact is not None:
            lin, off = h.exact
            a = [[_exact_token(re), _exact_token(im)] for re, im in lin]
            c = [_exact_token(off[0]), _exact_token(off[1])]
        else:
            a = [[_number(x.real), _number(x.imag)] for x in h.linear_part]
            c = [_number(h.offset.real), _number(h.offset.imag)]
        hyperplanes.append({"a": a, "c": c})
    out = {"ambient_dim": arr.ambient_dim, "hyperplanes": hyperplanes}
    if w is not None:
        out["weights"] = [_weight_token(v) for v in w.values]
    return out


def serialize_arrangement(arr: Arrangement, w: Weights | None = None) -> str:
    """Canonical JSON form; parse_arrangement(serialize_arrangement(a, w)) reproduces it."""
    return json.dumps(to_json_dict(arr, w), separators=(",", ":"))


def parse_point(text: str, n: int) -> np.ndarray:
    """Parse "re,im;re,im;..." into a complex vector of length n."""
    parts = [p for p in text.split(";") if p.strip()]
    if len(parts) != n:
        raise LengthMismatch(f"expected {n} coordinates, got {len(parts)}")
    out = []
    for p in parts:
        bits = [b for b in p.split(",")]
        if len(bits) == 1:
            out.append(complex(float(bits[0]), 0.0))
        elif len(bits) == 2:
            out.append(complex(float(bits[0]), float(bits[1])))
        else:
            raise MalformedInput(f"bad coordinate {p!r}")
    return np.array(out, dtype=complex)
