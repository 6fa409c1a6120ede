"""End-to-end rank report.

The predicted Novikov ranks depend only on the rank l and on chi(M): zero in
every degree except l, where the rank is |chi|.  The report pairs that
prediction with independently computed evidence (critical-point census,
Morse indices, Aomoto cohomology) and records where they agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .arrangement import Arrangement, Weights
from .errors import BudgetExhausted, NonPositiveWeights
from .lattice import arrangement_rank, build_lattice, essentialize, euler_characteristic
from .master import CriticalPoint, SolverConfig, find_critical_points
from .os_aomoto import check_nonresonance

log = logging.getLogger(__name__)


def predicted_novikov_ranks(n: int, rank: int, chi: int) -> tuple:
    return tuple(abs(chi) if j == rank else 0 for j in range(n + 1))


@dataclass
class RankReport:
    ambient_dim: int
    rank_l: int
    chi: int
    novikov_ranks: tuple
    critical_count: int | None
    morse_all_index_n: bool
    aomoto_agrees: bool
    aomoto_ranks: tuple | None = None
    critical_points: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def count_matches(self) -> bool:
        return self.critical_count == abs(self.chi)

    @property
    def consistent(self) -> bool:
        return self.count_matches and self.morse_all_index_n and self.aomoto_agrees

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "rank_l": self.rank_l,
            "chi": self.chi,
            "novikov_ranks": list(self.novikov_ranks),
            "critical_count": self.critical_count,
            "count_matches_chi": self.count_matches,
            "morse_all_index_n": self.morse_all_index_n,
            "aomoto_agrees": self.aomoto_agrees,
            "aomoto_ranks": None if self.aomoto_ranks is None else list(self.aomoto_ranks),
            "consistent": self.consistent,
            "critical_points": [p.to_dict() for p in self.critical_points],
            "diagnostics": list(self.diagnostics),
        }


def full_report(arr: Arrangement, w: Weights, config: SolverConfig | None = None) -> RankReport:
    """Essentialize, count, certify and cross-check; stage failures become diagnostics."""
    w.check(arr)
    if not w.is_positive:
        raise NonPositiveWeights("the rank predictions need positive weights")
    config = config or SolverConfig()
    diagnostics = []

    lat = build_lattice(arr)
    rank = arrangement_rank(lat)
    chi = euler_characteristic(lat)
    red = essentialize(arr, rank)
    core = red.arrangement
    core_lat = lat if red.identity else build_lattice(core)
    core_chi = euler_characteristic(core_lat)
    if not red.identity:
        diagnostics.append(f"essentialized from C^{arr.ambient_dim} to C^{rank}")
    if core_chi != chi:
        diagnostics.append(f"chi changed under essentialization: {chi} -> {core_chi}")

    points: list[CriticalPoint] = []
    count = None
    try:
        points = find_critical_points(core, w, config, core_lat)
        count = len(points)
    except BudgetExhausted as exc:
        points = exc.found
        count = len(points)
        diagnostics.append(str(exc))
    except Exception as exc:  # any stage failure is reported, not raised
        diagnostics.append(f"critical point search failed: {exc}")
    morse = count is not None and all(p.hessian_signature == (rank, rank) for p in points)
    if count is not None and not morse:
        diagnostics.append("some critical point has signature other than (l, l)")

    aomoto_ranks = None
    aomoto_ok = False
    try:
        verdict = check_nonresonance(core, core_lat, w)
        aomoto_ranks = verdict.cohomology_ranks
        aomoto_ok = verdict.non_resonant and verdict.top_matches_chi
        if not aomoto_ok:
            diagnostics.append(f"Aomoto ranks {list(aomoto_ranks)} disagree with the prediction")
    except Exception as exc:
        diagnostics.append(f"Aomoto computation failed: {exc}")

    if count is not None and count != abs(chi):
        diagnostics.append(f"critical count {count} differs from |chi| = {abs(chi)}")
    return RankReport(
        ambient_dim=arr.ambient_dim,
        rank_l=rank,
        chi=chi,
        novikov_ranks=predicted_novikov_ranks(arr.ambient_dim, rank, chi),
        critical_count=count,
        morse_all_index_n=morse,
        aomoto_agrees=aomoto_ok,
        aomoto_ranks=aomoto_ranks,
        critical_points=points,
        diagnostics=diagnostics,
    )
