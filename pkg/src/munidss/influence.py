"""Signed influence propagation over the indicator digraph.

Direct aggregated estimates form a square matrix over all nodes (indicators
first, then targets, each block sorted by id). Total influence is the sum of
walk weights: entry (u, v) accumulates, over every directed walk from u to v
up to a cutoff length, the product of edge weights along the walk. The series
with cutoff K is a finite matrix-power sum; when the spectral radius is below
one the infinite series has a closed form computed by a dense linear solve.

Entries of the total-influence matrix are intentionally *not* clamped to
[-1, 1]: downstream criticality and what-if prediction rely on linearity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from munidss.domain import Project, aggregate_estimates, require_valid
from munidss.errors import ConvergenceError, SingularityError, ValidationError

# Fixed exponent for the norm-based radius estimate: ||A^64||_inf ** (1/64),
# reached with six squarings.
_RADIUS_SQUARINGS = 6
_RADIUS_POWER = 2 ** _RADIUS_SQUARINGS


@dataclass(frozen=True, eq=False)
class ImpactMatrix:
    """Direct aggregated impact weights over indicators + targets."""

    indicator_ids: tuple[str, ...]
    target_ids: tuple[str, ...]
    entries: np.ndarray

    @property
    def node_order(self) -> tuple[str, ...]:
        return self.indicator_ids + self.target_ids

    def index_of(self, node_id: str) -> int:
        return self.node_order.index(node_id)


@dataclass(frozen=True, eq=False)
class InfluenceMatrix:
    """Walk-summed total influence; ``method`` records how it was computed."""

    entries: np.ndarray
    method: str  # "series" | "closed"
    k: int | None
    rho_estimate: float
    indicator_ids: tuple[str, ...] | None = None
    target_ids: tuple[str, ...] | None = None

    @property
    def node_order(self) -> tuple[str, ...] | None:
        if self.indicator_ids is None or self.target_ids is None:
            return None
        return self.indicator_ids + self.target_ids


def _as_entries(matrix) -> np.ndarray:
    if isinstance(matrix, (ImpactMatrix, InfluenceMatrix)):
        raw = matrix.entries
    else:
        raw = matrix
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError("influence operations need a nonempty square matrix")
    return arr


def build_matrix(project: Project) -> ImpactMatrix:
    """Aggregate the project's expert estimates into the direct impact matrix.

    Node order is indicators (id ascending) followed by targets (id
    ascending). Edges with no estimates are zero; edges estimated by several
    experts collapse under the project's aggregation policy.
    """
    require_valid(project)
    indicator_ids = project.indicator_ids
    target_ids = project.target_ids
    order = indicator_ids + target_ids
    index = {node: i for i, node in enumerate(order)}

    entries = np.zeros((len(order), len(order)))
    grouped: dict[tuple[str, str], list[float]] = {}
    for est in project.estimates:  # already sorted (source, sink, expert)
        grouped.setdefault((est.source, est.sink), []).append(est.value)
    for (source, sink), values in grouped.items():
        weight, _ = aggregate_estimates(values, project.aggregation_policy)
        entries[index[source], index[sink]] = weight
    return ImpactMatrix(indicator_ids, target_ids, entries)


def spectral_radius_estimate(matrix) -> float:
    """Norm-based upper estimate of the spectral radius: ||A^64||_inf ** (1/64).

    Computed by repeated squaring; exact in the limit of the exponent, an
    upper bound at any finite one. Nilpotent matrices of dimension <= 64 give
    exactly zero.
    """
    power = _as_entries(matrix).copy()
    for _ in range(_RADIUS_SQUARINGS):
        power = power @ power
    norm = float(np.abs(power).sum(axis=1).max())
    return norm ** (1.0 / _RADIUS_POWER)


def total_influence_series(matrix, k: int | None = None) -> InfluenceMatrix:
    """Sum the first ``k`` matrix powers: all walks of length 1..k.

    The default cutoff equals the node count, which covers every simple path;
    longer walks only add echo terms. Accumulation order is fixed (ascending
    power), so identical inputs give bit-identical results.
    """
    entries = _as_entries(matrix)
    if k is None:
        k = entries.shape[0]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValidationError(f"series cutoff must be a positive integer, got {k!r}")

    total = entries.copy()
    power = entries.copy()
    for _ in range(k - 1):
        power = power @ entries
        total = total + power

    rho = spectral_radius_estimate(entries)
    return InfluenceMatrix(
        entries=total,
        method="series",
        k=k,
        rho_estimate=rho,
        indicator_ids=getattr(matrix, "indicator_ids", None),
        target_ids=getattr(matrix, "target_ids", None),
    )


def total_influence_closed(matrix) -> InfluenceMatrix:
    """Limit of the walk series: T = (I - A)^-1 - I, via a dense solve.

    Requires the radius estimate below one; otherwise the series diverges and
    the closed form is meaningless, so a ConvergenceError carrying the
    estimate is raised instead.
    """
    entries = _as_entries(matrix)
    rho = spectral_radius_estimate(entries)
    if not rho < 1.0:  # also catches nan from overflowing powers
        raise ConvergenceError(
            f"spectral radius estimate {rho:.6g} is not below 1; use the series method",
            rho_estimate=rho,
        )
    eye = np.eye(entries.shape[0])
    try:
        resolvent = np.linalg.solve(eye - entries, eye)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"(I - A) is numerically singular: {exc}") from exc
    total = resolvent - eye

    target_ids = getattr(matrix, "target_ids", None)
    indicator_ids = getattr(matrix, "indicator_ids", None)
    if indicator_ids is not None and target_ids is not None:
        # Sink rows are exactly zero in exact arithmetic; enforce against
        # solver round-off so the invariant holds bitwise.
        total[len(indicator_ids):, :] = 0.0
    return InfluenceMatrix(
        entries=total,
        method="closed",
        k=None,
        rho_estimate=rho,
        indicator_ids=indicator_ids,
        target_ids=target_ids,
    )


def matrix_to_csv(node_order: tuple[str, ...], entries: np.ndarray) -> str:
    """Render a node-square matrix as CSV: header row of node ids, 12 significant digits."""
    lines = [",".join(node_order)]
    for row in entries:
        lines.append(",".join(format(float(v), ".12g") for v in row))
    return "\n".join(lines) + "\n"
