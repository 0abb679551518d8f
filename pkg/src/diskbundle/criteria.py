"""Similarity-type diagnostics for a curvature-defect field.

Three measurable quantities are produced: the Green potential of the
defect (uniform boundedness is the integrability-type criterion), the
dyadic Carleson constant of ``defect * (1 - |z|) dA``, and the pointwise
constant ``sup sqrt(defect) * (1 - |z|)``. All three are reported over the
grid; the tool never claims anything about the full open disk.

The potential quadrature follows the grid's midpoint rule except near the
logarithmic singularity: cells whose sample sits within three quarters of
a cell diagonal of the singular point are subdivided once, and whatever
subcells remain singular are integrated exactly over an equal-area disk
using the primitive of ``r ln r``.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bundle import AnalyticFrame, DefectField, GramBounds, defect_field, gram_bounds
from .calculus import TWO_PI, ComplexGrid, carleson_constant
from .errors import DataError, DomainError, ParameterError

#: near-singular detection: distance below this multiple of the cell diagonal;
#: wide enough that the coarse inner cells get subdivided when the singular
#: point sits among them (the pooled set is containment-bound regardless)
_NEAR_SINGULAR = 2.5


def _worker_count() -> int:
    raw = os.environ.get("TOOL_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _require_complete(field: DefectField) -> None:
    if field.is_partial:
        raise DataError("field is partial; recompute the failing points first")


def _cell_contains(r_lo, r_hi, t_lo, t_hi, lam, tol=1e-12) -> bool:
    r = abs(lam)
    if not r_lo - tol <= r <= r_hi + tol:
        return False
    if r <= tol:
        return r_lo <= tol  # the center belongs to every innermost sector
    t = float(np.angle(lam)) % TWO_PI
    return t_lo - tol <= t <= t_hi + tol or t_lo - tol <= t + TWO_PI <= t_hi + tol


def green_potential(field: DefectField, lam: complex) -> float:
    """``(2/pi)`` times the integral of the Green function against the field.

    Nonpositive for nonnegative fields; raises :class:`DomainError` when
    ``lam`` is outside the grid's covered disk.
    """
    _require_complete(field)
    grid = field.grid
    outer = float(grid.radial_edges[-1])
    if abs(lam) >= outer:
        raise DomainError(f"point |lam| = {abs(lam):.4f} outside grid coverage |z| < {outer:.4f}")

    rho = field.values
    pts = grid.points
    w = grid.area_weights
    # smooth half of the kernel, ordinary midpoint everywhere
    total = float(np.sum(rho * w * (-np.log(np.abs(1.0 - np.conj(lam) * pts)))))

    dtheta = TWO_PI / grid.angular_count
    rings = np.arange(grid.n) // grid.angular_count
    dr = np.diff(grid.radial_edges)[rings]
    diag = np.hypot(dr, np.abs(pts) * dtheta)
    dist = np.abs(pts - lam)
    near = dist <= _NEAR_SINGULAR * diag  # always catches the cell owning lam

    total += float(np.sum(rho[~near] * w[~near] * np.log(dist[~near])))

    # near cells are subdivided once; only the subcells whose closure holds
    # lam are pooled into the exact-primitive disk, the rest use midpoints
    pooled_area = 0.0
    pooled_mass = 0.0
    for i in np.nonzero(near)[0]:
        r_lo, r_hi, t_lo, t_hi = grid.cell_geometry(int(i))
        r_mid, t_mid = 0.5 * (r_lo + r_hi), 0.5 * (t_lo + t_hi)
        for a, b in ((r_lo, r_mid), (r_mid, r_hi)):
            for c, d in ((t_lo, t_mid), (t_mid, t_hi)):
                r_s = 0.5 * (a + b)
                w_s = r_s * (b - a) * (d - c)
                if _cell_contains(a, b, c, d, lam):
                    pooled_area += w_s
                    pooled_mass += rho[i] * w_s
                else:
                    z_s = r_s * np.exp(1j * 0.5 * (c + d))
                    total += rho[i] * w_s * float(np.log(abs(z_s - lam)))
    if pooled_area > 0.0:
        # exact log integral over the equal-area disk centered at lam:
        # integral of ln|u| over |u| < R equals pi R^2 (ln R - 1/2)
        radius = np.sqrt(pooled_area / np.pi)
        total += pooled_mass * (float(np.log(radius)) - 0.5)
    return (2.0 / np.pi) * total


def default_probes(grid: ComplexGrid, stride: int = 4) -> np.ndarray:
    """Probe points on every ``stride``-th radial level of the grid."""
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    rings = np.arange(grid.n) // grid.angular_count
    return grid.points[rings % stride == 0]


def green_boundedness(field: DefectField, probe_points: Sequence[complex]) -> float:
    """Most negative Green potential over the probes."""
    probes = list(probe_points)
    if not probes:
        raise ParameterError("at least one probe point is required")
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda z: green_potential(field, z), probes))
    else:
        values = [green_potential(field, z) for z in probes]
    return float(np.min(values))


def pointwise_bound(field: DefectField) -> float:
    """Smallest admissible ``C`` in ``sqrt(defect) <= C / (1 - |z|)`` on the grid."""
    _require_complete(field)
    vals = np.sqrt(np.maximum(field.values, 0.0))
    return float(np.max(vals * (1.0 - np.abs(field.grid.points))))


def carleson_check(field: DefectField, max_depth: int) -> float:
    """Dyadic Carleson constant of ``defect * (1 - |z|) dA``."""
    _require_complete(field)
    return carleson_constant(field.values, field.grid, max_depth)


@dataclass(frozen=True)
class Thresholds:
    """User pass/fail levels: ``M`` bounds the potential magnitude, ``C``
    bounds the Carleson and pointwise constants."""

    M: float = 1e3
    C: float = 1e3

    def __post_init__(self):
        if self.M <= 0 or self.C <= 0:
            raise ParameterError("thresholds must be positive")


@dataclass(frozen=True)
class CriteriaReport:
    gram_bounds: Optional[GramBounds]
    green_inf: Optional[float]
    carleson_const: Optional[float]
    pointwise_const: Optional[float]
    thresholds: Thresholds
    grid_meta: dict
    checks: dict
    partial: bool
    failures: tuple = ()

    @property
    def similar_at_grid_scale(self) -> bool:
        return bool(self.checks) and all(self.checks.values()) and not self.partial

    def to_json_dict(self) -> dict:
        verdict = dict(self.checks)
        verdict["similar_at_grid_scale"] = self.similar_at_grid_scale
        verdict["partial"] = self.partial
        return {
            "gram_bounds": None
            if self.gram_bounds is None
            else {"c_min": self.gram_bounds.c_min, "c_max": self.gram_bounds.c_max},
            "green_inf": self.green_inf,
            "carleson_const": self.carleson_const,
            "pointwise_const": self.pointwise_const,
            "verdict": verdict,
            "grid": self.grid_meta,
            "thresholds": {"M": self.thresholds.M, "C": self.thresholds.C},
        }


def _grid_meta(grid: ComplexGrid) -> dict:
    return {
        "points": grid.n,
        "radial_count": int(grid.ring_count),
        "angular_count": int(grid.angular_count),
        "margin": float(grid.margin),
    }


def similarity_verdict(
    frame: AnalyticFrame,
    grid: ComplexGrid,
    thresholds: Optional[Thresholds] = None,
    probe_stride: int = 4,
    max_depth: int = 8,
) -> CriteriaReport:
    """Aggregate the measurable criteria for one frame on one grid.

    The report states measured constants and grid-scale pass/fail flags; a
    partial defect field produces a partial report with the failures
    attached instead of raising.
    """
    thresholds = thresholds or Thresholds()
    field = defect_field(frame, grid)
    meta = _grid_meta(grid)
    if field.is_partial:
        return CriteriaReport(
            gram_bounds=None,
            green_inf=None,
            carleson_const=None,
            pointwise_const=None,
            thresholds=thresholds,
            grid_meta=meta,
            checks={},
            partial=True,
            failures=field.failures,
        )
    bounds = gram_bounds(frame, grid)
    green_inf = green_boundedness(field, default_probes(grid, probe_stride))
    carleson = carleson_check(field, max_depth)
    pointwise = pointwise_bound(field)
    checks = {
        "gram": bounds.c_min > 0.0,
        "green": green_inf >= -thresholds.M,
        "carleson": carleson <= thresholds.C,
        "pointwise": pointwise <= thresholds.C,
    }
    return CriteriaReport(
        gram_bounds=bounds,
        green_inf=green_inf,
        carleson_const=carleson,
        pointwise_const=pointwise,
        thresholds=thresholds,
        grid_meta=meta,
        checks=checks,
        partial=False,
    )


def write_probe_heatmap(field: DefectField, probes: Sequence[complex], path) -> None:
    """CSV ``re,im,defect,green_potential`` per probe, in probe order."""
    _require_complete(field)
    grid = field.grid
    lookup = {complex(z): v for z, v in zip(grid.points, field.values)}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "defect", "green_potential"])
        for z in probes:
            z = complex(z)
            d = lookup.get(z)
            if d is None:
                idx = int(np.argmin(np.abs(grid.points - z)))
                d = float(field.values[idx])
            writer.writerow(
                [
                    repr(z.real),
                    repr(z.imag),
                    repr(float(d)),
                    repr(green_potential(field, z)),
                ]
            )
