"""Spike-weight sequences and the weighted backward shift.

A spike weight equals 1 everywhere except on sparse intervals
``[N_j, N_j + 2j]`` where ``ln w_n`` rises linearly with slope
``2 ln(1+eps)`` to a peak ``(1+eps)^(2j)`` and falls back. The start
indices are the smallest integers with ``N_j + 2j < N_{j+1}`` and
``(2j-1)/(N_j + 2j) <= alpha / 2^j``, with ``alpha = 1 - (1+eps)^-2``
pinned at its extreme admissible value so the construction is canonical.

The sequences store integer half-log exponents alongside the float
weights; ratio checks use exponent differences, so the reported extreme
ratio is bitwise ``(1+eps)**2`` rather than a rounded quotient.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AccuracyError, CapacityError, DataError, ParameterError
from .kernels import weighted_kernel_diag_certified

#: default probe radii for kernel-ratio sweeps
DEFAULT_RADII = (0.0, 0.5, 0.9, 0.99, 0.999)


@dataclass(frozen=True)
class WeightSequence:
    """Positive weights with ``w_0 = 1``.

    Beyond the stored range the sequence continues with the unit plateau
    (``w_n = 1``); kernel sums rely on that convention, while the
    coefficient-space operations below raise :class:`CapacityError` when
    they would index past ``values``.
    """

    values: np.ndarray
    epsilon: Optional[float] = None
    alpha: Optional[float] = None
    spike_starts: tuple = ()
    log_exponents: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or len(vals) == 0:
            raise DataError("weights must form a nonempty sequence")
        if np.any(vals <= 0.0):
            raise DataError("weights must be positive")
        if vals[0] != 1.0:
            raise DataError("w_0 must equal 1")

    @classmethod
    def from_values(cls, values) -> "WeightSequence":
        return cls(values=np.asarray(values, dtype=float))

    @property
    def length(self) -> int:
        return len(self.values)

    @property
    def spike_count(self) -> int:
        return len(self.spike_starts)

    @property
    def is_spike_built(self) -> bool:
        return self.log_exponents is not None

    def value_at(self, n: int) -> float:
        """Weight at index ``n``; 1 past the stored range."""
        if n < 0:
            raise ParameterError("index must be nonnegative")
        return float(self.values[n]) if n < len(self.values) else 1.0


def _ceil_tol(x: float) -> int:
    # forgive upward float noise when x is an exact integer
    return int(math.ceil(x - 1e-9))


def build_spike_weight(epsilon: float, spike_count: int, length: int) -> WeightSequence:
    """Canonical spike weight with ``spike_count`` spikes in ``length`` slots.

    Raises :class:`CapacityError` carrying the required length when the
    spikes do not fit.
    """
    if epsilon <= 0.0:
        raise ParameterError("epsilon must be positive")
    if spike_count < 1:
        raise ParameterError("spike_count must be >= 1")
    if length < 1:
        raise ParameterError("length must be >= 1")
    alpha = 1.0 - (1.0 + epsilon) ** -2
    starts = []
    prev = None
    for j in range(1, spike_count + 1):
        floor_from_bound = _ceil_tol((2 * j - 1) * 2 ** j / alpha - 2 * j)
        floor_from_prev = 1 if prev is None else prev + 2 * (j - 1) + 1
        start = max(1, floor_from_bound, floor_from_prev)
        starts.append(start)
        prev = start
    needed = starts[-1] + 2 * spike_count + 1
    if needed > length:
        raise CapacityError(
            f"length {length} cannot hold {spike_count} spikes; need {needed}",
            required_length=needed,
        )
    exponents = np.zeros(length, dtype=int)
    for j, start in enumerate(starts, start=1):
        for m in range(j + 1):
            exponents[start + m] = m
            exponents[start + j + m] = j - m
    values = np.ones(length, dtype=float)
    base = 1.0 + epsilon
    for i, e in enumerate(exponents):
        if e:
            values[i] = base ** (2 * int(e))
    return WeightSequence(
        values=values,
        epsilon=float(epsilon),
        alpha=float(alpha),
        spike_starts=tuple(starts),
        log_exponents=exponents,
    )


def ratio_bound_check(w: WeightSequence, epsilon: float) -> float:
    """Extreme consecutive ratio ``max_n max(w_{n+1}/w_n, w_n/w_{n+1})``.

    For spike-built sequences this is computed from the integer exponent
    steps and equals ``(1+epsilon)**2`` exactly whenever a spike exists.
    """
    if w.is_spike_built:
        steps = np.abs(np.diff(w.log_exponents))
        dmax = int(steps.max()) if len(steps) else 0
        return (1.0 + epsilon) ** (2 * dmax)
    if w.length < 2:
        return 1.0
    r = w.values[1:] / w.values[:-1]
    return float(np.max(np.maximum(r, 1.0 / r)))


@dataclass(frozen=True)
class KernelRatio:
    min_ratio: float
    max_ratio: float


def kernel_ratio_check(w: WeightSequence, radii: Sequence[float], epsilon: float) -> KernelRatio:
    """Weighted-to-unweighted kernel diagonal ratio over the given radii.

    Each ratio is ``(1 - r^2) * sum_n r^(2n)/w_n``; for a spike-built
    sequence it must land in ``[1 - alpha, 1]`` up to the kernel-sum
    certificate.
    """
    ratios = []
    for r in radii:
        r = float(r)
        if not 0.0 <= r < 1.0:
            raise ParameterError("radii must lie in [0, 1)")
        value, _ = weighted_kernel_diag_certified(w, r)
        ratios.append(value * (1.0 - r * r))
    if not ratios:
        raise ParameterError("at least one radius is required")
    return KernelRatio(min_ratio=min(ratios), max_ratio=max(ratios))


@dataclass(frozen=True)
class SpikeBound:
    """Extremal value of ``x^(N+1) - x^(N+2j)`` on [0, 1] and its bound."""

    j: int
    start: int
    extremal: float
    bound: float

    def __post_init__(self):
        if self.extremal > self.bound + 1e-12:
            raise DataError("extremal value exceeds its bound")


def _grid_max(fn, lo: float, hi: float, n: int = 4097, zooms: int = 3) -> float:
    """Dense grid maximization with a few zoom passes; fn must be unimodal-ish."""
    best = -np.inf
    for _ in range(zooms + 1):
        xs = np.linspace(lo, hi, n)
        ys = fn(xs)
        i = int(np.argmax(ys))
        best = max(best, float(ys[i]))
        step = (hi - lo) / (n - 1)
        lo, hi = max(lo, xs[i] - 2 * step), min(hi, xs[i] + 2 * step)
    return best


def spike_peak_bound(n_start: int, j: int) -> SpikeBound:
    """Closed-form maximum of ``x^(N+1) - x^(N+2j)`` on [0, 1], cross-checked.

    The closed form evaluates the function at the stationary point
    ``x = ((N+1)/(N+2j))^(1/(2j-1))``; an independent grid search (in the
    variable ``u = -ln x``, which stays resolvable for huge ``N``) must
    agree within 1e-9 or :class:`AccuracyError` is raised.
    """
    if n_start < 1 or j < 1:
        raise ParameterError("need n_start >= 1 and j >= 1")
    a = n_start + 1
    b = n_start + 2 * j
    ratio = a / b
    extremal = ratio ** (a / (2 * j - 1)) * (2 * j - 1) / b
    bound = (2 * j - 1) / b

    searched = _grid_max(lambda u: np.exp(-a * u) - np.exp(-b * u), 0.0, 10.0 / a)
    if abs(searched - extremal) > 1e-9:
        raise AccuracyError(
            f"closed-form extremal {extremal!r} and grid search {searched!r} disagree"
        )
    return SpikeBound(j=j, start=n_start, extremal=float(extremal), bound=float(bound))


def backward_shift_apply(w: WeightSequence, coeffs) -> np.ndarray:
    """Apply the weighted backward shift: ``out_n = (w_{n+1}/w_n) a_{n+1}``."""
    a = np.asarray(coeffs, dtype=complex)
    if len(a) > w.length:
        raise CapacityError(
            f"coefficients of length {len(a)} exceed stored weights ({w.length})",
            required_length=len(a),
        )
    if len(a) <= 1:
        return np.zeros(0, dtype=complex)
    ratios = w.values[1:len(a)] / w.values[: len(a) - 1]
    return ratios * a[1:]


def shift_growth_witness(w: WeightSequence, coeffs, n_max: int) -> np.ndarray:
    """Norm squares ``|S^n f|_w^2 = sum_j |a_j|^2 w_{j+n}`` for n = 0..n_max."""
    a = np.asarray(coeffs, dtype=complex)
    if len(a) == 0 or not np.any(a != 0):
        raise DataError("coefficients must be nonzero")
    if n_max < 0:
        raise ParameterError("n_max must be >= 0")
    top = len(a) - 1 + n_max
    if top >= w.length:
        raise CapacityError(
            f"index {top} exceeds stored weights ({w.length})",
            required_length=top + 1,
        )
    absq = np.abs(a) ** 2
    out = np.empty(n_max + 1, dtype=float)
    for n in range(n_max + 1):
        out[n] = float(np.sum(absq * w.values[n : n + len(a)]))
    return out


def almost_isometry_check(w: WeightSequence, epsilon: float, trial_coeffs) -> float:
    """Worst multiplicative distortion of the forward shift over the trials.

    Returns ``max(r, 1/r)`` maximized over trials where
    ``r = |S f|_w / |f|_w``; for weights obeying the two-sided ratio bound
    the result lies in ``[1, 1 + epsilon]``.
    """
    worst = 1.0
    seen = False
    for coeffs in trial_coeffs:
        a = np.asarray(coeffs, dtype=complex)
        if len(a) + 1 > w.length:
            raise CapacityError(
                f"trial of length {len(a)} needs {len(a) + 1} stored weights",
                required_length=len(a) + 1,
            )
        absq = np.abs(a) ** 2
        nf = float(np.sum(absq * w.values[: len(a)]))
        if nf == 0.0:
            raise DataError("trial coefficients must be nonzero")
        ns = float(np.sum(absq * w.values[1 : len(a) + 1]))
        r = math.sqrt(ns / nf)
        worst = max(worst, r, 1.0 / r)
        seen = True
    if not seen:
        raise ParameterError("at least one trial is required")
    return worst


def weights_to_csv(w: WeightSequence, path) -> None:
    """Dump ``n,w_n,ln_w_n`` rows for plotting; values round-trip exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "w_n", "ln_w_n"])
        for n, v in enumerate(w.values):
            writer.writerow([n, repr(float(v)), repr(float(np.log(v)))])


def weights_from_csv(path) -> WeightSequence:
    """Reparse a dump written by :func:`weights_to_csv` (values only; the
    spike metadata is not part of the file format)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["n", "w_n", "ln_w_n"]:
            raise DataError("weight file must start with the header n,w_n,ln_w_n")
        values = []
        for row in reader:
            if len(row) != 3:
                raise DataError(f"weight row {len(values)} must have three fields")
            if int(row[0]) != len(values):
                raise DataError(f"weight rows must be consecutively indexed from 0")
            values.append(float(row[1]))
    if not values:
        raise DataError("weight file has no rows")
    return WeightSequence.from_values(values)


def counterexample_report(
    epsilon: float,
    spike_count: int,
    length: int,
    radii: Sequence[float] = DEFAULT_RADII,
) -> dict:
    """Build the canonical spike weight and run every check on it.

    The report carries the construction constants, the per-spike extremal
    values against their bounds, the consecutive-ratio extreme, the
    kernel-diagonal ratio range over ``radii``, and the growth-witness
    maximum ``(1+epsilon)^(2 spike_count)``.
    """
    w = build_spike_weight(epsilon, spike_count, length)
    spikes = []
    for j, start in enumerate(w.spike_starts, start=1):
        sb = spike_peak_bound(start, j)
        if sb.bound > w.alpha / 2 ** j + 1e-12:
            raise AccuracyError("spike bound exceeds alpha / 2^j; construction is inconsistent")
        spikes.append({"j": j, "N_j": int(start), "A_j": sb.extremal, "bound": sb.bound})
    growth = shift_growth_witness(w, [1.0], w.length - 1)
    ratio = kernel_ratio_check(w, radii, epsilon)
    return {
        "epsilon": float(epsilon),
        "alpha": float(w.alpha),
        "spikes": spikes,
        "ratio_check": ratio_bound_check(w, epsilon),
        "kernel_ratio": {"min": ratio.min_ratio, "max": ratio.max_ratio},
        "growth_max": float(np.max(growth)),
    }
