"""Code-capacity logical error rates for an n-qubit perfect code.

A distance-d perfect code corrects exactly w = (d-1)/2 arbitrary errors.
Every data qubit suffers a rotation by an angle theta; with independent
angles the logical error probability is a binomial tail in
s = <sin^2(theta/2)> = (1 - f(1))/2, while with one shared angle it is a
signed triple sum over characteristic-function values f(m) at integer
arguments.  The shared-angle sum cancels catastrophically as sigma -> 0, so
it is evaluated in extended precision and cross-checked by a Monte Carlo
oracle over the bounded single-angle integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .distributions import DistributionSpec, ParameterError, char_fn_mp, one_minus_char_fn, sample

# extra bits demanded beyond the cancellation level before a result is trusted
_GUARD_BITS = 40


class PrecisionError(RuntimeError):
    """Working precision is insufficient for the requested evaluation."""


class FitRegimeError(RuntimeError):
    """The sample grid is not in the asymptotic power-law regime."""


@dataclass(frozen=True)
class PerfectCodeModel:
    """Distance-d perfect code under a given angle distribution.

    n_qubits defaults to the Knill-Laflamme bound 4w + 1.
    """

    spec: DistributionSpec
    distance: int
    n_qubits: int | None = None

    def __post_init__(self):
        if self.distance < 1 or self.distance % 2 == 0:
            raise ParameterError(f"distance must be odd and >= 1, got {self.distance}")
        if self.n_qubits is not None and self.n_qubits < self.distance:
            raise ParameterError(f"n_qubits {self.n_qubits} below distance {self.distance}")

    @property
    def w(self) -> int:
        return (self.distance - 1) // 2

    @property
    def n(self) -> int:
        return self.n_qubits if self.n_qubits is not None else 4 * self.w + 1


def logical_error_uncorrelated(model: PerfectCodeModel) -> float:
    """Independent angles: exact complementary binomial tail
    sum_{k=w+1}^n C(n,k) (1-s)^(n-k) s^k, cancellation-free."""
    n, w = model.n, model.w
    s = 0.5 * one_minus_char_fn(model.spec, 1.0)
    if s == 0.0:
        return 0.0
    c = 1.0 - s
    total = 0.0
    for k in range(w + 1, n + 1):
        total += math.comb(n, k) * c ** (n - k) * s**k
    return float(total)


def logical_error_correlated(model: PerfectCodeModel, working_precision_bits: int = 256) -> float:
    """One shared angle: evaluates the signed triple

        1 - 4^-n sum_{k<=w} sum_l sum_m C(n,k) C(2(n-k),l) C(2k,m)
                 (-1)^(m-k) f(n-l-m)

    in extended precision.  Raises PrecisionError when the tracked
    cancellation leaves fewer than 40 trusted bits or the result falls
    outside [0, 1] beyond rounding slack."""
    if working_precision_bits < 128:
        raise ParameterError(f"working_precision_bits must be >= 128, got {working_precision_bits}")
    n, w = model.n, model.w
    if model.spec.sigma == 0.0:
        return 0.0
    with mpmath.workprec(working_precision_bits):
        f = [char_fn_mp(model.spec, m) for m in range(n + 1)]
        total = mpmath.mpf(0)
        magnitude = mpmath.mpf(0)
        for k in range(w + 1):
            ck = math.comb(n, k)
            for l in range(2 * (n - k) + 1):
                cl = math.comb(2 * (n - k), l)
                for m in range(2 * k + 1):
                    term = ck * cl * math.comb(2 * k, m) * f[abs(n - l - m)]
                    magnitude += term
                    if (m - k) % 2:
                        total -= term
                    else:
                        total += term
        p = 1 - total / mpmath.mpf(4) ** n
        scale = magnitude / mpmath.mpf(4) ** n
        if p != 0:
            lost_bits = max(0.0, float(mpmath.log(scale / abs(p), 2)))
            if working_precision_bits - lost_bits < _GUARD_BITS:
                raise PrecisionError(
                    f"cancellation consumed ~{lost_bits:.0f} of {working_precision_bits} bits; "
                    "retry with more working_precision_bits"
                )
        eps = mpmath.mpf(2) ** (-_GUARD_BITS)
        if p < -eps or p > 1 + eps:
            raise PrecisionError(
                f"result {float(p):.3e} outside [0, 1]; retry with more working_precision_bits"
            )
        return float(min(max(p, mpmath.mpf(0)), mpmath.mpf(1)))


def correlated_mc_oracle(
    model: PerfectCodeModel,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 1_000_000,
) -> tuple[float, float]:
    """Monte Carlo estimate of the shared-angle logical error probability.

    Draws one angle per trial and averages the bounded integrand
    1 - sum_{k<=w} C(n,k) cos^(2(n-k))(t/2) sin^(2k)(t/2), so heavy tails
    are harmless.  Returns (mean, standard error)."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    n, w = model.n, model.w
    if model.spec.sigma == 0.0:
        return 0.0, 0.0
    acc = 0.0
    acc2 = 0.0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        theta = np.asarray(sample(model.spec, rng, m))
        c2 = np.cos(theta / 2.0) ** 2
        s2 = 1.0 - c2
        kept = np.zeros_like(c2)
        for k in range(w + 1):
            kept += math.comb(n, k) * c2 ** (n - k) * s2**k
        g = 1.0 - kept
        acc += float(g.sum())
        acc2 += float((g * g).sum())
        done += m
    mean = acc / trials
    var = max(acc2 / trials - mean * mean, 0.0)
    return mean, math.sqrt(var / trials)


def stable_alpha_term_coefficient(alpha: float) -> float:
    """Coefficient of sigma^alpha in the shared-angle logical error of the
    distance-3 (n=5) code under stable noise; vanishes exactly at alpha=2."""
    return (5.0 * 2.0 ** (alpha + 2.0) - 5.0 * 3.0**alpha - 5.0 * 4.0**alpha - 5.0**alpha + 70.0) / 128.0


@dataclass(frozen=True)
class FitResult:
    exponent: float
    coefficient: float
    exponent_drift: float


def fit_leading_order(
    x_values,
    probabilities,
    max_exponent_drift: float | None = 0.01,
) -> FitResult:
    """Least-squares log-log fit P = coefficient * x^exponent.

    With max_exponent_drift set, the grid must span at least a decade and
    the exponents fitted on the lower and upper halves must agree to that
    relative tolerance -- the guard that the grid sits in the asymptotic
    regime.  exponent_drift reports the observed relative disagreement.
    """
    x = np.asarray(x_values, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if x.size != p.size or x.size < 4:
        raise ParameterError("need at least 4 (x, probability) pairs")
    if np.any(x <= 0.0) or np.any(p <= 0.0):
        raise ParameterError("x values and probabilities must be positive")
    order = np.argsort(x)
    lx = np.log(x[order])
    lp = np.log(p[order])

    def slope_intercept(a, b):
        coeffs = np.polyfit(a, b, 1)
        return float(coeffs[0]), float(coeffs[1])

    exponent, intercept = slope_intercept(lx, lp)
    half = x.size // 2
    lo_slope, _ = slope_intercept(lx[:half], lp[:half])
    hi_slope, _ = slope_intercept(lx[x.size - half :], lp[x.size - half :])
    drift = abs(hi_slope - lo_slope) / max(abs(exponent), 1e-30)
    if max_exponent_drift is not None:
        if lx[-1] - lx[0] < math.log(10.0) * (1.0 - 1e-9):
            raise FitRegimeError("grid must span at least one decade")
        if drift > max_exponent_drift:
            raise FitRegimeError(
                f"exponent drifts {drift:.2%} between half-grids "
                f"({lo_slope:.4f} vs {hi_slope:.4f}); shrink sigma"
            )
    return FitResult(exponent, math.exp(intercept), drift)
