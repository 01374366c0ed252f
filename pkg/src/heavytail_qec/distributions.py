"""Noise-angle distributions: sampling, densities, characteristic functions.

Three symmetric zero-centered families are supported:

* ``gaussian`` -- scale sigma, cf exp(-sigma^2 t^2 / 2)
* ``student``  -- scale sigma, integer degrees of freedom nu >= 1
* ``stable``   -- scale sigma, stability 0 < alpha <= 2, cf exp(-|sigma t|^alpha)

The Cauchy distribution is student nu=1, which coincides with stable alpha=1.
Parametrizations are pinned to these characteristic functions, not to any
library default (stable-law conventions differ and silently break the
alpha=2 <-> Gaussian correspondence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special

FAMILIES = ("gaussian", "student", "stable")


class ParameterError(ValueError):
    """Invalid distribution parameters."""


class UnsupportedOperationError(ValueError):
    """Operation has no closed form for this family."""


@dataclass(frozen=True)
class DistributionSpec:
    """A symmetric zero-centered angle distribution.

    sigma is the scale/width parameter in radians.  nu is used only for
    family="student", alpha only for family="stable".  sigma=0 is allowed
    and denotes the degenerate noiseless distribution.
    """

    family: str
    sigma: float
    nu: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if not (self.sigma >= 0.0) or not math.isfinite(self.sigma):
            raise ParameterError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.family == "student":
            if self.nu is None or int(self.nu) != self.nu or self.nu < 1:
                raise ParameterError(f"student requires integer nu >= 1, got {self.nu}")
        if self.family == "stable":
            if self.alpha is None or not (0.0 < self.alpha <= 2.0):
                raise ParameterError(f"stable requires 0 < alpha <= 2, got {self.alpha}")

    def with_sigma(self, sigma: float) -> "DistributionSpec":
        return DistributionSpec(self.family, sigma, self.nu, self.alpha)


def gaussian(sigma: float) -> DistributionSpec:
    return DistributionSpec("gaussian", sigma)


def student(sigma: float, nu: int) -> DistributionSpec:
    return DistributionSpec("student", sigma, nu=nu)


def stable(sigma: float, alpha: float) -> DistributionSpec:
    return DistributionSpec("stable", sigma, alpha=alpha)


def modified_bessel_k(order: float, x):
    """Modified Bessel function of the second kind K_order(x), x > 0.

    Half-integer orders (the student odd-nu case) use the closed-form
    finite sum; other orders fall back to scipy's generic evaluation.
    """
    two = 2.0 * order
    if two == int(two) and int(two) % 2 == 1 and order > 0:
        m = int(two) // 2
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for k in range(m + 1):
            coef = math.factorial(m + k) / (math.factorial(k) * math.factorial(m - k))
            acc = acc + coef / (2.0 * x) ** k
        return np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) * acc
    return special.kv(order, x)


def char_fn(spec: DistributionSpec, t):
    """Characteristic function f(t) = <cos(t theta)>; real, even, f(0)=1."""
    t = np.abs(np.asarray(t, dtype=float))
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if spec.sigma == 0.0:
        out = np.ones_like(t)
    elif spec.family == "gaussian":
        out = np.exp(-0.5 * (spec.sigma * t) ** 2)
    elif spec.family == "stable":
        out = np.exp(-((spec.sigma * t) ** spec.alpha))
    else:
        nu = float(spec.nu)
        x = spec.sigma * math.sqrt(nu) * t
        out = np.ones_like(t)
        nz = x > 0
        if nu < 30:
            pref = x[nz] ** (nu / 2.0) / (2.0 ** (nu / 2.0 - 1.0) * special.gamma(nu / 2.0))
            out[nz] = pref * modified_bessel_k(nu / 2.0, x[nz])
        else:
            # prefactor and K separately overflow/underflow at large nu
            with mpmath.workprec(80):
                out[nz] = [float(char_fn_mp(spec, ti)) for ti in np.atleast_1d(t)[nz]]
    return float(out[0]) if scalar else out


def char_fn_mp(spec: DistributionSpec, t) -> mpmath.mpf:
    """char_fn evaluated with mpmath at the caller's working precision."""
    t = abs(mpmath.mpf(t))
    if spec.sigma == 0.0 or t == 0:
        return mpmath.mpf(1)
    sigma = mpmath.mpf(spec.sigma)
    if spec.family == "gaussian":
        return mpmath.exp(-(sigma * t) ** 2 / 2)
    if spec.family == "stable":
        return mpmath.exp(-((sigma * t) ** mpmath.mpf(spec.alpha)))
    nu = mpmath.mpf(spec.nu)
    x = sigma * mpmath.sqrt(nu) * t
    pref = x ** (nu / 2) / (2 ** (nu / 2 - 1) * mpmath.gamma(nu / 2))
    return pref * mpmath.besselk(nu / 2, x)


def one_minus_char_fn(spec: DistributionSpec, t: float) -> float:
    """1 - f(t) without cancellation for small sigma*t."""
    if spec.sigma == 0.0 or t == 0:
        return 0.0
    if spec.family == "gaussian":
        return -math.expm1(-0.5 * (spec.sigma * t) ** 2)
    if spec.family == "stable":
        return -math.expm1(-abs(spec.sigma * t) ** spec.alpha)
    # student: no elementary form; 80-bit mpmath keeps all double digits
    with mpmath.workprec(80):
        return float(1 - char_fn_mp(spec, t))


def pdf(spec: DistributionSpec, theta):
    """Probability density.  Supported for gaussian, student, and the two
    stable cases with closed forms (alpha=1 Cauchy, alpha=2 Gaussian)."""
    if spec.sigma == 0.0:
        raise UnsupportedOperationError("degenerate sigma=0 has no density")
    theta = np.asarray(theta, dtype=float)
    if spec.family == "gaussian":
        return np.exp(-0.5 * (theta / spec.sigma) ** 2) / (spec.sigma * math.sqrt(2.0 * math.pi))
    if spec.family == "student":
        nu = float(spec.nu)
        lognorm = (
            (nu / 2.0) * math.log(nu * spec.sigma**2)
            + math.lgamma((nu + 1.0) / 2.0)
            - 0.5 * math.log(math.pi)
            - math.lgamma(nu / 2.0)
        )
        return np.exp(lognorm - ((nu + 1.0) / 2.0) * np.log(nu * spec.sigma**2 + theta**2))
    if spec.alpha == 1.0:
        return pdf(student(spec.sigma, 1), theta)
    if spec.alpha == 2.0:
        return pdf(gaussian(spec.sigma * math.sqrt(2.0)), theta)
    raise UnsupportedOperationError(
        f"stable pdf has no closed form for alpha={spec.alpha} (only alpha in {{1, 2}})"
    )


def sample(spec: DistributionSpec, rng: np.random.Generator, size=None):
    """Draw variates whose distribution matches char_fn(spec, .).

    student uses sigma*Z/sqrt(C/nu); symmetric stable uses the
    Chambers-Mallows-Stuck construction.  Samples are never clipped or
    wrapped; angles only ever enter trigonometric functions.
    """
    if spec.sigma == 0.0:
        return 0.0 if size is None else np.zeros(size)
    if spec.family == "gaussian":
        return spec.sigma * rng.standard_normal(size)
    if spec.family == "student":
        z = rng.standard_normal(size)
        c = rng.chisquare(spec.nu, size)
        return spec.sigma * z / np.sqrt(c / spec.nu)
    alpha = spec.alpha
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    w = rng.standard_exponential(size)
    x = (np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)) * (
        np.cos((1.0 - alpha) * u) / w
    ) ** ((1.0 - alpha) / alpha)
    return spec.sigma * x


def physical_error_prob(spec: DistributionSpec) -> float:
    """Bit- or phase-flip probability of one rotated qubit: (1 - f(1)) / 2."""
    return 0.5 * one_minus_char_fn(spec, 1.0)


def physical_infidelity(spec: DistributionSpec) -> float:
    """State-averaged single-qubit infidelity 1 - F^2 = (3/8)(1 - f(2))."""
    return 0.375 * one_minus_char_fn(spec, 2.0)


def empirical_char_fn(samples: np.ndarray, t: float) -> tuple[float, float]:
    """Empirical cf estimate mean(cos(t theta)) and its standard error.

    cos is bounded, so the estimator converges even for heavy tails.
    """
    c = np.cos(t * samples)
    n = c.size
    return float(c.mean()), float(c.std(ddof=1) / math.sqrt(n))
