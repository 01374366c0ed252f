"""Toolkit for quantifying correlated heavy-tailed rotation noise in
quantum error correction: analytic code-capacity formulas plus a
distance-3 rotated-surface-code Monte Carlo simulator."""

__version__ = "0.1.0"

from .distributions import (
    DistributionSpec,
    char_fn,
    gaussian,
    pdf,
    physical_error_prob,
    physical_infidelity,
    sample,
    stable,
    student,
)

__all__ = [
    "DistributionSpec",
    "char_fn",
    "pdf",
    "sample",
    "physical_error_prob",
    "physical_infidelity",
    "gaussian",
    "student",
    "stable",
    "__version__",
]
