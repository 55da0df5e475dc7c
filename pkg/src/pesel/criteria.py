"""The four PESEL criteria and rank selection.

Each criterion scores a candidate rank k as a profile Gaussian log-likelihood
of the data minus a BIC-style penalty. Writing S for the sample count, A for
the ambient dimension (S = n, A = p for the n-asymptotic variants; S = p,
A = n for the p-asymptotic ones) and lambda_1 >= ... >= lambda_A for the
covariance spectrum with residual mean s2 = mean(lambda_{k+1..A}):

    loglik(k) = -(S*A/2) log 2pi - (S/2) T_k - (S*(A-k)/2) log s2 - S*A/2
    T_k       = sum_{j<=k} log lambda_j            (heterogeneous)
              = k * log(mean of top-k lambdas)     (homogeneous)
    penalty(k) = log(S) * d(k) / 2
    score(k)   = loglik(k) - penalty(k)

d(k) counts the free parameters: a k-frame on the Stiefel manifold in A
dimensions (A*k - k(k+1)/2), the mean vector (A), the noise variance (1),
plus either k free spike eigenvalues (heterogeneous) or a single shared
spike scale (homogeneous).

The p-asymptotic variants are the n-asymptotic ones applied to the
transposed data, and the implementation preserves that duality exactly: both
run the same arithmetic on the same spectrum, so score vectors agree to the
last bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, DomainError
from .matrix import DataMatrix, EigenSpectrum, Orientation, covariance_spectrum

# Absolute tolerance under which two totals are treated as tied; the smaller
# k wins (parsimony).
TIE_TOLERANCE = 1e-9

_LOG_2PI = math.log(2.0 * math.pi)


class Asymptotic(enum.Enum):
    """Which dimension is treated as growing: samples are rows (N_GROWS)
    or columns (P_GROWS)."""

    N_GROWS = "n"
    P_GROWS = "p"


class EigenStructure(enum.Enum):
    """Whether the top-k covariance eigenvalues are free (HETERO) or
    constrained to be equal (HOMO)."""

    HETERO = "hetero"
    HOMO = "homo"


class PeselVariant(enum.Enum):
    """One of the four criteria: {hetero, homo} x {n-asymptotic, p-asymptotic}."""

    HETERO_N = "hetero-n"
    HOMO_N = "homo-n"
    HETERO_P = "hetero-p"
    HOMO_P = "homo-p"

    @property
    def label(self) -> str:
        return self.value

    @property
    def asymptotic(self) -> Asymptotic:
        return Asymptotic.N_GROWS if self.value.endswith("-n") else Asymptotic.P_GROWS

    @property
    def structure(self) -> EigenStructure:
        return (
            EigenStructure.HOMO
            if self.value.startswith("homo")
            else EigenStructure.HETERO
        )

    @property
    def orientation(self) -> Orientation:
        """Spectrum orientation this variant consumes."""
        return (
            Orientation.ROWS
            if self.asymptotic is Asymptotic.N_GROWS
            else Orientation.COLUMNS
        )

    @classmethod
    def from_label(cls, label: str) -> "PeselVariant":
        for variant in cls:
            if variant.value == label:
                return variant
        raise DomainError(
            f"unknown variant {label!r}; expected one of "
            + ", ".join(v.value for v in cls)
        )


@dataclass(frozen=True)
class ScoreParts:
    """Score breakdown for one candidate rank.

    ``total`` is exactly ``loglik - penalty``; it is -inf when the residual
    variance (or a required spike eigenvalue) clamps to zero.
    """

    k: int
    loglik: float
    penalty: float
    total: float
    sigma2_hat: float


@dataclass(frozen=True)
class CriterionTrace:
    """Per-k score breakdowns for one variant over k = 0..k_max."""

    variant: PeselVariant
    n: int
    p: int
    scores: tuple[ScoreParts, ...]


@dataclass(frozen=True)
class SelectionResult:
    """Selected rank plus the trace it was selected from."""

    k_selected: int
    trace: CriterionTrace
    tie_broken: bool


def effective_dimension(variant: PeselVariant, n: int, p: int, k: int) -> int:
    """Number of free parameters of the rank-k model for the given variant.

    With m the ambient dimension (p for n-asymptotic variants, n for
    p-asymptotic ones): m*k - k(k+1)/2 + k + m + 1 for heterogeneous,
    m*k - k(k+1)/2 + m + 2 for homogeneous.
    """
    if not 0 <= k <= min(n, p) - 1:
        raise DomainError(f"k={k} outside valid range 0..{min(n, p) - 1}")
    m = p if variant.asymptotic is Asymptotic.N_GROWS else n
    stiefel = m * k - k * (k + 1) // 2
    if variant.structure is EigenStructure.HETERO:
        return stiefel + k + m + 1
    return stiefel + m + 2


def sigma2_hat(spectrum: EigenSpectrum, k: int) -> float:
    """Residual noise variance estimate: mean of eigenvalues after the top k."""
    if not 0 <= k <= spectrum.ambient_dim - 1:
        raise DomainError(
            f"k={k} leaves no residual eigenvalues "
            f"(ambient dimension {spectrum.ambient_dim})"
        )
    return float(spectrum.lambdas[k:].mean())


def pesel_score(
    spectrum: EigenSpectrum, variant: PeselVariant, n: int, p: int, k: int
) -> ScoreParts:
    """Evaluate one criterion at one candidate rank.

    The spectrum's orientation and shape must match the variant and the
    (n, p) of the matrix that produced it.
    """
    if spectrum.orientation is not variant.orientation:
        raise DomainError(
            f"variant {variant.label} needs a {variant.orientation.value} "
            f"spectrum, got {spectrum.orientation.value}"
        )
    n_growing = variant.asymptotic is Asymptotic.N_GROWS
    samples = n if n_growing else p
    ambient = p if n_growing else n
    if spectrum.divisor != samples or spectrum.ambient_dim != ambient:
        raise DomainError(
            f"spectrum (divisor {spectrum.divisor}, ambient "
            f"{spectrum.ambient_dim}) does not match n={n}, p={p} for "
            f"variant {variant.label}"
        )
    if not 0 <= k <= ambient - 1:
        raise DomainError(f"k={k} outside valid range 0..{ambient - 1}")

    dim = effective_dimension(variant, n, p, k)
    s2 = sigma2_hat(spectrum, k)
    loglik = _profile_loglik(
        spectrum.lambdas, samples, ambient, k, variant.structure, s2
    )
    penalty = math.log(samples) * dim / 2.0
    return ScoreParts(
        k=k, loglik=loglik, penalty=penalty, total=loglik - penalty, sigma2_hat=s2
    )


def _profile_loglik(lambdas, samples, ambient, k, structure, s2) -> float:
    """Profile log-likelihood at the ML estimates; -inf on a zero log path."""
    if s2 <= 0.0:
        return -math.inf
    if k > 0:
        top = lambdas[:k]
        if structure is EigenStructure.HOMO:
            mean_top = float(top.mean())
            if mean_top <= 0.0:
                return -math.inf
            top_term = -samples * k / 2.0 * math.log(mean_top)
        else:
            if top[-1] <= 0.0:
                return -math.inf
            top_term = -samples / 2.0 * float(np.log(top).sum())
    else:
        top_term = 0.0
    return (
        -samples * ambient / 2.0 * _LOG_2PI
        + top_term
        - samples * (ambient - k) / 2.0 * math.log(s2)
        - samples * ambient / 2.0
    )


def pesel_trace(X: DataMatrix, variant: PeselVariant, k_max: int) -> CriterionTrace:
    """Score all candidate ranks k = 0..k_max for one variant.

    Centers the data per the variant's orientation, computes the spectrum
    once and sweeps it. Requires n >= 2, p >= 2 and
    1 <= k_max <= min(n, p) - 1.
    """
    if X.n < 2 or X.p < 2:
        raise DomainError(f"criterion evaluation needs n >= 2 and p >= 2, got {X.n}x{X.p}")
    if not 1 <= k_max <= min(X.n, X.p) - 1:
        raise DomainError(
            f"k_max={k_max} outside valid range 1..{min(X.n, X.p) - 1}"
        )
    spectrum = covariance_spectrum(X, variant.orientation)
    if spectrum.lambdas[0] == 0.0:
        raise DegenerateDataError("centered data matrix is identically zero")
    scores = tuple(
        pesel_score(spectrum, variant, X.n, X.p, k) for k in range(k_max + 1)
    )
    return CriterionTrace(variant=variant, n=X.n, p=X.p, scores=scores)


def select_k(trace: CriterionTrace) -> SelectionResult:
    """Pick the rank with the highest total; ties within TIE_TOLERANCE go to
    the smallest k."""
    totals = [s.total for s in trace.scores]
    best = max(totals)
    if best == -math.inf:
        raise DegenerateDataError("every candidate rank scored -inf")
    candidates = [s.k for s in trace.scores if s.total >= best - TIE_TOLERANCE]
    return SelectionResult(
        k_selected=min(candidates), trace=trace, tie_broken=len(candidates) > 1
    )


def auto_variant(n: int, p: int) -> PeselVariant:
    """Pick the heterogeneous variant whose asymptotics match the shape:
    p-asymptotic when p > n, n-asymptotic otherwise (ties go to n)."""
    return PeselVariant.HETERO_P if p > n else PeselVariant.HETERO_N
