"""Brute-force reference evaluation of the profile likelihood.

The criteria in :mod:`pesel.criteria` score a rank through a closed form in
the covariance eigenvalues. This module validates that closed form the slow
way: reconstruct the ML covariance matrix explicitly (spikes plus isotropic
noise), then evaluate the Gaussian log-density of every sample against it
with a dense Cholesky factorization. No eigenvalue shortcuts are taken on
this path, so agreement with the closed form is a genuine cross-check.

Everything here runs at desk scale (ambient dimension a few dozen); it is a
verification surface, not a production code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .criteria import EigenStructure
from .errors import DomainError, SpikeBelowNoiseError
from .matrix import (
    DataMatrix,
    EigenSpectrum,
    Orientation,
    clamp_spectrum,
    transpose,
)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class MlEstimates:
    """ML parameter estimates of the rank-k spiked covariance model.

    For the heterogeneous structure the loading matrix satisfies
    W' W = diag(lambda_j - sigma2) over the top-k eigenvalues (the free
    rotation is fixed to the identity). For the homogeneous structure W holds
    the top-k orthonormal eigenvectors and ``beta`` the shared spike scale,
    so the model covariance is beta * W W' + sigma2 * I.
    """

    mu: np.ndarray
    W_hat: np.ndarray
    sigma2: float
    beta: float


def ml_estimates(
    X: DataMatrix,
    k: int,
    structure: EigenStructure,
    orientation: Orientation,
) -> MlEstimates:
    """Fit the rank-k model by eigendecomposition of the sample covariance.

    Raises SpikeBelowNoiseError for the heterogeneous structure when the
    k-th eigenvalue does not exceed the residual mean (the loading square
    root would be imaginary).
    """
    if orientation is Orientation.COLUMNS:
        return ml_estimates(transpose(X), k, structure, Orientation.ROWS)

    ambient = X.p
    if not 0 <= k <= ambient - 1:
        raise DomainError(f"k={k} outside valid range 0..{ambient - 1}")

    mu = X.values.mean(axis=0)
    centered = X.values - mu
    # Right singular vectors of the centered data are the eigenvectors of
    # the sample covariance; full_matrices gives the orthonormal completion
    # past the rank.
    _, singular, vt = np.linalg.svd(centered, full_matrices=True)
    lam = np.zeros(ambient)
    lam[: singular.size] = (singular * singular) / X.n
    lam = clamp_spectrum(lam)

    sigma2 = float(lam[k:].mean())
    eigvecs = vt[:k].T
    if structure is EigenStructure.HETERO:
        if k > 0 and lam[k - 1] <= sigma2:
            raise SpikeBelowNoiseError(
                f"eigenvalue {k} ({lam[k - 1]:.6g}) does not exceed the "
                f"residual noise level ({sigma2:.6g})"
            )
        w = eigvecs * np.sqrt(lam[:k] - sigma2)
        beta = 0.0
    else:
        w = eigvecs
        beta = float(lam[:k].mean()) - sigma2 if k > 0 else 0.0
    return MlEstimates(mu=mu, W_hat=w, sigma2=sigma2, beta=beta)


def direct_sil_loglik(
    X: DataMatrix,
    est: MlEstimates,
    structure: EigenStructure,
    orientation: Orientation,
) -> float:
    """Sum of Gaussian log-densities of the samples under the fitted model.

    Builds the model covariance densely and factors it with Cholesky;
    np.linalg.LinAlgError propagates if it is not positive definite.
    """
    samples = X.values if orientation is Orientation.ROWS else X.values.T
    ambient = samples.shape[1]
    if est.W_hat.shape[0] != ambient or est.mu.shape[0] != ambient:
        raise DomainError(
            f"estimates built for ambient dimension {est.W_hat.shape[0]}, "
            f"data has {ambient}"
        )

    scale = est.beta if structure is EigenStructure.HOMO else 1.0
    cov = scale * (est.W_hat @ est.W_hat.T) + est.sigma2 * np.eye(ambient)
    chol = np.linalg.cholesky(cov)
    logdet = 2.0 * float(np.log(np.diag(chol)).sum())

    diffs = samples - est.mu
    whitened = solve_triangular(chol, diffs.T, lower=True)
    quad = float((whitened * whitened).sum())
    count = samples.shape[0]
    return -0.5 * count * ambient * _LOG_2PI - 0.5 * count * logdet - 0.5 * quad


def closed_form_sil(
    spectrum: EigenSpectrum,
    S: int,
    A: int,
    k: int,
    structure: EigenStructure,
) -> float:
    """Closed form of the profile log-likelihood in the eigenvalues.

    -(S*A/2) log 2pi - (S/2) sum_{j<=k} log lambda_j
    - (S*(A-k)/2) log s2 - S*A/2, with the homogeneous substitution
    k*log(mean top-k) for the first sum. Returns -inf (never raises) when a
    zero eigenvalue lands in a log.
    """
    if A != spectrum.ambient_dim:
        raise DomainError(
            f"A={A} does not match spectrum ambient dimension "
            f"{spectrum.ambient_dim}"
        )
    if not 0 <= k <= A - 1:
        raise DomainError(f"k={k} outside valid range 0..{A - 1}")

    lam = spectrum.lambdas
    s2 = float(lam[k:].mean())
    if s2 <= 0.0:
        return -math.inf
    if k > 0:
        top = lam[:k]
        if structure is EigenStructure.HOMO:
            mean_top = float(top.mean())
            if mean_top <= 0.0:
                return -math.inf
            spike_term = -S * k / 2.0 * math.log(mean_top)
        else:
            if top[-1] <= 0.0:
                return -math.inf
            spike_term = -S / 2.0 * float(np.log(top).sum())
    else:
        spike_term = 0.0
    return (
        -S * A / 2.0 * _LOG_2PI
        + spike_term
        - S * (A - k) / 2.0 * math.log(s2)
        - S * A / 2.0
    )
