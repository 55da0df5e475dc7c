"""Data matrices, centering conventions and covariance spectra.

Every criterion in this package consumes the eigenvalues of a scaled sample
covariance matrix. Two orientations are supported: ROWS treats the rows of
the data matrix as exchangeable samples (the usual convention, covariance
over variables, column-mean centering), COLUMNS treats the columns as the
samples (covariance over observations, row-mean centering). The covariance
divisor is the number of samples (n for ROWS, p for COLUMNS), not n-1.

Spectra are computed from the singular values of the centered matrix rather
than by eigendecomposition of the explicitly formed covariance, which avoids
squaring the condition number. Eigenvalues below ``EIGENVALUE_REL_FLOOR``
times the largest one are clamped to exact zero so that downstream log terms
see a clean rank boundary instead of floating-point noise.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, IngestError, ParseError

# Relative floor under which spectrum eigenvalues are treated as exact zeros.
EIGENVALUE_REL_FLOOR = 1e-12


class Orientation(enum.Enum):
    """Which axis of the data matrix holds the exchangeable samples."""

    ROWS = "rows"
    COLUMNS = "columns"


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """Dense real matrix with n rows of observations and p columns of variables.

    The stored array is a read-only float64 copy of the input; instances are
    immutable and safe to share between threads.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise IngestError(f"expected a 2-d matrix, got {arr.ndim}-d data")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise IngestError(f"matrix must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise IngestError("matrix contains non-finite entries (NaN or Inf)")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        """Number of observations (rows)."""
        return self.values.shape[0]

    @property
    def p(self) -> int:
        """Number of variables (columns)."""
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class EigenSpectrum:
    """Descending eigenvalues of a scaled sample covariance matrix.

    Attributes:
        lambdas: eigenvalues, descending, length ``ambient_dim``, with exact
            zeros past the rank of the centered matrix.
        orientation: orientation of the model the spectrum belongs to.
        divisor: sample count used as covariance divisor (n for ROWS,
            p for COLUMNS).
        ambient_dim: dimension of each sample vector (p for ROWS, n for
            COLUMNS).
    """

    lambdas: np.ndarray
    orientation: Orientation
    divisor: int
    ambient_dim: int

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=np.float64, copy=True)
        if lam.ndim != 1 or lam.size != self.ambient_dim:
            raise DomainError(
                f"spectrum must have length {self.ambient_dim}, got {lam.size}"
            )
        if self.divisor < 1:
            raise DomainError("divisor must be a positive integer")
        if np.any(lam < 0):
            raise DomainError("eigenvalues must be non-negative")
        if np.any(np.diff(lam) > 0):
            raise DomainError("eigenvalues must be sorted in descending order")
        lam.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)


def load_csv(path, has_header: bool = False, delimiter: str = ",") -> DataMatrix:
    """Read a rectangular numeric CSV file into a DataMatrix.

    Rows are observations, columns are variables. Raises IngestError for an
    empty file or ragged rows, ParseError for any cell that is not a finite
    real number (the message names the offending file row and column,
    1-based).
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh, delimiter=delimiter) if row]
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise IngestError(f"no data rows in {path}")

    width = len(rows[0])
    data = np.empty((len(rows), width), dtype=np.float64)
    header_offset = 1 if has_header else 0
    for i, row in enumerate(rows):
        if len(row) != width:
            raise IngestError(
                f"ragged row {i + 1 + header_offset} in {path}: "
                f"expected {width} cells, got {len(row)}"
            )
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"cell at row {i + 1 + header_offset}, column {j + 1} "
                    f"of {path}: {cell!r} is not a number"
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"cell at row {i + 1 + header_offset}, column {j + 1} "
                    f"of {path}: {cell!r} is not finite"
                )
            data[i, j] = value
    return DataMatrix(data)


def center(X: DataMatrix, orientation: Orientation) -> DataMatrix:
    """Subtract per-variable means.

    ROWS subtracts each column's mean (output columns have mean zero),
    COLUMNS subtracts each row's mean (output rows have mean zero).
    """
    if orientation is Orientation.ROWS:
        return DataMatrix(X.values - X.values.mean(axis=0, keepdims=True))
    return DataMatrix(X.values - X.values.mean(axis=1, keepdims=True))


def transpose(X: DataMatrix) -> DataMatrix:
    """Swap the observation and variable axes."""
    return DataMatrix(X.values.T)


def covariance_spectrum(X: DataMatrix, orientation: Orientation) -> EigenSpectrum:
    """Eigenvalues of the scaled sample covariance for the given orientation.

    ROWS returns the eigenvalues of (1/n) Xc' Xc where Xc is the
    column-centered data; COLUMNS is, by definition, the ROWS spectrum of the
    transposed matrix (divisor p, ambient dimension n). Values are computed
    as squared singular values of the centered matrix and padded with exact
    zeros up to the ambient dimension.
    """
    if orientation is Orientation.COLUMNS:
        dual = covariance_spectrum(transpose(X), Orientation.ROWS)
        return EigenSpectrum(
            lambdas=dual.lambdas,
            orientation=Orientation.COLUMNS,
            divisor=dual.divisor,
            ambient_dim=dual.ambient_dim,
        )

    centered = center(X, Orientation.ROWS)
    singular = np.linalg.svd(centered.values, compute_uv=False)
    lam = np.zeros(X.p, dtype=np.float64)
    lam[: singular.size] = (singular * singular) / X.n
    lam = clamp_spectrum(lam)
    return EigenSpectrum(
        lambdas=lam, orientation=Orientation.ROWS, divisor=X.n, ambient_dim=X.p
    )


def clamp_spectrum(lam: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues below the relative floor (in place, returned)."""
    if lam.size and lam[0] > 0:
        lam[lam < EIGENVALUE_REL_FLOOR * lam[0]] = 0.0
    return lam
