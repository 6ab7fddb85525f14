"""Correlation spectra and law extraction.

The uncentered correlation matrix of the window rows,

    C = Y^T Y / K,

is symmetric positive semidefinite.  Its eigenvector of smallest
eigenvalue is the weight vector ``w`` of the best linear law: the mean
square of the window residuals ``xi = Y w`` equals that eigenvalue, so
a near-null direction is a near-exact linear relation among lags.

Eigenproblems are solved with a cyclic Jacobi iteration.  Rotations are
applied in fixed row-major order, so results are bit-reproducible for
identical input; no external solver is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddedDataset, EmbeddingConfig
from .errors import DimensionMismatch, InvalidMask, NoConvergence

__all__ = [
    "CorrelationMatrix",
    "Spectrum",
    "LinearLaw",
    "correlation",
    "eigendecompose",
    "extract_law",
    "extract_symmetric_law",
    "law_residuals",
]

_SWEEP_LIMIT = 100


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric correlation matrix plus the window count it averages."""

    entries: np.ndarray
    sample_count: int

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        object.__setattr__(self, "entries", a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("correlation matrix must be square")

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs in ascending eigenvalue order.

    ``eigenvectors[:, j]`` belongs to ``eigenvalues[j]``.  When a lag
    mask was active, only the active subspace is reported and every
    vector carries exact zeros at masked positions.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=np.float64))
        object.__setattr__(self, "eigenvectors", np.asarray(self.eigenvectors, dtype=np.float64))


@dataclass(frozen=True)
class LinearLaw:
    """Unit-norm weight vector ``w`` with its residual eigenvalue.

    The law states sum_i w_i * y(t - i*stride) ~ 0.  ``symmetric_flag``
    marks weights that are palindromic by construction (w[i] == w[n-i]
    as exact floats).
    """

    weights: np.ndarray
    eigenvalue: float
    stride: int = 1
    mask: tuple[int, ...] = ()
    symmetric_flag: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("weights must be a vector of length n + 1 >= 2")
        if abs(np.linalg.norm(w) - 1.0) > 1e-12:
            raise ValueError("weights must have unit norm")
        if not self.mask:
            object.__setattr__(self, "mask", (1,) * w.size)
        elif len(self.mask) != w.size:
            raise ValueError("mask length must match weights")
        if any(b == 0 and w[i] != 0.0 for i, b in enumerate(self.mask)):
            raise ValueError("masked positions must carry weight exactly 0")
        if self.symmetric_flag and any(w[i] != w[w.size - 1 - i] for i in range(w.size)):
            raise ValueError("symmetric law must be exactly palindromic")

    @property
    def order(self) -> int:
        return int(self.weights.size - 1)


def correlation(dataset: EmbeddedDataset) -> CorrelationMatrix:
    """Uncentered second-moment matrix C = Y^T Y / K, symmetrized."""
    rows = dataset.rows
    k = rows.shape[0]
    c = rows.T @ rows / k
    c = (c + c.T) / 2.0
    return CorrelationMatrix(entries=c, sample_count=k)


def _jacobi(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps the strict upper triangle in row-major order until the
    off-diagonal Frobenius norm falls below 1e-12 * (1 + ||A||_F),
    capped at 100 sweeps.  Returns (eigenvalues, eigenvector columns),
    unordered.
    """
    a = np.array(matrix, dtype=np.float64)
    m = a.shape[0]
    v = np.eye(m)
    if m == 1:
        return np.array([a[0, 0]]), v
    threshold = 1e-12 * (1.0 + np.linalg.norm(a))
    skip = threshold / (2.0 * m)
    for _ in range(_SWEEP_LIMIT):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off < threshold:
            return np.diag(a).copy(), v
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1.0e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) \
                        if theta != 0.0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # two-sided rotation in the (p, q) plane
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    raise NoConvergence(
        f"off-diagonal norm stayed above {threshold:.3e} after {_SWEEP_LIMIT} sweeps"
    )


def _normalize_sign(vec: np.ndarray) -> np.ndarray:
    """Flip sign so the first non-negligible component is positive."""
    scale = np.max(np.abs(vec))
    if scale == 0.0:
        return vec
    for x in vec:
        if abs(x) > 1e-12 * scale:
            return -vec if x < 0.0 else vec
    return vec


def _ordered(vals: np.ndarray, vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues; ties resolved lexicographically on the
    sign-normalized vectors so output is deterministic."""
    cols = [_normalize_sign(vecs[:, j]) for j in range(vecs.shape[1])]
    tie = 1e-9 * (1.0 + float(np.max(np.abs(vals))) if vals.size else 1.0)
    order = sorted(range(len(vals)), key=lambda j: (vals[j],))
    i = 0
    while i < len(order) - 1:
        j = i
        while j + 1 < len(order) and vals[order[j + 1]] - vals[order[i]] <= tie:
            j += 1
        if j > i:
            order[i : j + 1] = sorted(order[i : j + 1], key=lambda idx: tuple(cols[idx]))
        i = j + 1
    return (
        np.array([vals[j] for j in order]),
        np.column_stack([cols[j] for j in order]),
    )


def eigendecompose(c: CorrelationMatrix, mask: tuple[int, ...] | None = None) -> Spectrum:
    """Full spectrum of a correlation matrix.

    With a lag mask, masked rows and columns are excluded and the
    reduced problem is solved; the returned eigenvectors are re-embedded
    with exact zeros at masked positions, so the spectrum holds one pair
    per active lag and no spurious null modes along masked axes.
    """
    a = c.entries if isinstance(c, CorrelationMatrix) else np.asarray(c, dtype=np.float64)
    m = a.shape[0]
    scale = np.max(np.abs(a)) if a.size else 0.0
    if not np.allclose(a, a.T, atol=1e-9 * (1.0 + scale)):
        raise ValueError("correlation matrix must be symmetric")
    if mask is not None and any(b == 0 for b in mask):
        if len(mask) != m:
            raise DimensionMismatch(f"mask of length {len(mask)} against a {m}x{m} matrix")
        active = [i for i, b in enumerate(mask) if b]
        sub = a[np.ix_(active, active)]
        vals, vecs = _jacobi(sub)
        full = np.zeros((m, len(active)))
        full[active, :] = vecs
        vals, full = _ordered(vals, full)
        return Spectrum(eigenvalues=vals, eigenvectors=full)
    vals, vecs = _jacobi(a)
    vals, vecs = _ordered(vals, vecs)
    return Spectrum(eigenvalues=vals, eigenvectors=vecs)


def extract_law(spectrum: Spectrum, config: EmbeddingConfig, index: int = 0) -> LinearLaw:
    """Pick the eigenvector of ``index``-th smallest eigenvalue as a law.

    ``index = 0`` is the best law; the top index is the dominant
    principal direction instead.  The vector is sign-normalized (first
    non-negligible component positive).
    """
    count = spectrum.eigenvalues.size
    if not 0 <= index < count:
        raise IndexError(f"eigenpair index {index} out of range ({count} pairs)")
    w = _normalize_sign(spectrum.eigenvectors[:, index].copy())
    w = w / np.linalg.norm(w)
    return LinearLaw(
        weights=w,
        eigenvalue=float(spectrum.eigenvalues[index]),
        stride=config.stride,
        mask=config.mask,
        symmetric_flag=False,
    )


def extract_symmetric_law(c: CorrelationMatrix, config: EmbeddingConfig) -> LinearLaw:
    """Best law constrained to the palindromic subspace w[i] = w[n-i].

    The constraint realizes time-reversal symmetry exactly: the
    eigenproblem is restricted to an orthonormal palindromic basis
    (paired unit vectors scaled by 1/sqrt(2), plus the middle axis for
    even ``n``) and the smallest reduced eigenpair is re-embedded.  The
    reported eigenvalue is the Rayleigh quotient of the returned
    weights, hence >= the unconstrained minimum.

    A lag mask must itself be palindromic to be compatible with the
    constraint; anything else raises InvalidMask.
    """
    a = c.entries
    m = a.shape[0]
    n = m - 1
    if len(config.mask) != m:
        raise DimensionMismatch(f"config mask length {len(config.mask)} against {m} lags")
    mask = config.mask
    if any(mask[i] != mask[n - i] for i in range(m)):
        raise InvalidMask("symmetric extraction needs a palindromic mask")
    half = 1.0 / np.sqrt(2.0)
    columns: list[tuple[int, int]] = []
    basis = []
    for j in range((n + 1) // 2):
        if mask[j]:
            u = np.zeros(m)
            u[j] = half
            u[n - j] = half
            basis.append(u)
            columns.append((j, n - j))
    if n % 2 == 0 and mask[n // 2]:
        u = np.zeros(m)
        u[n // 2] = 1.0
        basis.append(u)
        columns.append((n // 2, n // 2))
    b = np.column_stack(basis)
    reduced = b.T @ a @ b
    reduced = (reduced + reduced.T) / 2.0
    vals, vecs = _jacobi(reduced)
    vals, vecs = _ordered(vals, vecs)
    z = vecs[:, 0]
    w = np.zeros(m)
    for p, (i, j) in enumerate(columns):
        w[i] = w[j] = z[p] * (half if i != j else 1.0)
    w = w / np.linalg.norm(w)
    w = _normalize_sign(w)
    return LinearLaw(
        weights=w,
        eigenvalue=float(vals[0]),
        stride=config.stride,
        mask=config.mask,
        symmetric_flag=True,
    )


def law_residuals(dataset: EmbeddedDataset, law: LinearLaw) -> np.ndarray:
    """Per-window residuals xi = Y w; their mean square equals the
    law's eigenvalue when the law came from this dataset's spectrum."""
    rows = dataset.rows
    if rows.shape[1] != law.weights.size:
        raise DimensionMismatch(
            f"dataset windows have {rows.shape[1]} lags, law has {law.weights.size}"
        )
    return rows @ law.weights
