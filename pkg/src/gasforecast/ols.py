"""Least-squares fit and linear prediction on a :class:`DesignMatrix`."""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .design import DesignMatrix
from .errors import ConditioningWarning, DimensionMismatch, LabelMismatch, RankDeficient

WARN_CONDITION = 1e10
EPS = np.finfo(float).eps
MAX_CONDITION = 1.0 / EPS


def singular_condition(n_rows: int, n_cols: int) -> float:
    """Condition above which the scaled matrix is treated as numerically rank deficient.

    This is the usual rank tolerance ``max(m, n) * eps`` (as in LAPACK and
    ``numpy.linalg.matrix_rank``), never looser than ``1/eps``. Exactly collinear
    columns only reach about ``1e14`` after rounding, so ``1/eps`` alone misses them.
    """
    return MAX_CONDITION / max(n_rows, n_cols, 1)


@dataclass(frozen=True, eq=False)
class Coefficients:
    """Fitted coefficient vector with its column labels and fit diagnostics.

    ``condition_estimate`` is the 2-norm condition number of the design matrix after
    scaling every column to unit length, which is what governs the accuracy of the
    QR solve. ``standard_errors`` assume independent homoscedastic residuals.
    """

    values: np.ndarray
    labels: tuple[str, ...]
    condition_estimate: float = float("nan")
    standard_errors: np.ndarray | None = None
    residual_std: float = float("nan")
    n_obs: int = 0

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.labels),):
            raise DimensionMismatch(f"{values.size} coefficients for {len(self.labels)} labels")
        if not np.isfinite(values).all():
            raise ValueError("coefficients must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, label: str) -> float:
        return float(self.values[self.labels.index(label)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values.tolist()))


def _matrix_and_labels(F) -> tuple[np.ndarray, tuple[str, ...], int]:
    if isinstance(F, DesignMatrix):
        return F.columns, F.labels, F.first_valid_row
    arr = np.asarray(F, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch("design matrix must be 2-d")
    return arr, tuple(f"x{j}" for j in range(arr.shape[1])), 0


def fit(F: DesignMatrix | np.ndarray, S: Sequence[float]) -> Coefficients:
    """Minimise ``||F a - S||_2`` by Householder QR of the column-equilibrated matrix.

    Rows before ``F.first_valid_row`` are ignored when ``S`` has one value per row of
    ``F``. Emits :class:`ConditioningWarning` above a condition estimate of 1e10 and
    raises :class:`RankDeficient` above :func:`singular_condition` (or for an all-zero
    column).
    """
    A, labels, first = _matrix_and_labels(F)
    y = np.asarray(S, dtype=float).ravel()
    if y.size == A.shape[0] and first:
        A, y = A[first:], y[first:]
    n, k = A.shape
    if y.size != n:
        raise DimensionMismatch(f"design matrix has {n} rows, demand vector has {y.size}")
    if n < k:
        raise DimensionMismatch(f"need at least as many rows as columns ({n} < {k})")
    if not (np.isfinite(A).all() and np.isfinite(y).all()):
        raise ValueError("design matrix and demand must be finite")

    norms = np.linalg.norm(A, axis=0)
    if (norms == 0).any():
        raise RankDeficient(labels[int(np.flatnonzero(norms == 0)[0])], float("inf"))
    Q, R = np.linalg.qr(A / norms)
    condition = float(np.linalg.cond(R))
    limit = singular_condition(n, k)
    if not np.isfinite(condition) or condition > limit:
        raise RankDeficient(labels[_first_dependent(R, limit)], condition)
    if condition > WARN_CONDITION:
        warnings.warn(f"ill-conditioned design matrix (condition ~ {condition:.3g})", ConditioningWarning, stacklevel=2)

    qty = Q.T @ y
    z = solve_triangular(R, qty)
    values = z / norms

    dof = n - k
    resid = y - A @ values
    resid_sq = float(resid @ resid)
    sigma = np.sqrt(resid_sq / dof) if dof > 0 else float("nan")
    r_inv = solve_triangular(R, np.eye(k))
    se = sigma * np.sqrt((r_inv**2).sum(axis=1)) / norms
    return Coefficients(values, labels, condition, se, float(sigma), n)


def _first_dependent(R: np.ndarray, limit: float) -> int:
    for j in range(R.shape[0]):
        c = np.linalg.cond(R[: j + 1, : j + 1])
        if not np.isfinite(c) or c > limit:
            return j
    return int(np.argmin(np.abs(np.diag(R))))


def predict(F: DesignMatrix | np.ndarray, a: Coefficients) -> np.ndarray:
    """``F @ a`` after checking that the columns line up with the coefficients."""
    A, labels, _ = _matrix_and_labels(F)
    if isinstance(F, DesignMatrix):
        if labels != a.labels:
            raise LabelMismatch(f"matrix columns {labels} do not match coefficients {a.labels}")
    elif A.shape[1] != len(a):
        raise LabelMismatch(f"matrix has {A.shape[1]} columns, coefficient vector has {len(a)}")
    return A @ a.values


def format_coefficients(a: Coefficients, header: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("label,value\n")
    for label, value in zip(a.labels, a.values):
        out.write(f"{label},{float(value)!r}\n")
    return out.getvalue()


def write_coefficients(a: Coefficients, path: str | Path, header: Sequence[str] = ()) -> None:
    Path(path).write_text(format_coefficients(a, header), encoding="utf-8")


def parse_coefficients(text: str) -> tuple[Coefficients, list[str]]:
    """Inverse of :func:`format_coefficients`; returns the comment lines too."""
    comments, labels, values = [], [], []
    seen_header = False
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if not line.strip():
            continue
        if not seen_header:
            if line.strip() != "label,value":
                raise ValueError(f"unexpected coefficient header {line!r}")
            seen_header = True
            continue
        label, value = line.rsplit(",", 1)
        labels.append(label)
        values.append(float(value))
    return Coefficients(np.array(values), tuple(labels)), comments
