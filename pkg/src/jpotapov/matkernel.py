"""Dense complex matrix primitives with tolerance-aware rank decisions.

All functions accept anything convertible to a 2-D complex array and never
modify their inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidSignature, NotPSD

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Contractivity",
    "SignatureMatrix",
    "as_cmatrix",
    "hermitian_part",
    "pinv",
    "psd_sqrt",
    "psd_factor",
    "PSDFactor",
    "spectral_norm",
    "min_eig",
    "j_contractivity",
    "is_j_unitary",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical slacks.

    Parameters
    ----------
    rank_rel : float
        Relative singular value cutoff used by `pinv`.
    psd_eig : float
        Eigenvalue slack for positive semidefiniteness decisions.
    residual : float
        Slack for identity checks.
    """

    rank_rel: float = 1e-12
    psd_eig: float = 1e-10
    residual: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel", "psd_eig", "residual"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name} must be positive, got {value}")

    def scaled(self, factor):
        """Return tolerances with `psd_eig` and `residual` multiplied by `factor`."""
        return Tolerances(self.rank_rel, self.psd_eig * factor, self.residual * factor)


DEFAULT_TOL = Tolerances()


class Contractivity(enum.Enum):
    STRICT = "strict"
    BOUNDARY = "boundary"
    NO = "no"


def as_cmatrix(x, name="matrix"):
    """Convert `x` to a finite 2-D complex array (a copy)."""
    a = np.array(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def hermitian_part(H):
    """Return (H + H*) / 2."""
    H = np.asarray(H, dtype=complex)
    return (H + H.conj().T) / 2


class SignatureMatrix:
    """Hermitian involution J (J* = J, J² = I).

    Parameters
    ----------
    J : array_like
        Square matrix, or a 1-D array of diagonal entries.
    tol_sym : float, optional
        Slack for the two defining identities.
    """

    __slots__ = ("_J",)

    def __init__(self, J, tol_sym=1e-12):
        J = np.asarray(J, dtype=complex)
        if J.ndim == 1:
            J = np.diag(J)
        J = as_cmatrix(J, "J")
        m, k = J.shape
        if m != k or m == 0:
            raise InvalidSignature(f"J must be square and nonempty, got {J.shape}")
        if np.linalg.norm(J - J.conj().T, 2) > tol_sym:
            raise InvalidSignature("J is not Hermitian")
        if np.linalg.norm(J @ J - np.eye(m), 2) > tol_sym:
            raise InvalidSignature("J is not an involution")
        self._J = _frozen(J)

    @classmethod
    def identity(cls, m):
        return cls(np.eye(m))

    @classmethod
    def coerce(cls, J):
        """Return `J` unchanged if it is a SignatureMatrix, else validate it."""
        return J if isinstance(J, cls) else cls(J)

    @property
    def m(self):
        return self._J.shape[0]

    @property
    def matrix(self):
        return self._J

    def __array__(self, dtype=None, copy=None):
        return self._J if dtype is None else self._J.astype(dtype)

    @property
    def P(self):
        """Projection (I + J)/2 onto the positive eigenspace."""
        return (np.eye(self.m) + self._J) / 2

    @property
    def Q(self):
        """Projection (I − J)/2 onto the negative eigenspace."""
        return (np.eye(self.m) - self._J) / 2

    def block(self, n):
        """Block diagonal diag(J, ..., J) with n + 1 copies."""
        return np.kron(np.eye(n + 1), self._J)

    def is_identity(self):
        return bool(np.allclose(self._J, np.eye(self.m), atol=1e-12))

    def __eq__(self, other):
        if not isinstance(other, SignatureMatrix):
            return NotImplemented
        return self.m == other.m and bool(np.array_equal(self._J, other._J))

    def __hash__(self):
        return hash(self._J.tobytes())

    def __repr__(self):
        d = np.diag(self._J)
        if np.array_equal(np.diag(d), self._J):
            return f"SignatureMatrix(diag={d.real.tolist()})"
        return f"SignatureMatrix({self._J.tolist()})"


def pinv(M, tol=DEFAULT_TOL, scale=None):
    """Moore-Penrose inverse via SVD.

    Singular values below ``rank_rel * max(sigma_max, scale) * max(rows, cols)``
    are treated as zero.

    Parameters
    ----------
    M : array_like
    tol : Tolerances, optional
    scale : float, optional
        Reference magnitude for the cutoff. Needed when `M` may be pure
        rounding noise, in which case `sigma_max` alone is meaningless.
    """
    M = as_cmatrix(M)
    rows, cols = M.shape
    if M.size == 0:
        return np.zeros((cols, rows), dtype=complex)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    ref = max(s[0] if s.size else 0.0, scale or 0.0)
    cutoff = tol.rank_rel * ref * max(rows, cols)
    keep = s > cutoff
    if not np.any(keep):
        return np.zeros((cols, rows), dtype=complex)
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def _eigh(H, tol):
    H = as_cmatrix(H)
    if H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {H.shape}")
    scale = max(1.0, np.abs(H).max(initial=0.0))
    if np.abs(H - H.conj().T).max(initial=0.0) > 1e-8 * scale:
        raise NotPSD("matrix is not Hermitian")
    return np.linalg.eigh(hermitian_part(H))


def psd_sqrt(H, tol=DEFAULT_TOL):
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-psd_eig, 0)`` are clamped to zero.

    Raises
    ------
    NotPSD
        If an eigenvalue is below ``-psd_eig``.
    """
    lam, V = _eigh(H, tol)
    if lam.size and lam[0] < -tol.psd_eig:
        raise NotPSD(f"eigenvalue {lam[0]:.3e} below -{tol.psd_eig:.1e}")
    return (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.conj().T


@dataclass(frozen=True)
class PSDFactor:
    """Square root, its pseudoinverse and the pseudoinverse of a PSD matrix.

    All three come from one eigendecomposition with a single zero cutoff,
    so their ranges agree exactly.
    """

    sqrt: np.ndarray
    sqrt_pinv: np.ndarray
    pinv: np.ndarray
    rank: int
    eigenvalues: np.ndarray


def psd_factor(H, tol=DEFAULT_TOL, cutoff=None):
    """Factor a positive semidefinite matrix with a consistent rank decision.

    Parameters
    ----------
    H : array_like
        Hermitian PSD matrix.
    tol : Tolerances, optional
    cutoff : float, optional
        Eigenvalues at or below this are zero. Defaults to
        ``rank_rel * lambda_max * dim``.
    """
    lam, V = _eigh(H, tol)
    slack = max(tol.psd_eig, cutoff or 0.0)
    if lam.size and lam[0] < -slack:
        raise NotPSD(f"eigenvalue {lam[0]:.3e} below -{slack:.1e}")
    if cutoff is None:
        cutoff = tol.rank_rel * max(lam[-1] if lam.size else 0.0, 0.0) * max(1, lam.size)
    keep = lam > cutoff
    r = np.where(keep, np.sqrt(np.where(keep, lam, 1.0)), 0.0)
    rinv = np.where(keep, 1.0 / r.clip(min=np.finfo(float).tiny), 0.0)
    Vh = V.conj().T
    return PSDFactor(
        sqrt=(V * r) @ Vh,
        sqrt_pinv=(V * rinv) @ Vh,
        pinv=(V * rinv**2) @ Vh,
        rank=int(keep.sum()),
        eigenvalues=np.where(keep, lam, 0.0),
    )


def spectral_norm(M):
    """Largest singular value."""
    M = as_cmatrix(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def min_eig(H):
    """Smallest eigenvalue of the Hermitian part of `H`."""
    H = as_cmatrix(H)
    if H.size == 0:
        return np.inf
    return float(np.linalg.eigvalsh(hermitian_part(H))[0])


def _check_square(A, J):
    A = as_cmatrix(A)
    Jm = np.asarray(SignatureMatrix.coerce(J))
    if A.shape != Jm.shape:
        raise DimensionMismatch(f"A has shape {A.shape}, J has shape {Jm.shape}")
    return A, Jm


def j_contractivity(A, J, tol=DEFAULT_TOL):
    """Classify A by the smallest eigenvalue of J − A*JA.

    Returns
    -------
    Contractivity
        STRICT if that eigenvalue exceeds ``psd_eig``, NO if it is below
        ``-psd_eig``, BOUNDARY otherwise.
    """
    A, Jm = _check_square(A, J)
    lam = min_eig(Jm - A.conj().T @ Jm @ A)
    if lam > tol.psd_eig:
        return Contractivity.STRICT
    if lam < -tol.psd_eig:
        return Contractivity.NO
    return Contractivity.BOUNDARY


def is_j_unitary(A, J, tol=DEFAULT_TOL):
    """True if ‖A*JA − J‖ ≤ residual·‖J‖."""
    A, Jm = _check_square(A, J)
    return spectral_norm(A.conj().T @ Jm @ A - Jm) <= tol.residual * spectral_norm(Jm)
