"""Solutions of the interpolation problem.

Every J-Potapov function holomorphic at 0 with Taylor coefficients A_0..A_n
is a linear fractional transform f_S of a Schur function S. Here S is a
constant contraction or a matrix polynomial, so each f_S is rational.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import AllSamplesSingular, DimensionMismatch, InvalidParam, NotPotapov, SingularAtOrigin
from .matkernel import DEFAULT_TOL, SignatureMatrix, as_cmatrix, spectral_norm
from .polynomials import MatrixPoly, RationalMatrixFn, four_polys, reciprocal
from .serialize import matrix_from_json, matrix_to_json

__all__ = [
    "RationalMatrixFn",
    "SchurParam",
    "UniquenessResult",
    "central_function",
    "lft_solution",
    "taylor_coeffs",
    "uniqueness",
    "canonical_parameter",
    "parameter_equivalence",
    "j_unitary_boundary_test",
    "bp_product_check",
    "holomorphy_poles",
    "circle_points",
]


class SchurParam:
    """Schur-class parameter: a constant contraction or a matrix polynomial.

    Parameters
    ----------
    value : array_like or MatrixPoly
    """

    __slots__ = ("_poly", "kind")

    def __init__(self, value):
        if isinstance(value, MatrixPoly):
            self._poly, self.kind = value, "poly"
        else:
            self._poly, self.kind = MatrixPoly([as_cmatrix(value, "parameter")]), "constant"
        if self._poly.shape[0] != self._poly.shape[1]:
            raise DimensionMismatch("parameter must be square")

    @classmethod
    def constant(cls, K):
        return cls(as_cmatrix(K))

    @classmethod
    def zero(cls, m):
        return cls(np.zeros((m, m)))

    @property
    def m(self):
        return self._poly.shape[0]

    @property
    def value(self):
        """The constant matrix, or the polynomial."""
        return self._poly.coeff(0) if self.kind == "constant" else self._poly

    def as_poly(self):
        return self._poly

    def __call__(self, w):
        return self._poly(w)

    def validate(self, m, tol=DEFAULT_TOL):
        """Raise InvalidParam unless this is an m×m Schur-class parameter.

        A constant must have norm at most one. A polynomial must have a
        contractive Toeplitz coefficient matrix and stay contractive on a
        256-point boundary grid; the grid check is needed because the
        coefficient test alone admits polynomials like 0.6 + 0.6w.
        """
        from .sequence import PotapovSeq

        if self.m != m:
            raise InvalidParam(f"parameter is {self.m}×{self.m}, expected {m}×{m}")
        slack = 1 + tol.residual
        if self.kind == "constant":
            if spectral_norm(self.value) > slack:
                raise InvalidParam("constant parameter is not contractive")
            return self
        if not PotapovSeq(np.eye(m), self._poly.coeffs, tol).is_potapov:
            raise InvalidParam("polynomial coefficients are not a Schur sequence")
        for z in circle_points(256):
            if spectral_norm(self._poly(z)) > slack:
                raise InvalidParam("polynomial parameter exceeds norm one on the circle")
        return self

    def to_json(self):
        if self.kind == "constant":
            return {"constant": matrix_to_json(self.value)}
        return {"poly": self._poly.to_json()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, dict) and "constant" in obj:
            return cls(matrix_from_json(obj["constant"]))
        if isinstance(obj, dict) and "poly" in obj:
            return cls(MatrixPoly.from_json(obj["poly"]))
        raise ValueError("parameter JSON needs key 'constant' or 'poly'")


def circle_points(count, radius=1.0):
    """`count` equispaced points on the circle of the given radius."""
    return radius * np.exp(2j * np.pi * np.arange(count) / count)


def _require_potapov(seq):
    if not seq.is_potapov:
        raise NotPotapov("the sequence is not J-Potapov")


def _param(seq, S):
    if S is None:
        return SchurParam.zero(seq.m)
    if not isinstance(S, SchurParam):
        S = SchurParam(S)
    return S.validate(seq.m, seq.tol)


def central_function(seq, orientation="left", construction="general"):
    """Central solution πρ⁻¹ (left) or τ⁻¹σ (right)."""
    _require_potapov(seq)
    f = four_polys(seq, construction)
    if orientation == "left":
        return RationalMatrixFn(f.pi, f.rho, "left")
    if orientation == "right":
        return RationalMatrixFn(f.sigma, f.tau, "right")
    raise ValueError("orientation must be 'left' or 'right'")


def lft_solution(seq, S=None, orientation="left", construction="general"):
    """Solution f_S generated by the Schur parameter S.

    Left form: (wJτ̃√L⁺S√R + π)(wJσ̃√L⁺S√R + ρ)⁻¹.
    Right form: (w√LS√R⁺π̃J + τ)⁻¹(w√LS√R⁺ρ̃J + σ).

    Parameters
    ----------
    seq : PotapovSeq
    S : SchurParam or array_like, optional
        Defaults to zero, which gives the central function.
    orientation : {"left", "right"}
    construction : {"general", "recursive", "strict"}

    Raises
    ------
    NotPotapov, InvalidParam
    """
    _require_potapov(seq)
    Sp = _param(seq, S).as_poly()
    f = four_polys(seq, construction)
    J = np.asarray(seq.J)
    b = seq.ball
    n = seq.n
    if orientation == "left":
        core = b.sqrtL_pinv @ Sp @ b.sqrtR
        num = (J @ reciprocal(f.tau, n) @ core).shift() + f.pi
        den = (J @ reciprocal(f.sigma, n) @ core).shift() + f.rho
        return RationalMatrixFn(num, den, "left")
    if orientation == "right":
        core = b.sqrtL @ Sp @ b.sqrtR_pinv
        num = (core @ reciprocal(f.rho, n) @ J).shift() + f.sigma
        den = (core @ reciprocal(f.pi, n) @ J).shift() + f.tau
        return RationalMatrixFn(num, den, "right")
    raise ValueError("orientation must be 'left' or 'right'")


def taylor_coeffs(f, k):
    """First k + 1 Taylor coefficients at the origin.

    The denominator is inverted as a power series, using the exact inverse
    of its constant term, and the result is convolved with the numerator.

    Raises
    ------
    SingularAtOrigin
        If det den(0) = 0.
    """
    D0 = f.den.coeff(0)
    if abs(np.linalg.det(D0)) <= 1e-14 * max(1.0, np.abs(D0).max()) ** D0.shape[0]:
        raise SingularAtOrigin("denominator is singular at w = 0")
    D0inv = np.linalg.inv(D0)
    E = [D0inv]
    for j in range(1, k + 1):
        if f.orientation == "left":
            acc = sum((f.den.coeff(i) @ E[j - i] for i in range(1, min(j, f.den.degree) + 1)),
                      np.zeros_like(D0inv))
            E.append(-D0inv @ acc)
        else:
            acc = sum((E[j - i] @ f.den.coeff(i) for i in range(1, min(j, f.den.degree) + 1)),
                      np.zeros_like(D0inv))
            E.append(-acc @ D0inv)
    out = []
    for j in range(k + 1):
        lo = max(0, j - f.num.degree)
        if f.orientation == "left":
            out.append(sum((f.num.coeff(j - i) @ E[i] for i in range(lo, j + 1)),
                           np.zeros(f.shape, complex)))
        else:
            out.append(sum((E[i] @ f.num.coeff(j - i) for i in range(lo, j + 1)),
                           np.zeros(f.shape, complex)))
    return out


@dataclass(frozen=True)
class UniquenessResult:
    unique: bool
    witness: RationalMatrixFn
    normL: float
    normR: float

    @property
    def verdict(self):
        return "Unique" if self.unique else "NonUnique"


def uniqueness(seq):
    """Decide whether the problem has exactly one solution.

    It does iff L = 0 or R = 0 for the ball of order n + 1; the witness is
    the central function.
    """
    _require_potapov(seq)
    b = seq.ball
    nl, nr = spectral_norm(b.L), spectral_norm(b.R)
    limit = seq.tol.residual * seq.scale
    return UniquenessResult(nl <= limit or nr <= limit, central_function(seq), nl, nr)


def canonical_parameter(seq, S):
    """Representative LL⁺·S·R⁺R of the class of parameters giving f_S."""
    _require_potapov(seq)
    S = _param(seq, S)
    b = seq.ball
    left = b.sqrtL @ b.sqrtL_pinv
    right = b.sqrtR_pinv @ b.sqrtR
    out = left @ S.as_poly() @ right
    return SchurParam(out.coeff(0)) if S.kind == "constant" else SchurParam(out)


def parameter_equivalence(seq, S1, S2):
    """True iff √L·S1·√R and √L·S2·√R agree coefficientwise."""
    _require_potapov(seq)
    S1, S2 = _param(seq, S1), _param(seq, S2)
    b = seq.ball
    a = b.sqrtL @ S1.as_poly() @ b.sqrtR
    c = b.sqrtL @ S2.as_poly() @ b.sqrtR
    return a.allclose(c, seq.tol.residual * seq.scale)


def _safe_circle(f, samples, avoid=1e-6):
    pts = circle_points(samples)
    try:
        roots = f.singular_points()
    except ValueError:
        raise AllSamplesSingular("denominator determinant vanishes identically") from None
    if roots.size:
        pts = [z for z in pts if np.min(np.abs(roots - z)) > avoid]
    if not len(pts):
        raise AllSamplesSingular("every boundary sample hits a denominator zero")
    return pts


def j_unitary_boundary_test(f, J, samples=64, tol=DEFAULT_TOL):
    """Sample f on the unit circle and test J-unitarity of every value.

    Returns
    -------
    bool
        True ("inner-consistent") iff ‖f*Jf − J‖ ≤ residual·max(1, ‖f‖²) at
        every sample that keeps 1e-6 away from denominator zeros.
    """
    Jm = np.asarray(SignatureMatrix.coerce(J))
    for z in _safe_circle(f, samples):
        F = f(z)
        if spectral_norm(F.conj().T @ Jm @ F - Jm) > tol.residual * max(1.0, spectral_norm(F) ** 2):
            return False
    return True


def bp_product_check(pi, rho, J, samples=64, tol=DEFAULT_TOL):
    """Sampled test that B = πρ⁻¹ is a finite Blaschke-Potapov product.

    Checks that det(Q_J π + P_J ρ) has no zero in the open disk, located
    through the roots of that determinant polynomial, and that
    ρ*Jρ = π*Jπ at boundary samples. This is a numerical check, not a
    certificate.
    """
    J = SignatureMatrix.coerce(J)
    Jm = np.asarray(J)
    mix = J.Q @ pi + J.P @ rho
    c = mix.det_coeffs()
    scale = max(1.0, np.abs(c).max())
    c = np.where(np.abs(c) <= 1e-12 * scale, 0, c)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return False
    roots = np.roots(c[: nz[-1] + 1][::-1])
    if roots.size and np.min(np.abs(roots)) < 1 - 1e-9:
        return False
    for z in circle_points(samples):
        P, R = pi(z), rho(z)
        gap = R.conj().T @ Jm @ R - P.conj().T @ Jm @ P
        size = max(1.0, spectral_norm(R) ** 2, spectral_norm(P) ** 2)
        if spectral_norm(gap) > tol.residual * size:
            return False
    return True


def holomorphy_poles(seq, S=None):
    """Zeros in the open disk of det of the denominator of f_S.

    Uses the recursive polynomials, for which the zeros in the disk are
    exactly the poles of f_S.
    """
    f = lft_solution(seq, S, construction="recursive")
    roots = f.singular_points()
    return roots[np.abs(roots) < 1]
