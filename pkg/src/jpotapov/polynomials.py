"""Matrix polynomials and the polynomial objects of the interpolation problem.

The four polynomials π, ρ, σ, τ of an order-n sequence come in three
constructions: a pseudoinverse-based one valid for degenerate sequences, a
closed form for strict sequences, and a step-by-step recursion. The strict
case also yields the 2m×2m resolvent matrices and their degree-one factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeExceeded, DimensionMismatch, InvalidFactorData, NotPotapov, NotStrict
from .matkernel import DEFAULT_TOL, SignatureMatrix, as_cmatrix, min_eig, psd_factor
from .sequence import schur_parameter
from .serialize import matrix_from_json, matrix_to_json

__all__ = [
    "MatrixPoly",
    "RationalMatrixFn",
    "FourPolys",
    "ResolventPair",
    "ResolventFactors",
    "reciprocal",
    "evaluate",
    "four_polys_general",
    "four_polys_recursive",
    "four_polys_strict",
    "four_polys",
    "resolvents",
    "resolvent_factors",
    "u_mm",
    "blaschke",
    "bp_factor",
]


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


class MatrixPoly:
    """Matrix polynomial C_0 + C_1 w + ... + C_d w^d with p×q coefficients.

    Parameters
    ----------
    coeffs : sequence of array_like
        Coefficients in increasing powers of w.
    formal_degree : int, optional
        Degree used by `reciprocal` when none is given. Defaults to d.
    """

    __slots__ = ("_c", "_fd")
    # make ``ndarray @ MatrixPoly`` defer to __rmatmul__
    __array_ufunc__ = None

    def __init__(self, coeffs, formal_degree=None):
        cs = [as_cmatrix(c, "coefficient") for c in coeffs]
        if not cs:
            raise DimensionMismatch("a polynomial needs at least one coefficient")
        shape = cs[0].shape
        if any(c.shape != shape for c in cs):
            raise DimensionMismatch("coefficients must share one shape")
        self._c = tuple(_frozen(c) for c in cs)
        fd = len(cs) - 1 if formal_degree is None else int(formal_degree)
        if fd < len(cs) - 1:
            raise DegreeExceeded(f"formal degree {fd} below actual degree {len(cs) - 1}")
        self._fd = fd

    @classmethod
    def constant(cls, M):
        return cls([M])

    @classmethod
    def identity(cls, m):
        return cls([np.eye(m)])

    @classmethod
    def monomial(cls, M, k):
        """M w^k."""
        M = as_cmatrix(M)
        return cls([np.zeros_like(M)] * k + [M])

    @classmethod
    def block(cls, rows):
        """Assemble a block polynomial from a nested list of MatrixPoly."""
        d = max(b.degree for row in rows for b in row)
        return cls([np.block([[b.coeff(k) for b in row] for row in rows]) for k in range(d + 1)])

    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        return len(self._c) - 1

    @property
    def formal_degree(self):
        return self._fd

    @property
    def shape(self):
        return self._c[0].shape

    def coeff(self, k):
        """Coefficient of w^k (zero beyond the degree)."""
        if 0 <= k < len(self._c):
            return self._c[k]
        return np.zeros(self.shape, dtype=complex)

    def __call__(self, w):
        return evaluate(self, w)

    def __repr__(self):
        return f"MatrixPoly(shape={self.shape}, degree={self.degree})"

    def _binary(self, other, sign):
        if not isinstance(other, MatrixPoly):
            other = MatrixPoly([other])
        if other.shape != self.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")
        d = max(self.degree, other.degree)
        return MatrixPoly(
            [self.coeff(k) + sign * other.coeff(k) for k in range(d + 1)],
            max(self._fd, other._fd),
        )

    def __add__(self, other):
        return self._binary(other, 1)

    def __radd__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __neg__(self):
        return MatrixPoly([-c for c in self._c], self._fd)

    def __mul__(self, scalar):
        if isinstance(scalar, (MatrixPoly, np.ndarray)):
            return NotImplemented
        return MatrixPoly([scalar * c for c in self._c], self._fd)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, MatrixPoly):
            p, r = self.shape[0], other.shape[1]
            if self.shape[1] != other.shape[0]:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            out = [np.zeros((p, r), dtype=complex) for _ in range(self.degree + other.degree + 1)]
            for i, a in enumerate(self._c):
                for j, b in enumerate(other._c):
                    out[i + j] += a @ b
            return MatrixPoly(out)
        other = np.asarray(other, dtype=complex)
        return MatrixPoly([c @ other for c in self._c], self._fd)

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=complex)
        return MatrixPoly([other @ c for c in self._c], self._fd)

    def shift(self, k=1):
        """Multiply by w^k."""
        z = np.zeros(self.shape, dtype=complex)
        return MatrixPoly([z] * k + list(self._c), self._fd + k)

    def reciprocal(self, n=None):
        return reciprocal(self, self._fd if n is None else n)

    def with_formal_degree(self, n):
        return MatrixPoly(self._c, n)

    def trim(self, atol=0.0):
        """Drop trailing coefficients with all entries at most `atol`."""
        cs = list(self._c)
        while len(cs) > 1 and np.abs(cs[-1]).max() <= atol:
            cs.pop()
        return MatrixPoly(cs)

    def det_coeffs(self):
        """Coefficients of the scalar polynomial det C(w), lowest first.

        Obtained by evaluating the determinant at enough roots of unity and
        inverting the discrete Fourier transform.
        """
        p, q = self.shape
        if p != q:
            raise DimensionMismatch("determinant needs square coefficients")
        N = self.degree * p + 1
        nodes = np.exp(2j * np.pi * np.arange(N) / N)
        vals = np.array([np.linalg.det(self(x)) for x in nodes])
        return np.fft.fft(vals) / N

    def allclose(self, other, atol):
        d = max(self.degree, other.degree)
        return all(np.abs(self.coeff(k) - other.coeff(k)).max() <= atol for k in range(d + 1))

    def to_json(self):
        out = {"coeffs": [matrix_to_json(c) for c in self._c]}
        if self._fd != self.degree:
            out["formal_degree"] = self._fd
        return out

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or not isinstance(obj.get("coeffs"), list) or not obj["coeffs"]:
            raise ValueError("polynomial JSON needs a nonempty 'coeffs' list")
        return cls([matrix_from_json(c) for c in obj["coeffs"]], obj.get("formal_degree"))


def evaluate(p, w):
    """Horner evaluation of a MatrixPoly at a complex point."""
    w = complex(w)
    acc = np.array(p.coeffs[-1], dtype=complex)
    for c in reversed(p.coeffs[:-1]):
        acc = acc * w + c
    return acc


def reciprocal(b, n):
    """Reciprocal polynomial at formal degree n.

    Coefficient k of the result is the adjoint of coefficient n − k of `b`.

    Raises
    ------
    DegreeExceeded
        If the degree of `b` exceeds n.
    """
    if b.degree > n:
        raise DegreeExceeded(f"degree {b.degree} exceeds formal degree {n}")
    return MatrixPoly([b.coeff(n - k).conj().T for k in range(n + 1)], n)


class RationalMatrixFn:
    """Quotient of matrix polynomials.

    ``orientation="left"`` means f = num·den⁻¹ and ``"right"`` means
    f = den⁻¹·num.
    """

    __slots__ = ("num", "den", "orientation")

    def __init__(self, num, den, orientation="left"):
        if orientation not in ("left", "right"):
            raise ValueError("orientation must be 'left' or 'right'")
        if den.shape[0] != den.shape[1]:
            raise DimensionMismatch("denominator must be square")
        if orientation == "left" and num.shape[1] != den.shape[0]:
            raise DimensionMismatch("num·den⁻¹ shapes do not match")
        if orientation == "right" and num.shape[0] != den.shape[1]:
            raise DimensionMismatch("den⁻¹·num shapes do not match")
        self.num = num
        self.den = den
        self.orientation = orientation

    @property
    def shape(self):
        return self.num.shape

    def __repr__(self):
        return f"RationalMatrixFn({self.orientation}, deg num {self.num.degree}, deg den {self.den.degree})"

    def __call__(self, w):
        N, D = self.num(w), self.den(w)
        if self.orientation == "left":
            return np.linalg.solve(D.T, N.T).T
        return np.linalg.solve(D, N)

    def det_den_coeffs(self):
        return self.den.det_coeffs()

    def singular_points(self, atol=1e-12):
        """Zeros of det den (the possible poles), sorted by modulus."""
        c = self.den.det_coeffs()
        c = np.where(np.abs(c) <= atol * max(1.0, np.abs(c).max()), 0, c)
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            raise ValueError("denominator determinant vanishes identically")
        roots = np.roots(c[: nz[-1] + 1][::-1])
        return roots[np.argsort(np.abs(roots))]

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json(), "orientation": self.orientation}

    @classmethod
    def from_json(cls, obj):
        return cls(MatrixPoly.from_json(obj["num"]), MatrixPoly.from_json(obj["den"]),
                   obj.get("orientation", "left"))


@dataclass(frozen=True)
class FourPolys:
    """The polynomials π, ρ, σ, τ of an order-n sequence.

    Central functions are πρ⁻¹ and τ⁻¹σ. Reciprocals are always taken at
    formal degree n.
    """

    pi: MatrixPoly
    rho: MatrixPoly
    sigma: MatrixPoly
    tau: MatrixPoly
    construction: str
    n: int

    def tilde(self, name):
        return reciprocal(getattr(self, name), self.n)

    def at(self, w):
        """Values (π, ρ, σ, τ) at w."""
        return tuple(getattr(self, k)(w) for k in ("pi", "rho", "sigma", "tau"))

    def tilde_at(self, w):
        """Values of the reciprocals (π̃, ρ̃, σ̃, τ̃) at w."""
        return tuple(self.tilde(k)(w) for k in ("pi", "rho", "sigma", "tau"))


def _require_potapov(seq):
    if not seq.is_potapov:
        raise NotPotapov("the sequence is not J-Potapov")


def _base(seq, construction):
    A0, I = seq[0], np.eye(seq.m)
    return FourPolys(MatrixPoly([A0]), MatrixPoly([I]), MatrixPoly([A0]), MatrixPoly([I]), construction, 0)


def _assemble(seq, X, V, Z, W, construction):
    # X, V are nm×m columns read in increasing powers; Z, W are m×nm rows
    # whose first block multiplies the highest power.
    m, n = seq.m, seq.n
    col = lambda Y: [Y[j * m:(j + 1) * m] for j in range(n)]
    row = lambda Y: [Y[:, j * m:(j + 1) * m] for j in range(n)][::-1]
    A0, I = seq[0], np.eye(m)
    return FourPolys(
        MatrixPoly([A0] + col(X), n),
        MatrixPoly([I] + col(V), n),
        MatrixPoly([A0] + row(Z), n),
        MatrixPoly([I] + row(W), n),
        construction,
        n,
    )


def four_polys_general(seq):
    """Pseudoinverse-based π, ρ, σ, τ, valid for degenerate sequences too."""
    from .matkernel import pinv

    _require_potapov(seq)
    if seq.n == 0:
        return _base(seq, "general")
    pre = seq.prefix(seq.n - 1)
    S, Jk = pre.S, pre.J.block(pre.n)
    Pp = pinv(pre.P, seq.tol, scale=seq.scale)
    Qp = pinv(pre.Q, seq.tol, scale=seq.scale)
    y, z = seq.y, seq.z
    I = np.eye(S.shape[0])
    Sh = S.conj().T
    V = Qp @ Sh @ Jk @ y
    W = z @ Jk @ Sh @ Pp
    X = y + S @ V
    Z = W @ S + z
    return _assemble(seq, X, V, Z, W, "general")


def four_polys_strict(seq):
    """Closed-form π, ρ, σ, τ using true inverses of the defect matrices.

    Raises
    ------
    NotStrict
    """
    if not seq.is_strict:
        raise NotStrict("closed-form polynomials need a strict sequence")
    if seq.n == 0:
        return _base(seq, "strict")
    pre = seq.prefix(seq.n - 1)
    S, Jk = pre.S, pre.J.block(pre.n)
    y, z = seq.y, seq.z
    Piy = np.linalg.solve(pre.P, y)
    zQi = np.linalg.solve(pre.Q.conj().T, z.conj().T).conj().T
    X = Jk @ Piy
    V = Jk @ S.conj().T @ Piy
    Z = zQi @ Jk
    W = zQi @ S.conj().T @ Jk
    return _assemble(seq, X, V, Z, W, "strict")


def four_polys_recursive(seq):
    """π, ρ, σ, τ built step by step from (A_0, I, A_0, I).

    Step k → k+1 adds wJτ̃_k t, wJσ̃_k t, u wρ̃_k J and u wπ̃_k J, where
    t = L⁺(A_{k+1} − M_{k+1}), u = (A_{k+1} − M_{k+1})R⁺ and tildes are
    reciprocals at formal degree k. The sequence runs this recursion when
    it is built, so this only wraps the stored coefficients.
    """
    _require_potapov(seq)
    pi, rho, sigma, tau = (MatrixPoly(c, seq.n) for c in seq.recursive_coeffs)
    return FourPolys(pi, rho, sigma, tau, "recursive", seq.n)


def four_polys(seq, construction="general"):
    """Dispatch on the construction name."""
    try:
        builder = {"general": four_polys_general, "strict": four_polys_strict,
                   "recursive": four_polys_recursive}[construction]
    except KeyError:
        raise ValueError(f"unknown construction {construction!r}") from None
    return builder(seq)


def u_mm(m):
    """The 2m×2m matrix [[0, I], [−I, 0]]."""
    I, Z = np.eye(m), np.zeros((m, m))
    return np.block([[Z, I], [-I, Z]]).astype(complex)


@dataclass(frozen=True)
class ResolventPair:
    """Resolvent matrices C and D of a strict sequence of order n.

    The left LFT of C and the right LFT of D both map the Schur class onto
    the solution set.
    """

    C: MatrixPoly
    D: MatrixPoly
    n: int
    m: int


def resolvents(seq):
    """Assemble the resolvent pair from the strict polynomials.

    C = [[wJτ̃, π], [wJσ̃, ρ]]·diag(√L⁻¹, √R⁻¹) and
    D = diag(√R⁻¹, √L⁻¹)·[[wρ̃J, wπ̃J], [σ, τ]].
    """
    f = four_polys_strict(seq)
    J = np.asarray(seq.J)
    b = seq.ball
    pit, rhot, sigt, taut = (f.tilde(k) for k in ("pi", "rho", "sigma", "tau"))
    C = MatrixPoly.block([
        [(J @ taut).shift() @ b.sqrtL_pinv, f.pi @ b.sqrtR_pinv],
        [(J @ sigt).shift() @ b.sqrtL_pinv, f.rho @ b.sqrtR_pinv],
    ])
    D = MatrixPoly.block([
        [b.sqrtR_pinv @ (rhot @ J).shift(), b.sqrtR_pinv @ (pit @ J).shift()],
        [b.sqrtL_pinv @ f.sigma, b.sqrtL_pinv @ f.tau],
    ])
    return ResolventPair(C, D, seq.n, seq.m)


@dataclass(frozen=True)
class ResolventFactors:
    """C = C0·G_1···G_n and D = H_n···H_1·D0 with degree-one factors."""

    C0: MatrixPoly
    D0: MatrixPoly
    G: tuple
    H: tuple
    K: tuple

    def C(self):
        out = self.C0
        for g in self.G:
            out = out @ g
        return out

    def D(self):
        out = self.D0
        for h in self.H:
            out = h @ out
        return out


def resolvent_factors(seq):
    """Elementary factorization of the resolvents of a strict sequence.

    G_k = [[I, K_k], [K_k*, I]]·diag(w√L_k√L_{k+1}⁻¹, √R_k√R_{k+1}⁻¹) and
    H_k = diag(w√R_{k+1}⁻¹√R_k, √L_{k+1}⁻¹√L_k)·[[I, K_k*], [K_k, I]],
    where K_k is the Schur parameter of step k.
    """
    if not seq.is_strict:
        raise NotStrict("resolvent factors need a strict sequence")
    m = seq.m
    J = np.asarray(seq.J)
    I, Z = np.eye(m), np.zeros((m, m))
    balls = [seq.prefix_ball(k) for k in range(seq.n + 1)]  # balls[k] holds L_{k+1}
    A0 = seq[0]
    b1 = balls[0]
    C0 = MatrixPoly([np.block([[Z, A0 @ b1.sqrtR_pinv], [Z, b1.sqrtR_pinv]]),
                     np.block([[J @ b1.sqrtL_pinv, Z], [J @ A0.conj().T @ b1.sqrtL_pinv, Z]])])
    D0 = MatrixPoly([np.block([[Z, Z], [b1.sqrtL_pinv @ A0, b1.sqrtL_pinv]]),
                     np.block([[b1.sqrtR_pinv @ J, b1.sqrtR_pinv @ A0.conj().T @ J], [Z, Z]])])
    G, H, Ks = [], [], []
    for k in range(1, seq.n + 1):
        K = schur_parameter(seq, k)
        lo, hi = balls[k - 1], balls[k]
        mix = np.block([[I, K], [K.conj().T, I]])
        G.append(MatrixPoly([mix @ np.block([[Z, Z], [Z, lo.sqrtR @ hi.sqrtR_pinv]]),
                             mix @ np.block([[lo.sqrtL @ hi.sqrtL_pinv, Z], [Z, Z]])]))
        mixh = np.block([[I, K.conj().T], [K, I]])
        H.append(MatrixPoly([np.block([[Z, Z], [Z, hi.sqrtL_pinv @ lo.sqrtL]]) @ mixh,
                             np.block([[hi.sqrtR_pinv @ lo.sqrtR, Z], [Z, Z]]) @ mixh]))
        Ks.append(K)
    return ResolventFactors(C0, D0, tuple(G), tuple(H), tuple(Ks))


def blaschke(alpha, w):
    """Scalar Blaschke factor b_α(w); b_0(w) = w."""
    alpha, w = complex(alpha), complex(w)
    if alpha == 0:
        return w
    return abs(alpha) / alpha * (alpha - w) / (1 - alpha.conjugate() * w)


def _check_psd_hermitian(H, tol, what):
    if np.abs(H - H.conj().T).max() > tol.residual or min_eig(H) < -tol.psd_eig:
        raise InvalidFactorData(f"{what} must be Hermitian positive semidefinite")


def bp_factor(kind, point, proj, J, tol=DEFAULT_TOL):
    """Blaschke-Potapov J-elementary factor as a rational function.

    Parameters
    ----------
    kind : {"first", "second", "third"}
        First kind: I + (b_α − 1)P with P² = P, JP ⪰ 0.
        Second kind: I + (1/b_α − 1)Q with Q² = Q, −JQ ⪰ 0.
        Third kind: I − (u + w)/(u − w)·R with R² = 0, JR ⪰ 0, |u| = 1.
    point : complex
        α in the open disk (first and second kind) or u on the circle.
    proj : array_like
        The matrix P, Q or R. Must be nonzero.
    J : SignatureMatrix or array_like

    Raises
    ------
    InvalidFactorData
    """
    J = SignatureMatrix.coerce(J)
    Jm = np.asarray(J)
    X = as_cmatrix(proj, "factor matrix")
    if X.shape != Jm.shape:
        raise InvalidFactorData("factor matrix and J differ in size")
    if np.abs(X).max() <= tol.residual:
        raise InvalidFactorData("factor matrix must be nonzero")
    I = np.eye(J.m)
    a = complex(point)
    if kind in ("first", "second"):
        if abs(a) >= 1:
            raise InvalidFactorData("α must lie in the open unit disk")
        if np.abs(X @ X - X).max() > tol.residual:
            raise InvalidFactorData("factor matrix must be idempotent")
        sign = 1 if kind == "first" else -1
        _check_psd_hermitian(sign * Jm @ X, tol, "JP" if kind == "first" else "−JQ")
        c = abs(a) / a if a != 0 else 1.0
        # b_α = top/bottom with top, bottom of degree ≤ 1
        top = MatrixPoly([c * a * I, -c * I]) if a != 0 else MatrixPoly([0 * I, I])
        bottom = MatrixPoly([I, -a.conjugate() * I]) if a != 0 else MatrixPoly([I])
        if kind == "first":
            num = bottom @ (I - X) + top @ X
            den = bottom @ I
        else:
            # I + (1/b − 1)Q = bottom·[bottom(I − Q) + top·Q]⁻¹; keeping the
            # zero of b out of the numerator leaves den invertible where the
            # factor is holomorphic
            num = bottom @ I
            den = bottom @ (I - X) + top @ X
        return RationalMatrixFn(num, den, "left")
    if kind == "third":
        if abs(abs(a) - 1) > tol.residual:
            raise InvalidFactorData("u must lie on the unit circle")
        if np.abs(X @ X).max() > tol.residual:
            raise InvalidFactorData("factor matrix must be nilpotent of order two")
        _check_psd_hermitian(Jm @ X, tol, "JR")
        num = MatrixPoly([a * (I - X), -(I + X)])
        den = MatrixPoly([a * I, -I])
        return RationalMatrixFn(num, den, "left")
    raise ValueError(f"unknown factor kind {kind!r}")
