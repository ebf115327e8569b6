"""Finite J-Potapov sequences.

A sequence (A_0, ..., A_n) of m×m matrices is J-Potapov when its lower block
Toeplitz matrix S_n is J_[n]-contractive, J_[n] = diag(J, ..., J). The next
admissible coefficient ranges over the matrix ball M + √L K √R, ‖K‖ ≤ 1,
whose parameters are computed here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotContractive, NotPotapov, SingularPG
from .matkernel import (
    DEFAULT_TOL,
    SignatureMatrix,
    Tolerances,
    as_cmatrix,
    hermitian_part,
    min_eig,
    pinv,
    psd_factor,
    spectral_norm,
)
from .serialize import matrix_from_json, matrix_to_json, signature_from_json, signature_to_json

__all__ = [
    "Classification",
    "BallParams",
    "PotapovSeq",
    "toeplitz_from_blocks",
    "block_toeplitz",
    "defect_matrices",
    "ball_parameters",
    "ball_parameters_block",
    "classify",
    "classify_block",
    "extend_central",
    "extend_with_parameter",
    "pg_transform_seq",
    "pg_matrix",
    "schur_parameter",
    "step_factors",
    "random_strict_seq",
    "random_degenerate_seq",
    "random_contraction",
]


class Classification(str, enum.Enum):
    STRICT = "strict"
    DEGENERATE = "degenerate"
    INVALID = "invalid"


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def toeplitz_from_blocks(blocks):
    """Lower triangular block Toeplitz matrix with block (i, j) = blocks[i-j]."""
    k = len(blocks)
    p, q = blocks[0].shape
    T = np.zeros((k * p, k * q), dtype=complex)
    for i in range(k):
        for j in range(i + 1):
            T[i * p:(i + 1) * p, j * q:(j + 1) * q] = blocks[i - j]
    return T


@dataclass(frozen=True)
class BallParams:
    """Center M and semi-radii L, R of the ball of admissible next coefficients.

    The square roots and pseudoinverses come from a single eigendecomposition
    per matrix, so they share one rank decision.
    """

    M: np.ndarray
    L: np.ndarray
    R: np.ndarray
    sqrtL: np.ndarray
    sqrtR: np.ndarray
    sqrtL_pinv: np.ndarray
    sqrtR_pinv: np.ndarray
    L_pinv: np.ndarray
    R_pinv: np.ndarray
    rankL: int
    rankR: int

    def point(self, K):
        """Ball point M + √L K √R."""
        return self.M + self.sqrtL @ K @ self.sqrtR


@dataclass(frozen=True)
class _State:
    # Everything the Schur-type recursion knows after reading A_0..A_k.
    cls: Classification
    balls: tuple  # balls[j] holds the ball of order j + 1
    polys: tuple  # coefficient lists of π, ρ, σ, τ at order k
    K: tuple  # Schur parameters K_1..K_k
    scale0: float  # max(1, ‖A_0‖)², reference for eigenvalue cutoffs


def _make_ball(M, L, R, cutoff, tol):
    L, R = hermitian_part(L), hermitian_part(R)
    fL = psd_factor(L, tol, cutoff=cutoff)
    fR = psd_factor(R, tol, cutoff=cutoff)
    return BallParams(
        M=_frozen(M), L=_frozen(L), R=_frozen(R),
        sqrtL=_frozen(fL.sqrt), sqrtR=_frozen(fR.sqrt),
        sqrtL_pinv=_frozen(fL.sqrt_pinv), sqrtR_pinv=_frozen(fR.sqrt_pinv),
        L_pinv=_frozen(fL.pinv), R_pinv=_frozen(fR.pinv),
        rankL=fL.rank, rankR=fR.rank,
    )


def _initial_state(J, A0, tol):
    Jm = np.asarray(J)
    m = J.m
    scale0 = max(1.0, spectral_norm(A0)) ** 2
    cutoff = tol.psd_eig * scale0
    L = hermitian_part(Jm - A0 @ Jm @ A0.conj().T)
    R = hermitian_part(Jm - A0.conj().T @ Jm @ A0)
    lam = min(min_eig(L), min_eig(R))
    I = np.eye(m, dtype=complex)
    polys = ((A0,), (I,), (A0,), (I,))
    if lam < -cutoff:
        return _State(Classification.INVALID, (), polys, (), scale0)
    cls = Classification.STRICT if lam > cutoff else Classification.DEGENERATE
    ball = _make_ball(np.zeros((m, m), complex), L, R, cutoff, tol)
    return _State(cls, (ball,), polys, (), scale0)


def _rec(c, k):
    # reciprocal at formal degree k of a coefficient list of length k + 1
    return [c[k - j].conj().T for j in range(k + 1)]


def _next_center(pi, rho):
    # Taylor coefficient k + 1 of π ρ⁻¹, where π, ρ have degree k and ρ_0 = I
    k = len(pi) - 1
    E = [np.eye(rho[0].shape[0], dtype=complex)]
    for j in range(1, k + 2):
        acc = sum((rho[i] @ E[j - i] for i in range(1, min(j, k) + 1)), np.zeros_like(E[0]))
        E.append(-acc)
    return sum((pi[i] @ E[k + 1 - i] for i in range(k + 1)), np.zeros_like(E[0]))


def _advance(state, J, A, tol):
    if state.cls is Classification.INVALID:
        return state
    Jm = np.asarray(J)
    ball = state.balls[-1]
    k = len(state.balls) - 1  # current order before appending A
    d = A - ball.M
    K = ball.sqrtL_pinv @ d @ ball.sqrtR_pinv
    # A must lie in the ball: d = √L K √R with ‖K‖ ≤ 1
    ref = max(1.0, spectral_norm(d), spectral_norm(ball.M))
    if spectral_norm(d - ball.sqrtL @ K @ ball.sqrtR) > tol.residual * ref \
            or spectral_norm(K) > 1 + tol.residual:
        return _State(Classification.INVALID, state.balls, state.polys, state.K + (_frozen(K),), state.scale0)
    U, s, Vh = np.linalg.svd(K)
    Kc = (U * np.minimum(s, 1.0)) @ Vh
    I = np.eye(J.m)
    L = ball.sqrtL @ (I - Kc @ Kc.conj().T) @ ball.sqrtL
    R = ball.sqrtR @ (I - Kc.conj().T @ Kc) @ ball.sqrtR
    t = ball.L_pinv @ d
    u = d @ ball.R_pinv
    pi, rho, sig, tau = (list(c) + [np.zeros_like(c[0])] for c in state.polys)
    pit, rhot, sigt, taut = (_rec(c, k) for c in state.polys)
    for j in range(k + 1):
        pi[j + 1] = pi[j + 1] + Jm @ taut[j] @ t
        rho[j + 1] = rho[j + 1] + Jm @ sigt[j] @ t
        sig[j + 1] = sig[j + 1] + u @ rhot[j] @ Jm
        tau[j + 1] = tau[j + 1] + u @ pit[j] @ Jm
    cutoff = tol.psd_eig * state.scale0
    new_ball = _make_ball(_next_center(pi, rho), L, R, cutoff, tol)
    strict = (state.cls is Classification.STRICT
              and min(min_eig(new_ball.L), min_eig(new_ball.R)) > cutoff)
    cls = Classification.STRICT if strict else Classification.DEGENERATE
    polys = tuple(tuple(_frozen(c) for c in p) for p in (pi, rho, sig, tau))
    return _State(cls, state.balls + (new_ball,), polys, state.K + (_frozen(K),), state.scale0)


class PotapovSeq:
    """Immutable J plus coefficients A_0..A_n.

    Construction runs an m×m Schur-type recursion over the coefficients. Each
    step checks that A_k lies in the ball of admissible values, records its
    contraction K_k, and updates the ball and the recursive polynomials.
    `append` continues from the stored state, so growing a sequence one
    coefficient at a time costs one step per coefficient. The block Toeplitz
    matrix and the defect matrices are computed on first access.

    Parameters
    ----------
    J : SignatureMatrix or array_like
    coeffs : sequence of (m, m) array_like
    tol : Tolerances, optional
    """

    def __init__(self, J, coeffs, tol=DEFAULT_TOL, _state=None):
        J = SignatureMatrix.coerce(J)
        coeffs = [as_cmatrix(A, "coefficient") for A in coeffs]
        if not coeffs:
            raise DimensionMismatch("a sequence needs at least A_0")
        for A in coeffs:
            if A.shape != (J.m, J.m):
                raise DimensionMismatch(f"coefficient shape {A.shape} does not match m = {J.m}")
        self._J = J
        self._A = tuple(_frozen(A) for A in coeffs)
        self._tol = tol
        if _state is None:
            _state = _initial_state(J, self._A[0], tol)
            for A in self._A[1:]:
                _state = _advance(_state, J, A, tol)
        self._state = _state
        self._cache = {}

    # basic accessors
    @property
    def J(self):
        return self._J

    @property
    def m(self):
        return self._J.m

    @property
    def n(self):
        """Order of the sequence (number of coefficients minus one)."""
        return len(self._A) - 1

    @property
    def coeffs(self):
        return self._A

    @property
    def tol(self):
        return self._tol

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def S(self):
        return self._cached("S", lambda: _frozen(toeplitz_from_blocks(self._A)))

    @property
    def scale(self):
        """Reference magnitude max(1, ‖S_n‖)² for block-matrix decisions."""
        return self._cached("scale", lambda: max(1.0, spectral_norm(self.S)) ** 2)

    @property
    def P(self):
        def build():
            Jn = self._J.block(self.n)
            return _frozen(hermitian_part(Jn - self.S @ Jn @ self.S.conj().T))
        return self._cached("P", build)

    @property
    def Q(self):
        def build():
            Jn = self._J.block(self.n)
            return _frozen(hermitian_part(Jn - self.S.conj().T @ Jn @ self.S))
        return self._cached("Q", build)

    @property
    def classification(self):
        return self._state.cls

    @property
    def is_strict(self):
        return self._state.cls is Classification.STRICT

    @property
    def is_potapov(self):
        return self._state.cls is not Classification.INVALID

    @property
    def y(self):
        """Column (A_1; ...; A_n)."""
        return np.vstack(self._A[1:]) if self.n else np.zeros((0, self.m), complex)

    @property
    def z(self):
        """Row (A_n, ..., A_1)."""
        return np.hstack(self._A[:0:-1]) if self.n else np.zeros((self.m, 0), complex)

    @property
    def ball(self):
        """Ball parameters of order n + 1."""
        if not self.is_potapov:
            raise NotPotapov("ball parameters are undefined for an invalid sequence")
        return self._state.balls[-1]

    def prefix_ball(self, k):
        """Ball parameters of order k + 1, those of the prefix (A_0, ..., A_k)."""
        if not self.is_potapov:
            raise NotPotapov("ball parameters are undefined for an invalid sequence")
        return self._state.balls[k]

    @property
    def computed_balls(self):
        """Ball parameters of every order reached before classification stopped.

        For a J-Potapov sequence this is all n + 1 balls; for an invalid one it
        is the balls of its longest J-Potapov prefix (possibly none).
        """
        return tuple(self._state.balls)

    @property
    def recursive_coeffs(self):
        """Coefficient tuples of the recursive π, ρ, σ, τ."""
        if not self.is_potapov:
            raise NotPotapov("the sequence is not J-Potapov")
        return self._state.polys

    @property
    def schur_parameters(self):
        """Contractions K_1..K_n with A_k = M_k + √L_k K_k √R_k."""
        return self._state.K

    def __len__(self):
        return len(self._A)

    def __getitem__(self, k):
        return self._A[k]

    def __repr__(self):
        return f"PotapovSeq(m={self.m}, n={self.n}, J={self._J!r}, {self.classification.value})"

    def prefix(self, k):
        """The sequence (A_0, ..., A_k)."""
        if not 0 <= k <= self.n:
            raise IndexError(f"prefix order {k} outside 0..{self.n}")
        if k == self.n:
            return self
        # recursive polynomials change in every degree at each step, so the
        # state cannot be sliced; rerun the recursion
        return PotapovSeq(self._J, self._A[:k + 1], self._tol)

    def append(self, A):
        """New sequence with A appended. Any matrix is accepted; the result may be invalid."""
        A = as_cmatrix(A)
        if A.shape != (self.m, self.m):
            raise DimensionMismatch(f"coefficient shape {A.shape} does not match m = {self.m}")
        state = _advance(self._state, self._J, _frozen(A), self._tol)
        return PotapovSeq(self._J, list(self._A) + [A], self._tol, _state=state)

    def with_tol(self, tol):
        return PotapovSeq(self._J, self._A, tol)

    def allclose(self, other, atol):
        return (
            self.n == other.n
            and self._J == other._J
            and all(np.abs(a - b).max() <= atol for a, b in zip(self._A, other._A))
        )

    # serialization
    def to_json(self):
        return {
            "m": self.m,
            "J": signature_to_json(self._J),
            "A": [matrix_to_json(A) for A in self._A],
        }

    @classmethod
    def from_json(cls, obj, tol=DEFAULT_TOL):
        if not isinstance(obj, dict) or "J" not in obj or "A" not in obj:
            raise ValueError("sequence JSON needs keys 'J' and 'A'")
        J = signature_from_json(obj["J"])
        if "m" in obj and obj["m"] != J.m:
            raise ValueError(f"m = {obj['m']} disagrees with J of size {J.m}")
        if not isinstance(obj["A"], list) or not obj["A"]:
            raise ValueError("A must be a nonempty list of matrices")
        return cls(J, [matrix_from_json(a) for a in obj["A"]], tol)


def block_toeplitz(seq):
    """Lower triangular block Toeplitz matrix S_n of the sequence."""
    return np.array(seq.S)


def defect_matrices(seq):
    """Return (P, Q) = (J_[n] − S J_[n] S*, J_[n] − S* J_[n] S)."""
    return np.array(seq.P), np.array(seq.Q)


def ball_parameters(seq):
    """Ball parameters (M, L, R) of order n + 1.

    Raises
    ------
    NotPotapov
        If the sequence is invalid.
    """
    return seq.ball


def ball_parameters_block(seq):
    """Ball parameters from the block Toeplitz formulas.

    M = −z J_[n−1] S* P⁺ y, L = J − A_0JA_0* − z Q⁺ z*,
    R = J − A_0*JA_0 − y* P⁺ y, with S, P, Q of the prefix of order n − 1.
    This is an independent route to the same numbers as `ball_parameters`;
    it loses accuracy once ‖S‖ is large.
    """
    if not seq.is_potapov:
        raise NotPotapov("ball parameters are undefined for an invalid sequence")
    J = np.asarray(seq.J)
    A0 = seq[0]
    L = J - A0 @ J @ A0.conj().T
    R = J - A0.conj().T @ J @ A0
    M = np.zeros_like(A0)
    if seq.n:
        pre = seq.prefix(seq.n - 1)
        Pp = pinv(pre.P, seq.tol, scale=seq.scale)
        Qp = pinv(pre.Q, seq.tol, scale=seq.scale)
        y, z = seq.y, seq.z
        M = -z @ pre.J.block(pre.n) @ pre.S.conj().T @ Pp @ y
        L = L - z @ Qp @ z.conj().T
        R = R - y.conj().T @ Pp @ y
    return _make_ball(M, L, R, seq.tol.psd_eig * seq.scale, seq.tol)


def classify(seq, tol=None):
    """Classify as strict, degenerate or invalid."""
    if tol is not None and tol != seq.tol:
        seq = seq.with_tol(tol)
    return seq.classification


def classify_block(seq, tol=None):
    """Classify by the smallest eigenvalue of the block defect matrices.

    Decides J_[n]-contractivity of S_n directly, with the eigenvalue slack
    scaled by max(1, ‖S_n‖)². Agrees with `classify` while ‖S_n‖ is moderate.
    """
    tol = tol or seq.tol
    lam = min(min_eig(seq.P), min_eig(seq.Q))
    slack = tol.psd_eig * seq.scale
    if lam > slack:
        return Classification.STRICT
    if lam < -slack:
        return Classification.INVALID
    return Classification.DEGENERATE


def _require_potapov(seq):
    if not seq.is_potapov:
        raise NotPotapov("the sequence is not J-Potapov")


def extend_central(seq, k):
    """Append k coefficients, each the current ball center."""
    _require_potapov(seq)
    for _ in range(k):
        seq = seq.append(seq.ball.M)
    return seq


def extend_with_parameter(seq, K):
    """Append M + √L K √R.

    Raises
    ------
    NotContractive
        If ‖K‖ > 1 + residual.
    """
    _require_potapov(seq)
    K = as_cmatrix(K, "K")
    if K.shape != (seq.m, seq.m):
        raise DimensionMismatch(f"K must be {seq.m}×{seq.m}")
    if spectral_norm(K) > 1 + seq.tol.residual:
        raise NotContractive(f"‖K‖ = {spectral_norm(K):.6g} exceeds 1")
    return seq.append(seq.ball.point(K))


def pg_matrix(A, J):
    """Potapov-Ginzburg transform (P A + Q)(Q A + P)⁻¹ of a single matrix."""
    J = SignatureMatrix.coerce(J)
    P, Q = J.P, J.Q
    D = Q @ A + P
    if np.linalg.cond(D) > 1e14:
        raise SingularPG("Q_J A + P_J is singular")
    return (P @ A + Q) @ np.linalg.inv(D)


def pg_transform_seq(seq, J=None):
    """Potapov-Ginzburg transform of a sequence.

    Solves B·(Q S_A + P) = P S_A + Q block by block, where P, Q are the
    projections (I ± J)/2 repeated along the diagonal.

    Parameters
    ----------
    seq : PotapovSeq
    J : SignatureMatrix, optional
        Signature of the transform. By default the sequence's own J is used
        and the result is a Schur sequence (signature I_m). When given, `seq`
        is read as a Schur sequence and the result carries J; this is the
        inverse direction, and since the map is an involution
        ``pg_transform_seq(pg_transform_seq(s), s.J)`` recovers ``s``.
    """
    if J is None:
        J, J_out = seq.J, SignatureMatrix.identity(seq.m)
    else:
        J = J_out = SignatureMatrix.coerce(J)
    P, Q = J.P, J.Q
    X = [Q @ seq[0] + P] + [Q @ A for A in seq.coeffs[1:]]
    Y = [P @ seq[0] + Q] + [P @ A for A in seq.coeffs[1:]]
    if np.linalg.cond(X[0]) > 1e14:
        raise SingularPG("Q_J A_0 + P_J is singular")
    X0inv = np.linalg.inv(X[0])
    B = []
    for j in range(len(X)):
        acc = Y[j] - sum((B[i] @ X[j - i] for i in range(j)), np.zeros_like(Y[j]))
        B.append(acc @ X0inv)
    return PotapovSeq(J_out, B, seq.tol)


def step_factors(seq, k):
    """Return (A_k − M_k, ball of order k) for 1 ≤ k ≤ n."""
    if not 1 <= k <= seq.n:
        raise IndexError(f"step index {k} outside 1..{seq.n}")
    ball = seq.prefix_ball(k - 1)
    return seq[k] - ball.M, ball


def schur_parameter(seq, k):
    """Contraction K_k = √L_k⁻¹ (A_k − M_k) √R_k⁻¹ that generated A_k."""
    d, ball = step_factors(seq, k)
    return ball.sqrtL_pinv @ d @ ball.sqrtR_pinv


def random_contraction(rng, m, norm):
    """Random complex m×m matrix with spectral norm `norm`."""
    G = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    s = np.linalg.norm(G, 2)
    return G * (norm / s) if s > 0 else G


def _random_A0(rng, J, radius_range=(0.1, 0.6), boundary=False):
    # Draw a strict Schur matrix and carry it over with the PG transform,
    # which maps strict contractions onto strictly J-contractive matrices.
    while True:
        if boundary:
            G = rng.standard_normal((J.m, J.m)) + 1j * rng.standard_normal((J.m, J.m))
            U, s, Vh = np.linalg.svd(G)
            s = rng.uniform(*radius_range, size=J.m)
            s[0] = 1.0
            B0 = (U * s) @ Vh
        else:
            B0 = random_contraction(rng, J.m, rng.uniform(*radius_range))
        D = J.Q @ B0 + J.P
        if np.linalg.cond(D) < 4:
            return pg_matrix(B0, J)


_MAX_SCALE = 400.0


def random_strict_seq(m, J, n, seed, margin=0.5, tol=DEFAULT_TOL):
    """Seeded random strict sequence of order n.

    A_0 is the PG image of a random strict contraction; each later
    coefficient is M + √L K √R with ‖K‖ uniform in [0, margin).
    """
    if not 0 <= margin < 1:
        raise ValueError("margin must lie in [0, 1)")
    J = SignatureMatrix.coerce(J if J is not None else np.eye(m))
    if J.m != m:
        raise DimensionMismatch("J does not match m")
    rng = np.random.default_rng(seed)
    # reject draws whose block Toeplitz norm explodes, which happens for
    # J ≠ I when A_0 sits close to the J-unitary boundary
    for _ in range(100):
        seq = PotapovSeq(J, [_random_A0(rng, J)], tol)
        for _ in range(n):
            K = random_contraction(rng, m, margin * rng.uniform())
            seq = seq.append(seq.ball.point(K))
        if seq.scale <= _MAX_SCALE:
            break
    return seq


def random_degenerate_seq(m, J, n, seed, kind="boundary", tol=DEFAULT_TOL):
    """Seeded random degenerate sequence of order n.

    Parameters
    ----------
    kind : {"boundary", "defect"}
        "boundary" uses a strict start and one extension by a K with a unit
        singular value; "defect" starts from an A_0 whose defect J − A_0*JA_0
        is rank deficient.
    """
    J = SignatureMatrix.coerce(J if J is not None else np.eye(m))
    if kind not in ("boundary", "defect"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        seq = _draw_degenerate(rng, J, n, kind, tol)
        if seq.scale <= _MAX_SCALE:
            break
    return seq


def _draw_degenerate(rng, J, n, kind, tol):
    m = J.m
    if kind == "defect" or n == 0:
        seq = PotapovSeq(J, [_random_A0(rng, J, boundary=True)], tol)
        jump = -1
    else:
        seq = PotapovSeq(J, [_random_A0(rng, J)], tol)
        jump = int(rng.integers(0, n))
    for k in range(n):
        if k == jump:
            G = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            U, s, Vh = np.linalg.svd(G)
            s = rng.uniform(0.0, 0.8, size=m)
            s[0] = 1.0
            K = (U * s) @ Vh
        else:
            K = random_contraction(rng, m, 0.7 * rng.uniform())
        seq = seq.append(seq.ball.point(K))
    return seq
