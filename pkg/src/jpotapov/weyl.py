"""Weyl matrix balls of strict sequences.

For a strict sequence of order n and a point w of the common holomorphy set,
the values f(w) of all solutions fill the matrix ball
M(w) + |w|^{n+1} √L(w) K √R(w), ‖K‖ ≤ 1. The semi-radii shrink as the order
grows; their limits describe how much of the solution set survives.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import NotStrict, OutsideCommonDomain, SingularDenominator, SingularRadius, SingularTransfer
from .matkernel import DEFAULT_TOL, SignatureMatrix, hermitian_part, psd_sqrt, spectral_norm
from .polynomials import four_polys_recursive, resolvents
from .sequence import extend_central, pg_matrix, pg_transform_seq
from .serialize import complex_to_json, matrix_to_json
from .solve import SchurParam, lft_solution

__all__ = [
    "WeylBall",
    "LimitRow",
    "LimitTable",
    "chi",
    "chi_alt",
    "in_common_holomorphy",
    "r0",
    "r0_alt",
    "weyl_ball",
    "ball_membership",
    "pg_ball_transfer",
    "pg_unitaries",
    "pg_resolvent_residuals",
    "extremal_function",
    "extremal_tower",
    "limit_study",
]


def _require_strict(seq):
    if not seq.is_strict:
        raise NotStrict("Weyl balls are defined for strict sequences only")


def _inv_sqrt(H):
    lam, V = np.linalg.eigh(hermitian_part(H))
    return (V / np.sqrt(lam)) @ V.conj().T


def _parts(seq, w, polys=None):
    # the recursive polynomials involve only m×m arithmetic and stay accurate
    # for long sequences whose block Toeplitz matrices are badly conditioned
    f = polys if polys is not None else four_polys_recursive(seq)
    return f, f.at(w), f.tilde_at(w)


def chi(seq, w, polys=None):
    """χ(w) = w √R ρ(w)⁻¹ J σ̃(w) √L⁻¹.

    Raises
    ------
    NotStrict, SingularDenominator
    """
    _require_strict(seq)
    f, (pi, rho, sig, tau), (pit, rhot, sigt, taut) = _parts(seq, w, polys)
    J = np.asarray(seq.J)
    b = seq.ball
    if abs(np.linalg.det(rho)) <= seq.tol.residual:
        raise SingularDenominator(f"ρ({w}) is singular")
    return complex(w) * b.sqrtR @ np.linalg.solve(rho, J @ sigt @ b.sqrtL_pinv)


def chi_alt(seq, w, polys=None):
    """Equivalent form w √R⁻¹ π̃(w) J τ(w)⁻¹ √L."""
    _require_strict(seq)
    f, (pi, rho, sig, tau), (pit, rhot, sigt, taut) = _parts(seq, w, polys)
    J = np.asarray(seq.J)
    b = seq.ball
    if abs(np.linalg.det(tau)) <= seq.tol.residual:
        raise SingularDenominator(f"τ({w}) is singular")
    return complex(w) * b.sqrtR_pinv @ pit @ J @ np.linalg.solve(tau, b.sqrtL)


def in_common_holomorphy(seq, w, polys=None):
    """True iff every solution is holomorphic at w.

    That is the case iff det ρ(w) ≠ 0 and ‖χ(w)‖ < 1, both with a
    `residual` margin.
    """
    _require_strict(seq)
    if abs(w) >= 1:
        return False
    try:
        X = chi(seq, w, polys)
    except SingularDenominator:
        return False
    return spectral_norm(X) < 1 - seq.tol.residual


def _r0_norm(seq, alt):
    A0 = seq[0]
    b = seq.prefix(0).ball
    J = np.asarray(seq.J)
    if alt:
        return spectral_norm(b.sqrtR_pinv @ A0.conj().T @ J @ b.sqrtL)
    return spectral_norm(b.sqrtR @ J @ A0.conj().T @ b.sqrtL_pinv)


def r0(seq):
    """Radius of a disk around 0 contained in every common holomorphy set.

    Equal to 1 for J = I and to ‖√R₁ J A_0* √L₁⁻¹‖⁻¹ otherwise, capped at 1.
    """
    if not seq.prefix(0).is_strict:
        raise NotStrict("A_0 must be strictly J-contractive")
    if seq.J.is_identity():
        return 1.0
    s = _r0_norm(seq, alt=False)
    return 1.0 if s <= 1 else 1.0 / s


def r0_alt(seq):
    """The same radius from the form ‖√R₁⁻¹ A_0* J √L₁‖⁻¹."""
    if not seq.prefix(0).is_strict:
        raise NotStrict("A_0 must be strictly J-contractive")
    if seq.J.is_identity():
        return 1.0
    s = _r0_norm(seq, alt=True)
    return 1.0 if s <= 1 else 1.0 / s


@dataclass(frozen=True)
class WeylBall:
    """Matrix ball M + Lnorm·K·Rhalf, ‖K‖ ≤ 1, at the point w.

    Attributes
    ----------
    L, R : ndarray
        Raw semi-radius factors; Lnorm = |w|^{n+1} √L and Rhalf = √R.
    M_alt : ndarray
        Center from the second available formula, kept for cross-checks.
    """

    w: complex
    n: int
    M: np.ndarray
    L: np.ndarray
    R: np.ndarray
    Lnorm: np.ndarray
    Rhalf: np.ndarray
    M_alt: np.ndarray = field(repr=False)

    @property
    def center_gap(self):
        """Spectral norm of the difference between the two center formulas."""
        return spectral_norm(self.M - self.M_alt)

    def to_json(self):
        return {
            "w": complex_to_json(self.w),
            "order": self.n,
            "M": matrix_to_json(self.M),
            "Lnorm": matrix_to_json(self.Lnorm),
            "Rhalf": matrix_to_json(self.Rhalf),
            "L": matrix_to_json(self.L),
            "R": matrix_to_json(self.R),
        }


def _make_ball(w, n, M, L, R, M_alt):
    L, R = hermitian_part(L), hermitian_part(R)
    return WeylBall(complex(w), n, M, L, R, abs(w) ** (n + 1) * psd_sqrt(L), psd_sqrt(R), M_alt)


def weyl_ball(seq, w, polys=None):
    """Weyl matrix ball of a strict sequence at w.

    Φ = τ*L⁻¹τ − |w|²Jπ̃*R⁻¹π̃J, Ψ = ρR⁻¹ρ* − |w|²Jσ̃L⁻¹σ̃*J,
    M = Φ⁻¹(τ*L⁻¹σ − |w|²Jπ̃*R⁻¹ρ̃J), 𝓛 = Φ⁻¹, 𝓡 = Ψ⁻¹, with every
    polynomial and reciprocal evaluated at w.

    Raises
    ------
    NotStrict, OutsideCommonDomain
    """
    _require_strict(seq)
    f = polys if polys is not None else four_polys_recursive(seq)
    if not in_common_holomorphy(seq, w, f):
        raise OutsideCommonDomain(f"w = {w} lies outside the common holomorphy set")
    pi, rho, sig, tau = f.at(w)
    pit, rhot, sigt, taut = f.tilde_at(w)
    J = np.asarray(seq.J)
    b = seq.ball
    Li, Ri = np.linalg.inv(b.L), np.linalg.inv(b.R)
    a2 = abs(w) ** 2
    h = lambda X: X.conj().T
    Phi = hermitian_part(h(tau) @ Li @ tau - a2 * J @ h(pit) @ Ri @ pit @ J)
    Psi = hermitian_part(rho @ Ri @ h(rho) - a2 * J @ sigt @ Li @ h(sigt) @ J)
    L = np.linalg.inv(Phi)
    R = np.linalg.inv(Psi)
    M = L @ (h(tau) @ Li @ sig - a2 * J @ h(pit) @ Ri @ rhot @ J)
    M_alt = (pi @ Ri @ h(rho) - a2 * J @ taut @ Li @ h(sigt) @ J) @ R
    return _make_ball(w, seq.n, M, L, R, M_alt)


def ball_membership(ball, X, tol=DEFAULT_TOL):
    """Norm of the contraction K with X = M + Lnorm·K·Rhalf.

    X lies in the ball iff the value is at most 1 + residual. At w = 0 the
    ball is the single point M; the value is then 0 for X within
    `residual` of M and infinity otherwise.

    Raises
    ------
    SingularRadius
    """
    D = np.asarray(X, dtype=complex) - ball.M
    if ball.w == 0:
        return 0.0 if spectral_norm(D) <= tol.residual else np.inf
    if min(np.linalg.svd(ball.Lnorm, compute_uv=False)[-1],
           np.linalg.svd(ball.Rhalf, compute_uv=False)[-1]) <= tol.rank_rel:
        raise SingularRadius("semi-radius is singular")
    return spectral_norm(np.linalg.solve(ball.Lnorm, D) @ np.linalg.inv(ball.Rhalf))


def pg_ball_transfer(schur_ball, J):
    """J-side Weyl ball computed from the ball of the Schur-side sequence.

    Uses the transfer formulas with P = (I + J)/2, Q = (I − J)/2 and
    N = n + 1:
    𝓛_J = ((MQ − P)*𝓛⁻¹(MQ − P) − |w|^{2N} Q𝓡Q)⁻¹,
    𝓡_J = ((QM + P)𝓡⁻¹(QM + P)* − |w|^{2N} Q𝓛Q)⁻¹,
    M_J = ((PM + Q)𝓡⁻¹(QM + P)* − |w|^{2N} P𝓛Q)𝓡_J, and the second
    center M_J = 𝓛_J((MQ − P)*𝓛⁻¹(Q − MP) + |w|^{2N} Q𝓡P) goes to `M_alt`.

    Raises
    ------
    SingularTransfer
        If QM + P or MQ − P is singular.
    """
    J = SignatureMatrix.coerce(J)
    P, Q = J.P, J.Q
    M, L, R = schur_ball.M, schur_ball.L, schur_ball.R
    c = abs(schur_ball.w) ** (2 * (schur_ball.n + 1))
    left = M @ Q - P
    right = Q @ M + P
    for X in (left, right):
        if np.linalg.svd(X, compute_uv=False)[-1] <= 1e-12:
            raise SingularTransfer("transfer matrix is singular")
    Li, Ri = np.linalg.inv(L), np.linalg.inv(R)
    h = lambda X: X.conj().T
    LJ = np.linalg.inv(hermitian_part(h(left) @ Li @ left - c * Q @ R @ Q))
    RJ = np.linalg.inv(hermitian_part(right @ Ri @ h(right) - c * Q @ L @ Q))
    MJ = ((P @ M + Q) @ Ri @ h(right) - c * P @ L @ Q) @ RJ
    MJ_alt = LJ @ (h(left) @ Li @ (Q - M @ P) + c * Q @ R @ P)
    return _make_ball(schur_ball.w, schur_ball.n, MJ, LJ, RJ, MJ_alt)


@dataclass(frozen=True)
class PGUnitaries:
    """Unitaries linking the resolvents of a sequence and of its PG transform."""

    U1: np.ndarray
    U2: np.ndarray
    schur: object

    def U(self):
        return np.block([[-self.U1, np.zeros_like(self.U1)], [np.zeros_like(self.U2), self.U2]])

    def V(self):
        return np.block([[-self.U2, np.zeros_like(self.U2)], [np.zeros_like(self.U1), self.U1]])


def pg_unitaries(seq):
    """U1 = √L (B_0Q − P)* √l⁻¹ and U2 = √R (QB_0 + P) √r⁻¹.

    L, R belong to the sequence and l, r to its PG transform (B_j).
    """
    _require_strict(seq)
    schur = pg_transform_seq(seq)
    P, Q = seq.J.P, seq.J.Q
    B0 = schur[0]
    b, s = seq.ball, schur.ball
    U1 = b.sqrtL @ (B0 @ Q - P).conj().T @ s.sqrtL_pinv
    U2 = b.sqrtR @ (Q @ B0 + P) @ s.sqrtR_pinv
    return PGUnitaries(U1, U2, schur)


def pg_resolvent_residuals(seq, w):
    """Residuals of A_J·C_n(w) = C_{n,J}(w)·U and D_n(w)·B_J = V*·D_{n,J}(w).

    C_n and D_n are the resolvents of the PG transform, and
    A_J = [[P, Q], [Q, P]], B_J = [[−P, Q], [Q, −P]].
    """
    u = pg_unitaries(seq)
    P, Q = seq.J.P, seq.J.Q
    AJ = np.block([[P, Q], [Q, P]])
    BJ = np.block([[-P, Q], [Q, -P]])
    rs, rj = resolvents(u.schur), resolvents(seq)
    left = spectral_norm(AJ @ rs.C(w) - rj.C(w) @ u.U())
    right = spectral_norm(rs.D(w) @ BJ - u.V().conj().T @ rj.D(w))
    return left, right


def extremal_function(seq, w):
    """Solution with parameter −χ(w)*, whose value at w is fixed by all later orders.

    Raises
    ------
    OutsideCommonDomain
    """
    _require_strict(seq)
    if not in_common_holomorphy(seq, w):
        raise OutsideCommonDomain(f"w = {w} lies outside the common holomorphy set")
    return lft_solution(seq, SchurParam(-chi(seq, w).conj().T), construction="recursive")


def extremal_tower(seq, w, N):
    """Coefficients of the extremal function at w up to order N ≥ n + 1.

    The first new coefficient is M + √L(−χ(w)*)√R; the rest follow the
    central recursion, since the extremal function is central for the
    extended sequence.
    """
    if N <= seq.n:
        raise ValueError("N must exceed the sequence order")
    K = -chi(seq, w).conj().T
    out = seq.append(seq.ball.point(K))
    return extend_central(out, N - out.n)


@dataclass(frozen=True)
class LimitRow:
    order: int
    M: np.ndarray
    L: np.ndarray
    R: np.ndarray
    rankL: int
    rankR: int


def _rank(H, tol):
    lam = np.linalg.eigvalsh(hermitian_part(H))
    top = max(abs(lam).max(), 0.0)
    return int(np.sum(lam > tol.rank_rel * top * len(lam))) if top > 0 else 0


@dataclass(frozen=True)
class LimitTable:
    """Ball parameters at a fixed w along the prefixes of one sequence."""

    w: complex
    rows: tuple
    stagnation_order: object = None
    pg_L: object = None
    pg_R: object = None

    @property
    def last(self):
        return self.rows[-1]

    def to_csv(self):
        m = self.rows[0].M.shape[0]
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["order", "normM"] + [f"eigL{i}" for i in range(m)]
                     + [f"eigR{i}" for i in range(m)] + ["rankL", "rankR"])
        for r in self.rows:
            eL = np.linalg.eigvalsh(hermitian_part(r.L))
            eR = np.linalg.eigvalsh(hermitian_part(r.R))
            out.writerow([r.order, repr(spectral_norm(r.M))] + [repr(float(x)) for x in eL]
                         + [repr(float(x)) for x in eR] + [r.rankL, r.rankR])
        return buf.getvalue()


def limit_study(tower, w, N=None, start=0, stagnation_tol=1e-9, stagnation_run=3):
    """Tabulate Weyl ball parameters at w for the prefixes of `tower`.

    Rows start at the first order k₀ ≥ `start` whose common holomorphy set
    contains w and run to N (default: the tower's order). For J ≠ I the limits of 𝓛
    and 𝓡 are also obtained on the Schur side and carried back through
    𝓛_J = (gQ − P)⁻¹𝓛(gQ − P)⁻* and 𝓡_J = (Qg + P)⁻*𝓡(Qg + P)⁻¹, where g
    is the last Schur-side center.

    Raises
    ------
    OutsideCommonDomain
        If w is outside the common holomorphy set at every order ≤ N.
    """
    N = tower.n if N is None else N
    if N > tower.n:
        raise ValueError(f"tower has order {tower.n} < {N}")
    tol = tower.tol
    rows = []
    for k in range(start, N + 1):
        pre = tower.prefix(k)
        if not rows and not in_common_holomorphy(pre, w):
            continue
        ball = weyl_ball(pre, w)
        rows.append(LimitRow(k, ball.M, ball.L, ball.R, _rank(ball.L, tol), _rank(ball.R, tol)))
    if not rows:
        raise OutsideCommonDomain(f"w = {w} is outside the common holomorphy set up to order {N}")
    stag, run = None, 0
    for a, b in zip(rows, rows[1:]):
        run = run + 1 if spectral_norm(b.L - a.L) <= stagnation_tol else 0
        if run >= stagnation_run:
            stag = b.order - stagnation_run
            break
    pg_L = pg_R = None
    if not tower.J.is_identity():
        schur = pg_transform_seq(tower.prefix(N))
        sb = weyl_ball(schur, w)
        P, Q = tower.J.P, tower.J.Q
        g = sb.M
        left = np.linalg.inv(g @ Q - P)
        right = np.linalg.inv(Q @ g + P)
        pg_L = left @ sb.L @ left.conj().T
        pg_R = right.conj().T @ sb.R @ right
    return LimitTable(complex(w), tuple(rows), stag, pg_L, pg_R)
