"""Seeded self-verification suite.

Each check draws random instances from a seed and reports the worst
residual it saw against its tolerance. The command line `verify`
subcommand prints one line per check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matkernel import pinv, spectral_norm
from .polynomials import four_polys_general, four_polys_recursive, four_polys_strict, resolvent_factors, resolvents, u_mm
from .sequence import (
    ball_parameters_block,
    classify_block,
    pg_transform_seq,
    random_contraction,
    random_degenerate_seq,
    random_strict_seq,
)
from .solve import canonical_parameter, lft_solution, taylor_coeffs
from .weyl import ball_membership, pg_ball_transfer, r0, weyl_ball

__all__ = ["CheckResult", "run_suite", "CHECKS"]

_SIGNATURES = (
    np.eye(1), -np.eye(1), np.eye(2), np.diag([1.0, -1.0]), -np.eye(2), np.diag([1.0, -1.0, -1.0]),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    tol: float
    count: int

    @property
    def passed(self):
        return bool(self.worst <= self.tol)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: worst {self.worst:.3e} (tol {self.tol:.0e}, {self.count} cases)"


def _instances(seed, count, degenerate=False):
    rng = np.random.default_rng(seed)
    for i in range(count):
        J = _SIGNATURES[rng.integers(len(_SIGNATURES))]
        n = int(rng.integers(0, 5))
        s = int(rng.integers(2**31))
        if degenerate:
            yield rng, random_degenerate_seq(len(J), J, n, s, ("boundary", "defect")[i % 2])
        else:
            yield rng, random_strict_seq(len(J), J, n, s, margin=0.7)


def _point(rng, seq, frac=0.8):
    return frac * r0(seq) * rng.uniform() * np.exp(2j * np.pi * rng.uniform())


def check_penrose(seed, count):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        if rng.uniform() < 0.5:
            M[:, 0] = M[:, 1]
        X = pinv(M)
        worst = max(worst, spectral_norm(M @ X @ M - M), spectral_norm(X @ M @ X - X),
                    spectral_norm((M @ X).conj().T - M @ X), spectral_norm((X @ M).conj().T - X @ M))
    return worst


def check_ball_routes(seed, count):
    worst = 0.0
    for kind in (False, True):
        for _, seq in _instances(seed, count, kind):
            if classify_block(seq) is not seq.classification:
                return np.inf
            a, b = seq.ball, ball_parameters_block(seq)
            worst = max(worst, *(np.abs(getattr(a, x) - getattr(b, x)).max() for x in "MLR"))
    return worst


def check_det_lr(seed, count):
    worst = 0.0
    for _, seq in _instances(seed, count):
        dl, dr = np.linalg.det(seq.ball.L), np.linalg.det(seq.ball.R)
        worst = max(worst, abs(dl - dr) / abs(dl))
    return worst


def check_interpolation(seed, count):
    worst = 0.0
    for kind in (False, True):
        for rng, seq in _instances(seed, count, kind):
            S = random_contraction(rng, seq.m, rng.uniform())
            for construction in ("general", "recursive"):
                f = lft_solution(seq, S, construction=construction)
                t = taylor_coeffs(f, seq.n)
                worst = max(worst, max(np.abs(a - b).max() for a, b in zip(t, seq.coeffs)))
            if kind:
                f, g = lft_solution(seq, S), lft_solution(seq, canonical_parameter(seq, S))
                w = 0.3 * np.exp(2j * np.pi * rng.uniform())
                worst = max(worst, np.abs(f(w) - g(w)).max())
    return worst


def check_constructions(seed, count):
    worst = 0.0
    for _, seq in _instances(seed, count):
        g, s, r = four_polys_general(seq), four_polys_strict(seq), four_polys_recursive(seq)
        for name in ("pi", "rho", "sigma", "tau"):
            for other in (s, r):
                a, b = getattr(g, name), getattr(other, name)
                worst = max(worst, max(np.abs(a.coeff(k) - b.coeff(k)).max() for k in range(seq.n + 1)))
    return worst


def check_identities(seed, count):
    worst = 0.0
    for rng, seq in _instances(seed, count):
        J = np.asarray(seq.J)
        f = four_polys_general(seq)
        b = seq.ball
        n, m = seq.n, seq.m
        rp = resolvents(seq)
        U = u_mm(m)
        for _ in range(5):
            w = rng.uniform() * np.exp(2j * np.pi * rng.uniform())
            pi, rho, sig, tau = f.at(w)
            pit, rhot, sigt, taut = f.tilde_at(w)
            C, D = rp.C(w), rp.D(w)
            worst = max(
                worst,
                np.abs(tau @ J @ taut - sig @ J @ sigt - w**n * b.L).max(),
                np.abs(rhot @ J @ rho - pit @ J @ pi - w**n * b.R).max(),
                np.abs(tau @ pi - sig @ rho).max(),
                abs(np.linalg.det(C) - w ** ((n + 1) * m)),
                np.abs(D @ U @ C - w ** (n + 1) * U).max(),
            )
        z = np.exp(2j * np.pi * rng.uniform())
        Jb = np.block([[J, 0 * J], [0 * J, -J]])
        C = rp.C(z)
        worst = max(worst, np.abs(C.conj().T @ Jb @ C - np.diag([1.0] * m + [-1.0] * m)).max())
        if n:
            fac = resolvent_factors(seq)
            worst = max(worst, max(np.abs(fac.C().coeff(k) - rp.C.coeff(k)).max() for k in range(n + 2)))
    return worst


def check_weyl(seed, count):
    worst = 0.0
    for rng, seq in _instances(seed, count):
        w = _point(rng, seq)
        ball = weyl_ball(seq, w)
        S = random_contraction(rng, seq.m, rng.uniform())
        worst = max(worst, ball_membership(ball, lft_solution(seq, S)(w)) - 1, ball.center_gap)
    return max(worst, 0.0)


def check_pg(seed, count):
    worst = 0.0
    for rng, seq in _instances(seed, count):
        schur = pg_transform_seq(seq)
        back = pg_transform_seq(schur, seq.J)
        worst = max(worst, max(np.abs(a - b).max() for a, b in zip(back.coeffs, seq.coeffs)))
        w = _point(rng, seq)
        direct = weyl_ball(seq, w)
        moved = pg_ball_transfer(weyl_ball(schur, w), seq.J)
        worst = max(worst, *(np.abs(getattr(moved, x) - getattr(direct, x)).max() for x in ("M", "M_alt", "L", "R")))
    return worst


def check_monotone(seed, count):
    worst = 0.0
    for rng, seq in _instances(seed, count):
        if seq.n == 0:
            continue
        w = _point(rng, seq)
        prev = weyl_ball(seq.prefix(seq.n - 1), w)
        cur = weyl_ball(seq, w)
        for a, b in ((prev.L, cur.L), (prev.R, cur.R)):
            worst = max(worst, -np.linalg.eigvalsh((a - b + (a - b).conj().T) / 2)[0])
    return worst


CHECKS = (
    ("pinv Penrose identities", check_penrose, 1e-10),
    ("recursive and block ball parameters agree", check_ball_routes, 1e-9),
    ("det L = det R (relative)", check_det_lr, 1e-8),
    ("Taylor interpolation and canonical parameter", check_interpolation, 1e-8),
    ("general, strict and recursive polynomials agree", check_constructions, 1e-9),
    ("polynomial and resolvent identities", check_identities, 1e-9),
    ("Weyl ball containment", check_weyl, 1e-8),
    ("PG involution and ball transfer", check_pg, 1e-8),
    ("semi-radius monotonicity", check_monotone, 1e-10),
)


def run_suite(seed=0, count=20):
    """Run every check; return the list of CheckResult."""
    out = []
    for i, (name, fn, tol) in enumerate(CHECKS):
        out.append(CheckResult(name, float(fn(seed * 1009 + i, count)), tol, count))
    return out
