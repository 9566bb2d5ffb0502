"""Canonical forms of positive-definite inner products on T*h(2n+1).

The automorphism action S -> F^T S F is reduced in four steps:

1. F3 = -S4^{-1} S2^T F1 kills the off-diagonal block S2 (a Schur
   complement on the noncentral block).
2. The center-pairing vectors t1 = <z*, (e, f)> and, for n = 1 only,
   t4 = <z, (e*, f*)> are eliminated.  For n = 1 the (u1, v1) system is
   genuinely coupled (each elimination re-introduces the other vector), so
   a small Newton iteration solves both at once.  For n >= 2 only v1
   exists, killing t1; nothing in the group can touch t4, which is why the
   diagonal template below is unreachable for generic metrics when n >= 2.
3. Symplectic (Williamson) diagonalization of the (e, f) block, followed by
   the conformal scale that pins sigma_n = 1 and the z*-scale f1 that pins
   omega1 = 1.
4. Plane rotations zero the entries (S4bar)_{i, n+i}; the rotation angle in
   plane i is fixed up to quarter turns, and the representative with
   (S4bar)_{ii} >= (S4bar)_{n+i, n+i} is chosen to make the output
   deterministic.

The canonical template is diag(D(sigma), 1, S4bar, omega4) with
sigma_1 >= ... >= sigma_n = 1 and n prescribed zeros in S4bar; it carries
n(2n+1) free parameters.  reduce_to_canonical reaches it exactly (to float
tolerance) for n = 1 and raises ToleranceFailure for generic metrics when
n >= 2 with the surviving t4 reported; reduce_with_diagnostics returns the
partially reduced data in every case.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .lie_core import LieAlgebra, build_thn, standard_symplectic
from .automorphism import (
    Automorphism,
    AutParams,
    assemble,
    is_automorphism,
    symplectic_rotation,
)

__all__ = [
    "NonPositiveDefinite",
    "ToleranceFailure",
    "CanonicalMetric",
    "ReductionResult",
    "EquivalenceResult",
    "act",
    "williamson",
    "reduce_to_canonical",
    "reduce_with_diagnostics",
    "free_parameter_count",
    "are_equivalent",
    "random_positive_definite",
    "split_blocks",
]


class NonPositiveDefinite(ValueError):
    """Raised when a positive-definite matrix was required."""


class ToleranceFailure(RuntimeError):
    """Raised when a residual exceeds its tolerance; carries diagnostics."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


def act(f, s: np.ndarray) -> np.ndarray:
    """Pullback action on inner products: S -> F^T S F."""
    m = f.matrix if isinstance(f, Automorphism) else np.asarray(f)
    return m.T @ s @ m


def _sym(s: np.ndarray) -> np.ndarray:
    # pullbacks of symmetric input are symmetric; drop the float roundoff
    return 0.5 * (s + s.T)


def split_blocks(s: np.ndarray, n: int):
    """(S1bar, t1, omega1, S4bar, t4, omega4, S2) for the (e,f | z* | e*,f* | z) blocks."""
    m = 2 * n + 1
    s1 = s[:m, :m]
    s2 = s[:m, m:]
    s4 = s[m:, m:]
    return (
        s1[: 2 * n, : 2 * n],
        s1[: 2 * n, 2 * n],
        s1[2 * n, 2 * n],
        s4[: 2 * n, : 2 * n],
        s4[: 2 * n, 2 * n],
        s4[2 * n, 2 * n],
        s2,
    )


@dataclass(frozen=True)
class CanonicalMetric:
    """Template data diag(D(sigma), 1, S4bar, omega4).

    sigma : tuple of n floats, descending, sigma[-1] = 1.
    S4bar : (2n, 2n) symmetric positive-definite with (S4bar)_{i, n+i} = 0.
    omega4 : positive float.
    """

    sigma: tuple
    S4bar: np.ndarray
    omega4: float

    def __post_init__(self):
        n = len(self.sigma)
        s4 = np.asarray(self.S4bar, dtype=float)
        if s4.shape != (2 * n, 2 * n):
            raise ValueError("S4bar shape mismatch")
        if np.abs(s4 - s4.T).max() > 1e-9 * max(1.0, np.abs(s4).max()):
            raise ValueError("S4bar must be symmetric")
        if any(self.sigma[i] < self.sigma[i + 1] - 1e-9 for i in range(n - 1)):
            raise ValueError("sigma must be sorted descending")
        if abs(self.sigma[-1] - 1.0) > 1e-6:
            raise ValueError("sigma_n must equal 1")
        if self.omega4 <= 0:
            raise ValueError("omega4 must be positive")

    @property
    def n(self) -> int:
        return len(self.sigma)

    def matrix(self) -> np.ndarray:
        n = self.n
        d = 4 * n + 2
        out = np.zeros((d, d))
        for i in range(n):
            out[i, i] = self.sigma[i]
            out[n + i, n + i] = self.sigma[i]
        out[2 * n, 2 * n] = 1.0
        out[2 * n + 1 : 4 * n + 1, 2 * n + 1 : 4 * n + 1] = np.asarray(self.S4bar, dtype=float)
        out[4 * n + 1, 4 * n + 1] = self.omega4
        return out

    def template_zero_defect(self) -> float:
        n = self.n
        s4 = np.asarray(self.S4bar, dtype=float)
        return max(abs(s4[i, n + i]) for i in range(n))


@dataclass(frozen=True)
class ReductionResult:
    canonical: CanonicalMetric
    automorphism: Automorphism
    reduced: np.ndarray
    residual: float
    t4: np.ndarray

    @property
    def sigma(self) -> tuple:
        return self.canonical.sigma


def free_parameter_count(n: int) -> int:
    """Free entries of the canonical template: (n-1) sigmas + (n(2n+1) - n) in S4bar + omega4."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sigmas = n - 1
    s4bar = n * (2 * n + 1) - n
    return sigmas + s4bar + 1


def williamson(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic diagonalization of a positive-definite 2n x 2n matrix.

    Returns (Fbar, sigma) with Fbar^T J Fbar = J and
    Fbar^T M Fbar = diag(sigma_1..sigma_n, sigma_1..sigma_n), sigma
    descending.  The sigma_i are the moduli of the (purely imaginary)
    eigenvalues of J M.  Built from M^{-1/2} and a real Schur form of
    M^{-1/2} J M^{-1/2}; both certificate identities are checked before
    returning.

    Raises
    ------
    NonPositiveDefinite
        If M is not symmetric positive definite.
    ToleranceFailure
        If the certificate residual exceeds 1e-8 (conditioning guard).
    """
    m = np.asarray(m, dtype=float)
    two_n = m.shape[0]
    if m.shape != (two_n, two_n) or two_n % 2:
        raise ValueError("expected a square matrix of even size")
    n = two_n // 2
    scale = max(1.0, np.abs(m).max())
    if np.abs(m - m.T).max() > 1e-12 * scale:
        raise NonPositiveDefinite("matrix is not symmetric")
    w, v = np.linalg.eigh(m)
    if w.min() <= 0:
        raise NonPositiveDefinite(f"matrix is not positive definite (min eig {w.min():.3e})")
    j = standard_symplectic(n)
    mi2 = v @ np.diag(w ** -0.5) @ v.T
    k = mi2 @ j @ mi2
    t, q = schur(k, output="real")
    pairs = []
    for i in range(0, two_n, 2):
        b = t[i, i + 1]
        pairs.append((1.0 / abs(b), i, b > 0))
    order = np.argsort([-p[0] for p in pairs])
    o = np.zeros((two_n, two_n))
    sigma = np.zeros(n)
    for newk, oidx in enumerate(order):
        s, i, b_positive = pairs[oidx]
        sigma[newk] = s
        # orientation: want K(col_e, col_f) = -1/sigma in the (e, f) slot pair
        if b_positive:
            o[:, newk] = q[:, i + 1]
            o[:, n + newk] = q[:, i]
        else:
            o[:, newk] = q[:, i]
            o[:, n + newk] = q[:, i + 1]
    fbar = mi2 @ o @ np.diag(np.concatenate([np.sqrt(sigma), np.sqrt(sigma)]))
    cert1 = np.abs(fbar.T @ j @ fbar - j).max()
    target = np.diag(np.concatenate([sigma, sigma]))
    cert2 = np.abs(fbar.T @ m @ fbar - target).max()
    bound = 1e-8 * max(scale, sigma.max())
    if cert1 > bound or cert2 > bound:
        raise ToleranceFailure(
            f"williamson certificate failed: symplectic {cert1:.2e}, diagonal {cert2:.2e}"
        )
    return fbar, sigma


def _zeros_params(n: int, fb1=None, u1=None, v1=None, f1=1.0, f3=None) -> AutParams:
    return AutParams(
        Fbar1=np.eye(2 * n) if fb1 is None else fb1,
        u1=np.zeros(2 * n) if u1 is None else u1,
        v1=np.zeros(2 * n) if v1 is None else v1,
        f1=f1,
        F3=np.zeros((2 * n + 1, 2 * n + 1)) if f3 is None else f3,
    )


def reduce_with_diagnostics(s: np.ndarray, g: LieAlgebra) -> ReductionResult:
    """Run the four-step reduction and return whatever it achieves.

    The residual measures the distance of F^T S F from the reconstructed
    template including the center-pairing entries t4, which survive for
    n >= 2; t4 is returned separately so callers can distinguish the
    removable part of the residual (should be ~1e-12) from the structural
    one.
    """
    n = g.n
    d = 4 * n + 2
    m = 2 * n + 1
    s = np.asarray(s, dtype=float)
    if s.shape != (d, d):
        raise ValueError("metric dimension mismatch")
    if np.abs(s - s.T).max() > 1e-9 * max(1.0, np.abs(s).max()):
        raise NonPositiveDefinite("metric is not symmetric")
    s = 0.5 * (s + s.T)   # drop pullback roundoff asymmetry
    scale = max(1.0, np.abs(s).max())
    if np.abs(s - s.T).max() > 1e-12 * scale:
        raise NonPositiveDefinite("metric is not symmetric")
    if np.linalg.eigvalsh(s).min() <= 0:
        raise NonPositiveDefinite("metric is not positive definite")

    f_total = Automorphism(matrix=np.eye(d), n=n)
    cur = s.copy()

    # step 1: Schur-complement kill of S2
    s2 = cur[:m, m:]
    s4 = cur[m:, m:]
    f3 = -np.linalg.solve(s4, s2.T)
    step = assemble(_zeros_params(n, f3=f3), g)
    f_total = f_total @ step
    cur = _sym(act(step, cur))

    # step 2: center-pairing elimination
    if n == 1:
        def resid(x):
            try:
                fx = assemble(_zeros_params(n, u1=x[:2].copy(), v1=x[2:].copy()), g)
            except ValueError:
                return None
            sx = act(fx, cur)
            _, t1x, _, _, t4x, _, _ = split_blocks(sx, n)
            return np.concatenate([t1x, t4x])

        x = np.zeros(4)
        r = resid(x)
        for _ in range(100):
            if np.abs(r).max() < 1e-14 * scale:
                break
            jac = np.zeros((4, 4))
            h = 1e-7
            for kcol in range(4):
                xp = x.copy()
                xp[kcol] += h
                rp = resid(xp)
                if rp is None:
                    rp = r
                jac[:, kcol] = (rp - r) / h
            delta = np.linalg.solve(jac, r)
            x_new = x - delta
            r_new = resid(x_new)
            while r_new is None:
                # backtrack past the measure-zero set where F1 degenerates
                delta = delta / 2
                x_new = x - delta
                r_new = resid(x_new)
            x, r = x_new, r_new
        step = assemble(_zeros_params(n, u1=x[:2].copy(), v1=x[2:].copy()), g)
    else:
        s1b, t1, _, _, _, _, _ = split_blocks(cur, n)
        v1 = -np.linalg.solve(s1b, t1)
        step = assemble(_zeros_params(n, v1=v1), g)
    f_total = f_total @ step
    cur = _sym(act(step, cur))

    # step 3: Williamson + conformal scale (sigma_n -> 1) + z*-scale (omega1 -> 1)
    s1b, _, om1, _, _, _, _ = split_blocks(cur, n)
    fbar, sigma = williamson(s1b)
    fbar = fbar / np.sqrt(sigma[-1])
    f1 = 1.0 / np.sqrt(om1)
    step = assemble(_zeros_params(n, fb1=fbar, f1=f1), g)
    f_total = f_total @ step
    cur = _sym(act(step, cur))

    # step 4: plane rotations; zero (S4bar)_{i,n+i} and order each plane's diagonal
    _, _, _, s4b, _, _, _ = split_blocks(cur, n)
    angles = np.zeros(n)
    for i in range(n):
        a, b, c = s4b[i, i], s4b[i, n + i], s4b[n + i, n + i]
        phi = 0.5 * np.arctan2(-2.0 * b, a - c)
        # the quarter-turn partner also zeroes b; pick the one with a' >= c'
        cos2, sin2 = np.cos(2 * phi), np.sin(2 * phi)
        a_new = (a + c) / 2 + ((a - c) / 2) * cos2 - b * sin2
        c_new = (a + c) - a_new
        angles[i] = phi if a_new >= c_new else phi + np.pi / 2
    step = symplectic_rotation(angles, g)
    f_total = f_total @ step
    cur = _sym(act(step, cur))

    s1b, t1, om1, s4b, t4, om4, s2 = split_blocks(cur, n)
    sigma_final = np.diag(s1b)[:n].copy()
    sigma_final[-1] = 1.0
    s4b_clean = 0.5 * (s4b + s4b.T)
    for i in range(n):
        s4b_clean[i, n + i] = 0.0
        s4b_clean[n + i, i] = 0.0
    canonical = CanonicalMetric(
        sigma=tuple(np.maximum.accumulate(sigma_final[::-1])[::-1]),
        S4bar=s4b_clean,
        omega4=float(om4),
    )
    residual = float(np.abs(cur - canonical.matrix()).max())
    return ReductionResult(
        canonical=canonical,
        automorphism=f_total,
        reduced=cur,
        residual=residual,
        t4=t4.copy(),
    )


def reduce_to_canonical(s: np.ndarray, g: LieAlgebra, tol: float = 1e-6
                        ) -> tuple[CanonicalMetric, Automorphism]:
    """Full reduction to the diagonal template.

    Raises
    ------
    NonPositiveDefinite
        If s is not symmetric positive definite.
    ToleranceFailure
        If the residual against the reconstructed template exceeds tol
        (default 1e-6).  For n >= 2 this is the generic outcome: the
        center-pairing vector t4 is invariant under the whole group and
        the template has no slot for it.  The exception carries the
        partial ReductionResult.
    """
    result = reduce_with_diagnostics(s, g)
    if result.residual > tol:
        raise ToleranceFailure(
            f"residual {result.residual:.3e} exceeds {tol:.1e}; "
            f"center-pairing |t4| = {np.abs(result.t4).max():.3e} "
            "cannot be removed by the automorphism group for n >= 2",
            result=result,
        )
    if not is_automorphism(result.automorphism.matrix, g, tol=1e-12):
        raise ToleranceFailure("reducing map failed the automorphism check", result=result)
    return result.canonical, result.automorphism


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: str                 # "equivalent" | "distinct" | "inconclusive"
    witness: Automorphism | None
    detail: dict

    def __bool__(self):
        return self.verdict == "equivalent"


def _center_slot_flips(g: LieAlgebra) -> list:
    """Order-2 automorphisms of T*h(3) swapping a plane direction with z*.

    phi_e: e <-> z*, e* <-> -z, f* -> -f* (and phi_f with the roles of e
    and f).  For n = 1 these preserve the bracket table because z* pairs
    with a single plane; any second plane obstructs them.  On a reduced
    diagonal metric they swap the (e*, e*) resp. (f*, f*) entry with the
    (z, z) entry, so together with the quarter turns they realize the
    full permutation group of the three dual diagonal values.
    """
    if g.n != 1:
        return []
    phi_e = np.zeros((6, 6))
    phi_e[2, 0] = 1.0; phi_e[1, 1] = 1.0; phi_e[0, 2] = 1.0
    phi_e[5, 3] = -1.0; phi_e[4, 4] = -1.0; phi_e[3, 5] = -1.0
    phi_f = np.zeros((6, 6))
    phi_f[0, 0] = 1.0; phi_f[2, 1] = 1.0; phi_f[1, 2] = 1.0
    phi_f[3, 3] = -1.0; phi_f[5, 4] = -1.0; phi_f[4, 5] = -1.0
    return [Automorphism(matrix=phi_e, n=1), Automorphism(matrix=phi_f, n=1)]


def _residual_group_matches(r1: ReductionResult, r2: ReductionResult, g: LieAlgebra,
                            tol: float):
    """Search the residual finite group for an alignment of the reduced data.

    The stabilizer of the reduced form contains per-plane quarter turns and
    the antisymplectic reflection diag(E, -E) (conformal factor -1); both
    preserve the template constraints while permuting plane diagonals and
    flipping signs in S4bar and t4.  For n = 1 the two center slot flips
    extend this to all six arrangements of (S4bar diagonal, omega4).
    """
    n = g.n
    scale = max(1.0, np.abs(r2.reduced).max())
    refl_fb1 = np.eye(2 * n)
    refl_fb1[n:, n:] *= -1.0
    reflection = assemble(_zeros_params(n, fb1=refl_fb1), g)
    extras = [None] + _center_slot_flips(g)
    for ks in itertools.product(range(4), repeat=n):
        rot = symplectic_rotation([k * np.pi / 2 for k in ks], g)
        for with_refl in (False, True):
            base = rot @ reflection if with_refl else rot
            for post in extras:
                elem = base @ post if post is not None else base
                moved = act(elem, r1.reduced)
                if np.abs(moved - r2.reduced).max() <= tol * scale:
                    return elem
    return None


def are_equivalent(s1: np.ndarray, s2: np.ndarray, g: LieAlgebra,
                   tol: float = 1e-6) -> EquivalenceResult:
    """Decide whether two positive-definite metrics lie on the same orbit.

    The sigma multiset is a complete scale-normalized invariant of the
    quotient action on the (e, f) block, so differing sigmas give a firm
    "distinct".  Matching sigmas with matching reduced data (up to the
    residual finite group of quarter turns, the reflection, and for n = 1
    the center slot flips) give "equivalent" with an explicit witness
    W satisfying act(W, s1) = s2.  Matching sigmas with differing data are
    "distinct" for n = 1, where the template is complete up to that group, and
    "inconclusive" otherwise: for repeated sigmas a wider stabilizer can
    identify different templates, and for n >= 2 completeness of the
    partially reduced data is not established.
    """
    n = g.n
    r1 = reduce_with_diagnostics(s1, g)
    r2 = reduce_with_diagnostics(s2, g)
    sig1 = np.array(r1.sigma)
    sig2 = np.array(r2.sigma)
    detail = {"sigma1": r1.sigma, "sigma2": r2.sigma}
    if np.abs(sig1 - sig2).max() > tol * max(1.0, sig1.max(), sig2.max()):
        return EquivalenceResult("distinct", None, detail)
    gaps = np.abs(np.diff(sig1))
    repeated = bool(n > 1 and gaps.size and gaps.min() < 1e-9 * max(1.0, sig1.max()))
    detail["repeated_sigma"] = repeated
    rot = _residual_group_matches(r1, r2, g, tol)
    if rot is not None:
        w_mat = r1.automorphism.matrix @ rot.matrix @ np.linalg.inv(r2.automorphism.matrix)
        witness = Automorphism(matrix=w_mat, n=n)
        if is_automorphism(w_mat, g, tol=1e-9) and \
                np.abs(act(witness, s1) - s2).max() <= 10 * tol * max(1.0, np.abs(s2).max()):
            return EquivalenceResult("equivalent", witness, detail)
    if repeated or n >= 2:
        return EquivalenceResult("inconclusive", None, detail)
    return EquivalenceResult("distinct", None, detail)


def random_positive_definite(g: LieAlgebra, rng: np.random.Generator,
                             spread: float = 1.0) -> np.ndarray:
    """Well-conditioned random SPD metric: A A^T + dim * E with N(0, spread) entries."""
    d = g.dim
    a = spread * rng.standard_normal((d, d))
    return a @ a.T + d * max(1.0, spread ** 2) * np.eye(d)
