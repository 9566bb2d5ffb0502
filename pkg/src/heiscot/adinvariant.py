"""Ad-invariant symmetric bilinear forms on T*h(2n+1).

The duality pairing <x + phi, y + psi> = psi(x) + phi(y) is ad-invariant
for the coadjoint semidirect bracket, and it is essentially the only
invariant metric: the full space of ad-invariant symmetric forms is

    S = [[Sbar, alpha E], [alpha E, 0]]

in the (e, f, z* | e*, f*, z) splitting, with Sbar an arbitrary symmetric
(2n+1) x (2n+1) block and alpha a scalar, so the solution space has
dimension (2n+1)(2n+2)/2 + 1 and contains exactly one nondegeneracy class:
alpha != 0.  Every nondegenerate member is carried to the pairing itself
by an explicit automorphism (no residual scale: the conformal factor of
the group absorbs alpha), computed here in closed form.

Such a metric is bi-invariant, so nabla = ad/2; since the algebra is
two-step nilpotent, R(x,y) = -ad_{[x,y]}/4 = 0 and the metric is flat.
certify_flat checks both statements with the general curvature engine
rather than trusting the argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exact
from ._exact import fr, fzeros, feye, is_exact, to_float
from .automorphism import AutParams, Automorphism, assemble
from .curvature import is_flat, levi_civita, riemann
from .lie_core import LieAlgebra

__all__ = [
    "pairing_metric",
    "ad_invariance_defect",
    "is_ad_invariant",
    "solution_space_dimension",
    "ad_invariant_solution_space",
    "template_defect",
    "random_ad_invariant",
    "NormalizedAdInvariant",
    "normalize_ad_invariant",
    "certify_flat",
]


def pairing_metric(n: int, exact: bool = False) -> np.ndarray:
    """The duality pairing as a (4n+2) x (4n+2) matrix: b_i paired with b_{m+i}, m = 2n+1."""
    d = 4 * n + 2
    m = 2 * n + 1
    p = fzeros((d, d)) if exact else np.zeros((d, d))
    one = fr(1) if exact else 1.0
    for i in range(m):
        p[i, m + i] = one
        p[m + i, i] = one
    return p


def ad_invariance_defect(g: LieAlgebra, s: np.ndarray) -> float:
    """max |<[x,y],w> + <y,[x,w]>| over basis triples, i.e. max |ad_x^T s + s ad_x|."""
    exact = is_exact(s)
    worst = 0.0
    for x in range(g.dim):
        ax = g.ad_basis(x, exact=exact)
        m = ax.T @ s + s @ ax
        if exact:
            m = to_float(m)
        worst = max(worst, float(np.abs(m).max()))
    return worst


def is_ad_invariant(g: LieAlgebra, s: np.ndarray, tol: float = 1e-12) -> bool:
    bound = 0.0 if is_exact(s) else tol * max(1.0, float(np.abs(to_float(s)).max()))
    return ad_invariance_defect(g, s) <= bound


def solution_space_dimension(n: int) -> int:
    """(2n+1)(2n+2)/2 + 1: a free symmetric block plus the pairing scale."""
    m = 2 * n + 1
    return m * (m + 1) // 2 + 1


def ad_invariant_solution_space(g: LieAlgebra) -> list[np.ndarray]:
    """Exact basis of {s symmetric : ad_x^T s + s ad_x = 0 for all x}.

    Returns a list of symmetric Fraction matrices.  The equations are
    assembled sparsely over the structure constants in the d(d+1)/2
    upper-triangle variables and solved by exact elimination.
    """
    d = g.dim
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    idx = {p: k for k, p in enumerate(pairs)}

    def sidx(a, b):
        return idx[(a, b)] if a <= b else idx[(b, a)]

    rows = []
    for x in range(d):
        for y in range(d):
            for w in range(y, d):
                row: dict = {}
                for (k, v) in g.bracket_sparse(x, y):
                    col = sidx(k, w)
                    row[col] = row.get(col, Fraction(0)) + v
                for (k, v) in g.bracket_sparse(x, w):
                    col = sidx(y, k)
                    row[col] = row.get(col, Fraction(0)) + v
                row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
    basis = []
    for vec in _exact.nullspace_sparse(rows, len(pairs)):
        s = fzeros((d, d))
        for k, (a, b) in enumerate(pairs):
            if vec[k]:
                s[a, b] = vec[k]
                s[b, a] = vec[k]
        basis.append(s)
    return basis


def template_defect(s: np.ndarray, n: int) -> tuple[float, object]:
    """Distance of s from the block template [[Sbar, alpha E], [alpha E, 0]].

    Returns (defect, alpha) with alpha read off the (e_1, e*_1) entry.
    Zero defect for every ad-invariant form; the check is what makes the
    template a theorem here rather than an ansatz.
    """
    m = 2 * n + 1
    alpha = s[0, m]
    exact = is_exact(s)
    eye = feye(m) if exact else np.eye(m)
    cross = s[:m, m:] - alpha * eye
    corner = s[m:, m:]
    if exact:
        cross, corner = to_float(cross), to_float(corner)
    defect = max(float(np.abs(cross).max()), float(np.abs(corner).max()))
    return defect, alpha


def random_ad_invariant(g: LieAlgebra, rng: np.random.Generator,
                        exact: bool = True, degenerate_ok: bool = False) -> np.ndarray:
    """Random integer combination of the solution basis; resamples until alpha != 0."""
    basis = ad_invariant_solution_space(g)
    d = g.dim
    m = 2 * g.n + 1
    for _ in range(64):
        coeffs = rng.integers(-4, 5, size=len(basis))
        s = fzeros((d, d))
        for c, b in zip(coeffs, basis):
            if c:
                s = s + fr(int(c)) * b
        if degenerate_ok or s[0, m] != 0:
            return s if exact else to_float(s)
    raise RuntimeError("failed to draw a nondegenerate ad-invariant form")


@dataclass(frozen=True)
class NormalizedAdInvariant:
    """Witness that an ad-invariant metric is the pairing up to automorphism."""

    automorphism: Automorphism
    alpha: object
    residual: float


def normalize_ad_invariant(s: np.ndarray, g: LieAlgebra, tol: float = 1e-12) -> NormalizedAdInvariant:
    """Automorphism F with F^T s F equal to the duality pairing.

    Writing s = [[Sbar, alpha E], [alpha E, 0]], the blocks

        Fbar1 = E, u1 = v1 = 0, f1 = 1/alpha, F3 = -Sbar F1 / (2 alpha)

    do it: the F3 term cancels Sbar against the cross pairing, and the
    induced F4 = diag(E/alpha, 1) rescales the cross block to E.  Exact
    input gives residual exactly zero.

    Raises
    ------
    ValueError
        If s is not ad-invariant or is degenerate (alpha = 0).
    """
    n = g.n
    m = 2 * n + 1
    exact = is_exact(s)
    if not is_ad_invariant(g, s, tol=tol):
        raise ValueError("matrix is not ad-invariant")
    defect, alpha = template_defect(s, n)
    scale = 1.0 if exact else max(1.0, float(np.abs(to_float(s)).max()))
    if defect > (0 if exact else tol * scale):
        raise ValueError("matrix is ad-invariant but off-template; this cannot happen")
    if alpha == 0:
        raise ValueError("degenerate form: alpha = 0")

    zeros = fzeros if exact else np.zeros
    one = fr(1) if exact else 1.0
    f1 = one / alpha
    f1_block = (feye(m) if exact else np.eye(m)).copy()
    f1_block[m - 1, m - 1] = f1
    sbar = s[:m, :m]
    f3 = -(one / (2 * alpha)) * (sbar @ f1_block)
    params = AutParams(
        Fbar1=feye(2 * n) if exact else np.eye(2 * n),
        u1=zeros(2 * n),
        v1=zeros(2 * n),
        f1=f1,
        F3=f3,
    )
    aut = assemble(params, g, tol=tol)
    p = pairing_metric(n, exact=exact)
    resid = aut.matrix.T @ s @ aut.matrix - p
    residual = float(np.abs(to_float(resid) if exact else resid).max())
    if residual > (0 if exact else tol * scale):
        raise ValueError(f"normalization residual {residual} out of tolerance")
    return NormalizedAdInvariant(automorphism=aut, alpha=alpha, residual=residual)


def certify_flat(s: np.ndarray, g: LieAlgebra, tol: float = 1e-12) -> dict:
    """Check nabla = ad/2 and R = 0 for an ad-invariant metric.

    Runs the generic Koszul/curvature pipeline, not the bi-invariant
    shortcut, and reports both defects.  Exact input certifies exactly.
    """
    exact = is_exact(s)
    gamma = levi_civita(g, s)
    d = g.dim
    worst = 0.0
    for i in range(d):
        half_ad = (Fraction(1, 2) if exact else 0.5) * g.ad_basis(i, exact=exact)
        diff = gamma[i] - half_ad.T
        if exact:
            diff = to_float(diff)
        worst = max(worst, float(np.abs(diff).max()))
    riem = riemann(g, gamma)
    rmax = float(np.abs(to_float(riem) if exact else riem).max())
    return {
        "half_ad_defect": worst,
        "riemann_max": rmax,
        "flat": is_flat(riem, tol=0.0 if exact else tol),
    }
