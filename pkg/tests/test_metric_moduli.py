"""Reduction of positive-definite metrics to the diagonal template."""

import numpy as np
import pytest

from heiscot.automorphism import is_automorphism, random_automorphism
from heiscot.lie_core import build_thn
from heiscot.metric_moduli import (
    CanonicalMetric,
    NonPositiveDefinite,
    ToleranceFailure,
    act,
    are_equivalent,
    free_parameter_count,
    random_positive_definite,
    reduce_to_canonical,
    reduce_with_diagnostics,
    split_blocks,
    williamson,
)


@pytest.mark.parametrize("n,count", [(1, 3), (2, 10), (3, 21), (4, 36), (5, 55)])
def test_template_parameter_count(n, count):
    assert free_parameter_count(n) == count


def test_williamson_oracle():
    # diag(4, 9) has symplectic eigenvalue 6 = sqrt(4 * 9), doubled
    m = np.diag([4.0, 9.0])
    f, sigma = williamson(m)
    assert np.allclose(sigma, [6.0])
    assert np.allclose(f.T @ m @ f, 6.0 * np.eye(2), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_williamson_random(rng, n):
    a = rng.normal(size=(2 * n, 2 * n))
    m = a @ a.T + 0.5 * np.eye(2 * n)
    f, sigma = williamson(m)
    target = np.diag(np.concatenate([sigma, sigma]))
    assert np.abs(f.T @ m @ f - target).max() < 1e-9 * max(1.0, np.abs(m).max())
    assert (np.diff(sigma) <= 1e-12).all(), "descending order"


def test_reduction_reaches_template_n1(algebras, rng):
    g = algebras[1]
    for _ in range(20):
        s = random_positive_definite(g, rng)
        r = reduce_with_diagnostics(s, g)
        assert r.residual <= 1e-9 * max(1.0, np.abs(s).max())
        assert is_automorphism(r.automorphism.matrix, g, tol=1e-12)
        assert np.abs(act(r.automorphism, s) - r.reduced).max() < 1e-9 * max(1.0, np.abs(s).max())


@pytest.mark.parametrize("n", [2, 3])
def test_center_pairing_obstruction(algebras, rng, n):
    """The t4 block is invariant under the stabilizer of the earlier steps.

    Generic metrics keep a nonzero t4, the template has no slot for it,
    and reduce_to_canonical reports the failure with the partial result.
    """
    g = algebras[n]
    hit = 0
    for _ in range(10):
        s = random_positive_definite(g, rng)
        r = reduce_with_diagnostics(s, g)
        scale = max(1.0, np.abs(s).max())
        # everything except t4 is reduced
        diff = np.abs(r.reduced - r.canonical.matrix())
        m = 2 * n + 1
        diff[m : m + 2 * n, 4 * n + 1] = 0.0
        diff[4 * n + 1, m : m + 2 * n] = 0.0
        assert diff.max() <= 1e-8 * scale
        if np.abs(r.t4).max() > 1e-6 * scale:
            hit += 1
            with pytest.raises(ToleranceFailure):
                reduce_to_canonical(s, g)
    assert hit >= 8, "t4 should be nonzero for generic draws"


def test_reduce_rejects_asymmetric_and_indefinite(algebras):
    g = algebras[1]
    bad = np.eye(6)
    bad[0, 1] = 0.5
    with pytest.raises(NonPositiveDefinite):
        reduce_with_diagnostics(bad, g)
    with pytest.raises(NonPositiveDefinite):
        reduce_with_diagnostics(-np.eye(6), g)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbit_pairs_equivalent_with_witness(algebras, rng, n):
    g = algebras[n]
    for _ in range(6):
        s = random_positive_definite(g, rng)
        f = random_automorphism(n, g, rng=rng, exact=False)
        moved = act(f, s)
        res = are_equivalent(s, moved, g)
        assert res.verdict == "equivalent"
        w = res.witness
        assert is_automorphism(w.matrix, g, tol=1e-8)
        assert np.abs(act(w, s) - moved).max() <= 1e-5 * max(1.0, np.abs(moved).max())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sigma_multiset_invariant(algebras, rng, n):
    g = algebras[n]
    for _ in range(5):
        s = random_positive_definite(g, rng)
        f = random_automorphism(n, g, rng=rng, exact=False)
        r1 = reduce_with_diagnostics(s, g)
        r2 = reduce_with_diagnostics(act(f, s), g)
        assert np.abs(np.array(r1.sigma) - np.array(r2.sigma)).max() <= 1e-6 * max(1.0, max(r1.sigma))


def test_distinct_detected(algebras):
    g = algebras[2]
    c1 = CanonicalMetric(sigma=(2.0, 1.0), S4bar=np.eye(4), omega4=1.0)
    c2 = CanonicalMetric(sigma=(3.0, 1.0), S4bar=np.eye(4), omega4=1.0)
    assert are_equivalent(c1.matrix(), c2.matrix(), g).verdict == "distinct"


def test_distinct_detected_n1_template_data(algebras):
    # sigma is trivial at n = 1; the dual diagonal multiset separates
    g = algebras[1]
    c1 = CanonicalMetric(sigma=(1.0,), S4bar=np.eye(2), omega4=1.0)
    c2 = CanonicalMetric(sigma=(1.0,), S4bar=2.0 * np.eye(2), omega4=1.0)
    assert are_equivalent(c1.matrix(), c2.matrix(), g).verdict == "distinct"


def test_center_slot_flips_identify_permuted_templates(algebras):
    """At n = 1 the values (s1, s2, w4) are only defined as a multiset."""
    g = algebras[1]
    c1 = CanonicalMetric(sigma=(1.0,), S4bar=np.diag([2.0, 3.0]), omega4=5.0)
    c2 = CanonicalMetric(sigma=(1.0,), S4bar=np.diag([5.0, 2.0]), omega4=3.0)
    res = are_equivalent(c1.matrix(), c2.matrix(), g)
    assert res.verdict == "equivalent"
    assert np.abs(act(res.witness, c1.matrix()) - c2.matrix()).max() < 1e-9


def test_repeated_sigma_inconclusive(algebras):
    g = algebras[2]
    rep = (1.0, 1.0)
    base = CanonicalMetric(sigma=rep, S4bar=np.eye(4), omega4=1.0)
    other_s4 = np.eye(4)
    other_s4[0, 1] = other_s4[1, 0] = 0.4
    other = CanonicalMetric(sigma=rep, S4bar=other_s4, omega4=1.0)
    res = are_equivalent(base.matrix(), other.matrix(), g)
    assert res.verdict == "inconclusive"


def test_split_blocks_shapes(algebras):
    g = algebras[2]
    s = np.arange(100.0).reshape(10, 10)
    s = s + s.T
    s1b, t1, om1, s4b, t4, om4, s2 = split_blocks(s, 2)
    assert s1b.shape == (4, 4) and s4b.shape == (4, 4)
    assert t1.shape == (4,) and t4.shape == (4,)
    assert s2.shape == (5, 5)
    assert om1 == s[4, 4] and om4 == s[9, 9]
