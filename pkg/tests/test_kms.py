import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphstar.correspondence import EdgeFunction, VertexFunction, path_basis
from graphstar.errors import DimensionMismatchError, PreconditionError
from graphstar.graph import adjacency, bouquet, bouquet_union, classical_automorphisms, from_adjacency, oriented_cycle
from graphstar.kms import kms_eval_tensor, kms_profile, perron, profile_from_vector, trace_eval

from suite import KMS_SUITE, out_regular, small_sinkless_adjacencies


def path_edges(g, mu):
    return [EdgeFunction.delta(g, g.edges[i].id) for i in mu]


# -- perron --------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 5])
def test_perron_bouquet(n):
    res = perron([[n]])
    assert res.rho == n and res.vec.tolist() == [1.0]


def test_perron_three_gon():
    res = perron(adjacency(oriented_cycle(3)))
    assert res.rho == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(res.vec, 1 / 3, atol=1e-12)


def test_perron_nilpotent_absent():
    res = perron([[0, 1], [0, 0]])
    assert res.vec is None and res.reason == "beta undefined (ln 0)"
    prof = kms_profile(from_adjacency([[0, 1], [0, 0]]))
    assert not prof.exists
    with pytest.raises(PreconditionError):
        trace_eval(prof, VertexFunction.ones(prof.graph))


def test_perron_rejects_bad_input():
    with pytest.raises(DimensionMismatchError):
        perron([[1, 2, 3]])
    with pytest.raises(PreconditionError):
        perron([[1, -1], [0, 1]])


def test_perron_golden_ratio():
    phi = (1 + math.sqrt(5)) / 2
    res = perron([[1, 1], [1, 0]])
    assert res.rho == pytest.approx(phi, abs=1e-12)
    # right eigenvector (phi, 1) normalized
    assert np.allclose(res.vec, np.array([phi, 1]) / (phi + 1), atol=1e-10)


@pytest.mark.parametrize("D,exact", [
    ([[1, 0, 0], [0, 1, 0], [1, 2, 1]], [0, 0, 1]),
    ([[1, 0], [1, 1]], [0, 1]),
    ([[1, 1, 0], [0, 1, 1], [0, 0, 1]], [1, 0, 0]),
])
def test_perron_jordan_block_is_exact(D, exact):
    """Defective eigenvalue at ρ: the iterate converges only like 1/k, so
    round-off must not survive where the exact eigenvector vanishes."""
    res = perron(D)
    assert res.rho == pytest.approx(1.0)
    assert np.abs(res.vec - exact).max() <= 1e-12
    assert np.abs(np.array(D) @ res.vec - res.vec).max() <= 1e-12


@pytest.mark.parametrize("D", [
    [[0, 0, 0, 1], [0, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 0]],
    [[0, 0, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 0, 0]],
    [[0, 0, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1]],
])
def test_perron_reducible_with_periodic_part(D):
    """Power iteration stalls (eigenvalue -1 next to a Jordan block at 1);
    the eigenspace LP must still find a vector."""
    res = perron(D)
    assert res.vec is not None and res.method == "eigenspace"
    assert res.vec.min() >= 0 and res.vec.sum() == pytest.approx(1.0)
    assert np.abs(np.array(D) @ res.vec - res.rho * res.vec).max() <= 1e-12


def test_every_sinkless_graph_has_a_state():
    """Perron-Frobenius: a nonnegative matrix always has a nonnegative
    eigenvector at ρ, and ρ >= 1 when every vertex emits."""
    for D in small_sinkless_adjacencies(4, 6):
        res = perron(D)
        assert res.vec is not None, D.tolist()
        assert res.rho >= 1 - 1e-12
        assert res.vec.min() >= 0
        assert np.abs(D @ res.vec - res.rho * res.vec).max() <= 1e-9


def test_perron_source_loop():
    """a -> b with a loop at b.

    ``D μ = μ`` reads ``(μ_b, μ_b) = (μ_a, μ_b)``, so μ_a = μ_b and the
    normalized Perron vector is uniform.  The Cuntz-Krieger relation gives
    the same thing independently: ``φ(p_a) = φ(S_e S_e*) = ρ^{-1} μ_b``
    for the only edge e leaving a.
    """
    g = from_adjacency([[0, 1], [0, 1]])
    prof = kms_profile(g)
    assert prof.rho == pytest.approx(1.0)
    assert np.allclose(prof.mu_array, [0.5, 0.5], atol=1e-12)
    D = np.array([[0, 1], [0, 1]], dtype=float)
    # exact kernel of D - I over the rationals
    sol = [Fraction(1), Fraction(1)]
    assert all(sum(Fraction(int(D[i, j])) * sol[j] for j in range(2)) == sol[i] for i in range(2))
    # (0, 1) breaks the Cuntz-Krieger consistency
    wrong = profile_from_vector(g, [0.0, 1.0], rho=1.0)
    e = [x for x in g.edges if x.src == "v1"][0]
    de = EdgeFunction.delta(g, e.id)
    assert abs(kms_eval_tensor(wrong, [de], [de]) - wrong.mu_array[0]) == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(KMS_SUITE))
def test_perron_invariants(name):
    g = KMS_SUITE[name]
    D = adjacency(g).astype(float)
    prof = kms_profile(g)
    mu = prof.mu_array
    assert np.abs(D @ mu - prof.rho * mu).max() <= 1e-9
    assert (mu >= 0).all() and mu.sum() == pytest.approx(1.0, abs=1e-12)
    assert prof.rho == pytest.approx(np.abs(np.linalg.eigvals(D)).max(), abs=1e-9)
    assert prof.beta == pytest.approx(math.log(prof.rho))


@pytest.mark.parametrize("name", sorted(KMS_SUITE))
def test_perron_automorphism_invariant_when_unique(name):
    g = KMS_SUITE[name]
    D = adjacency(g).astype(float)
    rho = np.abs(np.linalg.eigvals(D)).max()
    if np.linalg.matrix_rank(D - rho * np.eye(len(D)), tol=1e-8) != len(D) - 1:
        pytest.skip("Perron eigenspace is degenerate")
    mu = kms_profile(g).mu_array
    for a in classical_automorphisms(g):
        assert np.allclose(mu[list(a.vertex_perm)], mu, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_perron_random_matrices(D):
    D = np.array(D, dtype=float)
    res = perron(D)
    rho = np.abs(np.linalg.eigvals(D)).max()
    if rho < 1e-9:
        assert res.vec is None
        return
    # a nonnegative matrix always has a nonnegative Perron eigenvector
    assert res.vec is not None
    assert (res.vec >= 0).all() and res.vec.sum() == pytest.approx(1.0)
    assert np.abs(D @ res.vec - res.rho * res.vec).max() <= 1e-8 * max(1, rho)


# -- profiles ------------------------------------------------------------------


@pytest.mark.parametrize("name", [k for k in sorted(KMS_SUITE) if out_regular(KMS_SUITE[k])])
def test_out_regular_distinguished(name):
    g = KMS_SUITE[name]
    prof = kms_profile(g)
    d = int(np.bincount(g.src)[0])
    assert prof.distinguished and prof.rho == pytest.approx(d)
    assert (prof.mu_array == 1.0 / g.n_vertices).all()


@pytest.mark.parametrize("n,m", [(1, 3), (2, 2), (3, 4)])
def test_bouquet_union_profile(n, m):
    prof = kms_profile(bouquet_union(n, m))
    assert prof.rho == n and prof.distinguished
    assert np.allclose(prof.mu_array, 1 / m)


def test_non_regular_not_distinguished():
    assert not kms_profile(KMS_SUITE["golden"]).distinguished
    assert not kms_profile(KMS_SUITE["star3"]).distinguished


def test_beta_zero_kept():
    prof = kms_profile(oriented_cycle(4))
    assert prof.exists and prof.beta == 0.0
    assert prof.to_dict()["beta_positive"] is False


# -- trace and tensor evaluation -----------------------------------------------


def test_trace_examples():
    g = KMS_SUITE["star4"]
    prof = kms_profile(g)
    for i, v in enumerate(g.vertices):
        assert trace_eval(prof, VertexFunction.delta(g, v)) == pytest.approx(prof.mu_array[i])
    assert trace_eval(prof, VertexFunction.ones(g)) == pytest.approx(1.0)
    four = kms_profile(oriented_cycle(4))
    assert all(trace_eval(four, VertexFunction.delta(four.graph, v)) == 0.25 for v in four.graph.vertices)


@settings(max_examples=40)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3))
def test_trace_positive(vals):
    g = KMS_SUITE["star3"]
    prof = kms_profile(g)
    f = VertexFunction(g, vals)
    assert trace_eval(prof, VertexFunction(g, np.abs(f.values) ** 2)).real >= -1e-12


def test_kms_eval_tensor_examples():
    g = bouquet(2)
    prof = kms_profile(g)
    e1, e2 = EdgeFunction.delta(g, "e1"), EdgeFunction.delta(g, "e2")
    assert kms_eval_tensor(prof, [e1], [e1]) == pytest.approx(0.5)
    assert kms_eval_tensor(prof, [e1], [e2]) == 0
    assert kms_eval_tensor(prof, [e1, e2], [e1]) == 0
    assert kms_eval_tensor(prof, [], []) == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(KMS_SUITE))
def test_kms_eval_on_basis_paths(name):
    g = KMS_SUITE[name]
    prof = kms_profile(g)
    mu = prof.mu_array
    for m in range(1, 3):
        paths = path_basis(g, m).tolist()
        for a in paths:
            for b in paths:
                expected = prof.rho ** (-m) * mu[g.dst[a[-1]]] if a == b else 0.0
                assert abs(kms_eval_tensor(prof, path_edges(g, a), path_edges(g, b)) - expected) <= 1e-12


@pytest.mark.parametrize("name", sorted(KMS_SUITE))
def test_cuntz_krieger_consistency(name):
    """φ(p_v) = Σ_{s(e)=v} φ(S_e S_e*) at every emitting vertex."""
    g = KMS_SUITE[name]
    prof = kms_profile(g)
    for i, v in enumerate(g.vertices):
        total = sum(
            kms_eval_tensor(prof, [EdgeFunction.delta(g, e.id)], [EdgeFunction.delta(g, e.id)])
            for e in g.edges if e.src == v
        )
        assert abs(total - prof.mu_array[i]) <= 1e-9


def test_profile_json():
    doc = kms_profile(bouquet(2)).to_dict()
    assert doc["rho"] == 2 and doc["beta"] == pytest.approx(math.log(2))
    assert doc["mu"] == {"v": 1.0} and doc["distinguished"] and doc["exists"]
