import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphstar.errors import DimensionMismatchError, GraphFormatError, PreconditionError
from graphstar.graph import Graph, adjacency, bouquet, bouquet_union, classical_automorphisms, from_adjacency, oriented_cycle
from graphstar.magic import MagicUnitary, parse_unitary, rank_one_projection, two_projection_unitary
from graphstar.presentation import (
    classical_wreath_realization,
    emit,
    emit_banica,
    emit_bichon,
    emit_wreath,
    parse_realization,
    verify_magic,
)

SIMPLE = [
    oriented_cycle(3),
    oriented_cycle(4),
    from_adjacency([[0, 1], [1, 0]]),
    from_adjacency([[1, 1], [1, 0]]),
    from_adjacency([[0, 1, 1], [1, 0, 0], [1, 0, 0]]),
    from_adjacency([[0, 1, 1], [1, 0, 1], [1, 1, 0]]),
    from_adjacency([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    from_adjacency([[1, 0], [0, 0]]),
]


def counts(P):
    return P.to_dict()["relation_counts"]


def magic_counts(m):
    """Relation counts of S_m^+ alone."""
    return {"r1_selfadjoint": m * m, "r1_row": m * m * m, "r1_column": m * m * m, "r2_row": m, "r2_column": m}


def nonzero_ud_entries(D) -> int:
    """Entries of UD - DU that are non-zero as formal polynomials in the q's."""
    m = len(D)
    count = 0
    for v, w in itertools.product(range(m), repeat=2):
        coeff = {}
        for x in range(m):
            coeff[(v, x)] = coeff.get((v, x), 0) + D[x][w]
            coeff[(x, w)] = coeff.get((x, w), 0) - D[v][x]
        count += any(c != 0 for c in coeff.values())
    return count


def commutes_with_adjacency(perm, D) -> bool:
    P = np.zeros_like(D)
    P[list(perm), np.arange(len(perm))] = 1
    return (P @ D == D @ P).all()


# -- emitted relations -------------------------------------------------------------


@pytest.mark.parametrize("g", SIMPLE, ids=lambda g: str(adjacency(g).tolist()))
def test_banica_bichon_counts(g):
    m, E = g.n_vertices, g.n_edges
    expected = magic_counts(m)
    expected["UD=DU"] = nonzero_ud_entries(adjacency(g).tolist())
    non_edges = m * m - E
    if E and non_edges:
        expected["r3"] = 4 * E * non_edges
    c = counts(emit_banica(g))
    c.pop("r1_idempotent", None)
    for cls, num in expected.items():
        assert c.get(cls, 0) == num, cls
    assert counts(emit_bichon(g)).get("r4", 0) == E * E


def test_three_gon_r3_and_r4():
    g = oriented_cycle(3)
    ban, bic = emit_banica(g), emit_bichon(g)
    assert counts(ban)["r3"] == 72  # 3 edges x 6 non-edges x 4 forms
    assert counts(bic)["r4"] == 9
    assert set(counts(bic)) == set(counts(ban)) | {"r4"}
    assert len(bic.relations) == len(ban.relations) + 9


def test_edgeless_graph_is_s_m_plus():
    g = Graph.build(["a", "b", "c"], [])
    ban = emit_banica(g)
    c = counts(ban)
    assert "r3" not in c
    assert {k: v for k, v in c.items() if k != "UD=DU"} == {k: v for k, v in magic_counts(3).items() if k in c}
    # UD = DU is vacuous for D = 0: no non-zero polynomial survives
    assert c.get("UD=DU", 0) == 0
    assert emit_bichon(g).to_dict()["relations"] == ban.to_dict()["relations"]


def test_two_vertex_complete_graph_reduces_to_s2_plus():
    g = from_adjacency([[0, 1], [1, 0]])
    ban = emit_banica(g)
    rng = np.random.default_rng(3)
    for theta in rng.uniform(0, np.pi, 5):
        p = rank_one_projection(theta)
        one = np.eye(2)
        U = MagicUnitary(np.array([[p, one - p], [one - p, p]]))
        assert U.magic_residual() <= 1e-12
        res = verify_magic(U, ban)
        assert res["pass"] and res["max_residual"] <= 1e-12


def test_multigraph_refused():
    with pytest.raises(PreconditionError):
        emit_banica(bouquet(2))
    with pytest.raises(PreconditionError):
        emit_bichon(from_adjacency([[0, 2], [1, 0]]))


def test_loop_in_two_vertex_graph_r4():
    g = from_adjacency([[1, 0], [0, 0]])
    bic = emit_bichon(g)
    assert counts(bic)["r4"] == 1
    assert bic.to_dict()["flags"]["has_loops"]


@pytest.mark.parametrize("g", SIMPLE, ids=lambda g: str(adjacency(g).tolist()))
def test_classical_points_match_brute_force(g):
    D = adjacency(g)
    ban, bic = emit_banica(g), emit_bichon(g)
    auts = {a.vertex_perm for a in classical_automorphisms(g)}
    for perm in itertools.permutations(range(g.n_vertices)):
        U = MagicUnitary.from_permutation(perm)
        rb, rc = verify_magic(U, ban), verify_magic(U, bic)
        expected = commutes_with_adjacency(perm, D)
        assert rb["pass"] == expected == (perm in auts)
        assert rc["pass"] == expected
        if expected:
            assert rb["max_residual"] == 0 and rc["max_residual"] == 0
            assert rb["antipode_compatible"]


def test_three_gon_transposition_fails_ud():
    g = oriented_cycle(3)
    res = verify_magic(MagicUnitary.from_permutation([1, 0, 2]), emit_banica(g))
    assert not res["pass"]
    assert res["residuals"]["UD=DU"] >= 1
    assert res["residuals"]["r1_selfadjoint"] == 0


def test_non_magic_realization_fails_s_m_relations():
    g = oriented_cycle(3)
    q = np.full((3, 3), 1 / 3)
    res = verify_magic(MagicUnitary(q), emit_banica(g))
    assert not res["pass"] and res["residuals"]["r1_row"] > 0.1
    with pytest.raises(DimensionMismatchError):
        verify_magic(MagicUnitary.identity(2), emit_banica(g))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SIMPLE), st.floats(0, np.pi), st.floats(0, 1e-3))
def test_bichon_implies_banica(g, theta, noise):
    m = g.n_vertices
    perm = np.random.default_rng(int(theta * 1000)).permutation(m)
    q = MagicUnitary.from_permutation(perm).entries[:, :, 0, 0]
    q = q + noise * np.cos(theta)
    U = MagicUnitary(q)
    if verify_magic(U, emit_bichon(g))["pass"]:
        assert verify_magic(U, emit_banica(g))["pass"]


def test_two_projection_unitary_quantum_point():
    U = two_projection_unitary(np.pi / 5)
    assert U.magic_residual() <= 1e-10
    assert not U.entries_commute()
    p, q = U[0, 0], U[2, 2]
    assert np.linalg.norm(p @ q - q @ p, 2) >= 0.1
    g = from_adjacency([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert verify_magic(U, emit_banica(g))["pass"]
    assert verify_magic(U, emit_bichon(g))["pass"]


def test_presentation_json_shape():
    doc = emit(oriented_cycle(3), "banica").to_dict()
    assert {"label", "generators", "relations", "coproduct", "relation_counts"} <= set(doc)
    assert len(doc["generators"]) == 9
    assert doc["coproduct"]["q[v1][v2]"]
    rel = doc["relations"][0]
    assert {"class", "instance"} <= set(rel)
    with pytest.raises(ValueError):
        emit(oriented_cycle(3), "nope")


# -- wreath presentations ----------------------------------------------------------


def test_wreath_m1_is_s_n_plus():
    P = emit_wreath(bouquet_union(3, 1))
    assert set(P.families) == {"u"}
    assert P.trivial_generators == ["v[1][1]"]
    assert all(r.cls.startswith("copy1:") for r in P.relations)
    assert "wreath_commute" not in P.relation_classes()


def test_wreath_n1_is_s_m_plus():
    P = emit_wreath(bouquet_union(1, 3))
    assert set(P.families) == {"v"}
    assert len(P.trivial_generators) == 3
    assert all(r.cls.startswith("base:") for r in P.relations)


def test_wreath_n2_m2_structure():
    P = emit_wreath(bouquet_union(2, 2))
    classes = P.relation_classes()
    assert any(c.startswith("copy1:") for c in classes) and any(c.startswith("copy2:") for c in classes)
    assert any(c.startswith("base:") for c in classes)
    assert counts(P)["wreath_commute"] == 2 * 2 * 2 * 2
    assert P.families == {"u": 8, "v": 4}


def test_wreath_classical_points():
    g = bouquet_union(2, 2)
    P = emit_wreath(g)
    perms = list(itertools.permutations(range(2)))
    seen = 0
    for s1, s2, pi in itertools.product(perms, perms, perms):
        res = verify_magic(classical_wreath_realization(2, 2, [s1, s2], pi), P)
        assert res["pass"] and res["max_residual"] == 0
        seen += 1
    assert seen == 8


def test_wreath_rejects_non_bouquet_shapes():
    with pytest.raises(PreconditionError):
        emit_wreath(oriented_cycle(3))
    with pytest.raises(PreconditionError):
        emit_wreath(from_adjacency([[2, 0], [0, 1]]))


def test_wreath_broken_realization_fails():
    real = classical_wreath_realization(2, 2, [(0, 1), (1, 0)], (1, 0))
    real["u(1)[1][1]"] = np.array([[0.5]])
    res = verify_magic(real, emit_wreath(bouquet_union(2, 2)))
    assert not res["pass"]
    del real["v[1][2]"]
    with pytest.raises(DimensionMismatchError):
        verify_magic(real, emit_wreath(bouquet_union(2, 2)))


def test_parsers():
    U = parse_unitary([[[1, 0], [0, 0]], [[0, 0], [1, 0]]])
    assert U.dimension == 2 and U.block == 1
    with pytest.raises(DimensionMismatchError):
        parse_unitary([[1, 2], [3, 4]])
    real = parse_realization({"v[1][1]": [[[1, 0]]]})
    assert real["v[1][1]"].shape == (1, 1)
    with pytest.raises(GraphFormatError):
        parse_realization([1, 2])
    with pytest.raises(DimensionMismatchError):
        parse_realization({"v[1][1]": [1, 0]})
