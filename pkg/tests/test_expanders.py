import itertools

import numpy as np
import pytest

from monster_lab.expanders import (
    ExpanderFamilySpec, generators, is_prime, mat_inv, mat_mul, sl2_cayley, validate_family,
)
from monster_lab.graph import cheeger_lower_bound, cycle_graph, diameter, eccentricities, girth, subdivide
from monster_lab.seeding import rng
from oracles import girth_oracle


def sl2_oracle(p):
    return {m for m in itertools.product(range(p), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p == 1}


@pytest.mark.parametrize("p", [3, 5, 7])
def test_vertex_set_is_sl2(p):
    cg = sl2_cayley(p)
    assert set(cg.matrices) == sl2_oracle(p)
    assert cg.graph.n == p * (p * p - 1)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_regular_connected(p):
    g = sl2_cayley(p).graph
    assert g.n == p * (p * p - 1)
    assert g.is_regular() and g.degrees()[0] == 4 and g.is_simple()
    assert diameter(g) < np.inf


def test_edges_are_right_multiplication():
    cg = sl2_cayley(5)
    A, B = generators(5)
    for u, v in cg.graph.edge_list()[:50]:
        assert cg.matrices[v] in (mat_mul(cg.matrices[u], A, 5), mat_mul(cg.matrices[u], B, 5))


def test_a3_has_order_three():
    A, _ = generators(3)
    assert mat_mul(mat_mul(A, A, 3), A, 3) == (1, 0, 0, 1)
    assert girth(sl2_cayley(3).graph) == 3


def test_inverse():
    A, B = generators(7)
    assert mat_mul(A, mat_inv(A, 7), 7) == (1, 0, 0, 1)
    assert mat_mul(mat_inv(B, 7), B, 7) == (1, 0, 0, 1)


def test_girth_p5_matches_oracle():
    g = sl2_cayley(5).graph
    assert girth(g) == girth_oracle(g) == 5


@pytest.mark.parametrize("p", [2, 4, 9, 15, 1])
def test_bad_primes(p):
    with pytest.raises(ValueError):
        sl2_cayley(p)


def test_is_prime():
    assert [q for q in range(20) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_vertex_transitive_spot_check():
    g = sl2_cayley(7).graph
    ecc = eccentricities(g)
    picks = rng(0, "ecc").choice(g.n, size=20, replace=False)
    assert len(set(ecc[picks].tolist())) == 1


class TestValidate:
    def test_cycle_fails_cheeger(self):
        rep = validate_family(ExpanderFamilySpec((3,), degree=3, C=1.0, h=0.5), [cycle_graph(100)])
        assert not rep.passed
        assert not rep.checks[0].cheeger_ok

    def test_family_passes(self):
        spec = ExpanderFamilySpec((3, 5, 7), C=100.0, h=1e-3)
        rep = validate_family(spec, [sl2_cayley(p).graph for p in spec.primes])
        assert rep.passed
        assert all(c.cheeger_kind == "spectral" for c in rep.checks)

    @pytest.mark.parametrize("kwargs", [{"C": 0}, {"h": 0}, {"degree": 2}, {"j": 0}, {"primes": (4,)}, {"primes": ()}])
    def test_bad_spec(self, kwargs):
        with pytest.raises(ValueError):
            ExpanderFamilySpec(**{"primes": (3,), **kwargs})

    def test_empty_graph_list(self):
        with pytest.raises(ValueError):
            validate_family(ExpanderFamilySpec((3,)), [])


def test_subdivided_cheeger_floor():
    # measured, not asserted against a formula: the floor stays positive
    floors = {j: min(cheeger_lower_bound(subdivide(sl2_cayley(p).graph, j)) for p in (3, 5, 7))
              for j in (1, 2, 3)}
    assert all(v > 0 for v in floors.values())
    assert floors[1] > floors[2] > floors[3]
