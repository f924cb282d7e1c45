import math

import numpy as np
import pytest
from scipy.sparse.csgraph import connected_components

from monster_lab.detour import (
    DetourCertificate, build_avoidant_path, detour_constant, detour_length_bound, detour_survey,
    find_detour, find_escaping_extensions, sample_admissible_triples, verify_sphere_detours,
)
from monster_lab.expanders import sl2_cayley
from monster_lab.freegroup import free_reduce
from monster_lab.graph import (
    ball, ball_mask, cycle_graph, distances, girth, random_connected_graph, star_graph, subdivide, torus,
)
from monster_lab.labelling import from_geometric, random_labelling, read_vertex_path
from monster_lab.seeding import rng
from oracles import adjacency


class TestFindDetour:
    def test_cycle(self):
        cert = find_detour(cycle_graph(100), 0, 25, 75, radius=10)
        assert cert.length == 50 and 50 in cert.path
        assert cert.validate(cycle_graph(100))

    def test_star(self):
        assert find_detour(star_graph(5), 0, 1, 2, radius=0) is None

    @pytest.mark.parametrize("m,v,w", [(0, 0, 5), (3, 1, 3)])
    def test_center_is_endpoint(self, m, v, w):
        with pytest.raises(ValueError):
            find_detour(cycle_graph(10), m, v, w, radius=1)

    def test_uses_floor_of_lambda_girth(self):
        g = cycle_graph(40)
        cert = find_detour(g, 0, 8, 32, lambda1=0.15)
        assert cert.avoided_radius == 6 and cert.length == 24 and not cert.notes
        # the closed ball of radius floor(0.2 * 40) = 8 swallows both endpoints
        assert find_detour(g, 0, 8, 32, lambda1=0.2) is None

    def test_hypothesis_violations_reported(self):
        cert = find_detour(cycle_graph(40), 0, 15, 25, lambda1=0.1)
        assert cert is not None and len(cert.notes) == 2

    def test_bad_lambda(self):
        with pytest.raises(ValueError):
            find_detour(cycle_graph(40), 0, 8, 32, lambda1=0.5)

    @pytest.mark.parametrize("seed", range(40))
    def test_none_iff_separated(self, seed):
        gen = rng(seed, "detour-graph")
        g = random_connected_graph(14, int(gen.integers(0, 8)), gen)
        m, v, w = (int(x) for x in gen.choice(g.n, 3, replace=False))
        radius = int(gen.integers(0, 3))
        blocked = ball_mask(g, m, radius).astype(bool)
        cert = find_detour(g, m, v, w, radius=radius)
        if blocked[v] or blocked[w]:
            assert cert is None
            return
        keep = ~blocked
        _, comp = connected_components(adjacency(g, keep), directed=False)
        assert (cert is None) == (comp[v] != comp[w])
        if cert is not None:
            assert cert.validate(g)

    def test_validate_catches_bad_certificates(self):
        g = cycle_graph(20)
        assert not DetourCertificate([0, 1, 2], 1, 0, 2).validate(g)
        assert not DetourCertificate([0, 2], 5, 0, 1).validate(g)
        assert not DetourCertificate([3, 4, 5], 10, 1, 2, bound=1.0).validate(g)
        assert DetourCertificate([3, 4, 5], 10, 1, 2, bound=2.0).validate(g)


class TestBound:
    def test_value(self):
        assert detour_constant(2, 1) == pytest.approx(2 * (1 / math.log(2) + 2))
        assert detour_constant(2, 1) == pytest.approx(6.885, abs=1e-3)

    def test_large_h_limit(self):
        gaps = [detour_constant(h, 1.5) - 6 for h in (1e2, 1e10, 1e40)]
        assert gaps == sorted(gaps, reverse=True) and 0 < gaps[-1] < 0.05

    def test_monotone_in_h(self):
        vals = [detour_length_bound(h, 2.0, 1000) for h in (0.01, 0.1, 1, 10)]
        assert vals == sorted(vals, reverse=True)

    def test_rejects(self):
        with pytest.raises(ValueError):
            detour_constant(0, 1)


class TestSurvey:
    def test_sl2_5_subdivided(self):
        g = subdivide(sl2_cayley(5).graph, 3)
        survey = detour_survey(g, 0.1, 0.01, 3.0, 60, seed=2)
        assert survey.violations == 0 and survey.found + survey.separated == 60

    def test_admissible_triples(self):
        g = subdivide(sl2_cayley(5).graph, 3)
        gg = int(girth(g))
        for m, v, w in sample_admissible_triples(g, 0.1, gg, 30, seed=1):
            d = distances(g, m)
            assert v != w and 0.1 * gg <= d[v] <= gg / 4 and 0.1 * gg <= d[w] <= gg / 4


def avoids(g, path, c, radius):
    d = distances(g, c)
    return all(not (0 <= d[x] <= radius) for x in path)


class TestAvoidantPath:
    def test_far_center_gives_geodesic(self):
        g = torus(40)
        res = build_avoidant_path(g, 0, 2, 20 * 40 + 20, R=12, eps=0.25)
        assert res.status == "geodesic" and res.length == 2
        assert avoids(g, res.path, 20 * 40 + 20, res.r // 2 - 2)

    def test_same_point(self):
        res = build_avoidant_path(torus(20), 7, 7, 0, R=8, eps=0.25)
        assert res.path == [7] and res.length == 0

    def test_boundary_failure(self):
        res = build_avoidant_path(torus(20), 1, 2, 0, R=8, eps=0.25, trusted=(0, 4))
        assert res.status == "boundary-failure" and res.path is None

    def test_rejects_small_eps_r(self):
        with pytest.raises(ValueError):
            build_avoidant_path(torus(10), 0, 1, 2, R=3, eps=0.25)

    @pytest.mark.parametrize("R", [4, 8])
    def test_torus60_exhaustive(self, R):
        g, eps = torus(60), 0.25
        hyp = verify_sphere_detours(g, eps, R, centers=[0])
        assert hyp.verified
        a = 0
        near = [b for b, d in ball(g, a, math.floor(eps * R)).items()]
        worst = 0
        for c in ball(g, a, R):
            for b in near:
                res = build_avoidant_path(g, a, b, c, R, eps, L=hyp.L)
                assert res.status in ("geodesic", "constructed")
                assert res.path[0] == a and res.path[-1] == b and g.is_path(res.path)
                assert avoids(g, res.path, c, res.r // 2 - 2)
                assert res.length <= res.bound
                worst = max(worst, res.length)
        assert worst <= (hyp.L + 4) * R + 1


class TestEscapingExtensions:
    def cycle_lab(self, letters):
        g = cycle_graph(len(letters))
        return g, from_geometric(g, 2, letters)

    def test_monotone_labels_escape(self):
        g, lab = self.cycle_lab([1] * 40)
        res = find_escaping_extensions(g, lab, 0, 5, 8, eps=0.125, phi=1)
        assert res.status == "escaped"
        q1, q2 = res.extensions
        assert q1[0] == 5 and q2[0] == 8 and len(q1) - 1 == 15 and len(q2) - 1 == 12

    def test_cancelling_labels_fail(self):
        g, lab = self.cycle_lab([1] * 5 + [-1] * 30 + [1] * 5)
        res = find_escaping_extensions(g, lab, 0, 5, 5, eps=0.125, phi=1)
        assert res.status == "none-found"

    def test_nongeodesic_label(self):
        g, lab = self.cycle_lab([1, -1] + [1] * 38)
        res = find_escaping_extensions(g, lab, 0, 5, 6, eps=0.125, phi=1)
        assert res.status == "nongeodesic-label" and res.nongeodesic_index == 0
        assert free_reduce(res.nongeodesic_label) != res.nongeodesic_label

    @pytest.mark.parametrize("v1,v2", [(2, 5), (5, 11), (7, 6)])
    def test_hypotheses_checked(self, v1, v2):
        g, lab = self.cycle_lab([1] * 40)
        with pytest.raises(ValueError):
            find_escaping_extensions(g, lab, 0, v1, v2, eps=0.125, phi=1)

    def test_sl2_11_dichotomy(self):
        # one of the two alternatives must hold; record how often none does
        g = subdivide(sl2_cayley(11).graph, 5)
        gg = int(girth(g))
        statuses = []
        for seed in range(100):
            lab = random_labelling(g, 2, seed)
            gen = rng(seed, "escape-pick")
            m = int(gen.integers(g.n))
            d = distances(g, m)
            ring = np.flatnonzero((d >= math.ceil(gg / 8)) & (d <= gg // 4))
            v1, v2 = sorted((int(x) for x in gen.choice(ring, 2)), key=lambda x: d[x])
            statuses.append(find_escaping_extensions(g, lab, m, v1, v2, eps=0.125, phi=1, girth=gg).status)
        assert statuses.count("none-found") <= 5

    def test_sl2_11_reduced_branches_escape(self):
        # repair the labels on the two tree paths so the first alternative fails
        g = subdivide(sl2_cayley(11).graph, 5)
        gg = int(girth(g))
        escaped = 0
        for seed in range(100):
            gen = rng(seed, "escape-branch")
            m = int(gen.integers(g.n))
            d = distances(g, m)
            v1 = int(gen.choice(np.flatnonzero(d == gg // 8 + 2)))
            v2 = int(gen.choice(np.flatnonzero(d == gg // 4)))
            geo = random_labelling(g, 2, seed).labels[0::2].copy()
            for v in (v1, v2):
                prev = None
                for a, b in zip(_tree_path(g, m, v), _tree_path(g, m, v)[1:]):
                    e = g.edge_between(a, b)
                    sign = 1 if e % 2 == 0 else -1
                    if prev is not None and sign * geo[e >> 1] == -prev:
                        geo[e >> 1] = sign * int(gen.choice([x for x in (1, 2, -1, -2) if x != -prev]))
                    prev = sign * int(geo[e >> 1])
            lab = from_geometric(g, 2, geo)
            res = find_escaping_extensions(g, lab, m, v1, v2, eps=0.125, phi=1, girth=gg)
            assert res.status in ("escaped", "none-found")
            if res.status != "escaped":
                continue
            escaped += 1
            for v, q in zip((v1, v2), res.extensions):
                assert distances(g, v)[q[-1]] == len(q) - 1 == gg // 2 - d[v]
                stack = list(free_reduce(read_vertex_path(lab, _tree_path(g, m, v))))
                for a, b in zip(q, q[1:]):
                    stack = list(free_reduce(stack + list(read_vertex_path(lab, [a, b]))))
                    assert len(stack) > res.forbidden_radius
        assert escaped >= 90


def _tree_path(g, m, v):
    d = distances(g, m)
    path = [v]
    while path[-1] != m:
        x = path[-1]
        path.append(next(y for y in g.neighbors(x).tolist() if d[y] == d[x] - 1))
    return path[::-1]
