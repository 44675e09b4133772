import pytest

from surfaceflow.errors import PreconditionError, StructuralError
from surfaceflow.surface import (EmbeddedGraph, add_chord, canonical_form,
                                 cut_along, disjointify, expand_edge,
                                 maps_isomorphic, split_vertex)

from conftest import (darts_for_route, map_from_drawing, planar_grid_map,
                      torus_bouquet, torus_grid_map, triangle_map)


class TestConstruction:
    def test_triangle(self):
        g = triangle_map()
        assert len(g.faces) == 2
        assert g.genus == 0
        # every dart in exactly one face
        assert sorted(d for f in g.faces for d in f) == list(range(6))

    def test_torus_bouquet(self):
        g = torus_bouquet()
        assert len(g.faces) == 1
        assert g.genus == 1

    def test_torus_grid(self):
        g = torus_grid_map(3, 4)
        assert g.n == 12 and len(g.edges) == 24
        assert len(g.faces) == 12
        assert g.genus == 1

    def test_planar_grid(self):
        g = planar_grid_map(3, 3)
        assert g.genus == 0
        assert len(g.faces) == 5  # 4 squares + outer face

    def test_dart_listed_twice(self):
        with pytest.raises(StructuralError):
            EmbeddedGraph(3, [(0, 1), (1, 2), (2, 0)],
                          [[0, 5, 0], [2, 1], [4, 3]])

    def test_dart_at_wrong_vertex(self):
        with pytest.raises(StructuralError):
            EmbeddedGraph(3, [(0, 1), (1, 2), (2, 0)],
                          [[0, 5], [1, 2], [3, 4]][::-1])

    def test_missing_dart(self):
        with pytest.raises(StructuralError):
            EmbeddedGraph(3, [(0, 1), (1, 2), (2, 0)],
                          [[0], [2, 1], [4, 3]])

    def test_disconnected(self):
        with pytest.raises(StructuralError):
            EmbeddedGraph(4, [(0, 1), (2, 3)], [[0], [1], [2], [3]])


class TestDual:
    @pytest.mark.parametrize("builder", [triangle_map, torus_bouquet,
                                         lambda: torus_grid_map(3, 3),
                                         lambda: planar_grid_map(3, 4)])
    def test_genus_preserved(self, builder):
        g = builder()
        d = g.dual()
        assert d.genus == g.genus
        assert len(d.edges) == len(g.edges)
        assert d.n == len(g.faces)
        assert len(d.faces) == g.n

    @pytest.mark.parametrize("builder", [triangle_map, torus_bouquet,
                                         lambda: torus_grid_map(3, 3),
                                         lambda: planar_grid_map(2, 3)])
    def test_double_dual_isomorphic(self, builder):
        g = builder()
        dd = g.dual().dual()
        assert maps_isomorphic(g, dd)

    def test_triangle_dual_shape(self):
        d = triangle_map().dual()
        assert d.n == 2
        assert all(set(e) == {0, 1} for e in d.edges)


class TestCanonicalForm:
    def test_relabelled_torus(self):
        g = torus_grid_map(2, 3)
        # relabel vertices by a rotation of the grid; same map
        perm = [(v + 3) % 6 for v in range(6)]
        edges = [(perm[u], perm[v]) for u, v in g.edges]
        rotation = [None] * 6
        for v in range(6):
            rotation[perm[v]] = list(g.rotation[v])
        h = EmbeddedGraph(6, edges, rotation)
        assert maps_isomorphic(g, h)

    def test_different_maps_differ(self):
        assert canonical_form(triangle_map()) != canonical_form(torus_bouquet())


def meridian(g, p, q, col):
    """Vertical cycle of a p x q torus grid through column ``col``."""
    darts = []
    for i in range(p):
        e = p * q + i * q + col  # down edge (i, col)
        darts.append(2 * e)
    return darts


class TestCutAlong:
    def test_torus_meridian_is_annulus(self):
        g = torus_grid_map(3, 3)
        cut = cut_along(g, [meridian(g, 3, 3, 0)])
        assert len(cut.components) == 1
        comp = cut.components[0]
        assert comp.chi == 0 and len(comp.boundary) == 2
        assert comp.is_annulus

    def test_two_meridians_two_annuli(self):
        g = torus_grid_map(3, 3)
        cut = cut_along(g, [meridian(g, 3, 3, 0), meridian(g, 3, 3, 1)])
        assert len(cut.components) == 2
        assert all(c.is_annulus for c in cut.components)
        # each component sees one side of each cycle
        for comp in cut.components:
            assert comp.boundary_cycles == {0, 1}

    def test_separating_triangle_gives_disks(self):
        g = triangle_map()
        cut = cut_along(g, [[0, 2, 4]])
        assert len(cut.components) == 2
        assert all(c.is_disk for c in cut.components)

    def test_grid_face_cycle(self):
        g = planar_grid_map(3, 3)
        # cycle around the top-left unit square: vertices 0,1,4,3
        route = _square_cycle(g)
        cut = cut_along(g, [route])
        assert len(cut.components) == 2
        chis = sorted(c.chi for c in cut.components)
        assert sum(chis) == 2
        assert all(c.is_disk for c in cut.components)

    def test_euler_sum_invariant(self):
        g = torus_grid_map(4, 4)
        cut = cut_along(g, [meridian(g, 4, 4, 0), meridian(g, 4, 4, 2)])
        assert sum(c.chi for c in cut.components) == 2 - 2 * g.genus

    def test_rejects_sharing_cycles(self):
        g = torus_grid_map(3, 3)
        with pytest.raises(PreconditionError):
            cut_along(g, [meridian(g, 3, 3, 0), meridian(g, 3, 3, 0)])


def _square_cycle(g):
    """Dart cycle 0 -> 1 -> 4 -> 3 -> 0 in a 3x3 planar grid."""
    want = [(0, 1), (1, 4), (4, 3), (3, 0)]
    darts = []
    for u, v in want:
        for e, (a, b) in enumerate(g.edges):
            if (a, b) == (u, v):
                darts.append(2 * e)
                break
            if (b, a) == (u, v):
                darts.append(2 * e + 1)
                break
    assert len(darts) == 4
    return darts


class TestSurgery:
    def test_split_vertex_preserves_genus(self):
        g = torus_grid_map(3, 3)
        rot = g.rotation[4]
        h = split_vertex(g, 4, list(rot[1:3]))
        assert h.n == g.n + 1
        assert len(h.edges) == len(g.edges) + 1
        assert h.genus == g.genus
        assert h.degree(4) == 3 and h.degree(g.n) == 3

    def test_split_vertex_rejects_bad_arc(self):
        g = torus_grid_map(3, 3)
        rot = g.rotation[4]
        with pytest.raises(PreconditionError):
            split_vertex(g, 4, [rot[0], rot[2]])
        with pytest.raises(PreconditionError):
            split_vertex(g, 4, list(rot))

    def test_expand_edge(self):
        g = triangle_map()
        h, ids = expand_edge(g, 0, 3)
        assert ids == [0, 3, 4]
        assert h.genus == 0
        assert len(h.faces) == len(g.faces) + 2
        assert all(h.edges[e] == g.edges[0] for e in ids)

    def test_expand_loop(self):
        g = torus_bouquet()
        h, ids = expand_edge(g, 0, 2)
        assert h.genus == 1
        assert len(h.edges) == 3

    def test_add_chord(self):
        g = triangle_map()
        face = g.faces[0]
        h, e = add_chord(g, face[0], face[1])
        assert h.genus == 0
        assert len(h.edges) == 4
        assert len(h.faces) == 3

    def test_add_chord_rejects_cross_face(self):
        g = triangle_map()
        f0, f1 = g.faces
        with pytest.raises(PreconditionError):
            add_chord(g, f0[0], f1[0])


class TestDisjointify:
    def test_already_disjoint(self):
        g = torus_grid_map(3, 3)
        cycles = [meridian(g, 3, 3, 0), meridian(g, 3, 3, 2)]
        h, new = disjointify(g, cycles)
        assert [tuple(c) for c in cycles] == [tuple(c) for c in new]
        assert h.genus == g.genus

    def test_identical_cycles_become_parallel(self):
        g = torus_grid_map(3, 3)
        mer = meridian(g, 3, 3, 0)
        h, new = disjointify(g, [mer, mer])
        assert h.genus == 1
        _assert_vertex_disjoint(h, new)
        cut = cut_along(h, new)
        assert all(c.is_annulus for c in cut.components)

    def test_shared_edge_on_grid(self):
        g = planar_grid_map(3, 3)
        # two unit-square cycles sharing the edge 1-4
        c1 = _route_darts(g, [0, 1, 4, 3])
        c2 = _route_darts(g, [1, 2, 5, 4])
        big = _route_darts(g, [0, 1, 2, 5, 8, 7, 6, 3])
        h, new = disjointify(g, [c1, big])
        assert h.genus == 0
        _assert_vertex_disjoint(h, new)

    def test_shared_path_cycles(self):
        g = planar_grid_map(3, 3)
        # outer boundary and a 2x1 block share the path 0-1-2
        outer = _route_darts(g, [0, 1, 2, 5, 8, 7, 6, 3])
        block = _route_darts(g, [0, 1, 2, 5, 4, 3])
        h, new = disjointify(g, [outer, block])
        assert h.genus == 0
        _assert_vertex_disjoint(h, new)

    def test_three_nested(self):
        g = planar_grid_map(4, 4)
        outer = _route_darts(g, [0, 1, 2, 3, 7, 11, 15, 14, 13, 12, 8, 4])
        mid = _route_darts(g, [0, 1, 2, 3, 7, 11, 15, 14, 13, 9, 5, 4])
        inner = _route_darts(g, [0, 1, 2, 6, 10, 9, 5, 4])
        h, new = disjointify(g, [outer, mid, inner])
        assert h.genus == 0
        _assert_vertex_disjoint(h, new)

    def test_rejects_crossing(self):
        g = torus_grid_map(3, 3)
        mer = meridian(g, 3, 3, 0)
        # horizontal cycle through row 0 crosses the meridian once
        horiz = [2 * (0 * 3 + j) for j in range(3)]
        with pytest.raises(PreconditionError):
            disjointify(g, [mer, horiz])


def _route_darts(g, route):
    darts = []
    k = len(route)
    for i in range(k):
        u, v = route[i], route[(i + 1) % k]
        for e, (a, b) in enumerate(g.edges):
            if (a, b) == (u, v):
                darts.append(2 * e)
                break
            if (b, a) == (u, v):
                darts.append(2 * e + 1)
                break
        else:
            raise AssertionError("no edge %s-%s" % (u, v))
    return darts


def _assert_vertex_disjoint(g, cycles):
    seen = set()
    for c in cycles:
        verts = {g.head(d) for d in c}
        assert len(verts) == len(c)
        assert not (verts & seen)
        seen |= verts
