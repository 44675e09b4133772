import json

import pytest

from surfaceflow.errors import InstanceFormatError
from surfaceflow.instances import (DEMAND, SUPPLY, Instance,
                                   generate_gap_family,
                                   generate_planar_random,
                                   generate_torus_grid, parse_instance,
                                   serialize_instance)

from conftest import triangle_map


def small_instance_doc():
    return {
        "vertices": 3,
        "edges": [
            {"id": 0, "u": 0, "v": 1, "kind": "supply", "cap": 2},
            {"id": 1, "u": 1, "v": 2, "kind": "supply", "cap": 1},
            {"id": 2, "u": 2, "v": 0, "kind": "demand", "cap": 1},
        ],
        "rotation": [[0, 5], [2, 1], [4, 3]],
    }


class TestParse:
    def test_round_trip(self):
        doc = small_instance_doc()
        inst = parse_instance(json.dumps(doc))
        assert inst.graph.n == 3
        assert inst.demand_edges == (2,)
        assert inst.caps == (2, 1, 1)
        again = parse_instance(serialize_instance(inst))
        assert serialize_instance(again) == serialize_instance(inst)

    def test_missing_field(self):
        doc = small_instance_doc()
        del doc["rotation"]
        with pytest.raises(InstanceFormatError) as ei:
            parse_instance(doc)
        assert ei.value.code == "schema"

    def test_non_dense_ids(self):
        doc = small_instance_doc()
        doc["edges"][1]["id"] = 7
        with pytest.raises(InstanceFormatError) as ei:
            parse_instance(doc)
        assert ei.value.code == "schema"

    def test_zero_capacity(self):
        doc = small_instance_doc()
        doc["edges"][0]["cap"] = 0
        with pytest.raises(InstanceFormatError) as ei:
            parse_instance(doc)
        assert ei.value.code == "capacity"

    def test_disconnected(self):
        doc = {
            "vertices": 4,
            "edges": [
                {"id": 0, "u": 0, "v": 1, "kind": "supply", "cap": 1},
                {"id": 1, "u": 2, "v": 3, "kind": "demand", "cap": 1},
            ],
            "rotation": [[0], [1], [2], [3]],
        }
        with pytest.raises(InstanceFormatError) as ei:
            parse_instance(doc)
        assert ei.value.code == "disconnected"

    def test_invalid_rotation(self):
        doc = small_instance_doc()
        doc["rotation"] = [[0, 5, 5], [2, 1], [4, 3]]
        with pytest.raises(InstanceFormatError) as ei:
            parse_instance(doc)
        assert ei.value.code == "rotation"

    def test_bad_kind(self):
        doc = small_instance_doc()
        doc["edges"][0]["kind"] = "weird"
        with pytest.raises(InstanceFormatError) as ei:
            parse_instance(doc)
        assert ei.value.code == "schema"


class TestGapFamily:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_structure(self, n):
        inst = generate_gap_family(n)
        g = inst.graph
        assert len(inst.demand_edges) == 2 * n
        assert max(g.degree(v) for v in range(g.n)) <= 3
        assert all(c == 1 for c in inst.caps)
        # every demand joins antipodal terminals via a supply path
        assert g.genus >= n

    def test_deterministic(self):
        a = serialize_instance(generate_gap_family(2))
        b = serialize_instance(generate_gap_family(2))
        assert a == b


class TestTorusGrid:
    def test_explicit_meridian_demand(self):
        inst = generate_torus_grid(3, 3, demands=[(0, 3)])
        assert inst.graph.genus == 1  # chord fits in a face
        assert len(inst.demand_edges) == 1

    def test_random_demands_deterministic(self):
        a = serialize_instance(generate_torus_grid(3, 4, 2, "random", seed=5))
        b = serialize_instance(generate_torus_grid(3, 4, 2, "random", seed=5))
        assert a == b
        c = serialize_instance(generate_torus_grid(3, 4, 2, "random", seed=6))
        assert a != c

    def test_genus_bounded(self):
        for seed in range(5):
            inst = generate_torus_grid(3, 3, 1, seed=seed)
            assert 1 <= inst.graph.genus <= 2


class TestPlanarRandom:
    @pytest.mark.parametrize("seed", range(8))
    def test_always_planar(self, seed):
        inst = generate_planar_random(18, seed=seed)
        assert inst.graph.genus == 0
        assert len(inst.demand_edges) >= 1
        assert all(c >= 1 for c in inst.caps)

    def test_deterministic_bytes(self):
        a = serialize_instance(generate_planar_random(15, seed=3))
        b = serialize_instance(generate_planar_random(15, seed=3))
        assert a == b
