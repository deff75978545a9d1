import pytest

from operads.errors import GraphError, MissingDirection, SchemaError
from operads.graph_core import (
    IN,
    OUT,
    DualGraph,
    checked,
    component_genus,
    component_of,
    components,
    corolla,
    edges,
    graph_from_json,
    graph_to_json,
    has_directed_circuit,
    is_connected,
    is_forest,
    is_stable,
    legs,
    sort_ids,
    validate,
)


def build(at: dict, pairs=(), genus=None, direction=None) -> DualGraph:
    """Graph from {vertex: [flags]} with `pairs` glued into edges."""
    flags = [f for fs in at.values() for f in fs]
    involution = {f: f for f in flags}
    for a, b in pairs:
        involution[a], involution[b] = b, a
    return DualGraph(
        flags=tuple(flags),
        vertices=tuple(at),
        incidence={f: v for v, fs in at.items() for f in fs},
        involution=involution,
        genus=genus or {v: 0 for v in at},
        direction=direction,
    )


def theta() -> DualGraph:
    return build({"u": ["a", "b", "c"], "w": ["d", "e", "f"]}, [("a", "d"), ("b", "e"), ("c", "f")])


def test_natural_order_puts_f2_before_f10():
    assert sort_ids(["f10", "f2", "f1", "g"]) == ("f1", "f2", "f10", "g")


def test_corolla_has_only_legs():
    c = corolla(1, ["x", "y"])
    assert c.legs == ("x", "y")
    assert c.edges == ()
    assert c.valence("v0") == 2
    assert validate(c) == []


def test_theta_graph_has_genus_two():
    g = theta()
    comp, = components(g)
    assert comp.edge_count == 3
    assert comp.euler_characteristic == -1
    assert component_genus(g, comp) == 2
    assert g.legs == ()


def test_edges_pair_up_flags_and_legs_stay_fixed():
    g = build({"u": ["a", "b", "c", "x"], "w": ["d", "e", "f"]}, [("d", "a"), ("b", "e"), ("c", "f")])
    assert edges(g) == (("a", "d"), ("b", "e"), ("c", "f"))
    assert legs(g) == ("x",)


def test_loop_adds_one_to_vertex_genus():
    g = build({"u": ["a", "b", "c"]}, [("b", "c")], genus={"u": 2})
    assert component_genus(g, components(g)[0]) == 3


def test_components_are_ordered_by_representative():
    g = build({"v10": ["a"], "v2": ["b"], "v1": ["c", "d"]}, [("a", "c")])
    reps = [c.representative for c in components(g)]
    assert reps == ["v1", "v2"]
    assert component_of(g, "v10").vertices == ("v1", "v10")
    assert not is_connected(g)


@pytest.mark.parametrize("genus,valence,stable", [
    (0, 3, True),
    (0, 2, False),
    (1, 1, True),
    (1, 0, False),
    (2, 0, True),
])
def test_stability_of_a_single_vertex(genus, valence, stable):
    assert is_stable(corolla(genus, [f"l{i}" for i in range(valence)])) is stable


def test_forest_detection():
    tree = build({"u": ["a", "b"], "w": ["c"]}, [("a", "c")])
    assert is_forest(tree)
    assert not is_forest(theta())


def test_validate_reports_a_broken_involution():
    g = DualGraph(("a", "b"), ("u",), {"a": "u", "b": "u"}, {"a": "b", "b": "b"}, {"u": 0})
    assert "involution not self-inverse at a" in validate(g)
    with pytest.raises(GraphError):
        checked(g)


def test_validate_reports_missing_incidence_and_genus():
    g = DualGraph(("a",), ("u",), {}, {"a": "a"}, {})
    problems = validate(g)
    assert "flag a has no incidence" in problems
    assert "vertex u has no genus" in problems


def test_directed_edge_needs_one_flag_of_each_direction():
    g = build({"u": ["a"], "w": ["b"]}, [("a", "b")], direction={"a": OUT, "b": OUT})
    assert any("lacks in-flag" in p for p in validate(g))


def test_local_flag_order_puts_out_flags_first():
    g = build({"u": ["a", "b", "c"]}, direction={"a": IN, "b": OUT, "c": IN})
    assert g.flags_at("u") == ("b", "a", "c")


def test_legs_by_direction():
    g = build({"u": ["a", "b"]}, direction={"a": IN, "b": OUT})
    assert legs(g, OUT) == ("b",)
    assert legs(g, IN) == ("a",)
    with pytest.raises(MissingDirection):
        legs(build({"u": ["a"]}), OUT)


def test_opposite_edges_make_a_directed_circuit():
    at = {"u": ["a", "d"], "w": ["b", "c"]}
    circuit = build(at, [("a", "b"), ("c", "d")], direction={"a": OUT, "b": IN, "c": OUT, "d": IN})
    parallel = build(at, [("a", "b"), ("c", "d")], direction={"a": OUT, "b": IN, "c": IN, "d": OUT})
    assert has_directed_circuit(circuit)
    assert not has_directed_circuit(parallel)


def test_directed_loop_is_a_circuit():
    g = build({"u": ["a", "b"]}, [("a", "b")], direction={"a": OUT, "b": IN})
    assert has_directed_circuit(g)


def test_circuit_search_needs_direction_data():
    with pytest.raises(MissingDirection):
        has_directed_circuit(theta())


def test_json_round_trip():
    g = build({"u": ["a", "b"], "w": ["c"]}, [("a", "c")], direction={"a": OUT, "b": IN, "c": IN})
    assert graph_from_json(graph_to_json(g)) == g


@pytest.mark.parametrize("patch,path", [
    ({"colour": {}}, "/colour"),
    ({"genus": {"u": -1}}, "/genus/u"),
    ({"involution": {"zz": "zz"}}, "/involution/zz"),
    ({"direction": {"a": "sideways"}}, "/direction/a"),
])
def test_schema_errors_point_at_the_offending_value(patch, path):
    data = graph_to_json(corolla(0, ["a", "b", "c"], vertex="u"))
    data.update(patch)
    with pytest.raises(SchemaError) as info:
        graph_from_json(data)
    assert info.value.path == path


def test_missing_key_is_reported():
    data = graph_to_json(corolla(0, ["a"]))
    del data["genus"]
    with pytest.raises(SchemaError, match="missing key"):
        graph_from_json(data)
