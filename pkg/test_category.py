import random

import pytest

from operads.category import (
    Flavor,
    GMorphism,
    associator,
    compose,
    compose_all,
    disjoint_union,
    glue,
    identity,
    in_flavor,
    inverse,
    is_invertible,
    make_object,
    morphism_from_json,
    morphism_to_json,
    relabeling,
    symmetry,
    tensor,
    tensor_objects,
    validate_morphism,
)
from operads.corpus import CORPUS_FLAVORS, check_category_laws, composable_pairs, corpus_sanity, random_morphism
from operads.errors import DirectionClash, GraphError, MissingDirection, ObjectsMismatch
from operads.graph_core import IN, OUT, component_genus, components, corolla, with_involution


def two_corollas():
    return make_object({"u": ["a", "b", "c"], "w": ["d", "e", "f"]}, {"u": 0, "w": 0})


def point(name: str, legs: list):
    return make_object({name: legs}, {name: 0})


def test_gluing_two_corollas_along_one_leg():
    m = glue(two_corollas(), [("c", "d")])
    assert validate_morphism(m) == []
    assert m.target.vertices == ("u",)
    assert m.target.legs == ("a", "b", "e", "f")
    assert m.target.genus == {"u": 0}


def test_closing_a_loop_raises_the_genus():
    m = glue(point("u", ["a", "b", "c"]), [("b", "c")])
    assert m.target.genus == {"u": 1}
    assert m.target.legs == ("a",)


def test_gluing_twice_gives_the_theta_genus():
    first = glue(two_corollas(), [("a", "d")])
    second = glue(first.target, [("b", "e"), ("c", "f")])
    composite = compose(first, second)
    assert validate_morphism(composite) == []
    assert composite.target.genus == {"u": 2}
    assert len(composite.glue.edges) == 3


def test_composition_checks_the_middle_object():
    f = glue(two_corollas(), [("c", "d")])
    with pytest.raises(ObjectsMismatch, match="objects mismatch"):
        compose(f, identity(two_corollas()))


def test_gluing_two_out_legs_is_a_direction_clash():
    obj = make_object({"u": ["a"], "w": ["b"]}, {"u": 0, "w": 0}, {"a": OUT, "b": OUT})
    with pytest.raises(DirectionClash, match="direction clash"):
        glue(obj, [("a", "b")])


def test_composition_detects_a_direction_clash():
    obj = make_object({"u": ["a"], "w": ["b"]}, {"u": 0, "w": 0}, {"a": OUT, "b": OUT})
    closed = make_object({"u": []}, {"u": 1}, {})
    bad = GMorphism(obj, closed, with_involution(obj, {"a": "b", "b": "a"}), {}, {"u": "u"})
    with pytest.raises(DirectionClash):
        compose(identity(obj), bad)


def test_gluing_a_leg_twice_is_refused():
    with pytest.raises(GraphError):
        glue(point("u", ["a", "b", "c"]), [("a", "b"), ("b", "c")])


def test_relabeling_is_invertible():
    obj = two_corollas()
    m = relabeling(obj, {f: f.upper() for f in obj.flags}, {"u": "U", "w": "W"})
    assert compose(m, inverse(m)) == identity(obj)
    assert compose(inverse(m), m) == identity(m.target)


def test_only_edge_free_morphisms_invert():
    obj = two_corollas()
    assert is_invertible(relabeling(obj, {f: f.upper() for f in obj.flags}))
    assert not is_invertible(glue(obj, [("c", "d")]))
    with pytest.raises(GraphError):
        inverse(glue(two_corollas(), [("c", "d")]))


def test_symmetry_squares_to_the_identity():
    a, b = point("p", ["x"]), point("q", ["y", "z"])
    assert compose(symmetry(a, b), symmetry(b, a)) == identity(symmetry(a, b).source)


def test_hexagon():
    a, b, c = point("p", ["x"]), point("q", ["y", "z"]), point("r", ["t"])
    left = compose_all([associator(a, b, c), symmetry(a, tensor_objects([b, c])),
                        associator(b, c, a)])
    right = compose_all([tensor([symmetry(a, b), identity(c)]), associator(b, a, c),
                         tensor([identity(b), symmetry(a, c)])])
    assert left == right


def test_tensor_is_functorial():
    for (f1, h1), (f2, h2) in zip(composable_pairs(1, Flavor.G, 20), composable_pairs(2, Flavor.G, 20)):
        assert compose(tensor([f1, f2]), tensor([h1, h2])) == tensor([compose(f1, h1), compose(f2, h2)])


def test_mixing_directed_and_undirected_objects_fails():
    directed = make_object({"u": ["a"]}, {"u": 0}, {"a": IN})
    with pytest.raises(GraphError):
        disjoint_union([directed, corolla(0, ["b"])])


def test_forest_flavor_rejects_loops():
    m = glue(point("u", ["a", "b", "c"]), [("b", "c")])
    assert in_flavor(m, Flavor.G)
    assert not in_flavor(m, Flavor.G0)


def test_stable_flavor_rejects_unstable_vertices():
    m = glue(make_object({"u": ["a", "b"], "w": ["c", "d", "e"]}, {"u": 0, "w": 0}), [("a", "c")])
    assert not in_flavor(m, Flavor.G_STABLE)
    assert in_flavor(m, Flavor.G)


def test_prop_flavor_rejects_directed_circuits():
    obj = make_object({"u": ["a", "d"], "w": ["b", "c"]}, {"u": 0, "w": 0},
                      {"a": OUT, "b": IN, "c": OUT, "d": IN})
    assert not in_flavor(glue(obj, [("a", "b"), ("c", "d")]), Flavor.D_P)
    assert in_flavor(glue(obj, [("a", "b")]), Flavor.D_P)


def test_directed_flavors_need_direction_data():
    with pytest.raises(MissingDirection):
        in_flavor(identity(two_corollas()), Flavor.D)


def test_groupoid_flavor_holds_exactly_the_invertible_morphisms():
    obj = two_corollas()
    assert in_flavor(identity(obj), Flavor.H)
    assert not in_flavor(glue(obj, [("c", "d")]), Flavor.H)


def test_morphism_json_round_trip():
    rng = random.Random(9)
    for _ in range(20):
        m = random_morphism(rng, Flavor.D)
        assert morphism_from_json(morphism_to_json(m)) == m


def test_every_composite_conserves_genus():
    for f, h in composable_pairs(4, Flavor.G, 100):
        m = compose(f, h)
        comps = {c.representative: c for c in components(m.glue)}
        for v, rep in m.beta.items():
            assert m.target.genus[v] == component_genus(m.glue, comps[rep])


@pytest.mark.parametrize("flavor", CORPUS_FLAVORS)
def test_corpus_stays_in_flavor(flavor):
    pairs = composable_pairs(0, flavor, 50)
    assert corpus_sanity([m for pair in pairs for m in pair], flavor)


def test_category_laws_on_five_hundred_triples():
    report = check_category_laws(0, Flavor.G, count=500)
    assert report.ok, report.violations[:3]


@pytest.mark.parametrize("flavor", [Flavor.G_STABLE, Flavor.G0, Flavor.D, Flavor.D0, Flavor.D_P])
def test_category_laws_in_each_flavor(flavor):
    report = check_category_laws(0, flavor, count=150)
    assert report.ok, report.violations[:3]
