import itertools
import random

import pytest

from operads import linalg
from operads.category import (
    Flavor,
    GMorphism,
    compose,
    glue,
    identity,
    make_object,
    relabeling,
    symmetry,
    tensor,
)
from operads.corpus import composable_pairs, random_morphism
from operads.endomorphism import (
    BilinearSpace,
    DirectedPair,
    check_operad_morphism,
    end_action,
    end_dir_action,
    end_smodule,
    end_structure,
    end_value,
    hom_dir_action,
    out_slot_duality,
    slot_permutation,
    space_from_json,
)
from operads.errors import DirectionClash, MissingDirection, SchemaError
from operads.free_operad import FreeOperad, check_algebra
from operads.graph_core import IN, OUT, corolla, with_involution
from operads.smodule import GNKey, check_equivariance, point_module


def space(form, nondegenerate=False):
    form = linalg.array(form)
    return BilinearSpace(form.shape[0], form, nondegenerate)


def random_form(rng, dim):
    """A random symmetric invertible form; singular draws are thrown away."""
    while True:
        raw = [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(dim)]
        form = linalg.array([[raw[i][j] + raw[j][i] + (3 if i == j else 0) for j in range(dim)] for i in range(dim)])
        if linalg.is_invertible(form):
            return BilinearSpace(dim, form, True)


def contraction_by_hand(space, m):
    """Each source basis vector keeps its digits along alpha and picks up t on every edge."""
    src, tgt, d = m.source.legs, m.target.legs, space.dim
    out = linalg.zeros((d ** len(tgt), d ** len(src)))
    for col, digits in enumerate(itertools.product(range(d), repeat=len(src))):
        at = dict(zip(src, digits))
        value = linalg.ONE
        for a, b in m.glue.edges:
            value *= space.form[at[a], at[b]]
        row = 0
        for leg in tgt:
            row = row * d + at[m.alpha[leg]]
        out[row, col] += value
    return out


def in_out(names: dict):
    """One-vertex-per-entry directed object from {vertex: {flag: direction}}."""
    legs = {v: list(flags) for v, flags in names.items()}
    direction = {f: d for flags in names.values() for f, d in flags.items()}
    return make_object(legs, {v: 0 for v in names}, direction)


def test_value_dimensions():
    plane = space([[0, 1], [1, 0]])
    assert end_value(plane, corolla(0, ["a", "b", "c"])).dim == 8
    assert end_value(plane, make_object({"u": []}, {"u": 2})).dim == 1
    assert end_value(space([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), corolla(0, ["a", "b", "c"])).dim == 27


def test_form_must_be_symmetric():
    with pytest.raises(ValueError, match="symmetric"):
        space([[0, 1], [2, 0]])
    with pytest.raises(ValueError, match="singular"):
        space([[1, 1], [1, 1]], nondegenerate=True)


def test_closing_two_legs_is_the_pairing():
    m = glue(corolla(0, ["a", "b"], vertex="u"), [("a", "b")])
    assert linalg.equal(end_action(space([[1, 0], [0, 1]]), m), linalg.array([[1, 0, 0, 1]]))
    assert linalg.equal(end_action(space([[2, 1], [1, 3]]), m), linalg.array([[2, 1, 1, 3]]))


def test_loop_is_a_partial_trace():
    m = glue(corolla(0, ["a", "b", "c"], vertex="u"), [("b", "c")])
    matrix = end_action(space([[1, 0], [0, 1]]), m)
    assert matrix.shape == (2, 8)
    # e_a ⊗ e_b ⊗ e_c survives only when b == c
    assert list(matrix[0]) == [1, 0, 0, 1, 0, 0, 0, 0]
    assert list(matrix[1]) == [0, 0, 0, 0, 1, 0, 0, 1]


def test_relabeling_acts_by_a_permutation_matrix():
    obj = corolla(0, ["a", "b", "c"], vertex="u")
    m = relabeling(obj, {"a": "z", "b": "x", "c": "y"})
    matrix = end_action(space([[0, 1], [1, 0]]), m)
    assert all(sum(row) == 1 for row in matrix)
    assert all(sum(col) == 1 for col in matrix.T)
    assert set(matrix.flat) == {0, 1}


def test_action_agrees_with_contraction_by_hand():
    rng = random.Random(5)
    for _ in range(40):
        m = random_morphism(rng, Flavor.G, max_flags=6)
        s = random_form(rng, 2)
        assert linalg.equal(end_action(s, m), contraction_by_hand(s, m))


def test_three_dimensional_contraction_by_hand():
    rng = random.Random(6)
    for _ in range(10):
        m = random_morphism(rng, Flavor.G, max_flags=4)
        s = random_form(rng, 3)
        assert linalg.equal(end_action(s, m), contraction_by_hand(s, m))


@pytest.mark.parametrize("flavor", [Flavor.G, Flavor.G_STABLE, Flavor.G0])
@pytest.mark.parametrize("dim,max_flags", [(1, 8), (2, 6), (3, 4)])
def test_action_is_functorial(flavor, dim, max_flags):
    rng = random.Random(8 + dim)
    pairs = composable_pairs(dim, flavor, 70, max_flags=max_flags)
    assert len(pairs) == 70
    for f, h in pairs:
        s = random_form(rng, dim)
        assert linalg.is_invertible(s.form)
        assert linalg.equal(end_action(s, compose(f, h)), end_action(s, h).dot(end_action(s, f)))


def test_edge_order_does_not_matter():
    rng = random.Random(12)
    s = random_form(rng, 2)
    for _ in range(20):
        m = random_morphism(rng, Flavor.G, max_flags=6)
        flipped = [(b, a) for a, b in reversed(m.glue.edges)]
        assert linalg.equal(end_action(s, m, flipped), end_action(s, m))


def test_identity_acts_by_the_identity():
    obj = make_object({"u": ["a", "b"], "w": ["c"]}, {"u": 0, "w": 1})
    assert linalg.equal(end_action(space([[0, 1], [1, 0]]), identity(obj)), linalg.identity(8))


def test_action_is_monoidal():
    rng = random.Random(4)
    s = random_form(rng, 2)
    for _ in range(10):
        f = random_morphism(rng, Flavor.G, max_flags=4)
        h = random_morphism(rng, Flavor.G, max_flags=4)
        assert linalg.equal(end_action(s, tensor([f, h])), linalg.kron(end_action(s, f), end_action(s, h)))


def test_symmetry_acts_by_moving_slots():
    a, b = corolla(0, ["x"], vertex="p"), corolla(0, ["y", "z"], vertex="q")
    s = random_form(random.Random(1), 2)
    assert linalg.equal(end_action(s, symmetry(a, b)), slot_permutation(2, (2, 0, 1)))


def test_end_module_is_equivariant():
    s = space([[0, 1], [1, 0]])
    assert check_equivariance(end_smodule(s, [GNKey(0, 3), GNKey(0, 4), GNKey(1, 2)])).ok


def test_directed_identity_and_scalar():
    pair = DirectedPair(2, 3, linalg.array([[1, 2, 0], [0, 1, 5]]))
    obj = in_out({"u": {"a": OUT, "b": IN}})
    assert linalg.equal(end_dir_action(pair, identity(obj)), linalg.identity(6))
    assert linalg.equal(end_dir_action(pair, glue(obj, [("a", "b")])), linalg.array([[1, 2, 0, 0, 1, 5]]))


def test_directed_action_is_functorial():
    pair = DirectedPair(2, 1, linalg.array([[1], [3]]))
    for f, h in composable_pairs(3, Flavor.D, 30, max_flags=6):
        assert linalg.equal(end_dir_action(pair, compose(f, h)),
                            end_dir_action(pair, h).dot(end_dir_action(pair, f)))


def test_directed_action_needs_direction_data():
    with pytest.raises(MissingDirection):
        end_dir_action(DirectedPair(1, 1, linalg.array([[1]])), identity(corolla(0, ["a"])))


def test_directed_action_refuses_same_direction_edges():
    obj = in_out({"u": {"a": OUT}, "w": {"b": OUT}})
    closed = make_object({"u": []}, {"u": 0}, {})
    bad = GMorphism(obj, closed, with_involution(obj, {"a": "b", "b": "a"}), {}, {"u": "u"})
    with pytest.raises(DirectionClash):
        end_dir_action(DirectedPair(1, 1, linalg.array([[1]])), bad)


def test_hom_formulation_matches_the_form():
    rng = random.Random(2)
    for _ in range(25):
        m = random_morphism(rng, Flavor.D, max_flags=5)
        s = random_form(rng, 2)
        pair = DirectedPair(2, 2, s.form)
        lhs = hom_dir_action(2, m).dot(out_slot_duality(s, m.source))
        rhs = out_slot_duality(s, m.target).dot(end_dir_action(pair, m))
        assert linalg.equal(lhs, rhs)


def test_end_is_an_algebra_over_the_free_operad():
    s = space([[1, 1], [1, 0]])
    keys = [GNKey(0, 3), GNKey(0, 4), GNKey(1, 1)]
    report = check_algebra(end_smodule(s, keys), end_structure(s), keys)
    assert report.ok, report.violations[:3]


def test_end_algebra_on_higher_genus_keys():
    s = space([[3]])
    keys = [GNKey(0, 3), GNKey(0, 4), GNKey(1, 1), GNKey(1, 2), GNKey(2, 0)]
    report = check_algebra(end_smodule(s, keys), end_structure(s), keys)
    assert report.ok, report.violations[:3]


def test_miscontracted_edge_breaks_the_algebra():
    s = space([[1]])
    keys = [GNKey(0, 3), GNKey(0, 4), GNKey(1, 1), GNKey(1, 2)]
    honest = end_structure(s)

    def doubled(key, x):
        out = honest(key, x)
        if key == GNKey(0, 4) and len(x.graph.edges) == 1:
            return {i: 2 * c for i, c in out.items()}
        return out

    report = check_algebra(end_smodule(s, keys), doubled, [GNKey(1, 2)])
    assert "square" in report.rules_failed()


def point_operad_morphism(scalar):
    free = FreeOperad(point_module([GNKey(0, 3)]))
    s = space([[scalar]])
    return check_operad_morphism(free, free.mult, s, lambda key, x: {0: linalg.ONE},
                                 [GNKey(0, 3), GNKey(0, 4), GNKey(1, 1)])


def test_constant_map_to_the_unit_form_is_an_operad_morphism():
    report = point_operad_morphism(1)
    assert report.ok, report.violations[:3]


def test_constant_map_to_a_scaled_form_is_not():
    assert {"edge", "loop"} <= point_operad_morphism(2).rules_failed()


def test_space_json():
    assert isinstance(space_from_json({"dim_out": 1, "dim_in": 2, "pairing": [[1, "1/2"]]}), DirectedPair)
    s = space_from_json({"dim": 2, "form": [[0, 1], [1, 0]], "nondegenerate": True})
    assert s.dim == 2 and s.nondegenerate


@pytest.mark.parametrize("data,path", [
    ({"dim": 2, "form": [[0, 1], [2, 0]]}, "/form"),
    ({"dim": -1, "form": []}, "/dim"),
    ({"dim": 1, "form": [[1]], "colour": 1}, "/colour"),
    ({"dim_out": 1, "dim_in": "x", "pairing": [[1]]}, "/dim_in"),
])
def test_space_schema_errors(data, path):
    with pytest.raises(SchemaError) as info:
        space_from_json(data)
    assert info.value.path == path
