"""
The symmetric monoidal category of dual graphs and its flavors.

An object is an edge-free dual graph. A morphism A → B is a glue graph on
A's flags whose legs and components are identified with B's legs and
vertices (alpha and beta). Composition glues the legs of the first glue
graph along the edges of the second.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from operads.errors import DirectionClash, GraphError, MissingDirection, ObjectsMismatch, SchemaError
from operads.graph_core import (
    DualGraph,
    component_genus,
    components,
    empty_graph,
    graph_from_json,
    graph_to_json,
    has_directed_circuit,
    is_forest,
    is_stable,
    natural_key,
    relabel,
    validate,
    with_involution,
)

logger = logging.getLogger(__name__)


class Flavor(str, Enum):
    G = "G"
    G_STABLE = "G_stable"
    G0 = "G0"
    G0_STABLE = "G0_stable"
    D = "D"
    D0 = "D0"
    D_P = "D_P"
    H = "H"
    H_STABLE = "H_stable"

    @property
    def directed(self) -> bool:
        return self in (Flavor.D, Flavor.D0, Flavor.D_P)


# ── objects ─────────────────────────────────────────────────────────────────

def is_object(graph: DualGraph) -> bool:
    return not graph.edges


def make_object(legs: dict, genus: dict, direction: dict | None = None) -> DualGraph:
    """Object from {vertex: [legs...]} and {vertex: genus}."""
    flags = [f for fs in legs.values() for f in fs]
    return DualGraph(
        flags=tuple(flags),
        vertices=tuple(genus),
        incidence={f: v for v, fs in legs.items() for f in fs},
        involution={f: f for f in flags},
        genus=dict(genus),
        direction=None if direction is None else dict(direction),
    )


def _prefixed(graph: DualGraph, prefix: str) -> tuple[dict, dict]:
    return ({f: prefix + f for f in graph.flags}, {v: prefix + v for v in graph.vertices})


def disjoint_union(graphs: list[DualGraph]) -> DualGraph:
    """Disjoint union with the i-th graph's identifiers prefixed by "i."."""
    if not graphs:
        return empty_graph()
    directed = {g.is_directed for g in graphs}
    if len(directed) > 1:
        raise GraphError("cannot combine directed and undirected graphs")
    parts = [relabel(g, *_prefixed(g, f"{i}.")) for i, g in enumerate(graphs)]
    return DualGraph(
        flags=tuple(f for p in parts for f in p.flags),
        vertices=tuple(v for p in parts for v in p.vertices),
        incidence={f: v for p in parts for f, v in p.incidence.items()},
        involution={f: s for p in parts for f, s in p.involution.items()},
        genus={v: g for p in parts for v, g in p.genus.items()},
        direction={f: d for p in parts for f, d in p.direction.items()} if directed == {True} else None,
    )


def tensor_objects(objects: list[DualGraph]) -> DualGraph:
    return disjoint_union(objects)


# ── morphisms ───────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class GMorphism:
    source: DualGraph
    target: DualGraph
    glue: DualGraph
    alpha: dict  # target leg -> leg of glue
    beta: dict   # target vertex -> representative vertex of a glue component

    @cached_property
    def key(self) -> tuple:
        return (
            self.source.key,
            self.target.key,
            self.glue.key,
            tuple(sorted(self.alpha.items(), key=lambda kv: natural_key(kv[0]))),
            tuple(sorted(self.beta.items(), key=lambda kv: natural_key(kv[0]))),
        )

    def __eq__(self, other):
        return isinstance(other, GMorphism) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"GMorphism({self.source!r} -> {self.target!r}, E={len(self.glue.edges)})"

    @cached_property
    def component_of(self) -> dict:
        """glue vertex -> representative of its component."""
        table = {}
        for comp in components(self.glue):
            for v in comp.vertices:
                table[v] = comp.representative
        return table


def validate_morphism(m: GMorphism) -> list[str]:
    problems = []
    for name, obj in (("source", m.source), ("target", m.target)):
        problems += [f"{name}: {p}" for p in validate(obj)]
        if obj.edges:
            problems.append(f"{name} is not an object: it has edges")
    problems += [f"glue: {p}" for p in validate(m.glue)]
    if problems:
        return problems

    src, glue, tgt = m.source, m.glue, m.target
    if (glue.flags, glue.vertices, glue.incidence, glue.genus, glue.direction) != (
            src.flags, src.vertices, src.incidence, src.genus, src.direction):
        problems.append("glue graph does not sit on the source object")
    if tgt.is_directed != src.is_directed:
        problems.append("source and target disagree on direction data")
        return problems

    if set(m.alpha) != set(tgt.legs):
        problems.append("alpha is not defined on exactly the target legs")
    elif sorted(m.alpha.values(), key=natural_key) != sorted(glue.legs, key=natural_key):
        problems.append("alpha is not a bijection onto the glue legs")

    comps = {c.representative: c for c in components(glue)}
    if set(m.beta) != set(tgt.vertices):
        problems.append("beta is not defined on exactly the target vertices")
    elif sorted(m.beta.values(), key=natural_key) != sorted(comps, key=natural_key):
        problems.append("beta is not a bijection onto the glue components")
    if problems:
        return problems

    for leg, image in m.alpha.items():
        if m.component_of[glue.incidence[image]] != m.beta[tgt.incidence[leg]]:
            problems.append(f"leg {leg} lands on the wrong component")
        if tgt.is_directed and tgt.direction[leg] != glue.direction[image]:
            problems.append(f"alpha changes the direction of leg {leg}")
    for v, rep in m.beta.items():
        genus = component_genus(glue, comps[rep])
        if genus != tgt.genus[v]:
            problems.append(f"vertex {v} has genus {tgt.genus[v]} but its component has genus {genus}")
    return problems


def identity(obj: DualGraph) -> GMorphism:
    return GMorphism(
        source=obj,
        target=obj,
        glue=obj,
        alpha={f: f for f in obj.legs},
        beta={v: v for v in obj.vertices},
    )


def compose(f: GMorphism, h: GMorphism) -> GMorphism:
    """The composite A → C of f: A → B and h: B → C."""
    if f.target != h.source:
        raise ObjectsMismatch("target of the first morphism differs from the source of the second")
    g1, g2 = f.glue, h.glue
    back = {image: leg for leg, image in f.alpha.items()}

    sigma = {}
    for x in g1.flags:
        if g1.involution[x] != x:
            sigma[x] = g1.involution[x]
        else:
            sigma[x] = f.alpha[g2.involution[back[x]]]
    if g1.direction is not None:
        for x, y in sigma.items():
            if x != y and g1.direction[x] == g1.direction[y]:
                raise DirectionClash(f"legs {x} and {y} are both {g1.direction[x]}")

    glue = with_involution(g1, sigma)
    alpha = {c: f.alpha[h.alpha[c]] for c in h.target.legs}
    rep_of = {v: c.representative for c in components(glue) for v in c.vertices}
    beta = {w: rep_of[f.beta[h.beta[w]]] for w in h.target.vertices}
    return GMorphism(f.source, h.target, glue, alpha, beta)


def compose_all(morphisms: list[GMorphism]) -> GMorphism:
    result = morphisms[0]
    for m in morphisms[1:]:
        result = compose(result, m)
    return result


def tensor(morphisms: list[GMorphism]) -> GMorphism:
    if not morphisms:
        return identity(empty_graph())
    alpha = {}
    beta = {}
    for i, m in enumerate(morphisms):
        p = f"{i}."
        alpha.update({p + leg: p + image for leg, image in m.alpha.items()})
        beta.update({p + v: p + rep for v, rep in m.beta.items()})
    return GMorphism(
        source=tensor_objects([m.source for m in morphisms]),
        target=tensor_objects([m.target for m in morphisms]),
        glue=disjoint_union([m.glue for m in morphisms]),
        alpha=alpha,
        beta=beta,
    )


def relabeling(obj: DualGraph, flag_names: dict, vertex_names: dict | None = None) -> GMorphism:
    """The invertible morphism from `obj` to its renamed copy."""
    vertex_names = vertex_names or {v: v for v in obj.vertices}
    target = relabel(obj, flag_names, vertex_names)
    return GMorphism(
        source=obj,
        target=target,
        glue=obj,
        alpha={flag_names[f]: f for f in obj.legs},
        beta={vertex_names[v]: v for v in obj.vertices},
    )


def _swap_prefix(name: str, mapping: dict) -> str:
    head, _, rest = name.partition(".")
    return mapping[head] + "." + rest


def symmetry(a: DualGraph, b: DualGraph) -> GMorphism:
    """a⊗b → b⊗a."""
    source = tensor_objects([a, b])
    swap = {"0": "1", "1": "0"}
    return relabeling(
        source,
        {f: _swap_prefix(f, swap) for f in source.flags},
        {v: _swap_prefix(v, swap) for v in source.vertices},
    )


def associator(a: DualGraph, b: DualGraph, c: DualGraph) -> GMorphism:
    """(a⊗b)⊗c → a⊗(b⊗c)."""
    source = tensor_objects([tensor_objects([a, b]), c])

    def move(name):
        if name.startswith("0.0."):
            return "0." + name[4:]
        if name.startswith("0.1."):
            return "1.0." + name[4:]
        return "1.1." + name[2:]

    return relabeling(source, {f: move(f) for f in source.flags}, {v: move(v) for v in source.vertices})


def glue(obj: DualGraph, pairs: list[tuple[str, str]]) -> GMorphism:
    """
    Pairs legs of `obj` into edges. The target has one vertex per glued
    component, named after the component's representative vertex, carrying
    the component genus and the surviving legs.
    """
    sigma = {f: f for f in obj.flags}
    for a, b in pairs:
        for x in (a, b):
            if x not in sigma:
                raise GraphError(f"{x} is not a leg of the object")
            if sigma[x] != x or a == b:
                raise GraphError(f"leg {x} is glued twice")
        if obj.direction is not None and obj.direction[a] == obj.direction[b]:
            raise DirectionClash(f"legs {a} and {b} are both {obj.direction[a]}")
        sigma[a], sigma[b] = b, a
    glued = with_involution(obj, sigma)

    comps = components(glued)
    rep_of = {v: c.representative for c in comps for v in c.vertices}
    target = DualGraph(
        flags=glued.legs,
        vertices=tuple(c.representative for c in comps),
        incidence={f: rep_of[glued.incidence[f]] for f in glued.legs},
        involution={f: f for f in glued.legs},
        genus={c.representative: component_genus(glued, c) for c in comps},
        direction=None if obj.direction is None else {f: obj.direction[f] for f in glued.legs},
    )
    m = GMorphism(obj, target, glued, {f: f for f in glued.legs}, {c.representative: c.representative for c in comps})
    logger.debug("🔗 glued %d pair(s): %r", len(pairs), m)
    return m


def is_invertible(m: GMorphism) -> bool:
    return not m.glue.edges


def inverse(m: GMorphism) -> GMorphism:
    """Inverse of an edge-free morphism."""
    if not is_invertible(m):
        raise GraphError("only edge-free morphisms are invertible")
    return GMorphism(
        source=m.target,
        target=m.source,
        glue=m.target,
        alpha={image: leg for leg, image in m.alpha.items()},
        beta={rep: v for v, rep in m.beta.items()},
    )


def _all_genus_zero(graph: DualGraph) -> bool:
    return all(g == 0 for g in graph.genus.values())


def _at_least_trivalent(graph: DualGraph) -> bool:
    return all(graph.valence(v) >= 3 for v in graph.vertices)


def in_flavor(m: GMorphism, flavor: Flavor | str) -> bool:
    flavor = Flavor(flavor)
    if flavor.directed and (m.glue.direction is None or m.target.direction is None):
        raise MissingDirection(f"flavor {flavor.value} needs direction data")
    if validate_morphism(m):
        return False
    graphs = (m.source, m.target, m.glue)

    if flavor is Flavor.G or flavor is Flavor.D:
        return True
    if flavor is Flavor.G_STABLE:
        return all(is_stable(g) for g in graphs)
    if flavor is Flavor.G0 or flavor is Flavor.D0:
        return is_forest(m.glue)
    if flavor is Flavor.G0_STABLE:
        return is_forest(m.glue) and all(_at_least_trivalent(g) for g in graphs)
    if flavor is Flavor.D_P:
        return _all_genus_zero(m.source) and not has_directed_circuit(m.glue)
    if flavor is Flavor.H:
        return is_invertible(m)
    if flavor is Flavor.H_STABLE:
        return is_invertible(m) and all(is_stable(g) for g in graphs)
    raise ValueError(f"unknown flavor {flavor}")


# ── JSON ────────────────────────────────────────────────────────────────────

_MORPHISM_KEYS = {"source", "target", "glue", "alpha", "beta"}


def object_from_json(data, path: str = "") -> DualGraph:
    graph = graph_from_json(data, path)
    for f, s in graph.involution.items():
        if s != f:
            raise SchemaError(f"{path}/involution/{f}", "objects have no edges")
    return graph


def _name_map(data, path: str) -> dict:
    if not isinstance(data, dict) or any(not isinstance(v, str) for v in data.values()):
        raise SchemaError(path, "expected an object of strings")
    return dict(data)


def morphism_from_json(data, path: str = "") -> GMorphism:
    if not isinstance(data, dict):
        raise SchemaError(path, "morphism must be an object")
    unknown = set(data) - _MORPHISM_KEYS
    if unknown:
        raise SchemaError(f"{path}/{sorted(unknown)[0]}", "unknown key")
    missing = _MORPHISM_KEYS - set(data)
    if missing:
        raise SchemaError(f"{path}/{sorted(missing)[0]}", "missing key")
    return GMorphism(
        source=object_from_json(data["source"], f"{path}/source"),
        target=object_from_json(data["target"], f"{path}/target"),
        glue=graph_from_json(data["glue"], f"{path}/glue"),
        alpha=_name_map(data["alpha"], f"{path}/alpha"),
        beta=_name_map(data["beta"], f"{path}/beta"),
    )


def morphism_to_json(m: GMorphism) -> dict:
    return {
        "source": graph_to_json(m.source),
        "target": graph_to_json(m.target),
        "glue": graph_to_json(m.glue),
        "alpha": {k: m.alpha[k] for k in sorted(m.alpha, key=natural_key)},
        "beta": {k: m.beta[k] for k in sorted(m.beta, key=natural_key)},
    }
