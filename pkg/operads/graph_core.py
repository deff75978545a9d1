"""
Dual graphs: flags, vertices, incidence, involution, genus labels and an
optional out/in partition of the flags.

A DualGraph is immutable. Nothing is validated at construction time,
because the `validate` subcommand has to be able to load broken graphs
and report on them; use `checked()` when a valid graph is required.
"""
import re
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from operads.errors import GraphError, MissingDirection, SchemaError

OUT = "out"
IN = "in"
DIRECTIONS = (OUT, IN)

_GRAPH_KEYS = {"flags", "vertices", "incidence", "involution", "genus"}
_OPTIONAL_KEYS = {"direction"}


def natural_key(token: str) -> tuple:
    """Sort key for identifiers: digit runs compare as numbers, so f2 < f10."""
    parts = []
    for chunk in re.split(r"(\d+)", token):
        if not chunk:
            continue
        parts.append((0, int(chunk), chunk) if chunk.isdigit() else (1, 0, chunk))
    return tuple(parts)


def sort_ids(ids) -> tuple:
    return tuple(sorted(ids, key=natural_key))


@dataclass(frozen=True, eq=False)
class DualGraph:
    flags: tuple
    vertices: tuple
    incidence: dict
    involution: dict
    genus: dict
    direction: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "flags", sort_ids(self.flags))
        object.__setattr__(self, "vertices", sort_ids(self.vertices))
        object.__setattr__(self, "incidence", {f: self.incidence[f] for f in self.flags if f in self.incidence})
        object.__setattr__(self, "involution", {f: self.involution[f] for f in self.flags if f in self.involution})
        object.__setattr__(self, "genus", {v: self.genus[v] for v in self.vertices if v in self.genus})
        if self.direction is not None:
            object.__setattr__(self, "direction", {f: self.direction[f] for f in self.flags if f in self.direction})

    @cached_property
    def key(self) -> tuple:
        return (
            self.flags,
            self.vertices,
            tuple(self.incidence.get(f, "") for f in self.flags),
            tuple(self.involution.get(f, "") for f in self.flags),
            tuple(self.genus.get(v, -1) for v in self.vertices),
            None if self.direction is None else tuple(self.direction.get(f, "") for f in self.flags),
        )

    def __eq__(self, other):
        return isinstance(other, DualGraph) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"DualGraph(V={len(self.vertices)}, F={len(self.flags)}, L={len(self.legs)}, E={len(self.edges)})"

    @property
    def is_directed(self) -> bool:
        return self.direction is not None

    @cached_property
    def legs(self) -> tuple:
        return tuple(f for f in self.flags if self.involution.get(f) == f)

    @cached_property
    def edges(self) -> tuple:
        seen = set()
        out = []
        for f in self.flags:
            partner = self.involution.get(f)
            if partner is None or partner == f or f in seen:
                continue
            seen.update((f, partner))
            out.append(tuple(sorted((f, partner), key=natural_key)))
        return tuple(out)

    @cached_property
    def _flags_at(self) -> dict:
        table = {v: [] for v in self.vertices}
        for f in self.flags:
            v = self.incidence.get(f)
            if v in table:
                table[v].append(f)
        return {v: tuple(sorted(fs, key=lambda f: flag_order_key(self, f))) for v, fs in table.items()}

    def flags_at(self, vertex: str) -> tuple:
        """Flags at `vertex` in local order: out before in, then natural order."""
        return self._flags_at[vertex]

    def valence(self, vertex: str) -> int:
        return len(self._flags_at[vertex])


def flag_order_key(graph: DualGraph, flag: str) -> tuple:
    rank = 1 if graph.direction is not None and graph.direction.get(flag) == IN else 0
    return (rank, natural_key(flag))


@dataclass(frozen=True)
class Component:
    vertices: tuple
    legs: tuple
    edge_count: int
    vertex_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "vertex_count", len(self.vertices))

    @property
    def representative(self) -> str:
        return self.vertices[0]

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count


# ── construction helpers ────────────────────────────────────────────────────

def corolla(genus: int, legs, vertex: str = "v0", direction: dict | None = None) -> DualGraph:
    legs = list(legs)
    return DualGraph(
        flags=tuple(legs),
        vertices=(vertex,),
        incidence={f: vertex for f in legs},
        involution={f: f for f in legs},
        genus={vertex: genus},
        direction=None if direction is None else dict(direction),
    )


def empty_graph(directed: bool = False) -> DualGraph:
    return DualGraph((), (), {}, {}, {}, {} if directed else None)


def relabel(graph: DualGraph, flag_map: dict, vertex_map: dict) -> DualGraph:
    """Image of `graph` under bijections on flags and vertices."""
    return DualGraph(
        flags=tuple(flag_map[f] for f in graph.flags),
        vertices=tuple(vertex_map[v] for v in graph.vertices),
        incidence={flag_map[f]: vertex_map[v] for f, v in graph.incidence.items()},
        involution={flag_map[f]: flag_map[s] for f, s in graph.involution.items()},
        genus={vertex_map[v]: g for v, g in graph.genus.items()},
        direction=None if graph.direction is None else {flag_map[f]: d for f, d in graph.direction.items()},
    )


def with_involution(graph: DualGraph, involution: dict) -> DualGraph:
    return DualGraph(graph.flags, graph.vertices, graph.incidence, involution, graph.genus, graph.direction)


def without_edges(graph: DualGraph) -> DualGraph:
    return with_involution(graph, {f: f for f in graph.flags})


# ── operations ──────────────────────────────────────────────────────────────

def validate(graph: DualGraph) -> list[str]:
    problems = []
    vertex_set = set(graph.vertices)
    flag_set = set(graph.flags)
    if len(vertex_set) != len(graph.vertices):
        problems.append("duplicate vertex identifiers")
    if len(flag_set) != len(graph.flags):
        problems.append("duplicate flag identifiers")

    for f in graph.flags:
        v = graph.incidence.get(f)
        if v is None:
            problems.append(f"flag {f} has no incidence")
        elif v not in vertex_set:
            problems.append(f"flag {f} is incident to unknown vertex {v}")

    for f in graph.flags:
        s = graph.involution.get(f)
        if s is None:
            problems.append(f"involution undefined at {f}")
        elif s not in flag_set:
            problems.append(f"involution maps {f} to unknown flag {s}")
        elif graph.involution.get(s) != f:
            problems.append(f"involution not self-inverse at {f}")

    for v in graph.vertices:
        g = graph.genus.get(v)
        if g is None:
            problems.append(f"vertex {v} has no genus")
        elif not isinstance(g, int) or isinstance(g, bool) or g < 0:
            problems.append(f"genus of vertex {v} is not a non-negative integer")

    if graph.direction is not None:
        for f in graph.flags:
            d = graph.direction.get(f)
            if d not in DIRECTIONS:
                problems.append(f"flag {f} has no direction")
        for a, b in graph.edges:
            if graph.involution.get(b) != a:
                continue
            pair = {graph.direction.get(a), graph.direction.get(b)}
            if IN not in pair:
                problems.append(f"edge {a}-{b} lacks in-flag")
            elif OUT not in pair:
                problems.append(f"edge {a}-{b} lacks out-flag")
    return problems


def checked(graph: DualGraph) -> DualGraph:
    problems = validate(graph)
    if problems:
        raise GraphError("; ".join(problems))
    return graph


def legs(graph: DualGraph, direction: str | None = None) -> tuple:
    """Fixed points of the involution, optionally only the out or in legs."""
    if direction is None:
        return graph.legs
    if graph.direction is None:
        raise MissingDirection("graph carries no direction data")
    return tuple(f for f in graph.legs if graph.direction[f] == direction)


def edges(graph: DualGraph) -> tuple:
    return graph.edges


def _nx_graph(graph: DualGraph) -> nx.MultiGraph:
    shape = nx.MultiGraph()
    shape.add_nodes_from(graph.vertices)
    for a, b in graph.edges:
        shape.add_edge(graph.incidence[a], graph.incidence[b])
    return shape


def components(graph: DualGraph) -> list[Component]:
    shape = _nx_graph(graph)
    out = []
    for part in nx.connected_components(shape):
        verts = sort_ids(part)
        members = set(verts)
        comp_legs = tuple(f for f in graph.legs if graph.incidence[f] in members)
        edge_count = sum(1 for a, _ in graph.edges if graph.incidence[a] in members)
        out.append(Component(verts, comp_legs, edge_count))
    out.sort(key=lambda c: natural_key(c.representative))
    return out


def component_of(graph: DualGraph, vertex: str) -> Component:
    for comp in components(graph):
        if vertex in comp.vertices:
            return comp
    raise GraphError(f"vertex {vertex} is not in the graph")


def component_genus(graph: DualGraph, component: Component) -> int:
    total = sum(graph.genus[v] for v in component.vertices) + 1 - component.euler_characteristic
    if total < 0:
        raise GraphError(f"component at {component.representative} has negative genus {total}")
    return total


def is_stable(graph: DualGraph) -> bool:
    return all(2 * graph.genus[v] - 2 + graph.valence(v) > 0 for v in graph.vertices)


def is_connected(graph: DualGraph) -> bool:
    return len(components(graph)) == 1


def is_forest(graph: DualGraph) -> bool:
    return all(c.euler_characteristic == 1 for c in components(graph))


def has_directed_circuit(graph: DualGraph) -> bool:
    if graph.direction is None:
        raise MissingDirection("directed circuits need direction data")
    # each edge runs from its in-flag's vertex towards its out-flag's vertex
    shape = nx.DiGraph()
    shape.add_nodes_from(graph.vertices)
    for a, b in graph.edges:
        out_flag, in_flag = (a, b) if graph.direction[a] == OUT else (b, a)
        shape.add_edge(graph.incidence[in_flag], graph.incidence[out_flag])
    return not nx.is_directed_acyclic_graph(shape)


# ── JSON ────────────────────────────────────────────────────────────────────

def _string_list(data, path):
    if not isinstance(data, list) or any(not isinstance(x, str) for x in data):
        raise SchemaError(path, "expected an array of strings")
    if len(set(data)) != len(data):
        raise SchemaError(path, "identifiers must be unique")
    return data


def _string_map(data, path, value_check=None):
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object")
    for k, v in data.items():
        if value_check is not None:
            value_check(v, f"{path}/{k}")
        elif not isinstance(v, str):
            raise SchemaError(f"{path}/{k}", "expected a string")
    return data


def _genus_value(value, path):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise SchemaError(path, "genus must be a non-negative integer")


def _direction_value(value, path):
    if value not in DIRECTIONS:
        raise SchemaError(path, 'direction must be "out" or "in"')


def graph_from_json(data, path: str = "") -> DualGraph:
    if not isinstance(data, dict):
        raise SchemaError(path, "graph must be an object")
    unknown = set(data) - _GRAPH_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise SchemaError(f"{path}/{sorted(unknown)[0]}", "unknown key")
    missing = _GRAPH_KEYS - set(data)
    if missing:
        raise SchemaError(f"{path}/{sorted(missing)[0]}", "missing key")
    flags = _string_list(data["flags"], f"{path}/flags")
    vertices = _string_list(data["vertices"], f"{path}/vertices")
    for name in ("incidence", "involution"):
        mapping = _string_map(data[name], f"{path}/{name}")
        stray = set(mapping) - set(flags)
        if stray:
            raise SchemaError(f"{path}/{name}/{sorted(stray)[0]}", "not a flag")
    genus = _string_map(data["genus"], f"{path}/genus", _genus_value)
    stray = set(genus) - set(vertices)
    if stray:
        raise SchemaError(f"{path}/genus/{sorted(stray)[0]}", "not a vertex")
    direction = None
    if "direction" in data:
        direction = _string_map(data["direction"], f"{path}/direction", _direction_value)
        stray = set(direction) - set(flags)
        if stray:
            raise SchemaError(f"{path}/direction/{sorted(stray)[0]}", "not a flag")
    return DualGraph(tuple(flags), tuple(vertices), dict(data["incidence"]),
                     dict(data["involution"]), dict(genus), direction)


def graph_to_json(graph: DualGraph) -> dict:
    out = {
        "flags": list(graph.flags),
        "vertices": list(graph.vertices),
        "incidence": dict(graph.incidence),
        "involution": dict(graph.involution),
        "genus": dict(graph.genus),
    }
    if graph.direction is not None:
        out["direction"] = dict(graph.direction)
    return out
