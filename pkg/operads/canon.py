"""
Isomorphism testing, canonical labels and automorphism groups for dual graphs.

Vertices are first split into colour classes by iterated refinement
(genus, legs, loops, then neighbour colours). Canonical forms take the
smallest encoding over all vertex orders that respect the colour classes;
isomorphisms are found by backtracking over flags, assigning a flag and its
involution partner together.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

from operads.config import get_settings
from operads.errors import AutomorphismBoundExceeded, GraphError
from operads.graph_core import OUT, DualGraph, natural_key, relabel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphIso:
    flag_map: dict
    vertex_map: dict

    def __call__(self, flag: str) -> str:
        return self.flag_map[flag]

    def apply(self, graph: DualGraph) -> DualGraph:
        return relabel(graph, self.flag_map, self.vertex_map)

    def then(self, other: "GraphIso") -> "GraphIso":
        """x ↦ other(self(x))."""
        return GraphIso(
            {f: other.flag_map[t] for f, t in self.flag_map.items()},
            {v: other.vertex_map[t] for v, t in self.vertex_map.items()},
        )

    def inverse(self) -> "GraphIso":
        return GraphIso(
            {t: f for f, t in self.flag_map.items()},
            {t: v for v, t in self.vertex_map.items()},
        )

    def is_identity(self) -> bool:
        return all(f == t for f, t in self.flag_map.items()) and all(
            v == t for v, t in self.vertex_map.items())

    def key(self) -> tuple:
        return (tuple(sorted(self.flag_map.items(), key=lambda kv: natural_key(kv[0]))),
                tuple(sorted(self.vertex_map.items(), key=lambda kv: natural_key(kv[0]))))

    def to_json(self) -> dict:
        return {"flags": dict(self.flag_map), "vertices": dict(self.vertex_map)}


def identity_iso(graph: DualGraph) -> GraphIso:
    return GraphIso({f: f for f in graph.flags}, {v: v for v in graph.vertices})


def _dir_code(graph: DualGraph, flag: str) -> int:
    if graph.direction is None:
        return 0
    return 0 if graph.direction[flag] == OUT else 1


def _leg_descriptor(graph: DualGraph, flag: str, fix_legs: bool) -> tuple:
    return (_dir_code(graph, flag), flag if fix_legs else "")


# ── colour refinement ───────────────────────────────────────────────────────

def vertex_colours(graph: DualGraph, fix_legs: bool) -> dict:
    """Isomorphism-invariant colour rank for each vertex."""
    sigma = graph.involution
    signature = {}
    for v in graph.vertices:
        at = graph.flags_at(v)
        leg_part = tuple(sorted(_leg_descriptor(graph, f, fix_legs) for f in at if sigma[f] == f))
        loops = sum(1 for f in at if sigma[f] != f and graph.incidence[sigma[f]] == v)
        edge_dirs = tuple(sorted(_dir_code(graph, f) for f in at if sigma[f] != f))
        signature[v] = (graph.genus[v], len(at), leg_part, loops, edge_dirs)
    colours = _ranks(signature)

    for _ in range(len(graph.vertices)):
        signature = {}
        for v in graph.vertices:
            around = []
            for f in graph.flags_at(v):
                s = sigma[f]
                if s == f or graph.incidence[s] == v:
                    continue
                around.append((colours[graph.incidence[s]], _dir_code(graph, f)))
            signature[v] = (colours[v], tuple(sorted(around)))
        refined = _ranks(signature)
        if len(set(refined.values())) == len(set(colours.values())):
            break
        colours = refined
    return colours


def _ranks(signature: dict) -> dict:
    order = {sig: i for i, sig in enumerate(sorted(set(signature.values())))}
    return {v: order[sig] for v, sig in signature.items()}


# ── canonical form ──────────────────────────────────────────────────────────

def _encode(graph: DualGraph, order: tuple, fix_legs: bool) -> tuple:
    index = {v: i for i, v in enumerate(order)}
    genera = tuple(graph.genus[v] for v in order)
    legs = tuple(sorted((index[graph.incidence[f]],) + _leg_descriptor(graph, f, fix_legs)
                        for f in graph.legs))
    codes = []
    for a, b in graph.edges:
        if graph.direction is not None:
            out_flag, in_flag = (a, b) if graph.direction[a] == OUT else (b, a)
            codes.append((index[graph.incidence[out_flag]], index[graph.incidence[in_flag]]))
        else:
            i, j = index[graph.incidence[a]], index[graph.incidence[b]]
            codes.append((min(i, j), max(i, j)))
    return (genera, legs, tuple(sorted(codes)))


def _orderings(graph: DualGraph, colours: dict):
    cells = {}
    for v in graph.vertices:
        cells.setdefault(colours[v], []).append(v)
    blocks = [cells[c] for c in sorted(cells)]
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield tuple(itertools.chain.from_iterable(choice))


def _best_order(graph: DualGraph, fix_legs: bool) -> tuple[tuple, tuple]:
    colours = vertex_colours(graph, fix_legs)
    best = None
    best_code = None
    for order in _orderings(graph, colours):
        code = _encode(graph, order, fix_legs)
        if best_code is None or code < best_code:
            best, best_code = order, code
    return (best or ()), best_code


@lru_cache(maxsize=None)
def canonical_key(graph: DualGraph, fix_legs: bool = False) -> tuple:
    """Hashable invariant: equal iff the graphs are isomorphic."""
    _, code = _best_order(graph, fix_legs)
    return (graph.is_directed, code)


def _fresh_names(prefix: str, count: int, taken: set) -> list:
    names = []
    k = 0
    while len(names) < count:
        candidate = f"{prefix}{k}"
        if candidate not in taken:
            names.append(candidate)
        k += 1
    return names


@lru_cache(maxsize=None)
def _canonical(graph: DualGraph, fix_legs: bool):
    order, _ = _best_order(graph, fix_legs)
    index = {v: i for i, v in enumerate(order)}
    vertex_map = {v: f"v{i}" for i, v in enumerate(order)}

    flag_map = {}
    leg_order = sorted(graph.legs, key=lambda f: ((index[graph.incidence[f]],)
                                                  + _leg_descriptor(graph, f, fix_legs)
                                                  + (natural_key(f),)))
    if fix_legs:
        flag_map.update({f: f for f in graph.legs})
    else:
        flag_map.update({f: f"l{k + 1}" for k, f in enumerate(leg_order)})

    keyed = []
    for a, b in graph.edges:
        if graph.direction is not None:
            first, second = (a, b) if graph.direction[a] == OUT else (b, a)
            code = (index[graph.incidence[first]], index[graph.incidence[second]])
        else:
            first, second = a, b
            if index[graph.incidence[a]] > index[graph.incidence[b]]:
                first, second = b, a
            code = (index[graph.incidence[first]], index[graph.incidence[second]])
        keyed.append((code, natural_key(first), first, second))
    keyed.sort()
    internal = _fresh_names("h", 2 * len(keyed), set(flag_map.values()))
    for k, (_, _, first, second) in enumerate(keyed):
        flag_map[first] = internal[2 * k]
        flag_map[second] = internal[2 * k + 1]

    iso = GraphIso(flag_map, vertex_map)
    return iso.apply(graph), iso


def canonical_form(graph: DualGraph, fix_legs: bool = False) -> tuple[DualGraph, GraphIso]:
    """
    Relabels `graph` canonically and returns (canonical graph, iso input → canonical).
    With fix_legs the leg names are kept and take part in the comparison.
    """
    return _canonical(graph, fix_legs)


# ── isomorphism search ──────────────────────────────────────────────────────

def _quick_reject(g1: DualGraph, g2: DualGraph, fix_legs: bool) -> bool:
    if g1.is_directed != g2.is_directed:
        return True
    if (len(g1.flags), len(g1.vertices), len(g1.legs)) != (len(g2.flags), len(g2.vertices), len(g2.legs)):
        return True
    if sorted(g1.genus.values()) != sorted(g2.genus.values()):
        return True
    if fix_legs:
        if set(g1.legs) != set(g2.legs):
            return True
        if any(_dir_code(g1, f) != _dir_code(g2, f) for f in g1.legs):
            return True
    return False


def _flag_order(graph: DualGraph) -> list:
    """Flags vertex by vertex in breadth-first order, so incidences pin early."""
    seen = []
    queue = []
    placed = set()
    for start in graph.vertices:
        if start in placed:
            continue
        queue.append(start)
        placed.add(start)
        while queue:
            v = queue.pop(0)
            seen.append(v)
            for f in graph.flags_at(v):
                w = graph.incidence[graph.involution[f]]
                if w not in placed:
                    placed.add(w)
                    queue.append(w)
    return [f for v in seen for f in graph.flags_at(v)]


def _isomorphisms(g1: DualGraph, g2: DualGraph, fix_legs: bool):
    if _quick_reject(g1, g2, fix_legs):
        return
    c1 = vertex_colours(g1, fix_legs)
    c2 = vertex_colours(g2, fix_legs)
    if sorted(c1.values()) != sorted(c2.values()):
        return
    order = _flag_order(g1)
    flag_map: dict = {}
    vertex_map: dict = {}
    used_flags: set = set()
    used_vertices: set = set()

    def fits(f, t):
        if t in used_flags:
            return False
        if _dir_code(g1, f) != _dir_code(g2, t):
            return False
        if (g1.involution[f] == f) != (g2.involution[t] == t):
            return False
        if fix_legs and g1.involution[f] == f and f != t:
            return False
        v, w = g1.incidence[f], g2.incidence[t]
        if v in vertex_map:
            return vertex_map[v] == w
        return w not in used_vertices and c1[v] == c2[w] and g1.genus[v] == g2.genus[w]

    def bind(f, t, trail):
        flag_map[f] = t
        used_flags.add(t)
        v = g1.incidence[f]
        if v not in vertex_map:
            vertex_map[v] = g2.incidence[t]
            used_vertices.add(g2.incidence[t])
            trail.append(v)

    def unbind(f, trail_start, trail):
        used_flags.discard(flag_map.pop(f))
        while len(trail) > trail_start:
            v = trail.pop()
            used_vertices.discard(vertex_map.pop(v))

    trail: list = []

    def search(i):
        while i < len(order) and order[i] in flag_map:
            i += 1
        if i == len(order):
            yield from _finish_flagless(g1, g2, c1, c2, flag_map, vertex_map, used_vertices)
            return
        f = order[i]
        s = g1.involution[f]
        v = g1.incidence[f]
        pool = g2.flags_at(vertex_map[v]) if v in vertex_map else g2.flags
        candidates = sorted(pool, key=natural_key)
        for t in candidates:
            if not fits(f, t):
                continue
            mark = len(trail)
            bind(f, t, trail)
            if s != f:
                u = g2.involution[t]
                if not fits(s, u):
                    unbind(f, mark, trail)
                    continue
                bind(s, u, trail)
                yield from search(i + 1)
                unbind(s, mark, trail)
                unbind(f, mark, trail)
            else:
                yield from search(i + 1)
                unbind(f, mark, trail)

    yield from search(0)


def _finish_flagless(g1, g2, c1, c2, flag_map, vertex_map, used_vertices):
    rest1 = [v for v in g1.vertices if v not in vertex_map]
    rest2 = [w for w in g2.vertices if w not in used_vertices]
    if not rest1:
        yield GraphIso(dict(flag_map), dict(vertex_map))
        return
    for image in itertools.permutations(rest2):
        if all(g1.genus[v] == g2.genus[w] and c1[v] == c2[w] for v, w in zip(rest1, image)):
            full = dict(vertex_map)
            full.update(zip(rest1, image))
            yield GraphIso(dict(flag_map), full)


def are_isomorphic(g1: DualGraph, g2: DualGraph, fix_legs: bool = True) -> GraphIso | None:
    if fix_legs and set(g1.legs) != set(g2.legs):
        return None
    return next(_isomorphisms(g1, g2, fix_legs), None)


def automorphisms(graph: DualGraph, fix_legs: bool = True) -> list[GraphIso]:
    bound = get_settings().max_automorphisms
    group = []
    for iso in _isomorphisms(graph, graph, fix_legs):
        group.append(iso)
        if len(group) > bound:
            raise AutomorphismBoundExceeded(
                f"automorphism group exceeds the configured bound of {bound}")
    logger.debug("🔁 |Aut| = %d for %r", len(group), graph)
    return group


# ── brute-force oracle ──────────────────────────────────────────────────────

def _respects(g1: DualGraph, g2: DualGraph, flag_map: dict, fix_legs: bool) -> dict | None:
    vertex_map = {}
    for f, t in flag_map.items():
        if g2.involution[t] != flag_map[g1.involution[f]]:
            return None
        if _dir_code(g1, f) != _dir_code(g2, t):
            return None
        if fix_legs and g1.involution[f] == f and f != t:
            return None
        v, w = g1.incidence[f], g2.incidence[t]
        if vertex_map.setdefault(v, w) != w:
            return None
    if len(set(vertex_map.values())) != len(vertex_map):
        return None
    if any(g1.genus[v] != g2.genus[w] for v, w in vertex_map.items()):
        return None
    return vertex_map


def brute_force_isomorphisms(g1: DualGraph, g2: DualGraph, fix_legs: bool = True) -> list[GraphIso]:
    """Every isomorphism, found by trying all flag bijections. Small graphs only."""
    limit = get_settings().brute_force_flag_limit
    if len(g1.flags) > limit:
        raise GraphError(f"brute force is limited to {limit} flags, got {len(g1.flags)}")
    if _quick_reject(g1, g2, fix_legs):
        return []
    found = []
    targets = list(g2.flags)
    for image in itertools.permutations(targets):
        flag_map = dict(zip(g1.flags, image))
        vertex_map = _respects(g1, g2, flag_map, fix_legs)
        if vertex_map is None:
            continue
        rest1 = [v for v in g1.vertices if v not in vertex_map]
        rest2 = [w for w in g2.vertices if w not in set(vertex_map.values())]
        for rest_image in itertools.permutations(rest2):
            if all(g1.genus[v] == g2.genus[w] for v, w in zip(rest1, rest_image)):
                full = dict(vertex_map)
                full.update(zip(rest1, rest_image))
                found.append(GraphIso(flag_map, full))
    return found


def is_isomorphism(g1: DualGraph, g2: DualGraph, iso: GraphIso) -> bool:
    """Checks that `iso` carries g1 exactly onto g2."""
    if set(iso.flag_map) != set(g1.flags) or set(iso.vertex_map) != set(g1.vertices):
        return False
    return iso.apply(g1) == g2

