"""
Stable graphs and the free operad monad.

Stable graphs of a type are enumerated by splitting vertices, starting from
the corolla, and deduplicated by canonical form with the legs fixed. The free
operad on a preoperad P decorates every vertex of a stable graph with an
element of P and divides out the automorphisms of the graph: for sets it
keeps the smallest decoration in each orbit, for vector spaces it averages
over the group.

FreeOperad is itself a preoperad (it has `elements`, `act` and `normalize`),
so FreeOperad(FreeOperad(P)) is the monad applied twice and `mult` flattens
one level of nesting by substituting graphs into vertices.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from operads import linalg
from operads.canon import GraphIso, automorphisms, canonical_form, canonical_key
from operads.errors import TypeMismatch, UnstableKey
from operads.graph_core import (
    IN,
    OUT,
    DualGraph,
    component_genus,
    components,
    corolla,
    graph_to_json,
    has_directed_circuit,
    is_forest,
)
from operads.report import CheckReport
from operads.smodule import DirectedKey, GNKey, stable_keys, transport_perm, vertex_key

logger = logging.getLogger(__name__)

FLAVORS = ("stable", "cyclic", "directed", "dioperad", "prop")
DIRECTED_FLAVORS = ("directed", "dioperad", "prop")


# ── stable graph classes ────────────────────────────────────────────────────

@dataclass(frozen=True)
class StableGraphClass:
    key: GNKey | DirectedKey
    graph: DualGraph
    automorphisms: tuple

    @property
    def aut_order(self) -> int:
        return len(self.automorphisms)

    @property
    def edge_count(self) -> int:
        return len(self.graph.edges)

    def to_json(self) -> dict:
        return {"graph": graph_to_json(self.graph), "automorphisms": self.aut_order}


@lru_cache(maxsize=None)
def _group(graph: DualGraph) -> tuple:
    return tuple(automorphisms(graph, fix_legs=True))


def class_corolla(key) -> DualGraph:
    return corolla(key.g, key.leg_names(), vertex="v0", direction=key.leg_directions())


def graph_type(graph: DualGraph):
    """Type (g, n) or (g, n_out, n_in) of a connected graph."""
    comps = components(graph)
    if len(comps) != 1:
        raise TypeMismatch("a decorated graph must be connected")
    g = component_genus(graph, comps[0])
    if graph.direction is None:
        return GNKey(g, len(graph.legs))
    n_out = sum(1 for f in graph.legs if graph.direction[f] == OUT)
    return DirectedKey(g, n_out, len(graph.legs) - n_out)


def _fresh(prefix: str, taken, count: int) -> list:
    out, k = [], 0
    while len(out) < count:
        name = f"{prefix}{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return out


def _split_ok(genus: int, valence: int, semistable: bool) -> bool:
    value = 2 * genus - 2 + valence
    return value >= 0 if semistable else value > 0


def _splits(graph: DualGraph, semistable: bool):
    """Every graph with one more edge that contracts back onto `graph`."""
    directed = graph.direction is not None
    orientations = ((OUT, IN), (IN, OUT)) if directed else ((None, None),)
    a, b = _fresh("x", set(graph.flags), 2)

    for v in graph.vertices:
        g = graph.genus[v]
        at = graph.flags_at(v)

        if g >= 1:
            for da, db in orientations[:1]:
                yield DualGraph(
                    flags=graph.flags + (a, b),
                    vertices=graph.vertices,
                    incidence={**graph.incidence, a: v, b: v},
                    involution={**graph.involution, a: b, b: a},
                    genus={**graph.genus, v: g - 1},
                    direction=None if not directed else {**graph.direction, a: da, b: db},
                )

        w = _fresh("u", set(graph.vertices), 1)[0]
        for mask in range(1 << len(at)):
            moved = [f for k, f in enumerate(at) if mask >> k & 1]
            for g_stay in range(g + 1):
                g_move = g - g_stay
                if not (_split_ok(g_stay, len(at) - len(moved) + 1, semistable)
                        and _split_ok(g_move, len(moved) + 1, semistable)):
                    continue
                incidence = dict(graph.incidence)
                incidence.update({f: w for f in moved})
                incidence.update({a: v, b: w})
                for da, db in orientations:
                    yield DualGraph(
                        flags=graph.flags + (a, b),
                        vertices=graph.vertices + (w,),
                        incidence=incidence,
                        involution={**graph.involution, a: b, b: a},
                        genus={**graph.genus, v: g_stay, w: g_move},
                        direction=None if not directed else {**graph.direction, a: da, b: db},
                    )


def _in_graph_flavor(graph: DualGraph, flavor: str) -> bool:
    if flavor in ("cyclic", "dioperad"):
        return is_forest(graph)
    if flavor == "prop":
        return all(g == 0 for g in graph.genus.values()) and not has_directed_circuit(graph)
    return True


def _coerce_key(key, flavor: str):
    if flavor in DIRECTED_FLAVORS and not isinstance(key, DirectedKey):
        raise TypeMismatch(f"flavor {flavor} needs a directed key (g, n_out, n_in)")
    if flavor not in DIRECTED_FLAVORS and isinstance(key, DirectedKey):
        raise TypeMismatch(f"flavor {flavor} needs an undirected key (g, n)")
    return key


@lru_cache(maxsize=None)
def _enumerate(key, flavor: str, max_vertices: int | None) -> tuple:
    semistable = max_vertices is not None and not key.is_stable()
    start, _ = canonical_form(class_corolla(key), fix_legs=True)
    seen = {start}
    frontier = [start]
    level = 0
    while frontier:
        level += 1
        fresh = []
        for graph in frontier:
            if max_vertices is not None and len(graph.vertices) >= max_vertices:
                continue
            for candidate in _splits(graph, semistable):
                canon, _ = canonical_form(candidate, fix_legs=True)
                if canon not in seen:
                    seen.add(canon)
                    fresh.append(canon)
        logger.debug("🌱 %s level %d: %d new graph(s)", key, level, len(fresh))
        frontier = fresh

    kept = [g for g in seen if _in_graph_flavor(g, flavor)]
    kept.sort(key=lambda g: (len(g.edges), canonical_key(g, True)))
    return tuple(StableGraphClass(key, g, _group(g)) for g in kept)


def enumerate_stable_graphs(g: int, n: int, n_in: int | None = None, flavor: str = "stable",
                            max_vertices: int | None = None) -> list[StableGraphClass]:
    """
    Isomorphism classes (legs fixed) of connected stable graphs of type
    (g, n), or (g, n, n_in) with n outgoing legs for the directed flavors.
    Unstable types need an explicit `max_vertices` budget; the exploration
    then admits semistable vertices and stops at that many vertices.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}, expected one of {', '.join(FLAVORS)}")
    key = GNKey(g, n) if n_in is None else DirectedKey(g, n, n_in)
    return enumerate_classes(key, flavor, max_vertices)


def enumerate_classes(key, flavor: str = "stable", max_vertices: int | None = None) -> list[StableGraphClass]:
    _coerce_key(key, flavor)
    if not key.is_stable() and max_vertices is None:
        raise UnstableKey(f"{key} is not stable (2g-2+n must be positive); "
                          "pass a vertex budget to explore it anyway")
    return list(_enumerate(key, flavor, max_vertices))


def census(bound: int, flavor: str = "stable") -> list[dict]:
    """Class counts and masses Σ 1/|Aut| for every stable key with 2g-2+n ≤ bound."""
    rows = []
    for key in stable_keys(bound, directed=flavor in DIRECTED_FLAVORS):
        classes = enumerate_classes(key, flavor)
        mass = sum((Fraction(1, c.aut_order) for c in classes), Fraction(0))
        rows.append({**key.to_json(), "count": len(classes), "mass": linalg.format_rational(mass)})
        logger.info("📊 %s: %d class(es), mass %s", key, len(classes), mass)
    return rows


# ── decorated graphs ────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class DecoratedGraph:
    graph: DualGraph
    decoration: tuple  # aligned with graph.vertices

    @cached_property
    def _key(self):
        return (self.graph.key, self.decoration)

    def __eq__(self, other):
        return isinstance(other, DecoratedGraph) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"DecoratedGraph({self.graph!r}, {self.decoration!r})"

    def at(self, vertex: str):
        return self.decoration[self.graph.vertices.index(vertex)]


def element_to_json(x):
    if isinstance(x, DecoratedGraph):
        return {"graph": graph_to_json(x.graph), "decoration": [element_to_json(d) for d in x.decoration]}
    return x


def combination_to_json(combo: dict) -> list:
    return [{"element": element_to_json(x), "coefficient": linalg.format_rational(c)} for x, c in combo.items()]


def _product(factors: list[dict]) -> dict:
    out = {(): linalg.ONE}
    for factor in factors:
        out = {t + (x,): c * d for t, c in out.items() for x, d in factor.items()}
    return out


def _accumulate(into: dict, combo: dict, scale=linalg.ONE) -> None:
    for x, c in combo.items():
        into[x] = into.get(x, linalg.ZERO) + scale * c
        if into[x] == 0:
            del into[x]


def apply_linear(fn, key, combo: dict) -> dict:
    out: dict = {}
    for x, c in combo.items():
        _accumulate(out, fn(key, x), c)
    return out


class FreeOperad:
    """The free operad T(P) in one flavor, as a preoperad itself."""

    def __init__(self, inner, flavor: str = "stable"):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        if (flavor in DIRECTED_FLAVORS) != bool(getattr(inner, "directed", False)):
            raise TypeMismatch(f"flavor {flavor} does not match the module's direction data")
        self.inner = inner
        self.flavor = flavor
        self.directed = flavor in DIRECTED_FLAVORS
        self.stable = True
        self._elements: dict = {}

    @property
    def is_linear(self) -> bool:
        return self.inner.is_linear

    def classes(self, key) -> list[StableGraphClass]:
        return enumerate_classes(key, self.flavor)

    def order_key(self, x: DecoratedGraph):
        return (canonical_key(x.graph, True),
                tuple(self.inner.order_key(d) for d in x.decoration))

    # transport of decorations along a relabeling of the graph
    def transport(self, graph: DualGraph, decoration: tuple, iso: GraphIso, new_graph: DualGraph) -> dict:
        per_vertex = {}
        for v, x in zip(graph.vertices, decoration):
            w = iso.vertex_map[v]
            s = transport_perm(graph.flags_at(v), new_graph.flags_at(w), iso.flag_map)
            per_vertex[w] = self.inner.act(vertex_key(graph, v), s, x)
        return _product([per_vertex[w] for w in new_graph.vertices])

    def normalize(self, key, x: DecoratedGraph) -> dict:
        graph = x.graph
        expanded = _product([self.inner.normalize(vertex_key(graph, v), d)
                             for v, d in zip(graph.vertices, x.decoration)])
        canon, iso = canonical_form(graph, fix_legs=True)
        on_canon: dict = {}
        for deco, c in expanded.items():
            _accumulate(on_canon, self.transport(graph, deco, iso, canon), c)

        group = _group(canon)
        out: dict = {}
        for deco, c in on_canon.items():
            if self.is_linear:
                share = c / len(group)
                for sigma in group:
                    moved = self.transport(canon, deco, sigma, canon)
                    _accumulate(out, {DecoratedGraph(canon, t): d for t, d in moved.items()}, share)
            else:
                orbit = [DecoratedGraph(canon, next(iter(self.transport(canon, deco, sigma, canon))))
                         for sigma in group]
                _accumulate(out, {min(orbit, key=self.order_key): c})
        return out

    def act(self, key, perm: tuple, x: DecoratedGraph) -> dict:
        names = key.leg_names()
        rename = {names[j]: names[perm[j]] for j in range(len(names))}
        flag_map = {f: rename.get(f, f) for f in x.graph.flags}
        iso = GraphIso(flag_map, {v: v for v in x.graph.vertices})
        moved_graph = iso.apply(x.graph)
        out: dict = {}
        for deco, c in self.transport(x.graph, x.decoration, iso, moved_graph).items():
            _accumulate(out, self.normalize(key, DecoratedGraph(moved_graph, deco)), c)
        return out

    def elements(self, key) -> list:
        """Normal forms spanning T(P)(key): orbit representatives for sets."""
        if key not in self._elements:
            seen: dict = {}
            for cls in self.classes(key):
                slots = [self.inner.elements(vertex_key(cls.graph, v)) for v in cls.graph.vertices]
                for deco in itertools.product(*slots):
                    x = DecoratedGraph(cls.graph, deco)
                    normal = self.normalize(key, x)
                    if not normal:
                        continue
                    signature = frozenset(normal.items())
                    if signature not in seen:
                        seen[signature] = next(iter(normal)) if not self.is_linear else x
            self._elements[key] = sorted(seen.values(), key=self.order_key)
            logger.debug("🧮 T(P)%s has %d spanning element(s)", key, len(self._elements[key]))
        return self._elements[key]

    # ── monad structure ──

    def unit(self, key, x) -> dict:
        """Corolla decorated by x."""
        return self.normalize(key, DecoratedGraph(class_corolla(key), (x,)))

    def flatten(self, key, outer: DecoratedGraph) -> dict:
        """Substitutes each vertex's decorated graph into that vertex; no normalization."""
        graph = outer.graph
        flags, vertices = list(graph.flags), []
        incidence, involution, genus = {}, dict(graph.involution), {}
        direction = None if graph.direction is None else dict(graph.direction)
        renames = []

        for v, inner in zip(graph.vertices, outer.decoration):
            h = inner.graph
            expected = vertex_key(graph, v)
            if graph_type(h) != expected:
                raise TypeMismatch(f"vertex {v} has type {expected} but is decorated with {graph_type(h)}")
            local = graph.flags_at(v)
            names = expected.leg_names()
            flag_map = {names[j]: local[j] for j in range(len(local))}
            flag_map.update({f: f"{v}.{f}" for f in h.flags if h.involution[f] != f})
            vertex_map = {u: f"{v}.{u}" for u in h.vertices}
            for f in h.flags:
                incidence[flag_map[f]] = vertex_map[h.incidence[f]]
                if h.involution[f] != f:
                    flags.append(flag_map[f])
                    involution[flag_map[f]] = flag_map[h.involution[f]]
                    if direction is not None:
                        direction[flag_map[f]] = h.direction[f]
            for u in h.vertices:
                vertices.append(vertex_map[u])
                genus[vertex_map[u]] = h.genus[u]
            renames.append((h, inner.decoration, GraphIso(flag_map, vertex_map)))

        flat = DualGraph(tuple(flags), tuple(vertices), incidence, involution, genus, direction)
        per_vertex = {}
        for h, deco, iso in renames:
            for u, d in zip(h.vertices, deco):
                w = iso.vertex_map[u]
                s = transport_perm(h.flags_at(u), flat.flags_at(w), iso.flag_map)
                per_vertex[w] = self.inner.act(vertex_key(h, u), s, d)
        return {DecoratedGraph(flat, deco): c
                for deco, c in _product([per_vertex[w] for w in flat.vertices]).items()}

    def mult(self, key, outer: DecoratedGraph) -> dict:
        out: dict = {}
        for raw, c in self.flatten(key, outer).items():
            _accumulate(out, self.normalize(key, raw), c)
        return out

    def map(self, target: "FreeOperad", fn, key, x: DecoratedGraph) -> dict:
        """T(f)(x) in `target`, where fn(key, element) is a combination in target.inner."""
        images = [fn(vertex_key(x.graph, v), d) for v, d in zip(x.graph.vertices, x.decoration)]
        out: dict = {}
        for deco, c in _product(images).items():
            _accumulate(out, target.normalize(key, DecoratedGraph(x.graph, deco)), c)
        return out


# ── free values ─────────────────────────────────────────────────────────────

@dataclass
class ClassValue:
    stable_class: StableGraphClass
    representatives: list
    tensor_dim: int = 0
    projector: object = None
    rank: int = 0

    def to_json(self, linear: bool) -> dict:
        out = {"graph": graph_to_json(self.stable_class.graph), "automorphisms": self.stable_class.aut_order}
        if linear:
            out.update({"tensor_dim": self.tensor_dim, "rank": self.rank,
                        "projector": linalg.to_json(self.projector)})
        else:
            out.update({"count": len(self.representatives),
                        "representatives": [element_to_json(x) for x in self.representatives]})
        return out


@dataclass
class FreeValue:
    key: object
    linear: bool
    classes: list

    @property
    def size(self) -> int:
        if self.linear:
            return sum(c.rank for c in self.classes)
        return sum(len(c.representatives) for c in self.classes)

    def to_json(self) -> dict:
        return {**self.key.to_json(), "base": "vect" if self.linear else "set",
                "size": self.size, "classes": [c.to_json(self.linear) for c in self.classes]}


def free_value(module, key, flavor: str = "stable") -> FreeValue:
    """
    T(P)(key) for a stable S-module P: every key P is supported on must be
    stable, whether or not the module is flagged `stable`.
    """
    if not key.is_stable():
        raise UnstableKey(f"{key} is not stable")
    unstable = [k for k in module.keys() if not k.is_stable()]
    if unstable:
        raise UnstableKey(f"the S-module has an entry at unstable type {unstable[0]}")
    free = FreeOperad(module, flavor)
    out = []
    for cls in free.classes(key):
        slots = [module.elements(vertex_key(cls.graph, v)) for v in cls.graph.vertices]
        basis = list(itertools.product(*slots))
        if not module.is_linear:
            reps = {next(iter(free.normalize(key, DecoratedGraph(cls.graph, deco)))) for deco in basis}
            out.append(ClassValue(cls, sorted(reps, key=free.order_key)))
            continue
        index = {deco: k for k, deco in enumerate(basis)}
        projector = linalg.zeros((len(basis), len(basis)))
        for col, deco in enumerate(basis):
            for sigma in cls.automorphisms:
                for image, c in free.transport(cls.graph, deco, sigma, cls.graph).items():
                    projector[index[image], col] += c / cls.aut_order
        out.append(ClassValue(cls, [], len(basis), projector, linalg.rank(projector)))
    value = FreeValue(key, module.is_linear, out)
    logger.info("🧩 free value at %s: size %d over %d class(es)", key, value.size, len(out))
    return value


def monad_unit(module, key, flavor: str = "stable") -> dict:
    free = FreeOperad(module, flavor)
    return {x: free.unit(key, x) for x in module.elements(key)}


def monad_mult(module, key, flavor: str = "stable") -> dict:
    once = FreeOperad(module, flavor)
    twice = FreeOperad(once, flavor)
    return {y: once.mult(key, y) for y in twice.elements(key)}


# ── law checkers ────────────────────────────────────────────────────────────

def check_monad_laws(module, keys, flavor: str = "stable", free_cls=FreeOperad) -> CheckReport:
    """
    Unit laws on T(P) and associativity on T(T(T(P))), elementwise.
    `free_cls` builds each level of the tower.
    """
    report = CheckReport("monad laws")
    t1 = free_cls(module, flavor)
    t2 = free_cls(t1, flavor)
    t3 = free_cls(t2, flavor)

    for key in keys:
        for x in t1.elements(key):
            expected = t1.normalize(key, x)
            left = apply_linear(t1.mult, key, t2.unit(key, x))
            report.checked += 1
            if left != expected:
                report.fail("left unit", f"mult(unit(x)) != x at {key}", element_to_json(x))
            right = apply_linear(t1.mult, key, t1.map(t2, t1.unit, key, x))
            report.checked += 1
            if right != expected:
                report.fail("right unit", f"mult(T(unit)(x)) != x at {key}", element_to_json(x))

        for z in t3.elements(key):
            outer_first = apply_linear(t1.mult, key, t2.mult(key, z))
            inner_first = apply_linear(t1.mult, key, t3.map(t2, t1.mult, key, z))
            report.checked += 1
            if outer_first != inner_first:
                report.fail("associativity", f"mult∘mult_T != mult∘T(mult) at {key}", element_to_json(z))
    logger.info("%s", report.summary())
    return report


def check_algebra(module, structure, keys, flavor: str = "stable") -> CheckReport:
    """
    `structure(key, x)` maps an element of T(P)(key) to a combination in P(key).
    Checks structure∘unit = id and structure∘mult = structure∘T(structure).
    """
    report = CheckReport("algebra")
    t1 = FreeOperad(module, flavor)
    t2 = FreeOperad(t1, flavor)

    for key in keys:
        for x in module.elements(key):
            report.checked += 1
            got = apply_linear(structure, key, t1.unit(key, x))
            if got != module.normalize(key, x):
                report.fail("unit", f"structure(unit(x)) != x at {key}", {"key": key.to_json(),
                                                                           "element": element_to_json(x)})
        for y in t2.elements(key):
            report.checked += 1
            via_mult = apply_linear(structure, key, t1.mult(key, y))
            via_structure = apply_linear(structure, key, t2.map(t1, structure, key, y))
            if via_mult != via_structure:
                report.fail("square", f"structure∘mult != structure∘T(structure) at {key}",
                            element_to_json(y))
    logger.info("%s", report.summary())
    return report


def free_structure(free: FreeOperad):
    """T(P) is a T-algebra through mult."""
    return free.mult

