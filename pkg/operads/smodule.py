"""
Modular preoperads at desk scale: families of symmetric-group sets or
rational representations indexed by (g, n), or by (g, n_out, n_in) in the
directed setting.

A permutation is a tuple s of positions with (s∘t)(i) = s(t(i)); acting by
s moves the decoration slot j to slot s(j). Each carrier stores the action
of the adjacent transpositions only, and longer permutations are written
as words in them.
"""
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from operads import linalg
from operads.config import get_settings
from operads.errors import MissingKey, NotInvertible, SchemaError, UnstableKey
from operads.graph_core import IN, OUT, DualGraph, natural_key
from operads.report import CheckReport

logger = logging.getLogger(__name__)

SET = "set"
VECT = "vect"


# ── permutations ────────────────────────────────────────────────────────────

def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def compose_perm(s: tuple, t: tuple) -> tuple:
    """s∘t."""
    return tuple(s[t[i]] for i in range(len(t)))


def invert_perm(s: tuple) -> tuple:
    out = [0] * len(s)
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def transposition(n: int, i: int) -> tuple:
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


def perm_word(s: tuple) -> list[int]:
    """Positions i1..ik with s = s_{i1}∘…∘s_{ik}, s_i swapping i and i+1."""
    word = []
    s = tuple(s)
    while True:
        for i in range(len(s) - 1):
            if s[i] > s[i + 1]:
                s = compose_perm(s, transposition(len(s), i))
                word.append(i)
                break
        else:
            return word[::-1]


# ── keys ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, order=True)
class GNKey:
    g: int
    n: int

    @property
    def arity(self) -> int:
        return self.n

    @property
    def blocks(self) -> tuple:
        return (self.n,)

    @property
    def directed(self) -> bool:
        return False

    def is_stable(self) -> bool:
        return 2 * self.g - 2 + self.n > 0

    def leg_names(self) -> tuple:
        return tuple(str(i + 1) for i in range(self.n))

    def leg_directions(self) -> dict | None:
        return None

    def generators(self) -> list[int]:
        return list(range(self.n - 1))

    def permutations(self) -> list[tuple]:
        return [tuple(p) for p in itertools.permutations(range(self.n))]

    def to_json(self) -> dict:
        return {"g": self.g, "n": self.n}

    def __str__(self):
        return f"({self.g},{self.n})"


@dataclass(frozen=True, order=True)
class DirectedKey:
    g: int
    n_out: int
    n_in: int

    @property
    def arity(self) -> int:
        return self.n_out + self.n_in

    @property
    def blocks(self) -> tuple:
        return (self.n_out, self.n_in)

    @property
    def directed(self) -> bool:
        return True

    def is_stable(self) -> bool:
        return 2 * self.g - 2 + self.arity > 0

    def leg_names(self) -> tuple:
        return tuple(f"o{i + 1}" for i in range(self.n_out)) + tuple(f"i{i + 1}" for i in range(self.n_in))

    def leg_directions(self) -> dict:
        names = self.leg_names()
        return {name: (OUT if k < self.n_out else IN) for k, name in enumerate(names)}

    def generators(self) -> list[int]:
        return list(range(self.n_out - 1)) + [self.n_out + j for j in range(self.n_in - 1)]

    def permutations(self) -> list[tuple]:
        outs = itertools.permutations(range(self.n_out))
        return [tuple(a) + tuple(b) for a in outs
                for b in itertools.permutations(range(self.n_out, self.arity))]

    def to_json(self) -> dict:
        return {"g": self.g, "n_out": self.n_out, "n_in": self.n_in}

    def __str__(self):
        return f"({self.g},{self.n_out},{self.n_in})"


def key_from_json(data, path: str = "") -> GNKey | DirectedKey:
    def natural(name):
        value = data.get(name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise SchemaError(f"{path}/{name}", "expected a non-negative integer")
        return value

    if "n_out" in data or "n_in" in data:
        return DirectedKey(natural("g"), natural("n_out"), natural("n_in"))
    return GNKey(natural("g"), natural("n"))


def vertex_key(graph: DualGraph, vertex: str) -> GNKey | DirectedKey:
    """Type of a vertex: its genus and valence, split by direction if any."""
    at = graph.flags_at(vertex)
    if graph.direction is None:
        return GNKey(graph.genus[vertex], len(at))
    n_out = sum(1 for f in at if graph.direction[f] == OUT)
    return DirectedKey(graph.genus[vertex], n_out, len(at) - n_out)


def stable_keys(bound: int, directed: bool = False) -> list:
    """All stable keys with 2g-2+n at most `bound`."""
    keys = []
    for g in range(bound // 2 + 2):
        for n in range(bound + 3):
            if 0 < 2 * g - 2 + n <= bound:
                if directed:
                    keys.extend(DirectedKey(g, k, n - k) for k in range(n + 1))
                else:
                    keys.append(GNKey(g, n))
    return sorted(keys)


# ── carriers ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SetCarrier:
    elements: tuple
    # one map element -> element per generator of the key
    generators: tuple


@dataclass(frozen=True)
class VectCarrier:
    dim: int
    generators: tuple  # dim × dim matrices, one per generator of the key

    @property
    def elements(self) -> tuple:
        return tuple(range(self.dim))


@dataclass(eq=False)
class SModule:
    base: str
    table: dict
    stable: bool = False
    directed: bool = False
    _matrices: dict = field(default_factory=dict, repr=False)

    @property
    def is_linear(self) -> bool:
        return self.base == VECT

    def keys(self) -> list:
        return sorted(self.table)

    def carrier(self, key) -> SetCarrier | VectCarrier | None:
        return self.table.get(key)

    def elements(self, key) -> list:
        c = self.table.get(key)
        return [] if c is None else list(c.elements)

    def order_key(self, x):
        return natural_key(x) if isinstance(x, str) else ((0, x, ""),)

    def dim(self, key) -> int:
        return len(self.elements(key))

    def image(self, key, perm: tuple, x):
        """Set action: the element ρ(perm)x."""
        c = self.table[key]
        for i in reversed(perm_word(perm)):
            x = c.generators[_generator_index(key, i)][x]
        return x

    def matrix(self, key, perm: tuple) -> np.ndarray:
        cache_key = (key, perm)
        if cache_key not in self._matrices:
            c = self.table[key]
            if self.base == SET:
                index = {x: k for k, x in enumerate(c.elements)}
                out = linalg.zeros((len(c.elements), len(c.elements)))
                for k, x in enumerate(c.elements):
                    out[index[self.image(key, perm, x)], k] = linalg.ONE
            else:
                out = linalg.identity(c.dim)
                for i in perm_word(perm):
                    out = out.dot(c.generators[_generator_index(key, i)])
            self._matrices[cache_key] = out
        return self._matrices[cache_key]

    def act(self, key, perm: tuple, x) -> dict:
        if self.base == SET:
            return {self.image(key, perm, x): linalg.ONE}
        column = self.matrix(key, perm)[:, x]
        return {j: c for j, c in enumerate(column) if c != 0}

    def normalize(self, key, x) -> dict:
        return {x: linalg.ONE}


def _generator_index(key, position: int) -> int:
    return key.generators().index(position)


# ── evaluation on objects ───────────────────────────────────────────────────

@dataclass(frozen=True)
class Evaluation:
    """P(A) for an object A: one factor per vertex in sorted vertex order."""

    vertices: tuple
    keys: tuple
    slots: tuple  # per factor, the flags matched with positions 1..n
    elements: tuple  # tuples with one entry per factor

    @property
    def size(self) -> int:
        return len(self.elements)


def local_labeling(graph: DualGraph, vertex: str, labeling: dict | None = None) -> tuple:
    flags = graph.flags_at(vertex)
    if labeling is None:
        return flags
    return tuple(sorted(flags, key=lambda f: (0 if graph.direction is None or graph.direction[f] == OUT else 1,
                                             labeling[f])))


def evaluate(module: SModule, obj: DualGraph, labeling: dict | None = None) -> Evaluation:
    if obj.edges:
        raise NotInvertible("evaluate expects an object, got a graph with edges")
    keys = tuple(vertex_key(obj, v) for v in obj.vertices)
    strict = get_settings().strict_evaluation
    factors = []
    for v, key in zip(obj.vertices, keys):
        if key not in module.table:
            if strict:
                raise MissingKey(f"no carrier for {key} at vertex {v}")
            logger.debug("📭 %s has no carrier, evaluation is empty", key)
        factors.append(module.elements(key))
    elements = tuple(itertools.product(*factors))
    slots = tuple(local_labeling(obj, v, labeling) for v in obj.vertices)
    return Evaluation(obj.vertices, keys, slots, elements)


def transport_perm(source_flags: tuple, target_flags: tuple, flag_map: dict) -> tuple:
    """Permutation s with flag_map(source_flags[j]) == target_flags[s(j)]."""
    position = {f: k for k, f in enumerate(target_flags)}
    return tuple(position[flag_map[f]] for f in source_flags)


def act(module: SModule, iso):
    """
    The map P(source) → P(target) of an edge-free morphism: a dict of
    element tuples for sets, a matrix (target rows, source columns) for vect.
    """
    if iso.glue.edges:
        raise NotInvertible("only edge-free morphisms act on a preoperad")
    source, target = iso.source, iso.target
    src = evaluate(module, source)
    tgt = evaluate(module, target)
    forward = {image: leg for leg, image in iso.alpha.items()}
    src_pos = {v: k for k, v in enumerate(source.vertices)}

    plan = []
    for w in target.vertices:
        u = iso.beta[w]
        s = transport_perm(source.flags_at(u), target.flags_at(w), forward)
        plan.append((src_pos[u], vertex_key(target, w), s))

    if module.base == SET:
        return {x: tuple(module.image(key, s, x[k]) for k, key, s in plan) for x in src.elements}

    index = {y: r for r, y in enumerate(tgt.elements)}
    out = linalg.zeros((tgt.size, src.size))
    for col, x in enumerate(src.elements):
        term = {(): linalg.ONE}
        for k, key, s in plan:
            step = module.act(key, s, x[k])
            term = {y + (j,): c * d for y, c in term.items() for j, d in step.items()}
        for y, c in term.items():
            out[index[y], col] += c
    return out


# ── checks ──────────────────────────────────────────────────────────────────

def _relations(key) -> list[tuple[str, list[int], list[int]]]:
    gens = key.generators()
    rels = []
    for i in gens:
        rels.append((f"involution s{i + 1}", [i, i], []))
    for a, b in itertools.combinations(gens, 2):
        if b == a + 1:
            rels.append((f"braid s{a + 1} s{b + 1}", [a, b, a], [b, a, b]))
        else:
            rels.append((f"commute s{a + 1} s{b + 1}", [a, b], [b, a]))
    return rels


def check_equivariance(module: SModule) -> CheckReport:
    report = CheckReport("equivariance")
    for key in module.keys():
        c = module.table[key]
        if module.stable and not key.is_stable():
            report.fail("stability", f"{key} is not a stable type", key.to_json())
        if len(c.generators) != len(key.generators()):
            report.fail("shape", f"{key} needs {len(key.generators())} generator actions, got {len(c.generators)}",
                        key.to_json())
            continue

        if module.base == SET:
            elements = set(c.elements)
            bad = [k for k, gen in enumerate(c.generators)
                   if set(gen) != elements or set(gen.values()) != elements]
            if bad:
                report.fail("bijection", f"{key}: generator s{key.generators()[bad[0]] + 1} is not a bijection",
                            key.to_json())
                continue
            gen_of = {pos: c.generators[k] for k, pos in enumerate(key.generators())}

            def run(word, x):
                for pos in reversed(word):
                    x = gen_of[pos][x]
                return x

            for name, lhs, rhs in _relations(key):
                report.checked += 1
                for x in c.elements:
                    if run(lhs, x) != run(rhs, x):
                        report.fail(name, f"{key}: relation {name} fails", {"key": key.to_json(), "element": x})
                        break
        else:
            gen_of = {}
            for k, pos in enumerate(key.generators()):
                m = c.generators[k]
                if m.shape != (c.dim, c.dim) or not linalg.is_invertible(m):
                    report.fail("invertible", f"{key}: matrix of s{pos + 1} is not square invertible",
                                key.to_json())
                gen_of[pos] = m
            for name, lhs, rhs in _relations(key):
                report.checked += 1
                left, right = linalg.identity(c.dim), linalg.identity(c.dim)
                for pos in lhs:
                    left = left.dot(gen_of[pos])
                for pos in rhs:
                    right = right.dot(gen_of[pos])
                if not linalg.equal(left, right):
                    report.fail(name, f"{key}: relation {name} fails", key.to_json())
    return report


# ── stock modules ───────────────────────────────────────────────────────────

def point_module(keys, stable: bool = True) -> SModule:
    """One fixed point at each listed key."""
    keys = list(keys)
    table = {k: SetCarrier(("*",), tuple({"*": "*"} for _ in k.generators())) for k in keys}
    return SModule(SET, table, stable=stable, directed=any(k.directed for k in keys))


def regular_module(key) -> SModule:
    """The left regular action of the symmetric group on itself."""
    perms = key.permutations()
    name = {p: "".join(str(i + 1) for i in p) for p in perms}
    gens = tuple({name[p]: name[compose_perm(transposition(key.arity, i), p)] for p in perms}
                 for i in key.generators())
    return SModule(SET, {key: SetCarrier(tuple(name[p] for p in perms), gens)}, directed=key.directed)


def sign_module(key) -> SModule:
    gens = tuple(linalg.array([[-1]]) for _ in key.generators())
    return SModule(VECT, {key: VectCarrier(1, gens)}, directed=key.directed)


def trivial_module(keys, dim: int = 1, stable: bool = True) -> SModule:
    keys = list(keys)
    table = {k: VectCarrier(dim, tuple(linalg.identity(dim) for _ in k.generators())) for k in keys}
    return SModule(VECT, table, stable=stable, directed=any(k.directed for k in keys))


def restrict_smodule(module: SModule, flavor: str) -> SModule:
    """Keys a flavor can reach: cyclic keeps everything, prop keeps genus 0."""
    if flavor in ("prop", "D_P"):
        table = {k: c for k, c in module.table.items() if k.g == 0}
    else:
        table = dict(module.table)
    return SModule(module.base, table, module.stable, module.directed)


def require_stable(key) -> None:
    if not key.is_stable():
        raise UnstableKey(f"{key} is not stable: 2g-2+n must be positive")


# ── JSON ────────────────────────────────────────────────────────────────────

_MODULE_KEYS = {"base", "entries", "stable"}
_ENTRY_KEYS = {"g", "n", "n_out", "n_in", "elements", "dim", "transpositions"}


def smodule_from_json(data, path: str = "") -> SModule:
    if not isinstance(data, dict):
        raise SchemaError(path, "S-module must be an object")
    unknown = set(data) - _MODULE_KEYS
    if unknown:
        raise SchemaError(f"{path}/{sorted(unknown)[0]}", "unknown key")
    base = data.get("base")
    if base not in (SET, VECT):
        raise SchemaError(f"{path}/base", 'expected "set" or "vect"')
    stable = data.get("stable", False)
    if not isinstance(stable, bool):
        raise SchemaError(f"{path}/stable", "expected a boolean")
    entries = data.get("entries")
    if not isinstance(entries, list):
        raise SchemaError(f"{path}/entries", "expected an array")

    table = {}
    for k, entry in enumerate(entries):
        where = f"{path}/entries/{k}"
        if not isinstance(entry, dict):
            raise SchemaError(where, "entry must be an object")
        unknown = set(entry) - _ENTRY_KEYS
        if unknown:
            raise SchemaError(f"{where}/{sorted(unknown)[0]}", "unknown key")
        key = key_from_json(entry, where)
        if key in table:
            raise SchemaError(where, f"duplicate entry for {key}")
        table[key] = (_set_entry if base == SET else _vect_entry)(entry, key, where)

    directed = {k.directed for k in table}
    if len(directed) > 1:
        raise SchemaError(f"{path}/entries", "mixes directed and undirected keys")
    module = SModule(base, table, stable=stable, directed=directed == {True})
    logger.debug("📦 loaded %s module with %d entries", base, len(table))
    return module


def _set_entry(entry: dict, key, where: str) -> SetCarrier:
    elements = entry.get("elements")
    if not isinstance(elements, list) or any(not isinstance(x, str) for x in elements):
        raise SchemaError(f"{where}/elements", "expected an array of strings")
    if len(set(elements)) != len(elements):
        raise SchemaError(f"{where}/elements", "elements must be unique")
    raw = entry.get("transpositions")
    if raw is None:
        return SetCarrier(tuple(elements), tuple({x: x for x in elements} for _ in key.generators()))
    if not isinstance(raw, list) or len(raw) != len(key.generators()):
        raise SchemaError(f"{where}/transpositions", f"expected {len(key.generators())} arrays")
    gens = []
    for i, images in enumerate(raw):
        if not isinstance(images, list) or len(images) != len(elements) or any(y not in elements for y in images):
            raise SchemaError(f"{where}/transpositions/{i}", "expected one known element per element")
        gens.append(dict(zip(elements, images)))
    return SetCarrier(tuple(elements), tuple(gens))


def _vect_entry(entry: dict, key, where: str) -> VectCarrier:
    dim = entry.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise SchemaError(f"{where}/dim", "expected a non-negative integer")
    raw = entry.get("transpositions")
    if raw is None:
        return VectCarrier(dim, tuple(linalg.identity(dim) for _ in key.generators()))
    if not isinstance(raw, list) or len(raw) != len(key.generators()):
        raise SchemaError(f"{where}/transpositions", f"expected {len(key.generators())} matrices")
    gens = tuple(linalg.matrix_from_json(m, f"{where}/transpositions/{i}", dim, dim) for i, m in enumerate(raw))
    return VectCarrier(dim, gens)


def smodule_to_json(module: SModule) -> dict:
    entries = []
    for key in module.keys():
        c = module.table[key]
        entry = key.to_json()
        if module.base == SET:
            entry["elements"] = list(c.elements)
            entry["transpositions"] = [[gen[x] for x in c.elements] for gen in c.generators]
        else:
            entry["dim"] = c.dim
            entry["transpositions"] = [linalg.to_json(m) for m in c.generators]
        entries.append(entry)
    return {"base": module.base, "stable": module.stable, "entries": entries}

