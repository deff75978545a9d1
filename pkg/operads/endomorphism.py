"""
Endomorphism operads by tensor contraction.

End(M, t) sends an object to M^{⊗legs}, one tensor slot per leg in sorted
leg order. A morphism acts by pairing the two slots of every glue edge with
t and then reordering the surviving slots along alpha. Matrices map the
source space (columns) to the target space (rows), all entries exact.
"""
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from operads import linalg
from operads.category import GMorphism
from operads.errors import DirectionClash, MissingDirection, SchemaError
from operads.free_operad import DecoratedGraph, FreeOperad, apply_linear, enumerate_classes
from operads.graph_core import OUT, DualGraph, component_genus, components, corolla, without_edges
from operads.report import CheckReport
from operads.smodule import VECT, SModule, VectCarrier, invert_perm, transposition, vertex_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BilinearSpace:
    dim: int
    form: np.ndarray
    nondegenerate: bool = False

    def __post_init__(self):
        if self.form.shape != (self.dim, self.dim):
            raise ValueError(f"form must be {self.dim}×{self.dim}, got {self.form.shape}")
        if not linalg.equal(self.form, self.form.T):
            raise ValueError("form must be symmetric")
        if self.nondegenerate and not linalg.is_invertible(self.form):
            raise ValueError("form is marked nondegenerate but is singular")


@dataclass(frozen=True, eq=False)
class DirectedPair:
    dim_out: int
    dim_in: int
    pairing: np.ndarray  # dim_out × dim_in

    def __post_init__(self):
        if self.pairing.shape != (self.dim_out, self.dim_in):
            raise ValueError(f"pairing must be {self.dim_out}×{self.dim_in}, got {self.pairing.shape}")


@dataclass(frozen=True)
class EndValue:
    legs: tuple
    slot_dims: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return int(np.prod(self.slot_dims, dtype=object)) if self.slot_dims else 1


def end_value(space: BilinearSpace, obj: DualGraph) -> EndValue:
    return EndValue(obj.legs, (space.dim,) * len(obj.legs))


# ── contraction core ────────────────────────────────────────────────────────

def _contract(labels: list, dims: list, pairs: list, target: list) -> np.ndarray:
    """
    Starts from the identity on the slots `labels` and contracts each
    (a, b, form) in `pairs`; the surviving slots are reordered to `target`.
    """
    width = int(np.prod(dims, dtype=object)) if dims else 1
    tensor = linalg.identity(width).reshape(tuple(dims) + (width,))
    labels = list(labels)
    for a, b, form in pairs:
        ia, ib = labels.index(a), labels.index(b)
        tensor = np.tensordot(tensor, form, axes=([ia, ib], [0, 1]))
        labels = [x for x in labels if x not in (a, b)]
        # tensordot puts the untouched axes first, so the column axis stays last
    order = [labels.index(x) for x in target] + [len(labels)]
    tensor = np.transpose(tensor, order)
    rows = int(np.prod(tensor.shape[:-1], dtype=object)) if target else 1
    return tensor.reshape((rows, width))


def end_action(space: BilinearSpace, m: GMorphism, edge_order: list | None = None) -> np.ndarray:
    src = list(m.source.legs)
    edges = list(edge_order) if edge_order is not None else list(m.glue.edges)
    pairs = [(a, b, space.form) for a, b in edges]
    target = [m.alpha[leg] for leg in m.target.legs]
    return _contract(src, [space.dim] * len(src), pairs, target)


def _directed_slots(obj: DualGraph) -> list:
    if obj.direction is None:
        raise MissingDirection("directed End needs direction data")
    outs = [f for f in obj.legs if obj.direction[f] == OUT]
    ins = [f for f in obj.legs if obj.direction[f] != OUT]
    return outs + ins


def end_dir_action(pair: DirectedPair, m: GMorphism, edge_order: list | None = None) -> np.ndarray:
    """Slots run over out legs then in legs; each edge pairs its out slot with its in slot."""
    src = _directed_slots(m.source)
    dims = [pair.dim_out if m.source.direction[f] == OUT else pair.dim_in for f in src]
    pairs = []
    for a, b in (edge_order if edge_order is not None else m.glue.edges):
        da, db = m.glue.direction[a], m.glue.direction[b]
        if da == db:
            raise DirectionClash(f"edge {a}-{b} joins two {da} flags")
        out_flag, in_flag = (a, b) if da == OUT else (b, a)
        pairs.append((out_flag, in_flag, pair.pairing))
    target = [m.alpha[leg] for leg in _directed_slots(m.target)]
    return _contract(src, dims, pairs, target)


def hom_dir_action(dim: int, m: GMorphism) -> np.ndarray:
    """Hom formulation: out slots hold the dual space and edges evaluate."""
    return end_dir_action(DirectedPair(dim, dim, linalg.identity(dim)), m)


def out_slot_duality(space: BilinearSpace, obj: DualGraph) -> np.ndarray:
    """tᵀ on every out slot and the identity on in slots: M with t → M^∨ with evaluation."""
    result = linalg.identity(1)
    for f in _directed_slots(obj):
        result = linalg.kron(result, space.form.T if obj.direction[f] == OUT else linalg.identity(space.dim))
    return result


def slot_permutation(dim: int, perm: tuple) -> np.ndarray:
    """Moves tensor slot j to slot perm[j]."""
    n = len(perm)
    width = dim ** n
    eye = linalg.identity(width).reshape((dim,) * n + (width,))
    moved = np.transpose(eye, invert_perm(perm) + (n,))
    return moved.reshape((width, width))


# ── End as a preoperad and as an algebra ────────────────────────────────────

def end_smodule(space: BilinearSpace, keys) -> SModule:
    table = {}
    for key in keys:
        gens = tuple(slot_permutation(space.dim, transposition(key.arity, i)) for i in key.generators())
        table[key] = VectCarrier(space.dim ** key.arity, gens)
    return SModule(VECT, table, stable=all(k.is_stable() for k in table))


def class_morphism(graph: DualGraph) -> GMorphism:
    """The glue morphism from the vertices of a connected graph onto its type's corolla."""
    comp = components(graph)[0]
    target = corolla(component_genus(graph, comp), graph.legs, vertex="v0",
                     direction=None if graph.direction is None else {f: graph.direction[f] for f in graph.legs})
    return GMorphism(without_edges(graph), target, graph, {f: f for f in graph.legs}, {"v0": comp.representative})


def _digits(index: int, base: int, width: int) -> list:
    out = []
    for _ in range(width):
        index, r = divmod(index, base)
        out.append(r)
    return out[::-1]


def end_structure(space: BilinearSpace):
    """Contraction T(End) → End, as structure(key, decorated graph) → combination."""
    matrices: dict = {}

    def structure(key, x: DecoratedGraph) -> dict:
        graph = x.graph
        if graph not in matrices:
            matrices[graph] = end_action(space, class_morphism(graph))
        slots = {f: k for k, f in enumerate(graph.flags)}
        index = [0] * len(graph.flags)
        for v, b in zip(graph.vertices, x.decoration):
            local = graph.flags_at(v)
            for f, digit in zip(local, _digits(b, space.dim, len(local))):
                index[slots[f]] = digit
        column = 0
        for digit in index:
            column = column * space.dim + digit
        values = matrices[graph][:, column]
        return {i: c for i, c in enumerate(values) if c != 0}

    return structure


def check_operad_morphism(module, structure, space: BilinearSpace, rho, keys) -> CheckReport:
    """
    Checks that rho(key, p) ∈ End(key) commutes with the symmetric-group
    actions and with every single-edge composition of `structure`.
    """
    report = CheckReport("operad morphism")
    keys = list(keys)
    end = end_smodule(space, keys)
    contraction = end_structure(space)
    free = FreeOperad(module)
    free_end = FreeOperad(end)

    for key in keys:
        for x in module.elements(key):
            image = rho(key, x)
            for pos in key.generators():
                s = transposition(key.arity, pos)
                lhs = apply_linear(rho, key, module.act(key, s, x))
                rhs = apply_linear(lambda k, y: end.act(k, s, y), key, image)
                report.checked += 1
                if lhs != rhs:
                    report.fail("equivariance", f"rho does not commute with s{pos + 1} at {key}",
                                {"key": key.to_json(), "position": pos})

        for cls in enumerate_classes(key):
            if cls.edge_count != 1:
                continue
            (a, b), = cls.graph.edges
            name = "loop" if cls.graph.incidence[a] == cls.graph.incidence[b] else "edge"
            slots = [module.elements(vertex_key(cls.graph, v)) for v in cls.graph.vertices]
            for deco in itertools.product(*slots):
                composite = DecoratedGraph(cls.graph, deco)
                lhs = apply_linear(rho, key, structure(key, composite))
                rhs = apply_linear(contraction, key, free.map(free_end, rho, key, composite))
                report.checked += 1
                if lhs != rhs:
                    report.fail(name, f"rho does not respect the {name} composition at {key}",
                                {"key": key.to_json()})
                    break
    logger.info("%s", report.summary())
    return report


# ── JSON ────────────────────────────────────────────────────────────────────

def space_from_json(data, path: str = ""):
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object")
    if "pairing" in data:
        unknown = set(data) - {"dim_out", "dim_in", "pairing"}
        if unknown:
            raise SchemaError(f"{path}/{sorted(unknown)[0]}", "unknown key")
        dims = []
        for name in ("dim_out", "dim_in"):
            value = data.get(name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise SchemaError(f"{path}/{name}", "expected a non-negative integer")
            dims.append(value)
        return DirectedPair(dims[0], dims[1], linalg.matrix_from_json(data["pairing"], f"{path}/pairing",
                                                                       dims[0], dims[1]))
    unknown = set(data) - {"dim", "form", "nondegenerate"}
    if unknown:
        raise SchemaError(f"{path}/{sorted(unknown)[0]}", "unknown key")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise SchemaError(f"{path}/dim", "expected a non-negative integer")
    form = linalg.matrix_from_json(data.get("form"), f"{path}/form", dim, dim)
    nondegenerate = data.get("nondegenerate", False)
    try:
        return BilinearSpace(dim, form, bool(nondegenerate))
    except ValueError as exc:
        raise SchemaError(f"{path}/form", str(exc)) from None
