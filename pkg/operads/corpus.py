"""
Seeded random objects and morphisms for property checks.

Everything is driven by a `random.Random(seed)`, so a seed reproduces the
corpus exactly. Gluings are drawn leg pair by leg pair and filtered so the
result stays inside the requested flavor.
"""
import logging
import random

from networkx.utils import UnionFind

from operads.category import (
    Flavor,
    GMorphism,
    compose,
    glue,
    identity,
    in_flavor,
    make_object,
    relabeling,
    validate_morphism,
)
from operads.graph_core import (
    IN,
    OUT,
    DualGraph,
    component_genus,
    components,
    has_directed_circuit,
    is_stable,
    with_involution,
)
from operads.report import CheckReport

logger = logging.getLogger(__name__)

CORPUS_FLAVORS = (Flavor.G, Flavor.G_STABLE, Flavor.G0, Flavor.D, Flavor.D0, Flavor.D_P)


def random_object(rng: random.Random, flavor: Flavor, max_flags: int = 8, max_vertices: int = 3) -> DualGraph:
    """An object with at most `max_flags` legs, stable when the flavor asks for it."""
    flavor = Flavor(flavor)
    while True:
        vertex_count = rng.randint(1, max_vertices)
        genus = {f"v{i}": (0 if flavor is Flavor.D_P else rng.choice((0, 0, 1))) for i in range(vertex_count)}
        legs = {v: [] for v in genus}
        for k in range(rng.randint(0, max_flags)):
            legs[rng.choice(list(genus))].append(f"f{k}")
        direction = None
        if flavor.directed:
            direction = {f: rng.choice((OUT, IN)) for fs in legs.values() for f in fs}
        obj = make_object(legs, genus, direction)
        if flavor is Flavor.G_STABLE and not is_stable(obj):
            continue
        return obj


def random_gluing(rng: random.Random, obj: DualGraph, flavor: Flavor, max_pairs: int = 3,
                  trees_only: bool = False) -> GMorphism:
    """
    A morphism out of `obj` in `flavor`: a random gluing followed by a
    random renaming of the target. With `trees_only` every glued component
    is a tree, so the target keeps genus-0 vertices.
    """
    flavor = Flavor(flavor)
    forest = trees_only or flavor in (Flavor.G0, Flavor.D0)
    free = list(obj.legs)
    rng.shuffle(free)
    uf = UnionFind(obj.vertices)
    pairs = []
    sigma = {f: f for f in obj.flags}
    for _ in range(rng.randint(0, max_pairs)):
        candidates = []
        for i, a in enumerate(free):
            for b in free[i + 1:]:
                if obj.is_directed and obj.direction[a] == obj.direction[b]:
                    continue
                if forest and uf[obj.incidence[a]] == uf[obj.incidence[b]]:
                    continue
                candidates.append((a, b))
        if flavor is Flavor.D_P:
            candidates = [(a, b) for a, b in candidates if not _closes_circuit(obj, sigma, a, b)]
        if not candidates:
            break
        a, b = rng.choice(candidates)
        pairs.append((a, b))
        sigma[a], sigma[b] = b, a
        uf.union(obj.incidence[a], obj.incidence[b])
        free.remove(a)
        free.remove(b)

    m = glue(obj, pairs)
    renamed = relabeling(m.target, _shuffled_names(rng, m.target.flags, "t"),
                         _shuffled_names(rng, m.target.vertices, "w"))
    return compose(m, renamed)


def _closes_circuit(obj: DualGraph, sigma: dict, a: str, b: str) -> bool:
    trial = dict(sigma)
    trial[a], trial[b] = b, a
    return has_directed_circuit(with_involution(obj, trial))


def _shuffled_names(rng: random.Random, ids: tuple, prefix: str) -> dict:
    names = [f"{prefix}{k}" for k in range(len(ids))]
    rng.shuffle(names)
    return dict(zip(ids, names))


def random_morphism(rng: random.Random, flavor: Flavor, max_flags: int = 8) -> GMorphism:
    return random_gluing(rng, random_object(rng, flavor, max_flags), flavor)


def composable_chain(rng: random.Random, flavor: Flavor, length: int, max_flags: int = 8) -> list[GMorphism]:
    """`length` morphisms, each starting where the previous one ends."""
    # prop sources need genus-0 vertices, so only the last step may close cycles
    trees = Flavor(flavor) is Flavor.D_P
    chain = [random_gluing(rng, random_object(rng, flavor, max_flags), flavor, trees_only=trees and length > 1)]
    while len(chain) < length:
        last = len(chain) == length - 1
        chain.append(random_gluing(rng, chain[-1].target, flavor, max_pairs=2, trees_only=trees and not last))
    return chain


def composable_triples(seed: int, flavor: Flavor, count: int, max_flags: int = 8) -> list[tuple]:
    rng = random.Random(f"{seed}:{Flavor(flavor).value}")
    triples = [tuple(composable_chain(rng, flavor, 3, max_flags)) for _ in range(count)]
    logger.debug("🎲 drew %d composable triples in %s (seed %d)", count, Flavor(flavor).value, seed)
    return triples


def composable_pairs(seed: int, flavor: Flavor, count: int, max_flags: int = 8) -> list[tuple]:
    rng = random.Random(f"{seed}:{Flavor(flavor).value}:pairs")
    return [tuple(composable_chain(rng, flavor, 2, max_flags)) for _ in range(count)]


def corpus_sanity(morphisms: list[GMorphism], flavor: Flavor) -> bool:
    return all(in_flavor(m, flavor) for m in morphisms)


def check_category_laws(seed: int, flavor: Flavor, count: int = 500, max_flags: int = 8) -> CheckReport:
    """
    Associativity and unit laws on a seeded corpus of composable triples,
    plus genus conservation and flavor closure of every composite.
    """
    flavor = Flavor(flavor)
    report = CheckReport(f"category laws in {flavor.value}")
    for f, g, h in composable_triples(seed, flavor, count, max_flags):
        left = compose(compose(f, g), h)
        right = compose(f, compose(g, h))
        report.checked += 1
        if left != right:
            report.fail("associativity", "(hg)f != h(gf)", {"source": list(f.source.flags)})
        for m in (f, g, h):
            report.checked += 1
            if compose(identity(m.source), m) != m or compose(m, identity(m.target)) != m:
                report.fail("unit", "composing with an identity changed the morphism",
                            {"source": list(m.source.flags)})

        for composite in (compose(f, g), left):
            comps = {c.representative: c for c in components(composite.glue)}
            for v, rep in composite.beta.items():
                report.checked += 1
                genus = component_genus(composite.glue, comps[rep])
                if genus != composite.target.genus[v]:
                    report.fail("genus", f"vertex {v} has genus {composite.target.genus[v]}, its component {genus}")
            report.checked += 1
            problems = validate_morphism(composite)
            if problems:
                report.fail("valid", problems[0])
            elif not in_flavor(composite, flavor):
                report.fail("flavor closure", f"a composite left {flavor.value}",
                            {"source": list(composite.source.flags)})
    logger.info("%s", report.summary())
    return report
