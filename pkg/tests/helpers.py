"""Shared test helpers: independent oracles and random generators.

The oracles here deliberately avoid the library's own graph code:
reachability is a saturation closure over the raw edge set, and joins are
found by enumerating ancestor sets.
"""

from __future__ import annotations

import random

from ontoharvest.ontology import Ontology, OntologyError


def closure(concepts, edges) -> dict[str, set[str]]:
    """Reflexive-transitive reachability via fixpoint saturation."""
    reach = {c: {c} for c in concepts}
    direct: dict[str, set[str]] = {c: set() for c in concepts}
    for child, parent in edges:
        direct[child].add(parent)
    changed = True
    while changed:
        changed = False
        for c in concepts:
            new = set(reach[c])
            for d in list(reach[c]):
                new |= direct.get(d, set())
            if new != reach[c]:
                reach[c] = new
                changed = True
    return reach


def oracle_minimal_common_ancestors(reach: dict[str, set[str]], c1: str, c2: str) -> set[str]:
    common = reach[c1] & reach[c2]
    return {
        a for a in common
        if not any(b != a and a in reach[b] for b in common)
    }


def random_dag(rng: random.Random, max_concepts: int = 20, extra_edge_p: float = 0.12) -> Ontology:
    """Random rooted DAG built through the public mutation API."""
    n = rng.randint(1, max_concepts)
    onto = Ontology.empty()
    ids = [onto.root]
    for i in range(1, n):
        cid = f"c{i}"
        onto = onto.add_concept(cid, parent=rng.choice(ids))
        ids.append(cid)
    for child in ids:
        for parent in ids:
            if child != parent and rng.random() < extra_edge_p:
                try:
                    onto = onto.add_subsumption(child, parent)
                except OntologyError:
                    pass
    return onto


LABEL_POOL = ['Доза', 'a "quoted" label', "back\\slash", "plain", "μ-label"]


def random_ontology(rng: random.Random, max_concepts: int = 20) -> Ontology:
    """Random valid ontology with relations, hierarchy edges, attributes."""
    onto = random_dag(rng, max_concepts=max_concepts)
    ids = sorted(onto.concepts)
    # labels on a few concepts
    concepts = dict(onto.concepts)
    for cid in ids:
        if rng.random() < 0.3:
            concepts[cid] = rng.choice(LABEL_POOL)
    onto = Ontology(
        root=onto.root,
        concepts=concepts,
        taxonomy=onto.taxonomy,
        relations=onto.relations,
        relation_order=onto.relation_order,
        attributes=onto.attributes,
    )
    for i in range(rng.randint(0, 4)):
        arity = rng.randint(1, 3)
        sig = tuple(rng.choice(ids) for _ in range(arity))
        onto = onto.add_relation(f"r{i}", sig)
    rel_ids = sorted(onto.relations)
    for _ in range(4):
        if len(rel_ids) < 2:
            break
        sub, sup = rng.sample(rel_ids, 2)
        try:
            onto = onto.add_relation_subsumption(sub, sup)
        except OntologyError:
            pass
    for i in range(rng.randint(0, 4)):
        datatype = rng.choice(["string", "integer", "decimal", "boolean"])
        onto = onto.add_attribute(f"a{i}", rng.choice(ids), datatype)
    return onto
