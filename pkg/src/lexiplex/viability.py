"""Largest Viable Cluster: the biggest node set connected on every required
layer simultaneously.

A set S is viable for a list of required layers when (a) every node of S is
present on each required layer and (b) on each required layer all of S lies
inside one connected component of that layer's subgraph — paths may route
through nodes outside S, but only along that layer's intra-layer edges.
Couplings and cross-modal links never contribute paths. Clusters of size
< 2 carry no connectivity meaning, so the LVC reports the largest
qualifying set of size >= 2, else an empty result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import TooLarge, UnknownNode
from .multiplex import MultiplexNetwork

#: Hard cap for the exhaustive oracle.
BRUTE_FORCE_MAX_NODES = 20


@dataclass(frozen=True)
class ViabilitySpec:
    """Layers over which mutual connectivity is demanded (deduplicated, non-empty)."""

    required_layers: tuple

    def __init__(self, required_layers: Iterable[str]):
        seen = []
        for lid in required_layers:
            if lid not in seen:
                seen.append(lid)
        if not seen:
            raise ValueError("required_layers must be non-empty")
        object.__setattr__(self, "required_layers", tuple(seen))

    def validate(self, net: MultiplexNetwork) -> None:
        for lid in self.required_layers:
            net.layer(lid)


def default_spec(net: MultiplexNetwork) -> ViabilitySpec:
    """All lexical layers; the visual layer is grounding, not a constraint."""
    lexical = net.lexical_layer_ids()
    if not lexical:
        raise ValueError("network has no lexical layers")
    return ViabilitySpec(lexical)


@dataclass(frozen=True)
class ViableClusterResult:
    members: frozenset
    size: int
    per_layer_edge_counts: dict

    def sorted_members(self) -> list:
        return sorted(self.members)

    def to_json_dict(self) -> dict:
        return {
            "members": self.sorted_members(),
            "size": self.size,
            "per_layer_edge_counts": dict(sorted(self.per_layer_edge_counts.items())),
        }


def _layer_component_ids(net: MultiplexNetwork, layer_id: str) -> dict:
    """node -> connected-component id on one layer's full subgraph."""
    adjacency = net.intra_layer_adjacency(layer_id)
    component: dict = {}
    next_id = 0
    for start in sorted(adjacency):
        if start in component:
            continue
        stack = [start]
        component[start] = next_id
        while stack:
            u = stack.pop()
            for v in adjacency[u]:
                if v not in component:
                    component[v] = next_id
                    stack.append(v)
        next_id += 1
    return component


def _reaches_all(adjacency: dict, members: frozenset) -> bool:
    """BFS over the full layer from one member; do we touch every member?

    Independent of the component-id machinery on purpose: this is the
    oracle-side connectivity check.
    """
    start = min(members)
    seen = {start}
    frontier = [start]
    remaining = set(members) - {start}
    while frontier and remaining:
        nxt = []
        for u in frontier:
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    remaining.discard(v)
                    nxt.append(v)
        frontier = nxt
    return not remaining


def _presence_pool(net: MultiplexNetwork, spec: ViabilitySpec) -> frozenset:
    pool = None
    for lid in spec.required_layers:
        on_layer = {nid for (nid, plid) in net.presence if plid == lid}
        pool = on_layer if pool is None else pool & on_layer
    return frozenset(pool or ())


def _result(net: MultiplexNetwork, spec: ViabilitySpec, members: frozenset) -> ViableClusterResult:
    counts = {}
    for lid in spec.required_layers:
        adjacency = net.intra_layer_adjacency(lid)
        n_edges = 0
        for u in members:
            for v in adjacency.get(u, ()):
                if v in members and u < v:
                    n_edges += 1
        counts[lid] = n_edges
    return ViableClusterResult(members=members, size=len(members), per_layer_edge_counts=counts)


def _empty_result(spec: ViabilitySpec) -> ViableClusterResult:
    return ViableClusterResult(
        members=frozenset(),
        size=0,
        per_layer_edge_counts={lid: 0 for lid in spec.required_layers},
    )


def is_viable(net: MultiplexNetwork, spec: ViabilitySpec, candidate: Iterable[str]) -> bool:
    """True iff the candidate set satisfies both viability conditions."""
    spec.validate(net)
    members = frozenset(candidate)
    for nid in members:
        if not net.has_node(nid):
            raise UnknownNode(f"unknown node {nid!r}")
    if not members:
        return True
    for lid in spec.required_layers:
        if any(not net.is_present(nid, lid) for nid in members):
            return False
    if len(members) == 1:
        return True
    return all(
        _reaches_all(net.intra_layer_adjacency(lid), members)
        for lid in spec.required_layers
    )


def _better(a: frozenset, b: Optional[frozenset]) -> bool:
    """Is a a better cluster than b? Larger wins; ties go to the
    lexicographically smallest sorted member list."""
    if b is None:
        return True
    if len(a) != len(b):
        return len(a) > len(b)
    return sorted(a) < sorted(b)


def largest_viable_cluster(net: MultiplexNetwork, spec: ViabilitySpec) -> ViableClusterResult:
    """Maximum-cardinality viable set, via mutual pruning to a fixed point.

    Candidates start from the nodes present on all required layers; any
    candidate spanning several components of some required layer splits
    into the per-component groups, and candidates lying in one component
    per layer are viable leaves. Splitting cannot sever a viable set, so
    the best leaf is the exact optimum (checked against ``brute_force_lvc``
    in tests).
    """
    spec.validate(net)
    component_ids = {lid: _layer_component_ids(net, lid) for lid in spec.required_layers}
    pool = _presence_pool(net, spec)
    best: Optional[frozenset] = None
    worklist = [pool] if len(pool) >= 2 else []
    while worklist:
        candidate = worklist.pop()
        if best is not None and len(candidate) < len(best):
            continue
        split = None
        for lid in spec.required_layers:
            ids = component_ids[lid]
            groups: dict = {}
            for nid in candidate:
                groups.setdefault(ids[nid], []).append(nid)
            if len(groups) > 1:
                split = [frozenset(g) for g in groups.values()]
                break
        if split is None:
            if _better(candidate, best):
                best = candidate
        else:
            worklist.extend(part for part in split if len(part) >= 2)
    if best is None:
        return _empty_result(spec)
    return _result(net, spec, best)


def brute_force_lvc(net: MultiplexNetwork, spec: ViabilitySpec) -> ViableClusterResult:
    """Exhaustive oracle: exact maximum over all node subsets.

    Enumerates subsets of the all-layers presence pool in decreasing size,
    checking layer connectivity by BFS per subset (no shared machinery with
    the fixed-point path). Within one size, ``itertools.combinations`` over
    the sorted pool yields lexicographic order, so the first viable subset
    found is the tie-break winner. Guarded to <= 20 nodes.
    """
    spec.validate(net)
    if net.num_nodes > BRUTE_FORCE_MAX_NODES:
        raise TooLarge(
            f"brute force is capped at {BRUTE_FORCE_MAX_NODES} nodes, "
            f"network has {net.num_nodes}"
        )
    adjacencies = {lid: net.intra_layer_adjacency(lid) for lid in spec.required_layers}
    pool = sorted(_presence_pool(net, spec))
    for size in range(len(pool), 1, -1):
        for combo in itertools.combinations(pool, size):
            members = frozenset(combo)
            if all(_reaches_all(adjacencies[lid], members) for lid in spec.required_layers):
                return _result(net, spec, members)
    return _empty_result(spec)
