"""Vocabulary growth simulation: add nodes one at a time in an acquisition
order and track how the largest viable cluster develops.

At each step the active nodes induce a sub-network, the LVC is recomputed
there, and the trajectory records its size plus the mean shortest-path
length among cluster members on the aggregate view. The transition point is
the step with the largest one-step jump in LVC size (earliest on ties),
which makes sudden emergence of a large cluster directly measurable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .errors import BadOrdering, EmptySet, MissingAttribute, UnknownNode
from .multiplex import MultiplexNetwork
from .viability import ViabilitySpec, largest_viable_cluster

STRATEGIES = ("by_aoa_ascending", "by_frequency_descending", "random", "explicit")


@dataclass(frozen=True)
class AcquisitionOrdering:
    """How the full node set gets ordered for stepwise acquisition.

    Attribute-driven strategies order lexical nodes by the named attribute
    and put visual nodes first (concepts are assumed available before the
    words that name them); ties fall back to node id. ``random`` requires a
    seed, ``explicit`` requires the full permutation.
    """

    strategy: str
    seed: Optional[int] = None
    explicit: Optional[tuple] = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise BadOrdering(f"unknown strategy {self.strategy!r}")
        if self.strategy == "random" and self.seed is None:
            raise BadOrdering("random ordering requires a seed")
        if self.strategy == "explicit" and self.explicit is None:
            raise BadOrdering("explicit ordering requires the node sequence")

    def resolve(self, net: MultiplexNetwork) -> tuple:
        if self.strategy == "explicit":
            order = tuple(self.explicit)
        elif self.strategy == "random":
            rng = np.random.default_rng(self.seed)
            ids = net.node_ids
            order = tuple(ids[i] for i in rng.permutation(len(ids)))
        else:
            order = ordering_from_attributes(net, self.strategy)
        _check_permutation(net, order)
        return order


def _check_permutation(net: MultiplexNetwork, order: Sequence[str]) -> None:
    if len(order) != net.num_nodes or set(order) != set(net.node_ids):
        raise BadOrdering("ordering must be a permutation of the node set")


def ordering_from_attributes(net: MultiplexNetwork, strategy: str) -> tuple:
    """Derive an acquisition order from node attributes.

    Visual nodes come first (sorted by id); lexical nodes follow, sorted by
    age of acquisition ascending or frequency descending with id as the tie
    break. Every lexical node must carry attributes.
    """
    if strategy not in ("by_aoa_ascending", "by_frequency_descending"):
        raise BadOrdering(f"strategy {strategy!r} is not attribute-driven")
    visual = sorted(nid for nid in net.node_ids if net.node(nid).is_visual)
    lexical = []
    for nid in net.lexical_node_ids():
        attrs = net.node(nid).attributes
        if attrs is None:
            raise MissingAttribute(f"node {nid!r} has no attributes")
        lexical.append((nid, attrs))
    if strategy == "by_aoa_ascending":
        lexical.sort(key=lambda pair: (pair[1].age_of_acquisition, pair[0]))
    else:
        lexical.sort(key=lambda pair: (-pair[1].frequency, pair[0]))
    return tuple(visual) + tuple(nid for nid, _ in lexical)


@dataclass(frozen=True)
class GrowthStep:
    step: int
    node: str
    lvc_size: int
    mean_path_len: Optional[float]


@dataclass(frozen=True)
class Transition:
    step: int
    jump: int


@dataclass(frozen=True)
class GrowthTrajectory:
    steps: tuple
    transition: Transition

    def sizes(self) -> list:
        return [s.lvc_size for s in self.steps]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "node", "lvc_size", "mean_path_len"])
        for s in self.steps:
            mpl = "" if s.mean_path_len is None else repr(s.mean_path_len)
            writer.writerow([s.step, s.node, s.lvc_size, mpl])
        return buf.getvalue()

    def summary_json_dict(self) -> dict:
        return {
            "n_steps": len(self.steps),
            "final_lvc_size": self.steps[-1].lvc_size if self.steps else 0,
            "transition_step": self.transition.step,
            "transition_jump": self.transition.jump,
        }


def _mean_member_path_length(sub: MultiplexNetwork, members: frozenset) -> Optional[float]:
    """Mean shortest-path length over member pairs on the aggregate view.

    Members are mutually connected on every required layer, so the aggregate
    (whose edge set is a superset of any single layer's) always connects them.
    """
    if len(members) < 2:
        return None
    g = sub.aggregate_view()
    ordered = sorted(members)
    total = 0
    n_pairs = 0
    for i, u in enumerate(ordered):
        lengths = nx.single_source_shortest_path_length(g, u)
        for v in ordered[i + 1 :]:
            total += lengths[v]
            n_pairs += 1
    return total / n_pairs


def simulate_growth(
    net: MultiplexNetwork,
    ordering: AcquisitionOrdering,
    spec: ViabilitySpec,
) -> GrowthTrajectory:
    """Grow the network one node per step and recompute the LVC each time.

    Returns one step record per added node; the transition is the earliest
    step achieving the maximum single-step increase in LVC size. A flat
    trajectory reports a zero-magnitude transition at step 1.
    """
    spec.validate(net)
    order = ordering.resolve(net)
    steps = []
    previous_size = 0
    best_jump = None
    best_step = None
    active: list = []
    for t, nid in enumerate(order, start=1):
        active.append(nid)
        sub = net.induced(active)
        result = largest_viable_cluster(sub, spec)
        mpl = _mean_member_path_length(sub, result.members)
        steps.append(GrowthStep(step=t, node=nid, lvc_size=result.size, mean_path_len=mpl))
        jump = result.size - previous_size
        if best_jump is None or jump > best_jump:
            best_jump = jump
            best_step = t
        previous_size = result.size
    if best_step is None:
        raise BadOrdering("cannot simulate growth on an empty network")
    return GrowthTrajectory(steps=tuple(steps), transition=Transition(step=best_step, jump=best_jump))


@dataclass(frozen=True)
class AttributeMeans:
    polysemy: float
    concreteness: float
    frequency: float

    def to_json_dict(self) -> dict:
        return {
            "polysemy": self.polysemy,
            "concreteness": self.concreteness,
            "frequency": self.frequency,
        }


@dataclass(frozen=True)
class AttributeStats:
    members: AttributeMeans
    non_members: Optional[AttributeMeans]

    def to_json_dict(self) -> dict:
        return {
            "members": self.members.to_json_dict(),
            "non_members": None if self.non_members is None else self.non_members.to_json_dict(),
        }


def _means_over(net: MultiplexNetwork, ids: list) -> Optional[AttributeMeans]:
    rows = []
    for nid in ids:
        attrs = net.node(nid).attributes
        if attrs is None:
            raise MissingAttribute(f"node {nid!r} has no attributes")
        rows.append((attrs.polysemy, attrs.concreteness, attrs.frequency))
    if not rows:
        return None
    arr = np.asarray(rows, dtype=float)
    return AttributeMeans(
        polysemy=float(arr[:, 0].mean()),
        concreteness=float(arr[:, 1].mean()),
        frequency=float(arr[:, 2].mean()),
    )


def lvc_attribute_stats(net: MultiplexNetwork, members) -> AttributeStats:
    """Mean polysemy / concreteness / frequency inside vs outside a member set.

    Visual nodes carry no lexical attributes and are skipped on both sides.
    Non-member means are None when no lexical nodes remain outside.
    """
    member_set = frozenset(members)
    if not member_set:
        raise EmptySet("member set is empty")
    for nid in member_set:
        if not net.has_node(nid):
            raise UnknownNode(f"unknown node {nid!r}")
    lexical = net.lexical_node_ids()
    inside = [nid for nid in lexical if nid in member_set]
    outside = [nid for nid in lexical if nid not in member_set]
    member_means = _means_over(net, inside)
    if member_means is None:
        raise EmptySet("member set contains no lexical nodes")
    non_member_means = None
    if outside:
        with_attrs = [nid for nid in outside if net.node(nid).attributes is not None]
        non_member_means = _means_over(net, with_attrs)
    return AttributeStats(members=member_means, non_members=non_member_means)
