"""Shared network builders for the test suite."""

from __future__ import annotations

import numpy as np

from lexiplex.multiplex import Layer, LexicalAttributes, MultiplexNetwork, WordNode


def two_layer_net() -> MultiplexNetwork:
    """Layer A: path w1-w2-w3; layer B: single edge w1-w3 (w2 isolated on B)."""
    net = MultiplexNetwork([Layer("A"), Layer("B")])
    for w in ("w1", "w2", "w3"):
        net = net.add_node(WordNode(w, w, "nl"), ["A", "B"])
    net = net.add_edge(("w1", "A"), ("w2", "A"))
    net = net.add_edge(("w2", "A"), ("w3", "A"))
    net = net.add_edge(("w1", "B"), ("w3", "B"))
    return net


def disjoint_pairs_net() -> MultiplexNetwork:
    """Four nodes, two layers whose edge sets share no co-connected pair."""
    net = MultiplexNetwork([Layer("A"), Layer("B")])
    for w in ("w1", "w2", "w3", "w4"):
        net = net.add_node(WordNode(w, w, "nl"), ["A", "B"])
    net = net.add_edge(("w1", "A"), ("w2", "A"))
    net = net.add_edge(("w3", "A"), ("w4", "A"))
    net = net.add_edge(("w1", "B"), ("w3", "B"))
    net = net.add_edge(("w2", "B"), ("w4", "B"))
    return net


def clique_net(n: int, layer: str = "A") -> MultiplexNetwork:
    net = MultiplexNetwork([Layer(layer)])
    ids = [f"w{i}" for i in range(1, n + 1)]
    for w in ids:
        net = net.add_node(WordNode(w, w, "nl"), [layer])
    for i in range(n):
        for j in range(i + 1, n):
            net = net.add_edge((ids[i], layer), (ids[j], layer))
    return net


def hub_fixture(n_periphery: int = 3) -> MultiplexNetwork:
    """Three mutually connected hub words with polysemy {5,6,7}; periphery
    words (polysemy 1) present on both layers but isolated on each."""
    net = MultiplexNetwork([Layer("L1", kind="free_association"), Layer("L2", kind="synonymy")])
    hubs = [("h1", 5), ("h2", 6), ("h3", 7)]
    periphery = [(f"p{i}", 1) for i in range(1, n_periphery + 1)]
    concreteness = {"h1": 3.0, "h2": 3.5, "h3": 4.0}
    frequency = {"h1": 30.0, "h2": 20.0, "h3": 10.0}
    for i, (nid, poly) in enumerate(hubs + periphery):
        attrs = LexicalAttributes(
            frequency=frequency.get(nid, float(i + 1)),
            concreteness=concreteness.get(nid, 2.0 + 0.25 * i),
            polysemy=poly,
            age_of_acquisition=3.0 + i,
        )
        net = net.add_node(WordNode(nid, nid, "nl", attrs), ["L1", "L2"])
    for a, b in (("h1", "h2"), ("h2", "h3"), ("h1", "h3")):
        net = net.add_edge((a, "L1"), (b, "L1"))
        net = net.add_edge((a, "L2"), (b, "L2"))
    return net


def explosive_net() -> tuple:
    """14 nodes: a path v01..v13 on layer A and a star around hub h on layer B.

    Until h arrives nothing is co-connected on B, so the LVC stays empty;
    adding h last connects everything on both layers at once and the LVC
    jumps 0 -> 14 in a single step.
    """
    net = MultiplexNetwork([Layer("A"), Layer("B")])
    ids = [f"v{i:02d}" for i in range(1, 14)]
    for w in ids + ["h"]:
        net = net.add_node(WordNode(w, w, "nl"), ["A", "B"])
    for a, b in zip(ids, ids[1:]):
        net = net.add_edge((a, "A"), (b, "A"))
    net = net.add_edge(("h", "A"), (ids[0], "A"))
    for w in ids:
        net = net.add_edge(("h", "B"), (w, "B"))
    return net, tuple(ids) + ("h",)


def random_multiplex(
    rng: np.random.Generator,
    n_nodes: int = None,
    n_layers: int = None,
    edge_p: float = None,
    presence_p: float = 0.85,
) -> MultiplexNetwork:
    """Small random multiplex for oracle/property sweeps."""
    n = int(n_nodes if n_nodes is not None else rng.integers(2, 11))
    n_l = int(n_layers if n_layers is not None else rng.integers(2, 4))
    p = float(edge_p if edge_p is not None else rng.uniform(0.1, 0.9))
    layer_ids = [chr(ord("A") + i) for i in range(n_l)]
    net = MultiplexNetwork([Layer(lid) for lid in layer_ids])
    ids = [f"w{i:02d}" for i in range(n)]
    for w in ids:
        layers = [lid for lid in layer_ids if rng.random() < presence_p]
        if not layers:
            layers = [layer_ids[int(rng.integers(0, n_l))]]
        net = net.add_node(WordNode(w, w, "nl"), layers)
    for lid in layer_ids:
        present = [w for w in ids if net.is_present(w, lid)]
        for i in range(len(present)):
            for j in range(i + 1, len(present)):
                if rng.random() < p:
                    net = net.add_edge((present[i], lid), (present[j], lid))
    return net
