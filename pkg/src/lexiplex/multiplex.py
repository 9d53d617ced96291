"""Multilayer lexical network: words, layers, node-layer presence, and edges.

A network is the quadruplet (V, L, V_M, E_M): a node set, an ordered list of
layers, the set of (node, layer) presence tuples, and undirected weighted
edges between presence tuples. Edges are either intra-layer, identity
couplings of one word across two layers, or cross-modal links between a
concept on a visual layer and a word on a lexical layer; any other
cross-node cross-layer edge is rejected.

Networks are immutable from the caller's perspective: ``add_node``,
``add_edge`` and ``with_layer`` return a new network and never touch the
receiver, so values can be shared freely across threads.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional

import networkx as nx

from .errors import (
    BadEdge,
    BadWeight,
    DuplicateLayer,
    DuplicateNode,
    MissingEndpoint,
    ParseError,
    UnknownLayer,
    UnknownNode,
)

#: Layer kind marking the perceptual/grounding layer; all other kinds are lexical.
VISUAL_KIND = "visual"

#: Kinds with a fixed meaning; anything else is treated as a custom kind name.
STANDARD_KINDS = frozenset(
    {"free_association", "synonym", "taxonomic", "phonological", VISUAL_KIND, "custom"}
)

#: Language tag marking concept/image nodes.
VISUAL_LANGUAGE = "visual"

Endpoint = tuple  # (node id, layer id)


@dataclass(frozen=True)
class LexicalAttributes:
    """Per-word norms: frequency (per million), concreteness rating in [1, 5],
    sense count, and age of acquisition in years."""

    frequency: float
    concreteness: float
    polysemy: int
    age_of_acquisition: float

    def __post_init__(self):
        if self.frequency < 0:
            raise ValueError(f"frequency must be >= 0, got {self.frequency}")
        if not (1.0 <= self.concreteness <= 5.0):
            raise ValueError(f"concreteness must be in [1, 5], got {self.concreteness}")
        if self.polysemy < 0 or int(self.polysemy) != self.polysemy:
            raise ValueError(f"polysemy must be a non-negative integer, got {self.polysemy}")
        if self.age_of_acquisition < 0:
            raise ValueError(f"age_of_acquisition must be >= 0, got {self.age_of_acquisition}")


@dataclass(frozen=True)
class WordNode:
    """A lexical entry, or a concept node when ``language == "visual"``."""

    id: str
    surface_form: str
    language: str
    attributes: Optional[LexicalAttributes] = None

    def __post_init__(self):
        if not self.surface_form:
            raise ValueError(f"node {self.id!r}: surface_form must be non-empty")

    @property
    def is_visual(self) -> bool:
        return self.language == VISUAL_LANGUAGE


@dataclass(frozen=True)
class Layer:
    id: str
    kind: str = "custom"
    description: str = ""

    @property
    def is_visual(self) -> bool:
        return self.kind == VISUAL_KIND


@dataclass(frozen=True)
class Edge:
    """Undirected weighted edge between two presence tuples, endpoints canonical."""

    a: Endpoint
    b: Endpoint
    weight: float = 1.0

    @property
    def is_intra_layer(self) -> bool:
        return self.a[1] == self.b[1]

    @property
    def is_coupling(self) -> bool:
        return self.a[0] == self.b[0] and self.a[1] != self.b[1]


def _canonical(a: Endpoint, b: Endpoint) -> tuple:
    return (a, b) if a <= b else (b, a)


class MultiplexNetwork:
    """The quadruplet (V, L, V_M, E_M) with copy-on-write mutation ops."""

    def __init__(self, layers: Iterable[Layer] = ()):
        self._nodes: dict = {}
        self._layers: dict = {}
        self._layer_order: list = []
        self._presence: set = set()
        self._edges: dict = {}  # canonical (endpoint, endpoint) -> weight
        self._adj_cache: dict = {}
        for layer in layers:
            if layer.id in self._layers:
                raise DuplicateLayer(f"layer {layer.id!r} already exists")
            self._layers[layer.id] = layer
            self._layer_order.append(layer.id)

    # -- copy-on-write helpers -------------------------------------------------

    def _copy(self) -> "MultiplexNetwork":
        clone = MultiplexNetwork.__new__(MultiplexNetwork)
        clone._nodes = dict(self._nodes)
        clone._layers = dict(self._layers)
        clone._layer_order = list(self._layer_order)
        clone._presence = set(self._presence)
        clone._edges = dict(self._edges)
        clone._adj_cache = {}
        return clone

    # -- accessors ---------------------------------------------------------------

    @property
    def node_ids(self) -> tuple:
        return tuple(sorted(self._nodes))

    @property
    def layer_ids(self) -> tuple:
        return tuple(self._layer_order)

    @property
    def layers(self) -> tuple:
        return tuple(self._layers[lid] for lid in self._layer_order)

    @property
    def presence(self) -> frozenset:
        return frozenset(self._presence)

    @property
    def edges(self) -> tuple:
        return tuple(
            Edge(a, b, w) for (a, b), w in sorted(self._edges.items())
        )

    @property
    def num_nodes(self) -> int:
        return len(self._nodes)

    @property
    def num_layers(self) -> int:
        return len(self._layers)

    @property
    def num_presence(self) -> int:
        return len(self._presence)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def node(self, node_id: str) -> WordNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def layer(self, layer_id: str) -> Layer:
        try:
            return self._layers[layer_id]
        except KeyError:
            raise UnknownLayer(f"unknown layer {layer_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def has_layer(self, layer_id: str) -> bool:
        return layer_id in self._layers

    def is_present(self, node_id: str, layer_id: str) -> bool:
        return (node_id, layer_id) in self._presence

    def layers_of(self, node_id: str) -> tuple:
        self.node(node_id)
        return tuple(lid for lid in self._layer_order if (node_id, lid) in self._presence)

    def lexical_layer_ids(self) -> tuple:
        return tuple(lid for lid in self._layer_order if not self._layers[lid].is_visual)

    def lexical_node_ids(self) -> tuple:
        return tuple(nid for nid in sorted(self._nodes) if not self._nodes[nid].is_visual)

    def edge_weight(self, a: Endpoint, b: Endpoint) -> Optional[float]:
        return self._edges.get(_canonical(tuple(a), tuple(b)))

    # -- mutation (returns a new network) -----------------------------------------

    def with_layer(self, layer: Layer) -> "MultiplexNetwork":
        if layer.id in self._layers:
            raise DuplicateLayer(f"layer {layer.id!r} already exists")
        clone = self._copy()
        clone._layers[layer.id] = layer
        clone._layer_order.append(layer.id)
        return clone

    def add_node(self, node: WordNode, layers: Iterable[str]) -> "MultiplexNetwork":
        """Add a node together with its presence tuples. Creates no edges."""
        if node.id in self._nodes:
            raise DuplicateNode(f"node {node.id!r} already exists")
        layer_list = list(layers)
        for lid in layer_list:
            if lid not in self._layers:
                raise UnknownLayer(f"unknown layer {lid!r}")
        clone = self._copy()
        clone._nodes[node.id] = node
        clone._presence.update((node.id, lid) for lid in layer_list)
        return clone

    def _check_edge_shape(self, a: Endpoint, b: Endpoint) -> None:
        if a == b:
            raise BadEdge(f"self-loop {a!r} is forbidden")
        la, lb = self._layers[a[1]], self._layers[b[1]]
        if a[1] == b[1]:
            return  # intra-layer
        if a[0] == b[0]:
            return  # identity coupling of one word across layers
        # Cross-node cross-layer edges exist only as visual grounding links.
        if la.is_visual == lb.is_visual:
            raise BadEdge(
                f"cross-layer edge {a!r}-{b!r} must be an identity coupling "
                "or link a visual layer to a lexical layer"
            )

    def add_edge(self, a: Endpoint, b: Endpoint, weight: float = 1.0) -> "MultiplexNetwork":
        """Store an undirected edge between two presence tuples.

        Re-adding an existing edge replaces its weight (upsert).
        """
        a, b = tuple(a), tuple(b)
        for ep in (a, b):
            if ep[1] not in self._layers:
                raise UnknownLayer(f"unknown layer {ep[1]!r}")
            if ep not in self._presence:
                raise MissingEndpoint(f"endpoint {ep!r} is not in the presence set")
        if weight <= 0:
            raise BadWeight(f"edge weight must be > 0, got {weight}")
        self._check_edge_shape(a, b)
        clone = self._copy()
        clone._edges[_canonical(a, b)] = float(weight)
        return clone

    # -- views ---------------------------------------------------------------------

    def layer_subgraph(self, layer_id: str) -> nx.Graph:
        """Simple graph of one layer: its present nodes and intra-layer edges."""
        self.layer(layer_id)
        g = nx.Graph()
        g.add_nodes_from(nid for (nid, lid) in self._presence if lid == layer_id)
        for (a, b), w in self._edges.items():
            if a[1] == layer_id and b[1] == layer_id:
                g.add_edge(a[0], b[0], weight=w)
        return g

    def aggregate_view(self) -> nx.MultiGraph:
        """Edge-colored aggregate: one node per word, edges labeled by layer.

        Identity couplings collapse onto single nodes and are dropped;
        cross-modal grounding edges are kept, labeled with their visual layer.
        """
        g = nx.MultiGraph()
        g.add_nodes_from(sorted(self._nodes))
        for (a, b), w in sorted(self._edges.items()):
            if a[0] == b[0]:
                continue
            if a[1] == b[1]:
                label = a[1]
            else:
                label = a[1] if self._layers[a[1]].is_visual else b[1]
            g.add_edge(a[0], b[0], key=label, layer=label, weight=w)
        return g

    def degree(self, node_id: str, layer_id: Optional[str] = None) -> int:
        """Intra-layer degree on one layer, or — when ``layer_id`` is None —
        the count of all distinct edges touching the node (couplings and
        cross-modal links included, each once)."""
        self.node(node_id)
        if layer_id is not None:
            self.layer(layer_id)
            ep = (node_id, layer_id)
            return sum(
                1
                for (a, b) in self._edges
                if (a == ep or b == ep) and a[1] == b[1]
            )
        return sum(1 for (a, b) in self._edges if a[0] == node_id or b[0] == node_id)

    def intra_layer_adjacency(self, layer_id: str) -> dict:
        """node -> set of intra-layer neighbors on the given layer (cached)."""
        if layer_id not in self._adj_cache:
            self.layer(layer_id)
            adj: dict = {
                nid: set() for (nid, lid) in self._presence if lid == layer_id
            }
            for (a, b) in self._edges:
                if a[1] == layer_id and b[1] == layer_id:
                    adj[a[0]].add(b[0])
                    adj[b[0]].add(a[0])
            self._adj_cache[layer_id] = adj
        return self._adj_cache[layer_id]

    def induced(self, node_ids: Iterable[str]) -> "MultiplexNetwork":
        """Sub-multiplex on a node subset: presence and edges restricted to it."""
        keep = set(node_ids)
        for nid in keep:
            self.node(nid)
        clone = MultiplexNetwork.__new__(MultiplexNetwork)
        clone._nodes = {nid: n for nid, n in self._nodes.items() if nid in keep}
        clone._layers = dict(self._layers)
        clone._layer_order = list(self._layer_order)
        clone._presence = {(n, l) for (n, l) in self._presence if n in keep}
        clone._edges = {
            (a, b): w
            for (a, b), w in self._edges.items()
            if a[0] in keep and b[0] in keep
        }
        clone._adj_cache = {}
        return clone

    def with_attributes(self, attributes: Mapping) -> "MultiplexNetwork":
        """Same topology, with the given nodes' attribute payloads replaced."""
        clone = self._copy()
        for nid, attrs in attributes.items():
            node = self.node(nid)
            clone._nodes[nid] = replace(node, attributes=attrs)
        return clone

    def validate(self) -> None:
        """Full referential-integrity scan; raises on any violation."""
        for (nid, lid) in self._presence:
            if nid not in self._nodes:
                raise UnknownNode(f"presence tuple references unknown node {nid!r}")
            if lid not in self._layers:
                raise UnknownLayer(f"presence tuple references unknown layer {lid!r}")
        for (a, b), w in self._edges.items():
            for ep in (a, b):
                if ep not in self._presence:
                    raise MissingEndpoint(f"edge endpoint {ep!r} missing from presence")
            if w <= 0:
                raise BadWeight(f"edge {a!r}-{b!r} has non-positive weight {w}")
            self._check_edge_shape(a, b)
        if set(self._layer_order) != set(self._layers):
            raise UnknownLayer("layer order out of sync with layer set")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiplexNetwork):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._layers == other._layers
            and self._presence == other._presence
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return (
            f"MultiplexNetwork(|V|={self.num_nodes}, |L|={self.num_layers}, "
            f"|V_M|={self.num_presence}, |E_M|={self.num_edges})"
        )


# -- file I/O ---------------------------------------------------------------------

ATTRIBUTE_HEADER = ["node", "surface", "language", "frequency", "concreteness", "polysemy", "aoa"]


def _fmt(value: float) -> str:
    return repr(float(value))


def load_network(edge_file, attribute_file=None) -> MultiplexNetwork:
    """Build a network from an edge TSV, optionally with an attribute CSV.

    When the attribute file is given it is the node registry, and edge rows
    referencing nodes missing from it raise ``MissingEndpoint``; without it,
    nodes are auto-registered on first mention (surface form = id, language
    ``visual`` on visual layers, ``und`` otherwise, no attributes). Layers
    are auto-created with kind ``custom`` on first mention unless declared
    by a ``#layer`` directive. Presence derives from edge endpoints plus
    ``#node`` directives (which record node-layer tuples carrying no edges).
    """
    net = MultiplexNetwork.__new__(MultiplexNetwork)
    net._nodes = {}
    net._layers = {}
    net._layer_order = []
    net._presence = set()
    net._edges = {}
    net._adj_cache = {}

    has_registry = attribute_file is not None
    if has_registry:
        with _open_for_read(attribute_file) as fh:
            _load_attributes(net, fh)
    with _open_for_read(edge_file) as fh:
        _load_edges(net, fh, has_registry)
    return net


def _open_for_read(source):
    if hasattr(source, "read"):
        return io.StringIO(source.read())
    return open(os.fspath(source), "r", encoding="utf-8", newline="")


def _load_attributes(net: MultiplexNetwork, fh) -> None:
    reader = csv.reader(fh)
    rows = list(reader)
    if not rows:
        return
    if rows[0] != ATTRIBUTE_HEADER:
        raise ParseError(f"bad attribute header {rows[0]!r}", line=1)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell for cell in row):
            continue
        if len(row) != len(ATTRIBUTE_HEADER):
            raise ParseError(f"expected {len(ATTRIBUTE_HEADER)} cells, got {len(row)}", line=lineno)
        node_id, surface, language = row[0], row[1], row[2]
        numeric = row[3:7]
        if node_id in net._nodes:
            raise DuplicateNode(f"node {node_id!r} repeated in attribute file (line {lineno})")
        if all(cell == "" for cell in numeric):
            attributes = None
        elif any(cell == "" for cell in numeric):
            raise ParseError("numeric cells must be all present or all empty", line=lineno)
        else:
            try:
                attributes = LexicalAttributes(
                    frequency=float(numeric[0]),
                    concreteness=float(numeric[1]),
                    polysemy=int(numeric[2]),
                    age_of_acquisition=float(numeric[3]),
                )
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
        try:
            net._nodes[node_id] = WordNode(node_id, surface, language, attributes)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None


def _ensure_layer(net: MultiplexNetwork, layer_id: str) -> None:
    if layer_id not in net._layers:
        net._layers[layer_id] = Layer(layer_id, kind="custom")
        net._layer_order.append(layer_id)


def _ensure_node(
    net: MultiplexNetwork, node_id: str, layer_id: str, has_registry: bool, lineno: int
) -> None:
    if node_id in net._nodes:
        return
    if has_registry:
        raise MissingEndpoint(
            f"line {lineno}: node {node_id!r} not declared in the attribute file"
        )
    language = VISUAL_LANGUAGE if net._layers[layer_id].is_visual else "und"
    net._nodes[node_id] = WordNode(node_id, node_id, language)


def _load_edges(net: MultiplexNetwork, fh, has_registry: bool) -> None:
    for lineno, raw in enumerate(fh, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            _handle_directive(net, line, lineno, has_registry)
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ParseError(f"expected 5 tab-separated fields, got {len(parts)}", line=lineno)
        layer_a, node_a, layer_b, node_b, weight_s = parts
        try:
            weight = float(weight_s)
        except ValueError:
            raise ParseError(f"bad weight {weight_s!r}", line=lineno) from None
        if weight <= 0:
            raise BadWeight(f"line {lineno}: edge weight must be > 0, got {weight}")
        _ensure_layer(net, layer_a)
        _ensure_layer(net, layer_b)
        _ensure_node(net, node_a, layer_a, has_registry, lineno)
        _ensure_node(net, node_b, layer_b, has_registry, lineno)
        a, b = (node_a, layer_a), (node_b, layer_b)
        if a == b:
            raise BadEdge(f"line {lineno}: self-loop {a!r} is forbidden")
        net._presence.add(a)
        net._presence.add(b)
        net._check_edge_shape(a, b)
        net._edges[_canonical(a, b)] = weight


def _handle_directive(net: MultiplexNetwork, line: str, lineno: int, has_registry: bool) -> None:
    body = line[1:].strip()
    if body.startswith("layer "):
        parts = body.split(None, 3)
        if len(parts) < 3:
            raise ParseError("expected '#layer <id> <kind> [description]'", line=lineno)
        _, layer_id, kind = parts[:3]
        description = parts[3] if len(parts) == 4 else ""
        if layer_id in net._layers:
            raise ParseError(f"layer {layer_id!r} declared twice", line=lineno)
        net._layers[layer_id] = Layer(layer_id, kind=kind, description=description)
        net._layer_order.append(layer_id)
    elif body.startswith("node "):
        parts = body.split()
        if len(parts) != 3:
            raise ParseError("expected '#node <layer> <node>'", line=lineno)
        _, layer_id, node_id = parts
        _ensure_layer(net, layer_id)
        _ensure_node(net, node_id, layer_id, has_registry, lineno)
        net._presence.add((node_id, layer_id))
    # any other '#' line is a plain comment


def save_network(net: MultiplexNetwork, edge_file, attribute_file=None) -> None:
    """Write the two-file form, deterministically sorted (layers, then nodes).

    The attribute CSV is only written when a path for it is given; the edge
    TSV alone round-trips topology but not node payloads.
    """
    if attribute_file is not None:
        with open(os.fspath(attribute_file), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(ATTRIBUTE_HEADER)
            for nid in sorted(net._nodes):
                node = net._nodes[nid]
                attrs = node.attributes
                if attrs is None:
                    numeric = ["", "", "", ""]
                else:
                    numeric = [
                        _fmt(attrs.frequency),
                        _fmt(attrs.concreteness),
                        str(attrs.polysemy),
                        _fmt(attrs.age_of_acquisition),
                    ]
                writer.writerow([nid, node.surface_form, node.language] + numeric)

    covered = set()
    for (a, b) in net._edges:
        covered.add(a)
        covered.add(b)
    lines = []
    for lid in sorted(net._layers):
        layer = net._layers[lid]
        suffix = f" {layer.description}" if layer.description else ""
        lines.append(f"#layer {lid} {layer.kind}{suffix}")
    for (nid, lid) in sorted(net._presence - covered, key=lambda p: (p[1], p[0])):
        lines.append(f"#node {lid} {nid}")
    for (a, b), w in sorted(net._edges.items()):
        lines.append(f"{a[1]}\t{a[0]}\t{b[1]}\t{b[0]}\t{_fmt(w)}")
    with open(os.fspath(edge_file), "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
