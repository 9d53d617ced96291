import numpy as np
import pytest

from conftest import random_multiplex, two_layer_net
from lexiplex.errors import (
    BadEdge,
    BadWeight,
    DuplicateLayer,
    DuplicateNode,
    MissingEndpoint,
    ParseError,
    UnknownLayer,
    UnknownNode,
    error_code,
)
from lexiplex.multiplex import (
    Layer,
    LexicalAttributes,
    MultiplexNetwork,
    WordNode,
    load_network,
    save_network,
)


def small_net():
    net = MultiplexNetwork([Layer("A"), Layer("B"), Layer("vis", kind="visual")])
    net = net.add_node(WordNode("w1", "huis", "nl"), ["A", "B"])
    net = net.add_node(WordNode("w2", "house", "en"), ["A", "B"])
    net = net.add_node(WordNode("c1", "house-image", "visual"), ["vis"])
    return net


def test_counts_track_the_four_components():
    net = small_net()
    assert net.num_nodes == 3
    assert net.num_layers == 3
    assert net.num_presence == 5
    assert net.num_edges == 0
    net = net.add_edge(("w1", "A"), ("w2", "A"), 2.0)
    net = net.add_edge(("w1", "A"), ("w1", "B"))
    net = net.add_edge(("c1", "vis"), ("w1", "A"))
    assert net.num_edges == 3


def test_duplicate_node_and_layer_rejected():
    net = small_net()
    with pytest.raises(DuplicateNode):
        net.add_node(WordNode("w1", "x", "nl"), ["A"])
    with pytest.raises(DuplicateLayer):
        net.with_layer(Layer("A"))


def test_add_node_unknown_layer():
    with pytest.raises(UnknownLayer):
        small_net().add_node(WordNode("w9", "x", "nl"), ["nope"])


def test_add_edge_requires_presence():
    net = small_net()
    with pytest.raises(MissingEndpoint):
        net.add_edge(("w1", "A"), ("c1", "A"))  # c1 not present on A
    with pytest.raises(UnknownLayer):
        net.add_edge(("w1", "nope"), ("w2", "A"))


def test_edge_weight_must_be_positive():
    net = small_net()
    for bad in (0.0, -1.0):
        with pytest.raises(BadWeight):
            net.add_edge(("w1", "A"), ("w2", "A"), bad)


def test_self_loop_rejected():
    with pytest.raises(BadEdge):
        small_net().add_edge(("w1", "A"), ("w1", "A"))


def test_cross_node_cross_layer_needs_a_visual_side():
    net = small_net()
    with pytest.raises(BadEdge):
        net.add_edge(("w1", "A"), ("w2", "B"))  # two lexical layers, two nodes
    # visual-to-lexical grounding is the allowed exception
    net = net.add_edge(("c1", "vis"), ("w2", "B"))
    assert net.num_edges == 1


def test_identity_coupling_allowed_and_undirected():
    net = small_net()
    net = net.add_edge(("w1", "A"), ("w1", "B"), 0.5)
    assert net.edge_weight(("w1", "B"), ("w1", "A")) == 0.5


def test_re_adding_edge_upserts_weight():
    net = small_net()
    net = net.add_edge(("w1", "A"), ("w2", "A"), 1.0)
    net = net.add_edge(("w2", "A"), ("w1", "A"), 3.0)
    assert net.num_edges == 1
    assert net.edge_weight(("w1", "A"), ("w2", "A")) == 3.0


def test_mutation_leaves_the_receiver_untouched():
    net = small_net()
    bigger = net.add_edge(("w1", "A"), ("w2", "A"))
    assert net.num_edges == 0
    assert bigger.num_edges == 1


def test_degree_per_layer_and_overall():
    net = MultiplexNetwork([Layer("A"), Layer("B")])
    for w in ("hub", "x", "y", "z", "lone"):
        net = net.add_node(WordNode(w, w, "nl"), ["A", "B"])
    for other in ("x", "y", "z"):
        net = net.add_edge(("hub", "A"), (other, "A"))
    assert net.degree("lone") == 0
    assert net.degree("hub", "A") == 3
    # two intra-layer edges plus one coupling counts 3 overall
    net2 = two_layer_net().add_edge(("w2", "A"), ("w2", "B"))
    assert net2.degree("w2", "A") == 2
    assert net2.degree("w2") == 3


def test_layer_subgraph_and_aggregate_views():
    net = small_net()
    net = net.add_edge(("w1", "A"), ("w2", "A"))
    net = net.add_edge(("w1", "B"), ("w2", "B"))
    net = net.add_edge(("w1", "A"), ("w1", "B"))
    net = net.add_edge(("c1", "vis"), ("w1", "A"))
    ga = net.layer_subgraph("A")
    assert set(ga.nodes) == {"w1", "w2"}
    assert ga.number_of_edges() == 1
    # intra edges per layer plus inter-layer edges account for all of E_M
    intra = sum(net.layer_subgraph(lid).number_of_edges() for lid in net.layer_ids)
    inter = sum(1 for e in net.edges if not e.is_intra_layer)
    assert intra + inter == net.num_edges
    agg = net.aggregate_view()
    assert agg.number_of_nodes() == net.num_nodes
    # couplings collapse; cross-modal and intra edges remain, labeled
    assert agg.number_of_edges() == 3
    assert agg.has_edge("c1", "w1")


def test_validate_passes_on_generated_networks():
    rng = np.random.default_rng(5)
    for _ in range(25):
        random_multiplex(rng).validate()


def test_unknown_lookups_raise():
    net = small_net()
    with pytest.raises(UnknownNode):
        net.node("nope")
    with pytest.raises(UnknownLayer):
        net.layer("nope")
    assert error_code(UnknownNode("x")) == "multiplex.UnknownNode"


def test_attribute_validation():
    with pytest.raises(ValueError):
        LexicalAttributes(frequency=-1.0, concreteness=3.0, polysemy=1, age_of_acquisition=4.0)
    with pytest.raises(ValueError):
        LexicalAttributes(frequency=1.0, concreteness=0.5, polysemy=1, age_of_acquisition=4.0)
    with pytest.raises(ValueError):
        LexicalAttributes(frequency=1.0, concreteness=3.0, polysemy=-2, age_of_acquisition=4.0)
    with pytest.raises(ValueError):
        WordNode("w", "", "nl")


# -- file I/O ----------------------------------------------------------------------


def test_four_line_tsv_fixture(tmp_path):
    edge = tmp_path / "net.tsv"
    edge.write_text(
        "#layer A custom\n"
        "A\tw1\tA\tw2\t1.0\n"
        "B\tw1\tB\tw2\t1.0\n"
        "A\tw1\tB\tw1\t1.0\n",
        encoding="utf-8",
    )
    net = load_network(edge)
    assert net.num_nodes == 2
    assert net.num_layers == 2
    assert net.num_edges == 3


def test_empty_file_gives_empty_network(tmp_path):
    edge = tmp_path / "net.tsv"
    edge.write_text("", encoding="utf-8")
    net = load_network(edge)
    assert net.num_nodes == 0 and net.num_layers == 0 and net.num_edges == 0


def test_negative_weight_line_rejected(tmp_path):
    edge = tmp_path / "net.tsv"
    edge.write_text("A\tw1\tA\tw2\t-1\n", encoding="utf-8")
    with pytest.raises(BadWeight):
        load_network(edge)


def test_malformed_line_reports_line_number(tmp_path):
    edge = tmp_path / "net.tsv"
    edge.write_text("A\tw1\tA\tw2\t1.0\nA\tw1\tw2\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_network(edge)
    assert err.value.line == 2


def test_edge_referencing_node_missing_from_registry(tmp_path):
    edge = tmp_path / "net.tsv"
    attrs = tmp_path / "attrs.csv"
    attrs.write_text(
        "node,surface,language,frequency,concreteness,polysemy,aoa\n"
        "w1,huis,nl,10.0,4.5,2,3.5\n",
        encoding="utf-8",
    )
    edge.write_text("A\tw1\tA\tw2\t1.0\n", encoding="utf-8")
    with pytest.raises(MissingEndpoint):
        load_network(edge, attrs)


def test_attribute_csv_parsing(tmp_path):
    attrs = tmp_path / "attrs.csv"
    attrs.write_text(
        "node,surface,language,frequency,concreteness,polysemy,aoa\n"
        "w1,huis,nl,10.0,4.5,2,3.5\n"
        "c1,house-image,visual,,,,\n",
        encoding="utf-8",
    )
    edge = tmp_path / "net.tsv"
    edge.write_text("#layer vis visual\nA\tw1\tA\tw1\t1.0\n", encoding="utf-8")
    with pytest.raises(BadEdge):
        load_network(edge, attrs)  # self loop
    edge.write_text("#layer vis visual\n#node A w1\n#node vis c1\n", encoding="utf-8")
    net = load_network(edge, attrs)
    assert net.node("w1").attributes.polysemy == 2
    assert net.node("c1").attributes is None
    assert net.node("c1").is_visual


def test_round_trip_identity_on_random_networks(tmp_path):
    rng = np.random.default_rng(11)
    for i in range(20):
        net = random_multiplex(rng)
        edge = tmp_path / f"net{i}.tsv"
        attrs = tmp_path / f"attrs{i}.csv"
        save_network(net, edge, attrs)
        assert load_network(edge, attrs) == net


def test_round_trip_keeps_attributes_and_kinds(tmp_path):
    net = MultiplexNetwork([Layer("sem", kind="free_association"), Layer("vis", kind="visual")])
    attrs = LexicalAttributes(frequency=12.5, concreteness=4.2, polysemy=3, age_of_acquisition=5.5)
    net = net.add_node(WordNode("w1", "huis", "nl", attrs), ["sem"])
    net = net.add_node(WordNode("c1", "house-image", "visual"), ["vis"])
    net = net.add_edge(("c1", "vis"), ("w1", "sem"), 0.75)
    edge, attr = tmp_path / "e.tsv", tmp_path / "a.csv"
    save_network(net, edge, attr)
    loaded = load_network(edge, attr)
    assert loaded == net
    assert loaded.layer("vis").is_visual
    assert loaded.node("w1").attributes == attrs
