import dataclasses

import numpy as np
import pytest

from conftest import disjoint_pairs_net, hub_fixture, random_multiplex
from lexiplex.errors import EmptyLVC, MissingAttribute
from lexiplex.multiplex import LexicalAttributes
from lexiplex.null_models import null_model_experiment, reshuffle_attributes
from lexiplex.viability import ViabilitySpec, default_spec


def _attr_multiset(net):
    rows = []
    for nid in net.lexical_node_ids():
        a = net.node(nid).attributes
        rows.append((a.frequency, a.concreteness, a.polysemy, a.age_of_acquisition))
    return sorted(rows)


def _column_multisets(net):
    out = {}
    for field in ("frequency", "concreteness", "polysemy", "age_of_acquisition"):
        out[field] = sorted(
            getattr(net.node(nid).attributes, field) for nid in net.lexical_node_ids()
        )
    return out


def test_reshuffle_preserves_topology_and_column_multisets():
    net = hub_fixture()
    shuffled = reshuffle_attributes(net, seed=3)
    assert shuffled.edges == net.edges
    assert shuffled.presence == net.presence
    assert shuffled.layer_ids == net.layer_ids
    assert _column_multisets(shuffled) == _column_multisets(net)


def test_reshuffle_is_seed_deterministic_and_varies_across_seeds():
    net = hub_fixture()
    a = reshuffle_attributes(net, seed=7)
    b = reshuffle_attributes(net, seed=7)
    assert _attrs_by_node(a) == _attrs_by_node(b)
    # at least one of several seeds must move something
    moved = any(
        _attrs_by_node(reshuffle_attributes(net, seed=s)) != _attrs_by_node(net)
        for s in range(5)
    )
    assert moved


def _attrs_by_node(net):
    return {nid: net.node(nid).attributes for nid in net.lexical_node_ids()}


def test_columns_permute_independently():
    # find a seed where the polysemy column moved but frequency stayed put
    # somewhere (or vice versa) — proves the columns are not shuffled jointly
    net = hub_fixture()
    jointly = []
    for s in range(20):
        shuffled = reshuffle_attributes(net, seed=s)
        rows = _attr_multiset(shuffled)
        jointly.append(rows == _attr_multiset(net))
    # if columns moved as whole rows, every reshuffle would keep row tuples
    assert not all(jointly)


def test_reshuffle_requires_attributes():
    with pytest.raises(MissingAttribute):
        reshuffle_attributes(disjoint_pairs_net(), seed=1)


def test_hub_polysemy_z_score_pinned():
    net = hub_fixture()
    report = null_model_experiment(net, default_spec(net), n_reshuffles=200, seed=1)
    assert report.lvc_members == ("h1", "h2", "h3")
    assert report.real_member_means["polysemy"] == 6.0
    assert report.z_scores["polysemy"] == pytest.approx(2.1810437146089083, abs=1e-12)
    assert report.z_scores["polysemy"] > 2.0


def test_exceedance_rate_on_wider_periphery():
    net = hub_fixture(n_periphery=5)
    report = null_model_experiment(net, default_spec(net), n_reshuffles=200, seed=1)
    real = report.real_member_means["polysemy"]
    null = report.null_member_means["polysemy"]
    exceed = sum(1 for v in null if real > v) / len(null)
    assert exceed >= 0.95
    assert report.z_scores["polysemy"] > 2.0


def test_constant_attribute_leaves_z_undefined():
    net = hub_fixture()
    flat = {
        nid: dataclasses.replace(net.node(nid).attributes, polysemy=4)
        for nid in net.lexical_node_ids()
    }
    net = net.with_attributes(flat)
    report = null_model_experiment(net, default_spec(net), n_reshuffles=50, seed=1)
    assert report.z_scores["polysemy"] is None
    # other columns still vary
    assert report.z_scores["frequency"] is not None


def test_single_reshuffle_gives_degenerate_null():
    net = hub_fixture()
    report = null_model_experiment(net, default_spec(net), n_reshuffles=1, seed=1)
    assert len(report.null_member_means["polysemy"]) == 1
    # one draw has zero spread, so no z is defined
    assert report.z_scores["polysemy"] is None


def test_empty_lvc_is_an_error():
    net = disjoint_pairs_net()
    base = LexicalAttributes(frequency=1.0, concreteness=1.0, polysemy=1, age_of_acquisition=1.0)
    net = net.with_attributes({nid: base for nid in net.lexical_node_ids()})
    with pytest.raises(EmptyLVC):
        null_model_experiment(net, ViabilitySpec(["A", "B"]), n_reshuffles=10, seed=1)


def test_argument_validation():
    net = hub_fixture()
    with pytest.raises(ValueError):
        null_model_experiment(net, default_spec(net), n_reshuffles=0, seed=1)
    with pytest.raises(ValueError):
        null_model_experiment(net, default_spec(net), n_reshuffles=5, seed=1, n_jobs=0)


def test_serial_and_parallel_runs_match_exactly():
    net = hub_fixture()
    serial = null_model_experiment(net, default_spec(net), n_reshuffles=64, seed=9, n_jobs=1)
    parallel = null_model_experiment(net, default_spec(net), n_reshuffles=64, seed=9, n_jobs=4)
    assert serial == parallel


def test_report_members_match_real_lvc_on_random_nets():
    rng = np.random.default_rng(55)
    base = LexicalAttributes(frequency=1.0, concreteness=1.0, polysemy=1, age_of_acquisition=1.0)
    checked = 0
    while checked < 10:
        net = random_multiplex(rng)
        attrs = {
            nid: dataclasses.replace(base, frequency=float(rng.integers(1, 100)))
            for nid in net.lexical_node_ids()
        }
        net = net.with_attributes(attrs)
        spec = ViabilitySpec(list(net.layer_ids))
        try:
            report = null_model_experiment(net, spec, n_reshuffles=5, seed=checked)
        except EmptyLVC:
            continue
        from lexiplex.viability import largest_viable_cluster

        assert set(report.lvc_members) == set(largest_viable_cluster(net, spec).members)
        checked += 1


def test_json_and_csv_exports():
    net = hub_fixture()
    report = null_model_experiment(net, default_spec(net), n_reshuffles=3, seed=2)
    out = report.to_json_dict()
    assert out["n_reshuffles"] == 3
    assert out["lvc_members"] == ["h1", "h2", "h3"]
    assert set(out["z_scores"]) == {"polysemy", "concreteness", "frequency"}
    lines = report.null_means_csv().splitlines()
    assert lines[0] == "reshuffle,polysemy,concreteness,frequency"
    assert len(lines) == 4
