import pytest

import crnsim


def test_generators_report_params():
    net = crnsim.two_node(4, 2, seed=3)
    assert net.node_count() == 2
    assert net.params.k == 2
    assert net.overlap(0, 1) == 2
    assert net.edges() == [(0, 1)]
    star = crnsim.star(8, 4, 1, seed=1)
    assert star.params.delta_max == 8
    assert star.problems() == []


def test_instance_json_round_trip():
    net = crnsim.random_instance(12, 8, 4, 2, 4, 0.4, seed=5)
    again = crnsim.NetworkInstance.from_json(net.to_json())
    assert again.adjacency == net.adjacency
    assert again.channel_sets == net.channel_sets


def test_count_single_broadcaster():
    estimate, round_ = crnsim.count(1, seed=2)
    assert estimate == 4
    assert round_ is not None


def test_cseek_two_node():
    net = crnsim.two_node(4, 2, seed=1)
    r = crnsim.cseek(net, seed=1, a1=32, a2=32)
    assert r["sound"]
    assert r["complete"]
    assert r["ids"] == [[1], [0]]
    assert r["slots_to_discovery"] <= r["budget"]


def test_ckseek_rejects_small_k_hat():
    net = crnsim.two_node(4, 2, seed=1)
    with pytest.raises(ValueError):
        crnsim.ckseek(net, k_hat=1, seed=1)


def test_cgcast_small_random():
    net = crnsim.random_instance(10, 8, 4, 2, 4, 0.3, seed=9)
    r = crnsim.cgcast(net, 0, seed=4, a1=8, a2=8)
    assert set(r) >= {"colored", "all_informed", "informed_at", "proper"}


def test_games():
    won, rounds = crnsim.play_game(4, 4, player="fresh-pair", seed=2)
    assert won and rounds <= 4
    won, rounds = crnsim.play_game(32, 1, max_rounds=3, seed=2)
    assert rounds <= 3
    with pytest.raises(ValueError):
        crnsim.play_game(4, 1, player="oracle")


def test_run_config_and_csv():
    cfg = {"scenario": "count", "count": {"m": 1}, "trials": 3, "master_seed": 4}
    out = crnsim.run(cfg)
    assert out["summary"]["trials"] == 3
    assert len(out["records"]) == 3
    text = crnsim.run_csv(cfg)
    assert text.startswith("# config: ")
    assert text == crnsim.run_csv(cfg)
    assert crnsim.resolve_config(cfg)["protocol"]["a1"] == 4.0


def test_config_faults():
    with pytest.raises(crnsim.ConfigurationFault):
        crnsim.run({"scenario": "count", "trials": 0})
    with pytest.raises(ValueError):
        crnsim.resolve_config({"scenario": "cseek", "unknown": 1})
