import json

import networkx as nx
import pytest

from qfgl import formgraph as fg
from qfgl import gf
from qfgl import graphalgo as ga
from qfgl import harness as hs
from qfgl import subspace as ss
from qfgl.errors import EvenCharacteristic, OddDegree


@pytest.fixture(scope="module")
def f9_reports():
    return hs.verify(gf.make_tower(3, 1, 2), "all", seed=7, trials=200)


def test_every_claim_reported(f9_reports):
    assert {r.claim_id for r in f9_reports} == set(hs.CLAIMS)
    assert not hs.has_failures(f9_reports)


def test_reports_are_sorted_and_serialisable(f9_reports):
    keys = [r.key for r in f9_reports]
    assert keys == sorted(keys)
    for r in f9_reports[::25]:
        assert hs.VerifyReport.from_dict(json.loads(r.to_json())).to_json() == r.to_json()


def test_worker_count_does_not_change_output(f9):
    one = hs.verify(f9, "all", seed=3, trials=100, workers=1)
    two = hs.verify(f9, "all", seed=3, trials=100, workers=2)
    assert [r.to_json() for r in one] == [r.to_json() for r in two]


def test_replay_reproduces_reports(f9_reports):
    for r in f9_reports:
        if r.claim_id == "thm1.2" and not r.instance.get("summary") and r.instance["form"][0] % 3:
            continue  # thin out the 728 forms
        assert hs.replay(r.to_dict()).to_json() == r.to_json()


def test_replay_rejects_unknown_instance(f9):
    bogus = hs.VerifyReport("thm1.3.ii", {"field": f9.params(), "subspace": [[1, 0]], "extra": 1}, "pass")
    with pytest.raises(ValueError):
        hs.replay(bogus)


def test_status_validation():
    with pytest.raises(ValueError):
        hs.VerifyReport("thm1.2", {}, "maybe")


def test_known_exception_is_only_the_empty_graph(f27):
    reps = hs.verify(f27, "thm1.3.ii") + hs.verify(f27, "prop3.1")
    flagged = [r for r in reps if r.status == "known_exception"]
    assert {r.claim_id for r in flagged} == {"thm1.3.ii", "prop3.1"}
    assert all(r.instance["subspace"] == [] for r in flagged)
    assert not hs.has_failures(reps)
    G = fg.build_graph(fg.q_plus(f27), ss.zero(f27))
    assert G.arc_count() == 0


def test_zero_subspace_is_not_an_exception_over_f9(f9):
    # -1 is a square in F_9, so Gamma(Q+, {0}) has edges
    [rep] = [r for r in hs.verify(f9, "thm1.3.ii") if r.instance["subspace"] == []]
    assert rep.status == "pass" and rep.details["omega"] == 2


def test_even_characteristic_gating(f4):
    reps = hs.verify(f4, "all")
    assert all(r.status == "vacuous" for r in reps if r.claim_id != "thm1.2")
    assert all(r.status == "pass" for r in reps if r.claim_id == "thm1.2")
    with pytest.raises(EvenCharacteristic):
        hs.verify_main_all(f4)


def test_odd_degree_gating(f27):
    with pytest.raises(OddDegree):
        hs.subfield_clique_bound(f27)
    reps = hs.verify_remarks(f27, claims=["rem1.5", "rem1.6"])
    assert [r.status for r in reps] == ["vacuous", "vacuous"]


def test_unknown_claim(f9):
    with pytest.raises(KeyError):
        hs.verify(f9, "thm9.9")


def test_injected_fault_is_caught(f9, monkeypatch):
    real = ga.clique_number

    def off_by_one(G, **kw):
        rep = real(G, **kw)
        return ga.CliqueReport(rep.omega + 1, rep.witness, rep.node_count_explored)

    monkeypatch.setattr(ga, "clique_number", off_by_one)
    reps = hs.verify_main(f9, ss.from_rows(f9, [[1, 0]]), claims=["thm1.3.ii", "thm1.3.iii"])
    assert all(r.status == "fail" for r in reps)


def test_injected_classification_fault(f9, monkeypatch):
    monkeypatch.setattr(fg.FormClass, "always_undirected", property(lambda self: True))
    rep = hs.check_form_undirected(f9, (1, 1, 0))[0]
    assert rep.status == "fail" and rep.details["directed_witness"] is not None


def test_b_value_policy(f9, f81):
    assert hs.b_values(f9) == list(range(1, 9))
    assert hs.b_values(f81) == list(range(1, 81))
    big = gf.make_tower(3, 1, 6)
    sample = hs.b_values(big, seed=1)
    assert len(sample) == hs.DEFAULT_B_SAMPLE and sample == hs.b_values(big, seed=1)
    assert sample != hs.b_values(big, seed=2) and 0 not in sample


def test_subspace_sampling(f81):
    full = hs.subspaces_for(f81, [3])
    assert len(full) == 40
    some = hs.subspaces_for(f81, [2], v_sample=7, seed=4)
    assert len(some) == len(set(some)) == 7 and all(V.dim == 2 for V in some)
    assert some == hs.subspaces_for(f81, [2], v_sample=7, seed=4)


def test_diameter_vacuous_below_n4(f27):
    [rep] = hs.verify_diam(f27)
    assert rep.status == "vacuous"
    assert hs.diam_dims(gf.make_tower(3, 1, 8)) == [6, 7]


def test_lemma_trials_recorded(f9):
    reps = hs.verify_lemmas(f9, trials=50, claims=["lem2.4", "lem2.5"])
    assert [r.details.get("instances", r.details.get("random_instances")) for r in reps] == [51, 50]
    assert reps[1].details["quadratics"] == 81


def test_summary_csv(f9_reports):
    text = hs.summary_csv(f9_reports)
    lines = text.splitlines()
    assert lines[0] == "claim_id,pass,fail,known_exception,vacuous"
    assert lines[1].startswith("thm1.2,729,0,0,0")


def test_scan_ratio_rails_q3(f9, f27):
    for ctx in (f9, f27):
        rep = hs.scan_clique_ratio(ctx, list(range(ctx.n)))
        assert rep.summary["trivial_bound_violations"] == []
        assert all(r.rails_ok for r in rep.rows)
        assert rep.to_csv().splitlines()[0] == ",".join(hs.ScanReport.CSV_COLUMNS)


def test_scan_ratio_exposes_triangle_q5(f25):
    rep = hs.scan_clique_ratio(f25, [0])
    bad = rep.summary["trivial_bound_violations"]
    assert bad == [{"dim": 0, "subspace": [], "b": 1, "omega": 3}]
    # independent check: x ~ y iff x^2 + xy + y^2 = 0 has a triangle
    G = fg.build_graph(fg.q_b(f25, 1), ss.zero(f25))
    H = nx.from_numpy_array(G.adj.astype(int))
    assert max(len(c) for c in nx.find_cliques(H)) == 3


def test_estimate_s_reports_connectivity(f81):
    rep = hs.estimate_s(f81, b_sample=6, v_sample=4, seed=2)
    per = rep.summary["per_dim"]
    assert per["3"]["connected_fraction"] == 1.0
    assert rep.summary["empirical_s"] == 3 and rep.summary["consistent_with_s4_eq_3"]
    assert all(r.omega is None for r in rep.rows)
    # alpha * F_9 is always included and never connected (0 is isolated)
    W = ss.scale(ss.frobenius_fixed(f81, 2), f81.first_nonsquare())
    rows_w = [r for r in rep.rows if r.subspace == W.basis]
    assert rows_w and not any(r.connected for r in rows_w)


def test_diameter_sampled_q5_n4():
    reps = hs.verify_diam(gf.make_tower(5, 1, 4), b_sample=20, v_sample=10, seed=1)
    assert len(reps) == 10 and all(r.status == "pass" for r in reps)
    assert all(r.details["ambient"] == "odd prime" and r.details["checked_b"] == 20 for r in reps)


def test_diameter_over_prime_power_ground_field():
    # q = 9 is the smallest odd prime power with a non-vacuous instance (n = 4)
    reps = hs.verify_diam(gf.make_tower(3, 2, 4), b_sample=1, v_sample=1, seed=5)
    assert [r.status for r in reps] == ["pass"]
    assert reps[0].details["ambient"] == "odd prime power"
