import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypertile.builder import root_words
from hypertile.growth import OLDEST, SWEEP
from hypertile.mapcore import verify
from hypertile.oracle import (
    FATAL,
    INCONCLUSIVE,
    NOT_RUN,
    OPEN_YES,
    PORTFOLIO,
    REFUTED,
    REFUTED_YES,
    WEAK,
    WITNESS,
    all_root_words,
    canonical_word,
    cross_check,
    degree4_family,
    flag_for,
    refute,
    refute_each_root,
    shells,
)
from hypertile.tuples import angle_sum, parse_tuple

ORDERS = (OLDEST, SWEEP, PORTFOLIO)


@pytest.mark.parametrize("text,radius", [("3,4,5,5", 3), ("3,3,4,12", 3), ("5,5,6", 3), ("3,4,5,6", 2),
                                         ("3,3,4,7", 3)])
def test_refuted(text, radius):
    c = refute(parse_tuple(text), radius, 10**5)
    assert c.outcome == REFUTED
    assert c.map is None


@pytest.mark.parametrize("text,radius", [("3,5,10,12", 2), ("4,4,4,4,4", 3), ("7,7,7", 2), ("3,3,5,5", 2)])
def test_witness_verifies(text, radius):
    t = parse_tuple(text)
    c = refute(t, radius, 10**5)
    assert c.outcome == WITNESS
    assert verify(c.map, t).passed
    # every vertex in shells 0..radius is complete
    assert all(not c.map.is_boundary(v) for v in range(c.map.n_vertices) if c.map.layer[v] <= radius)


def test_frozen_node_counts():
    # the slice schedule is fixed, so node totals are reproducible
    assert refute(parse_tuple("3,4,5,5"), 3).nodes == 373
    assert refute(parse_tuple("3,3,4,12"), 3).nodes == 9
    assert refute(parse_tuple("5,5,6"), 3).nodes == 2
    assert refute(parse_tuple("3,5,10,12"), 2).nodes == 2524


def test_inconclusive_reports_budget():
    c = refute(parse_tuple("3,5,11,13"), 2, budget=1000)
    assert c.outcome == INCONCLUSIVE
    assert c.nodes == 1000
    assert c.to_json()["budget"] == 1000


def test_certificate_json():
    c = refute(parse_tuple("7,7,7"), 2, 10**4)
    out = c.to_json(with_map=True)
    assert out["outcome"] == "witness" and out["radius"] == 2 and out["nodes"] == c.nodes
    assert out["tuple"] == [7, 7, 7]
    assert "map" in out and "elapsed" not in out
    json.dumps(out)
    r = refute(parse_tuple("3,4,5,5"), 3).to_json(timing=True)
    assert r["outcome"] == "refuted" and "elapsed" in r and "map" not in r


def test_errors():
    with pytest.raises(ValueError):
        refute(parse_tuple("4,4,4,INF"), 2)
    with pytest.raises(ValueError):
        refute(parse_tuple("7,7,7"), 0)
    with pytest.raises(ValueError):
        refute(parse_tuple("7,7,7"), 1, order="RANDOM")


def test_shells():
    assert shells(1) == 2 and shells(3) == 4


@pytest.mark.parametrize("text,radius", [("3,4,5,5", 3), ("3,3,4,12", 2), ("3,4,5,7", 2), ("5,5,6", 2),
                                         ("7,7,7", 2), ("3,5,6,7", 2)])
def test_orders_agree(text, radius):
    outcomes = {refute(parse_tuple(text), radius, 10**5, order=o).outcome for o in ORDERS}
    assert len(outcomes) == 1


def test_reduced_symmetry_micro_tuple():
    t = parse_tuple("3,3,4,12")
    reduced = refute_each_root(t, 1)
    full = refute_each_root(t, 1, reduce_symmetry=False)
    assert len(full) == 12 and len(reduced) == 2
    assert set(reduced) == {canonical_word(w) for w in all_root_words(t)}
    # each unreduced root has the outcome of its class representative
    for w, outcome in full.items():
        assert reduced[canonical_word(w)] == outcome
    assert refute(t, 1, reduce_symmetry=False).outcome == refute(t, 1).outcome == REFUTED


def test_root_words_match_canonical_classes():
    for text in ("3,4,5,6", "3,3,4,4", "4,5,5,6,7"):
        t = parse_tuple(text)
        assert sorted(root_words(t)) == sorted({canonical_word(w) for w in all_root_words(t)})


SMALL = [tuple(t.components) for t in degree4_family(8) if angle_sum(t).value > 2]


@settings(max_examples=25)
@given(st.sampled_from(SMALL), st.integers(1, 2))
def test_refuted_is_never_contradicted(comps, radius):
    # soundness: a refutation in one order means no order finds a witness
    t = parse_tuple(",".join(map(str, comps)))
    outcomes = {refute(t, radius, 3000, order=o, materialize=False).outcome for o in ORDERS}
    assert not (REFUTED in outcomes and WITNESS in outcomes)


def test_larger_budget_keeps_refutation():
    t = parse_tuple("3,4,5,8")
    assert refute(t, 3, 10**4).outcome == REFUTED
    assert refute(t, 3, 10**5).outcome == REFUTED


def test_flag_table():
    assert flag_for(False, WITNESS) == FATAL
    assert flag_for(False, INCONCLUSIVE) == WEAK
    assert flag_for(False, REFUTED) is None
    assert flag_for(True, REFUTED) == REFUTED_YES
    assert flag_for(True, INCONCLUSIVE) == OPEN_YES
    assert flag_for(True, WITNESS) is None
    assert flag_for(True, NOT_RUN) is None


def test_degree4_family_size():
    fam = degree4_family(13)
    assert len(fam) == 977
    assert all(angle_sum(t).value >= 2 for t in fam)
    assert parse_tuple("4,4,4,4") in fam and parse_tuple("3,3,3,3") not in fam


def test_cross_check_small_family():
    fam = [parse_tuple(x) for x in ("3,4,5,5", "3,3,4,12", "4,4,5,5", "3,5,6,7")]
    rep = cross_check(fam, radius=2, budget=10**5)
    assert rep.completed
    by = {r.tuple: r for r in rep.rows}
    assert by[(3, 4, 5, 5)].outcome == REFUTED and by[(3, 4, 5, 5)].flag is None
    assert by[(4, 4, 5, 5)].outcome == WITNESS
    # [3,5,6,7] needs radius 3; at radius 2 a patch exists and is flagged
    assert by[(3, 5, 6, 7)].outcome == WITNESS and by[(3, 5, 6, 7)].flag == FATAL
    assert rep.n_fatal == 1
    s = rep.summary()
    assert s["tuples"] == 4 and s["radius"] == 2 and "elapsed" not in s


def test_cross_check_deadline_marks_not_run():
    fam = [parse_tuple(x) for x in ("3,4,5,5", "3,3,4,12", "4,4,5,5")]
    rep = cross_check(fam, radius=2, budget=10**4, deadline=0.0)
    assert not rep.completed
    assert {r.outcome for r in rep.rows} == {NOT_RUN}
    assert all(r.flag is None for r in rep.rows)


def test_time_limit_cuts_search():
    c = refute(parse_tuple("3,5,11,13"), 3, 10**7, time_limit=0.0)
    assert c.outcome == INCONCLUSIVE and c.timed_out
    assert c.to_json()["timed_out"] is True


def test_deadline_cut_row_is_not_completed():
    rep = cross_check([parse_tuple("3,5,11,13")], radius=3, budget=10**7, deadline=0.5)
    assert rep.rows[0].timed_out and rep.rows[0].outcome == INCONCLUSIVE
    assert not rep.completed
