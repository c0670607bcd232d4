import pytest
from conftest import built, built_kh

from hypertile import analysis as A
from hypertile.builder import extend_layer
from hypertile.mapcore import deserialize, face_cycle, serialize
from hypertile.tuples import parse_tuple


def _copy(m):
    return deserialize(serialize(m))


def _complete(m, f):
    return not any(m.is_boundary(v) for v in m.face_vertices(f))


def _split_by_vertex_sets(m, f):
    """(nabla, delta) for a complete face, from vertex sets alone."""
    vf = set(m.face_vertices(f))
    nabla = delta = 0
    for g in range(m.n_faces):
        if m.face_size[g] != 3:
            continue
        common = len(vf & set(m.face_vertices(g)))
        if common == 1:
            nabla += 1
        elif common == 2:
            delta += 1
    return nabla, delta


@pytest.mark.parametrize("text", ["3,5,10,12", "3,5,12,14"])
def test_pentagons_all_type_4(text):
    rep = A.pentagon_stats(built(text))
    assert rep.counts["complete_pentagons"] > 0
    assert rep.checks["all_type_4"]
    assert set(rep.histogram) == {4}


@pytest.mark.parametrize("text", ["3,5,10,12", "3,5,12,14"])
def test_pentagon_split_matches_vertex_set_count(text):
    m = built(text)
    rep = A.pentagon_stats(m)
    nabla = delta = 0
    for f in range(m.n_faces):
        if m.face_size[f] == 5 and _complete(m, f):
            n, d = _split_by_vertex_sets(m, f)
            nabla += n
            delta += d
    assert (rep.counts["nabla"], rep.counts["delta"]) == (nabla, delta)


def test_per_pentagon_split_is_three_to_one():
    # a type-4 pentagon with one triangle at each corner: n + 2d = 5, n + d = 4
    rep = A.pentagon_stats(built("3,5,10,12"))
    assert rep.counts["per_pentagon_splits"] == {"3:1": rep.counts["complete_pentagons"]}
    assert not rep.checks["per_pentagon_nabla1_delta3"]
    assert not rep.checks["aggregate_nabla_delta_1_3"]
    assert not rep.passed


@pytest.mark.parametrize("text", ["3,5,10,12", "3,5,12,14", "3,5,10,14", "3,5,12,13"])
def test_bijection(text):
    rep = A.triangle_pentagon_bijection(built(text))
    assert rep.counts["interior_triangles"] > 0
    assert rep.passed


def test_big_faces_parity():
    # a k-gon with m edge-sharing triangles has k - m even
    m = built("3,5,10,12")
    seen = 0
    for f in range(m.n_faces):
        if m.face_size[f] >= 10 and _complete(m, f):
            d = sum(1 for g in set(m.face[m.opp[x]] for x in m.face_darts(f)) if m.face_size[g] == 3)
            assert (m.face_size[f] - d) % 2 == 0
            seen += 1
    assert seen > 0


def test_relations_exhaustive_and_exclusive():
    m = built("3,5,10,12")
    for t in range(m.n_faces):
        if m.face_size[t] != 3:
            continue
        rec = A.attachments(m, t)
        for f, r in rec.relations:
            assert r in (A.NABLA, A.DELTA)
            common = len(set(m.face_vertices(t)) & set(m.face_vertices(f)))
            assert common == (1 if r == A.NABLA else 2)


def test_face_type_incomplete_raises():
    m = built("3,5,10,12")
    f = next(f for f in range(m.n_faces) if not _complete(m, f))
    with pytest.raises(A.AnalysisError) as e:
        A.face_type_of(m, f)
    assert e.value.kind == "INCOMPLETE"


def test_attachments_needs_triangle():
    m = built("3,5,10,12")
    f = next(f for f in range(m.n_faces) if m.face_size[f] == 5)
    with pytest.raises(A.AnalysisError):
        A.attachments(m, f)


@pytest.mark.parametrize("text", ["3,5,11,13", "3,5,6,7", "7,7,7"])
def test_wrong_class(text):
    m = built("7,7,7", 2)
    with pytest.raises(A.AnalysisError) as e:
        A.pentagon_stats(m, parse_tuple(text))
    assert e.value.kind == "WRONG_CLASS"
    with pytest.raises(A.AnalysisError):
        A.kh_incidence(m)
    with pytest.raises(A.AnalysisError):
        A.periodicity_obstruction_report(m, "OTHER")


def test_records_survive_extension():
    # face ids are renumbered by the extension, so compare the records as multisets
    t = parse_tuple("3,5,10,12")
    m = built("3,5,10,12", 2)
    out = extend_layer(m, t)
    before = A.pentagon_stats(m)
    after = A.pentagon_stats(out)
    assert after.counts["complete_pentagons"] >= before.counts["complete_pentagons"]
    for split, n in before.counts["per_pentagon_splits"].items():
        assert after.counts["per_pentagon_splits"].get(split, 0) >= n
    for k, n in before.histogram.items():
        assert after.histogram.get(k, 0) >= n


# -- mutations -------------------------------------------------------------------


def test_mutated_pentagon_type_fails():
    m = _copy(built("3,5,10,12"))
    p = next(f for f in range(m.n_faces) if m.face_size[f] == 5 and _complete(m, f))
    tri = next(g for g in face_cycle(m, p) if m.face_size[g] == 3)
    m.face_size[tri] = 4
    rep = A.pentagon_stats(m, parse_tuple("3,5,10,12"))
    assert not rep.checks["all_type_4"]


def test_mutated_delta_becomes_nabla():
    # drop the edge-sharing triangle of one pentagon from the count
    m = _copy(built("3,5,10,12"))
    base = A.pentagon_stats(m)
    p = next(f for f in range(m.n_faces) if m.face_size[f] == 5 and _complete(m, f))
    tri = next(m.face[m.opp[d]] for d in m.face_darts(p) if m.face_size[m.face[m.opp[d]]] == 3)
    m.face_size[tri] = 6
    rep = A.pentagon_stats(m, parse_tuple("3,5,10,12"))
    assert rep.counts["per_pentagon_splits"] != base.counts["per_pentagon_splits"]


def test_mutated_bijection_fails():
    m = _copy(built("3,5,10,12"))
    t = next(f for f in range(m.n_faces) if m.face_size[f] == 3 and _complete(m, f))
    p = A.attachments(m, t).faces_with(A.DELTA, 5, m)[0]
    m.face_size[p] = 6
    assert not A.triangle_pentagon_bijection(m, parse_tuple("3,5,10,12")).passed


# -- the degree-14 family -----------------------------------------------------------


def test_kh_incidence():
    rep = A.kh_incidence(built_kh(6, 8, 10, 2))
    assert rep.passed
    assert rep.counts["interior_triangles"] >= 1
    assert rep.counts["vertex_pentagons_per_corner"] == {5: 3 * rep.counts["interior_triangles"]}


def test_kh_mutated_fails():
    m = _copy(built_kh(6, 8, 10, 2))
    word = m.constraint
    t = next(f for f in range(m.n_faces) if m.face_size[f] == 3 and _complete(m, f))
    p = next(m.face[m.opp[d]] for d in m.face_darts(t))
    m.face_size[p] = 7
    assert not A.kh_incidence(m, word).passed


def test_obstruction_reports():
    rep = A.periodicity_obstruction_report(built("3,5,10,12"), A.THIRTY_FIVE_K3K4)
    assert rep["triangle_side"]["ratio"] == "1:1" and rep["triangle_side"]["bijection_holds"]
    assert rep["pentagon_side"]["ratio"] == "3:1"
    assert rep["expected_pentagon_ratio"] == "1:3" and not rep["pentagon_ratio_matches"]
    kh = A.periodicity_obstruction_report(built_kh(6, 8, 10, 2), A.KH)
    assert kh["triangle_side"]["ratio"] == "1:5" and kh["triangle_side"]["consistent"]


def test_empty_interior_is_na():
    rep = A.periodicity_obstruction_report(built("3,5,10,12", 1), A.THIRTY_FIVE_K3K4)
    assert rep["triangle_side"]["ratio"] == "N/A"
    assert rep["pentagon_side"]["ratio"] == "N/A"


def test_report_json():
    out = A.pentagon_stats(built("3,5,10,12")).to_json()
    assert out["kind"] == "pentagon_stats" and out["histogram"] == {"4": out["counts"]["complete_pentagons"]}
    assert set(out["checks"]) == {"all_type_4", "per_pentagon_nabla1_delta3", "aggregate_nabla_delta_1_3"}
