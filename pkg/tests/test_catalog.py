import json
import pytest

from forbiddenset.catalog import (
    Catalog,
    CorruptRecord,
    StaleResult,
    UnknownRecord,
    equation_hash,
    seed_catalog,
)
from forbiddenset.algebra import parse_definition
from forbiddenset.riccati import riccati1_params, riccati_fs_order1
from forbiddenset.verify import EXACT_VERIFIED, verify_description

RICCATI = "name: r\norder: 1\nnumerator: x0\ndenominator: 1 + x0\n"


@pytest.fixture
def cat(tmp_path):
    return Catalog(tmp_path / "cat")


def riccati_result(text=RICCATI):
    d = parse_definition(text)
    fs = riccati_fs_order1(riccati1_params(d.rational_map()), 6)
    return fs, verify_description(d.equation(), fs, equation_hash(d))


def test_seed_ingest_and_queries(cat):
    outs = seed_catalog(cat)
    assert len(cat) == 22 and all(o.created for o in outs)
    assert len(cat.query(family="riccati1")) == 4
    assert [r.name for r in cat.query(field="C")] == ["pole-words"]
    assert all(r.has_closed_form for r in cat.query(family="bajo-liz"))
    # a second pass only finds duplicates
    assert not any(o.created for o in seed_catalog(cat))
    assert len(cat) == 22


def test_dedup_ignores_lag_names_and_parameter_names(cat):
    a = cat.ingest("order: 2\nparams: a\nnumerator: a*x0\ndenominator: 1 + x1\n")
    b = cat.ingest_outcome("order: 2\nvars: u, v\nparams: c\nnumerator: c*u\ndenominator: v + 1\n")
    assert not b.created and b.record.id == a.id
    swapped = cat.ingest_outcome("order: 2\nvars: u, v\nparams: c\nnumerator: c*v\ndenominator: u + 1\n")
    assert swapped.created
    # same map over C is a different equation
    c = cat.ingest_outcome("field: C\norder: 2\nparams: a\nnumerator: a*x0\ndenominator: 1 + x1\n")
    assert c.created and c.record.id != a.id


def test_dedup_uses_reduced_form(cat):
    a = cat.ingest("order: 1\nnumerator: x0^2 - 1\ndenominator: x0 - 1\n")
    assert cat.find("order: 1\nnumerator: x0 + 1\ndenominator: 1\n").id == a.id


def test_find_misses_unknown_equation(cat):
    cat.ingest(RICCATI)
    assert cat.find("order: 1\nnumerator: 2*x0\ndenominator: 1 + x0\n") is None


def test_attach_appends_versions_and_keeps_history(cat):
    rec = cat.ingest(RICCATI)
    fs, rep = riccati_result()
    assert rep.status == EXACT_VERIFIED
    v2 = cat.attach_result(rec.id, fs, rep)
    assert v2.version == 2 and v2.results[0]["status"] == EXACT_VERIFIED
    hist = cat.history(rec.id)
    assert [r.version for r in hist] == [1, 2]
    assert hist[0].results == [] and cat.get(rec.id, 1).results == []
    assert [r.id for r in cat.query(status=EXACT_VERIFIED)] == [rec.id]
    assert cat.query(status="unverified") == []


def test_stale_result_is_refused(cat):
    rec = cat.ingest(RICCATI)
    fs, rep = riccati_result()
    rep.equation_hash = "0" * 64
    with pytest.raises(StaleResult):
        cat.attach_result(rec.id, fs, rep)
    assert cat.get(rec.id).version == 1


def test_unknown_ids(cat):
    rec = cat.ingest(RICCATI)
    with pytest.raises(UnknownRecord):
        cat.get("eq-missing")
    with pytest.raises(UnknownRecord):
        cat.get(rec.id, 7)
    with pytest.raises(UnknownRecord):
        cat.relate(rec.id, "eq-missing", "conjugate")


def test_relations(cat):
    a = cat.ingest(RICCATI)
    b = cat.ingest("order: 1\nnumerator: 1 + x0\ndenominator: 3 + x0\n")
    out = cat.relate(a.id, b.id, "mobius-conjugate")
    assert out.relations == [{"to": b.id, "kind": "mobius-conjugate"}]


def test_tampered_current_version_is_detected(cat):
    rec = cat.ingest(RICCATI)
    path = cat.root / "records" / rec.id / "v0001.json"
    data = json.loads(path.read_text())
    data["notes"] = "edited"
    path.write_text(json.dumps(data))
    with pytest.raises(CorruptRecord):
        cat.get(rec.id)


def test_tampered_old_version_breaks_the_chain(cat):
    rec = cat.ingest(RICCATI)
    fs, rep = riccati_result()
    cat.attach_result(rec.id, fs, rep)
    path = cat.root / "records" / rec.id / "v0001.json"
    path.write_text(path.read_text().replace('"name": "r"', '"name": "renamed"'))
    with pytest.raises(CorruptRecord):
        cat.history(rec.id)


def test_export_round_trips(cat, tmp_path):
    rec = cat.ingest("order: 2\nvars: u, v\nparams: a = 2\nnumerator: a*v\ndenominator: 1 + u\n")
    text = cat.export(rec.id)
    other = Catalog(tmp_path / "other")
    again = other.ingest(text)
    assert again.equation_hash == rec.equation_hash
    assert parse_definition(text).rational_map() == parse_definition(again.definition).rational_map()


def test_catalog_root_from_environment(catalog_root):
    c = Catalog()
    c.ingest(RICCATI)
    assert (catalog_root / "index.json").exists()
