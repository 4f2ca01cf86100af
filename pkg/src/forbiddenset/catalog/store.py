"""File-backed catalog of difference equations and their forbidden-set results.

Layout under the catalog root::

    index.json                 id -> current path, content hash, version, key
    records/<id>/v0001.json    one file per record version, never rewritten
    .lock                      writer lock

Records are append-versioned: attaching a result writes a new version file and
moves the index pointer, so earlier versions stay readable byte for byte.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from filelock import FileLock

from ..algebra.maps import RationalMap
from ..algebra.scalars import format_scalar, scalar_to_json
from ..algebra.textformat import EquationDefinition, EquationParseError, parse_definition, parse_definitions
from ..fsdesc import RasterEstimate
from ..verify import STATUSES, VerificationReport

ENV_ROOT = "FORBIDDENSET_CATALOG"
DEFAULT_ROOT = Path.home() / ".forbiddenset" / "catalog"
SEED_FILE = "seed_equations.eq"
CLOSED_FORM_FAMILIES = ("riccati1", "riccati2", "riccati-k")


class CatalogError(Exception):
    """Base class for catalog failures."""


class UnknownRecord(CatalogError, KeyError):
    pass


class StaleResult(CatalogError):
    """A result whose equation hash does not match the record."""


class CorruptRecord(CatalogError):
    """A record file whose content hash disagrees with the index."""


def default_root() -> Path:
    return Path(os.environ.get(ENV_ROOT) or DEFAULT_ROOT)


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _dump(obj) -> bytes:
    return (json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# canonical forms


def _renamed_map(m: RationalMap, names: tuple[str, ...]) -> RationalMap:
    mapping = dict(zip(m.params, names))
    num = m.numerator.rename(mapping)
    den = m.denominator.rename(mapping)
    return RationalMap(num, den, m.order, tuple(sorted(names)))


def canonical_form(d: EquationDefinition) -> dict:
    """Reduced form of the equation, minimal over renamings of symbolic parameters.

    Lags are already renamed to ``x0, x1, ...`` by the parser and numeric
    parameters are bound, so only symbolic parameter names are free.
    """
    if d.kind == "power-pole":
        vals = {k: format_scalar(v) if v is not None else None for k, v in sorted(d.params.items())}
        return {"kind": d.kind, "field": d.field, "order": d.order, "params": vals}
    m = d.rational_map()
    best = None
    canon = tuple(f"p{i}" for i in range(len(m.params)))
    for perm in itertools.permutations(canon):
        r = _renamed_map(m, perm)
        key = (str(r.numerator), str(r.denominator))
        if best is None or key < best:
            best = key
    return {
        "kind": d.kind,
        "field": d.field,
        "order": d.order,
        "params": len(m.params),
        "numerator": best[0],
        "denominator": best[1],
    }


def equation_hash(d: EquationDefinition) -> str:
    return _sha(json.dumps(canonical_form(d), sort_keys=True).encode("utf-8"))


def normalized_definition(d: EquationDefinition) -> EquationDefinition:
    """The definition with default lag names and numeric parameters substituted."""
    if d.kind != "rational":
        return EquationDefinition(
            order=d.order, name=d.name, family=d.family, kind=d.kind, field=d.field,
            params=dict(d.params), domain=d.domain, notes=d.notes, literature=d.literature,
        )
    m = d.rational_map()
    return EquationDefinition(
        order=d.order,
        numerator=str(m.numerator),
        denominator=str(m.denominator),
        name=d.name,
        family=d.family,
        field=d.field,
        params={p: None for p in m.params},
        domain=d.domain,
        notes=d.notes,
        literature=d.literature,
    )


# ---------------------------------------------------------------------------
# classification at ingest


def _reductions(d: EquationDefinition) -> list[dict]:
    from ..reductions import reduce
    from ..reductions.core import ReductionResult

    if d.kind != "rational":
        return []
    m = d.rational_map()
    if m.params:
        return []
    res = reduce(m)
    if not isinstance(res, ReductionResult):
        return []
    return [
        {
            "family": res.family,
            "params": {k: scalar_to_json(v) for k, v in sorted(res.params.items())},
            "change": res.change.kind,
            "reduced": None if res.reduced is None else str(res.reduced),
            "summary": res.describe(),
        }
    ]


def _guess_family(d: EquationDefinition, reductions: list[dict]) -> str:
    from ..riccati import riccati1_params

    if d.family:
        return d.family
    if reductions:
        return reductions[0]["family"].split("[")[0]
    if d.kind == "rational" and not d.symbolic_params() and riccati1_params(d.rational_map()) is not None:
        return "riccati1"
    return ""


def _has_closed_form(d: EquationDefinition, family: str, reductions: list[dict]) -> bool:
    from ..riccati import riccati1_params

    if reductions or family in CLOSED_FORM_FAMILIES:
        return True
    if d.kind == "rational" and not d.symbolic_params():
        return riccati1_params(d.rational_map()) is not None
    return False


# ---------------------------------------------------------------------------
# records


def description_json(desc) -> dict:
    """Stable JSON summary of an FS description (records plus shape data)."""
    out = {
        "kind": desc.kind,
        "generator": desc.generator,
        "records": [r.to_json() for r in desc.records()],
    }
    if isinstance(desc, RasterEstimate):
        steps = np.ascontiguousarray(np.asarray(desc.crash_steps, dtype=np.int64))
        out.update(
            {
                "region": list(desc.region),
                "resolution": desc.resolution,
                "horizon": desc.horizon,
                "steps_sha256": _sha(steps.tobytes()),
                "forbidden_fraction": desc.forbidden_fraction(),
            }
        )
    for attr in ("limit", "finite", "complete", "truncated"):
        if hasattr(desc, attr):
            v = getattr(desc, attr)
            out[attr] = v if isinstance(v, (bool, type(None))) else scalar_to_json(v)
    return out


@dataclass
class EquationRecord:
    """One catalog entry at one version."""

    id: str
    version: int
    equation_hash: str
    definition: str
    name: str
    family: str
    field: str
    order: int
    params: dict
    canonical: dict
    has_closed_form: bool
    reductions: list = field(default_factory=list)
    results: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    literature: str = ""
    notes: str = ""
    previous: str | None = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "EquationRecord":
        return cls(**d)

    def equation_definition(self) -> EquationDefinition:
        return parse_definition(self.definition)

    def statuses(self) -> set[str]:
        return {r["status"] for r in self.results}

    def summary(self) -> str:
        flag = "closed-form" if self.has_closed_form else "enumeration-only"
        return f"{self.id}  v{self.version}  {self.family or '-'}  {self.field}  order {self.order}  {flag}  {self.name}"


@dataclass
class IngestOutcome:
    record: EquationRecord
    created: bool


class Catalog:
    """Directory-backed store; one writer at a time through ``.lock``."""

    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_root()
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.root / ".lock"))

    # -- index -------------------------------------------------------------

    @property
    def index_path(self) -> Path:
        return self.root / "index.json"

    def _index(self) -> dict:
        if not self.index_path.exists():
            return {}
        return json.loads(self.index_path.read_text(encoding="utf-8"))

    def _atomic_write(self, path: Path, data: bytes):
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _write_version(self, rec: EquationRecord, index: dict):
        rel = f"records/{rec.id}/v{rec.version:04d}.json"
        path = self.root / rel
        if path.exists():
            raise CatalogError(f"version file {rel} already exists")
        data = _dump(rec.to_json())
        self._atomic_write(path, data)
        index[rec.id] = {
            "path": rel,
            "hash": _sha(data),
            "version": rec.version,
            "equation_hash": rec.equation_hash,
        }
        self._atomic_write(self.index_path, _dump(index))

    # -- reads -------------------------------------------------------------

    def ids(self) -> list[str]:
        return sorted(self._index())

    def __len__(self):
        return len(self._index())

    def __contains__(self, rid):
        return rid in self._index()

    def _read(self, rel: str, expect_hash: str | None) -> EquationRecord:
        data = (self.root / rel).read_bytes()
        if expect_hash is not None and _sha(data) != expect_hash:
            raise CorruptRecord(f"{rel} does not match its indexed hash")
        return EquationRecord.from_json(json.loads(data))

    def get(self, rid: str, version: int | None = None) -> EquationRecord:
        entry = self._index().get(rid)
        if entry is None:
            raise UnknownRecord(rid)
        if version is None or version == entry["version"]:
            return self._read(entry["path"], entry["hash"])
        if not 1 <= version <= entry["version"]:
            raise UnknownRecord(f"{rid} has no version {version}")
        rel = f"records/{rid}/v{version:04d}.json"
        rec = self._read(rel, None)
        return rec

    def history(self, rid: str) -> list[EquationRecord]:
        """All versions, oldest first; each version's hash is checked against its successor."""
        cur = self.get(rid)
        out = [self.get(rid, v) for v in range(1, cur.version)] + [cur]
        for older, newer in zip(out, out[1:]):
            data = (self.root / f"records/{rid}/v{older.version:04d}.json").read_bytes()
            if _sha(data) != newer.previous:
                raise CorruptRecord(f"{rid} v{older.version} changed after v{newer.version} was written")
        return out

    def export(self, rid: str) -> str:
        """The stored (normalized) definition text."""
        return self.get(rid).definition

    def find(self, text: str) -> EquationRecord | None:
        """The record holding an algebraically equal equation, if any."""
        d = parse_definition(text)
        h = equation_hash(d)
        for rid, entry in self._index().items():
            if entry["equation_hash"] == h:
                return self.get(rid)
        return None

    def query(
        self,
        family: str | None = None,
        field: str | None = None,
        has_closed_form: bool | None = None,
        status: str | None = None,
    ) -> list[EquationRecord]:
        """Records matching every given filter, ordered by id."""
        if status is not None and status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        out = []
        for rid in self.ids():
            rec = self.get(rid)
            if family is not None and rec.family != family:
                continue
            if field is not None and rec.field != field.upper():
                continue
            if has_closed_form is not None and rec.has_closed_form != has_closed_form:
                continue
            if status is not None and status not in rec.statuses():
                continue
            out.append(rec)
        return out

    # -- writes ------------------------------------------------------------

    def _new_id(self, h: str, index: dict) -> str:
        for n in range(10, len(h) + 1, 2):
            rid = f"eq-{h[:n]}"
            if rid not in index or index[rid]["equation_hash"] == h:
                return rid
        raise CatalogError("id space exhausted")

    def _ingest_definition(self, d: EquationDefinition, index: dict) -> IngestOutcome:
        h = equation_hash(d)
        for rid, entry in index.items():
            if entry["equation_hash"] == h:
                return IngestOutcome(self._read(entry["path"], entry["hash"]), False)
        norm = normalized_definition(d)
        reductions = _reductions(d)
        family = _guess_family(d, reductions)
        norm.family = family
        rec = EquationRecord(
            id=self._new_id(h, index),
            version=1,
            equation_hash=h,
            definition=norm.to_text(),
            name=d.name,
            family=family,
            field=d.field,
            order=d.order,
            params={k: None if v is None else scalar_to_json(v) for k, v in d.params.items()},
            canonical=canonical_form(d),
            has_closed_form=_has_closed_form(d, family, reductions),
            reductions=reductions,
            literature=d.literature,
            notes=d.notes,
        )
        self._write_version(rec, index)
        return IngestOutcome(rec, True)

    def ingest(self, text: str) -> EquationRecord:
        """Store one definition; an algebraically equal equation returns its existing record."""
        return self.ingest_outcome(text).record

    def ingest_outcome(self, text: str) -> IngestOutcome:
        d = parse_definition(text)
        with self._lock:
            return self._ingest_definition(d, self._index())

    def ingest_all(self, text: str) -> list[IngestOutcome]:
        """Every definition of a multi-block file, in file order."""
        defs = parse_definitions(text)
        if not defs:
            raise EquationParseError("no equation definitions found")
        out = []
        with self._lock:
            index = self._index()
            for d in defs:
                out.append(self._ingest_definition(d, index))
        return out

    def _append(self, rid: str, update) -> EquationRecord:
        with self._lock:
            index = self._index()
            entry = index.get(rid)
            if entry is None:
                raise UnknownRecord(rid)
            cur = self._read(entry["path"], entry["hash"])
            new = EquationRecord.from_json(json.loads(json.dumps(cur.to_json())))
            update(cur, new)
            new.version = cur.version + 1
            new.previous = entry["hash"]
            self._write_version(new, index)
            return new

    def attach_result(self, rid: str, desc, report: VerificationReport) -> EquationRecord:
        """Append an FS result; the report must name this record's equation hash."""
        if not isinstance(report, VerificationReport):
            report = VerificationReport.from_json(dict(report))
        blob = desc if isinstance(desc, dict) else description_json(desc)
        blob_hash = _sha(json.dumps(blob, sort_keys=True).encode("utf-8"))

        def update(cur, new):
            if report.equation_hash != cur.equation_hash:
                raise StaleResult(
                    f"report is for equation {report.equation_hash[:12]}, record {rid} is {cur.equation_hash[:12]}"
                )
            new.results.append(
                {
                    "description": blob,
                    "blob_hash": blob_hash,
                    "generator": blob.get("generator", ""),
                    "status": report.status,
                    "status_label": report.label,
                    "tol": report.tol,
                    "depth": report.depth,
                    "report": report.to_json(),
                }
            )

        return self._append(rid, update)

    def relate(self, rid: str, other: str, kind: str) -> EquationRecord:
        """Record a relation edge (e.g. Möbius conjugacy) from ``rid`` to ``other``."""
        if other not in self:
            raise UnknownRecord(other)

        def update(cur, new):
            new.relations.append({"to": other, "kind": kind})

        return self._append(rid, update)


def seed_text() -> str:
    """The bundled seed file of equations discussed in the literature survey."""
    return resources.files("forbiddenset.catalog").joinpath("data", SEED_FILE).read_text(encoding="utf-8")


def seed_catalog(cat: Catalog) -> list[IngestOutcome]:
    return cat.ingest_all(seed_text())
