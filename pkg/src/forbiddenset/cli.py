"""Command-line front end.

Every command reads equation definition files, writes plain files and a
``manifest.json`` recording the argument vector, input hashes and output hashes.
``forbiddenset replay MANIFEST`` re-runs a manifest and compares the outputs.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .algebra.maps import DEFAULT_TOL, lag_names
from .algebra.scalars import COMPLEX, REAL, format_scalar, scalar_to_json, to_float
from .algebra.textformat import EquationDefinition, EquationParseError, parse_definition

log = logging.getLogger("forbiddenset")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_METHOD = 4
EXIT_UNKNOWN_RECORD = 5
EXIT_STALE = 6
EXIT_CATALOG = 7
EXIT_REPLAY_MISMATCH = 8
EXIT_INPUT = 9

METHODS = ("auto", "closed", "inverse-orbit", "curves", "symbolic", "cobweb")
DEFAULT_DEPTH = 10
COBWEB_DEPTH = 250
DEFAULT_HORIZON = 10
MAX_RESOLUTION = 8192


class MethodNotApplicable(Exception):
    def __init__(self, method: str, applicable: list[str]):
        super().__init__(f"method {method!r} does not apply; applicable: {', '.join(applicable) or 'none'}")
        self.applicable = applicable


class InputError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    argv: list
    params: dict
    input_hashes: dict
    tool_version: str = __version__
    outputs: dict = field(default_factory=dict)

    def write(self, path: Path):
        path.write_text(json.dumps(asdict(self), indent=1, sort_keys=True) + "\n")


def _sha_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_definition(path) -> EquationDefinition:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from None
    return parse_definition(text)


# ---------------------------------------------------------------------------
# classify


_TOPOLOGY_LABELS = {
    "finite-globally-periodic": "FiniteGloballyPeriodic",
    "convergent-sequence": "ConvergentSequence",
    "dense-candidate": "DenseCandidate",
    "unresolved": "Unresolved",
}


def classify_definition(d: EquationDefinition) -> dict:
    """Structured report: degenerate tags, Riccati data, reduction found."""
    from .reductions import NoMatch, reduce
    from .riccati import (
        RiccatiClass,
        classify_riccati1,
        riccati1_params,
        riccati_fs_topology,
        riccati_k_coeffs,
        riccati_number,
    )

    if d.kind == "power-pole":
        from .enumeration import power_pole_map

        fmap = power_pole_map(d.params["p"], d.params["a"], d.params.get("b", 1) or 1)
        return {
            "kind": "monotone-pole",
            "summary": f"monotone map with pole, {fmap.direction or 'not monotone'}",
            "checks": fmap.checks,
            "direction": fmap.direction,
            "fixed_points": fmap.fixed_points,
        }
    m = d.rational_map()
    if m.params:
        return {"kind": "symbolic", "summary": f"symbolic parameters {', '.join(m.params)}; bind them to classify"}
    if m.numerator.is_constant() and m.denominator.is_constant():
        c = m.numerator.constant_value() / m.denominator.constant_value()
        return {"kind": "constant", "summary": "Constant", "value": scalar_to_json(c)}
    p = riccati1_params(m)
    if p is not None:
        tag = classify_riccati1(p)
        out = {"kind": "riccati1", "class": tag.value, "params": [scalar_to_json(x) for x in (p.a, p.b, p.c, p.d)]}
        if tag is RiccatiClass.PROPER:
            R = riccati_number(p)
            topo = riccati_fs_topology(R)
            label = _TOPOLOGY_LABELS[topo.tag]
            if topo.period is not None:
                label += f"({topo.period})"
            out.update({"R": scalar_to_json(R), "topology": label})
            out["summary"] = f"Proper, R={format_scalar(R)}, topology: {label}"
        else:
            out["summary"] = {"linear": "Linear", "constant": "Constant", "period-2": "Period2"}[tag.value]
        return out
    coeffs = riccati_k_coeffs(m)
    if coeffs is not None:
        return {
            "kind": f"riccati{len(coeffs) - 1}",
            "coeffs": [scalar_to_json(c) for c in coeffs],
            "summary": f"order-{len(coeffs) - 1} Riccati, linearizable",
        }
    res = reduce(m)
    if isinstance(res, NoMatch):
        return {"kind": "no-match", "summary": "NoMatch", "tried": list(res.tried)}
    newest = res.change.components[-1]
    target = "linear" if res.reduced is not None and res.reduced.denominator.is_constant() else "Riccati"
    if res.reduced is None:
        target = "Riccati per orbit (invariant)"
    summary = f"reduces via z = {newest} to {target}"
    return {
        "kind": "reduction",
        "family": res.family,
        "params": {k: scalar_to_json(v) for k, v in sorted(res.params.items())},
        "change": res.change.describe(),
        "reduced": None if res.reduced is None else str(res.reduced),
        "summary": summary,
        "detail": res.describe(),
    }


def cmd_classify(args) -> int:
    d = _read_definition(args.equation)
    report = classify_definition(d)
    if args.json:
        print(json.dumps(report, indent=1, sort_keys=True, default=str))
    else:
        print(report["summary"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# fs


_PRODUCT_FAMILIES = ("bajo-liz", "khalaf-allah", "shojaei")


def _is_pole_words(m) -> bool:
    from .algebra.maps import RationalMap
    from .algebra.poly import Poly

    if m.order != 1 or m.params:
        return False
    v = lag_names(1)
    x = Poly.var("x0", v)
    return m == RationalMap(Poly.constant(1, v), x * x - Poly.constant(1, v), 1)


def _closed_form(d: EquationDefinition, depth: int):
    """FS from a closed form, or ``None`` when no closed form applies."""
    from .reductions import NoMatch, aghajani_fs, pullback_fs, reduce, shojaei_fs
    from .riccati import riccati1_params, riccati_fs_order1, riccati_k_coeffs, riccati_k_fs

    if d.kind != "rational":
        return None
    m = d.rational_map()
    if m.params:
        return None
    if m.numerator.is_constant() and m.denominator.is_constant():
        from .fsdesc import FinitePointSet

        return FinitePointSet([], "constant", [])
    p = riccati1_params(m)
    if p is not None:
        try:
            return riccati_fs_order1(p, depth)
        except ValueError:
            return None
    coeffs = riccati_k_coeffs(m)
    if coeffs is not None:
        return riccati_k_fs(coeffs, depth).hypersurfaces()
    res = reduce(m)
    if isinstance(res, NoMatch):
        return None
    base = res.family.split("[")[0]
    if base in _PRODUCT_FAMILIES:
        k = m.order - 1
        pr = res.params
        if base == "bajo-liz":
            alpha, beta, gamma = 1, pr["a"], pr["b"]
        elif base == "khalaf-allah":
            alpha, beta, gamma = 1, pr["s"], 1
        else:
            alpha, beta, gamma = pr["alpha"], pr["beta"], pr["gamma"]
        return shojaei_fs(alpha, beta, gamma, k, depth)
    if base == "aghajani-shouli":
        return aghajani_fs()
    if res.reduced is None:
        return None
    try:
        return pullback_fs(res, depth)
    except ValueError:
        return None


def applicable_methods(d: EquationDefinition) -> list[str]:
    out = []
    if d.kind == "power-pole":
        return ["cobweb"]
    m = d.rational_map()
    if m.params:
        return ["curves"]
    if _closed_form(d, 1) is not None:
        out.append("closed")
    out.append("inverse-orbit")
    if m.order >= 2:
        out.append("curves")
    if _is_pole_words(m):
        out.append("symbolic")
    return out


def _auto_method(d: EquationDefinition, applicable: list[str]) -> str:
    for meth in ("closed", "cobweb", "symbolic"):
        if meth in applicable:
            return meth
    m = d.rational_map()
    return "curves" if m.order == 2 else "inverse-orbit"


def _cobweb_check(fmap, desc):
    """Local check ``f(x_n) = x_{n-1}`` and ``f(x_0) = 0`` on the computed sequence."""
    prev = 0.0
    worst = 0.0
    for x in desc.points:
        worst = max(worst, abs(float(fmap(x)) - prev) / max(1.0, abs(prev)))
        prev = x
    return worst


def compute_fs(d: EquationDefinition, method: str, depth: int | None, tol: float):
    """Run one method; returns ``(method, description, report)``."""
    from .catalog import equation_hash
    from .verify import FLOAT_VERIFIED, UNVERIFIED, VerificationReport, verify_description

    applicable = applicable_methods(d)
    if method == "auto":
        method = _auto_method(d, applicable)
    if method not in applicable:
        raise MethodNotApplicable(method, applicable)
    h = equation_hash(d)
    if method == "cobweb":
        from .enumeration import cobweb_fs, power_pole_map

        n = depth or COBWEB_DEPTH
        fmap = power_pole_map(d.params["p"], d.params["a"], d.params.get("b", 1) or 1)
        res = cobweb_fs(fmap, n)
        desc = res.as_fs()
        worst = _cobweb_check(fmap, desc)
        status = FLOAT_VERIFIED if worst <= 1e-8 else UNVERIFIED
        rep = VerificationReport(
            h, status, len(desc.points), 1e-8, len(desc.points), 0 if status == FLOAT_VERIFIED else 1,
            {"classification": res.classification, "direction": res.direction,
             "limit": res.limit if not isinstance(res.limit, tuple) else list(res.limit),
             "residual": res.residual, "max_local_residual": worst},
        )
        return method, desc, rep
    depth = depth or DEFAULT_DEPTH
    de = d.equation()
    if method == "closed":
        desc = _closed_form(d, depth)
    elif method == "inverse-orbit":
        from .enumeration import inverse_orbit

        desc = inverse_orbit(de, depth, field=d.field).as_fs()
    elif method == "curves":
        from .enumeration import forbidden_curves

        desc = forbidden_curves(d.rational_map(bind_params=True), depth)
    elif method == "symbolic":
        from .enumeration import symbolic_words
        from .fsdesc import FinitePointSet

        mode = "complex" if d.field == COMPLEX else "real"
        words = symbolic_words(depth, mode)
        desc = FinitePointSet([w.value if mode == "complex" else w.value.real for w in words],
                              f"symbolic-words-{mode}", [w.depth for w in words])
    else:  # pragma: no cover - guarded above
        raise MethodNotApplicable(method, applicable)
    if de.map.params:
        rep = VerificationReport(h, UNVERIFIED, 0, details={"reason": "symbolic parameters"})
    else:
        try:
            rep = verify_description(de, desc, h, horizon=depth + 1, tol=tol)
        except TypeError as exc:
            rep = VerificationReport(h, UNVERIFIED, 0, details={"reason": str(exc)})
    return method, desc, rep


def _write_points_csv(desc, path: Path):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "crash_step", "re", "im"])
        steps = getattr(desc, "crash_steps", None) or [None] * len(desc.points)
        for i, (p, s) in enumerate(zip(desc.points, steps)):
            coords = p if isinstance(p, (tuple, list)) else (p,)
            for x in coords:
                z = complex(to_float(x)) if not isinstance(x, complex) else x
                w.writerow([i, "" if s is None else s, repr(z.real), repr(z.imag)])


def cmd_fs(args) -> int:
    from .catalog import description_json

    d = _read_definition(args.equation)
    method, desc, rep = compute_fs(d, args.method, args.depth, args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "equation": d.name or Path(args.equation).stem,
        "method": method,
        "description": description_json(desc),
        "report": rep.to_json(),
    }
    fs_path = out / "fs.json"
    fs_path.write_text(json.dumps(payload, indent=1, sort_keys=True, default=str) + "\n")
    outputs = [fs_path]
    if args.csv and hasattr(desc, "points"):
        csv_path = out / "fs.csv"
        _write_points_csv(desc, csv_path)
        outputs.append(csv_path)
    if args.svg and hasattr(desc, "points"):
        from .enumeration.render import write_points_svg

        pts = [p if not isinstance(p, (tuple, list)) else complex(to_float(p[0]), to_float(p[-1])) for p in desc.points]
        svg_path = out / "fs.svg"
        write_points_svg([complex(p) if isinstance(p, complex) else complex(to_float(p)) for p in pts], svg_path)
        outputs.append(svg_path)
    _finish(args, out / "manifest.json", {"equation": args.equation}, outputs)
    print(f"{method}: {len(desc.records())} records, {rep.label}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# grid


def cmd_grid(args) -> int:
    from .catalog import description_json, equation_hash
    from .enumeration import grid_classify
    from .enumeration.render import write_ppm, write_steps_csv
    from .verify import verify_description

    xmin, xmax, ymin, ymax = args.region
    if not (xmin < xmax and ymin < ymax):
        raise InputError("region must satisfy xmin < xmax and ymin < ymax")
    if not 1 <= args.res <= MAX_RESOLUTION:
        raise InputError(f"resolution must lie in 1..{MAX_RESOLUTION}")
    if args.horizon < 1:
        raise InputError("horizon must be >= 1")
    if args.threads is not None:
        if args.threads < 1:
            raise InputError("threads must be >= 1")
        _limit_threads(args.threads)
    d = _read_definition(args.equation)
    de = d.equation()
    if de.order != 2 and args.slice is None:
        raise InputError("equations of order other than 2 need --slice")
    r = grid_classify(de, args.region, args.res, args.horizon, args.tol, slice_point=args.slice, backend=args.backend)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    # the backend does not change the raster, so it stays out of the sidecar
    r.extra.pop("backend", None)
    img, side = write_ppm(r, out, {"equation": d.name or Path(args.equation).stem})
    rep = verify_description(de, r, equation_hash(d), tol=args.tol)
    fs_path = out.with_suffix(".fs.json")
    payload = {"equation": d.name or Path(args.equation).stem, "method": "grid",
               "description": description_json(r), "report": rep.to_json()}
    fs_path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    outputs = [img, side, fs_path]
    if args.steps_csv:
        outputs.append(write_steps_csv(r, out.with_suffix(".steps.csv")))
    _finish(args, out.with_suffix(out.suffix + ".manifest.json"), {"equation": args.equation}, outputs)
    print(f"grid {args.res}x{args.res}, horizon {args.horizon}: forbidden fraction {r.forbidden_fraction():.6f}")
    return EXIT_OK


def _limit_threads(n: int):
    try:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


# ---------------------------------------------------------------------------
# catalog


def _catalog(args):
    from .catalog import Catalog

    return Catalog(args.root)


def cmd_catalog(args) -> int:
    cat = _catalog(args)
    if args.catalog_cmd == "ingest":
        from .catalog import seed_text

        if args.seed:
            text = seed_text()
        elif args.file:
            try:
                text = Path(args.file).read_text(encoding="utf-8")
            except OSError as exc:
                raise InputError(str(exc)) from None
        else:
            raise InputError("give a definition file or --seed")
        for o in cat.ingest_all(text):
            print(("new  " if o.created else "dup  ") + o.record.summary())
        return EXIT_OK
    if args.catalog_cmd == "query":
        recs = cat.query(args.family, args.field, args.closed_form, args.status)
        if args.json:
            print(json.dumps([r.to_json() for r in recs], indent=1, sort_keys=True))
        else:
            for r in recs:
                print(r.summary())
        return EXIT_OK
    if args.catalog_cmd == "attach":
        from .verify import VerificationReport

        try:
            payload = json.loads(Path(args.result).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read result file: {exc}") from None
        rep = VerificationReport.from_json(payload["report"])
        rec = cat.attach_result(args.id, payload["description"], rep)
        print(f"{rec.id} v{rec.version}: {rep.label}")
        return EXIT_OK
    if args.catalog_cmd == "show":
        rec = cat.get(args.id, args.version)
        print(json.dumps(rec.to_json(), indent=1, sort_keys=True))
        return EXIT_OK
    if args.catalog_cmd == "export":
        sys.stdout.write(cat.export(args.id))
        return EXIT_OK
    raise InputError(f"unknown catalog command {args.catalog_cmd!r}")


# ---------------------------------------------------------------------------
# manifests


def _finish(args, manifest_path: Path, inputs: dict, outputs: list):
    params = {k: v for k, v in vars(args).items() if k not in ("func", "argv")}
    man = RunManifest(
        command=args.command,
        argv=list(args.argv),
        params=json.loads(json.dumps(params, default=str)),
        input_hashes={str(p): _sha_file(p) for p in inputs.values()},
        outputs={str(p): _sha_file(p) for p in outputs},
    )
    man.write(manifest_path)
    return man


def cmd_replay(args) -> int:
    try:
        man = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read manifest: {exc}") from None
    for path, h in man["input_hashes"].items():
        if not Path(path).exists() or _sha_file(path) != h:
            print(f"input changed: {path}", file=sys.stderr)
            return EXIT_REPLAY_MISMATCH
    code = main(man["argv"])
    if code != EXIT_OK:
        return code
    bad = [p for p, h in man["outputs"].items() if not Path(p).exists() or _sha_file(p) != h]
    for p in bad:
        print(f"output differs: {p}", file=sys.stderr)
    if bad:
        return EXIT_REPLAY_MISMATCH
    print(f"replayed {man['command']}: {len(man['outputs'])} outputs identical")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="forbiddenset", description="Forbidden sets of rational difference equations.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="degenerate tags, Riccati data and reductions of an equation")
    p.add_argument("equation", help="equation definition file")
    p.add_argument("--json", action="store_true", help="print the full report as JSON")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fs", help="compute a forbidden-set description")
    p.add_argument("equation", help="equation definition file")
    p.add_argument("--method", choices=METHODS, default="auto", help="closed form or an enumeration method")
    p.add_argument("--depth", type=int, default=None,
                   help=f"depth (default {DEFAULT_DEPTH}; {COBWEB_DEPTH} points for cobweb)")
    p.add_argument("--tol", type=float, default=1e-9, help="zero tolerance for float verification")
    p.add_argument("--out", default="fs-out", help="output directory")
    p.add_argument("--csv", action="store_true", help="also write point samples as CSV")
    p.add_argument("--svg", action="store_true", help="also write a point plot as SVG")
    p.set_defaults(func=cmd_fs)

    p = sub.add_parser("grid", help="raster estimate by forward iteration")
    p.add_argument("equation", help="equation definition file")
    p.add_argument("--region", type=float, nargs=4, default=[-5.0, 5.0, -5.0, 5.0],
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"), help="x is x_{-1}, y is x_0")
    p.add_argument("--res", type=int, default=400, help="cells per side")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON, help="forward steps per cell")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative pole tolerance")
    p.add_argument("--threads", type=int, default=None, help="upper bound on worker threads")
    p.add_argument("--backend", choices=("numba", "numpy"), default=None, help="force a kernel backend")
    p.add_argument("--slice", type=float, nargs="+", default=None, help="base point for order > 2")
    p.add_argument("--out", default="grid.ppm", help="PPM output path (sidecar JSON next to it)")
    p.add_argument("--steps-csv", action="store_true", help="also write the crash-step matrix as CSV")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("catalog", help="equation catalog")
    p.add_argument("--root", default=None, help="catalog directory (default: $FORBIDDENSET_CATALOG)")
    csub = p.add_subparsers(dest="catalog_cmd", required=True)
    c = csub.add_parser("ingest", help="add equations from a definition file")
    c.add_argument("file", nargs="?", help="definition file (blocks separated by ---)")
    c.add_argument("--seed", action="store_true", help="ingest the bundled seed equations")
    c = csub.add_parser("query", help="list records")
    c.add_argument("--family")
    c.add_argument("--field", choices=(REAL, COMPLEX))
    c.add_argument("--closed-form", dest="closed_form", action="store_true", default=None)
    c.add_argument("--no-closed-form", dest="closed_form", action="store_false")
    c.add_argument("--status", choices=("exact-verified", "float-verified", "unverified"))
    c.add_argument("--json", action="store_true")
    c = csub.add_parser("attach", help="attach an fs.json result to a record")
    c.add_argument("id")
    c.add_argument("result", help="fs.json written by the fs command")
    c = csub.add_parser("show", help="print one record")
    c.add_argument("id")
    c.add_argument("--version", type=int, default=None)
    c = csub.add_parser("export", help="print a record's definition text")
    c.add_argument("id")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("replay", help="re-run a manifest and compare output hashes")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    from .catalog import CatalogError, StaleResult, UnknownRecord

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except EquationParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MethodNotApplicable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_METHOD
    except UnknownRecord as exc:
        print(f"unknown record: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_RECORD
    except StaleResult as exc:
        print(f"stale result: {exc}", file=sys.stderr)
        return EXIT_STALE
    except CatalogError as exc:
        print(f"catalog error: {exc}", file=sys.stderr)
        return EXIT_CATALOG
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
