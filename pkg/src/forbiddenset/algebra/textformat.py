"""Plain-text equation definitions.

One definition is a block of ``key: value`` lines; blocks in a file are separated
by lines holding ``---``.  Example::

    name: pielou
    family: pielou
    field: R
    order: 2
    params: a = 1
    numerator: a*x0
    denominator: 1 + x1
    domain: natural

``x0`` is the newest lag ``x_n``, ``x1`` is ``x_{n-1}`` and so on; ``vars:`` may
rename them (newest first).  A parameter listed without a value stays symbolic.
Polynomials accept ``+ - * / ** ^``, integers, decimals, ``i`` (imaginary unit)
and ``sqrt(n)`` for integer ``n``.  Division is only allowed by constants.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping

from .maps import DifferenceEquation, DomainPolicy, RationalMap, lag_names
from .poly import Poly
from .scalars import COMPLEX, REAL, QuadNumber, Scalar, format_scalar, is_exact, simplify

KNOWN_KEYS = (
    "name", "family", "kind", "field", "order", "vars", "params", "numerator",
    "denominator", "domain", "notes", "literature",
)


class EquationParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def _prepare(text: str) -> tuple[str, list[int]]:
    """Replace ``^`` with ``**``; return the new text and an offset map back."""
    out, back = [], []
    for i, ch in enumerate(text):
        if ch == "^":
            out.append("**")
            back.extend([i, i])
        else:
            out.append(ch)
            back.append(i)
    back.append(len(text))
    return "".join(out), back


def parse_poly(text: str, variables, params: Mapping[str, Scalar] | None = None) -> Poly:
    """Parse a polynomial in ``variables``; names in ``params`` are replaced by values."""
    variables = tuple(variables)
    params = dict(params or {})
    src, back = _prepare(text.strip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        col = back[min((exc.offset or 1) - 1, len(back) - 1)] + 1
        raise EquationParseError(f"syntax error in {text!r}", column=col) from None

    def fail(node, msg):
        col = back[min(getattr(node, "col_offset", 0), len(back) - 1)] + 1
        raise EquationParseError(msg, column=col)

    def const(x):
        return Poly.constant(x, variables)

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            v = node.value
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                fail(node, f"unsupported literal {v!r}")
            if isinstance(v, float):
                # decimals are read exactly from their source text
                seg = ast.get_source_segment(src, node)
                return const(Fraction(seg) if seg else Fraction(v))
            return const(Fraction(v))
        if isinstance(node, ast.Name):
            if node.id in variables:
                return Poly.var(node.id, variables)
            if node.id in params:
                return const(params[node.id])
            if node.id in ("i", "I"):
                return const(QuadNumber(0, 1, -1))
            fail(node, f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = walk(node.left)
                expo = walk(node.right)
                if not expo.is_constant():
                    fail(node.right, "exponent must be a constant")
                e = expo.constant_value()
                if not (isinstance(e, Fraction) and e.denominator == 1 and e >= 0):
                    fail(node.right, "exponent must be a non-negative integer")
                return base ** int(e)
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if not right.is_constant() or right.constant_value() == 0:
                    fail(node.right, "division only by nonzero constants")
                return left * (1 / right.constant_value())
            fail(node, "unsupported operator")
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
            if len(node.args) != 1:
                fail(node, "sqrt takes one argument")
            arg = walk(node.args[0])
            v = arg.constant_value() if arg.is_constant() else None
            if not isinstance(v, Fraction) or v.denominator != 1:
                fail(node, "sqrt needs an integer argument")
            from .scalars import exact_sqrt

            return const(exact_sqrt(v))
        fail(node, f"unsupported syntax {type(node).__name__}")

    return walk(tree)


def parse_scalar_expr(text: str) -> Scalar:
    text = text.strip()
    try:
        p = parse_poly(text, ())
    except EquationParseError:
        # plain python floats such as "nan"/"inf" are not scalars here
        raise
    v = p.constant_value()
    return simplify(v)


@dataclass
class EquationDefinition:
    order: int
    numerator: str = ""
    denominator: str = "1"
    name: str = ""
    family: str = ""
    kind: str = "rational"
    field: str = REAL
    params: dict[str, Scalar | None] = dc_field(default_factory=dict)
    domain: str = "natural"
    notes: str = ""
    literature: str = ""
    vars: tuple[str, ...] = ()

    def ring_names(self) -> tuple[str, ...]:
        """Source variable names, newest first (``x0, x1, ...`` by default)."""
        return self.vars or tuple(f"x{j}" for j in range(self.order))

    def symbolic_params(self) -> tuple[str, ...]:
        return tuple(p for p, v in self.params.items() if v is None)

    def rational_map(self, bind_params: bool = True) -> RationalMap:
        """The iteration map; unvalued parameters stay symbolic ring variables."""
        if self.kind != "rational":
            raise ValueError(f"definition of kind {self.kind!r} has no rational map")
        src_names = self.ring_names()
        values = {p: v for p, v in self.params.items() if v is not None} if bind_params else {}
        sym = tuple(p for p in self.params if p not in values)
        src_vars = tuple(reversed(src_names)) + sym
        num = parse_poly(self.numerator, src_vars, values)
        den = parse_poly(self.denominator, src_vars, values)
        rename = dict(zip(tuple(reversed(src_names)), lag_names(self.order)))
        num = num.rename(rename)
        den = den.rename(rename)
        return RationalMap(num, den, self.order, sym)

    def equation(self) -> DifferenceEquation:
        m = self.rational_map()
        if m.params:
            raise ValueError(f"parameters {m.params} have no values")
        return DifferenceEquation(m, self.field, DomainPolicy.from_text(self.domain))

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"name: {self.name}")
        if self.family:
            lines.append(f"family: {self.family}")
        if self.kind != "rational":
            lines.append(f"kind: {self.kind}")
        lines.append(f"field: {self.field}")
        lines.append(f"order: {self.order}")
        if self.vars:
            lines.append("vars: " + ", ".join(self.vars))
        if self.params:
            lines.append(
                "params: "
                + ", ".join(p if v is None else f"{p} = {format_scalar(v)}" for p, v in self.params.items())
            )
        if self.kind == "rational":
            lines.append(f"numerator: {self.numerator}")
            lines.append(f"denominator: {self.denominator}")
        lines.append(f"domain: {self.domain}")
        if self.notes:
            lines.append(f"notes: {self.notes}")
        if self.literature:
            lines.append(f"literature: {self.literature}")
        return "\n".join(lines) + "\n"


def definition_from_map(m: RationalMap, *, name="", family="", field=REAL, domain="natural", notes="") -> EquationDefinition:
    """Canonical definition text for a map (sorted monomials, ``x0`` newest)."""
    return EquationDefinition(
        order=m.order,
        numerator=str(m.numerator),
        denominator=str(m.denominator),
        name=name,
        family=family,
        field=field,
        params={p: None for p in m.params},
        domain=domain,
        notes=notes,
    )


def _parse_params(text: str, lineno: int) -> dict[str, Scalar | None]:
    out: dict[str, Scalar | None] = {}
    if not text.strip():
        return out
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" in chunk:
            name, val = (s.strip() for s in chunk.split("=", 1))
            try:
                out[name] = parse_scalar_expr(val)
            except EquationParseError as exc:
                raise EquationParseError(f"bad value for parameter {name!r}: {exc}", line=lineno) from None
        else:
            out[chunk] = None
        if not out or not list(out)[-1].isidentifier():
            raise EquationParseError(f"bad parameter name in {chunk!r}", line=lineno)
    return out


def parse_definitions(text: str) -> list[EquationDefinition]:
    blocks: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip() if not raw.lstrip().startswith("notes") else raw.rstrip()
        if line.strip() == "---":
            blocks.append([])
            continue
        if line.strip():
            blocks[-1].append((lineno, line))
    out = []
    for block in blocks:
        if block:
            out.append(_parse_block(block))
    return out


def parse_definition(text: str) -> EquationDefinition:
    defs = parse_definitions(text)
    if len(defs) != 1:
        raise EquationParseError(f"expected one equation definition, found {len(defs)}")
    return defs[0]


def _parse_block(block: list[tuple[int, str]]) -> EquationDefinition:
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in block:
        if ":" not in line:
            raise EquationParseError("expected 'key: value'", line=lineno)
        key, val = line.split(":", 1)
        key = key.strip().lower()
        if key not in KNOWN_KEYS:
            raise EquationParseError(f"unknown key {key!r}", line=lineno)
        raw[key] = (lineno, val.strip())
    if "order" not in raw:
        raise EquationParseError("missing 'order'", line=block[0][0])
    lineno, order_text = raw["order"]
    try:
        order = int(order_text)
    except ValueError:
        raise EquationParseError(f"order must be an integer, got {order_text!r}", line=lineno) from None
    d = EquationDefinition(order=order)
    for key in ("name", "family", "kind", "notes", "literature", "domain", "numerator", "denominator"):
        if key in raw:
            setattr(d, key, raw[key][1])
    if "field" in raw:
        fl = raw["field"][1].upper()
        if fl not in (REAL, COMPLEX):
            raise EquationParseError("field must be R or C", line=raw["field"][0])
        d.field = fl
    if "vars" in raw:
        names = tuple(v.strip() for v in raw["vars"][1].split(",") if v.strip())
        if len(names) != order:
            raise EquationParseError(f"vars lists {len(names)} names for order {order}", line=raw["vars"][0])
        d.vars = names
    if "params" in raw:
        d.params = _parse_params(raw["params"][1], raw["params"][0])
    try:
        DomainPolicy.from_text(d.domain)
    except ValueError as exc:
        raise EquationParseError(str(exc), line=raw.get("domain", (None,))[0]) from None
    if d.kind == "rational":
        if "numerator" not in raw:
            raise EquationParseError("missing 'numerator'", line=block[0][0])
        for key in ("numerator", "denominator"):
            if key in raw:
                ln = raw[key][0]
                try:
                    m = d.rational_map(bind_params=True)
                except EquationParseError as exc:
                    raise EquationParseError(str(exc), line=ln) from None
                except ValueError as exc:
                    raise EquationParseError(str(exc), line=raw["denominator"][0] if "denominator" in raw else ln) from None
                del m
                break
    elif d.kind == "power-pole":
        missing = {"a", "p"} - set(d.params)
        if missing:
            raise EquationParseError(f"power-pole definitions need params {sorted(missing)}", line=block[0][0])
    else:
        raise EquationParseError(f"unknown kind {d.kind!r}", line=raw["kind"][0])
    return d


def load_definitions(path) -> list[EquationDefinition]:
    from pathlib import Path

    return parse_definitions(Path(path).read_text(encoding="utf-8"))


def exact_params(d: EquationDefinition) -> dict[str, Scalar]:
    return {k: v for k, v in d.params.items() if v is not None and is_exact(v)}
