"""Catalog of reducible equation families, loaded from a data file.

Each entry is a template ``numerator / denominator`` whose unknown parameters
enter linearly.  Matching a concrete map cross-multiplies
``N * D_t - D * N_t = 0`` and solves the resulting linear system exactly.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from ..algebra.linalg import solve_linear
from ..algebra.maps import RationalMap, lag_names
from ..algebra.poly import Poly
from ..algebra.scalars import parse_scalar, simplify
from ..algebra.textformat import EquationParseError, parse_poly
from .changes import ChangeOfVariables, lagged_change, parse_change
from .invariants import InvariantForm, parse_invariant

FAMILY_KEYS = (
    "name", "index", "order", "params", "numerator", "denominator", "change",
    "reduced_order", "reduced_numerator", "reduced_denominator", "crash",
    "normalize", "require", "choices", "invariant", "notes",
)


def _eval_index(expr: str, env: dict) -> int:
    """Evaluate a small integer expression such as ``2*i+1``."""
    tree = ast.parse(expr.strip(), mode="eval")

    def walk(n):
        if isinstance(n, ast.Expression):
            return walk(n.body)
        if isinstance(n, ast.Constant) and isinstance(n.value, int):
            return n.value
        if isinstance(n, ast.Name) and n.id in env:
            return env[n.id]
        if isinstance(n, ast.BinOp) and isinstance(n.op, (ast.Add, ast.Sub, ast.Mult)):
            a, b = walk(n.left), walk(n.right)
            return a + b if isinstance(n.op, ast.Add) else a - b if isinstance(n.op, ast.Sub) else a * b
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, ast.USub):
            return -walk(n.operand)
        raise ValueError(f"bad index expression {expr!r}")

    return walk(tree)


def expand_lags(text: str, env: dict) -> str:
    """Rewrite ``prod(x[a..b])``, ``x[j]`` and ``z[j]`` into plain lag names."""

    def prod(m):
        lo, hi = _eval_index(m.group(1), env), _eval_index(m.group(2), env)
        return "(" + "*".join(f"x{j}" for j in range(lo, hi + 1)) + ")"

    text = re.sub(r"prod\(\s*x\[([^\]]+?)\.\.([^\]]+?)\]\s*\)", prod, text)
    return re.sub(r"\b([xz])\[([^\]]+)\]", lambda m: f"{m.group(1)}{_eval_index(m.group(2), env)}", text)


def _z_to_x(text: str) -> str:
    return re.sub(r"\bz(\d+)\b", r"x\1", text)


@dataclass(frozen=True)
class FamilyTemplate:
    """One catalog entry, possibly indexed by ``k`` or ``i``."""

    name: str
    order: str
    params: tuple[str, ...]
    numerator: str
    denominator: str
    index: str | None = None
    index_min: int = 0
    change: str | None = None
    reduced_order: str = "1"
    reduced_numerator: str | None = None
    reduced_denominator: str | None = None
    crash: str = "pole"
    normalize: str | None = None
    require: tuple[str, ...] = ()
    choices: dict = field(default_factory=dict, hash=False, compare=False)
    invariant: str | None = None
    notes: str = ""

    def order_for(self, idx: int | None) -> int:
        return _eval_index(self.order, self._env(idx))

    def _env(self, idx):
        return {self.index: idx} if self.index else {}

    def index_values(self, order: int) -> list:
        """Index values giving a template of the requested order."""
        if not self.index:
            return [None] if self.order_for(None) == order else []
        return [i for i in range(self.index_min, order + 1) if self.order_for(i) == order]

    def instantiate(self, idx: int | None = None) -> "FamilyInstance":
        env = self._env(idx)
        k = self.order_for(idx)
        ring = lag_names(k) + self.params
        num = parse_poly(expand_lags(self.numerator, env), ring)
        den = parse_poly(expand_lags(self.denominator, env), ring)
        red = None
        r = _eval_index(self.reduced_order, env)
        if self.reduced_numerator is not None:
            rring = lag_names(r) + self.params
            rn = parse_poly(_z_to_x(expand_lags(self.reduced_numerator, env)), rring)
            rd = parse_poly(_z_to_x(expand_lags(self.reduced_denominator or "1", env)), rring)
            red = (rn, rd)
        change_text = None
        if self.change:
            kind, arg = self.change.split(None, 1)
            change_text = f"{kind} {_eval_index(arg, env)}"
        return FamilyInstance(self, idx, k, r, num, den, red, change_text)


@dataclass(frozen=True)
class FamilyInstance:
    template: FamilyTemplate
    index: int | None
    order: int
    reduced_order: int
    numerator: Poly
    denominator: Poly
    reduced: tuple | None
    change_text: str | None

    @property
    def label(self) -> str:
        t = self.template
        return t.name if t.index is None else f"{t.name}[{t.index}={self.index}]"

    def build(self, values: dict) -> RationalMap:
        """The concrete equation for parameter values."""
        ring = lag_names(self.order)
        vals = {p: simplify(values[p]) for p in self.template.params}
        num = _bind(self.numerator, vals, ring)
        den = _bind(self.denominator, vals, ring)
        return RationalMap(num, den, self.order)

    def reduced_map(self, values: dict) -> RationalMap | None:
        if self.reduced is None:
            return None
        ring = lag_names(self.reduced_order)
        vals = {p: simplify(values[p]) for p in self.template.params}
        return RationalMap(_bind(self.reduced[0], vals, ring), _bind(self.reduced[1], vals, ring), self.reduced_order)

    def change(self) -> ChangeOfVariables:
        if self.change_text:
            return parse_change(self.change_text, self.order, self.reduced_order)
        return window_tail(self.order, self.reduced_order)

    def invariant(self, values: dict) -> InvariantForm | None:
        text = self.template.invariant
        if not text:
            return None
        for p in self.template.params:
            text = re.sub(rf"\b{re.escape(p)}\b", f"({values[p]})", text)
        return parse_invariant(text)

    def match(self, m: RationalMap) -> dict | None:
        """Exact parameter values making the template equal to ``m``, or ``None``."""
        if m.order != self.order or m.params or not m.is_exact():
            return None
        params = self.template.params
        ring = lag_names(self.order) + params
        N = m.numerator.with_variables(ring)
        D = m.denominator.with_variables(ring)
        E = N * self.denominator - D * self.numerator
        # split E = sum_p p * E_p + E_0 (parameters enter linearly)
        cols: list[dict] = [dict() for _ in params]
        const: dict = {}
        np_ = len(params)
        for exp, c in E.terms.items():
            pexp = exp[self.order:]
            mono = exp[: self.order]
            deg = sum(pexp)
            if deg == 0:
                const[mono] = const.get(mono, 0) + c
            elif deg == 1:
                j = pexp.index(1)
                cols[j][mono] = cols[j].get(mono, 0) + c
            else:
                raise ValueError(f"template {self.label} is not linear in its parameters")
        monos = sorted(set(const) | {mo for col in cols for mo in col})
        rows = [[cols[j].get(mo, 0) for j in range(np_)] for mo in monos]
        rhs = [-const.get(mo, 0) for mo in monos]
        if np_ == 0:
            return {} if all(r == 0 for r in rhs) else None
        homogeneous = all(r == 0 for r in rhs)
        x, basis = solve_linear(rows, rhs)
        if x is None:
            return None
        if homogeneous:
            if len(basis) != 1:
                return None
            v = basis[0]
            norm = self.template.normalize
            j = params.index(norm) if norm and v[params.index(norm)] != 0 else next(i for i, t in enumerate(v) if t != 0)
            x = [simplify(t / v[j]) for t in v]
        elif basis:
            return None
        values = dict(zip(params, x))
        if any(values[p] == 0 for p in self.template.require):
            return None
        for p, allowed in self.template.choices.items():
            if values[p] not in allowed:
                return None
        try:
            if self.build(values) != m:
                return None
        except (ValueError, ZeroDivisionError):
            return None
        return values


def _bind(p: Poly, vals: dict, ring) -> Poly:
    q = p.substitute(vals)
    used = set(q.used_variables())
    if used - set(ring):
        raise ValueError(f"unbound parameters {sorted(used - set(ring))}")
    ring = tuple(ring)
    idx = [q.variables.index(v) for v in ring]
    out = {}
    for exp, c in q.terms.items():
        key = tuple(exp[i] for i in idx)
        out[key] = out.get(key, 0) + c
    return Poly(ring, out)


def window_tail(source_order: int, target_order: int) -> ChangeOfVariables:
    """Keep the newest ``target_order`` entries of the window."""
    from ..algebra.maps import RationalFunction

    names = lag_names(source_order)
    base = RationalFunction(Poly.var("x0", names), reduce=False)
    return lagged_change("window-tail", (target_order,), base, source_order, target_order)


def _parse_family_block(block: list[tuple[int, str]]) -> FamilyTemplate:
    raw = {}
    for lineno, line in block:
        if ":" not in line:
            raise EquationParseError("expected 'key: value'", line=lineno)
        key, val = (s.strip() for s in line.split(":", 1))
        if key not in FAMILY_KEYS:
            raise EquationParseError(f"unknown family key {key!r}", line=lineno)
        raw[key] = val
    index, index_min = None, 0
    if "index" in raw:
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*>=\s*(\d+)\s*", raw["index"])
        if not m:
            raise EquationParseError(f"bad index line {raw['index']!r}")
        index, index_min = m.group(1), int(m.group(2))
    params = tuple(p.strip() for p in raw.get("params", "").split(",") if p.strip())
    choices = {}
    if "choices" in raw:
        name, vals = raw["choices"].split("=", 1)
        choices[name.strip()] = tuple(parse_scalar(v) for v in vals.split("|"))
    return FamilyTemplate(
        name=raw["name"],
        order=raw["order"],
        params=params,
        numerator=raw["numerator"],
        denominator=raw.get("denominator", "1"),
        index=index,
        index_min=index_min,
        change=raw.get("change"),
        reduced_order=raw.get("reduced_order", "1") if "invariant" not in raw else raw.get("reduced_order", f"{raw['order']} - 1"),
        reduced_numerator=raw.get("reduced_numerator"),
        reduced_denominator=raw.get("reduced_denominator"),
        crash=raw.get("crash", "pole"),
        normalize=raw.get("normalize"),
        require=tuple(p.strip() for p in raw.get("require", "").split(",") if p.strip()),
        choices=choices,
        invariant=raw.get("invariant"),
        notes=raw.get("notes", ""),
    )


def parse_families(text: str) -> list[FamilyTemplate]:
    blocks: list[list] = [[]]
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("#"):
            continue
        if s == "---":
            blocks.append([])
        elif s:
            blocks[-1].append((lineno, s))
    return [_parse_family_block(b) for b in blocks if b]


@lru_cache(maxsize=1)
def load_families() -> tuple[FamilyTemplate, ...]:
    text = resources.files("forbiddenset.reductions").joinpath("data/families.eq").read_text(encoding="utf-8")
    return tuple(parse_families(text))


def family(name: str) -> FamilyTemplate:
    for f in load_families():
        if f.name == name:
            return f
    raise KeyError(name)


def build_family(name: str, values: dict, index: int | None = None) -> RationalMap:
    """Concrete equation of a catalog family, e.g. ``build_family("abo-zeid", {...}, 2)``."""
    return family(name).instantiate(index).build(values)
