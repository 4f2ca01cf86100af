"""Inverse-orbit trees: preimages of the pole variety under the unfolding."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy

from ..algebra.maps import DEFAULT_TOL, as_equation, crash_step, lag_names, unfold
from ..algebra.scalars import COMPLEX, REAL, is_exact, magnitude, simplify, to_complex
from ..fsdesc import FinitePointSet

Solver = Callable[[tuple], list]


@dataclass(frozen=True)
class TreeNode:
    point: tuple
    depth: int
    parent: int | None
    branch: int


@dataclass
class InverseOrbitTree:
    """Nodes in breadth-first order; ``parent`` indexes into ``nodes``."""

    roots: list
    nodes: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def points(self, depth: int | None = None) -> list:
        return [n.point for n in self.nodes if depth is None or n.depth == depth]

    @property
    def depth(self) -> int:
        return max((n.depth for n in self.nodes), default=-1)

    def as_fs(self, generator: str = "inverse-orbit") -> FinitePointSet:
        pts = [n.point[0] if len(n.point) == 1 else n.point for n in self.nodes]
        return FinitePointSet(pts, generator, [n.depth for n in self.nodes])


def _univariate_roots(coeffs: list, field: str, imag_tol: float = 1e-9) -> list:
    """Roots of ``sum coeffs[i] x^i``; rational roots stay exact."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) < 2:
        return []
    out = []
    if all(isinstance(c, (int, Fraction)) for c in coeffs):
        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(map(Fraction, coeffs)))
        _, factors = sympy.factor_list(expr, x)
        numeric = []
        for fac, _mult in factors:
            fp = sympy.Poly(fac, x)
            if fp.degree() == 1:
                a, b = fp.all_coeffs()
                r = -sympy.Rational(b) / sympy.Rational(a)
                out.append(Fraction(int(r.p), int(r.q)))
            elif fp.degree() > 1:
                numeric.extend(np.roots([float(c) for c in fp.all_coeffs()]))
        seen = set()
        exact = []
        for r in out:
            if r not in seen:
                seen.add(r)
                exact.append(r)
        out = exact
    elif len(coeffs) == 2 and all(is_exact(c) for c in coeffs):
        return [simplify(-coeffs[0] / coeffs[1])]
    else:
        numeric = list(np.roots([to_complex(c) for c in reversed(coeffs)]))
    for z in numeric:
        z = complex(z)
        if field == REAL:
            if abs(z.imag) <= imag_tol * max(1.0, abs(z)):
                out.append(z.real)
        else:
            out.append(z.real if z.imag == 0 else z)
    return out


def polynomial_preimages(de, field: str = COMPLEX, tol: float = DEFAULT_TOL) -> Solver:
    """Branch solver: preimages of a window by solving for the oldest coordinate."""
    de = as_equation(de)
    m = de.map
    k = m.order
    names = lag_names(k)
    oldest = names[0]

    def solve(window: tuple) -> list:
        w = window[-1]
        rest = {names[j + 1]: window[j] for j in range(k - 1)}
        eq = (m.numerator - m.denominator * w).substitute(rest)
        coeffs = [c.constant_value() for c in eq.coeffs_in(oldest)]
        if all(c == 0 for c in coeffs):
            return []
        roots = _univariate_roots(coeffs, field)
        out = []
        for x in roots:
            pre = (x,) + tuple(window[:-1])
            den, scale = m.denominator.evaluate_scaled(list(pre))
            if (den == 0) if is_exact(den) else magnitude(den) <= tol * max(1.0, scale):
                continue
            out.append(pre)
        return out

    return solve


def pole_roots(de, field: str = COMPLEX, samples: int = 8, seed: int = 0, max_den: int = 4) -> list:
    """Sample points of ``{denominator = 0}``.

    Order one gives the poles themselves; higher orders pick rational values for
    all coordinates but the oldest and solve for it.
    """
    de = as_equation(de)
    m = de.map
    k = m.order
    names = lag_names(k)
    if k == 1:
        coeffs = [c.constant_value() for c in m.denominator.coeffs_in(names[0])]
        return [(r,) for r in _univariate_roots(coeffs, field)]
    rng = random.Random(seed)
    out = []
    for _ in range(samples * 4):
        vals = [Fraction(rng.randint(-2 * max_den, 2 * max_den), rng.randint(1, max_den)) for _ in range(k)]
        for var in reversed(names):
            rest = {n: v for n, v in zip(names, vals) if n != var}
            coeffs = [c.constant_value() for c in m.denominator.substitute(rest).coeffs_in(var)]
            roots = _univariate_roots(coeffs, field)
            if roots:
                i = names.index(var)
                pt = tuple(roots[0] if j == i else vals[j] for j in range(k))
                if pt not in out:
                    out.append(pt)
                break
        if len(out) >= samples:
            break
    return out


def _key(point: tuple, digits: int = 9):
    if all(is_exact(x) for x in point):
        return ("exact",) + tuple(point)
    parts = []
    for x in point:
        z = to_complex(x)
        scale = max(1.0, abs(z))
        parts.append((round(z.real / scale, digits), round(z.imag / scale, digits), round(np.log10(scale), 3)))
    return ("float",) + tuple(parts)


def _sort_key(point: tuple):
    return tuple((to_complex(x).real, to_complex(x).imag) for x in point)


def inverse_orbit(
    de,
    depth: int,
    *,
    roots: Sequence | None = None,
    solver: Solver | None = None,
    field: str = COMPLEX,
    verify: bool = True,
    verify_tol: float = 1e-8,
    max_nodes: int = 200_000,
    tol: float = DEFAULT_TOL,
) -> InverseOrbitTree:
    """Breadth-first preimage tree of the pole variety, down to ``depth``.

    Nodes at depth ``d`` reach a root after ``d`` forward steps, so they crash
    at step ``d``.  Exact nodes are checked by exact iteration; float nodes by
    comparing ``F^d(node)`` with their root.  Duplicates are dropped in a
    fixed traversal order; failed checks and pruned branches go to ``stats``.
    """
    de = as_equation(de)
    if roots is None:
        roots = pole_roots(de, field)
    roots = [tuple(simplify(x) if is_exact(x) else x for x in (r if isinstance(r, (tuple, list)) else (r,))) for r in roots]
    solve = solver or polynomial_preimages(de, field, tol)
    tree = InverseOrbitTree(list(roots))
    stats = {"pruned": 0, "duplicates": 0, "verify_failed": 0, "truncated": False}
    seen = set()
    frontier = []
    for r in roots:
        k = _key(r)
        if k in seen:
            continue
        seen.add(k)
        tree.nodes.append(TreeNode(r, 0, None, -1))
        frontier.append(len(tree.nodes) - 1)
    F = unfold(de)
    for d in range(1, depth + 1):
        nxt = []
        for idx in frontier:
            node = tree.nodes[idx]
            pres = solve(node.point)
            if not pres:
                stats["pruned"] += 1
            for b, pre in enumerate(sorted(pres, key=_sort_key)):
                key = _key(pre)
                if key in seen:
                    stats["duplicates"] += 1
                    continue
                seen.add(key)
                tree.nodes.append(TreeNode(tuple(pre), d, idx, b))
                nxt.append(len(tree.nodes) - 1)
                if len(tree.nodes) >= max_nodes:
                    stats["truncated"] = True
                    break
            if stats["truncated"]:
                break
        frontier = nxt
        if stats["truncated"] or not frontier:
            break
    if verify:
        keep = []
        for node in tree.nodes:
            if _verify_node(de, F, node, tree, verify_tol, tol):
                keep.append(node)
            else:
                stats["verify_failed"] += 1
        if stats["verify_failed"]:
            # drop failures and their subtrees by rebuilding parent links
            tree.nodes = _prune(tree.nodes, keep)
    tree.stats = stats
    return tree


def _root_of(tree: InverseOrbitTree, node: TreeNode) -> tuple:
    while node.parent is not None:
        node = tree.nodes[node.parent]
    return node.point


def _verify_node(de, F, node: TreeNode, tree: InverseOrbitTree, verify_tol: float, tol: float) -> bool:
    if all(is_exact(x) for x in node.point):
        return crash_step(de, list(node.point), node.depth + 1, tol) == node.depth
    state = node.point
    for _ in range(node.depth):
        state = F(state)
        if not isinstance(state, tuple):
            return False
    root = _root_of(tree, node)
    return all(magnitude(to_complex(a) - to_complex(b)) <= verify_tol * max(1.0, magnitude(b)) for a, b in zip(state, root))


def _prune(nodes: list, keep: list) -> list:
    kept = {id(n) for n in keep}
    remap = {}
    out = []
    for i, n in enumerate(nodes):
        if id(n) not in kept:
            continue
        if n.parent is not None and n.parent not in remap:
            continue
        remap[i] = len(out)
        out.append(TreeNode(n.point, n.depth, None if n.parent is None else remap[n.parent], n.branch))
    return out


def cdv_inverse(p) -> Solver:
    """Explicit inverse ``G(x, y) = (x (y - p), x)`` of ``x_{n+1} = p + x_{n-1}/x_n``."""
    p = simplify(p)

    def solve(window):
        x, y = window
        pre = (simplify(x * (y - p)) if is_exact(x) and is_exact(y) else x * (y - p), x)
        return [] if pre[1] == 0 else [pre]

    return solve
