"""The quotient-ring model for sum-rule coefficient polynomials.

Everything lives in the Laurent ring over pair variables ``x1, y1, ...,
xk, yk`` modulo the relation ``x1*y1*...*xk*yk = 1`` (normal forms), with
unit symbols ``z_j`` standing for the critical points ``e^{i theta_j}``.

The degree-2k part ``G_2k`` of the sum-rule trace functional is built two
independent ways and compared as normal forms:

* the trace route, from the index-tuple expansion of ``Tr(U_N^l)``,
* the Hall-Littlewood route, from the double sum over the monomials
  ``a_{k,p}`` and ``b_{k,q}``, itself evaluated both by nested divided
  differences and by complete homogeneous symmetric sums.

The evaluation map ``phi`` sends ``x_p^b y_p^g`` (per pair) to
``alpha_{n+b} * conj(alpha_{n+g})``; in particular a constant c maps to
``c * |alpha_n|^{2k}``, which is what makes the ``-1/k`` term match the
k-th order of ``-log(1 - |alpha_n|^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .laurent import (
    GR_ONE,
    GaussianRational,
    LaurentPoly,
    VarTable,
    divided_diff,
    exact_div,
    substitute,
)
from .opuc import VerblunskySeq
from .trig import TrigPoly

# guard for the symbolic trace expansion; k*l and window size beyond this
# point produce polynomials too large for desk use
MAX_TRACE_COMPLEXITY = 18
MAX_TRACE_WINDOW = 80


class ModelError(Exception):
    pass


# -- tables and basis monomials ---------------------------------------------------


def model_table(k: int, units: Sequence[str] = (), plain: Sequence[str] = ()) -> VarTable:
    """Pair variables x1..yk plus the unit symbols of a weight."""
    return VarTable.build(k, units=units, plain=plain)


def table_for(k: int, h: TrigPoly, plain: Sequence[str] = ()) -> VarTable:
    if h.table is None:
        raise ModelError("symbolic construction needs an exact-mode weight")
    return model_table(k, units=h.table.names, plain=plain)


def a_monomials(table: VarTable, k: int) -> list:
    """``a_{k,p} = prod_{s>=p} y_s * prod_{s>=p+1} x_s`` for p = 1..k."""
    out = []
    for p in range(1, k + 1):
        exps: dict = {}
        for s in range(p, k + 1):
            exps[f"y{s}"] = 1
        for s in range(p + 1, k + 1):
            exps[f"x{s}"] = 1
        out.append(table.monomial(exps))
    return out


def b_monomials(table: VarTable, k: int) -> list:
    """``b_{k,p} = prod_{s<=p} x_s y_s`` for p = 1..k."""
    out = []
    for p in range(1, k + 1):
        exps = {}
        for s in range(1, p + 1):
            exps[f"x{s}"] = 1
            exps[f"y{s}"] = 1
        out.append(table.monomial(exps))
    return out


def c_monomials(table: VarTable, k: int) -> list:
    """``c_{k,p} = prod_{s>=p} x_s * prod_{p<=s<=k-1} y_s``."""
    out = []
    for p in range(1, k + 1):
        exps: dict = {}
        for s in range(p, k + 1):
            exps[f"x{s}"] = 1
        for s in range(p, k):
            exps[f"y{s}"] = exps.get(f"y{s}", 0) + 1
        out.append(table.monomial(exps))
    return out


def d_monomials(table: VarTable, k: int) -> list:
    """``d_{k,p} = prod_{s<=p} y_{s-1} x_s`` with ``y_0 := y_k``."""
    out = []
    for p in range(1, k + 1):
        exps: dict = {}
        for s in range(1, p + 1):
            y_index = s - 1 if s > 1 else k
            exps[f"y{y_index}"] = exps.get(f"y{y_index}", 0) + 1
            exps[f"x{s}"] = exps.get(f"x{s}", 0) + 1
        out.append(table.monomial(exps))
    return out


def e_monomials(table: VarTable, k: int) -> list:
    """``e_{k,p}``: equals ``c_{k,p}`` for p >= 2, and ``1/y_k`` for p = 1."""
    cs = c_monomials(table, k)
    return [table.monomial({f"y{k}": -1})] + cs[1:]


def pair_product(table: VarTable, k: int, power: int = 1) -> LaurentPoly:
    """``(x1*y1*...*xk*yk)^power``."""
    exps = {}
    for p in range(1, k + 1):
        exps[f"x{p}"] = power
        exps[f"y{p}"] = power
    return table.monomial(exps)


# -- compositions and symmetric sums ----------------------------------------------


def compositions(total: int, parts: int, positive: bool = False) -> Iterator[tuple]:
    """All length-``parts`` integer compositions of ``total`` (>= 0 or >= 1)."""
    low = 1 if positive else 0
    if parts == 0:
        if total == 0:
            yield ()
        return

    def rec(remaining: int, slots: int, prefix: tuple):
        if slots == 1:
            if remaining >= low:
                yield prefix + (remaining,)
            return
        top = remaining - low * (slots - 1)
        for v in range(low, top + 1):
            yield from rec(remaining - v, slots - 1, prefix + (v,))

    yield from rec(total, parts, ())


def hom_sym(points: Sequence[LaurentPoly], degree: int) -> LaurentPoly:
    """Complete homogeneous symmetric polynomial of the points.

    ``hom_sym(pts, m) = sum over multisets of size m``; zero for negative
    degree, one for degree zero.
    """
    table = points[0].table
    if degree < 0:
        return table.zero()
    total = table.zero()
    for comp in compositions(degree, len(points)):
        term = table.one()
        for point, power in zip(points, comp):
            if power:
                term = term * point ** power
        total = total + term
    return total


# -- index tuples ------------------------------------------------------------------


def enum_d(k: int, l: int) -> frozenset:
    """Index tuples ``(i_1, j_1, ..., i_k, j_k)`` of the trace expansion.

    Generated through the bijection with pairs of compositions: ``v`` with
    nonnegative parts and ``vt`` with positive parts, both summing to l,
    via ``i_p = sum_{s<p} (v_s - vt_s)`` and ``j_p = i_p + v_p``.  Empty
    exactly when l < k.
    """
    if k < 1 or l < 1:
        raise ModelError("k and l must be positive")
    out = set()
    for v in compositions(l, k):
        for vt in compositions(l, k, positive=True):
            tup = []
            i = 0
            for p in range(k):
                j = i + v[p]
                tup += [i, j]
                i = j - vt[p]
            out.add(tuple(tup))
    return frozenset(out)


def enum_d_direct(k: int, l: int) -> frozenset:
    """Independent enumeration by constraint filtering over a bounded box.

    Constraints: ``i_1 = 0``, ``j_p >= i_p``, ``j_p > i_{p+1}`` cyclically,
    ``sum (j_p - i_p) = l``.  Entries provably lie in ``[-l+1, l]``.
    """
    out = []

    def rec(p: int, prev_j: int, acc: int, prefix: tuple):
        if p > k:
            if acc == l and prev_j > 0:
                out.append(prefix)
            return
        lo_i = 0 if p == 1 else -l
        hi_i = 0 if p == 1 else min(prev_j - 1, l)
        for i in range(lo_i, hi_i + 1):
            for j in range(i, l + 1):
                if acc + (j - i) > l:
                    break
                rec(p + 1, j, acc + (j - i), prefix + (i, j))

    rec(1, l + 1, 0, ())
    return frozenset(out)


def index_tuple_count(k: int, l: int) -> int:
    """``C(l+k-1, k-1) * C(l-1, k-1)``, the size of the index-tuple set."""
    return math.comb(l + k - 1, k - 1) * math.comb(l - 1, k - 1)


def _tuple_monomial_pos(table: VarTable, tup: tuple, k: int) -> LaurentPoly:
    exps: dict = {}
    for p in range(k):
        i, j = tup[2 * p], tup[2 * p + 1]
        if i:
            exps[f"x{p + 1}"] = exps.get(f"x{p + 1}", 0) + i
        if j:
            exps[f"y{p + 1}"] = exps.get(f"y{p + 1}", 0) + j
    return table.monomial(exps)


def _tuple_monomial_neg(table: VarTable, tup: tuple, k: int) -> LaurentPoly:
    # prod_p y_{p-1}^{i_p} x_p^{j_p} with y_0 := y_k
    exps: dict = {}
    for p in range(k):
        i, j = tup[2 * p], tup[2 * p + 1]
        y_index = p if p >= 1 else k
        if i:
            exps[f"y{y_index}"] = exps.get(f"y{y_index}", 0) + i
        if j:
            exps[f"x{p + 1}"] = exps.get(f"x{p + 1}", 0) + j
    return table.monomial(exps)


# -- the evaluation map phi ---------------------------------------------------------


def phi_eval(p: LaurentPoly, alpha: VerblunskySeq, n: int,
             unit_values: Mapping[str, complex] | None = None) -> complex:
    """Evaluate ``[phi_2k(p)]_n`` for p with nonnegative pair exponents.

    Every pair contributes ``alpha_{n+b} * conj(alpha_{n+g})``, including
    pairs with zero exponents, so ``phi(1) = |alpha_n|^{2k}``.
    """
    table = p.table
    pairs = _pair_slot_pairs(table)
    unit_values = unit_values or {}
    total = 0j
    for e, c in p.terms.items():
        value = complex(c)
        for slot, (name, kind) in enumerate(zip(table.names, table.kinds)):
            if kind == "z" and e[slot]:
                value *= unit_values[name] ** e[slot]
            elif kind == "a" and e[slot]:
                raise ModelError("phi is undefined on plain symbols")
        for x_slot, y_slot in pairs:
            beta, gamma = e[x_slot], e[y_slot]
            if beta < 0 or gamma < 0:
                raise ModelError("phi needs nonnegative pair exponents")
            value *= alpha(n + beta) * np.conj(alpha(n + gamma))
        total += value
    return total


def _pair_slot_pairs(table: VarTable) -> list:
    xs = [i for i, kind in enumerate(table.kinds) if kind == "x"]
    ys = [i for i, kind in enumerate(table.kinds) if kind == "y"]
    return list(zip(xs, ys))


# -- symbolic trace expansion --------------------------------------------------------


def trace_table(n_sym: int) -> VarTable:
    names = [f"al{m}" for m in range(n_sym)] + [f"ac{m}" for m in range(n_sym)]
    return VarTable.build(0, plain=names)


def trace_symbolic(l: int, n_sym: int) -> LaurentPoly:
    """``Tr(U_N^l)`` as an exact polynomial in symbols al_m, ac_m.

    Uses the squared-rho variant of the truncation, whose entries are
    polynomial (``-al_{k-1} ac_l`` above the diagonal, ``1 - al_m ac_m``
    on the subdiagonal); it has the same traces of powers as the GGT
    corner itself.  Computed by enumerating closed Hessenberg walks.
    """
    if l < 1 or n_sym < 1:
        raise ModelError("power and window must be positive")
    if n_sym > MAX_TRACE_WINDOW:
        raise ModelError("symbolic window exceeds the configured guard")
    table = trace_table(n_sym)
    entry_cache: dict = {}

    def entry(row: int, col: int) -> LaurentPoly:
        key = (row, col)
        cached = entry_cache.get(key)
        if cached is None:
            if col == row - 1:
                cached = table.one() - table.monomial(
                    {f"al{col}": 1, f"ac{col}": 1})
            elif row == 0:
                cached = table.var(f"ac{col}")
            else:
                cached = table.monomial({f"al{row - 1}": 1, f"ac{col}": 1}, -1)
            entry_cache[key] = cached
        return cached

    total = table.zero()

    def rec(start: int, pos: int, remaining: int, acc: LaurentPoly):
        nonlocal total
        if remaining == 1:
            if start >= pos - 1:
                total = total + acc * entry(pos, start)
            return
        lo = max(pos - 1, 0)
        hi = min(n_sym - 1, start + remaining - 1)
        for nxt in range(lo, hi + 1):
            rec(start, nxt, remaining - 1, acc * entry(pos, nxt))

    for start in range(n_sym):
        rec(start, start, l, table.one())
    return total


def degree_part(p: LaurentPoly, degree: int) -> LaurentPoly:
    """Total-degree-homogeneous component of a polynomial."""
    return LaurentPoly(p.table, {e: c for e, c in p.terms.items() if sum(e) == degree})


def g2k_trace_symbolic(k: int, l: int, n_sym: int) -> LaurentPoly:
    """Degree-2k homogeneous part of the symbolic ``Tr(U_N^l)``."""
    if k * l > MAX_TRACE_COMPLEXITY:
        raise ModelError("k*l exceeds the configured symbolic-trace guard")
    return degree_part(trace_symbolic(l, n_sym), 2 * k)


@dataclass
class TraceExpansionResult:
    k: int
    l: int
    n_sym: int
    window: tuple
    compared_terms: int
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def trace_expansion_check(k: int, l: int) -> TraceExpansionResult:
    """Compare interior trace coefficients against the index-tuple formula.

    The claim: the degree-2k part of ``Tr(U_N^l)`` restricted to symbols
    in the window ``[2d, N-2d]`` equals ``(-1)^k (l/k) sum_n sum_tuples
    prod_p al_{n+i_p} ac_{n+j_p}``, duplicate tuples counted with
    multiplicity.  Exact integer comparison, no tolerance.
    """
    d_eff = l
    n_sym = l + 6 * d_eff
    window = (2 * d_eff, n_sym - 2 * d_eff)
    actual = g2k_trace_symbolic(k, l, n_sym)
    table = actual.table

    weight = GaussianRational(Fraction((-1) ** k * l, k))
    predicted: dict = {}
    tuples = enum_d(k, l)
    for n in range(max(l - 1, 0), n_sym - l):
        for tup in tuples:
            vec = [0] * table.arity
            ok = True
            for p in range(k):
                i_idx = n + tup[2 * p]
                j_idx = n + tup[2 * p + 1]
                if not (0 <= i_idx < n_sym and 0 <= j_idx < n_sym):
                    ok = False
                    break
                vec[i_idx] += 1
                vec[n_sym + j_idx] += 1
            if not ok:
                continue
            key = tuple(vec)
            predicted[key] = predicted.get(key, GaussianRational(0)) + weight
    predicted = {e: c for e, c in predicted.items() if c}

    def interior(e: tuple) -> bool:
        for slot, exp in enumerate(e):
            if exp:
                idx = slot if slot < n_sym else slot - n_sym
                if not (window[0] <= idx <= window[1]):
                    return False
        return True

    actual_interior = {e: c for e, c in actual.terms.items() if interior(e)}
    predicted_interior = {e: c for e, c in predicted.items() if interior(e)}

    result = TraceExpansionResult(k, l, n_sym, window,
                                  compared_terms=len(actual_interior))
    for e in sorted(set(actual_interior) | set(predicted_interior)):
        got = actual_interior.get(e, GaussianRational(0))
        want = predicted_interior.get(e, GaussianRational(0))
        if got != want:
            mono = "*".join(f"{table.names[i]}^{x}" for i, x in enumerate(e) if x)
            result.mismatches.append({"monomial": mono,
                                      "trace": got.to_text(),
                                      "predicted": want.to_text()})
    return result


# -- the G_2k builders ----------------------------------------------------------------


def _embedded_coeffs(h: TrigPoly, table: VarTable) -> dict:
    return {l: poly.embed(table) for l, poly in h.coeffs.items()}


def g2k_trace_scaled(k: int, h: TrigPoly) -> LaurentPoly:
    """Trace-route ``k * Z_H * G_2k`` in normal form.

    ``(-1)^{k+1} * sum_{l=1}^{d} [h_l * S_l^+ + h_{-l} * S_l^-]`` where the
    S-sums run over index tuples in their positive and negative monomial
    forms.  Empty (zero) when k exceeds the weight degree.
    """
    if k < 1:
        raise ModelError("k must be positive")
    d = h.degree
    table = table_for(k, h)
    hc = _embedded_coeffs(h, table)
    total = table.zero()
    for l in range(1, d + 1):
        if l < k:
            continue
        s_pos = table.zero()
        s_neg = table.zero()
        for tup in enum_d(k, l):
            s_pos = s_pos + _tuple_monomial_pos(table, tup, k)
            s_neg = s_neg + _tuple_monomial_neg(table, tup, k)
        total = total + hc[l] * s_pos + hc[-l] * s_neg
    sign = GR_ONE if k % 2 == 1 else -GR_ONE
    return (total * sign).normal_form()


def hl_double_sum(k: int, h: TrigPoly) -> LaurentPoly:
    """The Hall-Littlewood double sum, by nested divided differences.

    ``sum_{p,q} H(a_p b_q) / (prod_{s!=p}(1 - a_s/a_p) prod_{t!=q}(b_q/b_t
    - 1))`` computed exactly as ``D(b_1..b_k)(f2) * prod b_t`` with ``f2 =
    D(a_1..a_k)(f1(x, .))`` and ``f1(x, t) = H(t x) t^{k-1} x^{-1}``.
    Any division failure in the recursion signals a broken identity.
    """
    d = h.degree
    table = table_for(k, h, plain=("hl_s", "hl_t"))
    hc = _embedded_coeffs(h, table)
    f1 = table.zero()
    for l in range(-d, d + 1):
        if hc[l].is_zero:
            continue
        mono = table.monomial({"hl_t": l + k - 1, "hl_s": l - 1})
        f1 = f1 + hc[l] * mono
    a_pts = a_monomials(table, k)
    b_pts = b_monomials(table, k)
    f2 = divided_diff(a_pts, f1, "hl_t")
    ds = divided_diff(b_pts, f2, "hl_s")
    for p in b_pts:
        ds = ds * p
    target = table_for(k, h)
    return ds.project(target)


def g2k_hl_scaled_dd(k: int, h: TrigPoly) -> LaurentPoly:
    """Divided-difference route for ``k * Z_H * G'_2k`` in normal form."""
    table = table_for(k, h)
    ds = hl_double_sum(k, h)
    sign = GR_ONE if k % 2 == 1 else -GR_ONE
    z_h = h.coeffs[0].embed(table)
    return (ds * sign - z_h).normal_form()


def g2k_hl_scaled_hom(k: int, h: TrigPoly) -> LaurentPoly:
    """Complete-homogeneous route for ``k * Z_H * G'_2k`` in normal form.

    Per degree l: the positive part is ``h_l(a) * prod(b) * h_{l-k}(b)``
    and the negative part ``h_l(e) * prod(d) * h_{l-k}(d)``; the constant
    from the l = 0 coefficient cancels the ``- Z_H`` exactly.
    """
    d = h.degree
    table = table_for(k, h)
    hc = _embedded_coeffs(h, table)
    a_pts = a_monomials(table, k)
    b_pts = b_monomials(table, k)
    d_pts = d_monomials(table, k)
    e_pts = e_monomials(table, k)
    prod_b = table.one()
    for p in b_pts:
        prod_b = prod_b * p
    prod_d = table.one()
    for p in d_pts:
        prod_d = prod_d * p
    total = table.zero()
    for l in range(max(k, 1), d + 1):
        pos = hom_sym(a_pts, l) * prod_b * hom_sym(b_pts, l - k)
        neg = hom_sym(e_pts, l) * prod_d * hom_sym(d_pts, l - k)
        total = total + hc[l] * pos + hc[-l] * neg
    sign = GR_ONE if k % 2 == 1 else -GR_ONE
    return (total * sign).normal_form()


@dataclass
class RouteCheckResult:
    k: int
    d: int
    routes_equal: bool
    trace_equals_hl: bool
    diff_terms: int

    @property
    def passed(self) -> bool:
        return self.routes_equal and self.trace_equals_hl


def g2k_routes_check(k: int, h: TrigPoly) -> RouteCheckResult:
    """Full equivalence check between all three constructions of G_2k.

    Compares the scaled (by ``k * Z_H``) normal forms, which is equivalent
    to comparing the polynomials themselves because the Laurent ring has
    no zero divisors.
    """
    dd = g2k_hl_scaled_dd(k, h)
    hom = g2k_hl_scaled_hom(k, h)
    tr = g2k_trace_scaled(k, h)
    routes_equal = dd == hom
    trace_equals_hl = tr == dd
    diff = (tr - dd) if not trace_equals_hl else (dd - hom)
    return RouteCheckResult(k, h.degree, routes_equal, trace_equals_hl,
                            len(diff.terms))


def _divide_by_scale(poly: LaurentPoly, k: int, h: TrigPoly) -> LaurentPoly:
    z_h = h.coeffs[0].embed(poly.table)
    return exact_div(poly, z_h * Fraction(k))


def build_g2k_trace(k: int, h: TrigPoly) -> LaurentPoly:
    """Normal form of the trace-route G_2k (including the 1/(k Z_H) scale).

    Raises :class:`NonDivisible` when ``Z_H`` is not constant and does not
    divide the assembled polynomial; the scaled builders avoid this.
    """
    return _divide_by_scale(g2k_trace_scaled(k, h), k, h)


def build_g2k_hl(k: int, h: TrigPoly) -> LaurentPoly:
    """Normal form of G'_2k built by both Hall-Littlewood routes.

    The two routes are compared exactly before returning; a mismatch (or a
    NonDivisible from the divided-difference recursion) is an identity
    failure, not a recoverable condition.
    """
    dd = g2k_hl_scaled_dd(k, h)
    hom = g2k_hl_scaled_hom(k, h)
    if dd != hom:
        raise ModelError(f"route disagreement for k={k}, d={h.degree}")
    return _divide_by_scale(dd, k, h)


def hl_part(k: int, h: TrigPoly) -> LaurentPoly:
    """The Hall-Littlewood double-sum part of G'_2k, without the -1/k term.

    This is the piece whose class admits high-contact representatives at
    the critical point; the constant -1/k is class-invariant and is
    handled by the logarithm expansion instead.
    """
    table = table_for(k, h)
    ds = hl_double_sum(k, h)
    sign = GR_ONE if k % 2 == 1 else -GR_ONE
    return _divide_by_scale((ds * sign).normal_form(), k, h)


def basis_relation_check(k: int) -> bool:
    """Monomial identities tying the negative-degree basis to (a, b).

    For all p, q in [k]: ``d_p * e_{q+1} * a_p * b_q = (prod x_i y_i)^2``
    and the denominator products match:
    ``prod_{s!=p}(1 - a_s/a_p) * prod_{t!=q}(b_q/b_t - 1)`` equals
    ``prod_{s!=q}(1 - e_{s+1}/e_{q+1}) * prod_{t!=p}(d_p/d_t - 1)``.
    """
    table = model_table(k)
    one = table.one()
    a = a_monomials(table, k)
    b = b_monomials(table, k)
    d_m = d_monomials(table, k)
    e = e_monomials(table, k)
    unit2 = pair_product(table, k, 2)

    def e_next(idx: int) -> LaurentPoly:
        # e_{idx+1} with the wrap e_{k+1} = e_1 (1-based idx in [1, k])
        return e[idx % k]

    for p in range(1, k + 1):
        for q in range(1, k + 1):
            if d_m[p - 1] * e_next(q) * a[p - 1] * b[q - 1] != unit2:
                return False
            lhs = one
            for s in range(1, k + 1):
                if s != p:
                    lhs = lhs * (one - a[s - 1] * a[p - 1].inverse())
            for t in range(1, k + 1):
                if t != q:
                    lhs = lhs * (b[q - 1] * b[t - 1].inverse() - one)
            rhs = one
            for s in range(1, k + 1):
                if s != q:
                    rhs = rhs * (one - e_next(s) * e_next(q).inverse())
            for t in range(1, k + 1):
                if t != p:
                    rhs = rhs * (d_m[p - 1] * d_m[t - 1].inverse() - one)
            if lhs != rhs:
                return False
    return True


# -- the constant identity ---------------------------------------------------------


def constant_partial_sums(k: int) -> tuple:
    """The two scalar factors of the double-sum constant identity.

    ``sum_p 1 / prod_{s != p} (1 - t_s/t_p)`` equals 1 and ``sum_p 1 /
    prod_{s != p} (t_p/t_s - 1)`` equals ``(-1)^{k+1}``; both are computed
    through exact divided differences of ``x^{k-1}`` and ``1/x``.
    """
    table = VarTable.build(0, units=[f"t{i}" for i in range(1, k + 1)],
                           plain=("s",))
    pts = [table.var(f"t{i}") for i in range(1, k + 1)]
    sign = GR_ONE if k % 2 == 1 else -GR_ONE

    a_poly = divided_diff(pts, table.var("s", k - 1), "s") * sign
    if not a_poly.is_monomial and not a_poly.is_zero:
        raise ModelError("first constant sum did not collapse to a scalar")

    prod_t = table.one()
    for p in pts:
        prod_t = prod_t * p
    b_poly = divided_diff(pts, table.var("s", -1), "s") * prod_t * sign
    a_val = a_poly.constant_value()
    b_val = b_poly.constant_value()
    if table.const(a_val) != a_poly or table.const(b_val) != b_poly:
        raise ModelError("constant sums did not collapse to scalars")
    return a_val, b_val


def constant_sum_check(k: int) -> GaussianRational:
    """Exact value of the full double-sum constant; equals ``(-1)^{k+1}``."""
    a_val, b_val = constant_partial_sums(k)
    return a_val * b_val


# -- per-site expansion polynomial (phi-ready form) -----------------------------------


def site_poly(k: int, h: TrigPoly) -> LaurentPoly:
    """The degree-2k site polynomial with all exponents cleared to >= 0.

    Assembles the double sum per degree with the positive-composition
    rewriting of the negative part (monomials c and d), adds the constant
    ``h_0 * (-1)^{k+1}``, and multiplies by ``(prod x_i y_i)^{2k}``.  The
    result lies in the plain polynomial ring; a negative exponent would
    mean a broken identity and raises.
    """
    d = h.degree
    if k > d:
        raise ModelError("k cannot exceed the weight degree")
    table = table_for(k, h)
    hc = _embedded_coeffs(h, table)
    a_pts = a_monomials(table, k)
    b_pts = b_monomials(table, k)
    c_pts = c_monomials(table, k)
    d_pts = d_monomials(table, k)
    prod_b = table.one()
    for p in b_pts:
        prod_b = prod_b * p
    prod_d = table.one()
    for p in d_pts:
        prod_d = prod_d * p
    sign = GR_ONE if k % 2 == 1 else -GR_ONE
    total = hc[0] * sign
    for l in range(max(k, 1), d + 1):
        pos = hom_sym(a_pts, l) * prod_b * hom_sym(b_pts, l - k)
        neg = hom_sym(c_pts, l) * prod_d * hom_sym(d_pts, l - k)
        total = total + hc[l] * pos + hc[-l] * neg
    out = total * pair_product(table, k, 2 * k)
    pair_slots = table.pair_slots()
    for e in out.terms:
        if any(e[i] < 0 for i in pair_slots):
            raise ModelError("site polynomial has a negative exponent")
    return out


def _compile_site_terms(poly: LaurentPoly, unit_values: Mapping[str, complex]) -> list:
    table = poly.table
    pairs = _pair_slot_pairs(table)
    compiled = []
    for e, c in poly.terms.items():
        value = complex(c)
        for slot, (name, kind) in enumerate(zip(table.names, table.kinds)):
            if kind == "z" and e[slot]:
                value *= unit_values[name] ** e[slot]
        exps = tuple((e[x], e[y]) for x, y in pairs)
        compiled.append((value, exps))
    return compiled


def site_functional(alpha: VerblunskySeq, n: int, h: TrigPoly) -> float:
    """Per-site reformulation of the sum-rule functional.

    ``sum_{j<n} [ sum_k pref_k * phi_2k(site_poly(k)) - log(1-|a_j|^2)
    - sum_k |a_j|^{2k}/k ]`` with ``pref_k = (-1)^{k+1} / (k Z_H)``; the
    k-sum runs to the weight degree.  Differs from the trace functional
    by an N-independent bounded amount.
    """
    d = h.degree
    unit_values = h.unit_values()
    z_h = h.z_h_numeric()
    compiled = []
    max_shift = 0
    for k in range(1, d + 1):
        poly = site_poly(k, h)
        terms = _compile_site_terms(poly, unit_values)
        pref = (-1) ** (k + 1) / (k * z_h)
        compiled.append((k, pref, terms))
        for _, exps in terms:
            for beta, gamma in exps:
                max_shift = max(max_shift, beta, gamma)

    a_vals = np.array([alpha(m) for m in range(n + max_shift + 1)], dtype=complex)
    if a_vals.size and np.max(np.abs(a_vals[:n])) >= 1.0:
        raise ModelError("Verblunsky coefficients must satisfy |alpha| < 1")
    a_conj = np.conj(a_vals)
    total = 0.0
    for j in range(n):
        site = 0.0 + 0.0j
        for k, pref, terms in compiled:
            acc = 0.0 + 0.0j
            for coeff, exps in terms:
                prod = coeff
                for beta, gamma in exps:
                    prod *= a_vals[j + beta] * a_conj[j + gamma]
                acc += prod
            site += pref * acc
        mod2 = abs(a_vals[j]) ** 2
        log_part = math.log1p(-mod2)
        power_part = sum(mod2 ** k / k for k in range(1, d + 1))
        total += site.real - log_part - power_part
    return float(total)


# -- degree-2 product identity ---------------------------------------------------------


@dataclass
class ProductCheckResult:
    degree: int
    points: int
    passed: bool
    diff_terms: int


def h_at_pair_monomial(h: TrigPoly, table: VarTable) -> LaurentPoly:
    """``H(x1 * y1^2)``, the weight evaluated at ``a_{1,1} b_{1,1}``."""
    out = table.zero()
    for l in range(-h.degree, h.degree + 1):
        coeff = h.coeffs[l].embed(table)
        if coeff.is_zero:
            continue
        out = out + coeff * table.monomial({"x1": l, "y1": 2 * l})
    return out


def critical_product(h: TrigPoly, table: VarTable) -> LaurentPoly:
    """``2^{-d} prod_j (y1 - z_j)^{m_j} (x1 - 1/z_j)^{m_j}``.

    The image of this polynomial under phi at site n is exactly
    ``2^{-d} |(prod_j (S - conj(z_j))^{m_j} alpha)_n|^2``, which ties the
    degree-2 class to the shifted-difference summability condition.
    """
    out = table.const(Fraction(1, 2 ** h.degree))
    x1, y1 = table.var("x1"), table.var("y1")
    for z, m in zip(h.unit_polys, h.points.multiplicities):
        zp = z.embed(table)
        out = out * (y1 - zp) ** m * (x1 - zp.inverse()) ** m
    return out


def degree2_product_check(h: TrigPoly) -> ProductCheckResult:
    """Quotient equality of ``H(x1 y1^2)`` with the critical product."""
    table = table_for(1, h)
    lhs = h_at_pair_monomial(h, table).normal_form()
    rhs = critical_product(h, table).normal_form()
    diff = lhs - rhs
    return ProductCheckResult(h.degree, h.points.count, diff.is_zero,
                              len(diff.terms))


def product_representative(h: TrigPoly) -> LaurentPoly:
    """The critical product divided by ``Z_H``: the k = 1 witness with full
    contact order 2d at the critical point."""
    table = table_for(1, h)
    z_h = h.coeffs[0].embed(table)
    return exact_div(critical_product(h, table), z_h)


# -- Taylor contact degree and representative search ------------------------------------


def l_degree(p: LaurentPoly, d: int, z_name: str = "z1") -> int:
    """Minimum capped Taylor degree at the critical point.

    Expands p around ``(x_p, y_p) = (1/z, z)`` and returns ``min_terms
    sum_p (beta_p ^ d + gamma_p ^ d)`` where ``^`` caps at d.  Requires
    nonnegative pair exponents.  Zero polynomial returns 0.
    """
    table = p.table
    k = table.pair_count
    if k == 0:
        raise ModelError("contact degree needs pair variables")
    pair_slots = table.pair_slots()
    for e in p.terms:
        if any(e[i] < 0 for i in pair_slots):
            raise ModelError("contact degree needs nonnegative pair exponents")
    if p.is_zero:
        return 0
    u_names = tuple(f"dx{i}" for i in range(1, k + 1))
    v_names = tuple(f"dy{i}" for i in range(1, k + 1))
    ext = VarTable(table.names + u_names + v_names,
                   table.kinds + ("a",) * (2 * k))
    z = ext.var(z_name)
    bindings = {}
    for i in range(1, k + 1):
        bindings[f"x{i}"] = ext.var(f"dx{i}") + z.inverse()
        bindings[f"y{i}"] = ext.var(f"dy{i}") + z
    expanded = substitute(p.embed(ext), bindings)
    u_slots = [ext.slot(name) for name in u_names]
    v_slots = [ext.slot(name) for name in v_names]
    best = None
    for e in expanded.terms:
        value = sum(min(e[s], d) for s in u_slots) + sum(min(e[s], d) for s in v_slots)
        if best is None or value < best:
            best = value
    return best


def representative_search(p: LaurentPoly, k: int, d: int, budget: int = 3,
                          extra_candidates: Sequence[LaurentPoly] = ()) -> tuple:
    """Best-effort search for a high-contact representative of p's class.

    Greedy hill-climb over per-monomial shifts by ``(prod x_i y_i)^t`` for
    ``t in [-budget, budget]`` (canonical monomial order, ties to smaller
    |t|), maximizing :func:`l_degree`.  Extra candidates whose class
    matches are used as additional seeds; this is how the exact k = 1
    product witness enters.  Returns ``(representative, contact_degree)``
    and never changes the quotient class.
    """
    table = p.table
    pair_slots = table.pair_slots()
    target = p.normal_form()

    def in_ring(poly: LaurentPoly) -> bool:
        return all(all(e[i] >= 0 for i in pair_slots) for e in poly.terms)

    def score(poly: LaurentPoly) -> int:
        return l_degree(poly, d)

    seeds = [p if in_ring(p) else target]
    for cand in extra_candidates:
        if in_ring(cand) and cand.normal_form() == target:
            seeds.append(cand)

    shifts = sorted(range(-budget, budget + 1), key=lambda t: (abs(t), t))
    best_poly = None
    best_score = -1
    for seed in seeds:
        current = seed
        current_score = score(current)
        improved = True
        while improved:
            improved = False
            for e, c in current.sorted_terms():
                if e not in current.terms:
                    continue
                single = LaurentPoly(table, {e: current.terms[e]})
                base = current - single
                best_shift = None  # (score, |t|, t, candidate); ties to smaller |t|
                for t in shifts:
                    if t == 0:
                        continue
                    shifted_exp = list(e)
                    for i in pair_slots:
                        shifted_exp[i] += t
                    if any(x < 0 for x in shifted_exp):
                        continue
                    cand = base + LaurentPoly(table, {tuple(shifted_exp): current.terms[e]})
                    cand_score = score(cand)
                    if cand_score > current_score and (
                            best_shift is None or cand_score > best_shift[0]):
                        best_shift = (cand_score, abs(t), t, cand)
                if best_shift is not None:
                    current, current_score = best_shift[3], best_shift[0]
                    improved = True
        if current_score > best_score:
            best_poly, best_score = current, current_score

    if best_poly.normal_form() != target:
        raise ModelError("search changed the quotient class")
    return best_poly, best_score
