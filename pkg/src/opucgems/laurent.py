"""Exact sparse multivariate Laurent polynomial arithmetic.

Coefficients are Gaussian rationals: exact complex numbers with Fraction
real and imaginary parts.  A polynomial is a sparse map from integer
exponent vectors to coefficients over a fixed variable table.  The table
distinguishes three kinds of variables:

* paired variables ``x1, y1, ..., xk, yk`` that participate in the
  quotient relation ``x1*y1*...*xk*yk = 1`` and swap under conjugation,
* unit symbols (``z1``, ...) for points on the unit circle, with
  ``conj(z) = 1/z``,
* plain symbols with no conjugation rule (formal increments, trace
  symbols, substitution slots).

All values are immutable after construction and every operation is pure,
so polynomials can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence


class LaurentError(Exception):
    """Base error for the polynomial layer."""


class VarTableMismatch(LaurentError):
    """Operands live over different variable tables."""


class NonDivisible(LaurentError):
    """Exact division failed; usually signals a broken identity."""


class NonInvertibleBinding(LaurentError):
    """A substitution needs the inverse of a non-monomial polynomial."""


class DuplicatePoint(LaurentError):
    """Divided difference received two equal interpolation points."""


_ZERO = Fraction(0)
_ONE = Fraction(1)


class GaussianRational:
    """Exact complex scalar ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def coerce(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value)
        if isinstance(value, complex):
            raise TypeError("floating-point values cannot enter exact arithmetic")
        raise TypeError(f"cannot coerce {value!r} to a Gaussian rational")

    @staticmethod
    def _try_coerce(value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value)
        return None

    def __add__(self, other):
        other = GaussianRational._try_coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational._try_coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = GaussianRational._try_coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational._try_coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def to_text(self) -> str:
        """Canonical ``a/b+c/d*i`` form used by the text serialization."""
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


@dataclass(frozen=True)
class VarTable:
    """Ordered variable table shared by all polynomials of one context.

    ``kinds[i]`` is one of ``'x'``, ``'y'`` (paired, in matched order),
    ``'z'`` (unit symbol) or ``'a'`` (plain symbol).  Conjugation swaps
    each x-slot with the matching y-slot, negates unit exponents, and is
    undefined on plain symbols.
    """

    names: tuple
    kinds: tuple

    def __post_init__(self):
        if len(self.names) != len(self.kinds):
            raise LaurentError("names and kinds must have equal length")
        if len(set(self.names)) != len(self.names):
            raise LaurentError("variable names must be unique")
        if self.kinds.count("x") != self.kinds.count("y"):
            raise LaurentError("paired variables must come in x/y pairs")
        for kind in self.kinds:
            if kind not in ("x", "y", "z", "a"):
                raise LaurentError(f"unknown variable kind {kind!r}")

    @staticmethod
    def build(pairs: int, units: Sequence[str] = (), plain: Sequence[str] = ()) -> "VarTable":
        """Table with pair variables x1,y1,...,xk,yk then units then plain."""
        names = []
        kinds = []
        for p in range(1, pairs + 1):
            names += [f"x{p}", f"y{p}"]
            kinds += ["x", "y"]
        names += list(units)
        kinds += ["z"] * len(units)
        names += list(plain)
        kinds += ["a"] * len(plain)
        return VarTable(tuple(names), tuple(kinds))

    @property
    def arity(self) -> int:
        return len(self.names)

    @property
    def pair_count(self) -> int:
        return self.kinds.count("x")

    def slot(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LaurentError(f"unknown variable {name!r}") from None

    def pair_slots(self) -> tuple:
        return tuple(i for i, k in enumerate(self.kinds) if k in ("x", "y"))

    def conj_permutation(self) -> tuple:
        """Slot permutation applied by conjugation (x_p <-> y_p)."""
        xs = [i for i, k in enumerate(self.kinds) if k == "x"]
        ys = [i for i, k in enumerate(self.kinds) if k == "y"]
        perm = list(range(self.arity))
        for a, b in zip(xs, ys):
            perm[a], perm[b] = b, a
        return tuple(perm)

    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return self.const(GR_ONE)

    def const(self, value) -> "LaurentPoly":
        value = GaussianRational.coerce(value)
        if not value:
            return self.zero()
        return LaurentPoly(self, {(0,) * self.arity: value})

    def var(self, name: str, exp: int = 1) -> "LaurentPoly":
        vec = [0] * self.arity
        vec[self.slot(name)] = exp
        return LaurentPoly(self, {tuple(vec): GR_ONE})

    def monomial(self, exponents: Mapping[str, int], coeff=GR_ONE) -> "LaurentPoly":
        coeff = GaussianRational.coerce(coeff)
        if not coeff:
            return self.zero()
        vec = [0] * self.arity
        for name, exp in exponents.items():
            vec[self.slot(name)] = exp
        return LaurentPoly(self, {tuple(vec): coeff})

    def contains(self, other: "VarTable") -> bool:
        """True when every variable of ``other`` exists here with equal kind."""
        for name, kind in zip(other.names, other.kinds):
            if name not in self.names:
                return False
            if self.kinds[self.names.index(name)] != kind:
                return False
        return True


class LaurentPoly:
    """Sparse Laurent polynomial over a :class:`VarTable`.

    ``terms`` maps exponent tuples (one signed integer per table slot) to
    nonzero :class:`GaussianRational` coefficients.  Instances are treated
    as immutable; no method mutates ``terms`` after construction.
    """

    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Mapping[tuple, GaussianRational]):
        self.table = table
        self.terms = {e: c for e, c in terms.items() if c}

    # -- basic predicates -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> GaussianRational:
        """Coefficient of the empty monomial (total constant term)."""
        return self.terms.get((0,) * self.table.arity, GR_ZERO)

    def sorted_terms(self) -> list:
        """Terms in canonical order: lexicographic on exponent vectors."""
        return sorted(self.terms.items())

    # -- ring operations ---------------------------------------------------

    def _check_table(self, other: "LaurentPoly"):
        if self.table != other.table:
            raise VarTableMismatch("operands use different variable tables")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = self.table.const(other)
        self._check_table(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = out.get(e)
            s = c if acc is None else acc + c
            if s:
                out[e] = s
            elif acc is not None:
                del out[e]
        return LaurentPoly(self.table, out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = self.table.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return LaurentPoly(self.table, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            scalar = GaussianRational.coerce(other)
            if not scalar:
                return self.table.zero()
            return LaurentPoly(self.table, {e: c * scalar for e, c in self.terms.items()})
        self._check_table(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                acc = out.get(key)
                s = ca * cb if acc is None else acc + ca * cb
                if s:
                    out[key] = s
                elif acc is not None:
                    del out[key]
        return LaurentPoly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("polynomial powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = self.table.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n >>= 1
        return result

    def inverse(self) -> "LaurentPoly":
        """Inverse of a monomial (the only units of the Laurent ring)."""
        if not self.is_monomial:
            raise NonInvertibleBinding("only monomials are invertible")
        ((e, c),) = self.terms.items()
        return LaurentPoly(self.table, {tuple(-x for x in e): GR_ONE / c})

    def conjugate(self) -> "LaurentPoly":
        """Apply the table conjugation: i -> -i, z -> 1/z, x_p <-> y_p."""
        perm = self.table.conj_permutation()
        kinds = self.table.kinds
        out: dict = {}
        for e, c in self.terms.items():
            vec = [e[perm[i]] for i in range(len(e))]
            for i, kind in enumerate(kinds):
                if kind == "z":
                    vec[i] = -vec[i]
                elif kind == "a" and vec[i] != 0:
                    raise LaurentError("cannot conjugate a plain symbol")
            key = tuple(vec)
            acc = out.get(key)
            s = c.conjugate() if acc is None else acc + c.conjugate()
            if s:
                out[key] = s
            elif acc is not None:
                del out[key]
        return LaurentPoly(self.table, out)

    # -- quotient ring normal form ------------------------------------------

    def normal_form(self) -> "LaurentPoly":
        """Canonical representative modulo ``prod x_i*y_i = 1``.

        Each monomial's pair-variable exponents are shifted by a multiple
        of the all-ones vector so their minimum is zero; like monomials
        merge.  Two polynomials have equal normal form exactly when they
        have the same image in the quotient ring.
        """
        slots = self.table.pair_slots()
        if not slots:
            raise LaurentError("normal form needs at least one variable pair")
        out: dict = {}
        for e, c in self.terms.items():
            shift = min(e[i] for i in slots)
            if shift:
                vec = list(e)
                for i in slots:
                    vec[i] -= shift
                key = tuple(vec)
            else:
                key = e
            acc = out.get(key)
            s = c if acc is None else acc + c
            if s:
                out[key] = s
            elif acc is not None:
                del out[key]
        return LaurentPoly(self.table, out)

    # -- embeddings and evaluation -------------------------------------------

    def embed(self, table: VarTable) -> "LaurentPoly":
        """Reinterpret over a larger table containing all current variables."""
        if table == self.table:
            return self
        if not table.contains(self.table):
            raise VarTableMismatch("target table does not contain all variables")
        slots = [table.slot(name) for name in self.table.names]
        out = {}
        for e, c in self.terms.items():
            vec = [0] * table.arity
            for i, exp in enumerate(e):
                vec[slots[i]] = exp
            out[tuple(vec)] = c
        return LaurentPoly(table, out)

    def project(self, table: VarTable) -> "LaurentPoly":
        """Reinterpret over a sub-table; dropped variables must not occur."""
        if table == self.table:
            return self
        if not self.table.contains(table):
            raise VarTableMismatch("target table is not a sub-table")
        slots = [self.table.slot(name) for name in table.names]
        kept = set(slots)
        out = {}
        for e, c in self.terms.items():
            for i, exp in enumerate(e):
                if exp and i not in kept:
                    raise LaurentError(
                        f"variable {self.table.names[i]!r} still occurs")
            out[tuple(e[i] for i in slots)] = c
        return LaurentPoly(table, out)

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        """Numeric evaluation with every variable bound to a complex value."""
        vals = [values[name] for name in self.table.names]
        total = 0j
        for e, c in self.terms.items():
            prod = complex(c)
            for v, exp in zip(vals, e):
                if exp:
                    prod *= v ** exp
            total += prod
        return total

    # -- comparison and presentation -------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            if self.table.arity == 0 or isinstance(other, (int, Fraction, GaussianRational)):
                return self == self.table.const(other)
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash((self.table, tuple(self.sorted_terms())))

    def to_text(self) -> str:
        """Deterministic text form: sorted terms, ``(coeff)*x1^e1*...``."""
        if self.is_zero:
            return "0"
        chunks = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"{name}^{exp}" for name, exp in zip(self.table.names, e) if exp
            )
            chunks.append(f"({c.to_text()})*{mono or '1'}")
        return " + ".join(chunks)

    def __repr__(self):
        return f"<LaurentPoly {self.to_text()}>"


# -- exact division -----------------------------------------------------------


def _monomial_shift(poly: LaurentPoly) -> tuple:
    """Per-variable minimum exponent over all terms (zero poly -> zeros)."""
    arity = poly.table.arity
    mins = [0] * arity
    first = True
    for e in poly.terms:
        if first:
            mins = list(e)
            first = False
        else:
            for i, x in enumerate(e):
                if x < mins[i]:
                    mins[i] = x
    return tuple(mins)


def _grlex_key(exponent: tuple):
    return (sum(exponent), exponent)


def exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Exact quotient ``p / q``; raises :class:`NonDivisible` otherwise.

    Works in the Laurent ring: monomial factors are stripped first, then
    ordinary polynomial division runs on the primitive parts with a graded
    leading-term order.  A nonzero remainder can only appear when ``p`` is
    genuinely not a multiple of ``q``.
    """
    p._check_table(q)
    if q.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero:
        return p.table.zero()
    if q.is_monomial:
        return p * q.inverse()

    p_shift = _monomial_shift(p)
    q_shift = _monomial_shift(q)
    p_hat = {tuple(x - s for x, s in zip(e, p_shift)): c for e, c in p.terms.items()}
    q_hat = {tuple(x - s for x, s in zip(e, q_shift)): c for e, c in q.terms.items()}

    lead_q = max(q_hat, key=_grlex_key)
    lead_q_coeff = q_hat[lead_q]
    quotient: dict = {}
    rem = dict(p_hat)
    while rem:
        lead_p = max(rem, key=_grlex_key)
        diff = tuple(a - b for a, b in zip(lead_p, lead_q))
        if any(d < 0 for d in diff):
            raise NonDivisible("leading term not divisible")
        factor = rem[lead_p] / lead_q_coeff
        quotient[diff] = factor
        for e, c in q_hat.items():
            key = tuple(a + b for a, b in zip(e, diff))
            acc = rem.get(key)
            s = -(factor * c) if acc is None else acc - factor * c
            if s:
                rem[key] = s
            elif acc is not None:
                del rem[key]

    shift = tuple(a - b for a, b in zip(p_shift, q_shift))
    out = {tuple(a + b for a, b in zip(e, shift)): c for e, c in quotient.items()}
    return LaurentPoly(p.table, out)


# -- substitution ---------------------------------------------------------------


def substitute(p: LaurentPoly, bindings: Mapping[str, LaurentPoly]) -> LaurentPoly:
    """Exact composition: replace each bound variable by a polynomial.

    A binding must be invertible (a monomial) whenever the variable occurs
    with a negative exponent; otherwise :class:`NonInvertibleBinding`.
    """
    if not bindings:
        return p
    table = p.table
    slots = {}
    for name, value in bindings.items():
        if not isinstance(value, LaurentPoly):
            value = table.const(value)
        value._check_table(p)
        slots[table.slot(name)] = value

    power_cache: dict = {}

    def power(slot: int, exp: int) -> LaurentPoly:
        key = (slot, exp)
        cached = power_cache.get(key)
        if cached is None:
            base = slots[slot]
            if exp < 0:
                cached = base.inverse() ** (-exp)
            else:
                cached = base ** exp
            power_cache[key] = cached
        return cached

    result = table.zero()
    for e, c in p.terms.items():
        vec = list(e)
        factors = []
        for slot in slots:
            if vec[slot]:
                factors.append(power(slot, vec[slot]))
                vec[slot] = 0
        term = LaurentPoly(table, {tuple(vec): c})
        for f in factors:
            term = term * f
        result = result + term
    return result


# -- divided differences ---------------------------------------------------------


def divided_diff(points: Sequence[LaurentPoly], f: LaurentPoly, var: str) -> LaurentPoly:
    """Divided-difference operator over interpolation points.

    Computes ``D(p_1,...,p_n)(f) = sum_i f(p_i) / prod_{j != i} (p_j - p_i)``
    by the two-point recursion, with an exact division at every step; the
    result is always a polynomial, so a division failure signals a broken
    identity upstream.  ``f`` is treated as univariate in ``var``; the
    points must not involve ``var`` and must be pairwise distinct.
    """
    if not points:
        raise LaurentError("at least one interpolation point required")
    table = f.table
    slot = table.slot(var)
    pts = []
    for point in points:
        point._check_table(f)
        if any(e[slot] for e in point.terms):
            raise LaurentError("interpolation points must not involve the variable")
        pts.append(point)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] == pts[j]:
                raise DuplicatePoint(f"points {i} and {j} coincide")

    memo: dict = {}

    def rec(idx: tuple) -> LaurentPoly:
        cached = memo.get(idx)
        if cached is not None:
            return cached
        if len(idx) == 1:
            value = substitute(f, {var: pts[idx[0]]})
        else:
            tail = idx[2:]
            left = rec((idx[0],) + tail)
            right = rec((idx[1],) + tail)
            value = exact_div(left - right, pts[idx[1]] - pts[idx[0]])
        memo[idx] = value
        return value

    return rec(tuple(range(len(pts))))
