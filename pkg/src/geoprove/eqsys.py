"""Exact rational equation systems for angles and ratios.

Both systems keep a pivot-disjoint echelon basis over arbitrary-precision
rationals; queries reduce a candidate row against the basis and succeed only
when it eliminates completely.  Floats never enter here.

Angle system
    rows ``sum q_i * x_i = c`` with rational ``q_i`` and the constant
    understood mod 1 (half-turn units).  Constants are normalized into
    [0, 1) when a row enters the system and then tracked exactly through
    elimination; a query holds iff its residual has an empty variable part
    and an integer constant.

Ratio system
    rows ``prod x_i ** e_i = c`` with positive rational ``c``, handled
    additively in log space.  Exponent vectors are scaled to integers so
    that elimination only ever raises constants to integer powers, keeping
    them exact rationals; constants are carried in factored form
    (prime -> exponent) because those integer powers compound far beyond
    what explicit numerators could hold.  Positivity of ratio values makes
    the reduction sound and complete for rational queries.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InconsistencyDetected

__all__ = ["SparseRow", "AngleEqSystem", "RatioEqSystem", "Factored"]


class SparseRow(dict):
    """Mapping var -> Fraction with zeros removed; supports the vector
    operations elimination needs."""

    def __init__(self, items=()):
        super().__init__()
        self.iadd_scaled(1, items)

    def __missing__(self, key):
        return Fraction(0)

    def iadd_scaled(self, coef, other):
        """self += coef * other (other: mapping or (var, coef) pairs)."""
        if coef == 0:
            return self
        items = other.items() if isinstance(other, dict) else other
        for k, x in items:
            x = Fraction(x) * coef
            if x == 0:
                continue
            s = self.get(k, 0) + x
            if s == 0:
                self.pop(k, None)
            else:
                self[k] = s
        return self

    def scaled(self, coef):
        return SparseRow((k, v * coef) for k, v in self.items())

    def copy(self):
        return SparseRow(self.items())


def _combo_row(combo):
    """Build a SparseRow from (coefficient, var) pairs, merging duplicates."""
    row = SparseRow()
    row.iadd_scaled(1, ((var, Fraction(coef)) for coef, var in combo))
    return row


class AngleEqSystem:
    """Reduced (pivot-disjoint) rational system with mod-1 constants."""

    def __init__(self):
        self._rows = {}  # pivot var -> (SparseRow with row[pivot] == 1, Fraction)

    # -- internals ---------------------------------------------------------

    def _reduce(self, row, const):
        row = row.copy()
        while True:
            pivots = [v for v in row if v in self._rows]
            if not pivots:
                return row, const
            for v in pivots:
                coef = row[v]
                prow, pconst = self._rows[v]
                row.iadd_scaled(-coef, prow)
                const -= coef * pconst

    def _insert_exact(self, row, const):
        row, const = self._reduce(row, const)
        if not row:
            if const.denominator == 1:
                return False  # already derivable
            raise InconsistencyDetected(
                f"angle system would derive 0 = {const} (mod 1)")
        pivot = min(row)
        inv = 1 / row[pivot]
        row = row.scaled(inv)
        const *= inv
        for p, (r, c) in list(self._rows.items()):
            coef = r.get(pivot, 0)
            if coef:
                r.iadd_scaled(-coef, row)
                self._rows[p] = (r, c - coef * const)
        self._rows[pivot] = (row, const)
        return True

    # -- public API --------------------------------------------------------

    def insert(self, combo, const):
        """Add ``sum coef*var = const (mod 1)``.  Returns True if the row
        added new knowledge, False if it was already derivable; raises
        InconsistencyDetected (without mutating) on contradiction."""
        return self._insert_exact(_combo_row(combo), Fraction(const) % 1)

    def query(self, combo, const) -> bool:
        row, c = self._reduce(_combo_row(combo), Fraction(const))
        return not row and c.denominator == 1

    def proves_equal(self, a, b) -> bool:
        if a == b:
            return True
        return self.query([(1, a), (-1, b)], 0)

    def substitute(self, old, new):
        """Rename variable ``old`` to ``new`` (after a merge) and
        re-echelonize.  Raises InconsistencyDetected on contradiction."""
        if old == new or old not in self.variables():
            return
        rows = [(r.copy(), c) for r, c in self._rows.values()]
        rebuilt = AngleEqSystem()
        for r, c in rows:
            coef = r.pop(old, 0)
            if coef:
                r.iadd_scaled(1, [(new, coef)])
            rebuilt._insert_exact(r, c)
        self._rows = rebuilt._rows

    def variables(self):
        seen = set()
        for pivot, (row, _) in self._rows.items():
            seen.update(row)
        return seen

    def rows(self):
        """Pivot-sorted copies with constants shown reduced into [0, 1)."""
        return [(dict(r), c % 1) for _, (r, c) in sorted(self._rows.items())]

    def copy(self):
        dup = AngleEqSystem()
        dup._rows = {p: (r.copy(), c) for p, (r, c) in self._rows.items()}
        return dup

    def check_valuation(self, value_of, eps):
        """Verify every stored row against float variable values; returns the
        worst mod-1 deviation (testing/debug aid)."""
        worst = 0.0
        for row, const in self.rows():
            acc = math.fsum(float(q) * value_of(v) for v, q in row.items())
            dev = (acc - float(const)) % 1.0
            worst = max(worst, min(dev, 1.0 - dev))
        if worst > eps:
            raise InconsistencyDetected(
                f"angle row deviates from numerics by {worst}")
        return worst


class Factored:
    """Positive rational in factored form: {prime: integer exponent}.

    Elimination raises constants to integer powers that compound far past
    what explicit numerators can hold; here a power is just a scalar
    multiply of the exponents."""

    __slots__ = ("exps",)

    def __init__(self, exps=None):
        self.exps = dict(exps) if exps else {}

    @classmethod
    def from_fraction(cls, frac: Fraction) -> "Factored":
        if frac <= 0:
            raise ValueError("only positive rationals factor")
        exps = {}
        for n, sign in ((frac.numerator, 1), (frac.denominator, -1)):
            d = 2
            while d * d <= n:
                while n % d == 0:
                    exps[d] = exps.get(d, 0) + sign
                    n //= d
                d += 1
            if n > 1:
                exps[n] = exps.get(n, 0) + sign
        return cls({p: e for p, e in exps.items() if e})

    def mul_pow(self, other: "Factored", k: int) -> "Factored":
        """self * other**k"""
        exps = dict(self.exps)
        for p, e in other.exps.items():
            ne = exps.get(p, 0) + e * k
            if ne:
                exps[p] = ne
            else:
                exps.pop(p, None)
        return Factored(exps)

    def pow(self, k: int) -> "Factored":
        if k == 1:
            return self
        return Factored({p: e * k for p, e in self.exps.items()} if k else {})

    def is_one(self) -> bool:
        return not self.exps

    def log(self) -> float:
        return math.fsum(e * math.log(p) for p, e in self.exps.items())

    def to_fraction(self) -> Fraction:
        out = Fraction(1)
        for p, e in self.exps.items():
            out *= Fraction(p) ** e
        return out

    def __eq__(self, other):
        return isinstance(other, Factored) and self.exps == other.exps

    def __repr__(self):
        if not self.exps:
            return "1"
        return "*".join(f"{p}^{e}" for p, e in sorted(self.exps.items()))


class RatioEqSystem:
    """Echelon system of multiplicative relations; integral exponent
    vectors, constants in factored form."""

    def __init__(self):
        self._rows = {}  # pivot var -> (SparseRow with integer entries, Factored)

    # -- internals ---------------------------------------------------------

    @staticmethod
    def _integerize(row, const):
        lcm = 1
        for v in row.values():
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        if lcm != 1:
            row = row.scaled(lcm)
            const = const.pow(lcm)
        return row, const

    def _reduce(self, row, const):
        row, const = self._integerize(row, const)
        while True:
            pivots = [v for v in row if v in self._rows]
            if not pivots:
                return row, const
            for v in pivots:
                a = int(row[v])
                if a == 0:
                    continue
                prow, pconst = self._rows[v]
                p = int(prow[v])
                g = math.gcd(p, abs(a))
                lam, mu = p // g, a // g
                if lam != 1:
                    row = row.scaled(lam)
                    const = const.pow(lam)
                row.iadd_scaled(-mu, prow)
                const = const.mul_pow(pconst, -mu)

    def _insert_exact(self, row, const):
        row, const = self._reduce(row, const)
        if not row:
            if const.is_one():
                return False
            raise InconsistencyDetected(
                f"ratio system would derive 1 = {const}")
        pivot = min(row)
        if row[pivot] < 0:
            row = row.scaled(-1)
            const = const.pow(-1)
        for p, (r, c) in list(self._rows.items()):
            a = int(r.get(pivot, 0))
            if a:
                pp = int(row[pivot])
                g = math.gcd(pp, abs(a))
                lam, mu = pp // g, a // g
                if lam != 1:
                    r = r.scaled(lam)
                    c = c.pow(lam)
                r.iadd_scaled(-mu, row)
                self._rows[p] = (r, c.mul_pow(const, -mu))
        self._rows[pivot] = (row, const)
        return True

    # -- public API --------------------------------------------------------

    def insert(self, exponents, const):
        """Add ``prod var**coef = const`` with positive rational const."""
        const = Fraction(const)
        if const <= 0:
            raise ValueError("ratio constants must be positive")
        return self._insert_exact(_combo_row(exponents),
                                  Factored.from_fraction(const))

    def query(self, exponents, const) -> bool:
        const = Fraction(const)
        if const <= 0:
            return False
        row, c = self._reduce(_combo_row(exponents),
                              Factored.from_fraction(const))
        return not row and c.is_one()

    def proves_equal(self, a, b) -> bool:
        if a == b:
            return True
        return self.query([(1, a), (-1, b)], 1)

    def substitute(self, old, new):
        if old == new or old not in self.variables():
            return
        rows = [(r.copy(), c) for r, c in self._rows.values()]
        rebuilt = RatioEqSystem()
        for r, c in rows:
            coef = r.pop(old, 0)
            if coef:
                r.iadd_scaled(1, [(new, coef)])
            rebuilt._insert_exact(r, c)
        self._rows = rebuilt._rows

    def variables(self):
        seen = set()
        for pivot, (row, _) in self._rows.items():
            seen.update(row)
        return seen

    def rows(self):
        """Pivot-sorted copies; constants as Factored values."""
        return [(dict(r), c) for _, (r, c) in sorted(self._rows.items())]

    def copy(self):
        dup = RatioEqSystem()
        dup._rows = {p: (r.copy(), c) for p, (r, c) in self._rows.items()}
        return dup

    def check_valuation(self, value_of, eps):
        worst = 0.0
        for row, const in self.rows():
            acc = math.fsum(float(q) * math.log(value_of(v))
                            for v, q in row.items())
            worst = max(worst, abs(acc - const.log()))
        if worst > eps:
            raise InconsistencyDetected(
                f"ratio row deviates from numerics by {worst}")
        return worst
