"""Logical core: object store, equality classes and the knowledge database.

The core owns four pieces of state: numerical values per object, a
disjoint-set structure for proven equalities, the two exact equation
systems (angles / ratios), and the memoized tool lookup table.  All
mutation funnels through a small transaction guard so a failed operation
(numeric mismatch, derived inconsistency) leaves the previous state
intact.

``propagate`` drives everything to a fixpoint after a merge or postulate:

* lookup-table keys are re-canonicalized; colliding entries merge their
  outputs pairwise (functional extensionality),
* merged angle/ratio variables are substituted through the equation
  systems,
* derived equalities are extracted: two lines whose directions are
  provably equal and which share a known common point are merged, and so
  are two ratio objects the ratio system proves equal.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from .eqsys import AngleEqSystem, RatioEqSystem
from .errors import (GeoproveError, InconsistencyDetected, KindMismatch,
                     NumericMismatch)
from .numeric import (AngleNum, CircleVal, LineVal, PointVal, RatioNum,
                      Tolerances, angle_dist_mod1, check_exact)

KINDS = "PLCAD"

# Tool uids whose memo entries the core interprets: incidence predicates
# (point, carrier) feed the uniqueness lookups and the derived-equality
# rule; the direction primitive links lines to their angle variables.
INCIDENCE_UIDS = frozenset({"lies_on:PL", "lies_on:PC"})
DIRECTION_UIDS = frozenset({"prim__direction_of:L"})

_KIND_OF_TYPE = {PointVal: "P", LineVal: "L", CircleVal: "C",
                 AngleNum: "A", RatioNum: "D"}
_EQ_FACT = {"P": "point_eq", "L": "line_eq", "C": "circle_eq",
            "A": "angle_eq", "D": "ratio_eq"}


@dataclass(frozen=True, order=True)
class Ref:
    """Opaque handle to an object in the core; resolves through union-find
    to a canonical representative of the same kind."""

    id: int
    kind: str


class CoreState:
    """Single-writer logical core; see module docstring."""

    def __init__(self, tol: Tolerances | None = None):
        self.tol = tol if tol is not None else Tolerances()
        self._parent = {}          # ref -> parent ref
        self._members = {}         # canonical ref -> set of merged refs
        self.values = {}           # canonical ref -> numerical value
        self.angles = AngleEqSystem()
        self.ratios = RatioEqSystem()
        self.table = {}            # (uid, refs, hypers) -> output refs
        self.merge_events = []     # (kept, gone) pairs, drained for tracing
        self._seed_points = []
        self._incidence_uids = set(INCIDENCE_UIDS)
        self._direction_uids = set(DIRECTION_UIDS)
        self._dirty = False
        self._next_id = 0

    # ------------------------------------------------------------------
    # bookkeeping

    def register_incidence_tool(self, uid):
        """Mark a memoized (point, carrier) predicate whose entries count as
        known incidences for derived-equality extraction."""
        self._incidence_uids.add(uid)

    def register_direction_tool(self, uid):
        """Mark the memoized line -> direction primitive."""
        self._direction_uids.add(uid)

    def clone(self) -> "CoreState":
        dup = CoreState.__new__(CoreState)
        dup.tol = Tolerances(self.tol.eps_exact, self.tol.margin_coexact,
                             self.tol.scale)
        dup._parent = dict(self._parent)
        dup._members = {k: set(v) for k, v in self._members.items()}
        dup.values = dict(self.values)
        dup.angles = self.angles.copy()
        dup.ratios = self.ratios.copy()
        dup.table = dict(self.table)
        dup.merge_events = list(self.merge_events)
        dup._seed_points = list(self._seed_points)
        dup._incidence_uids = set(self._incidence_uids)
        dup._direction_uids = set(self._direction_uids)
        dup._dirty = self._dirty
        dup._next_id = self._next_id
        return dup

    def _restore(self, saved: "CoreState"):
        self.tol = saved.tol
        self._parent = saved._parent
        self._members = saved._members
        self.values = saved.values
        self.angles = saved.angles
        self.ratios = saved.ratios
        self.table = saved.table
        self.merge_events = saved.merge_events
        self._seed_points = saved._seed_points
        self._incidence_uids = saved._incidence_uids
        self._direction_uids = saved._direction_uids
        self._dirty = saved._dirty
        self._next_id = saved._next_id

    @contextmanager
    def _transaction(self):
        saved = self.clone()
        try:
            yield
        except GeoproveError:
            self._restore(saved)
            raise

    # ------------------------------------------------------------------
    # objects and equality

    def find(self, ref: Ref) -> Ref:
        parent = self._parent
        root = ref
        while parent[root] is not root:
            root = parent[root]
        while parent[ref] is not root:
            parent[ref], ref = root, parent[ref]
        return root

    def add_object(self, value, kind=None, seed=False) -> Ref:
        """Allocate a fresh reference bound to ``value``.  Distinct calls
        always create distinct refs: equality is knowledge, not value
        identity."""
        actual = _KIND_OF_TYPE.get(type(value))
        if actual is None:
            raise KindMismatch(f"unsupported value type {type(value).__name__}")
        if kind is not None and kind != actual:
            raise KindMismatch(f"value is kind {actual}, declared {kind}")
        ref = Ref(self._next_id, actual)
        self._next_id += 1
        self._parent[ref] = ref
        self._members[ref] = {ref}
        self.values[ref] = value
        if seed and actual == "P":
            self._seed_points.append(ref)
            self._update_scale()
        return ref

    def value_of(self, ref: Ref):
        return self.values[self.find(ref)]

    def _update_scale(self):
        pts = [self.values[self.find(r)] for r in self._seed_points]
        if not pts:
            self.tol.scale = 1.0
            return
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        diam = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        self.tol.scale = max(1.0, diam)

    def _eq_fact(self, a: Ref, b: Ref):
        return (_EQ_FACT[a.kind], self.values[a], self.values[b])

    def _merge(self, a: Ref, b: Ref):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if a.kind != b.kind:
            raise KindMismatch(f"cannot merge kinds {a.kind} and {b.kind}")
        if not check_exact(self._eq_fact(a, b), self.tol):
            raise NumericMismatch(
                f"merge of numerically distinct {a.kind}-objects #{a.id}, #{b.id}")
        keep, gone = (a, b) if a.id < b.id else (b, a)
        self._parent[gone] = keep
        self._members[keep] |= self._members.pop(gone)
        del self.values[gone]
        if keep.kind == "A":
            self.angles.substitute(gone, keep)
        elif keep.kind == "D":
            self.ratios.substitute(gone, keep)
        self.merge_events.append((keep, gone))
        self._dirty = True

    def merge(self, a: Ref, b: Ref):
        """Record that two objects are equal.  Their numerical values must
        agree within tolerance; propagation runs to fixpoint."""
        with self._transaction():
            self._merge(a, b)
            self.propagate()

    # ------------------------------------------------------------------
    # propagation

    def propagate(self):
        while self._dirty:
            self._dirty = False
            self._canonicalize_table()
            self._derived_equalities()

    def _canon_key(self, key):
        uid, refs, hypers = key
        return uid, tuple(self.find(r) for r in refs), hypers

    def _canonicalize_table(self):
        new = {}
        for key, outs in self.table.items():
            ckey = self._canon_key(key)
            couts = tuple(self.find(o) for o in outs)
            prev = new.get(ckey)
            if prev is not None and prev != couts:
                if len(prev) != len(couts):
                    raise KindMismatch(
                        f"colliding entries for {ckey[0]} have different arity")
                for x, y in zip(prev, couts):
                    self._merge(x, y)
                couts = tuple(self.find(o) for o in prev)
            new[ckey] = couts
        self.table = new

    def _derived_equalities(self):
        # a) lines with provably equal directions sharing a known point
        dir_of = {}
        lines_by_point = {}
        for (uid, refs, hypers), outs in self.table.items():
            if uid in self._direction_uids:
                dir_of[self.find(refs[0])] = self.find(outs[0])
            elif uid in self._incidence_uids and refs[1].kind == "L":
                lines_by_point.setdefault(self.find(refs[0]), set()).add(
                    self.find(refs[1]))
        checked = set()
        for point in sorted(lines_by_point):
            lines = sorted(lines_by_point[point])
            for i, l1 in enumerate(lines):
                for l2 in lines[i + 1:]:
                    l1c, l2c = self.find(l1), self.find(l2)
                    if l1c == l2c or (l1c, l2c) in checked:
                        continue
                    checked.add((l1c, l2c))
                    d1, d2 = dir_of.get(l1c), dir_of.get(l2c)
                    if d1 is None or d2 is None:
                        continue
                    if d1 == d2 or self.angles.proves_equal(d1, d2):
                        if not check_exact(self._eq_fact(l1c, l2c), self.tol):
                            raise InconsistencyDetected(
                                "directions proved equal but line values differ "
                                f"(lines #{l1c.id}, #{l2c.id})")
                        self._merge(l1c, l2c)
        # b) ratio objects the ratio system proves equal
        dvars = sorted(v for v in self.ratios.variables())
        for i, x in enumerate(dvars):
            for y in dvars[i + 1:]:
                xc, yc = self.find(x), self.find(y)
                if xc == yc:
                    continue
                if self.ratios.proves_equal(xc, yc):
                    if not check_exact(self._eq_fact(xc, yc), self.tol):
                        raise InconsistencyDetected(
                            "ratio system proved equality but values differ "
                            f"(#{xc.id}, #{yc.id})")
                    self._merge(xc, yc)

    # ------------------------------------------------------------------
    # equation systems

    def _angle_pairs(self, combo):
        pairs = []
        for coef, ref in combo:
            ref = self.find(ref)
            if ref.kind != "A":
                raise KindMismatch(f"angle combination over non-angle #{ref.id}")
            pairs.append((Fraction(coef), ref))
        return pairs

    def _ratio_pairs(self, combo):
        pairs = []
        for coef, ref in combo:
            ref = self.find(ref)
            if ref.kind != "D":
                raise KindMismatch(f"ratio combination over non-ratio #{ref.id}")
            pairs.append((Fraction(coef), ref))
        return pairs

    def angle_postulate(self, combo, const):
        """Insert ``sum coef*angle = const (mod 1, half-turns)``; the row must
        hold numerically within eps_exact."""
        pairs = self._angle_pairs(combo)
        const = Fraction(const)
        acc = math.fsum(float(q) * self.values[r].value for q, r in pairs)
        if angle_dist_mod1(acc, float(const % 1)) > self.tol.eps_exact:
            raise NumericMismatch(
                f"angle relation off by {angle_dist_mod1(acc, float(const % 1))}")
        with self._transaction():
            if self.angles.insert([(q, r) for q, r in pairs], const):
                self._dirty = True
                self.propagate()

    def angle_query(self, combo, const) -> bool:
        pairs = self._angle_pairs(combo)
        return self.angles.query([(q, r) for q, r in pairs], Fraction(const))

    def ratio_postulate(self, combo, const):
        """Insert ``prod ratio**coef = const`` (positive rational const); must
        hold numerically in log space within eps_exact."""
        pairs = self._ratio_pairs(combo)
        const = Fraction(const)
        if const <= 0:
            raise NumericMismatch("ratio constants must be positive")
        acc = math.fsum(float(q) * math.log(self.values[r].value)
                        for q, r in pairs)
        if abs(acc - math.log(float(const))) > self.tol.eps_exact:
            raise NumericMismatch(
                f"ratio relation off by {abs(acc - math.log(float(const)))}")
        with self._transaction():
            if self.ratios.insert([(q, r) for q, r in pairs], const):
                self._dirty = True
                self.propagate()

    def ratio_query(self, combo, const) -> bool:
        pairs = self._ratio_pairs(combo)
        const = Fraction(const)
        if const <= 0:
            return False
        return self.ratios.query([(q, r) for q, r in pairs], const)

    # ------------------------------------------------------------------
    # memoized tool lookup table

    def lookup_get(self, uid, refs, hypers):
        return self.table.get(self._canon_key((uid, tuple(refs), tuple(hypers))))

    def lookup_store(self, uid, refs, hypers, outputs):
        key = self._canon_key((uid, tuple(refs), tuple(hypers)))
        outs = tuple(self.find(o) for o in outputs)
        with self._transaction():
            prev = self.table.get(key)
            if prev is not None and prev != outs:
                if len(prev) != len(outs):
                    raise KindMismatch(
                        f"stored outputs for {uid} have different arity")
                for x, y in zip(prev, outs):
                    self._merge(x, y)
                outs = tuple(self.find(o) for o in outs)
            self.table[key] = outs
            self.propagate()

    # ------------------------------------------------------------------
    # inspection helpers

    def objects(self):
        """Canonical (ref, value) pairs, id-ordered."""
        return sorted(self.values.items())

    def incidence_entries(self):
        """Known (point, carrier) incidences from memoized predicates."""
        for (uid, refs, _), _outs in self.table.items():
            if uid in self._incidence_uids:
                yield self.find(refs[0]), self.find(refs[1])

    def direction_entries(self):
        """Known (line, direction angle) pairs."""
        for (uid, refs, _), outs in self.table.items():
            if uid in self._direction_uids:
                yield self.find(refs[0]), self.find(outs[0])

    def carrier_through(self, kind, points):
        """Smallest-id carrier of ``kind`` known to contain all ``points``,
        or None.  ('Two points determine a line' style uniqueness lookups
        consult the knowledge database through this.)"""
        wanted = {self.find(p) for p in points}
        per_carrier = {}
        for point, carrier in self.incidence_entries():
            if carrier.kind == kind:
                per_carrier.setdefault(carrier, set()).add(point)
        hits = [c for c, pts in per_carrier.items() if wanted <= pts]
        return min(hits) if hits else None

    def equivalence_classes(self):
        """Canonical ref -> set of merged refs, for classes of size > 1."""
        return {k: set(v) for k, v in self._members.items() if len(v) > 1}

    def drain_merge_events(self):
        events, self.merge_events = self.merge_events, []
        return events

    def validate(self):
        """Assert internal invariants; used by tests."""
        for key, outs in self.table.items():
            assert key == self._canon_key(key), f"non-canonical key {key}"
            assert all(self.find(o) == o for o in outs)
        for ref in self.values:
            assert self.find(ref) == ref
        self.angles.check_valuation(
            lambda r: self.values[self.find(r)].value, self.tol.eps_exact * 4)
        self.ratios.check_valuation(
            lambda r: self.values[self.find(r)].value, self.tol.eps_exact * 4)
