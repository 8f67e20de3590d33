import numpy as np
import pytest

from geoprove.core import CoreState
from geoprove.dsl import parse_toolfile
from geoprove.errors import (LemmaProofFailed, ToolFailure, UNKNOWN_FACT,
                             NUMERIC_MISFIT, DEGENERATE)
from geoprove.numeric import PointVal, Tolerances
from geoprove.primitives import primitives_registry, base_toolfile_text
from geoprove.toolset import (Mode, proof_check, register_tool, resolve_ast,
                              resolve_def, run_tool)

CHECK, POST = Mode.CHECK, Mode.POSTULATE


def run(core, reg, name, refs, hypers=(), mode=CHECK):
    tool = reg.lookup(name, tuple(core.find(r).kind for r in refs))
    return run_tool(core, tool, refs, hypers, mode)


@pytest.fixture()
def core():
    return CoreState(Tolerances())


@pytest.fixture()
def triangle(core, base_registry):
    reg = base_registry
    A, = run(core, reg, "free_point", (), (0.0, 0.0))
    B, = run(core, reg, "free_point", (), (4.0, 0.0))
    C, = run(core, reg, "free_point", (), (1.0, 3.0))
    return A, B, C


class TestMemoization:
    def test_line_twice_returns_identical_ref(self, core, base_registry,
                                              triangle):
        A, B, C = triangle
        l1, = run(core, base_registry, "line", (A, B))
        l2, = run(core, base_registry, "line", (A, B))
        assert l1 == l2

    def test_symmetric_key_orders_agree(self, core, base_registry, triangle):
        A, B, C = triangle
        l1, = run(core, base_registry, "line", (A, B))
        l2, = run(core, base_registry, "line", (B, A))
        assert l1 == l2

    def test_lookup_survives_merge(self, core, base_registry, triangle):
        A, B, C = triangle
        l, = run(core, base_registry, "line", (A, B))
        B2, = run(core, base_registry, "free_point", (), (4.0, 0.0))
        core.merge(B, B2)
        l2, = run(core, base_registry, "line", (A, B2))
        assert core.find(l2) == core.find(l)

    def test_free_point_same_coords_same_ref(self, core, base_registry):
        p1, = run(core, base_registry, "free_point", (), (1.0, 2.0))
        p2, = run(core, base_registry, "free_point", (), (1.0, 2.0))
        assert p1 == p2


class TestModes:
    def test_lies_on_check_fails_until_postulated(self, core, base_registry,
                                                  triangle):
        A, B, C = triangle
        l, = run(core, base_registry, "line", (A, B))
        M, = run(core, base_registry, "free_point", (), (2.0, 0.0))
        with pytest.raises(ToolFailure) as exc:
            run(core, base_registry, "lies_on", (M, l), mode=CHECK)
        assert exc.value.reason == UNKNOWN_FACT
        run(core, base_registry, "lies_on", (M, l), mode=POST)
        run(core, base_registry, "lies_on", (M, l), mode=CHECK)

    def test_lies_on_postulate_needs_fitting_numerics(self, core,
                                                      base_registry, triangle):
        A, B, C = triangle
        l, = run(core, base_registry, "line", (A, B))
        with pytest.raises(ToolFailure) as exc:
            run(core, base_registry, "lies_on", (C, l), mode=POST)
        assert exc.value.reason == NUMERIC_MISFIT

    def test_coexact_same_in_both_modes(self, core, base_registry, triangle):
        A, B, C = triangle
        run(core, base_registry, "not_eq", (A, B), mode=CHECK)
        run(core, base_registry, "not_eq", (A, B), mode=POST)
        close, = run(core, base_registry, "free_point", (), (1e-6, 0.0))
        for mode in (CHECK, POST):
            with pytest.raises(ToolFailure):
                run(core, base_registry, "not_eq", (A, close), mode=mode)

    def test_axiom_postulates_even_under_check(self, core, base_registry,
                                               triangle):
        A, B, C = triangle
        l, = run(core, base_registry, "line", (A, B), mode=CHECK)
        # the implications ran in postulate mode: incidences are now known
        run(core, base_registry, "lies_on", (A, l), mode=CHECK)
        run(core, base_registry, "lies_on", (B, l), mode=CHECK)

    def test_degenerate_line(self, core, base_registry):
        p, = run(core, base_registry, "free_point", (), (0.0, 0.0))
        q, = run(core, base_registry, "free_point", (), (0.0, 0.0))
        with pytest.raises(ToolFailure) as exc:
            run(core, base_registry, "line", (p, q))
        assert exc.value.reason == NUMERIC_MISFIT  # not_eq guard fires first
        with pytest.raises(ToolFailure) as exc:
            run(core, base_registry, "prim__line", (p, q))
        assert exc.value.reason == DEGENERATE


class TestMacros:
    def test_angle_macro_builds_known_difference(self, core, base_registry,
                                                 triangle):
        A, B, C = triangle
        l0, = run(core, base_registry, "line", (A, B))
        l1, = run(core, base_registry, "line", (A, C))
        alpha, = run(core, base_registry, "angle", (l0, l1), mode=CHECK)
        d0, = run(core, base_registry, "direction_of", (l0,))
        d1, = run(core, base_registry, "direction_of", (l1,))
        assert core.angle_query([(1, alpha), (1, d0), (-1, d1)], 0)

    def test_failure_carries_step_index(self, core, base_registry, triangle):
        A, B, C = triangle
        with pytest.raises(ToolFailure) as exc:
            run(core, base_registry, "eq_dist", (A, B, A, C), mode=CHECK)
        # eq_dist fails at its eq_ratio step (index 2)
        assert exc.value.steps[0] == ("eq_dist", 2)
        assert exc.value.reason == UNKNOWN_FACT

    def test_isosceles_ss(self, core, base_registry):
        reg = base_registry
        A, = run(core, reg, "free_point", (), (0.0, 3.0))
        B, = run(core, reg, "free_point", (), (-2.0, 0.0))
        C, = run(core, reg, "free_point", (), (2.0, 0.0))
        # |AB| = |AC|: the equality is coexact-free but unknown in check mode
        with pytest.raises(ToolFailure) as exc:
            run(core, reg, "isosceles_ss", (A, B, C), mode=CHECK)
        assert exc.value.reason == UNKNOWN_FACT
        run(core, reg, "isosceles_ss", (A, B, C), mode=POST)
        # now the implication angle equality is known
        run(core, reg, "eq_angle", (A, B, C, B, C, A), mode=CHECK)

    def test_isosceles_ss_rejects_scalene(self, core, base_registry,
                                          triangle):
        A, B, C = triangle
        with pytest.raises(ToolFailure) as exc:
            run(core, base_registry, "isosceles_ss", (A, B, C), mode=POST)
        assert exc.value.reason == NUMERIC_MISFIT


class TestInconsistencyGuard:
    def test_sub_tolerance_conflict_detected_and_rolled_back(self, core,
                                                             base_registry):
        # two constant angles closer than eps_exact but with different
        # exact values: the numeric gate passes, the exact system refuses
        from fractions import Fraction
        from geoprove.errors import InconsistencyDetected
        x, = run(core, base_registry, "angle_compute", (), (Fraction(0),))
        y, = run(core, base_registry, "angle_compute", (),
                 (Fraction(1, 10 ** 8),))
        rows_before = core.angles.rows()
        table_before = dict(core.table)
        with pytest.raises(InconsistencyDetected):
            run(core, base_registry, "eq_angle", (x, y), mode=POST)
        assert core.angles.rows() == rows_before
        assert core.table == table_before
        core.validate()


class TestModeSoundness:
    @pytest.mark.parametrize("seed", range(10))
    def test_check_success_implies_postulate_success(self, base_registry,
                                                     seed):
        rng = np.random.default_rng(400 + seed)
        core = CoreState(Tolerances())
        reg = base_registry
        pts = []
        for _ in range(4):
            x, y = rng.uniform(-10, 10, 2)
            p, = run(core, reg, "free_point", (), (float(x), float(y)))
            pts.append(p)
        lines = [run(core, reg, "line", (pts[0], pts[1]))[0],
                 run(core, reg, "line", (pts[2], pts[3]))[0]]
        pool = [("line", (pts[0], pts[2]), ()),
                ("circumcircle", (pts[0], pts[1], pts[2]), ()),
                ("midpoint", (pts[1], pts[2]), ()),
                ("angle", (lines[0], lines[1]), ()),
                ("eq_dist", (pts[0], pts[1], pts[0], pts[1]), ()),
                ("not_collinear", (pts[0], pts[1], pts[2]), ()),
                ("dist", (pts[0], pts[3]), ()),
                ("foot", (pts[3], lines[0]), ()),
                ("intersect", (lines[0], lines[1]), ()),
                ("eq_angle", (pts[0], pts[1], pts[2], pts[0], pts[1], pts[2]),
                 ()),
        ]
        for _ in range(5):
            name, refs, hypers = pool[int(rng.integers(0, len(pool)))]
            checked = core.clone()
            try:
                out_check = run(checked, reg, name, refs, hypers, CHECK)
            except ToolFailure:
                continue
            out_post = run(core, reg, name, refs, hypers, POST)
            assert out_check == out_post


class TestProofCheck:
    def _lemma(self, reg, text):
        ast = parse_toolfile(text)
        return resolve_def(ast.definitions[0], reg)

    def test_isosceles_aa_registers(self):
        reg = primitives_registry()
        resolve_ast(parse_toolfile(base_toolfile_text()), reg)
        lemma = reg.lookup("isosceles_aa", ("P", "P", "P"))
        assert lemma.flavour == "lemma"
        assert lemma.proof_ok

    def test_isosceles_aa_proof_on_explicit_witness(self, base_registry):
        lemma = base_registry.lookup("isosceles_aa", ("P", "P", "P"))
        witness = [PointVal(0.0, 3.0), PointVal(-2.0, 0.0), PointVal(2.0, 0.0)]
        report = proof_check(lemma, witness)
        assert report.ok, str(report)

    def test_witness_violating_assumptions_fails_stage_three(self,
                                                             base_registry):
        lemma = base_registry.lookup("isosceles_aa", ("P", "P", "P"))
        witness = [PointVal(0.0, 3.0), PointVal(-2.0, 0.0), PointVal(5.0, 0.0)]
        report = proof_check(lemma, witness)
        assert not report.ok
        assert report.stage == "assumptions"

    def test_emptied_proof_fails_at_implications(self, base_registry):
        text = ("isosceles_aa A:P B:P C:P -> \n"
                "  <- not_collinear A B C\n"
                "  <- eq_angle A B C B C A\n"
                "  THEN\n"
                "  <- eq_dist A B A C\n"
                "  PROOF\n")
        lemma = self._lemma(base_registry.copy(), text)
        witness = [PointVal(0.0, 3.0), PointVal(-2.0, 0.0), PointVal(2.0, 0.0)]
        report = proof_check(lemma, witness)
        assert not report.ok
        assert report.stage == "implications"
        assert report.reason == UNKNOWN_FACT

    def test_unsatisfiable_assumptions_reject_registration(self,
                                                           base_registry):
        text = ("impossible A:P -> \n"
                "  <- not_eq A A\n"
                "  THEN\n"
                "  PROOF\n")
        reg = base_registry.copy()
        lemma = self._lemma(reg, text)
        with pytest.raises(LemmaProofFailed) as exc:
            register_tool(reg, lemma)
        assert "witness" in str(exc.value)

    def test_registration_rejects_broken_lemma(self, base_registry):
        text = ("isosceles_aa_broken A:P B:P C:P -> \n"
                "  <- not_collinear A B C\n"
                "  <- eq_angle A B C B C A\n"
                "  THEN\n"
                "  <- eq_dist A B A C\n"
                "  PROOF\n")
        reg = base_registry.copy()
        lemma = self._lemma(reg, text)
        with pytest.raises(LemmaProofFailed) as exc:
            register_tool(reg, lemma)
        assert exc.value.report.stage == "implications"

    def test_lemma_over_line_inputs_registers(self, base_registry):
        # witness synthesis must project line parameters too; the empty
        # proof suffices because the implication is linearly implied
        text = ("dir_sym l0:L l1:L -> \n"
                "  a0 <- direction_of l0\n"
                "  a1 <- direction_of l1\n"
                "  <- eq_angle a0 a1\n"
                "  THEN\n"
                "  <- eq_angle a1 a0\n"
                "  PROOF\n")
        reg = base_registry.copy()
        resolve_ast(parse_toolfile(text), reg)
        assert reg.lookup("dir_sym", ("L", "L")).proof_ok

    def test_lemma_executes_like_axiom_after_registration(self,
                                                          base_registry):
        core = CoreState(Tolerances())
        reg = base_registry
        A, = run(core, reg, "free_point", (), (0.0, 3.0))
        B, = run(core, reg, "free_point", (), (-2.0, 0.0))
        C, = run(core, reg, "free_point", (), (2.0, 0.0))
        run(core, reg, "isosceles_ss", (A, B, C), mode=POST)
        run(core, reg, "isosceles_aa", (A, B, C), mode=CHECK)
        run(core, reg, "eq_dist", (A, B, A, C), mode=CHECK)


class TestAxiomSplit:
    def test_assumptions_unaffected_by_implications(self, base_registry):
        # for every shipped axiom, deleting the implications never changes
        # whether the assumptions succeed
        from geoprove.toolset import CompositeTool
        core0 = CoreState(Tolerances())
        reg = base_registry
        A, = run(core0, reg, "free_point", (), (0.0, 3.0))
        B, = run(core0, reg, "free_point", (), (-2.0, 0.0))
        C, = run(core0, reg, "free_point", (), (2.0, 0.0))
        cases = {
            "line": (A, B), "circumcircle": (A, B, C),
            "isosceles_ss": (A, B, C),
        }
        for name, refs in cases.items():
            tool = reg.lookup(name, tuple(r.kind for r in refs))
            truncated = CompositeTool(
                name=tool.name, input_slots=tool.input_slots,
                out_kinds=(), out_slots=(),
                steps=tool.steps[:tool.then_index],
                then_index=None, proof_index=None,
                n_slots=tool.n_slots, raw=tool.raw)
            full_ok = trunc_ok = True
            try:
                run_tool(core0.clone(), tool, refs, (), CHECK)
            except ToolFailure:
                full_ok = False
            try:
                run_tool(core0.clone(), truncated, refs, (), CHECK)
            except ToolFailure:
                trunc_ok = False
            assert full_ok == trunc_ok
