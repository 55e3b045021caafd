import pytest

from tprslab.errors import UnsupportedGrowthClass
from tprslab.growth import (
    Add,
    Const,
    Growth,
    GrowthClass,
    Log2,
    Mul,
    Pow2,
    Neg,
    check_closure,
    check_repetition_consistency,
    is_negligible,
    parse_bound_expr,
    recip,
    table_lower_bound,
)

LINEAR = GrowthClass.parse("linear")
LOG = GrowthClass.parse("log")
NLOGN = GrowthClass.parse("nlogn")
POLY = GrowthClass.parse("poly")
POLYLOG = GrowthClass.parse("polylog")


class TestGrowthClass:
    def test_parse_and_eval(self):
        assert LINEAR.eval(8) == 8
        assert LOG.eval(16) == 4
        assert NLOGN.eval(8) == 24
        assert GrowthClass.parse("loglog").eval(16) == 2
        assert POLYLOG.eval(16) == 16  # representative (log n)^2
        assert GrowthClass.parse("polyf:log").base_class() == LOG

    def test_parse_unknown(self):
        with pytest.raises(UnsupportedGrowthClass):
            GrowthClass.parse("quasipoly")

    def test_family_flags(self):
        assert POLY.is_family and POLYLOG.is_family
        assert not LINEAR.is_family and not NLOGN.is_family


class TestIsNegligible:
    def test_exponential_beats_polylog(self):
        assert is_negligible(Pow2(Neg(Growth(LINEAR))), POLYLOG).verdict == "yes"

    def test_one_over_n_not_linear_negligible(self):
        assert is_negligible(recip(Growth(LINEAR)), LINEAR).verdict == "no"

    def test_one_over_nlogn_is_linear_negligible(self):
        eta = recip(Mul(Growth(LINEAR), Growth(LOG)))
        assert is_negligible(eta, LINEAR).verdict == "yes"

    def test_fixed_power_not_poly_negligible(self):
        eta = recip(Mul(Growth(LINEAR), Growth(LINEAR)))
        assert is_negligible(eta, POLY).verdict == "no"

    def test_one_over_n_is_polylog_negligible(self):
        assert is_negligible(recip(Growth(LINEAR)), POLYLOG).verdict == "yes"

    def test_additivity(self):
        eta = Add(Pow2(Neg(Growth(LINEAR))), recip(Mul(Growth(LINEAR), Growth(LOG))))
        rep = is_negligible(eta, LINEAR)
        assert rep.verdict == "yes"
        assert "additivity" in rep.rule
        # numeric re-check: eta * T must vanish along the grid (a fixed
        # constant cannot be beaten at finite n, so the signature is decay)
        trajectory = [eta.eval(2**k) * LINEAR.eval(2**k) for k in range(4, 21)]
        assert all(a > b for a, b in zip(trajectory, trajectory[1:]))
        assert trajectory[-1] < 0.06

    def test_sum_with_bad_term(self):
        eta = Add(recip(Growth(LINEAR)), Pow2(Neg(Growth(LINEAR))))
        assert is_negligible(eta, LINEAR).verdict == "no"

    def test_unrecognized_returns_undecided_with_witness(self):
        eta = recip(Log2(Add(Growth(LINEAR), Const(1.0))))
        rep = is_negligible(eta, LOG)
        assert rep.verdict == "undecided"
        assert len(rep.witness) > 0

    def test_zero_function(self):
        assert is_negligible(Const(0.0), POLY).verdict == "yes"

    def test_parser_round_trip(self):
        eta = parse_bound_expr("1/(n*log2(n))")
        assert eta.eval(8) == pytest.approx(1 / 24)
        assert parse_bound_expr("2^(-n)").eval(10) == pytest.approx(2**-10)
        assert parse_bound_expr("1/n^2").eval(4) == pytest.approx(1 / 16)


class TestClosure:
    def test_plain_with_constants_holds(self):
        rep = check_closure(LINEAR, GrowthClass.parse("const"))
        assert rep.holds
        assert "constant repeats" in rep.rule

    def test_poly_f_with_poly_f_holds(self):
        rep = check_closure(GrowthClass.parse("polyf:log"), GrowthClass.parse("polyf:log"))
        assert rep.holds

    def test_poly_with_constants_holds(self):
        assert check_closure(POLY, GrowthClass.parse("const")).holds

    def test_poly_with_log_repeats_holds(self):
        assert check_closure(POLY, LOG).holds

    def test_plain_with_own_class_fails(self):
        rep = check_closure(LINEAR, LINEAR)
        assert not rep.holds
        assert rep.counterexample is not None
        assert len(rep.witness) > 0

    def test_counterexample_is_genuinely_negligible(self):
        # the sketched eta = 1/(r * T) must itself be negligible for T,
        # while r * eta = 1/T is not (plain case: T = R = linear)
        eta = recip(Mul(Growth(LINEAR), Growth(LINEAR)))
        assert is_negligible(eta, LINEAR).verdict == "yes"
        assert is_negligible(Mul(Growth(LINEAR), eta), LINEAR).verdict == "no"
        # family case: T = polylog, R = linear; eta = 1/(n * log^2 n)
        eta_f = recip(Mul(Growth(LINEAR), Growth(POLYLOG)))
        assert is_negligible(eta_f, POLYLOG).verdict == "yes"
        assert is_negligible(Mul(Growth(LINEAR), eta_f), POLYLOG).verdict == "no"
        rep = check_closure(POLYLOG, LINEAR)
        assert not rep.holds
        assert all(abs(v - 1.0) < 1e-9 for _, v in rep.witness)


class TestRepetitionConsistency:
    def test_constants_always_consistent(self):
        for T in (LINEAR, LOG, NLOGN, POLY):
            assert check_repetition_consistency(T, GrowthClass.parse("const")).holds

    def test_poly_f_closed_under_product(self):
        assert check_repetition_consistency(POLY, POLY).holds
        assert check_repetition_consistency(
            GrowthClass.parse("polyf:log"), GrowthClass.parse("polyf:log")
        ).holds

    def test_linear_times_linear_fails(self):
        rep = check_repetition_consistency(LINEAR, LINEAR)
        assert not rep.holds

    def test_log_repeats_break_plain_linear(self):
        assert not check_repetition_consistency(LINEAR, LOG).holds


class TestTableLowerBound:
    def test_linear_coherence_16(self):
        assert table_lower_bound(LINEAR, "coherence", 16) == pytest.approx(5.0)

    def test_log_entanglement_16(self):
        assert table_lower_bound(LOG, "entanglement", 16) == pytest.approx(3.0)

    def test_linearithmic_magic_16(self):
        assert table_lower_bound(NLOGN, "magic", 16, alpha=3) == pytest.approx(3.5)

    def test_magic_divides_by_alpha_minus_one(self):
        for cls in (LOG, LINEAR, POLY):
            coh = table_lower_bound(cls, "coherence", 64)
            assert table_lower_bound(cls, "magic", 64, alpha=3) == pytest.approx(coh / 2)

    @pytest.mark.parametrize("n", [16, 64, 256, 1024])
    @pytest.mark.parametrize("measure", ["coherence", "entanglement", "magic"])
    def test_monotone_chain(self, n, measure):
        order = ["log", "polylog", "linear", "linearithmic", "poly"]
        vals = [table_lower_bound(GrowthClass.parse(c), measure, n, alpha=3) for c in order]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_unsupported_class(self):
        with pytest.raises(UnsupportedGrowthClass):
            table_lower_bound(GrowthClass.parse("const"), "coherence", 16)

    def test_kappa_knob(self):
        assert table_lower_bound(LINEAR, "coherence", 16, kappa=2.0) == pytest.approx(6.0)
