from fractions import Fraction

import pytest

from zagreb_lab import (
    Caterpillar,
    ExtendedRRT,
    ParameterError,
    Port,
    UndefinedSkewnessError,
    caterpillar_cubic_closed,
    caterpillar_mean_closed,
    caterpillar_mean_offset,
    caterpillar_moment_table,
    caterpillar_variance_leading,
    closed_form_audit,
    clt_params,
    enumerate_distribution,
    ext_rrt_mean,
    ext_rrt_moment_table,
    ext_rrt_second_moment,
    ext_rrt_variance,
    gamma_half_ratio,
    harmonic_number,
    port_cubic_closed,
    port_mean_closed,
    port_moment_table,
    port_quartic_closed,
    port_skewness,
)

F = Fraction


def test_harmonic_and_gamma_ratio():
    assert harmonic_number(0) == 0
    assert harmonic_number(3) == F(11, 6)
    assert gamma_half_ratio(2) == F(3, 4)
    assert gamma_half_ratio(3) == F(15, 8)
    assert gamma_half_ratio(4) == F(105, 32)


# -- extended recursive networks ----------------------------------------------


def test_ext_rrt_mean_examples():
    assert ext_rrt_mean(1, 3, 2) == 12
    assert ext_rrt_mean(3, 1, 1) == 6
    assert ext_rrt_mean(4, 1, 1) == F(32, 3)
    assert ext_rrt_mean(2, 3, 2) == 26  # deterministic second state


def test_ext_rrt_second_moment_examples():
    assert ext_rrt_second_moment(1, 3, 2) == 144
    assert ext_rrt_second_moment(4, 1, 1) == F(344, 3)
    assert ext_rrt_second_moment(3, 3, 2) == F(5296, 3)


def test_ext_rrt_variance_examples():
    assert ext_rrt_variance(1, 5, 3) == 0
    assert ext_rrt_variance(4, 1, 1) == F(8, 9)


def test_ext_rrt_validation():
    with pytest.raises(ParameterError):
        ext_rrt_mean(0, 1, 1)
    with pytest.raises(ParameterError):
        ext_rrt_mean(5, 2, 3)


@pytest.mark.parametrize("m0,m", [(2, 1), (3, 2), (3, 3), (1, 1)])
def test_ext_rrt_engine_equals_oracle(m0, m):
    spec = ExtendedRRT(m0, m)
    table = ext_rrt_moment_table(6, m0, m, regime="exact")
    for n in range(1, 7):
        dist = enumerate_distribution(spec, n)
        row = table.row(n)
        assert row.mean_Z == dist.moment("Z", 1)
        assert row.second_Z == dist.moment("Z", 2)
        assert row.var_Z == dist.variance("Z")


def _mpf_to_fraction(x):
    sign, mantissa, exponent, _ = x._mpf_
    return (-1) ** sign * int(mantissa) * F(2) ** exponent


def test_ext_rrt_float_regime_tracks_exact():
    exact = ext_rrt_moment_table(1500, 3, 2, regime="exact", checkpoints=[1500])
    floated = ext_rrt_moment_table(1500, 3, 2, regime="float128", checkpoints=[1500])
    er, fr = exact.row(1500), floated.row(1500)
    assert er.regime == "exact" and fr.regime == "float128"
    for attr in ("mean_Z", "second_Z", "var_Z"):
        e = getattr(er, attr)
        f = _mpf_to_fraction(getattr(fr, attr))
        assert abs(f - e) <= F(1, 10**20) * e


def test_clt_params_invariant():
    p = clt_params(10_000, 2)
    assert p.centering == 22 * 10_000
    assert p.limit_variance == 48
    assert abs(p.scale**2 - p.limit_variance * p.n) < 1e-6
    with pytest.raises(ParameterError):
        clt_params(0, 1)


# -- plain-oriented recursive trees --------------------------------------------


def test_port_initial_conditions():
    row = port_moment_table(2).row(2)
    assert (row.mean_Z, row.mean_Y, row.mean_X) == (2, 2, 2)
    assert (row.second_Z, row.mixed_ZY, row.third_Z) == (4, 4, 8)


def test_port_engine_equals_oracle_through_n9():
    table = port_moment_table(9)
    for n in range(2, 10):
        dist = enumerate_distribution(Port(), n)
        row = table.row(n)
        assert row.mean_Z == dist.moment("Z", 1)
        assert row.second_Z == dist.moment("Z", 2)
        assert row.third_Z == dist.moment("Z", 3)
        assert row.mean_Y == dist.moment("Y", 1)
        assert row.mean_X == dist.moment("X", 1)
        assert row.mixed_ZY == dist.mixed_moment(1, 1)


def test_port_closed_forms_spot_values():
    assert port_mean_closed(2) == 2
    assert port_mean_closed(3) == 6
    assert port_mean_closed(4) == 11
    assert port_cubic_closed(2) == 2
    assert port_cubic_closed(3) == 10
    assert port_cubic_closed(4) == 24
    assert port_quartic_closed(2) == 2
    assert port_quartic_closed(3) == 18
    assert port_quartic_closed(4) == 59


def test_port_closed_forms_match_recurrence():
    table = port_moment_table(200)
    for n in range(2, 201):
        row = table.row(n)
        assert row.mean_Z == port_mean_closed(n)
        assert row.mean_Y == port_cubic_closed(n)
        assert row.mean_X == port_quartic_closed(n)


def test_port_variance_positive_from_n4():
    table = port_moment_table(40)
    assert table.row(2).var_Z == 0
    assert table.row(3).var_Z == 0
    for n in range(4, 41):
        assert table.row(n).var_Z > 0


def test_port_skewness_undefined_below_n4():
    with pytest.raises(UndefinedSkewnessError):
        port_skewness(3)


def test_port_skewness_matches_oracle_to_12_digits():
    engine = port_skewness(8)
    oracle = enumerate_distribution(Port(), 8).skewness()
    assert engine == pytest.approx(oracle, rel=1e-12)


# -- caterpillars ---------------------------------------------------------------


def test_caterpillar_initial_and_forced_values():
    t = caterpillar_moment_table(2, 2)
    assert t.row(0).mean_Z == 2
    assert t.row(0).second_Z == 4
    assert t.row(1).mean_Z == 6  # forced
    assert t.row(2).mean_Z == F(34, 3)
    t3 = caterpillar_moment_table(0, 3)
    assert t3.row(0).mean_Z == 6
    assert t3.row(0).mean_Y == 10
    assert t3.row(0).second_Z == 36


@pytest.mark.parametrize("m", [2, 3])
def test_caterpillar_engine_equals_oracle(m):
    table = caterpillar_moment_table(8, m)
    for n in range(0, 9):
        dist = enumerate_distribution(Caterpillar(m), n)
        row = table.row(n)
        assert row.mean_Z == dist.moment("Z", 1)
        assert row.mean_Y == dist.moment("Y", 1)
        assert row.second_Z == dist.moment("Z", 2)
        assert row.var_Z == dist.variance("Z")


@pytest.mark.parametrize("m", [2, 3, 4])
def test_caterpillar_mean_closed_form_offset_is_constant(m):
    table = caterpillar_moment_table(50, m)
    offset = caterpillar_mean_offset(m)
    assert offset == F(2 * (2 * m - 3), (2 * m - 1) * (m - 1))
    for n in range(0, 51):
        assert caterpillar_mean_closed(n, m) - table.row(n).mean_Z == offset


@pytest.mark.parametrize("m", [2, 3, 4])
def test_caterpillar_cubic_closed_form_exact(m):
    table = caterpillar_moment_table(50, m)
    for n in range(0, 51):
        assert caterpillar_cubic_closed(n, m) == table.row(n).mean_Y


def test_caterpillar_variance_leading_constant():
    assert caterpillar_variance_leading(2) == F(2, 90)


def test_caterpillar_validation():
    with pytest.raises(ParameterError):
        caterpillar_moment_table(5, 1)
    with pytest.raises(ParameterError):
        caterpillar_moment_table(-1, 2)


# -- tables and audit -----------------------------------------------------------


def test_checkpoints_and_row_lookup():
    t = ext_rrt_moment_table(100, 1, 1, checkpoints=[1, 50, 100])
    assert [r.n for r in t.rows] == [1, 50, 100]
    with pytest.raises(ParameterError):
        t.row(51)
    with pytest.raises(ParameterError):
        ext_rrt_moment_table(10, 1, 1, checkpoints=[11])


def test_variance_nonnegative_everywhere():
    for table in (
        ext_rrt_moment_table(60, 3, 2),
        port_moment_table(60),
        caterpillar_moment_table(60, 3),
    ):
        for row in table.rows:
            assert row.var_Z >= 0


def test_audit_port_exact_findings():
    report = closed_form_audit(Port(), (2, 120))
    by_name = {f.quantity: f for f in report.findings}
    assert by_name["mean_Z"].max_abs_delta == 0
    assert by_name["mean_Y"].max_abs_delta == 0
    assert by_name["mean_X"].max_abs_delta == 0
    assert report.all_stable()
    # leading-order residuals stay bounded on this range (empirically ~74/~35/~1.2)
    assert by_name["second_Z"].max_normalized_residual < 150
    assert by_name["third_Z"].max_normalized_residual < 100
    assert by_name["mixed_ZY"].max_normalized_residual < 5


def test_audit_caterpillar_findings():
    report = closed_form_audit(Caterpillar(2), (0, 80))
    by_name = {f.quantity: f for f in report.findings}
    assert by_name["mean_Z"].comparison == "constant-offset"
    assert by_name["mean_Z"].offset == F(2, 3)
    assert by_name["mean_Z"].max_abs_delta == 0
    assert by_name["mean_Y"].max_abs_delta == 0
    assert report.all_stable()


def test_audit_ext_rrt_residuals_bounded():
    report = closed_form_audit(ExtendedRRT(1, 1), (2, 2000))
    by_name = {f.quantity: f for f in report.findings}
    # |(n+m0-1) E[Z_n] - leading| / n stays modest: exact drift is harmonic
    assert by_name["mean_Z"].max_normalized_residual < 30
    assert by_name["var_Z"].max_normalized_residual < 60
