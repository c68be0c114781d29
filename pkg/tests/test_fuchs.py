import math

import mpmath
import pytest

from muntz.errors import DomainError, GridViolation, TailBoundFail
from muntz.exponents import Arithmetic, Explicit, Geometric, Power, m_of_r
from muntz.fuchs import (
    FuchsProduct,
    check_lower_bound,
    check_upper_bound,
    eval_H,
    lower_bound_grid,
    quarter_disc_grid,
    write_fuchs_csv,
)

FP = FuchsProduct(Arithmetic(1, 1))


def log_abs_H_arithmetic(z, c=1.0):
    # Π_{k>=0} (c+k-z)/(c+k+z) e^{2z/(c+k)} = Γ(c+z)/Γ(c-z) e^{-2zψ(c)}
    with mpmath.workdps(30):
        z = mpmath.mpc(z)
        v = mpmath.loggamma(c + z) - mpmath.loggamma(c - z) - 2 * z * mpmath.digamma(c)
        return float(mpmath.re(v))


@pytest.mark.parametrize("y", [0.1, 1.0, 10.0, 100.0])
def test_unimodular_on_imaginary_axis(y):
    assert abs(eval_H(FP, 1j * y).log_abs) <= 1e-8


def test_trivial_points():
    h = eval_H(FP, 0)
    assert h.log_abs == 0.0 and complex(h) == 1
    z = eval_H(FP, 3.0)
    assert z.is_zero and complex(z) == 0
    with pytest.raises(DomainError):
        eval_H(FP, -1 + 1j)


def test_zero_set_on_real_axis():
    pts = [0.25 * k for k in range(1, 81)]
    zeros = [x for x in pts if eval_H(FP, x).is_zero]
    assert zeros == [float(k) for k in range(1, 21)]


@pytest.mark.parametrize("z", [0.5, 2.5 + 1j, 7.3 + 20j, 30.0 + 0.1j, 0.01 + 49j])
def test_matches_gamma_ratio(z):
    assert eval_H(FP, z).log_abs == pytest.approx(log_abs_H_arithmetic(z), abs=1e-9, rel=1e-11)


def test_shifted_arithmetic_oracle():
    fp = FuchsProduct(Arithmetic(0.5, 1))
    for z in (1.0, 4 + 4j, 25j + 3):
        assert eval_H(fp, z).log_abs == pytest.approx(log_abs_H_arithmetic(z, 0.5), abs=1e-9)


def test_truncation_convergence():
    for z in quarter_disc_grid(50, 8, 5):
        h = eval_H(FP, z)
        doubled = eval_H(FP, z, cutoff=2 * h.cutoff + 2)
        if h.is_zero:
            continue
        assert abs(doubled.log_abs - h.log_abs) < FP.tail_tol


def test_explicit_and_other_sequences():
    fin = FuchsProduct(Explicit((1.0, 2.5)))
    z = 1.0 + 1j
    want = sum(math.log(abs((a - z) / (a + z))) + 2 * z.real / a for a in (1.0, 2.5))
    assert eval_H(fin, z).log_abs == pytest.approx(want, rel=1e-14)
    # geometric and square exponents: compare with a long direct product
    for seq, n in ((Geometric(1, 2), 80), (Power(1, 2), 200000)):
        fp = FuchsProduct(seq)
        s = 0.0
        for a in seq.first(n):
            s += math.log(abs((a - z) / (a + z))) + 2 * z.real / a
        assert eval_H(fp, z).log_abs == pytest.approx(s, abs=1e-9)


def test_tail_bound_failure():
    fp = FuchsProduct(Arithmetic(1, 1), max_terms=10)
    with pytest.raises(TailBoundFail) as info:
        eval_H(fp, 100j)
    assert info.value.required_cutoff > 100
    with pytest.raises(TailBoundFail):
        eval_H(FP, 40j, cutoff=5)
    with pytest.raises(ValueError):
        FuchsProduct(Power(1, 0.5))


def test_exclusion_radius():
    assert FP.exclusion_radius == pytest.approx(1 / 3)
    assert FuchsProduct(Geometric(1, 2)).exclusion_radius == pytest.approx(1 / 3)


# --- bounds ---------------------------------------------------------------------

def test_upper_bound_on_imaginary_axis_is_trivial():
    fit = check_upper_bound(FP, [1j * y for y in (0.1, 1, 10, 100)])
    assert fit.constant == 1.0


def test_upper_bound_quarter_disc():
    fit = check_upper_bound(FP, quarter_disc_grid(50))
    assert 1.0 <= fit.constant < 10.0
    assert fit.extreme <= 1e-12


def test_real_axis_slack_between_exponents():
    fit = check_upper_bound(FP, quarter_disc_grid(50))
    log_C = math.log(fit.constant)
    for k in range(1, 40):
        r = k + 0.5
        assert eval_H(FP, r).log_abs < r * (log_C + 2 * m_of_r(FP.seq, r))


def test_lower_bound_midpoints():
    c2 = [check_lower_bound(FP, [k + 0.5 for k in range(1, n)]).constant for n in (25, 50, 100)]
    assert all(c > 0 for c in c2)
    assert c2[2] == pytest.approx(c2[1], rel=0.02)


def test_imaginary_axis_lower_bound_has_equality():
    fit = check_lower_bound(FP, [1j * y for y in (0.1, 1, 10, 100)])
    assert abs(fit.extreme) <= 1e-8


@pytest.mark.parametrize("seq", [Arithmetic(1, 1), Power(1, 2), Geometric(1, 2)], ids=str)
def test_lower_constant_below_upper_on_shared_grid(seq):
    fp = FuchsProduct(seq)
    grid = lower_bound_grid(fp, 50)
    up, lo = check_upper_bound(fp, grid), check_lower_bound(fp, grid)
    assert lo.constant <= up.constant
    assert lo.extreme >= -1e-12


def test_constants_stable_under_refinement():
    levels = [(24, 9), (47, 17), (93, 33)]
    up = [check_upper_bound(FP, quarter_disc_grid(50, nr, na)).constant for nr, na in levels]
    lo = [check_lower_bound(FP, lower_bound_grid(FP, 50, nr, na)).constant for nr, na in levels]
    assert abs(up[2] - up[1]) < abs(up[1] - up[0])
    assert up[2] == pytest.approx(up[1], rel=0.01)
    assert lo[2] == pytest.approx(lo[1], rel=0.01)


def test_grid_violation():
    with pytest.raises(GridViolation):
        check_lower_bound(FP, [2.2 + 0.1j])
    check_lower_bound(FP, [2.4 + 0.0j])


def test_csv_export(tmp_path):
    fit = check_upper_bound(FP, quarter_disc_grid(10, 3, 3))
    write_fuchs_csv(fit, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "re_z,im_z,log_abs_H,bound_rhs" and len(lines) == 10
