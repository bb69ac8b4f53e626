from fractions import Fraction

import pytest

from app.core.exceptions import ConfigInvalid, DimensionTooLow
from app.services.energy.schedule import check_exponent_identities, error_rate_exponent, exponent_schedule


def test_schedule_n7():
    schedule = exponent_schedule(7, 3)

    assert schedule.gammas == [Fraction(1, 2), Fraction(9, 2), Fraction(49, 2)]
    assert schedule.thetas == [2, 10, 50]


def test_schedule_n10():
    schedule = exponent_schedule(10, 3)

    assert schedule.gammas == [Fraction(1, 2), Fraction(3, 2), Fraction(7, 2)]
    assert schedule.thetas == [2, 4, 8]


def test_schedule_serializes_exact_strings():
    dumped = exponent_schedule(9, 2).model_dump()

    assert dumped["gammas"] == ["1/2", "11/6"]
    assert dumped["thetas"] == ["2", "14/3"]


def test_table_rows():
    rows = exponent_schedule(7, 2).table()

    assert rows[1]["level"] == 2
    assert rows[1]["theta"] == "10"
    assert rows[1]["gamma_float"] == 4.5


@pytest.mark.parametrize("dim", range(7, 21))
def test_exponent_identities_hold(dim):
    assert check_exponent_identities(dim, 10)


def test_error_rates():
    assert error_rate_exponent(7, 1) == Fraction(5, 4)
    assert error_rate_exponent(8, 1) == Fraction(3, 2)
    assert error_rate_exponent(7, 2) == 9
    assert error_rate_exponent(10, 3) == Fraction(3, 2) * 8 / 2


def test_invalid_schedule_inputs():
    with pytest.raises(DimensionTooLow):
        exponent_schedule(6, 2)
    with pytest.raises(ConfigInvalid):
        exponent_schedule(7, 0)
