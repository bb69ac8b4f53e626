from pathlib import Path

import numpy as np
import pytest

from app.core.exceptions import ConfigInvalid, FixedPointViolation
from app.services.geometry.catalog import build_isometry, get_entry, load_catalog
from app.services.geometry.charts import sphere_graph
from app.services.geometry.symmetry import differential, product_map, reflection, shear, symmetry_check

CATALOG_PATH = Path(__file__).resolve().parents[2] / "data" / "manifolds.json"


@pytest.fixture(scope="module")
def catalog():
    return load_catalog(str(CATALOG_PATH))


def _check(catalog, name, **kwargs):
    entry = get_entry(name, catalog)
    chart = entry.chart()
    fixed = np.asarray(entry.fixed_point, dtype=float) if entry.fixed_point else chart.center
    return symmetry_check(chart, build_isometry(entry.isometry, chart, fixed), fixed, entry.points(chart), **kwargs)


def test_reflection_is_point_symmetry_of_round_sphere(catalog):
    report = _check(catalog, "round_s7")

    assert report.passed
    assert report.differential_defect <= 1e-8
    assert report.fixed_point_error == 0.0


def test_even_warping_is_symmetric(catalog):
    report = _check(catalog, "s2_warped_s3_even", weyl_points=2)

    assert report.passed
    assert report.weyl_invariance_defect <= 1e-6


def test_odd_warping_is_not_symmetric(catalog):
    report = _check(catalog, "s2_warped_s3_odd")

    assert not report.passed
    assert report.max_pullback_defect > 1e-3


def test_shear_fails_differential_check(catalog):
    report = _check(catalog, "s2_shear")

    assert not report.passed
    assert report.differential_defect == pytest.approx(0.5, rel=1e-6)


def test_product_of_reflections_on_ellipsoid(catalog):
    assert _check(catalog, "ellipsoid_4").passed
    assert _check(catalog, "s2_x_s2_x_s3").passed


def test_fixed_point_must_be_fixed():
    chart = sphere_graph(2)

    with pytest.raises(FixedPointViolation):
        symmetry_check(chart, reflection([0.1, 0.0]), np.zeros(2), [np.zeros(2)])


def test_symmetry_needs_samples():
    chart = sphere_graph(2)

    with pytest.raises(ConfigInvalid):
        symmetry_check(chart, reflection([0.0, 0.0]), np.zeros(2), [])


def test_differential_of_shear():
    h_map = shear([0.0, 0.0], 0.5)
    dh = differential(h_map, np.array([0.1, 0.2]), 1e-3)

    np.testing.assert_allclose(dh, np.array([[-1.0, -0.5], [0.0, -1.0]]), atol=1e-10)


def test_product_map_acts_blockwise():
    h_map = product_map([reflection([1.0]), reflection([0.0, 0.0])], [1, 2])

    np.testing.assert_allclose(h_map(np.array([0.5, 0.2, -0.3])), [1.5, -0.2, 0.3])
    with pytest.raises(ConfigInvalid):
        product_map([reflection([0.0])], [1, 2])
