import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from musclnu.analysis import (
    AnalysisError, convergence_rate, interpolate_periodic, l1_error, rate_study, rates_markdown,
    total_variation, tv_series, weighted_l1, write_errors_csv, write_rates_csv,
)
from musclnu.euler import prim_to_cons
from musclnu.mesh import Grid1D
from musclnu.problems import get_problem, smooth_euler_1d
from musclnu.solver import Field

pos = st.floats(1e-8, 1e3)


def test_l1_examples():
    assert weighted_l1([1, 2, 3], [1, 2, 3], [1, 1, 1]) == 0.0
    assert weighted_l1([1.5], [1.0], [2.0]) == 1.0
    assert weighted_l1([0.1, 0.2, 0.3], [0, 0, 0], [1, 2, 1]) == pytest.approx(0.8, rel=1e-15)
    with pytest.raises(AnalysisError):
        weighted_l1([1, 2], [1, 2, 3], [1, 1, 1])


def test_l1_error_on_field():
    g = Grid1D(np.array([0.0, 1.0, 3.0, 4.0]))
    q = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [1.1, 1.2, 1.3]])
    fld = Field(g, prim_to_cons(q))
    ref = q.copy()
    ref[2] = 1.0
    assert l1_error(fld, ref, "p") == pytest.approx(0.8, rel=1e-13)
    assert l1_error(fld, ref, "rho") == 0.0
    with pytest.raises(AnalysisError):
        l1_error(fld, ref, "v")


def test_rate_examples():
    assert convergence_rate(1e-2, 0.02, 2.5e-3, 0.01) == pytest.approx(2.0, rel=1e-14)
    assert convergence_rate(1e-2, 0.02, 5e-3, 0.01) == pytest.approx(1.0, rel=1e-14)
    # conventional limiter on perturbed meshes: error ratio 2^1.0993 per halving
    assert convergence_rate(1e-2, 0.02, 1e-2 / 2**1.0993, 0.01) == pytest.approx(1.0993, rel=1e-12)


@pytest.mark.parametrize("args", [(0, 1, 1, 2), (1, 1, -1, 2), (1, 1, 1, 1), (1, 0, 1, 2)])
def test_rate_rejects(args):
    with pytest.raises(AnalysisError):
        convergence_rate(*args)


@given(e1=pos, h1=pos, e2=pos, h2=pos)
def test_rate_symmetric_under_swap(e1, h1, e2, h2):
    if h1 == h2:
        return
    assert convergence_rate(e1, h1, e2, h2) == pytest.approx(convergence_rate(e2, h2, e1, h1), rel=1e-12)


@given(s=st.floats(1e-6, 1e6), seed=st.integers(0, 1000))
def test_l1_homogeneous(s, seed):
    rng = np.random.default_rng(seed)
    d, w = rng.normal(size=20), rng.random(20)
    assert weighted_l1(s * d, np.zeros(20), w) == pytest.approx(s * weighted_l1(d, np.zeros(20), w), rel=1e-12)


def test_tv_examples():
    assert total_variation([2.0, 2.0, 2.0]) == 0.0
    assert total_variation([1.0, 1.0, 0.0, 0.0]) == 1.0
    assert total_variation([0.0, 1.0, 0.0]) == 2.0
    np.testing.assert_array_equal(tv_series([[0, 1, 0], [1, 1, 1]]), [2.0, 0.0])


def test_periodic_interpolation_wraps():
    x = np.array([-0.75, -0.25, 0.25, 0.75])
    v = np.array([0.0, 1.0, 2.0, 3.0])
    # halfway between the last centre and the first one across x = 1 ~ -1
    assert interpolate_periodic(x, v, [1.0], 2.0)[0] == pytest.approx(1.5)
    assert interpolate_periodic(x, v, [0.0], 2.0)[0] == pytest.approx(1.5)


def test_small_rate_study(tmp_path):
    p = smooth_euler_1d(0.1)
    fine_n = 1600
    study = rate_study(p, ["mc:enhanced", None], [50, 100, 200], r=0.2, seed=7,
                       fine_n=fine_n, cache_dir=tmp_path)
    assert list(study.errors) == ["mc:enhanced", "first-order"]
    assert study.finest_rate("mc:enhanced", "p") > 1.6
    assert study.finest_rate("first-order", "p") < 1.2
    assert any(f.suffix == ".npz" for f in tmp_path.iterdir())
    write_rates_csv(study, tmp_path / "rates.csv")
    write_errors_csv(study, tmp_path / "errors.csv")
    assert (tmp_path / "rates.csv").read_text().splitlines()[0] == "variable,mc:enhanced,first-order"
    md = rates_markdown(study).splitlines()
    assert md[0] == "| | mc:enhanced | first-order |"
    assert [line.split("|")[1].strip() for line in md[2:]] == ["rho", "u", "p"]


def test_vortex_reference_is_analytic():
    p = get_problem("vortex2d").with_t_end(0.5)
    study = rate_study(p, ["van_albada"], [10, 20], r=0.2, seed=1)
    assert set(study.variables) == {"rho", "u", "v", "p"}
    assert all(e > 0 for e in study.errors["van_albada:enhanced"]["p"])
