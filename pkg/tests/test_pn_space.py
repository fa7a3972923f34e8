import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lacunary_pn.algebra import EPS0, MIN, PRODUCT, PARAMETRIC, DistributionFunction, ratio_df
from lacunary_pn.pn_space import (
    PNSpace,
    SpaceError,
    check_pn_axioms,
    nu_eval,
    open_ball_contains,
    random_samples,
    simple_space,
)

from conftest import ratio_space

coord = st.floats(min_value=-100, max_value=100, allow_nan=False)
pos = st.floats(min_value=1e-6, max_value=100)


class TestConstruction:
    def test_ratio_space_form(self, space):
        for x, t in [(1.0, 1.0), (3.0, 0.5), (-2.0, 7.0)]:
            assert nu_eval(space, x, t) == pytest.approx(t / (t + abs(x)), rel=1e-15)

    def test_zero_vector_is_step(self, space):
        assert nu_eval(space, 0.0, 1e-9) == 1
        assert nu_eval(space, 0.0, 0.0) == 0

    def test_euclidean_dim2(self):
        sp = ratio_space(2)
        assert nu_eval(sp, [3.0, 4.0], 5.0) == 0.5

    def test_rejects_eps0(self):
        with pytest.raises(SpaceError):
            simple_space(1, EPS0, PRODUCT)

    def test_rejects_positive_at_zero(self):
        bad = DistributionFunction(lambda t: np.full_like(np.asarray(t, float), 0.5), PARAMETRIC, "half")
        with pytest.raises(SpaceError):
            simple_space(1, bad, PRODUCT)

    def test_rejects_bad_dim(self):
        with pytest.raises(SpaceError):
            simple_space(0, ratio_df(), PRODUCT)

    def test_point_dimension(self, space):
        with pytest.raises(SpaceError):
            nu_eval(space, [1.0, 2.0], 1.0)
        with pytest.raises(SpaceError):
            nu_eval(space, np.inf, 1.0)


class TestEvaluation:
    def test_example_values(self, space):
        assert nu_eval(space, 1.0, 1.0) == 0.5
        assert nu_eval(space, 5.0, 0.0) == 0
        assert nu_eval(space, 2.0, 2.0) == nu_eval(space, 1.0, 1.0) == 0.5

    @given(coord, pos, st.floats(min_value=0.01, max_value=50))
    def test_scaling_identity(self, x, t, a):
        sp = ratio_space(1)
        for sgn in (1, -1):
            assert nu_eval(sp, sgn * a * x, t) == pytest.approx(nu_eval(sp, x, t / a), rel=1e-12, abs=1e-15)

    @given(coord, pos)
    def test_symmetry(self, x, t):
        sp = ratio_space(1)
        assert nu_eval(sp, -x, t) == nu_eval(sp, x, t)

    @given(coord, pos, pos)
    def test_monotone_in_t(self, x, s, t):
        sp = ratio_space(1)
        lo, hi = sorted((s, t))
        assert nu_eval(sp, x, lo) <= nu_eval(sp, x, hi)

    def test_tends_to_one(self, space):
        for x in (0.5, 3.0, 100.0):
            assert abs(1 - nu_eval(space, x, 1e6)) < 1e-4


class TestOpenBall:
    def test_center_always_inside(self, space):
        for r in (0.01, 0.5, 0.99):
            assert open_ball_contains(space, 2.0, r, 0.3, 2.0)

    def test_examples(self, space):
        assert not open_ball_contains(space, 0.0, 0.4, 1.0, 1.0)
        assert open_ball_contains(space, 0.0, 0.6, 1.0, 1.0)

    @pytest.mark.parametrize("r,t", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0)])
    def test_bad_parameters(self, space, r, t):
        with pytest.raises(SpaceError):
            open_ball_contains(space, 0.0, r, t, 1.0)


class TestAxioms:
    @pytest.mark.parametrize("dim,T", [(1, PRODUCT), (2, PRODUCT), (2, MIN), (3, MIN)])
    def test_random_samples_pass(self, dim, T):
        sp = simple_space(dim, ratio_df(1.0), T)
        rep = check_pn_axioms(sp, random_samples(sp, 1000, np.random.default_rng(dim)))
        assert rep.passed, [r for r in rep.results if not r.passed]

    def test_corrupted_mu_caught(self):
        # non-monotone mu: rises to 0.9 at u = 1 then drops to 0.2
        def fn(u):
            u = np.asarray(u, dtype=float)
            return np.where(u <= 0, 0.0, np.where(u <= 1, 0.9 * u, 0.2))
        bad = PNSpace(1, DistributionFunction(fn, PARAMETRIC, "dip"), PRODUCT)
        rep = check_pn_axioms(bad, random_samples(bad, 500, np.random.default_rng(0)))
        failed = {r.name for r in rep.results if not r.passed}
        assert failed & {"iv", "monotone"}
        assert all(rep[n].witness is not None for n in failed)

    def test_empty_samples(self, space):
        with pytest.raises(ValueError):
            check_pn_axioms(space, [])
