import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacunary_pn.lacunary import (
    SchemeError,
    SequenceSource,
    alternating,
    block_average,
    block_averages,
    block_range,
    constant,
    from_array,
    is_square,
    make_scheme,
    reciprocal,
    squares_indicator,
)

import naive
from conftest import ratio_space


class TestSchemes:
    def test_geometric_prefix(self, geo):
        assert geo.ks(5).tolist() == [0, 2, 4, 8, 16, 32]
        assert geo.widths(5).tolist() == [2, 2, 4, 8, 16]
        assert geo.asymptotics == "closed form"

    def test_explicit(self):
        th = make_scheme({"kind": "explicit", "ks": [0, 1, 3]})
        assert block_range(th, 1) == (0, 1)
        assert block_range(th, 2) == (1, 3)
        assert th.asymptotics == "asserted by user"
        with pytest.raises(SchemeError):
            th.ks(3)

    @pytest.mark.parametrize("ks", [[0, 3, 2], [1, 2, 4], [0, 2, 2]])
    def test_explicit_invalid(self, ks):
        with pytest.raises(SchemeError):
            make_scheme({"kind": "explicit", "ks": ks})

    @pytest.mark.parametrize("desc", [
        {"kind": "geometric", "rho": 1.0}, {"kind": "polynomial", "p": 0}, {"kind": "fibonacci"},
    ])
    def test_invalid_descriptors(self, desc):
        with pytest.raises(SchemeError):
            make_scheme(desc)

    def test_non_monotone_widths_rejected(self):
        # ceil(1.5^r): 2, 3, 4, 6, 8, ... widths 2, 1, 1, 2 dip early
        with pytest.raises(SchemeError):
            make_scheme({"kind": "geometric", "rho": 1.5, "c": 1.0})
        th = make_scheme({"kind": "geometric", "rho": 1.5, "c": 1.0, "monotone_from": 4})
        assert th.growth_witnessed(20)

    def test_block_ranges(self, geo):
        assert block_range(geo, 2) == (2, 4)
        assert block_range(geo, 4) == (8, 16)
        assert block_range(geo, 1)[0] == 0
        with pytest.raises(SchemeError):
            block_range(geo, 0)

    def test_extends_on_demand(self, geo):
        assert geo.k(25) == 2 ** 25

    def test_polynomial(self):
        th = make_scheme({"kind": "polynomial", "p": 2})
        assert th.ks(4).tolist() == [0, 1, 4, 9, 16]
        assert th.growth_witnessed(4)

    @pytest.mark.parametrize("desc,R", [
        ({"kind": "geometric", "rho": 2.0, "c": 1.0}, 18),
        ({"kind": "geometric", "rho": 3.0, "c": 0.5}, 12),
        ({"kind": "polynomial", "p": 3}, 40),
    ])
    def test_blocks_partition(self, desc, R):
        th = make_scheme(desc, R)
        ks = th.ks(R)
        seen = np.zeros(ks[-1] + 1, dtype=int)
        for r in range(1, R + 1):
            lo, hi = block_range(th, r)
            seen[lo + 1: hi + 1] += 1
            assert hi - lo == th.widths(R)[r - 1]
        assert np.all(seen[1:] == 1)
        assert th.block_of(int(ks[-1]), R) == R
        assert th.block_of(1, R) == 1


class TestSequences:
    def test_is_square(self):
        k = np.arange(1, 10_001)
        expected = np.array([math.isqrt(int(i)) ** 2 == i for i in k])
        assert np.array_equal(is_square(k), expected)
        big = np.array([10**12, 10**12 + 1, (10**6 - 1) ** 2])
        assert is_square(big).tolist() == [True, False, True]

    def test_deterministic_and_memoised(self):
        s = squares_indicator()
        a = s.values(100).copy()
        assert np.array_equal(s.values(100), a)
        assert s(16)[0] == 1 and s(15)[0] == 0
        with pytest.raises(IndexError):
            s(0)

    def test_cache_read_only(self):
        s = alternating()
        v = s.values(10)
        with pytest.raises(ValueError):
            v[0, 0] = 5

    def test_concurrent_fill(self):
        s = reciprocal()
        out = []

        def work(n):
            out.append(s.values(n)[:50].copy())

        ts = [threading.Thread(target=work, args=(n,)) for n in (500, 1000, 2000, 4000)]
        for t in ts:
            t.start()
        for t in ts:
            t.join()
        assert all(np.array_equal(o, out[0]) for o in out)

    def test_from_array_bounds(self):
        s = from_array([1.0, 2.0, 3.0])
        assert s(2)[0] == 2.0
        with pytest.raises(IndexError):
            s.values(4)

    def test_per_index_fn(self):
        s = SequenceSource(lambda k: [k, -k], dim=2)
        assert s.values(3).tolist() == [[1, -1], [2, -2], [3, -3]]


class TestBlockAverage:
    def test_squares_examples(self, squares_seq, space, geo):
        assert block_average(squares_seq, space, geo, 2, 0.0, 1.0) == 0.75
        assert block_average(squares_seq, space, geo, 1, 0.0, 1.0) == 0.75

    def test_constant_is_one(self, space, geo):
        c = constant(2.5)
        assert np.all(block_averages(c, space, geo, 2.5, 0.3, 12) == 1.0)

    def test_squares_closed_form(self, squares_seq, space, geo):
        avg = block_averages(squares_seq, space, geo, 0.0, 1.0, 20)
        ks = geo.ks(20).tolist()
        for r in range(1, 21):
            s = naive.squares_in(ks[r - 1], ks[r])
            assert avg[r - 1] == pytest.approx(1 - 0.5 * s / (ks[r] - ks[r - 1]), abs=1e-12)

    def test_vector_matches_scalar(self, squares_seq, space, geo):
        avg = block_averages(squares_seq, space, geo, 0.0, 0.5, 12)
        for r in range(1, 13):
            assert avg[r - 1] == pytest.approx(block_average(squares_seq, space, geo, r, 0.0, 0.5), abs=1e-12)

    def test_width_one_blocks(self, space):
        th = make_scheme({"kind": "explicit", "ks": [0, 1, 2, 3]})
        s = reciprocal()
        for r in (1, 2, 3):
            assert block_average(s, space, th, r, 0.0, 1.0) == pytest.approx(naive.nu_ratio([1 / r], 1.0))

    def test_eps_must_be_positive(self, squares_seq, space, geo):
        with pytest.raises(ValueError):
            block_average(squares_seq, space, geo, 1, 0.0, 0.0)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=0.01, max_value=5), st.floats(min_value=0.01, max_value=5))
    def test_monotone_in_eps(self, e1, e2):
        sp = ratio_space(1)
        th = make_scheme({"kind": "geometric", "rho": 2.0, "c": 1.0})
        lo, hi = sorted((e1, e2))
        a = block_averages(squares_indicator(), sp, th, 0.3, lo, 10)
        b = block_averages(squares_indicator(), sp, th, 0.3, hi, 10)
        assert np.all(a <= b + 1e-15)
