import numpy as np
import pytest

from ddchirp import (dd_inner_product, dd_extended, dzt, idzt, td_to_tf,
                     twisted_shift, zc_sequence)
from ddchirp.errors import LengthMismatch, ShapeMismatch


def dzt_direct(x, cfg):
    """Double-loop evaluation of the DZT definition (test oracle)."""
    M, N = cfg.M, cfg.N
    out = np.zeros((M, N), dtype=complex)
    for k in range(M):
        for l in range(N):
            out[k, l] = sum(x[k + n * M] * np.exp(-2j * np.pi * l * n / N)
                            for n in range(N)) / np.sqrt(N)
    return out


def td_to_tf_direct(z, cfg):
    """Double-loop evaluation of the TF map definition (test oracle)."""
    M, N = cfg.M, cfg.N
    out = np.zeros((M, N), dtype=complex)
    for k in range(M):
        for l in range(N):
            out[k, l] = sum(z[l + n * N] * np.exp(-2j * np.pi * k * n / M)
                            for n in range(M)) / np.sqrt(M)
    return out


def random_td(rng, cfg):
    return rng.standard_normal(cfg.mn) + 1j * rng.standard_normal(cfg.mn)


class TestDzt:
    def test_kronecker_delta(self, small_grid):
        x = np.zeros(small_grid.mn, dtype=complex)
        x[0] = 1.0
        X = dzt(x, small_grid)
        assert np.allclose(X[0, :], 1 / np.sqrt(small_grid.N))
        assert np.allclose(X[1:, :], 0.0)

    def test_all_ones(self, small_grid):
        X = dzt(np.ones(small_grid.mn), small_grid)
        assert np.allclose(X[:, 0], np.sqrt(small_grid.N))
        assert np.allclose(X[:, 1:], 0.0)

    def test_matches_direct_sum(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        assert np.abs(dzt(x, paper_grid) - dzt_direct(x, paper_grid)).max() < 1e-10

    def test_length_check(self, small_grid):
        with pytest.raises(LengthMismatch):
            dzt(np.ones(small_grid.mn + 1), small_grid)

    def test_quasi_periodicity(self, small_grid, rng):
        # evaluating the defining sum at k+M scales column l by exp(2j*pi*l/N)
        x = random_td(rng, small_grid)
        M, N = small_grid.M, small_grid.N
        X = dzt(x, small_grid)
        for l in range(N):
            shifted = sum(x[(0 + M + n * M) % small_grid.mn]
                          * np.exp(-2j * np.pi * l * n / N)
                          for n in range(N)) / np.sqrt(N)
            assert shifted == pytest.approx(X[0, l] * np.exp(2j * np.pi * l / N))

    def test_dd_extended_matches_rule(self, small_grid, rng):
        x = random_td(rng, small_grid)
        X = dzt(x, small_grid)
        k = np.arange(-small_grid.M, 3 * small_grid.M)
        vals = dd_extended(X, k, np.full_like(k, 2), small_grid)
        xi = np.exp(2j * np.pi * 2 / small_grid.N)
        assert np.allclose(vals[k % small_grid.M == 0],
                           X[0, 2] * xi ** ((k[k % small_grid.M == 0]) // small_grid.M))


class TestIdzt:
    def test_round_trip(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        assert np.abs(idzt(dzt(x, paper_grid), paper_grid) - x).max() < 1e-12

    def test_zero(self, small_grid):
        assert np.allclose(idzt(np.zeros((7, 9)), small_grid), 0.0)

    def test_single_pulse(self, small_grid):
        k0, l0 = 3, 4
        X = np.zeros((small_grid.M, small_grid.N), dtype=complex)
        X[k0, l0] = 1.0
        x = idzt(X, small_grid)
        n = np.arange(small_grid.N)
        expect = np.exp(2j * np.pi * l0 * n / small_grid.N) / np.sqrt(small_grid.N)
        grid = x.reshape(small_grid.N, small_grid.M)
        assert np.allclose(grid[:, k0], expect)
        mask = np.ones(small_grid.M, dtype=bool)
        mask[k0] = False
        assert np.allclose(grid[:, mask], 0.0)


class TestInnerProduct:
    def test_preservation(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        y = random_td(rng, paper_grid)
        td = np.sum(x * np.conj(y))
        dd = dd_inner_product(dzt(x, paper_grid), dzt(y, paper_grid))
        assert abs(dd - td) < 1e-10

    def test_unit_modulus_energy(self, paper_grid):
        X = dzt(zc_sequence(981, paper_grid), paper_grid)
        assert dd_inner_product(X, X) == pytest.approx(paper_grid.mn)

    def test_orthogonal_pulses(self, small_grid):
        A = np.zeros((7, 9), dtype=complex)
        B = np.zeros((7, 9), dtype=complex)
        A[1, 2] = 1.0
        B[3, 4] = 1.0
        assert dd_inner_product(A, B) == 0.0

    def test_shape_check(self):
        with pytest.raises(ShapeMismatch):
            dd_inner_product(np.zeros((2, 3)), np.zeros((3, 2)))


class TestTdToTf:
    def test_tone_lands_on_row(self, paper_grid):
        u, a = 981, 7
        c = (u * a) % paper_grid.mn
        z = np.exp(2j * np.pi * c * np.arange(paper_grid.mn) / paper_grid.mn)
        Z = td_to_tf(z, paper_grid)
        k_expect = c % paper_grid.M
        energy = np.abs(Z) ** 2
        assert energy[k_expect].sum() / energy.sum() > 1 - 1e-12

    def test_constant_on_row_zero(self, small_grid):
        Z = td_to_tf(np.ones(small_grid.mn), small_grid)
        assert np.abs(Z[1:]).max() < 1e-12

    def test_matches_direct_sum(self, paper_grid, rng):
        z = random_td(rng, paper_grid)
        assert np.abs(td_to_tf(z, paper_grid)
                      - td_to_tf_direct(z, paper_grid)).max() < 1e-10

    def test_parseval(self, paper_grid, rng):
        z = random_td(rng, paper_grid)
        assert np.sum(np.abs(td_to_tf(z, paper_grid)) ** 2) == pytest.approx(
            np.sum(np.abs(z) ** 2), abs=1e-9)


class TestTwistedShift:
    def test_identity_shift(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        X = dzt(x, paper_grid)
        assert np.allclose(twisted_shift(X, 0, 0, paper_grid), X)

    def test_matches_td_delay_modulate(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        X = dzt(x, paper_grid)
        mn = paper_grid.mn
        n = np.arange(mn)
        for _ in range(20):
            k0 = int(rng.integers(-mn, mn))
            l0 = int(rng.integers(-mn, mn))
            td = np.roll(x, k0) * np.exp(2j * np.pi * l0 * (n - k0) / mn)
            assert np.abs(twisted_shift(X, k0, l0, paper_grid)
                          - dzt(td, paper_grid)).max() < 1e-10

    def test_compose_and_invert_up_to_phase(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        X = dzt(x, paper_grid)
        for k0, l0 in [(3, 5), (12, -7), (-4, 11)]:
            back = twisted_shift(twisted_shift(X, k0, l0, paper_grid),
                                 -k0, -l0, paper_grid)
            assert np.abs(np.abs(back) - np.abs(X)).max() < 1e-12
            ratio = back[np.abs(X) > 1e-6] / X[np.abs(X) > 1e-6]
            assert np.abs(np.abs(ratio) - 1).max() < 1e-9
            assert np.abs(ratio - ratio[0]).max() < 1e-9  # single global phase

    def test_preserves_energy_and_quasi_periodicity(self, paper_grid, rng):
        x = random_td(rng, paper_grid)
        X = dzt(x, paper_grid)
        Y = twisted_shift(X, 5, -3, paper_grid)
        assert np.sum(np.abs(Y) ** 2) == pytest.approx(np.sum(np.abs(X) ** 2))
        # Y is still a DZT of some TD signal, so the round trip is lossless
        assert np.abs(dzt(idzt(Y, paper_grid), paper_grid) - Y).max() < 1e-10


class TestUnitarityBulk:
    def test_thousand_random_pairs(self, paper_grid):
        rng = np.random.default_rng(99)
        worst = 0.0
        for _ in range(1000):
            x = random_td(rng, paper_grid)
            y = random_td(rng, paper_grid)
            dd = dd_inner_product(dzt(x, paper_grid), dzt(y, paper_grid))
            worst = max(worst, abs(dd - np.sum(x * np.conj(y))))
        assert worst < 1e-9
