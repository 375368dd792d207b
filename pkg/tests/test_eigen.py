"""Eigenvalue counting, windowed extraction, and dense indefinite solves."""

import math

import numpy as np
import pytest

from kreinspec.assembly import AssembledOperator, assemble_operator, build_grid
from kreinspec.coeff_model import field_from_texts
from kreinspec.eigen_core import (
    Inertia,
    count_below,
    count_in_interval,
    indefinite_eigs,
    inertia_count,
    numerical_rank,
    sym_tridiag_eigs,
)
from kreinspec.errors import DenseSizeError, ValidationError


def pos_op(d, e, rho=None):
    d = np.asarray(d, dtype=float)
    rho = np.ones_like(d) if rho is None else np.asarray(rho, dtype=float)
    return AssembledOperator("K", d, np.asarray(e, dtype=float), rho,
                             np.arange(d.size, dtype=float))


def random_pos_op(rng, n):
    return pos_op(rng.standard_normal(n) * 2, rng.standard_normal(n - 1),
                  rng.uniform(0.5, 2.0, n))


class TestCounting:
    def test_matches_enumeration_on_random_pencils(self):
        rng = np.random.default_rng(2024)
        for _ in range(40):
            n = int(rng.integers(2, 40))
            op = random_pos_op(rng, n)
            T, R = op.dense_T(), op.dense_R()
            lam = np.linalg.eigvalsh(
                np.diag(np.diagonal(R) ** -0.5) @ T @ np.diag(np.diagonal(R) ** -0.5))
            lo, hi = sorted(rng.standard_normal(2) * 3)
            if lo == hi:
                continue
            assert count_below(op, hi) == int(np.sum(lam < hi))
            assert count_in_interval(op, lo, hi) == int(np.sum((lam > lo) & (lam < hi)))

    def test_shift_on_an_eigenvalue_is_nudged_below(self):
        op = pos_op([1.0, 2.0, 3.0], [0.0, 0.0])
        assert count_below(op, 2.0) == 1
        assert count_below(op, 2.0 + 1e-6) == 2

    def test_negative_definite_weight_is_flipped_internally(self):
        # pencil diag(1,2) v = lam diag(-1,-1) v has eigenvalues -1, -2
        op = pos_op([1.0, 2.0], [0.0], rho=[-1.0, -1.0])
        assert count_below(op, 0.0) == 2
        assert count_below(op, -1.5) == 1

    def test_infinite_shifts_bracket_everything(self):
        op = pos_op([1.0, 2.0, 3.0], [0.0, 0.0])
        assert count_below(op, math.inf) == 3
        assert count_below(op, -math.inf) == 0
        assert count_in_interval(op, -math.inf, math.inf) == 3

    def test_empty_width_interval_counts_zero(self):
        op = pos_op([1.0, 2.0], [0.0])
        assert count_in_interval(op, 1.5, 1.5) == 0
        with pytest.raises(ValidationError):
            count_in_interval(op, 2.0, 1.0)

    def test_empty_operator_counts_zero(self):
        op = AssembledOperator("K_alphabeta", np.zeros(0), np.zeros(0),
                               np.zeros(0), np.zeros(0))
        assert count_below(op, 5.0) == 0

    def test_inertia_of_shifted_pencil(self):
        # diag(1,2,3) - 2 I has inertia (1, 1, 1)
        got = inertia_count(np.array([1.0, 2.0, 3.0]), np.zeros(2),
                            np.ones(3), 2.0)
        assert got == Inertia(1, 1, 1)
        assert got.total == 3


class TestWindowedEigs:
    def fd_op(self, n=60):
        f = field_from_texts("1", "1", "0", sign_window=None)
        g = build_grid(0.0, math.pi, n / math.pi)
        return assemble_operator(f, g, "K"), float(g.h[0])

    def test_full_spectrum_hits_the_closed_form(self):
        op, h = self.fd_op()
        k = np.arange(1, op.size + 1)
        exact = (2.0 / h**2) * (1.0 - np.cos(k * h))
        np.testing.assert_allclose(sym_tridiag_eigs(op), exact, atol=1e-8)

    def test_window_restricts_the_output(self):
        op, h = self.fd_op()
        k = np.arange(1, op.size + 1)
        exact = (2.0 / h**2) * (1.0 - np.cos(k * h))
        inside = exact[(exact > 2.5) & (exact < 20.0)]
        got = sym_tridiag_eigs(op, interval=(2.5, 20.0))
        np.testing.assert_allclose(got, inside, atol=1e-8)

    def test_empty_window_gives_empty_array(self):
        op, _ = self.fd_op()
        assert sym_tridiag_eigs(op, interval=(0.1, 0.2)).size == 0

    def test_output_is_sorted(self):
        rng = np.random.default_rng(5)
        op = random_pos_op(rng, 30)
        lam = sym_tridiag_eigs(op)
        assert np.all(np.diff(lam) >= 0)


class TestIndefiniteEigs:
    def test_rotation_block_gives_one_conjugate_pair(self):
        op = AssembledOperator("K", np.array([0.0, 0.0]), np.array([1.0]),
                               np.array([1.0, -1.0]), np.array([-0.5, 0.5]))
        spec = indefinite_eigs(op)
        assert spec.real.size == 0
        assert spec.n_pairs == 1
        assert spec.pairs[0] == pytest.approx(1j)
        assert spec.residual_pairs[0] < 1e-12

    def test_definite_weight_reduces_to_the_symmetric_solver(self):
        rng = np.random.default_rng(77)
        op = random_pos_op(rng, 40)
        spec = indefinite_eigs(op)
        assert spec.n_pairs == 0
        np.testing.assert_allclose(spec.real, sym_tridiag_eigs(op), atol=1e-8)

    def test_pair_count_bounded_by_weight_inertia(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            n = int(rng.integers(2, 25))
            d = rng.standard_normal(n) * 2
            e = rng.standard_normal(n - 1)
            rho = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
            op = AssembledOperator("K", d, e, rho, np.arange(n, dtype=float))
            spec = indefinite_eigs(op)
            bound = min(int(np.sum(rho < 0)), int(np.sum(rho > 0)))
            assert spec.n_pairs <= bound
            assert spec.real.size + 2 * spec.n_pairs == n

    def test_pairs_are_reported_in_the_upper_half_plane(self):
        rng = np.random.default_rng(13)
        d = rng.standard_normal(20)
        e = rng.standard_normal(19)
        rho = np.concatenate([-np.ones(10), np.ones(10)])
        op = AssembledOperator("K", d, e, rho, np.arange(20, dtype=float))
        spec = indefinite_eigs(op)
        assert np.all(spec.pairs.imag > 0)

    def test_residuals_certify_the_solve(self):
        rng = np.random.default_rng(31)
        d = rng.standard_normal(30)
        e = rng.standard_normal(29)
        rho = np.concatenate([-np.ones(15), np.ones(15)])
        op = AssembledOperator("K", d, e, rho, np.arange(30, dtype=float))
        spec = indefinite_eigs(op)
        assert np.all(spec.residual_real < 1e-10)
        assert np.all(spec.residual_pairs < 1e-10)

    def test_size_cap_is_enforced(self):
        rng = np.random.default_rng(1)
        op = random_pos_op(rng, 20)
        with pytest.raises(DenseSizeError):
            indefinite_eigs(op, dense_cap=10)


class TestNumericalRank:
    def test_outer_product_has_rank_one(self):
        v = np.arange(1.0, 6.0)
        assert numerical_rank(np.outer(v, v)) == 1

    def test_zero_matrix_has_rank_zero(self):
        assert numerical_rank(np.zeros((4, 4))) == 0

    def test_tiny_noise_below_tolerance_is_ignored(self):
        rng = np.random.default_rng(8)
        M = np.outer(np.ones(6), np.ones(6)) + 1e-13 * rng.standard_normal((6, 6))
        assert numerical_rank(M) == 1
