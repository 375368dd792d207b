"""Grid construction and finite-difference assembly of the operator variants."""

import math

import numpy as np
import pytest

from kreinspec.assembly import (
    assemble_operator,
    blockdiag_difference,
    build_grid,
)
from kreinspec.coeff_model import field_from_texts
from kreinspec.eigen_core import numerical_rank, sym_tridiag_eigs
from kreinspec.errors import ValidationError

MW_WEIGHT = "pw{[-inf,-1): -1; [-1,-0.5): 1; [-0.5,0): -1; [0,inf): 1;}"


def unit_gap_field():
    return field_from_texts("sgn(x)", "1", "1")


class TestGrid:
    def test_node_count_at_default_density(self):
        g = build_grid(-10.0, 10.0, 10.0)
        assert g.nodes.size == 201
        assert 0.0 in g.nodes

    def test_coarse_grid(self):
        assert build_grid(-2.0, 2.0, 1.0).nodes.size == 5

    def test_cell_widths_are_uniform_without_insertions(self):
        g = build_grid(-10.0, 10.0, 10.0)
        np.testing.assert_allclose(g.h, 0.1, rtol=1e-12)

    def test_insertion_splits_a_cell(self):
        g = build_grid(0.0, 10.0, 10.0, insert=(0.25,))
        assert g.nodes.size == 102
        assert 0.25 in g.nodes
        assert g.inserted == (0.25,)

    def test_insertion_near_existing_node_is_absorbed(self):
        g = build_grid(0.0, 10.0, 10.0, insert=(0.2 + 1e-12,))
        assert g.nodes.size == 101
        assert g.inserted == (0.2,)

    def test_insertion_outside_interval_rejected(self):
        with pytest.raises(ValidationError, match="outside the grid interval"):
            build_grid(-10.0, 10.0, 10.0, insert=(15.0,))

    def test_node_index_finds_inserted_points(self):
        g = build_grid(-1.0, 1.0, 10.0, insert=(0.25,))
        assert g.nodes[g.node_index(0.25)] == 0.25


class TestAssembly:
    def test_dirichlet_laplacian_matches_the_closed_form(self):
        # uniform grid on (0, pi): eigenvalues (2/h^2)(1 - cos(k h)) exactly
        f = field_from_texts("1", "1", "0", sign_window=None)
        n = 40
        g = build_grid(0.0, math.pi, n / math.pi)
        op = assemble_operator(f, g, "K")
        assert op.size == n - 1
        h = float(g.h[0])
        k = np.arange(1, op.size + 1)
        exact = (2.0 / h**2) * (1.0 - np.cos(k * h))
        lam = sym_tridiag_eigs(op)
        np.testing.assert_allclose(lam, exact, atol=1e-8)
        # the discrete ground state approaches the continuum value 1 from below
        assert lam[0] < 1.0
        assert lam[0] == pytest.approx(1.0, abs=1e-3)

    def test_weight_carries_the_sign_of_r(self):
        op = assemble_operator(unit_gap_field(), build_grid(-10.0, 10.0, 10.0), "K")
        assert np.all(op.rho[op.x < 0] < 0)
        assert np.all(op.rho[op.x >= 0] > 0)

    def test_absolute_variant_shares_t_and_flips_rho(self):
        f = unit_gap_field()
        g = build_grid(-10.0, 10.0, 10.0)
        K = assemble_operator(f, g, "K")
        L = assemble_operator(f, g, "L")
        np.testing.assert_array_equal(L.d, K.d)
        np.testing.assert_array_equal(L.e, K.e)
        np.testing.assert_array_equal(L.rho, np.abs(K.rho))

    def test_half_line_pieces_are_positive_weight(self):
        f = unit_gap_field()
        plus = assemble_operator(f, build_grid(0.0, 10.0, 10.0), "H_plus")
        minus = assemble_operator(f, build_grid(-10.0, 0.0, 10.0), "H_minus")
        assert plus.size == minus.size == 99
        assert np.all(plus.rho > 0)
        assert np.all(minus.rho > 0)

    def test_middle_block_is_empty_for_a_degenerate_window(self):
        f = unit_gap_field()
        op = assemble_operator(f, build_grid(-10.0, 10.0, 10.0), "K_alphabeta")
        assert op.size == 0

    def test_middle_block_spans_the_window(self):
        f = field_from_texts(MW_WEIGHT, "1", "1")
        assert f.sign_window == (-1.0, 0.0)
        op = assemble_operator(f, build_grid(-10.0, 10.0, 10.0), "K_alphabeta")
        assert op.size == 9
        assert np.all(op.x > -1.0) and np.all(op.x < 0.0)

    def test_vanishing_weight_at_a_node_rejected(self):
        f = field_from_texts("x/(1+abs(x))", "1", "0", sign_window=(0.0, 0.0))
        with pytest.raises(ValidationError, match="vanishes at a grid node"):
            assemble_operator(f, build_grid(-10.0, 10.0, 10.0), "K")

    def test_nonpositive_p_rejected(self):
        f = field_from_texts("sgn(x)", "x^2 - 25", "0", sign_window=(0.0, 0.0))
        with pytest.raises(ValidationError, match="p must be positive"):
            assemble_operator(f, build_grid(-10.0, 10.0, 10.0), "K")

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValidationError, match="unknown operator variant"):
            assemble_operator(unit_gap_field(), build_grid(-1.0, 1.0, 10.0), "Z")

    def test_window_variant_without_window_rejected(self):
        f = field_from_texts("sgn(x)", "1", "0", sign_window=None)
        with pytest.raises(ValidationError, match="needs the sign window"):
            assemble_operator(f, build_grid(-1.0, 1.0, 10.0), "H_plus")


class TestBlockDecoupling:
    def test_degenerate_window_cuts_one_interface(self):
        f = unit_gap_field()
        g = build_grid(-10.0, 10.0, 10.0)
        K = assemble_operator(f, g, "K")
        H0 = assemble_operator(f, g, "H0")
        assert H0.artificial == (99,)
        D = blockdiag_difference(K, H0)
        assert numerical_rank(D) == 2

    def test_wide_window_cuts_two_interfaces(self):
        f = field_from_texts(MW_WEIGHT, "1", "1")
        g = build_grid(-10.0, 10.0, 10.0)
        K = assemble_operator(f, g, "K")
        H0 = assemble_operator(f, g, "H0")
        assert len(H0.artificial) == 2
        D = blockdiag_difference(K, H0)
        assert numerical_rank(D) == 4

    def test_identical_assemblies_differ_by_rank_zero(self):
        f = unit_gap_field()
        g = build_grid(-5.0, 5.0, 10.0)
        K = assemble_operator(f, g, "K")
        assert numerical_rank(blockdiag_difference(K, K)) == 0

    def test_difference_requires_matching_grids(self):
        f = unit_gap_field()
        K1 = assemble_operator(f, build_grid(-5.0, 5.0, 10.0), "K")
        K2 = assemble_operator(f, build_grid(-6.0, 6.0, 10.0), "K")
        with pytest.raises(ValidationError, match="same interior nodes"):
            blockdiag_difference(K1, K2)

    def test_dense_forms_are_symmetric(self):
        f = unit_gap_field()
        op = assemble_operator(f, build_grid(-3.0, 3.0, 10.0), "K")
        T, R = op.dense_T(), op.dense_R()
        np.testing.assert_array_equal(T, T.T)
        assert np.count_nonzero(R - np.diag(np.diagonal(R))) == 0
