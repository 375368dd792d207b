"""Finite-difference assembly of the truncated pencils on possibly nonuniform grids.

The discretization of -(p u')' + q u = lam r u on [x_min, x_max] with Dirichlet
ends uses flux differences with midpoint diffusion values and lumped weights:

    d_i   = p(x_{i-1/2})/h_minus + p(x_{i+1/2})/h_plus + q(x_i) w_i
    e_i   = -p(x_{i+1/2}) / h_{i+1/2}
    rho_i = r(x_i) w_i,    w_i = (h_minus + h_plus) / 2

yielding the generalized problem T u = lam R u over interior nodes.  Interface
points (the ends of the sign window) are inserted as nodes so restrictions and
block decouplings act exactly there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

NODE_SNAP = 1e-9  # relative to local spacing


@dataclass(frozen=True)
class Grid:
    nodes: np.ndarray
    density: float
    inserted: tuple = ()

    @property
    def h(self):
        return np.diff(self.nodes)

    @property
    def x_min(self):
        return float(self.nodes[0])

    @property
    def x_max(self):
        return float(self.nodes[-1])

    def node_index(self, value):
        """Index of the node equal to value, up to a snap tolerance."""
        i = int(np.argmin(np.abs(self.nodes - value)))
        scale = max(self.h.min(), 1e-300)
        if abs(self.nodes[i] - value) > NODE_SNAP * scale:
            raise ValidationError(
                f"{value} is not a grid node; pass it through build_grid(insert=...)")
        return i


def build_grid(x_min, x_max, density, insert=()):
    """Uniform grid of round(span*density) cells plus exact insertion points.

    Endpoints are nodes.  An insertion landing within snap distance of an
    existing node is absorbed; interior insertions otherwise split their cell.
    """
    x_min, x_max = float(x_min), float(x_max)
    if not x_min < x_max:
        raise ValidationError("grid requires x_min < x_max")
    span = x_max - x_min
    n_cells = int(round(span * float(density)))
    if n_cells < 2:
        raise ValidationError("grid must have at least 2 cells; raise the density")
    nodes = list(np.linspace(x_min, x_max, n_cells + 1))
    h = span / n_cells

    used = []
    for t in insert:
        t = float(t)
        if not (x_min <= t <= x_max):
            raise ValidationError(f"insertion point {t} outside the grid interval")
        j = int(np.argmin(np.abs(np.asarray(nodes) - t)))
        if abs(nodes[j] - t) <= NODE_SNAP * h:
            used.append(nodes[j])
            continue
        nodes.append(t)
        nodes.sort()
        used.append(t)
    return Grid(np.asarray(nodes, dtype=float), float(density), tuple(used))


VARIANTS = ("K", "L", "H_plus", "H_minus", "K_alphabeta", "H0")


@dataclass(frozen=True)
class AssembledOperator:
    """Tridiagonal pencil data over the interior nodes of (a slice of) a grid."""

    variant: str
    d: np.ndarray          # diagonal of T
    e: np.ndarray          # offdiagonal of T
    rho: np.ndarray        # diagonal of R, signed
    x: np.ndarray          # interior node coordinates
    artificial: tuple = ()  # interior indices of decoupled interface rows

    @property
    def size(self):
        return self.d.shape[0]

    def artificial_values(self):
        """Pencil eigenvalues contributed by decoupled interface rows."""
        return tuple(float(self.d[k] / self.rho[k]) for k in self.artificial)

    def dense_T(self):
        n = self.size
        T = np.zeros((n, n))
        if n:
            T[np.arange(n), np.arange(n)] = self.d
            idx = np.arange(n - 1)
            T[idx, idx + 1] = self.e
            T[idx + 1, idx] = self.e
        return T

    def dense_R(self):
        return np.diag(self.rho)


def _assemble_slice(field, nodes):
    """Interior tridiagonal data for Dirichlet truncation on the node slice."""
    nodes = np.asarray(nodes, dtype=float)
    m = nodes.shape[0] - 2
    if m < 0:
        m = 0
    if m == 0:
        z = np.zeros(0)
        return z, np.zeros(0), z.copy(), nodes[1:-1] if nodes.size >= 2 else nodes[:0]
    h = np.diff(nodes)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    p_mid = np.atleast_1d(np.asarray(field.p(mid), dtype=float))
    if np.any(p_mid <= 0):
        raise ValidationError("p must be positive on the grid")
    flux = p_mid / h
    xi = nodes[1:-1]
    w = 0.5 * (h[:-1] + h[1:])
    d = flux[:-1] + flux[1:] + np.atleast_1d(field.q(xi)) * w
    e = -flux[1:-1]
    rho = np.atleast_1d(field.r(xi)) * w
    if np.any(rho == 0):
        raise ValidationError("weight r vanishes at a grid node; shift the grid")
    return d, e, rho, xi


def assemble_operator(field, grid, variant, alpha=None, beta=None):
    """Assemble one of the operator variants on the grid.

    K            full pencil (T, R) with the signed weight
    L            full pencil with |r|; same T
    H_plus       restriction to (beta, x_max), Dirichlet ends
    H_minus      restriction to (x_min, alpha) with weight |r| (positive)
    K_alphabeta  restriction to (alpha, beta); empty when alpha == beta
    H0           full-size block decoupling at the alpha and beta rows
    """
    if variant not in VARIANTS:
        raise ValidationError(f"unknown operator variant {variant!r}")
    needs_window = variant in ("H_plus", "H_minus", "K_alphabeta", "H0")
    if needs_window:
        if alpha is None or beta is None:
            if field.sign_window is None:
                raise ValidationError(f"variant {variant} needs the sign window")
            alpha, beta = field.sign_window
        if beta < alpha:
            raise ValidationError("window requires alpha <= beta")
        # one-sided slices live on half grids that contain only their own
        # window endpoint; resolve just what the variant reads
        i_a = grid.node_index(alpha) if variant != "H_plus" else None
        i_b = grid.node_index(beta) if variant != "H_minus" else None

    if variant in ("K", "L"):
        d, e, rho, xi = _assemble_slice(field, grid.nodes)
        if variant == "L":
            rho = np.abs(rho)
        return AssembledOperator(variant, d, e, rho, xi)

    if variant == "H_plus":
        d, e, rho, xi = _assemble_slice(field, grid.nodes[i_b:])
        if np.any(rho <= 0):
            raise ValidationError("weight must be positive right of the window")
        return AssembledOperator(variant, d, e, rho, xi)

    if variant == "H_minus":
        d, e, rho, xi = _assemble_slice(field, grid.nodes[: i_a + 1])
        if np.any(rho >= 0):
            raise ValidationError("weight must be negative left of the window")
        # the minus piece is taken with |r|: a positive-weight operator whose
        # negative is the signed restriction appearing in the block decomposition
        return AssembledOperator(variant, d, e, -rho, xi)

    if variant == "K_alphabeta":
        if i_a == i_b:
            z = np.zeros(0)
            return AssembledOperator(variant, z, np.zeros(0), z.copy(), z.copy())
        d, e, rho, xi = _assemble_slice(field, grid.nodes[i_a : i_b + 1])
        return AssembledOperator(variant, d, e, rho, xi)

    # H0: full-size assembly, then cut the couplings around the interface rows
    d, e, rho, xi = _assemble_slice(field, grid.nodes)
    interior = {i_a - 1, i_b - 1} - {-1, xi.shape[0]}
    cut = sorted(k for k in interior if 0 <= k < xi.shape[0])
    e = e.copy()
    for k in cut:
        if k - 1 >= 0:
            e[k - 1] = 0.0
        if k < e.shape[0]:
            e[k] = 0.0
    return AssembledOperator("H0", d, e, rho, xi, tuple(cut))


def blockdiag_difference(op_full, op_block):
    """Dense difference T_full - T_block for two same-grid assemblies."""
    if op_full.size != op_block.size or not np.allclose(op_full.x, op_block.x):
        raise ValidationError("operators must live on the same interior nodes")
    return op_full.dense_T() - op_block.dense_T()
