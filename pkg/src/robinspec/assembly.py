"""P1 finite-element assembly: stiffness, mass, weighted boundary mass.

All element integrals are exact for linear elements (no quadrature error);
boundary-mass entries for nodal coefficient fields use the exact
linear-times-linear edge rule.  Assembled matrices are symmetric CSR and are
never mutated after assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import ArgumentError, AssemblyError
from .geometry import GAMMA, Mesh, boundary_edge_lengths, element_measures, gamma_nodes


# ---------------------------------------------------------------------------
# Boundary coefficient fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SigmaField:
    """Nonnegative boundary coefficient.

    kind:
      * ``constant`` — one value on the whole boundary,
      * ``per_edge`` — one value per boundary facet (piecewise constant),
      * ``nodal``    — one value per mesh node (piecewise linear on edges);
        entries at non-boundary nodes are ignored.

    support ``gamma`` restricts integration to gamma-marked facets, so a
    nodal field with nonzero values at gamma/non-gamma junction nodes does
    not leak onto the adjacent unmarked facets.
    """

    kind: str
    value: float = 0.0
    values: Optional[np.ndarray] = None
    support: str = "boundary"

    def __post_init__(self):
        if self.kind == "constant":
            if self.value < 0:
                raise ArgumentError(f"sigma must be nonnegative, got {self.value}")
        elif self.kind in ("per_edge", "nodal"):
            if self.values is None:
                raise ArgumentError(f"{self.kind} sigma needs a value array")
            if np.any(np.asarray(self.values) < 0):
                raise ArgumentError("sigma must be nonnegative everywhere")
        else:
            raise ArgumentError(f"unknown sigma kind {self.kind!r}")
        if self.support not in ("boundary", "gamma"):
            raise ArgumentError(f"unknown sigma support {self.support!r}")

    @classmethod
    def constant(cls, value: float) -> "SigmaField":
        return cls("constant", value=float(value))

    @classmethod
    def per_edge(cls, values) -> "SigmaField":
        return cls("per_edge", values=np.asarray(values, dtype=float))

    @classmethod
    def nodal(cls, values, support: str = "boundary") -> "SigmaField":
        return cls("nodal", values=np.asarray(values, dtype=float), support=support)

    @classmethod
    def on_gamma(cls, mesh: Mesh, value: float) -> "SigmaField":
        """Constant on the gamma subset, zero on the rest of the boundary."""
        vals = np.where(mesh.boundary_markers == GAMMA, float(value), 0.0)
        return cls.per_edge(vals)

    def edge_values(self, mesh: Mesh) -> np.ndarray:
        """Per-facet (value_at_first_node, value_at_second_node) pairs."""
        nb = len(mesh.boundary)
        if self.kind == "constant":
            return np.full((nb, mesh.dim), self.value)
        if self.kind == "per_edge":
            if len(self.values) != nb:
                raise ArgumentError("per_edge sigma length does not match boundary")
            return np.repeat(self.values[:, None], mesh.dim, axis=1)
        vals = np.asarray(self.values, dtype=float)
        if len(vals) != mesh.num_nodes:
            raise ArgumentError("nodal sigma length does not match node count")
        return vals[mesh.boundary]


# ---------------------------------------------------------------------------
# Matrix assembly
# ---------------------------------------------------------------------------

def _symmetrize(a: sp.csr_matrix) -> sp.csr_matrix:
    # kills last-ulp asymmetry from summation order
    out = (a + a.T) * 0.5
    out = out.tocsr()
    out.sum_duplicates()
    return out


def assemble_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Exact P1 stiffness matrix; constants lie in its kernel."""
    meas = element_measures(mesh)
    if np.any(meas <= 0):
        raise AssemblyError("degenerate element (nonpositive measure)")
    n = mesh.num_nodes
    if mesh.dim == 1:
        h = meas
        i0, i1 = mesh.elements[:, 0], mesh.elements[:, 1]
        data = np.concatenate([1.0 / h, 1.0 / h, -1.0 / h, -1.0 / h])
        rows = np.concatenate([i0, i1, i0, i1])
        cols = np.concatenate([i0, i1, i1, i0])
        return _symmetrize(sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr())
    p = mesh.nodes[mesh.elements]  # (Ne, 3, 2)
    # gradient of barycentric i is rot90(edge opposite i) / (2 area)
    e0 = p[:, 2] - p[:, 1]
    e1 = p[:, 0] - p[:, 2]
    e2 = p[:, 1] - p[:, 0]
    grads = np.stack([e0, e1, e2], axis=1)  # (Ne, 3, 2), pre-rotation
    grads = np.stack([-grads[:, :, 1], grads[:, :, 0]], axis=2) / (2.0 * meas)[:, None, None]
    local = np.einsum("tik,tjk->tij", grads, grads) * meas[:, None, None]
    rows = np.repeat(mesh.elements, 3, axis=1).reshape(-1)
    cols = np.tile(mesh.elements, (1, 3)).reshape(-1)
    return _symmetrize(sp.coo_matrix((local.reshape(-1), (rows, cols)), shape=(n, n)).tocsr())


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    """Exact P1 mass matrix (positive definite)."""
    meas = element_measures(mesh)
    if np.any(meas <= 0):
        raise AssemblyError("degenerate element (nonpositive measure)")
    n = mesh.num_nodes
    if mesh.dim == 1:
        h = meas
        i0, i1 = mesh.elements[:, 0], mesh.elements[:, 1]
        data = np.concatenate([h / 3.0, h / 3.0, h / 6.0, h / 6.0])
        rows = np.concatenate([i0, i1, i0, i1])
        cols = np.concatenate([i0, i1, i1, i0])
        return _symmetrize(sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr())
    base = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    local = meas[:, None, None] * base[None, :, :]
    rows = np.repeat(mesh.elements, 3, axis=1).reshape(-1)
    cols = np.tile(mesh.elements, (1, 3)).reshape(-1)
    return _symmetrize(sp.coo_matrix((local.reshape(-1), (rows, cols)), shape=(n, n)).tocsr())


def assemble_boundary_mass(mesh: Mesh, sigma: SigmaField,
                           gamma_only: bool = False) -> sp.csr_matrix:
    """Boundary mass matrix weighted by sigma.

    With ``gamma_only`` the integration runs over gamma-marked facets only
    (used for flux recovery and gamma-restricted coefficients).
    """
    n = mesh.num_nodes
    vals = sigma.edge_values(mesh)
    bdry = mesh.boundary
    lengths = boundary_edge_lengths(mesh)
    if gamma_only or sigma.support == "gamma":
        keep = mesh.boundary_markers == GAMMA
        vals, bdry, lengths = vals[keep], bdry[keep], lengths[keep]
    if mesh.dim == 1:
        rows = bdry[:, 0]
        data = vals[:, 0]
        return _symmetrize(sp.coo_matrix((data, (rows, rows)), shape=(n, n)).tocsr())
    s0, s1 = vals[:, 0], vals[:, 1]
    l = lengths
    b00 = l * (s0 / 4.0 + s1 / 12.0)
    b11 = l * (s0 / 12.0 + s1 / 4.0)
    b01 = l * (s0 + s1) / 12.0
    i0, i1 = bdry[:, 0], bdry[:, 1]
    rows = np.concatenate([i0, i1, i0, i1])
    cols = np.concatenate([i0, i1, i1, i0])
    data = np.concatenate([b00, b11, b01, b01])
    return _symmetrize(sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr())


def gamma_edge_mass(mesh: Mesh) -> sp.csr_matrix:
    """Unweighted boundary mass over gamma facets (flux-recovery weight)."""
    return assemble_boundary_mass(mesh, SigmaField.constant(1.0), gamma_only=True)


# ---------------------------------------------------------------------------
# Discrete form bundle and Dirichlet elimination
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteForm:
    """Stiffness/mass/boundary triple for one mesh; `free` is set once the
    gamma nodes have been eliminated."""

    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    boundary: Optional[sp.csr_matrix]
    mesh: Mesh
    free: Optional[np.ndarray] = None


def build_form(mesh: Mesh, sigma: Optional[SigmaField] = None) -> DiscreteForm:
    b = assemble_boundary_mass(mesh, sigma) if sigma is not None else None
    return DiscreteForm(assemble_stiffness(mesh), assemble_mass(mesh), b, mesh)


def eliminate_gamma(form: DiscreteForm) -> DiscreteForm:
    """Remove gamma-node rows/columns from the form (Dirichlet on gamma)."""
    if form.free is not None:
        raise ArgumentError("form is already reduced")
    fixed = gamma_nodes(form.mesh)
    if len(fixed) == 0:
        raise ArgumentError("gamma is empty: nothing to eliminate")
    n = form.mesh.num_nodes
    free = np.setdiff1d(np.arange(n), fixed)
    k = form.stiffness[free][:, free].tocsr()
    m = form.mass[free][:, free].tocsr()
    b = form.boundary[free][:, free].tocsr() if form.boundary is not None else None
    return DiscreteForm(k, m, b, form.mesh, free=free)


# ---------------------------------------------------------------------------
# Discrete functionals
# ---------------------------------------------------------------------------

def integrate(mesh: Mesh, u) -> float:
    """Exact integral of a nodal P1 function."""
    m = assemble_mass(mesh)
    return float(np.ones(mesh.num_nodes) @ (m @ np.asarray(u, dtype=float)))


def l2_norm(mesh: Mesh, u) -> float:
    m = assemble_mass(mesh)
    u = np.asarray(u, dtype=float)
    return float(np.sqrt(u @ (m @ u)))


def boundary_integral(mesh: Mesh, sigma: SigmaField, u) -> float:
    """Weighted boundary term: integral of sigma * u^2 over the boundary."""
    b = assemble_boundary_mass(mesh, sigma)
    u = np.asarray(u, dtype=float)
    return float(u @ (b @ u))


def write_matrix_market(a: sp.spmatrix, path) -> None:
    """Dump a sparse matrix in MatrixMarket coordinate format (debugging)."""
    scipy.io.mmwrite(path, sp.coo_matrix(a))
