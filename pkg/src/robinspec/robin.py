"""Lowest Robin eigenvalue, Robin spectra, and the shrinking-support sweep."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from . import assembly, geometry
from .assembly import SigmaField
from .eigensolve import EigResult, smallest_eigs
from .errors import ArgumentError, ResolutionError
from .geometry import GAMMA, Mesh


@dataclass(frozen=True, eq=False)
class RobinResult:
    """Lowest eigenpair of the Robin problem on one mesh.

    The eigenfunction is L2-normalized and sign-flipped to positive mean;
    residual is the Euler-Lagrange defect ||(K + B - lambda M) x||_2.
    """

    value: float
    eigenfunction: np.ndarray
    residual: float
    level: int


def lowest_eigenvalue(mesh: Mesh, sigma: SigmaField, tol: float = 1e-10,
                      seed: int = 42) -> RobinResult:
    """Smallest eigenvalue of (K + B(sigma)) x = lambda M x with minimiser."""
    k = assembly.assemble_stiffness(mesh)
    m = assembly.assemble_mass(mesh)
    b = assembly.assemble_boundary_mass(mesh, sigma)
    res = smallest_eigs(k + b, m, k=1, tol=tol, seed=seed)
    lam = float(res.values[0])
    psi = res.vectors[:, 0].copy()
    if float(np.ones(len(psi)) @ (m @ psi)) < 0.0:
        psi = -psi
    return RobinResult(lam, psi, float(res.residuals[0]), mesh.level)


def spectrum(mesh: Mesh, sigma: SigmaField, k: int, tol: float = 1e-10,
             seed: int = 42) -> EigResult:
    """First k Robin eigenpairs."""
    kk = assembly.assemble_stiffness(mesh)
    m = assembly.assemble_mass(mesh)
    b = assembly.assemble_boundary_mass(mesh, sigma)
    return smallest_eigs(kk + b, m, k=k, tol=tol, seed=seed)


def neumann_spectrum(mesh: Mesh, k: int, tol: float = 1e-10, seed: int = 42) -> EigResult:
    return spectrum(mesh, SigmaField.constant(0.0), k, tol=tol, seed=seed)


def dirichlet_spectrum(mesh: Mesh, k: int, tol: float = 1e-10, seed: int = 42) -> EigResult:
    """First k eigenvalues with the value pinned to zero on the whole boundary."""
    kk = assembly.assemble_stiffness(mesh)
    m = assembly.assemble_mass(mesh)
    fixed = geometry.boundary_nodes(mesh)
    free = np.setdiff1d(np.arange(mesh.num_nodes), fixed)
    if len(free) == 0:
        raise ArgumentError("mesh has no interior nodes")
    return smallest_eigs(kk[free][:, free], m[free][:, free], k=k, tol=tol, seed=seed)


@dataclass(frozen=True)
class ConcentrationRow:
    n: int
    radius: float
    support_length: float
    coefficient: float
    eigenvalue: float


def concentration_sweep(mesh: Mesh, mass: float, point, n_max: int,
                        tol: float = 1e-10, seed: int = 42) -> List[ConcentrationRow]:
    """Eigenvalues for coefficients of fixed mass concentrating at a point.

    Step n places the constant mass/length(support) on the gamma edges lying
    entirely inside the ball of radius 2^-n around the given boundary point.
    Raises ResolutionError once no edge fits inside the ball.
    """
    if mesh.dim != 2:
        raise ArgumentError("concentration sweep requires a planar mesh")
    if mass <= 0:
        raise ArgumentError("mass must be positive")
    pt = np.asarray(point, dtype=float)
    d0 = np.linalg.norm(mesh.nodes[mesh.boundary[:, 0]] - pt, axis=1)
    d1 = np.linalg.norm(mesh.nodes[mesh.boundary[:, 1]] - pt, axis=1)
    lengths = geometry.boundary_edge_lengths(mesh)
    on_gamma = mesh.boundary_markers == GAMMA
    rows: List[ConcentrationRow] = []
    for n in range(1, n_max + 1):
        r = 2.0 ** (-n)
        support = on_gamma & (d0 <= r + 1e-12) & (d1 <= r + 1e-12)
        total = float(lengths[support].sum())
        if total == 0.0:
            raise ResolutionError(
                f"no gamma edge fits inside radius {r}: refine the mesh")
        alpha = mass / total
        values = np.where(support, alpha, 0.0)
        res = lowest_eigenvalue(mesh, SigmaField.per_edge(values), tol=tol, seed=seed)
        rows.append(ConcentrationRow(n, r, total, alpha, res.value))
    return rows
