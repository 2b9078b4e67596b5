"""Global assembly and simply-supported constraints."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import theory
from .element import Section, element_mass, element_stiffness, load_vector
from .theory import N_DOF

# slots constrained on edges parallel to x (y = 0, b) and parallel to y (x = 0, a)
EDGE_Y_SLOTS = ("u0", "w0", "theta_x", "w1", "Gamma", "beta_x", "phi_x", "psi_x")
EDGE_X_SLOTS = ("v0", "w0", "theta_y", "w1", "Gamma", "beta_y", "phi_y", "psi_y")


@dataclass
class GlobalSystem:
    """Assembled system.

    ``dof_map[node, slot]`` is the global equation number before
    constraints (or -1 for inactive slots); ``free`` lists the retained
    equations.  ``K``, ``M``, ``f`` are the reduced (constrained) arrays.
    """

    mesh: object
    variant: object
    section: Section
    dof_map: np.ndarray
    K_full: sp.csr_matrix
    f_full: np.ndarray
    M_full: Optional[sp.csr_matrix] = None
    free: Optional[np.ndarray] = None
    constrained: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def n_full(self):
        return self.K_full.shape[0]

    @property
    def n_eq(self):
        return self.n_full if self.free is None else self.free.size

    @property
    def K(self):
        if self.free is None:
            return self.K_full
        return self.K_full[self.free][:, self.free]

    @property
    def M(self):
        if self.M_full is None:
            return None
        if self.free is None:
            return self.M_full
        return self.M_full[self.free][:, self.free]

    @property
    def f(self):
        return self.f_full if self.free is None else self.f_full[self.free]

    def expand(self, reduced):
        """Full-length vector with zeros at constrained equations."""
        full = np.zeros(self.n_full)
        if self.free is None:
            full[:] = reduced
        else:
            full[self.free] = reduced
        return full

    def nodal(self, full):
        """(n_nodes, 13) array of DOF values; inactive slots are zero."""
        out = np.zeros(self.dof_map.shape)
        mask = self.dof_map >= 0
        out[mask] = full[self.dof_map[mask]]
        return out


def build_dof_map(n_nodes, var):
    dof_map = -np.ones((n_nodes, N_DOF), dtype=int)
    act = var.active
    dof_map[:, act] = np.arange(n_nodes * act.size).reshape(n_nodes, act.size)
    return dof_map


def assemble(mesh, var, section, load=None, with_mass=False, apply_bc=True):
    """Scatter-add element matrices into a :class:`GlobalSystem`."""
    if var.has_zigzag and section.layup.n_layers < 2:
        raise ValueError(
            f"{var.name} needs at least two layers: on a single layer the zig-zag "
            "term duplicates the rotation and the stiffness is singular"
        )
    dof_map = build_dof_map(mesh.n_nodes, var)
    n = int(dof_map.max()) + 1
    rows, cols, kv, mv = [], [], [], []
    f = np.zeros(n)
    for e in range(mesh.n_elements):
        coords = mesh.element_coords(e)
        idx = dof_map[mesh.elements[e]][:, var.active].ravel()
        ke = element_stiffness(coords, var, section, elem_id=e)
        r = np.repeat(idx, idx.size)
        c = np.tile(idx, idx.size)
        rows.append(r)
        cols.append(c)
        kv.append(ke.ravel())
        if with_mass:
            mv.append(element_mass(coords, var, section, elem_id=e).ravel())
        if load is not None:
            np.add.at(f, idx, load_vector(coords, var, load, section, mesh.a, mesh.b, elem_id=e))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    K = sp.coo_matrix((np.concatenate(kv), (rows, cols)), shape=(n, n)).tocsr()
    M = None
    if with_mass:
        M = sp.coo_matrix((np.concatenate(mv), (rows, cols)), shape=(n, n)).tocsr()
    system = GlobalSystem(mesh, var, section, dof_map, K, f, M)
    if apply_bc:
        apply_simply_supported(system)
    return system


def constrained_slots(mesh, node, var, tol=1e-9):
    """DOF slot names fixed at ``node`` by the simply-supported conditions."""
    x, y = mesh.nodes[node]
    scale = max(mesh.a, mesh.b)
    names = set()
    if abs(y) < tol * scale or abs(y - mesh.b) < tol * scale:
        names |= set(EDGE_Y_SLOTS)
    if abs(x) < tol * scale or abs(x - mesh.a) < tol * scale:
        names |= set(EDGE_X_SLOTS)
    return names & var.dof_set()


def apply_simply_supported(system):
    """Eliminate edge DOFs in place; returns the system for chaining."""
    mesh, var = system.mesh, system.variant
    fixed = []
    for node in range(mesh.n_nodes):
        for name in constrained_slots(mesh, node, var):
            fixed.append(system.dof_map[node, theory.DOF_NAMES.index(name)])
    fixed = np.unique(np.array(fixed, dtype=int))
    system.constrained = fixed
    system.free = np.setdiff1d(np.arange(system.n_full), fixed)
    return system


def dump_triplets(matrix, path):
    """Write a sparse matrix as ``row col value`` lines (0-based, 17 sig. digits)."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17e}\n")
