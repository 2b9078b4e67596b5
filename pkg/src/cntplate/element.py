"""QUAD-8 serendipity element, structured meshes and element matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import theory
from .theory import N_DOF, N_GEN_STRAIN

# parent coordinates: corners counter-clockwise, then mid-edges bottom, right, top, left
NODE_XI = np.array([
    [-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0],
    [0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0],
])


class ElementError(RuntimeError):
    pass


def shape_functions(xi, eta):
    """Serendipity basis values (8,) and parent gradients (8, 2)."""
    N = np.empty(8)
    dN = np.empty((8, 2))
    for i in range(4):
        xa, ea = NODE_XI[i]
        N[i] = 0.25 * (1 + xa * xi) * (1 + ea * eta) * (xa * xi + ea * eta - 1)
        dN[i, 0] = 0.25 * xa * (1 + ea * eta) * (2 * xa * xi + ea * eta)
        dN[i, 1] = 0.25 * ea * (1 + xa * xi) * (xa * xi + 2 * ea * eta)
    for i in (4, 6):
        ea = NODE_XI[i, 1]
        N[i] = 0.5 * (1 - xi * xi) * (1 + ea * eta)
        dN[i, 0] = -xi * (1 + ea * eta)
        dN[i, 1] = 0.5 * ea * (1 - xi * xi)
    for i in (5, 7):
        xa = NODE_XI[i, 0]
        N[i] = 0.5 * (1 + xa * xi) * (1 - eta * eta)
        dN[i, 0] = 0.5 * xa * (1 - eta * eta)
        dN[i, 1] = -eta * (1 + xa * xi)
    return N, dN


def shape_hessians(xi, eta):
    """Parent second derivatives (8, 2, 2) of the serendipity basis."""
    H = np.zeros((8, 2, 2))
    for i in range(4):
        xa, ea = NODE_XI[i]
        H[i, 0, 0] = 0.5 * (1 + ea * eta)
        H[i, 1, 1] = 0.5 * (1 + xa * xi)
        H[i, 0, 1] = H[i, 1, 0] = 0.25 * xa * ea * (2 * xa * xi + 2 * ea * eta + 1)
    for i in (4, 6):
        ea = NODE_XI[i, 1]
        H[i, 0, 0] = -(1 + ea * eta)
        H[i, 0, 1] = H[i, 1, 0] = -xi * ea
    for i in (5, 7):
        xa = NODE_XI[i, 0]
        H[i, 1, 1] = -(1 + xa * xi)
        H[i, 0, 1] = H[i, 1, 0] = -eta * xa
    return H


def physical_hessians(coords, xi, eta, elem_id=None):
    """N, first and second physical derivatives at a parent point.

    Returns ``N``, ``dN`` (8, 2) and ``d2N`` (8, 3) with columns
    (xx, xy, yy).
    """
    N, dN = shape_functions(xi, eta)
    J = dN.T @ coords
    if np.linalg.det(J) <= 0:
        raise ElementError(f"element {elem_id}: non-positive Jacobian")
    Jinv = np.linalg.inv(J)
    g = dN @ Jinv.T  # (8, 2) physical gradients
    Hp = shape_hessians(xi, eta)
    X2 = np.einsum("aik,aj->ikj", Hp, coords)  # second derivatives of the map
    rhs = Hp - np.einsum("ikj,aj->aik", X2, g)
    Hx = np.einsum("ji,aik,lk->ajl", Jinv, rhs, Jinv)
    return N, g, np.column_stack([Hx[:, 0, 0], Hx[:, 0, 1], Hx[:, 1, 1]])


def gauss_2d(n=3):
    """Tensor-product Gauss rule on [-1, 1]^2: points (n*n, 2), weights (n*n,)."""
    x, w = np.polynomial.legendre.leggauss(n)
    pts = np.array([[a, b] for b in x for a in x])
    wts = np.array([wa * wb for wb in w for wa in w])
    return pts, wts


def physical_gradients(coords, xi, eta, elem_id=None):
    """N, dN/dx, dN/dy and det J at a parent point of an element."""
    N, dN = shape_functions(xi, eta)
    J = dN.T @ coords
    detJ = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if detJ <= 0:
        raise ElementError(f"element {elem_id}: non-positive Jacobian {detJ:.3e}")
    dxy = np.linalg.solve(J, dN.T)
    return N, dxy[0], dxy[1], detJ


def inverse_map(coords, x, y, tol=1e-13, maxit=30):
    """Parent coordinates of physical point (x, y) by Newton iteration."""
    p = np.zeros(2)
    target = np.array([x, y])
    for _ in range(maxit):
        N, dN = shape_functions(*p)
        r = N @ coords - target
        J = dN.T @ coords
        step = np.linalg.solve(J.T, r)
        p -= step
        if np.max(np.abs(step)) < tol:
            break
    return p


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray  # (n_nodes, 2)
    elements: np.ndarray  # (n_elem, 8)
    a: float
    b: float
    nx: int
    ny: int

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    def element_coords(self, e):
        return self.nodes[self.elements[e]]

    def find_elements(self, x, y, tol=1e-9):
        """Elements whose bounding box contains (x, y)."""
        found = []
        scale = max(self.a, self.b)
        for e in range(self.n_elements):
            c = self.element_coords(e)
            if (c[:, 0].min() - tol * scale <= x <= c[:, 0].max() + tol * scale
                    and c[:, 1].min() - tol * scale <= y <= c[:, 1].max() + tol * scale):
                p = inverse_map(c, x, y)
                if np.all(np.abs(p) <= 1 + 1e-8):
                    found.append((e, p))
        return found


def structured_mesh(a, b, nx, ny, perturb=None):
    """Structured nx x ny QUAD-8 mesh of [0, a] x [0, b].

    ``perturb(x, y) -> (dx, dy)`` shifts interior corner nodes (edge-midside
    nodes follow as midpoints, keeping element edges straight).
    """
    if nx < 1 or ny < 1:
        raise ValueError("mesh needs at least one element in each direction")
    xs = np.linspace(0.0, a, 2 * nx + 1)
    ys = np.linspace(0.0, b, 2 * ny + 1)
    index = -np.ones((2 * ny + 1, 2 * nx + 1), dtype=int)
    nodes = []
    for j in range(2 * ny + 1):
        for i in range(2 * nx + 1):
            if i % 2 == 1 and j % 2 == 1:
                continue
            index[j, i] = len(nodes)
            nodes.append((xs[i], ys[j]))
    nodes = np.array(nodes)
    elements = []
    for ey in range(ny):
        for ex in range(nx):
            i0, j0 = 2 * ex, 2 * ey
            elements.append([
                index[j0, i0], index[j0, i0 + 2], index[j0 + 2, i0 + 2], index[j0 + 2, i0],
                index[j0, i0 + 1], index[j0 + 1, i0 + 2], index[j0 + 2, i0 + 1], index[j0 + 1, i0],
            ])
    elements = np.array(elements, dtype=int)
    if perturb is not None:
        for j in range(0, 2 * ny + 1, 2):
            for i in range(0, 2 * nx + 1, 2):
                if 0 < i < 2 * nx and 0 < j < 2 * ny:
                    nodes[index[j, i]] += perturb(*nodes[index[j, i]])
        for elem in elements:
            for m, (c0, c1) in zip(range(4, 8), ((0, 1), (1, 2), (2, 3), (3, 0))):
                nodes[elem[m]] = 0.5 * (nodes[elem[c0]] + nodes[elem[c1]])
    return Mesh(nodes, elements, float(a), float(b), nx, ny)


def resolve_closure(closure, var):
    """Concrete constitutive closure for ``var``.

    ``by-variant`` selects ``full3d`` for variants that carry transverse
    normal strain (w1 active) and ``reduced`` for the rest.
    """
    if closure == "by-variant":
        return "full3d" if var.mask[theory.W1] else "reduced"
    if closure not in ("reduced", "full3d"):
        raise ValueError(f"unknown closure {closure!r}")
    return closure


def default_shear_factor(var):
    """5/6 for the first-order variant, 1 for the higher-order ones."""
    return 5.0 / 6.0 if var.name == "FSDT5" else 1.0


class Section:
    """Thickness-integrated resultants of a layup at one temperature.

    ``D`` (28x28) pairs generalized strains, ``mass`` (13x13) holds the
    z-moments of density against the displacement basis, ``thermal``
    (28,) is the stress resultant of a unit ``(2z/h)`` temperature field.
    """

    def __init__(self, layup, T, closure="reduced", n_gauss=None, thermal=True,
                 shear_factor=1.0):
        from .layup import N_THICKNESS_GAUSS

        self.layup = layup
        self.T = T
        self.closure = closure
        self.shear_factor = shear_factor
        self.h = layup.h
        s = layup.thickness_samples(
            T, closure, n_gauss or N_THICKNESS_GAUSS, thermal=thermal
        )
        self.samples = s
        D = np.zeros((N_GEN_STRAIN, N_GEN_STRAIN))
        mass = np.zeros((N_DOF, N_DOF))
        th = np.zeros(N_GEN_STRAIN)
        for j in range(s["z"].size):
            z, w = s["z"][j], s["w"][j]
            Z = theory.strain_map(z, s["S"][j], s["dS"][j])
            Q = s["Q"][j]
            if shear_factor != 1.0:
                Q = Q.copy()
                Q[4:, 4:] *= shear_factor
            D += w * Z.T @ Q @ Z
            P = theory.displacement_map(z, s["S"][j])
            mass += w * s["rho"][j] * P.T @ P
            if thermal:
                th += w * (2.0 * z / self.h) * Z.T @ (Q @ s["alpha"][j])
        self.D = 0.5 * (D + D.T)
        self.mass = 0.5 * (mass + mass.T)
        self.thermal = th if thermal else None


def _element_points(coords, n_gauss, elem_id):
    pts, wts = gauss_2d(n_gauss)
    out = []
    for (xi, eta), wt in zip(pts, wts):
        N, dx, dy, detJ = physical_gradients(coords, xi, eta, elem_id)
        out.append((N, dx, dy, wt * detJ))
    return out


def element_stiffness(coords, var, section, n_gauss=3, elem_id=None):
    """Element stiffness over the active DOFs of ``var`` (node-major)."""
    pts = _element_points(coords, n_gauss, elem_id)
    N = np.array([p[0] for p in pts])
    dx = np.array([p[1] for p in pts])
    dy = np.array([p[2] for p in pts])
    wd = np.array([p[3] for p in pts])
    B = theory.strain_operators(var, N, dx, dy)
    K = np.einsum("g,gia,ij,gjb->ab", wd, B, section.D, B, optimize=True)
    return 0.5 * (K + K.T)


def element_mass(coords, var, section, n_gauss=3, elem_id=None):
    """Consistent element mass with full inertia coupling."""
    cols = var.active
    m = section.mass[np.ix_(cols, cols)]
    na = cols.size
    M = np.zeros((8 * na, 8 * na))
    for N, _, _, wd in _element_points(coords, n_gauss, elem_id):
        M += wd * np.kron(np.outer(N, N), m)
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class LoadSpec:
    """``kind`` is ``sinusoidal``, ``uniform`` or ``thermal``.

    Mechanical amplitudes act along +z on the top surface; the thermal field
    is ``amplitude * (2z/h) * sin(pi x/a) sin(pi y/b)``.
    """

    kind: str
    amplitude: float

    def __post_init__(self):
        if self.kind not in ("sinusoidal", "uniform", "thermal"):
            raise ValueError(f"unknown load kind {self.kind!r}")
        if not np.isfinite(self.amplitude):
            raise ValueError("load amplitude must be finite")

    def surface_pattern(self, x, y, a, b):
        if self.kind == "uniform":
            return np.ones_like(np.asarray(x, dtype=float))
        return np.sin(np.pi * x / a) * np.sin(np.pi * y / b)


def load_vector(coords, var, load, section, a, b, n_gauss=3, elem_id=None):
    """Consistent element load over the active DOFs of ``var``."""
    full = np.zeros(8 * N_DOF)
    h = section.h
    pts = _element_points(coords, n_gauss, elem_id)
    if load.kind == "thermal":
        if section.thermal is None:
            raise ValueError("section was built without thermal data")
        for N, dx, dy, wd in pts:
            x, y = N @ coords
            s = load.amplitude * load.surface_pattern(x, y, a, b)
            B = theory.strain_operator(N, dx, dy)
            full += wd * s * (B.T @ section.thermal)
    else:
        # w at the top surface: w0 + (h/2) w1 + (h/2)^2 Gamma
        top = np.zeros(N_DOF)
        top[[theory.W0, theory.W1, theory.GM]] = (1.0, h / 2, h * h / 4)
        for N, _, _, wd in pts:
            x, y = N @ coords
            q = load.amplitude * load.surface_pattern(x, y, a, b)
            full += wd * q * np.kron(N, top)
    cols = theory.active_columns(var, 8)
    return full[cols]
