from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cntplate import theory
from cntplate.assembly import assemble
from cntplate.element import LoadSpec, Section, default_shear_factor, resolve_closure, structured_mesh
from cntplate.layup import Layer, Layup
from cntplate.materials import default_library
from cntplate.postprocess import (
    DomainError,
    NondimScheme,
    ResultField,
    dimensionalize,
    nondimensionalize,
    profile_csv,
    profile_heights,
    thickness_profile,
)
from cntplate.solvers import solve_static
from conftest import make_sandwich, make_single

A = 1.0


def solve(layup, name, load=LoadSpec("sinusoidal", 1.0), n=8, closure="by-variant",
          thermal_stress="subtract"):
    var = theory.variant(name)
    sec = Section(layup, 300.0, closure=resolve_closure(closure, var),
                  thermal=load.kind == "thermal", shear_factor=default_shear_factor(var))
    system = assemble(structured_mesh(A, A, n, n), var, sec, load)
    return ResultField(system, solve_static(system).delta, load, thermal_stress)


@pytest.fixture(scope="module")
def hsdt13_field():
    return solve(make_sandwich(h=A / 5), "HSDT13")


@pytest.fixture(scope="module")
def fsdt5_field():
    return solve(make_sandwich(h=A / 5), "FSDT5")


def test_displacement_at_node_equals_nodal_expansion(hsdt13_field):
    f = hsdt13_field
    node = 17
    x, y = f.mesh.nodes[node]
    d = f.nodal[node]
    assert np.allclose(f.mid_surface(x, y)[0], d, atol=1e-15)
    lay = f.layup
    z = 0.0
    k = lay.layer_index(z)
    S = lay.zigzag(z, k)[0]
    expected = [d[0] + S * d[theory.SX], d[1] + S * d[theory.SY], d[2]]
    assert np.allclose(f.displacement_at(x, y, z), expected, rtol=1e-13, atol=1e-20)


def test_centre_deflection_is_grid_maximum(fsdt5_field):
    f = fsdt5_field
    h = f.layup.h
    grid = np.linspace(0, A, 21)
    w = np.array([[abs(f.displacement_at(x, y, h / 2)[2]) for x in grid] for y in grid])
    j, i = np.unravel_index(np.argmax(w), w.shape)
    assert (grid[i], grid[j]) == (0.5, 0.5)


def test_outside_points_raise(fsdt5_field):
    with pytest.raises(DomainError):
        fsdt5_field.displacement_at(1.5, 0.5, 0.0)
    with pytest.raises(Exception):
        fsdt5_field.displacement_at(0.5, 0.5, 1.0)
    with pytest.raises(DomainError):
        fsdt5_field.recover_transverse_shear(0.5, 0.5, 0.5)


def test_interface_needs_side(hsdt13_field):
    f = hsdt13_field
    zi = f.layup.layers[0].z_top
    with pytest.raises(ValueError, match="interface"):
        f.in_plane_stress_at(0.5, 0.5, zi)
    below = f.in_plane_stress_at(0.5, 0.5, zi, "below")[0]
    above = f.in_plane_stress_at(0.5, 0.5, zi, "above")[0]
    # stiff core against graded face: sigma_xx jumps at the interface
    assert abs(below - above) > 0.1 * abs(above)


def test_zero_solution_zero_stress():
    lay = make_sandwich()
    var = theory.variant("HSDT13")
    system = assemble(structured_mesh(A, A, 2, 2), var, Section(lay, 300.0))
    f = ResultField(system, np.zeros(system.n_eq))
    assert np.all(np.asarray(f.stress_at(0.3, 0.4, 0.02)) == 0)
    assert f.recover_transverse_shear(0.3, 0.4, 0.1) == (0.0, 0.0)


@pytest.mark.parametrize("name", ["FSDT5", "TSDT7", "HSDT13"])
def test_recovered_shear_boundary_values(name):
    f = solve(make_sandwich(h=A / 5), name)
    h = f.layup.h
    zs = np.linspace(-h / 2, h / 2, 41)
    sxz, syz = f.recover_transverse_shear(0.0, 0.5, zs)
    assert sxz[0] == 0.0 and syz[0] == 0.0
    assert abs(sxz[-1]) <= 0.02 * np.abs(sxz).max()


def test_recovered_shear_continuous_across_interfaces(hsdt13_field):
    f = hsdt13_field
    for layer in f.layup.layers[:-1]:
        zi = layer.z_top
        eps = 1e-9 * f.layup.h
        lo = f.recover_transverse_shear(0.0, 0.5, zi - eps)[0]
        hi = f.recover_transverse_shear(0.0, 0.5, zi + eps)[0]
        assert hi == pytest.approx(lo, rel=1e-6)


@dataclass(frozen=True)
class _UniformHeat:
    """Through-thickness linear temperature, uniform in the plane."""

    amplitude: float
    kind: str = "thermal"

    def surface_pattern(self, x, y, a, b):
        return 1.0


def test_free_thermal_expansion_is_stress_free():
    core = default_library().core["Ti-6Al-4V"]
    h = 0.1
    lay = Layup((Layer(-h / 2, h / 2, core=core),))
    var = theory.variant("FSDT5")
    mesh = structured_mesh(A, A, 2, 2)
    system = assemble(mesh, var, Section(lay, 300.0, closure="reduced"), apply_bc=False)
    T0 = 50.0
    kappa = core.alpha(300.0) * T0 * 2 / h
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    nodal = np.zeros((mesh.n_nodes, 13))
    nodal[:, theory.TX] = kappa * x
    nodal[:, theory.TY] = kappa * y
    nodal[:, theory.W0] = -0.5 * kappa * (x * x + y * y)
    full = nodal[:, var.active].ravel()
    f = ResultField(system, full, _UniformHeat(T0))
    for z in (-h / 2, -0.01, 0.03, h / 2):
        s = f.stress_at(0.37, 0.61, z)
        assert np.abs(s).max() <= 1e-6 * core.E(300.0) * core.alpha(300.0) * T0


def _schemes():
    return [
        NondimScheme("mechanical", 1.0, 0.1, E_ref=1.1e11, amplitude=2.0),
        NondimScheme("mechanical", 1.0, 0.1, E_ref=1.1e11, amplitude=2.0, convention="printed"),
        NondimScheme("thermal", 2.0, 0.2, E_ref=1.1e11, alpha_ref=8e-6, amplitude=3.0),
    ]


@settings(max_examples=50, deadline=None)
@given(raw=st.floats(-1e3, 1e3), q=st.sampled_from(["u", "v", "w", "sxx", "sxz"]),
       i=st.integers(0, 2))
def test_nondim_inverse_and_linearity(raw, q, i):
    s = _schemes()[i]
    back = dimensionalize(nondimensionalize(raw, s, q), s, q)
    assert back == pytest.approx(raw, rel=1e-12, abs=1e-300)
    assert nondimensionalize(2 * raw, s, q) == pytest.approx(2 * nondimensionalize(raw, s, q))
    assert nondimensionalize(0.0, s, q) == 0.0


@settings(max_examples=30, deadline=None)
@given(values=st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30))
def test_nondim_preserves_argmax(values):
    s = _schemes()[0]
    arr = np.array(values)
    assert np.argmax(nondimensionalize(arr, s, "w")) == np.argmax(arr)


def test_nondim_exact_scalings():
    mech = NondimScheme("mechanical", 1.0, 0.1, E_ref=2.0, amplitude=4.0)
    S = 10.0
    assert mech.factor("w") == pytest.approx(2.0 / (4.0 * 0.1 * S ** 4))
    assert mech.factor("u") == pytest.approx(10 * 2.0 / (4.0 * 0.1 * S ** 3))
    printed = NondimScheme("mechanical", 1.0, 0.1, E_ref=2.0, amplitude=4.0, convention="printed")
    assert printed.factor("w") == pytest.approx(100 * mech.factor("w"))
    assert mech.factor("sxx") == pytest.approx(1 / (4.0 * S * S))
    assert mech.factor("sxz") == pytest.approx(1 / (4.0 * S))
    th = NondimScheme("thermal", 1.0, 0.1, E_ref=2.0, alpha_ref=1e-5, amplitude=3.0)
    assert th.factor("w") == pytest.approx(1 / (1e-5 * 3.0 * 0.1 * S * S))
    assert th.factor("sxz") == pytest.approx(1 / (10 * 2.0 * 1e-5 * 3.0))


def test_frequency_inversion():
    E, rho, a, h = 7.0e10, 2700.0, 1.0, 0.05
    s = NondimScheme("frequency", a, h, E_ref=E, rho_ref=rho)
    omega = np.sqrt(E / rho) * h / a ** 2
    assert omega * s.factor("omega") == pytest.approx(1.0)
    with pytest.raises(ValueError):
        s.factor("w")


def test_zero_amplitude_rejected():
    with pytest.raises(ValueError):
        NondimScheme("mechanical", 1.0, 0.1, E_ref=1.0, amplitude=0.0)
    with pytest.raises(ValueError):
        NondimScheme("acoustic", 1.0, 0.1)


def test_profile_heights_cover_interfaces(sandwich):
    rows = profile_heights(sandwich, 5)
    assert len(rows) == 15
    sides = [s for _, s in rows]
    assert sides.count("above") == 2 and sides.count("below") == 2
    zs = [z for z, _ in rows]
    assert zs == sorted(zs)
    with pytest.raises(ValueError):
        profile_heights(sandwich, 1)


def test_fsdt_w_profile_constant(fsdt5_field):
    rows = thickness_profile(fsdt5_field, 0.5, 0.5, "w", 7)
    w = np.array([v for _, _, v in rows])
    assert np.ptp(w) <= 1e-14 * np.abs(w).max()


def _one_sided_slopes(field, x, y, zi, dz):
    u = lambda z, s=None: field.displacement_at(x, y, z, s)[0]  # noqa: E731
    below = (u(zi, "below") - u(zi - dz)) / dz
    above = (u(zi + dz) - u(zi, "above")) / dz
    return below, above


def test_hsdt13_u_profile_kinks_at_interfaces():
    f = solve(make_sandwich(h=A / 5, core_to_face=2.0), "HSDT13")
    h = f.layup.h
    for layer in f.layup.layers[:-1]:
        below, above = _one_sided_slopes(f, 0.0, 0.5, layer.z_top, 1e-6 * h)
        assert abs(above - below) > 1e-3 * max(abs(above), abs(below))
    # the continuous-slope variants show no kink
    g = solve(make_sandwich(h=A / 5, core_to_face=2.0), "HSDT11B")
    zi = g.layup.layers[0].z_top
    below, above = _one_sided_slopes(g, 0.0, 0.5, zi, 1e-7 * h)
    assert abs(above - below) <= 1e-4 * abs(above)


@pytest.mark.parametrize("grading", ["UD", "FG-X"])
def test_single_layer_w_profile_symmetric(grading):
    lay = make_single(grading, h=A / 20)
    f = solve(lay, "HSDT11B", load=LoadSpec("uniform", -1e5), closure="by-variant")
    h = lay.h
    zs = np.linspace(0, h / 2, 6)
    w_top = np.array([f.displacement_at(0.5, 0.5, z)[2] for z in zs])
    w_bot = np.array([f.displacement_at(0.5, 0.5, -z)[2] for z in zs])
    assert np.abs(w_top - w_bot).max() <= 1e-3 * np.abs(w_top).max()


def test_profile_csv_format(fsdt5_field):
    rows = thickness_profile(fsdt5_field, 0.5, 0.5, "sxx", 3)
    text = profile_csv(rows, "sxx", "tables")
    lines = text.splitlines()
    assert lines[0] == "z,side,sxx[tables]"
    assert len(lines) == 1 + 9
    assert "below" in text and "above" in text
    with pytest.raises(ValueError):
        thickness_profile(fsdt5_field, 0.5, 0.5, "tau", 3)


def test_thermal_stress_modes_differ():
    lay = make_sandwich(h=A / 10)
    load = LoadSpec("thermal", 1.0)
    sub = solve(lay, "FSDT5", load=load, thermal_stress="subtract")
    ret = solve(lay, "FSDT5", load=load, thermal_stress="retain")
    z = lay.h / 2
    mp = lay.material_point(z, 300.0)
    Q = np.linalg.inv(np.array([[1 / mp.E11, -mp.nu21 / mp.E22], [-mp.nu12 / mp.E11, 1 / mp.E22]]))
    dT = load.surface_pattern(0.5, 0.5, A, A) * 1.0
    expected = Q @ np.array([mp.alpha11, mp.alpha22]) * dT
    diff = np.array(ret.in_plane_stress_at(0.5, 0.5, z)[:2]) - np.array(sub.in_plane_stress_at(0.5, 0.5, z)[:2])
    assert np.allclose(diff, expected, rtol=1e-10)
    with pytest.raises(ValueError):
        ResultField(sub.system, np.zeros(sub.system.n_eq), load, "ignore")
