"""Quick end-to-end check of the optomech_py bindings."""

import math

import numpy as np

import optomech_py as om


def main():
    p = om.ModelParams(g=0.0)
    assert p.g == 0.0 and p.Omega == 0.2
    space = om.HilbertSpace(3, 5)
    assert space.dims == [3, 5] and space.dim == 15

    h = np.array(om.build_model("standard", p, space))
    expected = np.diag([100.0 * n + k for n in range(3) for k in range(5)])
    assert np.array_equal(h, expected)

    p.update({"g": 0.3, "omega_m": 1.5})
    hk = np.array(om.build_model("hybrid-K", p, om.HilbertSpace(5, 3, has_qubit=True)))
    assert np.allclose(hk, np.diag(np.diag(hk)))
    assert np.allclose(np.diag(hk)[::3][:5], [-p.kerr * (n - 0.5) ** 2 for n in range(5)])

    d = np.array(om.displacement(30, 0.4 + 0.2j))
    assert np.allclose(d.conj().T @ d, np.eye(30), atol=1e-12)
    assert om.check_displacement(0.5)["passed"]

    rho0 = np.zeros((6, 6), dtype=complex)
    rho0[1, 1] = 1.0
    rho = np.array(om.damped_closed_form(rho0, 4.0, 1.0, 0.05))
    assert abs(rho[1, 1].real - math.exp(-2 * 0.05 * 4.0)) < 1e-12
    assert abs(np.trace(rho) - 1.0) < 1e-12

    report = om.verify("polaron")
    assert report["passed"], report

    cfg = {"n_cavity": 3, "n_mech": 8, "t_max": 10.0, "record_every": 250}
    cols, ok = om.evolve("lindblad-damped", "mech=fock:1", cfg)
    assert ok
    t, nb = np.array(cols["t"]), np.array(cols["n_b_re"])
    assert np.allclose(nb, np.exp(-2 * 0.05 * t), atol=1e-6)

    table, orientation = om.sidebands({"alpha_max": 1.0, "alpha_points": 2, "s_max": 1})
    alpha, s, band, mag = (np.array(table[k]) for k in ("alpha", "s", "band", "coupling_magnitude"))
    assert np.allclose(mag[(alpha == 0) & (s == 0)], 0.1)
    assert abs(mag[(alpha == 1) & (s == 0) & (band == 0)][0] - 0.1 * math.exp(-0.5)) < 1e-12
    assert len(orientation["bands"]) == 2 * 3

    print(f"optomech_py {om.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
