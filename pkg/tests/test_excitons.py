import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eetsim.excitons import (
    COUPLING_CM1,
    ExcitonGeometry,
    ExcitonSite,
    dipole_coupling,
    frenkel_hamiltonian,
)


def site(pos, dip, energy=12000.0):
    return ExcitonSite(tuple(pos), tuple(dip), energy)


class TestDipoleCoupling:
    def test_si_constant(self):
        # 1 D^2 / (4 pi eps0 nm^3) expressed in cm^-1
        assert COUPLING_CM1 == pytest.approx(5.034, rel=1e-3)

    def test_parallel_perpendicular_dipoles(self):
        a = site((0, 0, 0), (0, 0, 1))
        b = site((1, 0, 0), (0, 0, 1))
        assert dipole_coupling(a, b) == pytest.approx(COUPLING_CM1, rel=1e-12)

    def test_collinear_dipoles(self):
        a = site((0, 0, 0), (1, 0, 0))
        b = site((1, 0, 0), (1, 0, 0))
        assert dipole_coupling(a, b) == pytest.approx(-2 * COUPLING_CM1, rel=1e-12)

    def test_magic_angle_zero(self):
        c = 1 / np.sqrt(3)  # cos^2 theta = 1/3
        s = np.sqrt(1 - c * c)
        dip = (c, s, 0.0)
        a = site((0, 0, 0), dip)
        b = site((1, 0, 0), dip)
        assert dipole_coupling(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric(self):
        a = site((0, 0, 0), (0.3, 1.1, -0.2))
        b = site((0.9, -0.4, 1.3), (-0.5, 0.8, 0.1))
        assert dipole_coupling(a, b) == dipole_coupling(b, a)

    def test_coincident_sites_rejected(self):
        a = site((0, 0, 0), (0, 0, 1))
        with pytest.raises(ValueError):
            dipole_coupling(a, a)

    @given(st.floats(0.3, 5.0), st.floats(0.1, 3.0))
    @settings(max_examples=30, deadline=None)
    def test_inverse_cube_scaling(self, r, mu):
        a = site((0, 0, 0), (0, 0, mu))
        near = site((r, 0, 0), (0, 0, mu))
        far = site((2 * r, 0, 0), (0, 0, mu))
        j_near = dipole_coupling(a, near)
        j_far = dipole_coupling(a, far)
        assert j_near == pytest.approx(8 * j_far, rel=1e-12)


class TestFrenkelHamiltonian:
    def test_single_site(self):
        geom = ExcitonGeometry((site((0, 0, 0), (0, 0, 1), 12345.0),))
        h = frenkel_hamiltonian(geom)
        assert h.shape == (1, 1)
        assert h[0, 0] == 12345.0

    def test_symmetric_dimer_splitting(self):
        a = site((0, 0, 0), (0, 0, 1), 12000.0)
        b = site((1, 0, 0), (0, 0, 1), 12000.0)
        h = frenkel_hamiltonian(ExcitonGeometry((a, b)))
        j = dipole_coupling(a, b)
        assert sorted(np.linalg.eigvalsh(h)) == pytest.approx([12000.0 - j, 12000.0 + j])

    def test_trace_identity(self):
        sites = tuple(
            site((float(k), 0.2 * k, 0), (0, 0, 1), 12000.0 + 50 * k) for k in range(4)
        )
        h = frenkel_hamiltonian(ExcitonGeometry(sites))
        assert np.trace(h) == pytest.approx(sum(s.site_energy for s in sites))
        assert np.allclose(h, h.T)

    def test_clustered_chain_coupling_ordering(self):
        # end pairs packed tighter than the middle gap: J12 = J34 > J23
        sites = (
            site((0.0, 0, 0), (0, 0, 1)),
            site((1.0, 0, 0), (0, 0, 1)),
            site((2.3, 0, 0), (0, 0, 1)),
            site((3.3, 0, 0), (0, 0, 1)),
        )
        h = frenkel_hamiltonian(ExcitonGeometry(sites))
        assert h[0, 1] == pytest.approx(h[2, 3])
        assert abs(h[0, 1]) > abs(h[1, 2])

    def test_coincident_positions_rejected(self):
        with pytest.raises(ValueError):
            ExcitonGeometry((site((0, 0, 0), (0, 0, 1)), site((0, 0, 0), (0, 1, 0))))

    def test_empty_geometry_rejected(self):
        with pytest.raises(ValueError):
            ExcitonGeometry(())
