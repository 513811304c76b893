"""Frenkel-exciton side of the analogy: site geometries, dipole-dipole
couplings and the single-excitation exciton Hamiltonian.

Units here are the photosynthesis community's (cm^-1, Debye, nm) and are
deliberately kept apart from the circuit's rad/s."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.constants as const

DEBYE = 1e-21 / const.c  # one Debye in C*m

# dipole-dipole prefactor: 1 D^2 / (4 pi eps0 nm^3) expressed in cm^-1
COUPLING_CM1 = DEBYE**2 / (4 * np.pi * const.epsilon_0 * 1e-27) / (const.h * const.c * 100)


@dataclass(frozen=True)
class ExcitonSite:
    position: tuple[float, float, float]  # nm
    dipole: tuple[float, float, float]  # Debye
    site_energy: float  # cm^-1


@dataclass(frozen=True)
class ExcitonGeometry:
    sites: tuple[ExcitonSite, ...]

    def __post_init__(self):
        if not self.sites:
            raise ValueError("a geometry needs at least one site")
        pos = np.array([s.position for s in self.sites])
        for i in range(len(pos)):
            for j in range(i + 1, len(pos)):
                if np.allclose(pos[i], pos[j]):
                    raise ValueError(f"sites {i} and {j} coincide")


def dipole_coupling(site_i: ExcitonSite, site_j: ExcitonSite) -> float:
    """Point-dipole coupling in cm^-1 for positions in nm, dipoles in Debye."""
    r_vec = np.asarray(site_i.position, float) - np.asarray(site_j.position, float)
    r = np.linalg.norm(r_vec)
    if r == 0:
        raise ValueError("coincident sites")
    r_hat = r_vec / r
    mu_i = np.asarray(site_i.dipole, float)
    mu_j = np.asarray(site_j.dipole, float)
    orient = mu_i @ mu_j - 3.0 * (mu_i @ r_hat) * (mu_j @ r_hat)
    return COUPLING_CM1 * orient / r**3


def frenkel_hamiltonian(geom: ExcitonGeometry) -> np.ndarray:
    """N x N single-excitation block: site energies on the diagonal,
    dipole-dipole couplings off it (real symmetric, cm^-1)."""
    n = len(geom.sites)
    h = np.zeros((n, n))
    for i, s in enumerate(geom.sites):
        h[i, i] = s.site_energy
        for j in range(i + 1, n):
            h[i, j] = h[j, i] = dipole_coupling(s, geom.sites[j])
    return h
