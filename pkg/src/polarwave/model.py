"""Units, constants, system parameters, photon dispersion and excitation-photon coupling.

Units throughout the package: energies in eV, lengths in Angstrom, dipoles in e*Angstrom,
times in hbar/eV. Functions accept scalars or numpy arrays for wave numbers.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import OutOfRange


@dataclass(frozen=True)
class Constants:
    hbar_c: float = 1973.269804  # eV*Angstrom
    coulomb_k: float = 14.399645  # e^2/(4 pi eps0), eV*Angstrom
    boltzmann: float = 8.617333e-5  # eV/K
    ev_to_hz: float = 2.417989e14  # Hz per eV


CONSTANTS = Constants()
HBAR_C = CONSTANTS.hbar_c
COULOMB_K = CONSTANTS.coulomb_k
BOLTZMANN = CONSTANTS.boltzmann
EV_TO_HZ = CONSTANTS.ev_to_hz

#: commonly quoted rounded fiber cutoff wave number, 1/Angstrom
ROUNDED_Q0 = 1e-3


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs of the atom chain plus waveguide.

    ``q0=None`` selects the resonant cutoff (photon at k=0 degenerate with the atom).
    ``l_fiber=None`` ties the fiber length to the lattice length ``a * n_sites``.
    """

    e_a: float = 1.0
    a: float = 5000.0
    n_sites: int = 2001
    epsilon: float = 4.0
    mu: float = 2.0
    u_b: float = 0.25
    q0: float | None = None
    l_fiber: float | None = None
    gamma_a: float = 2.15e-8
    gamma_c: float = 2.15e-10
    e_d: float | None = None

    def __post_init__(self) -> None:
        positive = {
            "e_a": self.e_a,
            "a": self.a,
            "epsilon": self.epsilon,
            "gamma_a": self.gamma_a,
            "gamma_c": self.gamma_c,
        }
        if self.q0 is not None:
            positive["q0"] = self.q0
        if self.l_fiber is not None:
            positive["l_fiber"] = self.l_fiber
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise OutOfRange(f"{name} must be finite and > 0, got {value!r}")
        for name in ("mu", "u_b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise OutOfRange(f"{name} must be finite and >= 0, got {value!r}")
        if self.e_d is not None and not (math.isfinite(self.e_d) and self.e_d >= 0):
            raise OutOfRange(f"e_d must be finite and >= 0, got {self.e_d!r}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 3 or self.n_sites % 2 == 0:
            raise OutOfRange(f"n_sites must be an odd integer >= 3, got {self.n_sites!r}")

    @property
    def cutoff(self) -> float:
        """Effective q0 in 1/Angstrom."""
        return resonant_q0(self) if self.q0 is None else self.q0

    @property
    def fiber_length(self) -> float:
        return self.a * self.n_sites if self.l_fiber is None else self.l_fiber

    @property
    def zone_edge(self) -> float:
        return math.pi / self.a

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def with_detuning(self, detuning: float, k: float = 0.0) -> "SystemParams":
        """Copy with q0 chosen so that ``E_C(k) - E_A == detuning``."""
        target = self.e_a + detuning
        q0_sq = self.epsilon * (target / HBAR_C) ** 2 - k * k
        if not (target > 0 and q0_sq > 0):
            raise OutOfRange(f"detuning {detuning!r} unreachable at k={k!r}")
        return self.replace(q0=math.sqrt(q0_sq))


def resonant_q0(p: SystemParams) -> float:
    """Cutoff that puts the k=0 photon exactly at the atomic transition."""
    return p.e_a * math.sqrt(p.epsilon) / HBAR_C


def photon_dispersion(q: ArrayLike, p: SystemParams) -> np.ndarray | float:
    """Guided photon energy ``(hbar c / sqrt(eps)) * sqrt(q0^2 + q^2)``."""
    q0 = p.cutoff
    return HBAR_C / math.sqrt(p.epsilon) * np.hypot(q0, q)


def coupling_g(k: ArrayLike, p: SystemParams) -> np.ndarray | complex:
    """Excitation-photon coupling, carrying a fixed ``-i`` phase.

    The quantisation volume ``pi a^2 * N a`` cancels the ``N`` of the collective
    excitation, leaving ``|g|^2 = E_C u^2 mu^2 * 2 coulomb_k / a^3``.
    """
    e_c = photon_dispersion(k, p)
    mag = np.sqrt(e_c * (p.u_b * p.mu) ** 2 * 2.0 * COULOMB_K / p.a**3)
    return -1j * mag


def detuning_delta(k: ArrayLike, p: SystemParams) -> np.ndarray | float:
    """Half detuning ``(E_C(k) - E_A) / 2``."""
    return 0.5 * (photon_dispersion(k, p) - p.e_a)


def rabi_d(k: ArrayLike, p: SystemParams) -> np.ndarray | float:
    """Half gap ``sqrt(delta^2 + |g|^2)`` between the two branches."""
    return np.hypot(detuning_delta(k, p), np.abs(coupling_g(k, p)))


def photon_mass_energy(p: SystemParams) -> float:
    """Confined-photon rest energy ``m_C c^2 = hbar c q0 sqrt(eps)``."""
    return HBAR_C * p.cutoff * math.sqrt(p.epsilon)
