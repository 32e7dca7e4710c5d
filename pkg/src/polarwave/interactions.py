"""Kinematic polariton interactions and dilute-gas diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .model import BOLTZMANN, HBAR_C, SystemParams, coupling_g, detuning_delta
from .polariton import Branch, branch_amplitudes

#: lambda_dB / a at or above which the gas counts as dilute
DILUTE_RATIO = 10.0


@dataclass(frozen=True)
class InteractionParams:
    u_onsite: float
    delta_lattice: float
    m_eff: float
    l_used: float

    @classmethod
    def build(cls, p: SystemParams, m_eff: float) -> "InteractionParams":
        return cls(onsite_u(p), delta_strength(m_eff, p), m_eff, p.fiber_length)


def onsite_u(p: SystemParams) -> float:
    """Magnitude of the on-site kinematic repulsion, ``|U| = E_A``.

    The truncated paulion-to-boson mapping gives ``U = -E_A``; only ``|U|`` enters downstream.
    """
    return p.e_a


def delta_strength(m_eff: float, p: SystemParams) -> float:
    """Lattice interaction ``4 pi (hbar c)^2 / (m c^2 a L)``."""
    if not m_eff > 0:
        raise ValueError("m_eff must be > 0")
    return 4.0 * math.pi * HBAR_C**2 / (m_eff * p.a * p.fiber_length)


def scattering_length_u(m_eff: float, p: SystemParams) -> float:
    """The same strength written with the scattering length ``a``: ``4 pi (hbar c)^2 / (m c^2 a^2)``."""
    return 4.0 * math.pi * HBAR_C**2 / (m_eff * p.a**2)


def lower_x4_closed_form(k: ArrayLike, p: SystemParams) -> np.ndarray:
    """``|X^-|^4 = (D + delta)^2 / (4 D^2)``, written with the detuning and coupling directly."""
    delta = detuning_delta(k, p)
    g2 = np.abs(coupling_g(k, p)) ** 2
    d2 = delta**2 + g2
    d = np.sqrt(d2)
    # D + delta rewritten as |g|^2 / (D - delta) on the photonic side
    d_plus = np.where(delta >= 0, d + delta, g2 / (d - delta))
    return d_plus**2 / (4.0 * d2)


def effective_potential(k: ArrayLike, p: SystemParams, m_eff: float) -> np.ndarray:
    """Lower-branch contact strength ``Delta |X_k|^4``."""
    return delta_strength(m_eff, p) * lower_x4_closed_form(k, p)


def mode_interaction_v(k1: ArrayLike, k2: ArrayLike, p: SystemParams, m_eff: float) -> np.ndarray:
    """Cross-mode coupling ``hbar V = 2 Delta |X_k1|^2 |X_k2|^2`` (eV)."""
    _, x1, _ = branch_amplitudes(k1, p, Branch.LOWER)
    _, x2, _ = branch_amplitudes(k2, p, Branch.LOWER)
    return 2.0 * delta_strength(m_eff, p) * np.abs(x1) ** 2 * np.abs(x2) ** 2


def thermal_de_broglie(m_eff: float, temperature: float) -> float:
    """``sqrt(2 pi (hbar c)^2 / (m c^2 k_B T))`` in Angstrom."""
    if not (m_eff > 0 and temperature > 0):
        raise ValueError("mass and temperature must be > 0")
    return math.sqrt(2.0 * math.pi * HBAR_C**2 / (m_eff * BOLTZMANN * temperature))


def temperature_for_energy(kt: float) -> float:
    """Kelvin corresponding to a thermal energy in eV."""
    return kt / BOLTZMANN


def diluteness(lambda_db: float, p: SystemParams) -> tuple[float, bool]:
    """Ratio ``lambda_dB / a`` and whether it reaches :data:`DILUTE_RATIO`."""
    ratio = lambda_db / p.a
    return ratio, ratio >= DILUTE_RATIO


def sound_velocity(n0_over_n: float, u_bar: float, m_pol: float) -> float:
    """Bogoliubov sound speed in units of c."""
    if not 0.0 <= n0_over_n <= 1.0:
        raise ValueError("condensate fraction must lie in [0, 1]")
    if u_bar < 0:
        raise ValueError("u_bar must be >= 0")
    return math.sqrt(n0_over_n * 2.0 * u_bar / m_pol)
