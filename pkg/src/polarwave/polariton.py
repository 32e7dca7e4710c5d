"""Upper and lower polariton branches, Hopfield amplitudes and band effective mass."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from . import model
from .errors import CurvatureTooSmall, DegenerateCoupling, OutOfRange
from .model import HBAR_C, SystemParams
from .numerics import second_derivative

DEFAULT_MASS_STEP = 1e-7  # 1/Angstrom, far below q0 ~ 1e-3


class Branch(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.UPPER else -1


@dataclass(frozen=True)
class PolaritonMode:
    branch: Branch
    k: float
    energy: float
    x: complex
    y: complex

    @property
    def excitation_fraction(self) -> float:
        return abs(self.x) ** 2

    @property
    def photon_fraction(self) -> float:
        return abs(self.y) ** 2


def _fractions(delta: np.ndarray, d: np.ndarray, g_abs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (D - delta, D + delta) without cancellation."""
    g2 = g_abs * g_abs
    big = d + np.abs(delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big > 0, g2 / big, 0.0)
    d_minus = np.where(delta >= 0, small, big)
    d_plus = np.where(delta >= 0, big, small)
    return d_minus, d_plus


def branch_amplitudes(k: ArrayLike, p: SystemParams, branch: Branch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``(energy, X, Y)`` for one branch.

    ``X = +-sqrt((D -+ delta) / 2D)`` and ``Y = g / sqrt(2D (D -+ delta))``; the latter is
    evaluated as ``(g/|g|) sqrt((D +- delta) / 2D)``, identical but finite when ``D = |delta|``.
    """
    k = np.asarray(k, dtype=float)
    e_c = model.photon_dispersion(k, p)
    delta = 0.5 * (e_c - p.e_a)
    g = model.coupling_g(k, p)
    g_abs = np.abs(g)
    d = np.hypot(delta, g_abs)
    if np.any(d == 0):
        raise DegenerateCoupling("zero coupling at zero detuning: mixing undefined")
    d_minus, d_plus = _fractions(delta, d, g_abs)
    if branch is Branch.UPPER:
        x = np.sqrt(d_minus / (2 * d))
        y_mag = np.sqrt(d_plus / (2 * d))
    else:
        x = -np.sqrt(d_plus / (2 * d))
        y_mag = np.sqrt(d_minus / (2 * d))
    phase = np.where(g_abs > 0, g / np.where(g_abs > 0, g_abs, 1.0), -1j)
    energy = 0.5 * (e_c + p.e_a) + branch.sign * d
    return energy, x.astype(complex), phase * y_mag


def hopfield(k: float, p: SystemParams) -> tuple[PolaritonMode, PolaritonMode]:
    """Upper and lower polariton at wave number ``k``."""
    modes = []
    for branch in (Branch.UPPER, Branch.LOWER):
        e, x, y = branch_amplitudes(k, p, branch)
        modes.append(PolaritonMode(branch, float(k), float(e), complex(x), complex(y)))
    return modes[0], modes[1]


def branch_energy(k: ArrayLike, p: SystemParams, branch: Branch) -> np.ndarray:
    e_c = model.photon_dispersion(k, p)
    return 0.5 * (e_c + p.e_a) + branch.sign * model.rabi_d(k, p)


def branch_fractions(k: ArrayLike, p: SystemParams, branch: Branch) -> tuple[np.ndarray, np.ndarray]:
    """``(|X|^2, |Y|^2)`` as ``(D -+ delta) / 2D`` directly, without squaring a square root."""
    k = np.asarray(k, dtype=float)
    delta = model.detuning_delta(k, p)
    g_abs = np.abs(model.coupling_g(k, p))
    d = np.hypot(delta, g_abs)
    if np.any(d == 0):
        raise DegenerateCoupling("zero coupling at zero detuning: mixing undefined")
    d_minus, d_plus = _fractions(delta, d, g_abs)
    if branch is Branch.UPPER:
        return d_minus / (2 * d), d_plus / (2 * d)
    return d_plus / (2 * d), d_minus / (2 * d)


def excitation_fraction(k: ArrayLike, p: SystemParams, branch: Branch = Branch.LOWER) -> np.ndarray:
    """|X|^2 of the branch."""
    return branch_fractions(k, p, branch)[0]


def rabi_splitting(p: SystemParams) -> float:
    """Branch gap at k = 0, i.e. ``2 D_0``."""
    return float(2.0 * model.rabi_d(0.0, p))


def effective_mass(branch: Branch, k0: float, p: SystemParams, h: float = DEFAULT_MASS_STEP) -> float:
    """Band mass ``m c^2 = (hbar c)^2 / E''(k0)`` in eV."""
    if abs(k0) + 2 * h >= p.zone_edge:
        raise OutOfRange("k0 must lie inside the Brillouin zone")
    curvature = second_derivative(lambda q: float(branch_energy(q, p, branch)), k0, h)
    if abs(curvature) < 1e-30:
        raise CurvatureTooSmall(f"curvature {curvature!r} at k0={k0!r}")
    return HBAR_C**2 / curvature


def polariton_mass_at_resonance(p: SystemParams) -> float:
    """Closed-form lower-branch curvature mass at k = 0 for a resonant cutoff.

    With ``delta = 0`` at k=0, ``E_-'' = E_C''/2 - |g|''`` and ``|g| ~ sqrt(E_C)``, giving
    ``1/m = (1/(2 m_C)) (1 - |g_0| / E_C(0))``.
    """
    m_c = model.photon_mass_energy(p)
    g0 = float(np.abs(model.coupling_g(0.0, p)))
    e_c0 = float(model.photon_dispersion(0.0, p))
    return 2.0 * m_c / (1.0 - g0 / e_c0)

