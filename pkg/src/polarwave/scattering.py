"""Closed-form polariton scattering off a vacancy or an impurity atom, and two-body channels."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveK
from .model import HBAR_C, SystemParams
from .numerics import bisect_root
from .polariton import Branch, branch_amplitudes, branch_energy, branch_fractions, hopfield

log = logging.getLogger(__name__)

HARD_CORE_BETA = 1e3
WEAK_BETA = 0.05


class Regime(enum.Enum):
    HARD_CORE = "HardCore"
    WEAK = "Weak"
    INTERMEDIATE = "Intermediate"

    @classmethod
    def classify(cls, beta: float) -> "Regime":
        b = abs(beta)
        if b >= HARD_CORE_BETA:
            return cls.HARD_CORE
        if b < WEAK_BETA:
            return cls.WEAK
        return cls.INTERMEDIATE


@dataclass(frozen=True)
class ScatteringResult:
    f: complex
    reflection_prob: float
    transmission_amp: complex
    transmission_prob: float
    lambda_energy: float
    regime: Regime
    beta: float

    @classmethod
    def from_beta(cls, beta: float, lam: float) -> "ScatteringResult":
        if math.isinf(beta):
            f = -1.0 + 0j
            refl, trans = 1.0, 0.0
        else:
            f = 1j * beta / (1.0 - 1j * beta)
            refl = beta * beta / (1.0 + beta * beta)
            trans = 1.0 / (1.0 + beta * beta)
        return cls(f, refl, 1.0 + f, trans, lam, Regime.classify(beta), beta)


def lambda_energy(m_pol: float, p: SystemParams) -> float:
    """Zone kinetic scale ``(hbar c)^2 pi^2 / (2 a^2 m c^2)``."""
    if not m_pol > 0:
        raise ValueError("m_pol must be > 0")
    return HBAR_C**2 * math.pi**2 / (2.0 * p.a**2 * m_pol)


def scattering_beta(k: float, strength: float, x2: float, p: SystemParams, m_pol: float) -> float:
    """Dimensionless pole strength ``(s / Lambda) (pi^2 / 2ka) |X|^2``."""
    return strength / lambda_energy(m_pol, p) * math.pi**2 / (2.0 * k * p.a) * x2


def defect_amplitude(
    k: float,
    strength: float,
    p: SystemParams,
    m_pol: float,
    limit: bool = False,
) -> ScatteringResult:
    """Reflection amplitude ``f = i beta / (1 - i beta)`` of a single-site potential.

    ``limit=True`` returns the ``k -> 0+`` limit (``f -> -1`` for any nonzero strength) instead of
    raising :class:`NonPositiveK` for ``k <= 0``.
    """
    lam = lambda_energy(m_pol, p)
    if k <= 0:
        if not limit:
            raise NonPositiveK(f"closed form needs k > 0, got {k!r}")
        x2 = float(branch_fractions(0.0, p, Branch.LOWER)[0])
        beta = 0.0 if strength == 0 or x2 == 0 else math.copysign(math.inf, strength)
        return ScatteringResult.from_beta(beta, lam)
    x2 = float(branch_fractions(k, p, Branch.LOWER)[0])
    return ScatteringResult.from_beta(scattering_beta(k, strength, x2, p, m_pol), lam)


def impurity_amplitude(k: float, e_d: float, p: SystemParams, m_pol: float, limit: bool = False) -> ScatteringResult:
    """Scattering off a foreign atom with transition energy ``e_d``; strength is ``E_d - E_A``."""
    return defect_amplitude(k, e_d - p.e_a, p, m_pol, limit=limit)


def impurity_half_point(k: float, p: SystemParams, m_pol: float) -> float:
    """Positive level offset ``E_d - E_A`` at which ``|f|^2 = 1/2``."""
    x2 = float(branch_fractions(k, p, Branch.LOWER)[0])
    return lambda_energy(m_pol, p) * 2.0 * k * p.a / (math.pi**2 * x2)


def hardcore_reflection_transmission(k: float, p: SystemParams) -> tuple[float, float]:
    """Polariton-level reflection and transmission of an impenetrable site, ``(|X|^2, |Y|^2)``."""
    x2, y2 = branch_fractions(k, p, Branch.LOWER)
    return float(x2), float(y2)


Channel = tuple[float, Branch, float, Branch]


@dataclass(frozen=True)
class ChannelPair:
    incoming: Channel
    outgoing: tuple[Channel, ...]


def _wrapped_in_zone(k: float, p: SystemParams) -> bool:
    return abs(k) <= p.zone_edge * (1.0 + 1e-15)


def two_body_channels(
    k1: float,
    k2: float,
    parabolic: bool = True,
    p: SystemParams | None = None,
    scan_points: int = 4096,
) -> ChannelPair:
    """Elastic outgoing pairs for two lower polaritons.

    Parabolic bands admit only the forward and exchanged pairs. Otherwise energy conservation
    on the exact lower branch is solved over the exchange momentum ``kbar`` with
    ``k1' = k1 + kbar`` and ``k2' = k2 - kbar`` both kept inside the zone.
    """
    lower = Branch.LOWER
    incoming = (k1, lower, k2, lower)
    if parabolic:
        pairs = {(k1, k2), (k2, k1)}
        return ChannelPair(incoming, tuple((a, lower, b, lower) for a, b in sorted(pairs)))
    if p is None:
        raise ValueError("exact dispersion needs system parameters")
    kz = p.zone_edge
    e_in = float(branch_energy(k1, p, lower) + branch_energy(k2, p, lower))

    def mismatch(kbar: float) -> float:
        return float(branch_energy(k1 + kbar, p, lower) + branch_energy(k2 - kbar, p, lower)) - e_in

    lo = max(-kz - k1, k2 - kz)
    hi = min(kz - k1, k2 + kz)
    grid = np.linspace(lo, hi, scan_points)
    vals = branch_energy(k1 + grid, p, lower) + branch_energy(k2 - grid, p, lower) - e_in
    roots = [0.0, k2 - k1]
    for i in range(scan_points - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif (a > 0) != (b > 0) and b != 0.0:
            roots.append(bisect_root(mismatch, float(grid[i]), float(grid[i + 1])))
    found: list[tuple[float, float]] = []
    for kbar in roots:
        pair = (k1 + kbar, k2 - kbar)
        if not (_wrapped_in_zone(pair[0], p) and _wrapped_in_zone(pair[1], p)):
            continue
        if abs(mismatch(kbar)) > 1e-12 * p.e_a:
            continue
        if any(abs(pair[0] - q[0]) <= 1e-9 * kz and abs(pair[1] - q[1]) <= 1e-9 * kz for q in found):
            continue
        found.append(pair)
    found.sort()
    return ChannelPair(incoming, tuple((a, lower, b, lower) for a, b in found))


def scattering_matrix(
    k1: float,
    k2: float,
    p: SystemParams,
    branches: tuple[Branch, Branch] = (Branch.LOWER, Branch.LOWER),
) -> np.ndarray:
    """Two-body scattering matrix ``[[X1, Y2], [Y1, X2]]`` taken as written, without renormalisation."""
    _, x1, y1 = branch_amplitudes(k1, p, branches[0])
    _, x2, y2 = branch_amplitudes(k2, p, branches[1])
    m = np.array([[complex(x1), complex(y2)], [complex(y1), complex(x2)]])
    log.debug("scattering matrix unitarity defect %.3e", unitarity_defect(m))
    return m


def unitarity_defect(m: np.ndarray) -> float:
    """Frobenius norm of ``M^dagger M - 1``."""
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


def entangled_state(k1: float, k2: float, p: SystemParams) -> tuple[complex, complex, float]:
    """Forward amplitude ``Y1 Y2``, exchanged amplitude ``X1 X2`` and their summed weight."""
    lo1 = hopfield(k1, p)[1]
    lo2 = hopfield(k2, p)[1]
    fwd = lo1.y * lo2.y
    bwd = lo1.x * lo2.x
    return fwd, bwd, abs(fwd) ** 2 + abs(bwd) ** 2
