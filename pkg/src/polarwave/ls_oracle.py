"""Discrete Lippmann-Schwinger solver for a single-site potential in the atom chain.

This is the numerical cross-check of the closed-form amplitude in :mod:`polarwave.scattering`.
The lattice Green function

    G(z) = (a / 2 pi) sum_j w_j(z) W(k_j) / (E(k) - E(k_j) + i eta)

is summed over a k' grid that is graded (sinh map) around the two on-shell points, with
weights ``w_j(z)`` that integrate a piecewise-linear integrand against ``exp(i k' z)`` exactly
(Filon).  The site potential enters through the closed self-consistency

    psi_0 = phi_0 / (1 - U G(0)),   psi_n = phi_n + U G(z_n) psi_0,

and the reflection amplitude is fitted on the incoming side, ``|n|`` in ``[N/4, N/2]``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import GridTooCoarse, NoConvergence, OutOfRange
from .model import HBAR_C, SystemParams
from .polariton import Branch, branch_amplitudes, branch_energy

log = logging.getLogger(__name__)

_SERIES_TERMS = 12
_SERIES_CUTOFF = 0.2
_ROW_CHUNK = 128
#: smallest allowed |reflected basis| / |incident| anywhere in the fit window
MIN_ATTENUATION = 0.5


@dataclass(frozen=True)
class LatticeScatterSetup:
    """Knobs of the discrete solver.

    eta:
        Regulator in eV. ``None`` picks ``eta_factor`` times the mean level spacing within ten
        grid steps of the on-shell node.
    weights:
        ``"on_shell"`` holds the excitation weight at its on-shell value ``|X_k|^2``;
        ``"hopfield"`` uses ``|X_k'|^2`` node by node.
    dispersion:
        ``"parabolic"`` uses ``hbar^2 k^2 / 2m`` with the supplied mass; ``"exact"`` uses the
        lower branch itself.
    grading:
        Width parameter of the sinh map, ``ell = k / grading``; larger values concentrate nodes
        harder around the on-shell point.
    """

    n_grid: int = 4096
    potential_site_strength: float = 1.0
    eta: float | None = None
    eta_factor: float = 5.0
    lower_only: bool = True
    weights: str = "on_shell"
    dispersion: str = "parabolic"
    grading: float = 5.0
    window: tuple[float, float] = (0.25, 0.5)

    def __post_init__(self) -> None:
        if self.n_grid < 256:
            raise OutOfRange("n_grid must be >= 256")
        if self.eta is not None and not self.eta > 0:
            raise OutOfRange("eta must be > 0")
        if self.weights not in ("on_shell", "hopfield"):
            raise OutOfRange(f"unknown weights {self.weights!r}")
        if self.dispersion not in ("parabolic", "exact"):
            raise OutOfRange(f"unknown dispersion {self.dispersion!r}")
        if not self.grading > 0:
            raise OutOfRange("grading must be > 0")
        lo, hi = self.window
        if not 0 <= lo < hi <= 0.5:
            raise OutOfRange("window must satisfy 0 <= lo < hi <= 0.5")


@dataclass(frozen=True)
class LatticeSolution:
    sites: np.ndarray
    psi: np.ndarray
    f: complex
    eta: float
    residual: float
    green_origin: complex


@dataclass(frozen=True)
class LatticeGreen:
    """Strength-independent part of the solve: Green function on every site plus fit data."""

    sites: np.ndarray
    green: np.ndarray
    phi: np.ndarray
    fit_mask: np.ndarray
    basis: np.ndarray
    eta: float

    @property
    def origin(self) -> complex:
        return complex(self.green[len(self.sites) // 2])

    def solve(self, strength: float) -> LatticeSolution:
        """Scattering state for a site potential of ``-strength`` at the origin.

        The sign makes the fitted amplitude carry the same phase as the closed form
        ``i beta / (1 - i beta)``; reflection probabilities depend on ``strength^2`` only.
        """
        u_site = -strength
        attenuation = float(np.min(np.abs(self.basis)) / abs(self.phi[0]))
        if attenuation < MIN_ATTENUATION:
            # the fit would extrapolate a wave that has all but died out across the window
            raise NoConvergence("regulator damps the reflected wave across the fit window", 1.0 - attenuation)
        centre = len(self.sites) // 2
        g00 = self.origin
        psi = self.phi + u_site * self.green * self.phi[centre] / (1.0 - u_site * g00)
        scattered = psi[self.fit_mask] - self.phi[self.fit_mask]
        basis = self.basis
        f = complex(np.vdot(basis, scattered) / np.vdot(basis, basis))
        residual = float(np.linalg.norm(scattered - f * basis) / np.linalg.norm(self.phi[self.fit_mask]))
        if residual > 1e-2:
            raise NoConvergence("asymptotic fit does not match a reflected plane wave", residual)
        log.debug("ls solve eta=%.3e f=%s residual=%.2e", self.eta, f, residual)
        return LatticeSolution(self.sites, psi, f, self.eta, residual, g00)


def graded_grid(k: float, n_grid: int, zone_edge: float, grading: float) -> np.ndarray:
    """Symmetric k' nodes on ``[-K, K]`` that contain ``+-k`` and cluster around them."""
    n_half = n_grid // 2
    ell = k / grading
    u_lo = math.asinh(-k / ell)
    u_hi = math.asinh((zone_edge - k) / ell)
    du = (u_hi - u_lo) / (n_half - 1)
    j0 = int(round(u_lo / du))
    u = (j0 + np.arange(n_half)) * du
    kp = k + ell * np.sinh(u)
    kp = kp[(kp > 0) & (kp < zone_edge)]
    return np.concatenate([[-zone_edge], -kp[::-1], kp, [zone_edge]])


def _odd_kernel(x: np.ndarray) -> np.ndarray:
    """``(sin x - x cos x) / x^2``, with a Taylor branch where the difference cancels."""
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_CUTOFF
    big = ~small
    xb = x[big]
    out[big] = (np.sin(xb) - xb * np.cos(xb)) / (xb * xb)
    xs = x[small]
    x2 = xs * xs
    acc = np.zeros_like(xs)
    for n in range(_SERIES_TERMS, 0, -1):
        acc = acc * x2 + (-1) ** (n + 1) * 2 * n / factorial(2 * n + 1)
    out[small] = acc * xs
    return out


def _cell_terms(z: np.ndarray, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-cell factors of the exact linear-interpolant integral.

    With midpoint ``c`` and half width ``x = z h / 2`` the cell integral of ``F`` times
    ``exp(i k z)`` is ``h exp(i z c) [sinc(x) (F_l + F_r)/2 + (i/2) j(x) (F_r - F_l)]``.
    """
    h = np.diff(nodes)
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    x = 0.5 * np.outer(z, h)
    phase = np.exp(1j * np.outer(z, mid))
    return phase, np.sinc(x / math.pi), _odd_kernel(x)


def filon_weights(nodes: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Matrix ``W[i, j]`` with ``sum_j W[i, j] F_j`` the exact integral of the linear interpolant
    of ``F`` times ``exp(i k z_i)`` over ``[nodes[0], nodes[-1]]``. At ``z = 0`` this is the
    trapezoid rule."""
    h = np.diff(nodes)
    phase, even, odd = _cell_terms(np.asarray(z, dtype=float), nodes)
    w = np.zeros((len(z), len(nodes)), dtype=complex)
    w[:, :-1] += phase * h * (0.5 * even - 0.5j * odd)
    w[:, 1:] += phase * h * (0.5 * even + 0.5j * odd)
    return w


def _green(nodes: np.ndarray, z: np.ndarray, integrand: np.ndarray) -> np.ndarray:
    h = np.diff(nodes)
    mean = 0.5 * h * (integrand[1:] + integrand[:-1])
    half_diff = 0.5j * h * (integrand[1:] - integrand[:-1])
    out = np.empty(len(z), dtype=complex)
    for start in range(0, len(z), _ROW_CHUNK):
        phase, even, odd = _cell_terms(z[start : start + _ROW_CHUNK], nodes)
        out[start : start + _ROW_CHUNK] = np.sum(phase * (even * mean + odd * half_diff), axis=1)
    return out


def _regulator(energies: np.ndarray, i_on: int, setup: LatticeScatterSetup) -> float:
    if setup.eta is not None:
        return setup.eta
    lo, hi = max(i_on - 10, 0), min(i_on + 11, len(energies))
    spacing = float(np.mean(np.abs(np.diff(energies[lo:hi]))))
    return setup.eta_factor * spacing


def lattice_green(k: float, setup: LatticeScatterSetup, p: SystemParams, m_pol: float) -> LatticeGreen:
    """Assemble the regulated Green function ``G(z_n, 0)`` on all sites for incidence at ``k``."""
    if not 0 < k < p.zone_edge:
        raise OutOfRange("k must lie in (0, pi/a)")
    hc2 = HBAR_C**2
    nodes = graded_grid(k, setup.n_grid, p.zone_edge, setup.grading)
    i_on = int(np.argmin(np.abs(nodes - k)))

    if setup.dispersion == "parabolic":
        def band(q):
            return hc2 * np.asarray(q) ** 2 / (2.0 * m_pol)
    else:
        def band(q):
            return branch_energy(q, p, Branch.LOWER)

    e_nodes = np.asarray(band(nodes), dtype=float)
    e_on = float(band(k))
    eta = _regulator(e_nodes, i_on, setup)
    under = int(np.count_nonzero(np.abs(e_nodes - e_on) <= eta) // 2)
    if under < 8:
        raise GridTooCoarse(f"only {under} nodes inside the regulated resonance (eta={eta:.3e} eV)")

    x_on = complex(branch_amplitudes(k, p, Branch.LOWER)[1])
    if setup.weights == "on_shell":
        weight = np.full(nodes.shape, abs(x_on) ** 2)
    else:
        weight = np.abs(branch_amplitudes(nodes, p, Branch.LOWER)[1]) ** 2
    integrand = (p.a / (2.0 * math.pi)) * weight / (e_on - e_nodes + 1j * eta)
    if not setup.lower_only:
        e_up, x_up, _ = branch_amplitudes(nodes, p, Branch.UPPER)
        e_ref = float(branch_energy(k, p, Branch.LOWER)) if setup.dispersion == "parabolic" else e_on
        integrand = integrand + (p.a / (2.0 * math.pi)) * np.abs(x_up) ** 2 / (e_ref - e_up + 1j * eta)

    m = p.n_sites // 2
    sites = np.arange(-m, m + 1)
    # nodes and integrand are even in k', so G(-z) = G(z)
    g_pos = _green(nodes, np.arange(0, m + 1) * p.a, integrand)
    green = np.concatenate([g_pos[:0:-1], g_pos])

    z = sites * p.a
    amp = x_on / math.sqrt(p.n_sites)
    phi = amp * np.exp(1j * k * z)
    lo, hi = setup.window
    n_abs = np.abs(sites)
    mask = (sites < 0) & (n_abs >= lo * p.n_sites) & (n_abs <= hi * p.n_sites)
    if np.count_nonzero(mask) < 4:
        raise OutOfRange("fit window holds fewer than four sites")
    if setup.dispersion == "parabolic":
        kappa = np.sqrt(k * k + 2j * m_pol * eta / hc2)
    else:
        slope = float((band(k * (1 + 1e-4)) - band(k * (1 - 1e-4))) / (2e-4 * k))
        kappa = k + 1j * eta / slope
    # the regulator damps the reflected wave: exp(-i kappa z) with Im kappa > 0 decays as z -> -inf
    basis = amp * np.exp(-1j * kappa * z[mask])
    return LatticeGreen(sites, green, phi, mask, basis, eta)


def ls_solve(k: float, setup: LatticeScatterSetup, p: SystemParams, m_pol: float) -> LatticeSolution:
    """Scattering state on every site and the fitted reflection amplitude."""
    return lattice_green(k, setup, p, m_pol).solve(setup.potential_site_strength)
