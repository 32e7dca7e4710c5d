"""Driven-dissipative two-mode mean-field dynamics and steady states.

Time is measured in hbar/eV, so every rate below is an energy (eV). The rotating-frame
amplitudes obey

    i dA_1/dt = (Omega_1 - omega_1 - i Gamma_1 + V |A_2|^2) A_1 + F_1

and the same with 1 <-> 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .errors import DegenerateLeadingCoefficient, NoConvergence, OutOfRange
from .interactions import delta_strength, mode_interaction_v
from .model import SystemParams
from .numerics import OdeState, bisect_root, cubic_real_roots, damped_fixed_point, rk4_evolve
from .polariton import Branch, branch_amplitudes, branch_energy
from .table import SweepTable


def polariton_damping(k: ArrayLike, branch: Branch, p: SystemParams) -> np.ndarray:
    """``(Gamma_A / 2) |X|^2 + (Gamma_C / 2) |Y|^2`` in eV."""
    _, x, y = branch_amplitudes(k, p, branch)
    return 0.5 * p.gamma_a * np.abs(x) ** 2 + 0.5 * p.gamma_c * np.abs(y) ** 2


@dataclass(frozen=True)
class DriveSpec:
    """Two external drives; ``f`` is the effective drive ``hbar F`` in eV.

    When a classical field ``script_f`` and mirror coupling ``gamma_mirror`` are given instead,
    the drive is ``gamma * conj(Y) * script_f`` on the lower branch.
    """

    k1: float
    k2: float
    omega1: float
    omega2: float
    f1: complex | None = None
    f2: complex | None = None
    gamma_mirror: float | None = None
    script_f1: complex | None = None
    script_f2: complex | None = None

    def __post_init__(self) -> None:
        for f, sf, name in ((self.f1, self.script_f1, "1"), (self.f2, self.script_f2, "2")):
            if f is None and (sf is None or self.gamma_mirror is None):
                raise OutOfRange(f"mode {name} needs a drive amplitude or a classical field")

    def amplitudes(self, p: SystemParams) -> tuple[complex, complex]:
        out = []
        for f, sf, k in ((self.f1, self.script_f1, self.k1), (self.f2, self.script_f2, self.k2)):
            if f is not None:
                out.append(complex(f))
            else:
                y = complex(branch_amplitudes(k, p, Branch.LOWER)[2])
                out.append(self.gamma_mirror * y.conjugate() * complex(sf))
        return out[0], out[1]


@dataclass(frozen=True)
class TwoModeState:
    a1: complex
    a2: complex

    @property
    def n1(self) -> float:
        return abs(self.a1) ** 2

    @property
    def n2(self) -> float:
        return abs(self.a2) ** 2

    @property
    def occupations(self) -> np.ndarray:
        return np.array([self.n1, self.n2])


@dataclass(frozen=True)
class TwoModeProblem:
    """Everything the two-mode equations need.

    detuning:
        ``Omega_i - omega_i``, polariton energy minus drive energy.
    """

    f: tuple[complex, complex]
    detuning: tuple[float, float]
    gamma: tuple[float, float]
    v: float
    _arrays: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not all(g > 0 for g in self.gamma):
            raise OutOfRange("damping rates must be > 0")
        self._arrays["f"] = np.asarray(self.f, dtype=complex)
        self._arrays["det"] = np.asarray(self.detuning, dtype=float)
        self._arrays["gam"] = np.asarray(self.gamma, dtype=float)

    @classmethod
    def from_drive(cls, drive: DriveSpec, p: SystemParams, m_eff: float) -> "TwoModeProblem":
        big_omega = branch_energy(np.array([drive.k1, drive.k2]), p, Branch.LOWER)
        det = (float(big_omega[0] - drive.omega1), float(big_omega[1] - drive.omega2))
        gam = polariton_damping(np.array([drive.k1, drive.k2]), Branch.LOWER, p)
        v = float(mode_interaction_v(drive.k1, drive.k2, p, m_eff))
        return cls(drive.amplitudes(p), det, (float(gam[0]), float(gam[1])), v)

    @property
    def powers(self) -> np.ndarray:
        return np.abs(self._arrays["f"]) ** 2

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        return eom_rhs(y, self._arrays["f"], self.v, self._arrays["det"], self._arrays["gam"])

    def occupation_map(self, n: np.ndarray) -> np.ndarray:
        """Right-hand side of the steady-state occupation pair."""
        det, gam, pw = self._arrays["det"], self._arrays["gam"], self.powers
        shifted = det + self.v * n[::-1]
        return pw / (shifted**2 + gam**2)

    def amplitudes_for(self, n: np.ndarray) -> TwoModeState:
        det, gam, f = self._arrays["det"], self._arrays["gam"], self._arrays["f"]
        a = -f / (det + self.v * n[::-1] - 1j * gam)
        return TwoModeState(complex(a[0]), complex(a[1]))

    def residual(self, n: np.ndarray) -> float:
        """Relative mismatch of the steady-state occupation equations."""
        g = self.occupation_map(np.asarray(n, dtype=float))
        return float(np.max(np.abs(g - n) / np.maximum(np.abs(n), 1e-300)))

    def jacobian(self, state: TwoModeState) -> np.ndarray:
        """Linearised flow in the coordinates ``(A1, A1*, A2, A2*)``."""
        a1, a2 = state.a1, state.a2
        det, gam = self._arrays["det"], self._arrays["gam"]
        v = self.v
        d1 = -1j * (det[0] - 1j * gam[0] + v * abs(a2) ** 2)
        d2 = -1j * (det[1] - 1j * gam[1] + v * abs(a1) ** 2)
        c12, c12s = -1j * v * a1 * a2.conjugate(), -1j * v * a1 * a2
        c21, c21s = -1j * v * a2 * a1.conjugate(), -1j * v * a2 * a1
        return np.array(
            [
                [d1, 0, c12, c12s],
                [0, d1.conjugate(), c12s.conjugate(), c12.conjugate()],
                [c21, c21s, d2, 0],
                [c21s.conjugate(), c21.conjugate(), 0, d2.conjugate()],
            ],
            dtype=complex,
        )

    def symmetric_jacobian(self, state: TwoModeState) -> np.ndarray:
        """Linearised flow restricted to ``A1 = A2`` perturbations, coordinates ``(A, A*)``."""
        a = state.a1
        det, gam = self._arrays["det"][0], self._arrays["gam"][0]
        diag = -1j * (det - 1j * gam + 2.0 * self.v * abs(a) ** 2)
        off = -1j * self.v * a * a
        return np.array([[diag, off], [off.conjugate(), diag.conjugate()]], dtype=complex)

    def is_linearly_stable(self, state: TwoModeState, symmetric: bool = False) -> bool:
        """All eigenvalue real parts <= 0 (up to round-off on the scale of the damping)."""
        jac = self.symmetric_jacobian(state) if symmetric else self.jacobian(state)
        eig = np.linalg.eigvals(jac)
        return bool(np.all(eig.real <= 1e-9 * max(self._arrays["gam"])))

    def rate_scale(self, n: np.ndarray) -> float:
        """Largest rate in the linearised flow, used to size RK4 steps.

        Occupations are floored at ``|F|^2 / Gamma^2``, which bounds any trajectory that starts
        inside that ball, so one step size stays stable while the state grows.
        """
        det, gam = self._arrays["det"], self._arrays["gam"]
        n = np.maximum(n, self.powers / gam**2)
        shifted = np.abs(det + self.v * n[::-1]) + gam
        return float(np.max(shifted) + 2.0 * self.v * math.sqrt(n[0] * n[1]))


def eom_rhs(y: np.ndarray, f: np.ndarray, v: float, detuning: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """``dA/dt`` for the rotating-frame amplitudes ``y = (A1, A2)``; arrays broadcast over draws."""
    n_other = np.abs(y[::-1]) ** 2 if y.ndim == 1 else np.abs(y[..., ::-1]) ** 2
    return -1j * ((detuning - 1j * gamma + v * n_other) * y + f)


def rk4_relax(
    problem: TwoModeProblem,
    y0: np.ndarray | None = None,
    step_fraction: float = 0.5,
    tol: float = 1e-12,
    max_damping_times: float = 5000.0,
) -> TwoModeState:
    """Evolve the equations of motion in real time until the occupations stop changing.

    Integration proceeds in chunks of two damping times with a fixed step
    ``step_fraction / rate``. A stationary point of the flow is also a fixed point of every RK4
    step, so the step only has to be stable, not accurate. The remaining distance to the limit
    is estimated from the geometric decay of successive chunk changes, which matters near a fold
    where the slowest mode relaxes much more slowly than the damping.
    """
    y = np.zeros(2, dtype=complex) if y0 is None else np.asarray(y0, dtype=complex)
    gmin = min(problem.gamma)
    chunk = 2.0 / gmin
    t = 0.0
    n_prev = np.abs(y) ** 2
    change_prev = math.inf
    remaining = math.inf
    while t < max_damping_times / gmin:
        rate = problem.rate_scale(np.abs(y) ** 2)
        state = rk4_evolve(problem.rhs, OdeState(t, y), t + chunk, step_fraction / rate)
        t, y = state.t, state.y
        n = np.abs(y) ** 2
        change = float(np.max(np.abs(n - n_prev) / np.maximum(n, 1e-300)))
        ratio = change / change_prev if change_prev > 0 else 0.0
        remaining = change * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        n_prev, change_prev = n, change
        if change == 0.0 or (change <= tol and remaining <= tol):
            return TwoModeState(complex(y[0]), complex(y[1]))
    raise NoConvergence("real-time relaxation did not settle", min(remaining, change))


def coupled_roots(problem: TwoModeProblem, samples: int = 4000) -> list[np.ndarray]:
    """All occupation pairs solving the steady-state equations, via the scalar reduction in N1."""
    pw = problem.powers
    if pw[0] == 0.0:
        n2 = problem.occupation_map(np.zeros(2))[1]
        return [np.array([0.0, n2])]
    n_max = pw[0] / problem.gamma[0] ** 2

    def mismatch(n1: float) -> float:
        n2 = problem.occupation_map(np.array([n1, 0.0]))[1]
        return float(problem.occupation_map(np.array([0.0, n2]))[0] - n1)

    n_min = max(n_max * 1e-16, min(n_max, float(np.finfo(float).tiny)))
    grid = np.concatenate([[0.0], np.geomspace(n_min, n_max, samples)])
    vals = np.array([mismatch(x) for x in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif (vals[i] > 0) != (vals[i + 1] > 0) and vals[i + 1] != 0.0:
            roots.append(bisect_root(mismatch, float(grid[i]), float(grid[i + 1]), rtol=1e-15))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    out = []
    for n1 in roots:
        n2 = problem.occupation_map(np.array([n1, 0.0]))[1]
        out.append(np.array([n1, n2]))
    return out


def solve_occupations(problem: TwoModeProblem, damping: float = 0.5, tol: float = 1e-14) -> np.ndarray:
    """Algebraic steady state: damped fixed point from (0, 0), then a bracketed scalar solve."""
    try:
        return damped_fixed_point(problem.occupation_map, np.zeros(2), damping=damping, max_iter=20_000, tol=tol)
    except NoConvergence:
        roots = coupled_roots(problem)
        if not roots:
            raise
        return roots[0]


def steady_state_coupled(problem: TwoModeProblem) -> TwoModeState:
    """Steady amplitudes with their phases; real-time relaxation is the last resort."""
    try:
        n = solve_occupations(problem)
    except NoConvergence as first:
        try:
            return rk4_relax(problem)
        except NoConvergence as second:
            raise NoConvergence("algebraic and real-time solvers both failed", min(first.residual, second.residual))
    return problem.amplitudes_for(n)


def probe_spectrum(
    omega_grid: ArrayLike,
    n_pump: float,
    v: float,
    gamma2: float,
    probe_power: float = 1.0,
) -> SweepTable:
    """Probe occupation versus ``omega - Omega_2`` without and with a fixed pump occupation."""
    if n_pump < 0:
        raise OutOfRange("pump occupation must be >= 0")
    w = np.asarray(omega_grid, dtype=float)
    free = probe_power / (w**2 + gamma2**2)
    pumped = probe_power / ((w - v * n_pump) ** 2 + gamma2**2)
    return SweepTable.from_columns({"omega_minus_omega2": w, "n_probe_no_pump": free, "n_probe_pump": pumped})


def symmetric_pump(drive_power: float, v: float, gamma: float) -> tuple[float, ...]:
    """Non-negative roots of ``N (Gamma^2 + V^2 N^2) = |F|^2``."""
    if v == 0.0:
        return (drive_power / gamma**2,)
    try:
        roots = cubic_real_roots(v * v, 0.0, gamma * gamma, -drive_power).roots
    except DegenerateLeadingCoefficient:
        return (drive_power / gamma**2,)
    return tuple(float(r) for r in roots if r >= 0.0)


def bistability_power(n: ArrayLike, delta_bar: float, v: float, gamma: float) -> np.ndarray:
    """Drive power that sustains occupation ``n``: ``N [(delta - V N)^2 + Gamma^2]``."""
    n = np.asarray(n, dtype=float)
    return n * ((delta_bar - v * n) ** 2 + gamma**2)


def bistability_slope(n: ArrayLike, delta_bar: float, v: float, gamma: float) -> np.ndarray:
    """``d|F|^2 / dN``; its sign is the sign of ``dN / d|F|^2``."""
    n = np.asarray(n, dtype=float)
    return 3 * v * v * n * n - 4 * delta_bar * v * n + delta_bar**2 + gamma**2


def bistability_window(delta_bar: float, v: float, gamma: float) -> tuple[float, float, float, float] | None:
    """Turning points ``(N_lo, N_hi)`` and the powers ``(P(N_hi), P(N_lo))`` bounding the three-root band.

    Returns ``(n_lo, n_hi, power_lo, power_hi)`` or ``None`` when ``delta^2 <= 3 Gamma^2``.
    """
    disc = delta_bar**2 - 3.0 * gamma**2
    if v == 0.0 or disc <= 0.0 or delta_bar * v <= 0.0:
        return None
    root = math.sqrt(disc)
    n_lo = (2.0 * delta_bar - math.copysign(root, v)) / (3.0 * v)
    n_hi = (2.0 * delta_bar + math.copysign(root, v)) / (3.0 * v)
    p_at_lo = float(bistability_power(n_lo, delta_bar, v, gamma))
    p_at_hi = float(bistability_power(n_hi, delta_bar, v, gamma))
    return n_lo, n_hi, p_at_hi, p_at_lo


@dataclass(frozen=True)
class BistabilityBranch:
    """Roots at one drive power with three stability verdicts per root.

    stability:
        slope rule, stable when ``dN/d|F|^2 > 0``.
    stability_linear:
        eigenvalues of the equations of motion linearised within the symmetric sector.
    stability_two_mode:
        eigenvalues of the full two-mode linearisation, which also probes ``A1 = -A2``
        perturbations.
    """

    drive_power: float
    occupations: tuple[float, ...]
    stability: tuple[bool, ...]
    stability_linear: tuple[bool, ...]
    stability_two_mode: tuple[bool, ...]


def symmetric_problem(drive_power: float, delta_bar: float, v: float, gamma: float) -> TwoModeProblem:
    """Two identical counter-propagating drives at ``omega - Omega = delta_bar``."""
    f = math.sqrt(drive_power)
    return TwoModeProblem((f, f), (-delta_bar, -delta_bar), (gamma, gamma), v)


def bistability_sweep(delta_bar: float, v: float, gamma: float, power_grid: ArrayLike) -> list[BistabilityBranch]:
    out = []
    for power in np.asarray(power_grid, dtype=float):
        if not power > 0:
            raise OutOfRange("drive powers must be > 0")
        if v == 0.0:
            roots: tuple[float, ...] = (power / (delta_bar**2 + gamma**2),)
        else:
            c = cubic_real_roots(v * v, -2.0 * delta_bar * v, delta_bar**2 + gamma**2, -power)
            roots = tuple(float(r) for r in c.roots if r > 0.0)
        slope = tuple(bool(s > 0) for s in bistability_slope(np.array(roots), delta_bar, v, gamma))
        problem = symmetric_problem(power, delta_bar, v, gamma)
        states = [problem.amplitudes_for(np.array([n, n])) for n in roots]
        sym = tuple(problem.is_linearly_stable(st, symmetric=True) for st in states)
        full = tuple(problem.is_linearly_stable(st) for st in states)
        out.append(BistabilityBranch(float(power), roots, slope, sym, full))
    return out


def atom_correlation(z_n: ArrayLike, z_m: ArrayLike, k: float, n_occupation: float, p: SystemParams) -> np.ndarray:
    """``<B_m^dagger B_n> = (4 |X_k|^2 N / N_sites) cos(k z_n) cos(k z_m)`` for a standing wave."""
    x2 = float(np.abs(branch_amplitudes(k, p, Branch.LOWER)[1]) ** 2)
    return 4.0 * x2 * n_occupation / p.n_sites * np.cos(k * np.asarray(z_n)) * np.cos(k * np.asarray(z_m))


Branches = tuple[Branch, Branch, Branch, Branch]
_ALL_LOWER: Branches = (Branch.LOWER,) * 4


def interaction_vertex(
    k: float,
    kp: float,
    kbar: float,
    p: SystemParams,
    m_eff: float,
    branches: Branches = _ALL_LOWER,
) -> complex:
    """``Delta conj(X_k^r) conj(X_k'^s) X_{k+kbar}^u X_{k'-kbar}^v``."""
    momenta = (k, kp, k + kbar, kp - kbar)
    if any(abs(q) > p.zone_edge * (1 + 1e-15) for q in momenta):
        raise OutOfRange("vertex momenta must lie in the Brillouin zone")
    xs = [complex(branch_amplitudes(q, p, b)[1]) for q, b in zip(momenta, branches)]
    return delta_strength(m_eff, p) * xs[0].conjugate() * xs[1].conjugate() * xs[2] * xs[3]


def eom_coefficient(
    k: float,
    kp: float,
    kpp: float,
    p: SystemParams,
    m_eff: float,
    branches: Branches = _ALL_LOWER,
) -> complex:
    """Coefficient ``hbar V`` of the cubic term: ``U^{rsuw}_{k,k',k'-k''} + U^{rswu}_{k,k',k''-k}``."""
    r, s, u, w = branches
    return interaction_vertex(k, kp, kp - kpp, p, m_eff, (r, s, u, w)) + interaction_vertex(
        k, kp, kpp - k, p, m_eff, (r, s, w, u)
    )
