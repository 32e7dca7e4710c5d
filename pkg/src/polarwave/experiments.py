"""Named sweeps that turn a :class:`RunConfig` into a :class:`SweepTable`.

Column sets per experiment (abscissa first):

dispersion
    k, e_upper, e_lower, e_photon, e_atom (all relative to E_A), x2_upper, y2_upper,
    x2_lower, y2_lower
fractions
    detuning (E_C(k) - E_A), e_upper, e_lower, x2_upper, y2_upper, x2_lower, y2_lower
interaction-strength
    detuning, x4_lower, delta_x4 (Delta |X|^4, eV), v_same_mode (2 Delta |X|^4, eV)
defect-scattering
    detuning, x2_lower, beta, f2, t2, f_re, f_im
impurity-scattering
    e_bar (E_d - E_A), f2_ka1, f2_ka2, beta_ka1, beta_ka2
ls-oracle
    strength, beta, f2_closed, f2_lattice, rel_error, f_re_closed, f_im_closed, f_re_lattice,
    f_im_lattice, fit_residual
pump-probe
    omega_minus_omega2, n_probe_no_pump, n_probe_pump (occupation per unit probe power)
symmetric-pump
    power (eV^2), power_scaled (power / Gamma^2), n
bistability
    power, power_scaled, n_root1..3, stable1..3 (slope rule), stable_eom1..3 (symmetric-sector
    linearisation), stable_two_mode1..3 (full linearisation); absent roots are nan
correlation
    z_m (Angstrom), correlation
channels
    k2, n_channels, k1_out1, k2_out1, ..., k1_out4, k2_out4, max_residual

Independent sweep points are evaluated on ``POLARWAVE_THREADS`` workers; results are
assembled in grid order so the table never depends on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

from .config import RunConfig
from .errors import OutOfRange
from .interactions import delta_strength, lower_x4_closed_form, mode_interaction_v
from .ls_oracle import LatticeScatterSetup, lattice_green
from .meanfield import atom_correlation, bistability_sweep, polariton_damping, probe_spectrum, symmetric_pump
from .model import SystemParams, photon_dispersion
from .polariton import Branch, branch_energy, branch_fractions
from .scattering import defect_amplitude, scattering_beta, two_body_channels
from .table import SweepTable

T = TypeVar("T")
R = TypeVar("R")

MAX_CHANNELS = 4


def worker_count() -> int:
    raw = os.environ.get("POLARWAVE_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise OutOfRange(f"POLARWAVE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise OutOfRange(f"POLARWAVE_THREADS must be a positive integer, got {raw!r}")
    return n


def sweep_map(func: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """``[func(x) for x in items]``, possibly concurrent, always in input order."""
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def working_params(cfg: RunConfig, k: float | None = None) -> SystemParams:
    """Params with the configured excitation-photon detuning imposed at the working k."""
    det = cfg.run.detuning
    if det is None:
        return cfg.params
    return cfg.params.with_detuning(det, cfg.run.k if k is None else k)


def _detuned(cfg: RunConfig, detuning: float) -> SystemParams:
    return cfg.params.with_detuning(float(detuning), cfg.run.k)


def _dispersion(cfg: RunConfig, k: np.ndarray) -> SweepTable:
    p = working_params(cfg)
    x2_up, y2_up = branch_fractions(k, p, Branch.UPPER)
    x2_lo, y2_lo = branch_fractions(k, p, Branch.LOWER)
    return SweepTable.from_columns(
        {
            "k": k,
            "e_upper": branch_energy(k, p, Branch.UPPER) - p.e_a,
            "e_lower": branch_energy(k, p, Branch.LOWER) - p.e_a,
            "e_photon": np.asarray(photon_dispersion(k, p)) - p.e_a,
            "e_atom": np.zeros_like(k),
            "x2_upper": x2_up,
            "y2_upper": y2_up,
            "x2_lower": x2_lo,
            "y2_lower": y2_lo,
        }
    )


def _fractions(cfg: RunConfig, det: np.ndarray) -> SweepTable:
    k = cfg.run.k

    def point(d: float) -> list[float]:
        p = _detuned(cfg, d)
        x2_up, y2_up = branch_fractions(k, p, Branch.UPPER)
        x2_lo, y2_lo = branch_fractions(k, p, Branch.LOWER)
        return [
            float(branch_energy(k, p, Branch.UPPER)) - p.e_a,
            float(branch_energy(k, p, Branch.LOWER)) - p.e_a,
            float(x2_up),
            float(y2_up),
            float(x2_lo),
            float(y2_lo),
        ]

    rows = np.array(sweep_map(point, list(det)))
    names = ("e_upper", "e_lower", "x2_upper", "y2_upper", "x2_lower", "y2_lower")
    return SweepTable(("detuning",) + names, np.column_stack([det, rows]))


def _interaction_strength(cfg: RunConfig, det: np.ndarray) -> SweepTable:
    k, m = cfg.run.k, cfg.run.m_eff
    x4 = np.array(sweep_map(lambda d: float(lower_x4_closed_form(k, _detuned(cfg, d))), list(det)))
    delta = delta_strength(m, cfg.params)
    return SweepTable.from_columns(
        {"detuning": det, "x4_lower": x4, "delta_x4": delta * x4, "v_same_mode": 2.0 * delta * x4}
    )


def _defect_scattering(cfg: RunConfig, det: np.ndarray) -> SweepTable:
    k, m, s = cfg.run.k, cfg.run.m_eff, cfg.run.strength

    def point(d: float) -> list[float]:
        p = _detuned(cfg, d)
        res = defect_amplitude(k, s, p, m)
        x2 = float(branch_fractions(k, p, Branch.LOWER)[0])
        return [x2, res.beta, res.reflection_prob, res.transmission_prob, res.f.real, res.f.imag]

    rows = np.array(sweep_map(point, list(det)))
    return SweepTable(("detuning", "x2_lower", "beta", "f2", "t2", "f_re", "f_im"), np.column_stack([det, rows]))


def _impurity_scattering(cfg: RunConfig, e_bar: np.ndarray) -> SweepTable:
    m = cfg.run.m_eff
    cols: dict[str, np.ndarray] = {"e_bar": e_bar}
    betas = {}
    for label, ka in (("ka1", cfg.run.ka1), ("ka2", cfg.run.ka2)):
        k = ka / cfg.params.a
        # the excitation-photon detuning is imposed at each curve's own k
        p = working_params(cfg, k)
        x2 = float(branch_fractions(k, p, Branch.LOWER)[0])
        beta = np.array([scattering_beta(k, float(e), x2, p, m) for e in e_bar])
        cols[f"f2_{label}"] = beta**2 / (1.0 + beta**2)
        betas[f"beta_{label}"] = beta
    cols.update(betas)
    return SweepTable.from_columns(cols)


def _ls_oracle(cfg: RunConfig, strengths: np.ndarray) -> SweepTable:
    p, m, k = working_params(cfg), cfg.run.m_eff, cfg.run.k
    if not k > 0:
        raise OutOfRange("ls-oracle needs run.k > 0")
    setup = LatticeScatterSetup(n_grid=cfg.run.n_grid, lower_only=cfg.run.lower_only)
    green = lattice_green(k, setup, p, m)

    def point(s: float) -> list[float]:
        closed = defect_amplitude(k, s, p, m)
        sol = green.solve(s)
        f2_lat = abs(sol.f) ** 2
        rel = abs(f2_lat - closed.reflection_prob) / closed.reflection_prob if closed.reflection_prob else math.nan
        return [
            closed.beta,
            closed.reflection_prob,
            f2_lat,
            rel,
            closed.f.real,
            closed.f.imag,
            sol.f.real,
            sol.f.imag,
            sol.residual,
        ]

    rows = np.array(sweep_map(point, list(strengths)))
    header = (
        "strength",
        "beta",
        "f2_closed",
        "f2_lattice",
        "rel_error",
        "f_re_closed",
        "f_im_closed",
        "f_re_lattice",
        "f_im_lattice",
        "fit_residual",
    )
    return SweepTable(header, np.column_stack([strengths, rows]))


def _mode_pair(cfg: RunConfig) -> tuple[SystemParams, float, float]:
    """Params, cross-mode ``hbar V`` and probe damping for pump at ``run.k``, probe at ``run.k2``."""
    p = working_params(cfg)
    v = float(mode_interaction_v(cfg.run.k, cfg.run.k2, p, cfg.run.m_eff))
    gamma2 = float(polariton_damping(cfg.run.k2, Branch.LOWER, p))
    return p, v, gamma2


def _pump_probe(cfg: RunConfig, w: np.ndarray) -> SweepTable:
    _, v, gamma2 = _mode_pair(cfg)
    return probe_spectrum(w, cfg.run.n_pump, v, gamma2, cfg.run.probe_power)


def _symmetric_constants(cfg: RunConfig) -> tuple[SystemParams, float, float]:
    """Counter-propagating pair at ``+-run.k``: params, ``hbar V`` and ``hbar Gamma``."""
    p = working_params(cfg)
    k = cfg.run.k
    v = float(mode_interaction_v(k, -k, p, cfg.run.m_eff))
    gamma = float(polariton_damping(k, Branch.LOWER, p))
    return p, v, gamma


def _symmetric_pump(cfg: RunConfig, power: np.ndarray) -> SweepTable:
    _, v, gamma = _symmetric_constants(cfg)

    def point(pw: float) -> float:
        roots = symmetric_pump(pw, v, gamma)
        if len(roots) != 1:
            raise OutOfRange(f"expected one non-negative root at power {pw!r}, got {len(roots)}")
        return roots[0]

    n = np.array(sweep_map(point, list(power)))
    return SweepTable.from_columns({"power": power, "power_scaled": power / gamma**2, "n": n})


def _pad(values: Sequence[float], width: int) -> list[float]:
    return list(values) + [math.nan] * (width - len(values))


def _flags(values: Sequence[bool]) -> list[float]:
    return _pad([1.0 if v else 0.0 for v in values], 3)


def _bistability(cfg: RunConfig, power: np.ndarray) -> SweepTable:
    _, v, gamma = _symmetric_constants(cfg)
    delta_bar = cfg.run.delta_bar

    def point(pw: float) -> list[float]:
        br = bistability_sweep(delta_bar, v, gamma, [pw])[0]
        return (
            _pad(br.occupations, 3)
            + _flags(br.stability)
            + _flags(br.stability_linear)
            + _flags(br.stability_two_mode)
        )

    rows = np.array(sweep_map(point, list(power)))
    header = ("power", "power_scaled")
    for stem in ("n_root", "stable", "stable_eom", "stable_two_mode"):
        header += tuple(f"{stem}{i}" for i in (1, 2, 3))
    return SweepTable(header, np.column_stack([power, power / gamma**2, rows]))


def _correlation(cfg: RunConfig, z_m: np.ndarray) -> SweepTable:
    p, v, gamma = _symmetric_constants(cfg)
    roots = symmetric_pump(cfg.run.power, v, gamma)
    corr = atom_correlation(cfg.run.z_n, z_m, cfg.run.k, roots[0], p)
    return SweepTable.from_columns({"z_m": z_m, "correlation": corr})


def _channels(cfg: RunConfig, k2: np.ndarray) -> SweepTable:
    p, k1, parabolic = working_params(cfg), cfg.run.k, cfg.run.parabolic
    lower = Branch.LOWER

    def point(q: float) -> list[float]:
        pair = two_body_channels(k1, float(q), parabolic=parabolic, p=p)
        outs = pair.outgoing
        if len(outs) > MAX_CHANNELS:
            raise OutOfRange(f"{len(outs)} channels at k2={q!r} exceed the {MAX_CHANNELS} table slots")
        e_in = float(branch_energy(k1, p, lower) + branch_energy(float(q), p, lower))
        flat: list[float] = []
        resid = 0.0
        for a, _, b, _ in outs:
            flat += [a, b]
            if parabolic:
                resid = max(resid, abs(k1 * k1 + q * q - a * a - b * b) / max(k1 * k1 + q * q, 1e-300))
            else:
                e_out = float(branch_energy(a, p, lower) + branch_energy(b, p, lower))
                resid = max(resid, abs(e_out - e_in) / p.e_a)
        return [float(len(outs))] + _pad(flat, 2 * MAX_CHANNELS) + [resid]

    rows = np.array(sweep_map(point, list(k2)))
    header = ("k2", "n_channels")
    for i in range(1, MAX_CHANNELS + 1):
        header += (f"k1_out{i}", f"k2_out{i}")
    return SweepTable(header + ("max_residual",), np.column_stack([k2, rows]))


_RUNNERS: dict[str, Callable[[RunConfig, np.ndarray], SweepTable]] = {
    "dispersion": _dispersion,
    "fractions": _fractions,
    "interaction-strength": _interaction_strength,
    "defect-scattering": _defect_scattering,
    "impurity-scattering": _impurity_scattering,
    "ls-oracle": _ls_oracle,
    "pump-probe": _pump_probe,
    "symmetric-pump": _symmetric_pump,
    "bistability": _bistability,
    "correlation": _correlation,
    "channels": _channels,
}


def run_experiment(cfg: RunConfig) -> SweepTable:
    """Evaluate the configured experiment on its grid."""
    return _RUNNERS[cfg.experiment](cfg, cfg.grid.values())
