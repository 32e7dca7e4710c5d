"""Convergence of the lattice Lippmann-Schwinger solver against the closed-form amplitude.

    python3 scripts/oracle_convergence.py [--grids 1024 2048 4096 8192] [--eta-factors 2 5 10]

Prints the relative |f|^2 error for weak, intermediate and hard-core strengths at each grid
size and regulator factor, plus the fit residual.
"""

from __future__ import annotations

import argparse

from polarwave.errors import PolarwaveError
from polarwave.ls_oracle import LatticeScatterSetup, lattice_green
from polarwave.model import SystemParams
from polarwave.scattering import defect_amplitude, scattering_beta

K = 1e-6
M_POL = 4.0


def main() -> None:
    parser = argparse.ArgumentParser(description="lattice oracle convergence table")
    parser.add_argument("--grids", type=int, nargs="+", default=[1024, 2048, 4096, 8192])
    parser.add_argument("--eta-factors", type=float, nargs="+", default=[5.0])
    parser.add_argument("--grading", type=float, default=5.0)
    args = parser.parse_args()

    p = SystemParams(l_fiber=1e7).with_detuning(0.0, K)
    beta_1 = scattering_beta(K, 1.0, 0.5, p, M_POL)
    strengths = {"beta=0.1": 0.1 / beta_1, "beta=1": 1.0 / beta_1, f"beta={beta_1:.0f}": 1.0}
    closed = {name: defect_amplitude(K, s, p, M_POL).reflection_prob for name, s in strengths.items()}

    print(f"{'eta_factor':>10} {'n_grid':>7} {'eta (eV)':>10} " + " ".join(f"{n:>22}" for n in strengths))
    for factor in args.eta_factors:
        for n_grid in args.grids:
            setup = LatticeScatterSetup(n_grid=n_grid, eta_factor=factor, grading=args.grading)
            try:
                green = lattice_green(K, setup, p, M_POL)
                cells = []
                for name, s in strengths.items():
                    sol = green.solve(s)
                    err = abs(sol.f) ** 2 / closed[name] - 1
                    cells.append(f"{err:+.3e} (res {sol.residual:.0e})")
                eta = f"{green.eta:.3e}"
            except PolarwaveError as exc:
                cells, eta = [type(exc).__name__] * len(strengths), "-"
            print(f"{factor:>10g} {n_grid:>7d} {eta:>10} " + " ".join(f"{c:>22}" for c in cells))


if __name__ == "__main__":
    main()
