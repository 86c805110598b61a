"""Finite-time scaling of the envelope-crossing point.

The step at which the parity envelopes meet at 1/2 drifts above the
midpoint for fast sweeps and approaches N_steps / 2 as the drive becomes
adiabatic.  Scaled-down version of the full scan (the CLI `crossing-scan`
subcommand runs arbitrary grids in parallel).

Runtime: ~half a minute.
"""

from floquet_sre.analysis import envelope_crossing, run_adiabatic
from floquet_sre.fermion import FermionEngine
from floquet_sre.model import AdiabaticPath, ProductState

print(f"{'L':>4s} {'N_steps':>8s} {'N_c':>6s} {'ratio':>7s}")
for sites in (20, 40, 60):
    for n_steps in (500, 1000, 2000):
        path = AdiabaticPath(sites=sites, n_steps=n_steps)
        series = run_adiabatic(FermionEngine(sites), path, sites, sites // 2,
                               ProductState.all_plus(sites))
        rep = envelope_crossing(series)
        print(f"{sites:4d} {n_steps:8d} {rep.n_c:6d} {rep.ratio:7.4f}")

print("\nratio -> 0.5 as both L and N_steps grow")
