"""Pump-probe timeline of a decaying ensemble seen by the electron.

Runs the Dicke cascade and the truncated-Wigner model for the same chain and
writes the mean excitation, emitted intensity and loss-spectrum width versus
delay to ``timeline.csv``.
"""

import argparse
from pathlib import Path

import numpy as np

from superradiant_eels.coupling import ElectronParams, EmitterEnsemble
from superradiant_eels.dynamics import dicke_cascade, timeline_eels, twa_long_sample
from superradiant_eels.eels import effective_coupling
from superradiant_eels.fileio import write_csv
from superradiant_eels.ladder import LadderState
from superradiant_eels.scattering import exact_elements


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/timeline")
    ap.add_argument("--N", type=int, default=30)
    ap.add_argument("--g", type=float, default=0.2)
    ap.add_argument("--gamma", type=float, default=1e-3, help="single-emitter rate in 1/fs")
    ap.add_argument("--trajectories", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    N = args.N
    delays = np.linspace(0.0, 1500.0, 151)
    kernel = exact_elements(N, args.g)
    dicke = dicke_cascade(N, args.gamma, LadderState.basis(N, N), delays)
    ens = EmitterEnsemble.periodic(N, 10.0, 4.5, refr_index=1.5)
    twa = twa_long_sample(ens, ElectronParams(0.7), args.gamma, args.trajectories, args.seed,
                          delays, workers=args.workers)
    g_d = [effective_coupling(s) for s in timeline_eels(dicke, kernel, delays)]
    g_t = [effective_coupling(s) for s in timeline_eels(twa, kernel, delays, interpolate=True)]
    write_csv(out / "timeline.csv",
              ["delay_fs", "mean_m_dicke", "intensity_dicke", "g_eff_dicke",
               "mean_m_twa", "intensity_twa", "g_eff_twa"],
              zip(delays, dicke.mean_m, dicke.intensity, g_d, twa.mean_m, twa.mean_intensity, g_t))
    print(f"Dicke width peaks at {delays[int(np.argmax(g_d))]:.0f} fs, "
          f"TWA at {delays[int(np.argmax(g_t))]:.0f} fs")
    print("wrote", out)


if __name__ == "__main__":
    main()
