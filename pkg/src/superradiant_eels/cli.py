"""Command-line entry point.

Usage::

    superradiant-eels <experiment> [--config run.json] [--set a.b=value ...] [--seed N] [--out DIR]

Experiments: coupling, spectrum, sweep, dynamics, reconstruct, selftest.
Exit codes: 0 success, 2 invalid configuration, 3 numeric-domain error,
4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import math
import platform
import sys
import traceback
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import EXPERIMENTS, ConfigError, RunConfig, load_config, parse_config
from .constants import energy_to_wavelength
from .coupling import (
    CouplingSet,
    ElectronParams,
    EmitterEnsemble,
    bessel_argument,
    coupling_set,
    uniform_couplings,
)
from .dynamics import dicke_cascade, timeline_eels, twa_long_sample
from .eels import effective_coupling, spectrum_from_joint, spectrum_from_ladder
from .excitation import ExcitationPulse, cherenkov_angle, excite, sweep
from .fileio import read_spectrum_csv, spectrum_rows, write_csv, write_json
from .fullspace import CapacityError, full_evolution
from .ladder import LadderState, mean_excitation, product_to_ladder
from .reconstruct import recover_populations
from .scattering import ScatteringKernel, exact_elements

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CAPACITY = 0, 2, 3, 4


# ---------------------------------------------------------------- builders

def build_electron(cfg: RunConfig) -> ElectronParams:
    return ElectronParams(cfg.electron.beta)


def build_ensemble(cfg: RunConfig) -> EmitterEnsemble:
    en = cfg.ensemble
    lam = en.lambda0 if en.lambda0 is not None else energy_to_wavelength(en.hbar_omega0)
    if en.positions is not None:
        z = np.asarray(en.positions, dtype=float)
    else:
        z = en.z0 + en.dz * np.arange(en.N)
    return EmitterEnsemble(z, en.r_perp, lam, d_perp=en.d_perp, d_z=en.d_z, refr_index=en.n)


def build_couplings(cfg: RunConfig, ens: EmitterEnsemble, e: ElectronParams) -> CouplingSet:
    if cfg.ensemble.g is not None:
        return uniform_couplings(cfg.ensemble.g, ens, e)
    return coupling_set(e, ens)


def ladder_kernel(couplings: CouplingSet, ens: EmitterEnsemble, e: ElectronParams) -> ScatteringKernel:
    try:
        g = couplings.ladder_coupling(ens.electron_phases(e))
    except ValueError as exc:
        raise ConfigError("ensemble", f"ladder kernel unavailable: {exc}") from None
    return exact_elements(ens.count, g)


def _kernel_info(k: ScatteringKernel) -> dict:
    return {"N": k.N, "g_re": k.g.real, "g_im": k.g.imag, "g_abs": abs(k.g)}


# ---------------------------------------------------------------- experiments

def run_coupling(cfg: RunConfig, out: Path) -> dict:
    e, ens = build_electron(cfg), build_ensemble(cfg)
    cs = build_couplings(cfg, ens, e)
    rows = [
        (i, ens.positions[i], ens.impact_params[i], bessel_argument(e, ens, i), g.real, g.imag, abs(g))
        for i, g in enumerate(cs.g)
    ]
    files = {"coupling.csv": write_csv(out / "coupling.csv",
                                       ("index", "z_nm", "r_perp_nm", "bessel_arg", "g_re", "g_im", "g_abs"),
                                       rows)}
    summary = {"uniform_magnitude": cs.uniform_magnitude, "lambda0_nm": ens.lambda0,
               "hbar_omega0_eV": ens.hbar_omega0, "gamma": e.gamma}
    if cs.uniform_magnitude:
        try:
            lc = cs.ladder_coupling(ens.electron_phases(e))
            summary["ladder_coupling"] = {"re": lc.real, "im": lc.imag, "abs": abs(lc)}
        except ValueError:
            summary["ladder_coupling"] = None
    files["coupling.json"] = write_json(out / "coupling.json", summary)
    return files


def _pulse(cfg: RunConfig, e: ElectronParams, ens: EmitterEnsemble) -> ExcitationPulse:
    p = cfg.pulse
    if p.theta_deg is None:
        theta = cherenkov_angle(e, ens.refr_index)
        if theta is None:
            raise ConfigError("pulse.theta_deg", "electron is below the Cherenkov threshold; give an angle")
    else:
        theta = math.radians(p.theta_deg)
    return ExcitationPulse(theta, area=p.area, tau=p.tau, rabi_rate=p.rabi_rate)


def run_spectrum(cfg: RunConfig, out: Path) -> dict:
    e, ens = build_electron(cfg), build_ensemble(cfg)
    cs = build_couplings(cfg, ens, e)
    u = ens.electron_phases(e)
    N = ens.count
    info: dict = {}
    if cfg.pulse is not None:
        pulse = _pulse(cfg, e, ens)
        product = excite(ens, pulse)
        lad = product_to_ladder(product, u) if cs.uniform_magnitude else None
        info["pulse"] = {"theta_deg": math.degrees(pulse.theta), "area": pulse.pulse_area}
        if lad is not None:
            k = ladder_kernel(cs, ens, e)
            sp = spectrum_from_ladder(k, lad, ens.hbar_omega0)
            info.update(pathway="ladder", kernel=_kernel_info(k), mean_m=mean_excitation(lad))
        else:
            sp = spectrum_from_joint(full_evolution(cs, product, u), ens.hbar_omega0)
            info.update(pathway="full_space")
    else:
        st = cfg.state
        if st is None or st.m is not None:
            lad = LadderState.basis(N, 0 if st is None else st.m)
        else:
            lad = LadderState.diagonal(np.asarray(st.populations))
        k = ladder_kernel(cs, ens, e)
        sp = spectrum_from_ladder(k, lad, ens.hbar_omega0)
        info.update(pathway="ladder", kernel=_kernel_info(k), mean_m=mean_excitation(lad))
    files = {"spectrum.csv": write_csv(out / "spectrum.csv", ("loss_index", "energy_eV", "probability"),
                                       spectrum_rows(sp))}
    info.update(mean_loss=sp.mean(), std_loss=sp.std(), g_eff=effective_coupling(sp),
                hbar_omega0_eV=sp.hbar_omega0)
    files["spectrum.json"] = write_json(out / "spectrum.json", info)
    return files


def sweep_angles_deg(cfg: RunConfig) -> np.ndarray:
    sw = cfg.sweep
    n = int(math.floor((sw.theta_stop_deg - sw.theta_start_deg) / sw.theta_step_deg + 1e-9)) + 1
    return sw.theta_start_deg + sw.theta_step_deg * np.arange(n)


def run_sweep(cfg: RunConfig, out: Path) -> dict:
    e, ens = build_electron(cfg), build_ensemble(cfg)
    sw = cfg.sweep
    deg = sweep_angles_deg(cfg)
    kw = dict(pathway=sw.pathway, couplings=build_couplings(cfg, ens, e),
              bandwidth_samples=sw.bandwidth_samples, seed=cfg.seed, workers=sw.workers)
    if sw.durations_fs is not None:
        res = sweep(ens, e, np.radians(deg), durations=sw.durations_fs, rabi_rate=sw.rabi_rate, **kw)
    else:
        res = sweep(ens, e, np.radians(deg), sw.areas, **kw)
    files = {"sweep.csv": write_csv(out / "sweep.csv", ("theta_deg", "tau_fs", "area_rad", "g_eff",
                                                        "dipole_sq_norm"), res.rows())}
    ck = cherenkov_angle(e, ens.refr_index)
    summary = {
        "argmax_deg": math.degrees(res.argmax_angle()),
        "cherenkov_deg": None if ck is None else math.degrees(ck),
        "resonances_deg": {q: math.degrees(t) for q, t in res.resonances.items()},
        "ladder_hits": res.ladder_hits,
        "pathway": sw.pathway,
        "max_g_eff": float(res.g_eff.max()),
    }
    files["sweep.json"] = write_json(out / "sweep.json", summary)
    return files


def run_dynamics(cfg: RunConfig, out: Path) -> dict:
    e, ens = build_electron(cfg), build_ensemble(cfg)
    dy = cfg.dynamics
    N = ens.count
    times = np.linspace(0.0, dy.t_max / dy.Gamma, dy.t_points)
    k = ladder_kernel(build_couplings(cfg, ens, e), ens, e)
    meta = {"N": N, "Gamma": dy.Gamma, "model": dy.model, "t_max_fs": times[-1], "t_points": dy.t_points,
            "kernel": _kernel_info(k)}
    if dy.model == "dicke":
        m0 = N if dy.initial_m is None else dy.initial_m
        traj = dicke_cascade(N, dy.Gamma, LadderState.basis(N, m0), times, rtol=dy.rtol)
        mean_m, inten = traj.mean_m, traj.intensity
        meta.update(initial_m=m0, integrator="dop853", rtol=dy.rtol)
    else:
        traj = twa_long_sample(ens, e, dy.Gamma, dy.M, cfg.seed, times, tip_angle=dy.tip_angle,
                               integrator=dy.integrator, rtol=dy.rtol, workers=dy.workers)
        mean_m, inten = traj.mean_m, traj.mean_intensity
        meta.update(M=dy.M, seed=cfg.seed, integrator=dy.integrator, rtol=dy.rtol,
                    tip_angle=dy.tip_angle if dy.tip_angle is not None else 1.0 / math.sqrt(N),
                    max_spin_length_error=float(traj.spin_length_error.max()),
                    mean_emitted=float(traj.emitted[:, -1].mean()),
                    mean_peak_delay_fs=float(traj.peak_delays().mean()))
    delays = np.asarray(dy.delays_fs if dy.delays_fs is not None else np.linspace(0.0, times[-1], 51))
    spectra = timeline_eels(traj, k, delays, ens.hbar_omega0)
    files = {
        "timeseries.csv": write_csv(out / "timeseries.csv", ("t", "mean_m", "intensity"),
                                    zip(times, mean_m, inten)),
        "spectra.csv": write_csv(out / "spectra.csv", ("delay_fs", "loss_index", "energy_eV", "probability"),
                                 (r for d, sp in zip(delays, spectra) for r in spectrum_rows(sp, (float(d),)))),
    }
    meta["peak_intensity"] = float(np.max(inten))
    meta["peak_time_fs"] = float(times[int(np.argmax(inten))])
    meta["g_eff"] = [effective_coupling(sp) for sp in spectra]
    meta["delays_fs"] = delays
    files["dynamics.json"] = write_json(out / "dynamics.json", meta)
    return files


def run_reconstruct(cfg: RunConfig, out: Path) -> dict:
    e, ens = build_electron(cfg), build_ensemble(cfg)
    rc = cfg.reconstruct
    try:
        sp = read_spectrum_csv(rc.spectrum_csv)
    except OSError as exc:
        raise ConfigError("reconstruct.spectrum_csv", f"cannot read {rc.spectrum_csv}: {exc.strerror}") from None
    if sp.max_loss > ens.count:
        raise ConfigError("reconstruct.spectrum_csv",
                          f"spectrum reaches |l| = {sp.max_loss} but the kernel has N = {ens.count}")
    k = ladder_kernel(build_couplings(cfg, ens, e), ens, e)
    rep = recover_populations(sp, k, lam=rc.lambda_reg, noise_level=rc.noise)
    report = rep.to_dict()
    report["kernel"] = _kernel_info(k)
    return {"reconstruct.json": write_json(out / "reconstruct.json", report)}


RUNNERS = {
    "coupling": run_coupling,
    "spectrum": run_spectrum,
    "sweep": run_sweep,
    "dynamics": run_dynamics,
    "reconstruct": run_reconstruct,
}


def run(cfg: RunConfig, out: Path | None = None) -> dict:
    """Execute ``cfg`` and write its artifacts plus a ``run.json`` manifest.

    Returns the manifest dict. Outputs depend only on the configuration and
    seed; the manifest carries no timestamps.
    """
    if cfg.stochastic and cfg.seed is None:
        raise ConfigError("seed", "stochastic runs need an explicit --seed")
    out = Path(out if out is not None else cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    files = RUNNERS[cfg.experiment](cfg, out)
    manifest = {
        "package": "superradiant_eels",
        "version": __version__,
        "versions": {"numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "outputs": {name: {"sha256": digest} for name, digest in sorted(files.items())},
    }
    write_json(out / "run.json", manifest)
    return manifest


# ---------------------------------------------------------------- entry point

def _origin(exc: BaseException) -> str:
    tb = traceback.extract_tb(exc.__traceback__)
    for frame in reversed(tb):
        p = Path(frame.filename)
        if p.parent.name == "superradiant_eels":
            return p.stem
    return "cli"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superradiant-eels",
                                     description="Electron energy-loss spectra of superradiant emitter ensembles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config field, e.g. --set electron.beta=0.5")
        p.add_argument("--seed", type=int, help="random seed (required for stochastic runs)")
        p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    st = sub.add_parser("selftest", help="run the invariant suite at reduced scale")
    st.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest

        ok = run_selftest(verbose=not args.quiet)
        return EXIT_OK if ok else EXIT_NUMERIC
    try:
        overrides = [*args.overrides, f"experiment={args.command}"]
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")
        cfg = load_config(args.config, overrides) if args.config else parse_config({}, overrides)
        manifest = run(cfg, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error in {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numeric error in {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for name in manifest["outputs"]:
        print(name)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
