"""Command-line front end: scan | oracle | compare | dos | peaks.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 comparison failure.
Typical figure settings: single spin --tau 10 --d 7 --rounds 50; two spins
--tau 0 --d 10 --rounds 60.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import oracle, scan as scanmod
from .dataset import write_dataset
from .hamiltonian import spectral_decompose
from .oracle import GaussianTimeParams
from .scan import RodeoConfig, ScanResult, detect_peaks, run_scan


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # spec exit contract: usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_state_flag(text: str) -> dict:
    """--state grammar: theta=X[,phi=Y][;...] | bell=... | mix=family:alpha | amps=file."""
    text = text.strip()
    if text.startswith("bell="):
        kind = text[5:]
        if kind not in scanmod.BELL_KINDS:
            raise UsageError(f"unknown Bell state {kind!r} (choose from {'|'.join(scanmod.BELL_KINDS)})")
        return {"bell": kind}
    if text.startswith("mix="):
        body = text[4:]
        if ":" not in body:
            raise UsageError("mix state needs the form mix=phi:alpha or mix=psi:alpha")
        family, alpha = body.split(":", 1)
        if family not in ("phi", "psi"):
            raise UsageError(f"unknown mix family {family!r}")
        try:
            return {"mix": {"family": family, "alpha": float(alpha)}}
        except ValueError:
            raise UsageError(f"bad mix angle {alpha!r}") from None
    if text.startswith("amps="):
        path = text[5:]
        with open(path, encoding="utf-8") as f:
            entries = json.load(f)
        pairs = [[float(e[0]), float(e[1])] if isinstance(e, (list, tuple))
                 else [float(e), 0.0] for e in entries]
        return {"amplitudes": pairs}
    angles = []
    for part in text.split(";"):
        theta = phi = None
        for item in part.split(","):
            if "=" not in item:
                raise UsageError(f"bad state spec {part!r}")
            key, val = item.split("=", 1)
            try:
                num = float(val)
            except ValueError:
                raise UsageError(f"bad angle {val!r} in state spec") from None
            if key.strip() == "theta":
                theta = num
            elif key.strip() == "phi":
                phi = num
            else:
                raise UsageError(f"unknown state key {key.strip()!r}")
        if theta is None:
            raise UsageError(f"state spec {part!r} is missing theta")
        angles.append([theta, phi if phi is not None else 0.0])
    return {"angles": angles}


def _model_from_args(args) -> dict:
    if args.model == "zeeman":
        if getattr(args, "matrix", None):
            raise UsageError("--matrix only applies to --model custom")
        return {"name": "zeeman", "spins": args.spins, "field": args.field}
    if not getattr(args, "matrix", None):
        raise UsageError("--model custom needs --matrix FILE")
    return {"name": "custom", "path": args.matrix}


def _state_descriptor(args, num_qubits: int) -> dict:
    if args.state is None:
        return {"angles": [[0.0, 0.0] for _ in range(num_qubits)]}
    desc = parse_state_flag(args.state)
    try:
        scanmod.state_from_descriptor(desc, num_qubits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return desc


def _build_config(args) -> RodeoConfig:
    model = _model_from_args(args)
    decomp = spectral_decompose(scanmod.load_model_operator(model))
    desc = _state_descriptor(args, decomp.num_qubits)
    if args.mode == "shots" and args.shots is None:
        raise UsageError("--mode shots needs --shots COUNT")
    if args.mode == "exact" and args.shots is not None:
        raise UsageError("--shots only applies to --mode shots")
    state = None if args.n_psi > 1 and args.state is None else desc
    return RodeoConfig(
        model=model, initial_state=state, e_min=args.e_min, e_max=args.e_max,
        de=args.de, tau=args.tau, d=args.d, ancillas=args.ancillas,
        n_rounds=args.rounds, n_psi=args.n_psi, mode=args.mode, shots=args.shots,
        master_seed=args.seed, threads=args.threads,
    )


def _write_table(path: str | None, header: str, rows) -> None:
    lines = [header] + [",".join(cells) for cells in rows]
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _print_peaks(peaks) -> None:
    for pk in peaks:
        print(f"peak energy={_fmt(pk.energy)} height={_fmt(pk.height)} width={_fmt(pk.width)}")
    print(f"peak_height_sum={_fmt(sum(pk.height for pk in peaks))}")


def _scan_rows(result: ScanResult):
    for e, y, s in zip(result.energies, result.mean_neg_h, result.stderr):
        yield (_fmt(e), _fmt(y), _fmt(s), str(result.rides_per_energy))


def cmd_scan(args) -> int:
    config = _build_config(args)
    result, records = run_scan(config)
    _write_table(args.out, "energy,neg_h_mean,stderr,n_rounds", _scan_rows(result))
    if args.dataset:
        write_dataset(records, args.dataset)
    _print_peaks(result.peaks)
    return 0


def _oracle_weights(args, curve: str):
    model = _model_from_args(args)
    decomp = spectral_decompose(scanmod.load_model_operator(model))
    m = decomp.num_qubits
    desc = _state_descriptor(args, m)
    if curve == "mean":
        return oracle.overlaps_from_state(scanmod.state_from_descriptor(desc, m), decomp)
    if curve == "one-spin":
        if model["name"] != "zeeman" or args.spins != 1 or "angles" not in desc:
            raise UsageError("--curve one-spin needs --model zeeman --spins 1 and an angle state")
        return oracle.one_spin_weights(desc["angles"][0][0], args.field)
    if curve == "two-spin":
        if model["name"] != "zeeman" or args.spins != 2 or "angles" not in desc:
            raise UsageError("--curve two-spin needs --model zeeman --spins 2 and angle states")
        return oracle.two_spin_weights(desc["angles"][0][0], desc["angles"][1][0], args.field)
    # bell
    if model["name"] != "zeeman" or args.spins != 2:
        raise UsageError("--curve bell needs --model zeeman --spins 2")
    if "bell" in desc:
        return oracle.bell_weights(desc["bell"], args.field)
    if "mix" in desc:
        return oracle.bell_weights(f"mix-{desc['mix']['family']}", args.field,
                                   desc["mix"]["alpha"])
    raise UsageError("--curve bell needs --state bell=... or mix=...")


def cmd_oracle(args) -> int:
    weights = _oracle_weights(args, args.curve)
    p = GaussianTimeParams(args.tau, args.d)
    steps = int(round((args.e_max - args.e_min) / args.de))
    energies = args.e_min + args.de * np.arange(steps + 1)
    rows = ((_fmt(e), _fmt(-oracle.mean_score(weights, float(e), p))) for e in energies)
    _write_table(args.out, "energy,neg_h", rows)
    return 0


def cmd_compare(args) -> int:
    config = _build_config(args)
    result, _ = run_scan(config)
    weights = _oracle_weights(args, "mean")
    tau = args.oracle_tau if args.oracle_tau is not None else args.tau
    p = GaussianTimeParams(tau, args.d)
    ref = np.array([-oracle.mean_score(weights, float(e), p) for e in result.energies])
    diff = np.abs(result.mean_neg_h - ref)
    tol = 5.0 * result.stderr + 1e-9
    ok = diff <= tol
    frac = float(np.mean(ok))
    print(f"compare points={ok.size} within_tolerance={_fmt(frac)}")
    _print_peaks(result.peaks)
    if frac >= 0.99:
        return 0
    worst = np.argsort(diff - tol)[::-1][:5]
    for j in worst:
        if ok[j]:
            continue
        print(f"mismatch energy={_fmt(result.energies[j])} sim={_fmt(result.mean_neg_h[j])} "
              f"oracle={_fmt(ref[j])} stderr={_fmt(result.stderr[j])}")
    return 3


def cmd_dos(args) -> int:
    if args.d <= 0.0:
        raise UsageError("--d must be positive")
    p = GaussianTimeParams(args.tau, args.d)
    steps = int(round((args.e_max - args.e_min) / args.de))
    energies = args.e_min + args.de * np.arange(steps + 1)
    omega = np.array([oracle.dos(float(e), args.field, p) for e in energies])
    rows = [
        (_fmt(e), _fmt(w), _fmt(oracle.entropy_tau0(float(e), args.field, args.d)),
         _fmt(oracle.beta_tau0(float(e), args.field, args.d)))
        for e, w in zip(energies, omega)
    ]
    integral = float(np.trapz(omega, energies))
    text_rows = [",".join(r) for r in rows]
    body = "\n".join(["energy,omega,entropy,beta", *text_rows,
                      f"# integral_omega={_fmt(integral)}"]) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(body)
    else:
        sys.stdout.write(body)
    return 0


def _read_table(path: str) -> ScanResult:
    energies, values, errs = [], [], []
    n_rounds = 1
    with open(path, encoding="utf-8") as f:
        header = None
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if header is None:
                header = cells
                if header[0] != "energy" or len(header) < 2:
                    raise ValueError(f"line {lineno}: unrecognized table header")
                continue
            if len(cells) != len(header):
                raise ValueError(f"line {lineno}: expected {len(header)} columns")
            energies.append(float(cells[0]))
            values.append(float(cells[1]))
            errs.append(float(cells[2]) if len(cells) > 2 else 0.0)
            if len(cells) > 3:
                n_rounds = int(cells[3])
    if header is None or not energies:
        raise ValueError("table has no data rows")
    return ScanResult(np.array(energies), np.array(values), np.array(errs), n_rounds)


def cmd_peaks(args) -> int:
    if args.merge_radius is None and args.d is None:
        raise UsageError("give --merge-radius or --d (merge radius defaults to 3/d)")
    result = _read_table(args.infile)
    peaks = detect_peaks(result, height_threshold=args.threshold,
                         merge_radius=args.merge_radius, d=args.d, min_z=args.min_z)
    _print_peaks(peaks)
    return 0


# --- parser ------------------------------------------------------------------

def _add_grid_flags(p, required=True):
    p.add_argument("--e-min", type=float, required=required, help="grid start energy")
    p.add_argument("--e-max", type=float, required=required, help="grid end energy (inclusive)")
    p.add_argument("--de", type=float, required=required, help="grid step")


def _add_model_flags(p):
    p.add_argument("--model", choices=("zeeman", "custom"), required=True,
                   help="Hamiltonian family")
    p.add_argument("--spins", type=int, default=1, help="Zeeman spin count (default 1)")
    p.add_argument("--field", type=float, default=1.0, help="Zeeman field B (default 1.0)")
    p.add_argument("--matrix", help="JSON matrix file for --model custom")
    p.add_argument("--state", default=None,
                   help="initial state: theta=X[,phi=Y][;...] | bell=phi+|phi-|psi+|psi- "
                        "| mix=phi:alpha | mix=psi:alpha | amps=FILE (default: all theta=0)")


def _add_scan_flags(p):
    _add_model_flags(p)
    _add_grid_flags(p)
    p.add_argument("--tau", type=float, required=True, help="mean evolution time")
    p.add_argument("--d", type=float, required=True, help="evolution-time spread")
    p.add_argument("--rounds", type=int, required=True, help="rides per grid point")
    p.add_argument("--seed", type=int, required=True, help="master RNG seed")
    p.add_argument("--ancillas", type=int, default=1, help="control qubits N (default 1)")
    p.add_argument("--n-psi", type=int, default=1, dest="n_psi",
                   help="initial-state sweep count (default 1; random states if >1 and no --state)")
    p.add_argument("--mode", choices=("exact", "shots"), default="exact",
                   help="exact expectations or sampled readouts")
    p.add_argument("--shots", type=int, default=None, help="samples per ride in shot mode")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (never changes the results)")
    p.add_argument("--out", help="scan table file (default stdout)")
    p.add_argument("--dataset", help="also write every ride as a dataset file")


def build_parser() -> _Parser:
    parser = _Parser(prog="rodeo", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="Monte Carlo energy scan", parents=[])
    _add_scan_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("oracle", help="closed-form response curve")
    _add_model_flags(p)
    _add_grid_flags(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--curve", choices=("mean", "one-spin", "two-spin", "bell"),
                   required=True, help="which closed form to evaluate")
    p.add_argument("--out", help="table file (default stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="scan vs closed form on one grid")
    _add_scan_flags(p)
    p.add_argument("--oracle-tau", type=float, default=None, dest="oracle_tau",
                   help="override tau on the oracle side (negative control)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("dos", help="density of states, entropy, inverse temperature")
    p.add_argument("--field", type=float, required=True, help="Zeeman field B")
    p.add_argument("--d", type=float, required=True, help="Gaussian broadening")
    p.add_argument("--tau", type=float, default=0.0,
                   help="mean time for the omega column (entropy/beta stay at tau=0)")
    _add_grid_flags(p)
    p.add_argument("--out", help="table file (default stdout)")
    p.set_defaults(func=cmd_dos)

    p = sub.add_parser("peaks", help="peak report for an existing scan table")
    p.add_argument("--in", dest="infile", required=True, help="scan table file")
    p.add_argument("--threshold", type=float, default=0.1, help="minimum peak height")
    p.add_argument("--merge-radius", type=float, default=None, dest="merge_radius",
                   help="merge maxima closer than this (default 3/d)")
    p.add_argument("--d", type=float, default=None, help="time spread, sets merge radius 3/d")
    p.add_argument("--min-z", type=float, default=4.0, dest="min_z",
                   help="significance gate in standard errors (0 disables)")
    p.set_defaults(func=cmd_peaks)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # any failure past flag parsing is a runtime error
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
