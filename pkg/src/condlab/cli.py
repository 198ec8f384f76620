"""``condlab`` command-line driver.

Every subcommand reads a ``key = value`` model file (see ``condlab.io``)
and writes CSV for curves or JSON for scalar reports, to ``--out`` or stdout.
Exit codes: 0 success, 2 model or regime error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import io as cio
from .errors import BudgetError, DomainError, ModelError, RegimeError, TableMismatchError
from .observables import (
    Regime,
    TailCurve,
    classify_phase,
    cluster_scale,
    default_s_grid,
    empirical_tail,
    macroscopic_tail,
    max_cluster_fraction,
    theoretical_tail,
)
from .partition import build_table, size_biased_marginal
from .sampler import default_burn_in, direct_samples, make_zrp_rates, simulate_zrp
from .streams import map_realizations, stream
from .weights import ModelSpec, invert_density, truncated_rho_c

EXIT_OK = 0
EXIT_MODEL = 2
EXIT_VERIFY = 3


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _safe(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (RegimeError, DomainError):
        return None


def model_report(model: ModelSpec) -> dict:
    """Scalar summary of a model: critical densities, fugacity, phase and scales."""
    phase = classify_phase(model)
    rho = model.rho
    report = {
        "L": model.L,
        "N": model.N,
        "rho": rho,
        "rho_c": model.rho_c,
        "rho_c_L": truncated_rho_c(model, max(1, model.N)),
        "phi_bar": model.bulk.phi_bar,
        "Phi": invert_density(model, rho),
        "phase": phase.to_dict(),
        "C_L": phase.c_l,
        "C_L_corrected": _safe(cluster_scale, model, corrected=True) if phase.regime is Regime.MESOSCOPIC else None,
    }
    if phase.note:
        report["phase"]["note"] = phase.note
    return report


def _samples(model: ModelSpec, count: int, seed: int, sampler: str) -> np.ndarray:
    if sampler == "direct":
        return direct_samples(model, build_table(model), count, seed)
    dyn = make_zrp_rates(model)
    burn = default_burn_in(dyn, model.L, model.N)
    init = np.full(model.L, model.N // model.L, dtype=np.int64)
    init[: model.N % model.L] += 1

    def one(i, rng):
        return simulate_zrp(dyn, init, 1.0, thinning=1.0, rng=rng, burn_in=burn).states[-1]

    return np.array(map_realizations(one, count, seed), dtype=np.int64).reshape(count, model.L)


def cmd_model(args) -> int:
    _emit(cio.dumps_json(model_report(args.model)), args.out)
    return EXIT_OK


def cmd_partition(args) -> int:
    """Save the binary table, or print ``log Z`` and the size-biased law as CSV."""
    model = args.model
    table = build_table(model)
    if args.out and args.out.endswith(".bin"):
        cio.save_table(table, args.out)
        return EXIT_OK
    law = size_biased_marginal(table, model.L, model.N) if model.N > 0 else np.ones(1)
    rows = [(n, table.log_z[model.L, n], law[n] if n < len(law) else 0.0) for n in range(model.N + 1)]
    _emit(cio.csv_text(("n", "log_Z_L_n", "size_biased"), rows), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    model = args.model
    if args.sampler == "zrp" and args.t_end is not None:
        dyn = make_zrp_rates(model)
        init = np.zeros(model.L, dtype=np.int64)
        init[0] = model.N
        traj = simulate_zrp(dyn, init, args.t_end, args.thinning, rng=stream(args.seed, 0))
        rows = ((t, x + 1, int(v)) for t, s in zip(traj.times, traj.states) for x, v in enumerate(s))
        _emit(cio.csv_text(("time", "site", "occupation"), rows), args.out)
        return EXIT_OK
    configs = _samples(model, args.realizations, args.seed, args.sampler)
    rows = ((r, x + 1, int(v)) for r, eta in enumerate(configs) for x, v in enumerate(eta))
    _emit(cio.csv_text(("realization", "site", "occupation"), rows), args.out)
    return EXIT_OK


def cmd_tails(args) -> int:
    model = args.model
    grid = default_s_grid()
    phase = classify_phase(model)
    if model.N == 0:
        curve = TailCurve(grid, np.zeros_like(grid), None, n_realizations=args.realizations)
        _emit(_tail_text(curve), args.out)
        return EXIT_OK
    if phase.regime is Regime.MESOSCOPIC:
        c_l = cluster_scale(model)
        theory = theoretical_tail(model, grid, corrected=args.corrected)
    elif phase.regime in (Regime.MACROSCOPIC, Regime.TRANSITION):
        c_l = (model.rho - model.rho_c) * model.L
        theory = macroscopic_tail(model, grid, corrected=args.corrected)
    else:
        raise RegimeError("tail curves need rho > rho_c")
    configs = _samples(model, args.realizations, args.seed, args.sampler)
    curve = TailCurve(grid, empirical_tail(configs, c_l, grid), theory, c_l, phase.mixture_weight,
                      args.corrected, args.realizations)
    _emit(_tail_text(curve), args.out)
    return EXIT_OK


def _tail_text(curve: TailCurve) -> str:
    buf = io.StringIO()
    cio.write_tail_curve(buf, curve)
    return buf.getvalue()


def cmd_profile(args) -> int:
    configs = _samples(args.model, args.realizations, args.seed, args.sampler)
    rows = ((r, k + 1, int(h)) for r, eta in enumerate(configs) for k, h in enumerate(np.cumsum(eta)))
    _emit(cio.csv_text(("realization", "k", "H"), rows), args.out)
    return EXIT_OK


def cmd_maxcluster(args) -> int:
    model = args.model
    configs = _samples(model, args.realizations, args.seed, args.sampler)
    target = model.rho - model.rho_c
    fractions = [max_cluster_fraction(eta) for eta in configs]
    report = {
        "target": target,
        "step_height": target / model.rho if target > 0 else 0.0,
        "max_cluster_fraction": fractions,
        "within_0.05": sum(abs(f - target) <= 0.05 for f in fractions),
        "realizations": len(fractions),
        "phase": classify_phase(model).to_dict(),
    }
    _emit(cio.dumps_json(report), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .verify import run_oracle_suite

    results = run_oracle_suite(args.model)
    ok = all(r["passed"] for r in results)
    _emit(cio.dumps_json({"passed": ok, "checks": results}), args.out)
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "model": cmd_model,
    "partition": cmd_partition,
    "sample": cmd_sample,
    "tails": cmd_tails,
    "profile": cmd_profile,
    "maxcluster": cmd_maxcluster,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model file (key = value lines)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path; stdout when omitted")
    common.add_argument("--realizations", type=int, default=48)
    common.add_argument("--sampler", choices=("direct", "zrp"), default="direct")
    common.add_argument("--corrected", type=_bool, default=True)

    parser = argparse.ArgumentParser(prog="condlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        p.add_argument("model_file", nargs="?", help="model file (alternative to --model)")
        if name == "sample":
            p.add_argument("--t-end", type=float, default=None,
                           help="record a single zrp trajectory up to this time")
            p.add_argument("--thinning", type=float, default=1.0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    path = args.model or args.model_file
    if args.command != "oracle" and path is None:
        parser.error("a model file is required")
    try:
        args.model = cio.load_model(path) if path else None
        if args.realizations < 0:
            raise ModelError("--realizations must be non-negative")
        return COMMANDS[args.command](args)
    except (ModelError, RegimeError, DomainError, BudgetError, TableMismatchError) as exc:
        print(f"condlab: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
