"""Command-line front end.

Subcommands:

* ``correct`` — tabulate grid-correction amounts for (m, n) combinations.
* ``select`` — run one selection method on a loss-matrix CSV.
* ``generate`` — write a synthetic loss matrix (and companions) to CSV.
* ``simulate-counterexample`` — the (n, m) phase table, analytic + MC.
* ``run`` — execute an experiment plan JSON, writing results + summary.

Every invocation that writes files also writes a manifest JSON next to its
primary output (``manifest.json`` inside the output directory for ``run``)
recording the tool version, the resolved configuration, input/output SHA-256
digests, and wall-clock time.  Errors go to stderr with exit code 1; usage
problems exit 2 via argparse.
"""

import argparse
import json
import sys
import time

from gridcrc import __version__, fileio
from gridcrc import generators as gens
from gridcrc.core import (
    InvalidInputError,
    empirical_risk,
    loss_monotonize,
    risk_monotonize,
)
from gridcrc.corrections import (
    DEFAULT_DELTA,
    DEFAULT_PERCENTILE,
    DEFAULT_RESAMPLES,
    CorrectionSpec,
    bernstein_correction,
    empirical_bernstein_correction,
    hoeffding_correction,
    min_combined_correction,
)
from gridcrc.harness import ExperimentPlan, counterexample_sweep, run_experiment
from gridcrc.selectors import (
    METHOD_NAMES,
    ConfigurationError,
    MethodConfig,
    method_correction,
    select,
)

PHASE_HEADER = (
    "n",
    "m",
    "analytic_risk",
    "mc_risk",
    "mc_std_error",
    "controlled",
    "control_bound",
    "violation_bound",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _write_manifest(
    manifest_path,
    argv: list[str],
    args: argparse.Namespace,
    inputs: list[str],
    outputs: list[str],
    started: float,
) -> None:
    config = {
        k: v for k, v in vars(args).items() if k not in ("func",) and not k.startswith("_")
    }
    manifest = {
        "tool": "gridcrc",
        "version": __version__,
        "command": argv,
        "config": config,
        "inputs": {str(p): fileio.file_digest(p) for p in inputs},
        "outputs": {str(p): fileio.file_digest(p) for p in outputs},
        "wall_clock_seconds": time.monotonic() - started,
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


# ---------------------------------------------------------------------------
# correct
# ---------------------------------------------------------------------------


def _one_correction(kind: str, m: int, n: int, bound: float, sigma, delta):
    if kind == "hoeffding":
        if sigma is not None:
            raise ConfigurationError("--sigma does not apply to --kind hoeffding")
        if delta is not None:
            raise ConfigurationError("--delta does not apply to --kind hoeffding")
        return hoeffding_correction(m, n, bound)
    if sigma is None:
        raise ConfigurationError(f"--kind {kind} requires --sigma")
    if kind == "bernstein":
        if delta is not None:
            raise ConfigurationError("--delta does not apply to --kind bernstein")
        return bernstein_correction(m, n, bound, sigma)
    d = DEFAULT_DELTA if delta is None else delta
    if kind == "empirical-bernstein":
        return empirical_bernstein_correction(m, n, bound, sigma, delta=d)
    return min_combined_correction(m, n, bound, sigma, delta=d)


def cmd_correct(args: argparse.Namespace, argv: list[str]) -> int:
    started = time.monotonic()
    lines = [["kind", "m", "n", "bound", "sigma", "delta", "amount", "terms", "winner"]]
    for m in args.m:
        for n in args.n:
            value = _one_correction(args.kind, m, n, args.B, args.sigma, args.delta)
            terms = ";".join(f"{k}={_fmt(v)}" for k, v in value.detail.items())
            delta_used = (
                "" if args.kind in ("hoeffding", "bernstein")
                else _fmt(DEFAULT_DELTA if args.delta is None else args.delta)
            )
            lines.append(
                [
                    args.kind, str(m), str(n), _fmt(args.B),
                    "" if args.sigma is None else _fmt(args.sigma),
                    delta_used, _fmt(value.amount), terms,
                    value.winner or "",
                ]
            )
    text = "\n".join(",".join(line) for line in lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        _write_manifest(args.output + ".manifest.json", argv, args, [], [args.output], started)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------


def _build_method_config(args: argparse.Namespace) -> MethodConfig:
    spec = None
    if args.method == "crc-nm-bernstein":
        if args.sigma is None:
            raise ConfigurationError("--method crc-nm-bernstein requires --sigma")
        spec = CorrectionSpec("bernstein", args.B, sigma_max=args.sigma)
    elif args.method in ("crc-nm-empbern", "crc-nm-min") and args.delta is not None:
        kind = "empirical-bernstein" if args.method == "crc-nm-empbern" else "min-combined"
        spec = CorrectionSpec(kind, args.B, delta=args.delta)
    elif args.method == "crc-c":
        spec = CorrectionSpec(
            "bootstrap-stability", args.B,
            resamples=args.resamples, percentile=args.percentile,
        )
    return MethodConfig(args.method, args.alpha, args.B, correction=spec)


def cmd_select(args: argparse.Namespace, argv: list[str]) -> int:
    started = time.monotonic()
    matrix = fileio.read_matrix_csv(args.input, bound=args.B)
    config = _build_method_config(args)
    if args.method == "crc-c" and args.seed is None:
        raise ConfigurationError("--method crc-c requires --seed for the bootstrap")
    selection = select(matrix, config, rng_seed=args.seed)
    correction = method_correction(matrix, config, rng_seed=args.seed)
    payload = {
        "method": args.method,
        "alpha": args.alpha,
        "index": selection.index,
        "lambda": selection.lam,
        "effective_level": selection.effective_level,
        "feasible": selection.feasible,
        "correction": None
        if correction is None
        else {
            "amount": correction.amount,
            "detail": correction.detail,
            "winner": correction.winner,
        },
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    outputs = []
    if args.curves_dir:
        from pathlib import Path

        curves_dir = Path(args.curves_dir)
        curves_dir.mkdir(parents=True, exist_ok=True)
        curve = empirical_risk(matrix)
        for name, c in (
            ("empirical.csv", curve),
            ("loss_monotonized.csv", empirical_risk(loss_monotonize(matrix))),
            ("risk_monotonized.csv", risk_monotonize(curve)),
        ):
            fileio.write_curve_csv(curves_dir / name, c)
            outputs.append(str(curves_dir / name))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        outputs.insert(0, args.output)
        _write_manifest(args.output + ".manifest.json", argv, args, [args.input], outputs, started)
    else:
        sys.stdout.write(text)
        if outputs:
            _write_manifest(
                outputs[0] + ".manifest.json", argv, args, [args.input], outputs, started
            )
    return 0


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace, argv: list[str]) -> int:
    started = time.monotonic()
    outputs = [args.out]
    kind = args.generator

    if kind == "bump":
        config = gens.BumpLossConfig(n=args.n, m=args.m, seed=args.seed, noise_std=args.noise_std)
        matrix, curve = gens.gen_bump(
            config,
            include_true_curve=args.true_curve is not None,
            true_curve_rows=args.true_curve_rows,
        )
        fileio.write_matrix_csv(args.out, matrix)
        if args.true_curve:
            fileio.write_curve_csv(args.true_curve, curve)
            outputs.append(args.true_curve)

    elif kind == "counterexample":
        config = gens.CounterexampleConfig(
            n=args.n, m=args.m, p=args.p, alpha=args.alpha, trials=1, seed=args.seed
        )
        stream, curve = gens.gen_counterexample(config)
        fileio.write_matrix_csv(args.out, next(stream))
        if args.true_curve:
            fileio.write_curve_csv(args.true_curve, curve)
            outputs.append(args.true_curve)

    elif kind == "multilabel":
        config = gens.MultilabelConfig(
            n_cal=args.n_cal, n_test=args.n_test, m=args.m, seed=args.seed,
            logit_noise_std=args.noise_std, model_seed=args.model_seed,
        )
        sample = gens.gen_multilabel(config)
        fileio.write_matrix_csv(args.out, sample.cal)
        if args.test_out:
            fileio.write_matrix_csv(args.test_out, sample.test)
            outputs.append(args.test_out)
        if args.sizes_out:
            fileio.write_sizes_csv(args.sizes_out, sample.cal.grid, sample.cal_sizes)
            outputs.append(args.sizes_out)
        if args.test_sizes_out:
            fileio.write_sizes_csv(args.test_sizes_out, sample.test.grid, sample.test_sizes)
            outputs.append(args.test_sizes_out)

    elif kind == "monotone":
        fileio.write_matrix_csv(args.out, gens.gen_monotone(args.n, args.m, args.seed))

    elif kind == "minimax":
        config = gens.MinimaxInstanceConfig(
            n=args.n, m=args.m, alpha=args.alpha, seed=args.seed,
            delta=args.delta, hidden_index=args.hidden,
        )
        fileio.write_matrix_csv(args.out, next(gens.gen_minimax_instance(config, trials=1)))
        if args.true_curve:
            fileio.write_curve_csv(args.true_curve, gens.minimax_true_curve(config))
            outputs.append(args.true_curve)

    elif kind == "oversize":
        config = gens.OversizeLossConfig(
            n=args.n, m=args.m, seed=args.seed, variant=args.variant,
            gamma=args.gamma, k0=args.k0, tau=args.tau,
        )
        sample = gens.gen_oversize_surrogate(config)
        fileio.write_matrix_csv(args.out, sample.matrix)
        if args.sizes_out:
            fileio.write_sizes_csv(args.sizes_out, sample.matrix.grid, sample.sizes)
            outputs.append(args.sizes_out)

    elif kind == "lipschitz":
        config = gens.LipschitzConfig(
            n=args.n, seed=args.seed, m=args.m, alpha=args.alpha, epsilon=args.epsilon
        )
        matrix, curve = gens.gen_lipschitz(config)
        fileio.write_matrix_csv(args.out, matrix)
        if args.true_curve:
            fileio.write_curve_csv(args.true_curve, curve)
            outputs.append(args.true_curve)

    elif kind == "two-group-shift":
        config = gens.TwoGroupShiftConfig(n_cal=args.n_cal, n_test=args.n_test, seed=args.seed)
        sample = gens.gen_two_group_shift(config)
        fileio.write_matrix_csv(args.out, sample.cal)
        if args.test_out:
            fileio.write_matrix_csv(args.test_out, sample.test)
            outputs.append(args.test_out)
        if args.weights_out:
            import csv as _csv

            with open(args.weights_out, "w", newline="") as fh:
                writer = _csv.writer(fh)
                writer.writerow(["sample_id", "weight"])
                for i, w in enumerate(sample.weights.weights):
                    writer.writerow([i, _fmt(w)])
            outputs.append(args.weights_out)

    _write_manifest(args.out + ".manifest.json", argv, args, [], outputs, started)
    return 0


# ---------------------------------------------------------------------------
# simulate-counterexample
# ---------------------------------------------------------------------------


def cmd_simulate_counterexample(args: argparse.Namespace, argv: list[str]) -> int:
    started = time.monotonic()
    cells = counterexample_sweep(
        p=args.p, alpha=args.alpha, n_values=args.n, m_values=args.m,
        trials=args.trials, seed=args.seed,
    )
    lines = [",".join(PHASE_HEADER)]
    for c in cells:
        lines.append(
            ",".join(
                [
                    str(c.n), str(c.m), _fmt(c.analytic_risk),
                    "" if c.mc_risk is None else _fmt(c.mc_risk),
                    "" if c.mc_std_error is None else _fmt(c.mc_std_error),
                    "true" if c.controlled else "false",
                    _fmt(c.control_bound), _fmt(c.violation_bound),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _write_manifest(args.out + ".manifest.json", argv, args, [], [args.out], started)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def _plan_from_json(payload: dict, master_seed_override: int | None) -> ExperimentPlan:
    try:
        generator = dict(payload["generator"])
        name = generator.pop("name")
        bound = float(payload["bound"])
        methods = []
        for entry in payload["methods"]:
            spec = None
            if "correction" in entry and entry["correction"] is not None:
                c = dict(entry["correction"])
                spec = CorrectionSpec(
                    c.pop("kind"), bound,
                    sigma_max=c.pop("sigma_max", None),
                    delta=c.pop("delta", None),
                    resamples=c.pop("resamples", DEFAULT_RESAMPLES),
                    percentile=c.pop("percentile", DEFAULT_PERCENTILE),
                )
                if c:
                    raise ConfigurationError(f"unknown correction keys in plan: {sorted(c)}")
            methods.append(
                MethodConfig(entry["method"], float(entry["alpha"]), bound, correction=spec)
            )
        master_seed = int(payload["master_seed"])
        if master_seed_override is not None:
            master_seed = master_seed_override
        return ExperimentPlan(
            generator=name,
            generator_config=generator,
            methods=tuple(methods),
            repetitions=int(payload["repetitions"]),
            n_cal=int(payload["n_cal"]),
            n_test=int(payload["n_test"]),
            master_seed=master_seed,
            weighted_alpha=payload.get("weighted_alpha"),
        )
    except KeyError as exc:
        raise ConfigurationError(f"plan is missing required key {exc}") from exc


def cmd_run(args: argparse.Namespace, argv: list[str]) -> int:
    from pathlib import Path

    started = time.monotonic()
    with open(args.plan) as fh:
        payload = json.load(fh)
    plan = _plan_from_json(payload, args.master_seed)
    report = run_experiment(plan)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.json"
    fileio.write_results_csv(results_path, report.records)
    fileio.write_summary_json(summary_path, report.summary)
    _write_manifest(
        out_dir / "manifest.json", argv, args,
        [args.plan], [str(results_path), str(summary_path)], started,
    )
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridcrc",
        description="Risk-controlling threshold selection on finite grids.",
    )
    parser.add_argument("--version", action="version", version=f"gridcrc {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("correct", help="tabulate grid-correction amounts")
    p.add_argument("--kind", required=True,
                   choices=["hoeffding", "bernstein", "empirical-bernstein", "min-combined"])
    p.add_argument("--m", type=_int_list, required=True, help="comma-separated grid sizes")
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated sample sizes")
    p.add_argument("--B", type=float, default=1.0, help="loss bound (default 1)")
    p.add_argument("--sigma", type=float, default=None,
                   help="per-column std-dev bound (bernstein) or plug-in estimate")
    p.add_argument("--delta", type=float, default=None,
                   help=f"confidence slack (default {DEFAULT_DELTA})")
    p.add_argument("--output", default=None, help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("select", help="run one selection method on a loss-matrix CSV")
    p.add_argument("--input", required=True, help="loss-matrix CSV")
    p.add_argument("--method", required=True, choices=list(METHOD_NAMES))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--B", type=float, default=1.0, help="loss bound (default 1)")
    p.add_argument("--seed", type=int, default=None, help="bootstrap seed (crc-c)")
    p.add_argument("--sigma", type=float, default=None, help="std-dev bound (crc-nm-bernstein)")
    p.add_argument("--delta", type=float, default=None, help="confidence slack")
    p.add_argument("--resamples", type=int, default=DEFAULT_RESAMPLES)
    p.add_argument("--percentile", type=float, default=DEFAULT_PERCENTILE)
    p.add_argument("--output", default=None, help="write the JSON here instead of stdout")
    p.add_argument("--curves-dir", default=None,
                   help="also write empirical/monotonized risk-curve CSVs here")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("generate", help="write a synthetic loss matrix to CSV")
    gsub = p.add_subparsers(dest="generator", required=True)

    def add_common(gp, n_flag=True):
        if n_flag:
            gp.add_argument("--n", type=int, required=True)
        gp.add_argument("--seed", type=int, required=True)
        gp.add_argument("--out", required=True, help="loss-matrix CSV path")

    gp = gsub.add_parser("bump", help="smooth decay plus a mid-grid bump")
    add_common(gp)
    gp.add_argument("--m", type=int, required=True)
    gp.add_argument("--noise-std", type=float, default=0.01, dest="noise_std")
    gp.add_argument("--true-curve", default=None, help="also write the estimated true curve")
    gp.add_argument("--true-curve-rows", type=int, default=1_000_000)
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("counterexample", help="needle-in-haystack binary losses")
    add_common(gp)
    gp.add_argument("--m", type=int, required=True)
    gp.add_argument("--p", type=float, required=True)
    gp.add_argument("--alpha", type=float, required=True)
    gp.add_argument("--true-curve", default=None)
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("multilabel", help="precision-style losses from a synthetic classifier")
    gp.add_argument("--n-cal", type=int, required=True, dest="n_cal")
    gp.add_argument("--n-test", type=int, required=True, dest="n_test")
    gp.add_argument("--m", type=int, required=True)
    gp.add_argument("--seed", type=int, required=True)
    gp.add_argument("--noise-std", type=float, default=1.0, dest="noise_std")
    gp.add_argument("--model-seed", type=int, default=None, dest="model_seed",
                    help="pin the classifier; omit to derive it from --seed")
    gp.add_argument("--out", required=True)
    gp.add_argument("--test-out", default=None, dest="test_out")
    gp.add_argument("--sizes-out", default=None, dest="sizes_out")
    gp.add_argument("--test-sizes-out", default=None, dest="test_sizes_out")
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("monotone", help="monotone power-decay losses")
    add_common(gp)
    gp.add_argument("--m", type=int, required=True)
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("minimax", help="hidden low-risk column among decoys")
    add_common(gp)
    gp.add_argument("--m", type=int, required=True)
    gp.add_argument("--alpha", type=float, required=True)
    gp.add_argument("--delta", type=float, default=None)
    gp.add_argument("--hidden", default="random",
                    type=lambda s: s if s == "random" else int(s),
                    help="hidden column index, or 'random' (default)")
    gp.add_argument("--true-curve", default=None,
                    help="requires a fixed --hidden index")
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("oversize", help="miss/oversize detection surrogate")
    add_common(gp)
    gp.add_argument("--m", type=int, required=True)
    gp.add_argument("--variant", choices=["ramp", "indicator"], default="ramp")
    gp.add_argument("--gamma", type=float, default=0.35)
    gp.add_argument("--k0", type=int, default=3)
    gp.add_argument("--tau", type=float, default=5.0)
    gp.add_argument("--sizes-out", default=None, dest="sizes_out")
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("lipschitz", help="slowly varying profile with sign-flip rows")
    add_common(gp)
    gp.add_argument("--m", type=int, default=21)
    gp.add_argument("--alpha", type=float, default=0.3)
    gp.add_argument("--epsilon", type=float, default=0.05)
    gp.add_argument("--true-curve", default=None)
    gp.set_defaults(func=cmd_generate)

    gp = gsub.add_parser("two-group-shift", help="covariate shift with a rare risky group")
    gp.add_argument("--n-cal", type=int, required=True, dest="n_cal")
    gp.add_argument("--n-test", type=int, required=True, dest="n_test")
    gp.add_argument("--seed", type=int, required=True)
    gp.add_argument("--out", required=True)
    gp.add_argument("--test-out", default=None, dest="test_out")
    gp.add_argument("--weights-out", default=None, dest="weights_out")
    gp.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate-counterexample", help="phase table over (n, m) cells")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--m", type=_int_list, required=True)
    p.add_argument("--trials", type=int, default=0,
                   help="Monte Carlo trials per cell (0 = analytic only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_simulate_counterexample)

    p = sub.add_parser("run", help="execute an experiment plan JSON")
    p.add_argument("--plan", required=True, help="plan JSON path")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--master-seed", type=int, default=None, dest="master_seed",
                   help="override the plan's master seed")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, list(argv))
    except (InvalidInputError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
