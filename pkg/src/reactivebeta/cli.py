"""Command-line surface.

Five subcommands: ``estimate`` (per-stock betas over time from a price
panel), ``simulate`` (the estimator benchmark on synthetic models),
``backtest`` (beta-neutral strategies under both beta sources),
``selection-bias`` (closed-form factor bias) and ``calibrate-ell``
(leverage-gap regression on supplied series). Every run writes its
outputs plus a manifest under ``--out``.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

import numpy as np

from . import io as rio
from .benchmark import ESTIMATORS, run_benchmark
from .evaluation import SelectionBiasInputs, calibrate_ell_diff, selection_bias
from .params import ReactiveParams
from .strategies import (
    STRATEGIES,
    backtest as run_backtest,
    compute_panels,
    synthetic_universe,
)

__all__ = ["main"]


class NumericalFailure(RuntimeError):
    pass


def _load_params(config_path) -> ReactiveParams:
    if config_path is None:
        return ReactiveParams()
    parser = configparser.ConfigParser()
    read = parser.read(config_path)
    if not read:
        raise rio.IngestError(f"config file {config_path} not found")
    if not parser.has_section("reactive"):
        return ReactiveParams()
    section = parser["reactive"]
    kwargs = {}
    valid = {f.name: f.type for f in dataclass_fields(ReactiveParams)}
    for key, raw in section.items():
        if key not in valid:
            raise rio.IngestError(f"unknown reactive parameter {key!r} in config")
        if key == "hat_normalize":
            kwargs[key] = section.getboolean(key)
        elif key == "burn_in":
            kwargs[key] = section.getint(key)
        else:
            kwargs[key] = float(raw)
    return ReactiveParams(**kwargs)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_estimate(args) -> int:
    params = _load_params(args.config)
    if args.burn_in is not None:
        params = params.replace(burn_in=args.burn_in)
    universe = rio.ingest_prices(args.prices, index_ticker=args.index,
                                 caps_path=args.caps, sectors_path=args.sectors)
    panels = compute_panels(universe, params)
    out = _out_dir(args)
    dest = out / "betas.csv"
    start = max(1, params.burn_in)
    with dest.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "ticker", "reactive_beta", "ols_beta",
                         "reactive_sigma", "ols_sigma"])
        for t in range(start, universe.n_days):
            for j, ticker in enumerate(universe.tickers):
                writer.writerow([
                    universe.dates[t], ticker,
                    f"{panels.re_beta[t, j]:.8g}", f"{panels.ols_beta[t, j]:.8g}",
                    f"{panels.re_sigma[t, j]:.8g}", f"{panels.ols_sigma[t, j]:.8g}",
                ])
    inputs = [p for p in (args.prices, args.caps, args.sectors) if p]
    rio.write_manifest(out / "manifest.json", "estimate",
                       {"params": params.__dict__, "burn_in": params.burn_in},
                       inputs=inputs, outputs=[dest])
    print(f"wrote {dest}")
    return 0


def _cmd_simulate(args) -> int:
    params = _load_params(args.config)
    estimators = [e.strip() for e in args.estimator.split(",") if e.strip()]
    for e in estimators:
        if e not in ESTIMATORS:
            raise rio.IngestError(f"unknown estimator {e!r}; pick from {ESTIMATORS}")
    out = _out_dir(args)
    results = {}
    for model in args.model.split(","):
        model = model.strip()
        result = run_benchmark(model, estimators, n_paths=args.paths,
                               T=args.days, seed=args.seed, params=params)
        results[model] = result
        rio.write_table_report(out / f"table_{model}.tsv", result.rows)
        if args.dump_paths:
            from .montecarlo import McConfig, dump_batch, generate_batch
            batch = generate_batch(McConfig(model=model, T=args.days,
                                            n_paths=min(args.paths, args.dump_paths),
                                            seed=args.seed))
            dump_batch(batch, out / f"paths_{model}.csv")
    payload = {m: r.to_dict() for m, r in results.items()}
    dest = out / "simulate.json"
    rio.write_json(dest, payload)
    rio.write_manifest(out / "manifest.json", "simulate",
                       {"model": args.model, "estimators": estimators,
                        "paths": args.paths, "days": args.days,
                        "seed": args.seed, "params": params.__dict__},
                       outputs=[dest])
    for model, result in results.items():
        for name, row in result.rows.items():
            print(f"{model} {name}: bias={row.bias:+.3f}{'*' if row.bias_star else ' '} "
                  f"absd={row.absd:.3f} vratio={row.variance_ratio:.2f}")
    return 0


def _cmd_backtest(args) -> int:
    params = _load_params(args.config)
    if args.synthetic:
        universe = synthetic_universe(n_stocks=args.stocks, T=args.days,
                                      seed=args.seed, params=params)
        inputs = []
    else:
        if not args.prices:
            raise rio.IngestError("provide --prices or --synthetic")
        universe = rio.ingest_prices(args.prices, index_ticker=args.index,
                                     caps_path=args.caps, sectors_path=args.sectors)
        inputs = [p for p in (args.prices, args.caps, args.sectors) if p]
    panels = compute_panels(universe, params)
    strategies = list(STRATEGIES) if args.strategy == "all" else [args.strategy]
    sources = ["ols", "reactive"] if args.beta_source == "both" else [args.beta_source]

    out = _out_dir(args)
    report = {}
    for strat in strategies:
        report[strat] = {}
        for source in sources:
            result = run_backtest(universe, strat, source, params, panels=panels)
            report[strat][source] = {
                "bias": result.report.bias,
                "corstd": result.report.corstd,
                "n_days": len(result.returns),
                "skipped_days": result.skipped_days,
            }
            print(f"{strat:<10} {source:<9} bias={result.report.bias:+.4f} "
                  f"corstd={result.report.corstd:.4f}")
    dest = out / "backtest.json"
    rio.write_json(dest, report)
    rio.write_manifest(out / "manifest.json", "backtest",
                       {"strategy": args.strategy, "beta_source": args.beta_source,
                        "synthetic": bool(args.synthetic), "stocks": args.stocks,
                        "days": args.days, "seed": args.seed,
                        "params": params.__dict__},
                       inputs=inputs, outputs=[dest])
    return 0


def _cmd_selection_bias(args) -> int:
    inputs = SelectionBiasInputs(
        sigma_beta=args.sigma_beta, p=args.p, sigma_index=args.sigma_index,
        vol_ratio=args.vol_ratio, lambda_beta=args.lambda_beta,
        factor_vol=args.factor_vol, sigma_eta=args.sigma_eta,
    )
    result = selection_bias(inputs)
    payload = {
        "inputs": inputs.__dict__,
        "B": result.B,
        "beta_low_factor": result.beta_low_factor,
        "rho_low_factor": result.rho_low_factor,
        "rho_low_factor_pct": f"{100.0 * result.rho_low_factor:.1f}%",
        "sigma_eta": result.sigma_eta,
        "q": result.q,
    }
    out = _out_dir(args)
    dest = out / "selection_bias.json"
    rio.write_json(dest, payload)
    rio.write_manifest(out / "manifest.json", "selection-bias",
                       payload["inputs"], outputs=[dest])
    print(f"selection bias B={result.B:.4f} beta_low={result.beta_low_factor:+.4f} "
          f"rho_low={100.0 * result.rho_low_factor:.1f}%")
    return 0


def _cmd_calibrate_ell(args) -> int:
    rows = []
    with Path(args.data).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise rio.IngestError(f"{args.data}: empty file")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 3:
                raise rio.IngestError(
                    f"{args.data} line {line_no}: expected date,correlation,leverage")
            try:
                rows.append((float(row[1]), float(row[2])))
            except ValueError:
                raise rio.IngestError(
                    f"{args.data} line {line_no}: bad number") from None
    corr = np.array([r[0] for r in rows])
    lev = np.array([r[1] for r in rows])
    fit = calibrate_ell_diff(corr, lev)
    out = _out_dir(args)
    payload = {
        "slope": fit.slope, "stderr": fit.stderr, "tstat": fit.tstat,
        "r2": fit.r2, "n": fit.n, "ell_diff": fit.ell_diff,
        "intercept": fit.intercept,
    }
    dest = out / "calibrate_ell.json"
    rio.write_json(dest, payload)
    rio.write_plot_data(out / "calibrate_ell_points.csv",
                        np.diff(lev), np.diff(corr / corr.mean()),
                        fit=payload, labels=("leverage_variation", "correlation_variation"))
    rio.write_manifest(out / "manifest.json", "calibrate-ell",
                       {"data": str(args.data)}, inputs=[args.data],
                       outputs=[dest])
    print(f"slope={fit.slope:.3f} +/- {fit.stderr:.3f} (t={fit.tstat:.1f}, "
          f"R2={fit.r2:.3f}) -> ell_diff={fit.ell_diff:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reactivebeta",
        description="Leverage-aware beta estimation, benchmarks and backtests.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="INI file with a [reactive] section")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("estimate", help="per-stock betas over time from a price panel")
    common(p)
    p.add_argument("--prices", required=True)
    p.add_argument("--index", default=None, help="index column name (default: first)")
    p.add_argument("--caps", default=None)
    p.add_argument("--sectors", default=None)
    p.add_argument("--burn-in", type=int, default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("simulate", help="estimator benchmark on synthetic models")
    common(p)
    p.add_argument("--model", default="mc1", help="comma list from mc1..mc7")
    p.add_argument("--estimator", default="ols,reactive",
                   help=f"comma list from {','.join(ESTIMATORS)}")
    p.add_argument("--paths", type=int, default=2000)
    p.add_argument("--days", type=int, default=1000)
    p.add_argument("--dump-paths", type=int, default=0, metavar="N",
                   help="also dump the first N simulated paths per model")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("backtest", help="beta-neutral factor backtests")
    common(p)
    p.add_argument("--prices", default=None)
    p.add_argument("--index", default=None)
    p.add_argument("--caps", default=None)
    p.add_argument("--sectors", default=None)
    p.add_argument("--synthetic", action="store_true",
                   help="use a generated universe instead of files")
    p.add_argument("--stocks", type=int, default=100)
    p.add_argument("--days", type=int, default=1400)
    p.add_argument("--strategy", default="all", choices=("all",) + STRATEGIES)
    p.add_argument("--beta-source", default="both", choices=("ols", "reactive", "both"))
    p.set_defaults(func=_cmd_backtest)

    p = sub.add_parser("selection-bias", help="closed-form selection bias")
    common(p)
    p.add_argument("--sigma-beta", type=float, default=0.43)
    p.add_argument("--p", type=float, default=0.30)
    p.add_argument("--sigma-index", type=float, default=0.1977)
    p.add_argument("--vol-ratio", type=float, default=1.53)
    p.add_argument("--lambda-beta", type=float, default=1.0 / 90.0)
    p.add_argument("--factor-vol", type=float, default=0.0346)
    p.add_argument("--sigma-eta", type=float, default=None)
    p.set_defaults(func=_cmd_selection_bias)

    p = sub.add_parser("calibrate-ell", help="leverage-gap calibration regression")
    common(p)
    p.add_argument("--data", required=True,
                   help="CSV with columns date,correlation,leverage")
    p.set_defaults(func=_cmd_calibrate_ell)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (rio.IngestError, FileNotFoundError, configparser.Error) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
