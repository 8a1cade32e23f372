"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 infeasible problem,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import artifacts, published
from .config import Architecture, ExperimentConfig, load_config, resolve
from .metric import mismatch_mse
from .model import ConfigError, IncompleteBasisError, InvariantError, dump_basis, load_basis
from .montecarlo import run_simulation
from .optimize import descend_multistart
from .repset import CapacityError, is_complete

log = logging.getLogger("dacopt")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4

METRIC_COLUMNS = ["name", "series", "switches", "raw", "normalized"]
SUMMARY_COLUMNS = ["name", "series", "switches", "raw", "normalized", "mean_db", "mean_of_db",
                   "mean_linear_db", "yield_quantile", "yield_db", "min_db", "max_db", "realizations"]


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML experiment file")
    parser.add_argument("--seed", type=int, help="root random seed (u64)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--realizations", type=int, help="Monte Carlo realizations")
    parser.add_argument("--sigma-delta", type=float, dest="sigma_delta", help="unit-source relative std")
    parser.add_argument("--quantile", type=float, help="yield quantile, e.g. 0.95")
    parser.add_argument("-v", "--verbose", action="store_true")


def _config(args, **forced) -> ExperimentConfig:
    """Config file (or defaults), then command-line flags, then command-specific settings."""
    cfg = load_config(args.config, seed=args.seed, out=args.out, realizations=args.realizations,
                      sigma_delta=args.sigma_delta, quantile=args.quantile)
    for key, value in forced.items():
        setattr(cfg, key, value)
    return cfg.validate()


def _metric_row(arch: Architecture, pmf, sigma_delta: float) -> dict:
    value = mismatch_mse(arch.mapping, pmf, sigma_delta)
    return {"name": arch.name, "series": arch.series, "switches": arch.basis.length,
            "raw": value.raw, "normalized": value.normalized}


def _print_rows(rows, columns) -> None:
    print("  ".join(f"{c:>14}" for c in columns))
    for row in rows:
        cells = []
        for c in columns:
            v = row.get(c)
            cells.append(f"{v:>14.6g}" if isinstance(v, float) else f"{str(v):>14}")
        print("  ".join(cells))


def cmd_metric(args) -> int:
    cfg = _config(args)
    pmf = cfg.pmf_dist()
    rows = [_metric_row(resolve(spec, cfg, pmf), pmf, cfg.sigma_delta) for spec in cfg.architectures]
    artifacts.write(Path(cfg.out) / "metric.csv", artifacts.table_csv(rows, METRIC_COLUMNS, cfg.echo()))
    _print_rows(rows, METRIC_COLUMNS)
    return EXIT_OK


def cmd_optimize(args) -> int:
    forced = {}
    if args.basis:
        forced["architectures"] = [f"basis:{args.basis}"]
    elif args.length:
        forced["architectures"] = [f"optimize:{args.length}"]
    elif args.config is None:
        forced["architectures"] = ["optimize:13"]
    cfg = _config(args, **forced)
    pmf = cfg.pmf_dist()
    out = Path(cfg.out)
    echo = cfg.echo()
    rows = []
    for spec in cfg.architectures:
        arch = resolve(spec, cfg, pmf)
        artifacts.write(out / f"{arch.name}.basis.yaml", dump_basis(arch.basis))
        artifacts.write(out / f"{arch.name}.mapping.csv", artifacts.mapping_csv(arch.mapping, echo))
        if arch.trace is not None:
            t = arch.trace
            artifacts.write(out / f"{arch.name}.trace.csv",
                            artifacts.trace_csv(t.values, t.changes, t.temperatures, echo))
        rows.append(_metric_row(arch, pmf, cfg.sigma_delta))
        print(f"{arch.name}: basis {list(arch.basis.weights)} raw {rows[-1]['raw']:.6f} "
              f"normalized {rows[-1]['normalized']:.6f}")
    artifacts.write(out / "optimize.csv", artifacts.table_csv(rows, METRIC_COLUMNS, echo))
    return EXIT_OK


def _simulate_rows(cfg: ExperimentConfig, archs, out: Path | None, echo: dict):
    pmf = cfg.pmf_dist()
    sim = cfg.sim_config()
    sigma_s = None
    if sim.mode == "sampled":
        kind, _, arg = echo["pmf"].partition(":")
        if kind != "gaussian":
            raise ConfigError("sampled mode draws a Gaussian waveform; use a gaussian pmf")
        sigma_s = float(arg)
    rows = []
    for arch in archs:
        dist = run_simulation(arch.mapping, pmf, sim, sigma_s=sigma_s)
        if out is not None:
            text = artifacts.header(artifacts.SNDR_SCHEMA, echo, architecture=arch.name) + dist.to_csv()
            artifacts.write(out / f"{arch.name}.sndr.csv", text)
        row = _metric_row(arch, pmf, cfg.sigma_delta)
        row.update(dist.summary())
        rows.append(row)
    return rows


def cmd_simulate(args) -> int:
    cfg = _config(args)
    pmf = cfg.pmf_dist()
    out = Path(cfg.out)
    echo = cfg.echo()
    archs = [resolve(spec, cfg, pmf) for spec in cfg.architectures]
    rows = _simulate_rows(cfg, archs, out, echo)
    artifacts.write(out / "summary.csv", artifacts.table_csv(rows, SUMMARY_COLUMNS, echo))
    artifacts.write(out / "summary.json",
                    json.dumps({"config": echo, "architectures": rows}, indent=2, sort_keys=True) + "\n")
    _print_rows(rows, ["name", "switches", "normalized", "mean_db", "yield_db"])
    return EXIT_OK


def cmd_export_lut(args) -> int:
    basis = load_basis(args.basis)
    mapping_path = Path(args.mapping)
    try:
        text = mapping_path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read mapping {mapping_path}: {exc.strerror}") from None
    table = artifacts.parse_mapping_csv(text, basis, str(mapping_path))
    out = Path(args.out or ".")
    name = mapping_path.name.removesuffix(".csv").removesuffix(".mapping")
    path = artifacts.write(out / f"{name}.lut.txt", artifacts.lut_text(table))
    print(path)
    return EXIT_OK


def _table1_check(cfg: ExperimentConfig, pmf) -> str:
    lines = ["# schema: dacopt-table1-check/1",
             "# config: " + json.dumps(cfg.echo(), sort_keys=True, separators=(",", ":")),
             "series,L,complete,raw,normalized,basis"]
    for series, bases in (("published", published.PUBLISHED_BASES), ("reference", published.REFERENCE_BASES)):
        for length in sorted(bases):
            basis = (published.published_basis if series == "published" else published.reference_basis)(length)
            complete = is_complete(basis)
            raw = normalized = ""
            if complete:
                table, _ = descend_multistart(basis, pmf, cfg.descent_config(), restarts=cfg.descent.restarts)
                value = mismatch_mse(table, pmf, cfg.sigma_delta)
                raw, normalized = repr(value.raw), repr(value.normalized)
            lines.append(f"{series},{length},{'yes' if complete else 'NO'},{raw},{normalized},"
                         + " ".join(map(str, basis.weights)))
    return "\n".join(lines) + "\n"


def _table2_check(cfg: ExperimentConfig, pmf) -> str:
    basis = published.published_basis(13)
    table, _ = descend_multistart(basis, pmf, cfg.descent_config(), restarts=cfg.descent.restarts)
    lines = ["# schema: dacopt-table2-check/1",
             "# basis: " + " ".join(map(str, basis.weights)),
             "# config: " + json.dumps(cfg.echo(), sort_keys=True, separators=(",", ":")),
             "codeword,published_bits,decoded,decodes,descended_bits,same_as_published"]
    for x, bits in sorted(published.PUBLISHED_ROWS.items()):
        decoded = sum(w for w, b in zip(basis.weights, bits) if b == "1")
        ours = artifacts.bit_string(table.bits[x])
        lines.append(f"{x},{bits},{decoded},{'yes' if decoded == x else 'NO'},{ours},"
                     f"{'yes' if ours == bits else 'no'}")
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    series = args.series
    optimized = ([f"published:{L}" for L in sorted(published.PUBLISHED_BASES)] if series == "published"
                 else [f"reference:{L}" for L in sorted(published.REFERENCE_BASES)])
    cfg = _config(args, architectures=["segmented:2", "segmented:3", "segmented:4", *optimized])
    pmf = cfg.pmf_dist()
    out = Path(cfg.out)
    echo = cfg.echo()
    archs = [resolve(spec, cfg, pmf) for spec in cfg.architectures]
    metric_rows = [_metric_row(a, pmf, cfg.sigma_delta) for a in archs]
    artifacts.write(out / "fig2_metric.csv",
                    artifacts.table_csv(metric_rows, METRIC_COLUMNS, echo))
    rows = _simulate_rows(cfg, archs, None, echo)
    artifacts.write(out / "fig3_mean_sndr.csv", artifacts.table_csv(
        rows, ["name", "series", "switches", "mean_db", "mean_of_db", "mean_linear_db", "realizations"], echo))
    artifacts.write(out / "fig4_yield_sndr.csv", artifacts.table_csv(
        rows, ["name", "series", "switches", "yield_quantile", "yield_db", "realizations"], echo))
    artifacts.write(out / "table1_check.txt", _table1_check(cfg, pmf))
    artifacts.write(out / "table2_check.txt", _table2_check(cfg, pmf))
    _print_rows(rows, ["name", "switches", "normalized", "mean_db", "yield_db"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dacopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metric", help="closed-form mismatch metric per architecture")
    _common(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("optimize", help="anneal a basis, or descend a mapping for a given basis")
    _common(p)
    p.add_argument("--length", type=int, help="basis length L to anneal")
    p.add_argument("--basis", help="basis file: only optimize the mapping")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte Carlo SNDR statistics")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export-lut", help="write the codeword->switch lookup table")
    p.add_argument("basis", help="basis file")
    p.add_argument("mapping", help="mapping CSV")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_export_lut)

    p = sub.add_parser("reproduce", help="regenerate all figure and table data")
    _common(p)
    p.add_argument("--series", choices=["published", "reference"], default="published",
                   help="optimized bases to compare against segmentation")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"dacopt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IncompleteBasisError, CapacityError) as exc:
        print(f"dacopt: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvariantError as exc:
        print(f"dacopt: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
