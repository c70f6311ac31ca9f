"""Command-line interface: run one experiment, sweep the bid-delay fraction,
generate synthetic workloads, and validate trace files."""
from __future__ import annotations

import argparse
import sys

import yaml

from . import __version__
from .experiment import (
    ConfigError,
    emit_csv,
    load_config,
    parse_synthetic_section,
    run_experiment,
    sweep_phi,
)
from .workload import LoadReport, parse_swf, serialize_swf, synth_generate


def _cmd_run(args) -> int:
    config = load_config(args.config, seed_override=args.seed)
    report = run_experiment(config)
    per_resource, federation = emit_csv([report], args.out)
    print(f"run phi={report.phi} seed={report.seed} policy={report.policy}")
    print(
        f"  submitted={report.jobs_submitted} accepted={report.jobs_accepted} "
        f"dropped={report.jobs_dropped}"
    )
    print(
        f"  earnings={report.total_earnings:.2f} avg_response={report.avg_response_time:.2f} "
        f"avg_msgs/job={report.avg_messages_per_job:.2f}"
    )
    print(f"  wrote {per_resource} and {federation}")
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config, seed_override=args.seed)
    phi_values = [float(v) for v in args.phi.split(",") if v.strip() != ""]
    if not phi_values:
        raise ConfigError("--phi must list at least one value")
    reports = sweep_phi(config, phi_values, workers=args.workers)
    per_resource, federation = emit_csv(reports, args.out)
    for report in sorted(reports, key=lambda r: r.phi):
        print(
            f"phi={report.phi}: earnings={report.total_earnings:.2f} "
            f"accepted={report.jobs_accepted}/{report.jobs_submitted} "
            f"avg_response={report.avg_response_time:.2f} "
            f"msgs/job={report.avg_messages_per_job:.2f}"
        )
    print(f"wrote {per_resource} and {federation}")
    return 0


def _cmd_gen_workload(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"{args.spec}: expected a synthetic workload mapping")
    spec = parse_synthetic_section(raw, "synthetic spec")
    jobs = synth_generate(spec)
    serialize_swf(jobs, args.out, header=f"generated by gridfed {__version__}")
    print(f"wrote {len(jobs)} jobs to {args.out}")
    return 0


def _cmd_validate_trace(args) -> int:
    report = LoadReport()
    jobs = parse_swf(args.file, report)
    print(f"{args.file}: {report.rows} data rows, {report.comments} comments")
    print(f"  valid jobs: {len(jobs)}, skipped rows: {report.skipped}")
    if report.skipped_lines:
        shown = ", ".join(str(n) for n in report.skipped_lines[:10])
        more = "" if report.skipped <= 10 else f" (+{report.skipped - 10} more)"
        print(f"  skipped at lines: {shown}{more}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridfed",
        description="SLA-bid federation superscheduling simulator",
    )
    parser.add_argument("--version", action="version", version=f"gridfed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment and write the CSVs")
    p_run.add_argument("--config", required=True, help="experiment config file")
    p_run.add_argument("--out", required=True, help="output directory for the CSVs")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run one experiment per phi value")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument(
        "--phi", required=True, help="comma-separated bid-delay fractions, e.g. 0,0.1,0.2"
    )
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--workers", type=int, default=1, help="parallel runs (isolated)")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_gen = sub.add_parser("gen-workload", help="generate a synthetic trace as SWF")
    p_gen.add_argument("--spec", required=True, help="YAML synthetic workload spec")
    p_gen.add_argument("--out", required=True, help="output SWF path")
    p_gen.set_defaults(func=_cmd_gen_workload)

    p_val = sub.add_parser("validate-trace", help="parse a trace and report row counts")
    p_val.add_argument("--file", required=True)
    p_val.set_defaults(func=_cmd_validate_trace)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
