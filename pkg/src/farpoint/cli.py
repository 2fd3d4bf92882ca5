"""Command line entry points.

    farpoint simulate --technique dual_speed --seed 7 --out session.ndjson
    farpoint replay session.ndjson
    farpoint analyze results.csv --out report/ --format txt
    farpoint fit results.csv
    farpoint report results.csv --format csv --out report/
    farpoint serve --host 0.0.0.0 --port 8787 --log-dir logs/
    farpoint measure-latency --uri ws://127.0.0.1:8787/echo -n 10000

Server address flags fall back to FARPOINT_HOST / FARPOINT_PORT, then to the
configuration file.
"""

from __future__ import annotations

import argparse
import asyncio
import sys

from . import analysis, protocol
from .config import load_config, server_address
from .engine import TECHNIQUES
from .experiment import StudyDesign
from .session import verify_replay
from .simulator import simulate_run


def _add_config_arg(p):
    p.add_argument("--config", default=None, help="YAML configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="farpoint")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the synthetic operator")
    _add_config_arg(p)
    p.add_argument("--technique", choices=TECHNIQUES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="session log path (.ndjson)")
    p.add_argument("--results", default=None, help="append trial rows (CSV)")
    p.add_argument("--sets", type=int, default=None,
                   help="sets per condition (default from config)")
    p.add_argument("--practice", action="store_true",
                   help="run practice-to-criterion before the formal sets")

    p = sub.add_parser("replay", help="verify a session log reproduces itself")
    _add_config_arg(p)
    p.add_argument("log")

    p = sub.add_parser("analyze", help="summaries, fits, and report files")
    _add_config_arg(p)
    p.add_argument("results")
    p.add_argument("--out", default="report")
    p.add_argument("--format", choices=("csv", "txt"), default="txt")

    p = sub.add_parser("fit", help="print the fitted movement-time lines")
    p.add_argument("results")

    p = sub.add_parser("report", help="write report tables")
    p.add_argument("results")
    p.add_argument("--format", choices=("csv", "txt"), required=True)
    p.add_argument("--out", default="report")

    p = sub.add_parser("serve", help="run the session server")
    _add_config_arg(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--log-dir", default=None)

    p = sub.add_parser("measure-latency", help="loopback latency percentiles")
    p.add_argument("--uri", default=None,
                   help="echo endpoint (default: in-process loopback)")
    p.add_argument("-n", type=int, default=10_000)
    return parser


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    study = config.study
    if args.sets is not None:
        from dataclasses import replace
        study = replace(study, sets_per_condition=args.sets)
    design = StudyDesign(
        techniques=(args.technique,), widths=study.widths,
        amplitudes=study.amplitudes,
        sets_per_condition=study.sets_per_condition,
        participant_index=study.participant_index,
        practice=study.practice)
    scenario = config.scenario(design=design, rng_seed=args.seed,
                               include_practice=args.practice)
    result = simulate_run(scenario, config)
    session = result.sessions[args.technique]
    protocol.write_session_log(args.out, session.messages)
    print(f"{len(session.messages)} messages -> {args.out}")
    if args.results:
        analysis.write_trial_rows(args.results, session.session_id,
                                  session.records, append=True)
        print(f"{sum(len(r.trials) for r in session.records)} trials "
              f"-> {args.results}")
    accs = [r.accuracy for r in session.records]
    print(f"{len(session.records)} sets, mean accuracy "
          f"{sum(accs) / len(accs):.3f}")
    return 0


def cmd_replay(args) -> int:
    config = load_config(args.config)
    messages = protocol.load_session_log(args.log)
    try:
        outputs = verify_replay(messages, config)
    except protocol.ReplayError as e:
        print(f"replay FAILED: {e}", file=sys.stderr)
        return 1
    print(f"replay OK: {len(messages)} frames, {len(outputs)} outputs "
          f"reproduced bit for bit")
    return 0


def _load_summaries(results_path):
    rows = analysis.read_trial_rows(results_path)
    records = analysis.set_records_from_rows(rows)
    return analysis.summarize(records)


def cmd_analyze(args) -> int:
    summaries = _load_summaries(args.results)
    fits = analysis.fit_all(summaries)
    paths = analysis.emit_report(summaries, fits, args.out, fmt=args.format)
    for p in paths:
        print(f"wrote {p}")
    _print_fits(fits)
    return 0


def _print_fits(fits) -> None:
    print(f"{'technique':<12}{'a':>8}{'b':>8}{'RMSE':>8}{'R^2':>8}{'1/b':>8}")
    for tech in sorted(fits):
        f = fits[tech]
        tp = "-" if f.throughput is None else f"{f.throughput:.3f}"
        print(f"{tech:<12}{f.a:>8.3f}{f.b:>8.3f}{f.rmse:>8.3f}"
              f"{f.r_squared:>8.3f}{tp:>8}")


def cmd_fit(args) -> int:
    _print_fits(analysis.fit_all(_load_summaries(args.results)))
    return 0


def cmd_report(args) -> int:
    summaries = _load_summaries(args.results)
    fits = analysis.fit_all(summaries)
    for p in analysis.emit_report(summaries, fits, args.out, fmt=args.format):
        print(f"wrote {p}")
    return 0


def cmd_serve(args) -> int:
    from .server import run_server

    config = load_config(args.config)
    host, port = server_address(config, args.host, args.port)
    try:
        asyncio.run(run_server(config, host, port, args.log_dir))
    except KeyboardInterrupt:
        pass
    return 0


def cmd_measure_latency(args) -> int:
    from .server import (SessionServer, WebSocketTransport, measure_latency)
    from . import wsock

    async def scenario():
        server = None
        uri = args.uri
        if uri is None:
            server = SessionServer()
            await server.start("127.0.0.1", 0)
            uri = f"ws://127.0.0.1:{server.port}/echo"
        ws = await wsock.connect(uri)
        report = await measure_latency(WebSocketTransport(ws), args.n)
        await ws.close()
        if server is not None:
            await server.stop()
        return report

    report = asyncio.run(scenario())
    if report.empty:
        print(f"no echoes received (requested {report.requested})")
        return 1
    flag = " (partial)" if report.partial else ""
    print(f"one-way latency over {report.count} probes{flag}:")
    print(f"  p50 {report.p50_us / 1000:.3f} ms")
    print(f"  p90 {report.p90_us / 1000:.3f} ms")
    print(f"  p99 {report.p99_us / 1000:.3f} ms")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "replay": cmd_replay,
    "analyze": cmd_analyze,
    "fit": cmd_fit,
    "report": cmd_report,
    "serve": cmd_serve,
    "measure-latency": cmd_measure_latency,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
