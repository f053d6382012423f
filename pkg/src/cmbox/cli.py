"""Command-line entry point: ``cmbox <subcommand> [options]``.

Exit status is 0 when every check passes, 1 when any reported check fails
and 2 on invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .adversary import CalibrationResult, EveMode, EveStrategy, eve_intercept
from .errors import CMBError
from .formats import dump_shipment, dump_transcript, load_shipment, records_to_csv, records_to_jsonl


def _tol_pair(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return name.strip(), float(value)


def _odd(text):
    value = int(text)
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"must be a positive odd integer, got {value}")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _probability(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _common(p):
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, help="write result records here instead of stdout")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--tol", type=_tol_pair, action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance from the defaults table")
    p.add_argument("--config", type=Path, help="file of key=value lines supplying option defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmbox", description="Quantum magic-box simulator and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-constants", help="recompute the closed-form constants and the drawer probability table")
    _common(p)

    p = sub.add_parser("mc-drawer", help="Monte Carlo drawer reads and drawer destruction")
    _common(p)
    p.add_argument("--trials", type=_positive, default=100_000)
    p.add_argument("--drawers", type=int, choices=(2, 3), default=2)

    p = sub.add_parser("qkd", help="run the one-way key exchange")
    _common(p)
    p.add_argument("--T", type=_positive, help="block count (default: calibrated T0, else K)")
    p.add_argument("--R", type=_odd, help="qubits per block (default: smallest R meeting epsilon)")
    p.add_argument("--K", type=_positive, default=32)
    p.add_argument("--epsilon", type=_probability, default=1e-3)
    p.add_argument("--eve", choices=[m.value for m in EveMode] + ["two-qubit"], default="none")
    p.add_argument("--calibration", type=Path, help="calibration file written by 'calibrate --save'")
    p.add_argument("--message", help="text to one-time-pad with the key (at most K bits)")
    p.add_argument("--transcript", type=Path, help="write the message transcript here")
    p.add_argument("--shipment", type=Path, help="dump Alice's shipment here")

    p = sub.add_parser("calibrate", help="find the block count T0 for reliable detection")
    _common(p)
    p.add_argument("--R", type=_odd, default=5)
    p.add_argument("--epsilon", type=_probability, default=0.05)
    p.add_argument("--mc-runs", type=_positive, default=400)
    p.add_argument("--save", type=Path, help="persist the calibration as JSON for 'qkd --calibration'")

    p = sub.add_parser("distribute", help="one content per drawer; the receiver may open only one")
    _common(p)
    p.add_argument("--payload-a", type=Path, required=True)
    p.add_argument("--payload-b", type=Path, required=True)
    p.add_argument("--payload-c", type=Path, help="third content (requires --drawers 3)")
    p.add_argument("--drawers", type=int, choices=(2, 3), default=2)
    p.add_argument("--choose", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--R", type=_odd, default=9)
    p.add_argument("--recovered", type=Path, help="write the recovered content here")

    p = sub.add_parser("eve", help="filter a shipment file through the two-qubit attack")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--mode", choices=[m.value for m in EveMode], default=EveMode.TWO_QUBIT_FIXED.value)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    return parser


def _read_config(path: Path) -> dict:
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    """Turn config-file entries into defaults of the chosen subcommand, so flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is None or known.command is None:
        return
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub = subparsers.choices.get(known.command)
    if sub is None:
        return
    actions = {a.dest: a for a in sub._actions}
    try:
        config = _read_config(known.config)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    for key, raw in config.items():
        if key not in actions or key in ("config", "help"):
            parser.error(f"config key {key!r} is not an option of {known.command}")
        action = actions[key]
        convert = action.type or str
        try:
            value = [convert(v) for v in raw.split(",")] if action.default == [] else convert(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"config key {key!r}: {exc}")
        sub.set_defaults(**{key: value})


def _emit(records, args) -> None:
    text = records_to_csv(records) if args.format == "csv" else records_to_jsonl(records)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _text_bits(message: str) -> list[int]:
    return [int(b) for byte in message.encode("utf-8") for b in format(byte, "08b")]


def run(args) -> int:
    tol = dict(getattr(args, "tol", []))
    if args.command == "verify-constants":
        records = experiments.verify_constants(tol)
    elif args.command == "mc-drawer":
        records = experiments.mc_drawer(args.trials, args.drawers, args.seed, tol)
    elif args.command == "calibrate":
        result, records = experiments.calibrate_records(args.R, args.epsilon, args.mc_runs, args.seed)
        if args.save:
            args.save.write_text(json.dumps(result.to_payload(), indent=2) + "\n", encoding="utf-8")
    elif args.command == "qkd":
        calibration = None
        if args.calibration:
            calibration = CalibrationResult.from_payload(json.loads(args.calibration.read_text()))
        eve = "two_qubit_fixed" if args.eve == "two-qubit" else args.eve
        R = args.R
        if R is None and calibration is not None:
            R = calibration.R
        transcript, records = experiments.qkd(
            K=args.K, seed=args.seed, T=args.T, R=R, epsilon=args.epsilon, eve=eve,
            calibration=calibration,
            plaintext=_text_bits(args.message) if args.message else None,
        )
        if args.transcript:
            args.transcript.write_text(dump_transcript(transcript.messages), encoding="utf-8")
        if args.shipment:
            args.shipment.write_text(dump_shipment(transcript.shipment), encoding="utf-8")
    elif args.command == "distribute":
        payloads = [args.payload_a.read_bytes(), args.payload_b.read_bytes()]
        if args.drawers == 3:
            if args.payload_c is None:
                raise ValueError("--drawers 3 needs --payload-c")
            payloads.append(args.payload_c.read_bytes())
        elif args.payload_c is not None:
            raise ValueError("--payload-c needs --drawers 3")
        result = experiments.distribute(payloads, args.choose, args.R, args.seed, tol)
        records = result.records
        if args.recovered:
            args.recovered.write_bytes(result.recovered)
    elif args.command == "eve":
        shipment = load_shipment(args.input.read_text(encoding="utf-8"))
        strategy = EveStrategy(EveMode(args.mode), args.seed)
        attacked, _ = eve_intercept(shipment, strategy)
        args.output.write_text(dump_shipment(attacked), encoding="utf-8")
        return 0
    else:  # pragma: no cover - argparse rejects unknown commands
        raise AssertionError(args.command)
    _emit(records, args)
    return 0 if all(r.passed for r in records) else 1


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return run(args)
    except (CMBError, ValueError, KeyError, OSError) as exc:
        print(f"cmbox {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
