"""Command-line entry point: ``xorshiftstar <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import metrics
from .engines import (
    MULTIPLIERS, SHIPPED, Engine, EngineState, OutputMode, Variant, XorshiftParams,
    emit, seed_schedule,
)
from .jump import JumpMask, apply_jump, jump_mask, parse_power
from .period import FactorTableError, certify, enumerate_64, enumerate_highdim, factor_table

log = logging.getLogger("xorshiftstar")

FAMILIES = ("x64", "x64star", "x1024", "x1024star", "x4096", "x4096star")
_WORDS = {"x64": 1, "x1024": 16, "x4096": 64}
_CHUNK = 1 << 16


class UsageError(Exception):
    pass


def parse_multiplier(text: str) -> int:
    if text in MULTIPLIERS:
        return MULTIPLIERS[text]
    try:
        return int(text, 0)
    except ValueError:
        raise UsageError(f"bad multiplier {text!r}; use M32, M8, M2 or an odd integer") from None


def parse_abc(text: str) -> tuple[int, int, int]:
    try:
        a, b, c = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--abc wants three comma-separated shifts, got {text!r}") from None
    return a, b, c


def build_params(args) -> XorshiftParams:
    family = args.family
    star = family.endswith("star")
    base = family.removesuffix("star")
    preset = SHIPPED[base + "star"]
    abc = parse_abc(args.abc) if args.abc else (preset.a, preset.b, preset.c)
    if args.mult is not None:
        if not star:
            raise UsageError(f"--mult applies to scrambled families; use {base}star")
        mult = parse_multiplier(args.mult)
    else:
        mult = preset.multiplier if star else None
    try:
        if base == "x64":
            variant = args.variant or preset.variant.value
            return XorshiftParams.single(variant, *abc, multiplier=mult)
        if args.variant not in (None, "HD"):
            raise UsageError(f"--variant does not apply to {family}")
        return XorshiftParams.highdim(*abc, _WORDS[base], multiplier=mult)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seed_states(args, params: XorshiftParams) -> list[tuple[int | None, EngineState]]:
    if args.state_in:
        return [(None, EngineState.loads(Path(args.state_in).read_text()))]
    if args.schedule is not None:
        states = seed_schedule(params.n_bits, args.schedule_count)
        if args.schedule == "all":
            return list(enumerate(states))
        i = int(args.schedule)
        if not 0 <= i < len(states):
            raise UsageError(f"schedule index {i} out of range 0..{len(states) - 1}")
        return [(i, states[i])]
    try:
        words = [int(tok, 0) for tok in args.seed.split(",")]
        if len(words) == 1:
            return [(None, EngineState.from_int(words[0], params.t))]
        if len(words) > params.t:
            raise UsageError(f"{len(words)} seed words for a {params.t}-word state")
        # missing high words are zero, as for an integer seed
        return [(None, EngineState.seeded(words + [0] * (params.t - len(words))))]
    except ValueError as exc:
        raise UsageError(f"bad seed: {exc}") from None


def _add_generator_flags(p: argparse.ArgumentParser, seeds: bool = False) -> None:
    p.add_argument("--family", choices=FAMILIES, default="x64star")
    p.add_argument("--variant", choices=[v.value for v in Variant],
                   help="one-word algorithm A0..A7 (default: A1, the shipped one)")
    p.add_argument("--abc", help="shift triple a,b,c (default: the family's shipped triple)")
    p.add_argument("--mult", help="multiplier: M32, M8, M2 or an odd integer")
    if seeds:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--seed", default="1",
                       help="seed integer, or comma-separated words, least significant first")
        g.add_argument("--schedule", help="index into the equispaced seed schedule, or 'all'")
        g.add_argument("--state-in", help="resume from a serialized state file")
        p.add_argument("--schedule-count", type=int, default=100)


# --- subcommands -----------------------------------------------------------------------------

def cmd_emit(args) -> int:
    params = build_params(args)
    mode = OutputMode(args.mode)
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    seeds = _seed_states(args, params)
    if len(seeds) > 1 and not args.out:
        raise UsageError("--schedule all writes one file per seed; give --out PREFIX")
    for index, state in seeds:
        if args.out and index is not None and len(seeds) > 1:
            path = f"{args.out}.{index:03d}.bin"
        else:
            path = args.out
        sink = open(path, "wb") if path else sys.stdout.buffer
        try:
            remaining = args.count
            while remaining:
                n = min(remaining, _CHUNK)
                sink.write(emit(state, params, mode, n))
                remaining -= n
            sink.flush()
        finally:
            if path:
                sink.close()
        if args.state_out:
            out = args.state_out if len(seeds) == 1 else f"{args.state_out}.{index:03d}"
            Path(out).write_text(state.dumps())
    return 0


def cmd_enumerate(args) -> int:
    bits = args.bits
    try:
        if args.factors:
            factor_table(bits, args.factors)
        else:
            factor_table(bits)
    except (FactorTableError, OSError) as exc:
        raise UsageError(f"factor table for 2^{bits}-1: {exc}") from None
    if bits == 64:
        rows = enumerate_64(jobs=args.jobs)
    else:
        rows = enumerate_highdim(bits // 64, jobs=args.jobs)
    out = sys.stdout
    out.write("a,b,c,weight\n")
    for row in rows:
        out.write(",".join(map(str, row)) + "\n")
    print(f"{len(rows)} full-period parameter sets for {bits} bits", file=sys.stderr)
    return 0


def cmd_certify(args) -> int:
    params = build_params(args)
    cert = certify(params)
    print(f"{params.linear_id}: {'full period' if cert.primitive else 'NOT full period'}"
          f" (weight {cert.weight}{', ' + cert.reason if cert.reason else ''})")
    return 0 if cert.primitive else 1


def cmd_jumpmask(args) -> int:
    params = build_params(args)
    mask = jump_mask(params, parse_power(args.j))
    text = mask.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_jump(args) -> int:
    params = build_params(args)
    mask = JumpMask.loads(Path(args.mask).read_text())
    state = EngineState.loads(Path(args.state).read_text())
    try:
        apply_jump(state, mask, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = state.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_escape(args) -> int:
    params = build_params(args)
    curve = metrics.escape_zeroland(params, args.outputs, args.window, args.stride)
    if args.csv:
        Path(args.csv).write_text(curve.to_csv())
    sys.stdout.write(metrics.format_escape_table([(str(params), curve)]))
    return 0


def cmd_probe(args) -> int:
    params = build_params(args)
    states = seed_schedule(params.n_bits, args.seeds)
    if args.kind == "lincomp":
        for i, st in enumerate(states):
            bits = metrics.output_bit_stream(Engine(params, st), args.length, args.bit)
            print(f"seed {i}: linear complexity {metrics.linear_complexity(bits)}")
        return 0
    need = args.rows * args.cols * args.matrices
    fails = 0
    for i, st in enumerate(states):
        engine = Engine(params, st)
        if args.high32:
            bits = metrics.high_bits_stream(engine, need)
        else:
            bits = metrics.output_bit_stream(engine, need, args.bit)
        p = metrics.rank_probe(bits, args.rows, args.cols, args.matrices)
        failed = not metrics.FAIL_LOW <= p <= metrics.FAIL_HIGH
        fails += failed
        print(f"seed {i}: p = {p:.3e}{'  FAIL' if failed else ''}")
    print(f"{fails}/{len(states)} seeds outside [{metrics.FAIL_LOW}, {metrics.FAIL_HIGH}]")
    return 0


def cmd_score(args) -> int:
    try:
        records = metrics.read_score_csv(args.csv)
    except metrics.ScoreFormatError as exc:
        raise UsageError(f"{args.csv}: {exc}") from None
    scores = metrics.aggregate_scores(records)
    sys.stdout.write(metrics.format_score_table(scores))
    if args.per_test:
        for gen, sc in scores.items():
            for (stream, test), n in sc.per_test.items():
                print(f"{gen},{stream},{test},{n}")
    return 0


def cmd_bench(args) -> int:
    names = args.generators or list(SHIPPED)
    unknown = sorted(set(names) - set(SHIPPED))
    if unknown:
        raise UsageError(f"unknown generator(s) {', '.join(unknown)}; known: {', '.join(SHIPPED)}")
    timings = {}
    for name in names:
        params = SHIPPED[name]
        Engine(params, 1).checksum(1000)  # compile outside the timed region
        engine = Engine(params, 1)
        start = time.perf_counter()
        checksum = engine.checksum(args.count)
        elapsed = time.perf_counter() - start
        timings[name] = elapsed * 1e9 / max(args.count, 1)
        print(f"{name:<10} {timings[name]:8.3f} ns/output  checksum 0x{checksum:016x}")
    if "x1024star" in timings and "x64star" in timings:
        order = "<=" if timings["x1024star"] <= timings["x64star"] else ">"
        log.info("x1024star %s x64star on this machine", order)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xorshiftstar", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit", help="write generator output as a byte stream")
    _add_generator_flags(p, seeds=True)
    p.add_argument("--mode", choices=[m.value for m in OutputMode], default="raw64")
    p.add_argument("--count", type=int, required=True, help="number of 64-bit outputs")
    p.add_argument("--out", help="output file (prefix with --schedule all); default stdout")
    p.add_argument("--state-out", help="write the final state here")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("enumerate", help="list full-period shift triples as CSV")
    p.add_argument("--bits", type=int, choices=(64, 1024, 4096), required=True)
    p.add_argument("--factors", help="factor table file for 2^bits-1")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("certify", help="check one parameter set for full period")
    _add_generator_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("jumpmask", help="compute a jump mask file")
    _add_generator_flags(p)
    p.add_argument("--bits", type=int, choices=(64, 1024, 4096),
                   help="state size (selects the family when given)")
    p.add_argument("--j", required=True, help="jump distance, e.g. 100 or 2^512")
    p.add_argument("--out")
    p.set_defaults(func=cmd_jumpmask)

    p = sub.add_parser("jump", help="apply a mask file to a serialized state")
    _add_generator_flags(p)
    p.add_argument("--mask", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("escape", help="escape-from-zeroland curve and summary")
    _add_generator_flags(p)
    p.add_argument("--outputs", type=int, default=100_000)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--csv", help="write the curve as position,ratio CSV")
    p.set_defaults(func=cmd_escape)

    p = sub.add_parser("probe", help="linear-artifact probes over the seed schedule")
    p.add_argument("kind", choices=("rank", "lincomp"))
    _add_generator_flags(p)
    p.add_argument("--bit", type=int, default=0)
    p.add_argument("--high32", action="store_true", help="rank probe on the upper 32 bits")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--rows", type=int, default=64)
    p.add_argument("--cols", type=int, default=64)
    p.add_argument("--matrices", type=int, default=1000)
    p.add_argument("--length", type=int, default=4096)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("score", help="aggregate test-suite p-values into failure counts")
    p.add_argument("--csv", required=True)
    p.add_argument("--per-test", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="time the shipped generators")
    p.add_argument("--count", type=lambda s: int(float(s)), default=10**9)
    p.add_argument("generators", nargs="*", metavar="GEN",
                   help=f"any of {', '.join(SHIPPED)} (default: all)")
    p.set_defaults(func=cmd_bench)
    return parser


_BITS_FAMILY = {64: "x64", 1024: "x1024", 4096: "x4096"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "bits", None) and args.command == "jumpmask":
        star = args.family.endswith("star")
        args.family = _BITS_FAMILY[args.bits] + ("star" if star else "")
    try:
        return args.func(args)
    except BrokenPipeError:
        return _quiet_pipe()
    except (UsageError, ValueError, OSError) as exc:
        print(f"xorshiftstar {args.command}: {exc}", file=sys.stderr)
        return 2


def _quiet_pipe() -> int:
    # downstream reader went away: stop quietly and keep the interpreter from
    # complaining when it flushes stdout at exit
    devnull = os.open(os.devnull, os.O_WRONLY)
    os.dup2(devnull, sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())
