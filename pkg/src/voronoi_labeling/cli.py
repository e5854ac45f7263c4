"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid matrix input.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path


from . import __version__
from .labeling import (
    greedy_weight_profile,
    hamming_density,
    neighbor_offsets_sheared,
    neighbor_offsets_standard,
    theoretical_hd_bound,
)
from .lattice_core import LatticeId, standard_lattice
from .matrix_io import MatrixFormatError, format_inline, parse_inline, read_matrix, write_matrix
from .modem import CodecConfig, ber_sweep, default_workers, snr_grid
from .svgplot import ber_svg
from .unimodular_group import (
    UnimodularElement,
    enumerate_group,
    group_order,
    hamming_descent,
    hd_of,
    preset_best_unimodular,
    random_seed_unimodulars,
)

OUTPUT_DIR_ENV = "VORONOI_LABELING_OUTPUT_DIR"
CSV_COLUMNS = ("ebn0_db", "bits_sent", "bit_errors", "ber", "points_sent", "lattice_errors", "ler")
SNR_CONVENTION = "Eb/N0 dB; Es=1 per IQ pair; noise variance N0/2 per real dimension"
WEIGHT_NAMES = {1: "one-bit", 2: "two-bit", 3: "three-bit", 4: "four-bit"}


class UsageError(Exception):
    pass


class MatrixInputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def output_path(path: str | os.PathLike) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def resolve_unimodular(spec: str, lattice: LatticeId, r: int) -> UnimodularElement:
    """``identity``, ``preset-best``, a matrix file, or inline rows ``"a b; c d"``."""
    n = lattice.dimension
    if spec == "identity":
        return UnimodularElement.identity(n, r)
    if spec == "preset-best":
        try:
            return preset_best_unimodular(lattice, r)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    path = Path(spec)
    try:
        if path.is_file():
            rows = read_matrix(path)
        elif ";" in spec or re.fullmatch(r"[\s\d,+-]+", spec):
            rows = parse_inline(spec)
        else:
            raise MatrixInputError(f"{spec!r} is not a preset, a matrix file or inline rows")
    except MatrixFormatError as exc:
        raise MatrixInputError(str(exc)) from None
    if len(rows) != n:
        raise MatrixInputError(f"matrix is {len(rows)}x{len(rows)}, lattice needs {n}x{n}")
    try:
        return UnimodularElement(rows, r)
    except ValueError as exc:
        raise MatrixInputError(str(exc)) from None


def _modulus(value: str) -> int:
    r = int(value)
    if r not in (2, 4, 8):
        raise argparse.ArgumentTypeError("r must be 2, 4 or 8")
    return r


def _lattice(value: str) -> LatticeId:
    try:
        return LatticeId.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --------------------------------------------------------------------------
# hd


def cmd_hd(args, out):
    lat = standard_lattice(args.lattice)
    u = resolve_unimodular(args.u, args.lattice, args.r)
    ru = neighbor_offsets_sheared(neighbor_offsets_standard(lat, args.r), u)
    hd = hamming_density(ru)
    bound = theoretical_hd_bound(lat.dimension, args.lattice.kissing_number)
    print(f"lattice {args.lattice.value}  r={args.r}  u={format_inline(u.entries)}", file=out)
    print(f"HD = {hd}", file=out)
    print(f"theoretical bound = {bound}", file=out)
    if args.offsets:
        print("R_u offsets (mod r):", file=out)
        for row in ru.offsets:
            print("  " + " ".join(str(int(x)) for x in row), file=out)
    return 0


# --------------------------------------------------------------------------
# descent


def _trace_json(res, lattice_id, r):
    return {
        "seed_u": [list(row) for row in res.seed_u.entries],
        "seed_hd": str(res.seed_hd.value),
        "best_u": [list(row) for row in res.best_u.entries],
        "best_hd": str(res.best_hd.value),
        "trace": [
            {"step": s, "generator": g, "power": p, "hd": str(hd.value)} for s, g, p, hd in res.trace
        ],
    }


def cmd_descent(args, out):
    lat = standard_lattice(args.lattice)
    seeds = random_seed_unimodulars(lat, args.r, args.seeds, args.seed, word_length=args.word_length)
    if args.include_identity:
        seeds.insert(0, UnimodularElement.identity(lat.dimension, args.r))
    results = hamming_descent(lat, args.r, seeds, args.iters, args.seed, maximize=args.maximize)
    pick = max if args.maximize else min
    best = pick(results, key=lambda res: res.best_hd.value)
    word = "worst" if args.maximize else "best"
    print(f"{args.lattice.value} r={args.r}: {len(seeds)} seeds x {args.iters} steps", file=out)
    if len(seeds) < args.seeds:
        print(f"  (only {len(seeds)} seeds with distinct HD found of {args.seeds} requested)", file=out)
    for k, res in enumerate(results):
        print(f"  seed {k:2d}: start HD {float(res.seed_hd):.4f} -> {word} {res.best_hd}", file=out)
    print(f"overall {word} HD = {best.best_hd}", file=out)

    if args.exhaustive_check:
        group = enumerate_group(lat.dimension, args.r)
        values = [hd_of(lat, g).value for g in group]
        target = max(values) if args.maximize else min(values)
        ok = best.best_hd.value == target
        print(f"exhaustive {word} over {len(group)} elements = {float(target):.4f}: "
              f"{'match' if ok else 'MISMATCH'}", file=out)
        if not ok:
            return 3

    if args.output:
        path = output_path(args.output)
        write_matrix(path, best.best_u.entries, [
            f"{args.lattice.value} r={args.r} {word} HD = {best.best_hd}",
            f"seed={args.seed} seeds={args.seeds} iters={args.iters}",
        ])
        print(f"wrote {path}", file=out)
    if args.trace:
        path = output_path(args.trace)
        payload = {
            "lattice": args.lattice.value, "r": args.r, "seed": args.seed,
            "iters": args.iters, "maximize": args.maximize,
            "runs": [_trace_json(res, args.lattice, args.r) for res in results],
        }
        path.write_text(json.dumps(payload, indent=1) + "\n")
        print(f"wrote {path}", file=out)
    return 0


# --------------------------------------------------------------------------
# ber


def format_ber_csv(meta: dict, stats) -> str:
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    lines.append(",".join(CSV_COLUMNS))
    for s in stats:
        lines.append(
            f"{s.ebn0_db:.4f},{s.bits_sent},{s.bit_errors},{s.ber:.6e},"
            f"{s.points_sent},{s.lattice_errors},{s.ler:.6e}"
        )
    return "\n".join(lines) + "\n"


def read_ber_csv(path) -> tuple[dict, list[dict]]:
    meta, rows, header = {}, [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(dict(zip(header, line.split(","))))
    return meta, rows


def _ber_curve(args, spec, label, snrs, workers):
    lat = standard_lattice(args.lattice)
    u = resolve_unimodular(spec, args.lattice, args.r)
    cfg = CodecConfig.build(lat, args.r, u)
    stats = ber_sweep(cfg, snrs, args.min_bits, args.min_errors, args.seed, workers)
    hd = hd_of(lat, u)
    meta = {
        "tool": f"voronoi-labeling {__version__}",
        "label": label,
        "lattice": args.lattice.value,
        "r": args.r,
        "unimodular": format_inline(u.entries),
        "u_digest": u.digest(),
        "hd": f"{hd.total_bit_diffs}/{hd.neighbor_count}",
        "seed": args.seed,
        "snr_start": args.snr_start,
        "snr_stop": args.snr_stop,
        "snr_step": args.snr_step,
        "min_bits": args.min_bits,
        "min_errors": args.min_errors,
        "scale": repr(cfg.scale),
        "snr_convention": SNR_CONVENTION,
    }
    return meta, stats


def _replay_args(args):
    meta, _ = read_ber_csv(args.replay)
    try:
        args.lattice = LatticeId.parse(meta["lattice"])
        args.r = int(meta["r"])
        args.u = [meta["unimodular"]]
        args.label = [meta.get("label", "curve")]
        args.seed = int(meta["seed"])
        args.snr_start = float(meta["snr_start"])
        args.snr_stop = float(meta["snr_stop"])
        args.snr_step = float(meta["snr_step"])
        args.min_bits = int(meta["min_bits"])
        args.min_errors = int(meta["min_errors"])
    except (KeyError, ValueError) as exc:
        raise UsageError(f"cannot replay {args.replay}: bad metadata ({exc})") from None


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "-", label).strip("-") or "curve"


def cmd_ber(args, out):
    if args.replay:
        _replay_args(args)
    if args.lattice is None:
        raise UsageError("--lattice is required")
    specs = args.u or ["identity"]
    if len(specs) > 3:
        raise UsageError("at most three --u curves")
    labels = list(args.label or [])
    labels += [Path(s).stem if Path(s).is_file() else s for s in specs[len(labels):]]
    try:
        snrs = snr_grid(args.snr_start, args.snr_stop, args.snr_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    workers = args.workers or default_workers()

    target = output_path(args.output)
    if len(set(labels)) != len(labels):
        raise UsageError("curve labels must be distinct")
    paths = [target] if len(specs) == 1 else [
        target.with_name(f"{target.stem}.{_slug(label)}{target.suffix}") for label in labels
    ]
    curves = []
    for spec, label, path in zip(specs, labels, paths):
        meta, stats = _ber_curve(args, spec, label, snrs, workers)
        try:
            path.write_text(format_ber_csv(meta, stats))
        except OSError as exc:
            print(f"cannot write {path}: {exc}", file=sys.stderr)
            return 1
        curves.append((f"{label} (HD {meta['hd']})", [s.ebn0_db for s in stats], [s.ber for s in stats]))
        print(f"wrote {path}", file=out)
        for s in stats:
            print(f"  {label:>12s} {s.ebn0_db:7.3f} dB  BER {s.ber:.3e}  LER {s.ler:.3e}", file=out)
    if args.svg:
        path = output_path(args.svg)
        try:
            path.write_text(ber_svg(curves, f"{args.lattice.value} r={args.r}"))
        except OSError as exc:
            print(f"cannot write {path}: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {path}", file=out)
    return 0


# --------------------------------------------------------------------------
# order / bound / enumerate


def cmd_order(args, out):
    order = group_order(args.n, args.r)
    print(f"|G_{args.n}({args.r})| = {order}", file=out)
    print(f"                 ~ {order:.4e}", file=out)
    return 0


def cmd_bound(args, out):
    n, k = args.lattice.dimension, args.lattice.kissing_number
    taken = greedy_weight_profile(n, k)
    parts = " + ".join(f"{t} {WEIGHT_NAMES.get(w, f'{w}-bit')}" for w, t in enumerate(taken, 1))
    bound = theoretical_hd_bound(n, k)
    print(f"{args.lattice.value}: {parts}, HD = {bound.total_bit_diffs}/{k} = {float(bound):.2f}", file=out)
    return 0


def cmd_enumerate(args, out):
    try:
        group = enumerate_group(args.n, args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"|G_{args.n}({args.r})| = {len(group)} (formula {group_order(args.n, args.r)})", file=out)
    if args.lattice is not None:
        if args.lattice.dimension != args.n:
            raise UsageError("lattice dimension does not match n")
        lat = standard_lattice(args.lattice)
        counts: dict = {}
        for g in group:
            v = hd_of(lat, g).value
            counts[v] = counts.get(v, 0) + 1
        for v in sorted(counts):
            print(f"  HD {float(v):.4f} ({v}): {counts[v]} elements", file=out)
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="voronoi-labeling", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("hd", help="Hamming density of a marked lattice")
    h.add_argument("--lattice", type=_lattice, required=True)
    h.add_argument("--r", type=_modulus, required=True)
    h.add_argument("--u", default="identity", help="identity | preset-best | FILE | 'a b; c d'")
    h.add_argument("--no-offsets", dest="offsets", action="store_false")
    h.set_defaults(func=cmd_hd)

    d = sub.add_parser("descent", help="Hamming descent (or ascent) search")
    d.add_argument("--lattice", type=_lattice, required=True)
    d.add_argument("--r", type=_modulus, required=True)
    d.add_argument("--seeds", type=int, default=20)
    d.add_argument("--iters", type=int, default=25)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--word-length", type=int, default=2)
    d.add_argument("--include-identity", action="store_true")
    d.add_argument("--maximize", action="store_true")
    d.add_argument("--exhaustive-check", action="store_true")
    d.add_argument("--output", help="matrix file for the best element")
    d.add_argument("--trace", help="JSON file with every walk")
    d.set_defaults(func=cmd_descent)

    b = sub.add_parser("ber", help="Monte Carlo BER/LER sweep")
    b.add_argument("--lattice", type=_lattice)
    b.add_argument("--r", type=_modulus, default=4)
    b.add_argument("--u", action="append", help="repeat for up to three curves")
    b.add_argument("--label", action="append")
    b.add_argument("--snr-start", type=float, default=8.0)
    b.add_argument("--snr-stop", type=float, default=12.0)
    b.add_argument("--snr-step", type=float, default=1.0)
    b.add_argument("--min-bits", type=int, default=100_000)
    b.add_argument("--min-errors", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=0, help="0 = all available cores")
    b.add_argument("--output", default="ber.csv")
    b.add_argument("--svg")
    b.add_argument("--replay", help="re-run the experiment described by a CSV header")
    b.set_defaults(func=cmd_ber)

    o = sub.add_parser("order", help="order of G_n(r)")
    o.add_argument("n", type=int)
    o.add_argument("r", type=int)
    o.set_defaults(func=cmd_order)

    bd = sub.add_parser("bound", help="greedy lower bound on the Hamming density")
    bd.add_argument("lattice", type=_lattice)
    bd.set_defaults(func=cmd_bound)

    e = sub.add_parser("enumerate", help="enumerate a small G_n(r)")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--r", type=int, required=True)
    e.add_argument("--lattice", type=_lattice)
    e.set_defaults(func=cmd_enumerate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except MatrixInputError as exc:
        print(f"invalid matrix: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
