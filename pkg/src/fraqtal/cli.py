"""Command-line interface: ``fraqtal {generate,analyze,validate,circuit}``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .pipeline import (THREADS_ENV, AnalysisError, CsvParseError, GenerationConfig,
                       GenerationError, analyze_dataset, generate_dataset, validate_dataset)
from .quantum import (DEFAULT_SHOTS, Family, bitstring, bloch_vector, build_random_circuit,
                      optimal_grover_iterations, preset_circuit, probabilities, probs_digest,
                      sample_shots, simulate)
from .rng import SHOT_CONST

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 512x512, got {text!r}") from None
    return w, h


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraqtal",
        description="Generate and analyze Julia-set images seeded by simulated quantum circuits.",
        epilog=f"Worker threads default to ${THREADS_ENV} (0 = one per CPU).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="render a dataset of PNGs plus metadata.csv")
    g.add_argument("--seed", type=_u64, required=True, help="64-bit master seed")
    g.add_argument("--count", type=int, required=True, help="number of images")
    g.add_argument("--size", type=_size, default=(512, 512), metavar="WxH",
                   help="image size in pixels (default 512x512)")
    g.add_argument("--shots", type=int, default=DEFAULT_SHOTS,
                   help=f"measurement shots per circuit (default {DEFAULT_SHOTS})")
    g.add_argument("--out", default="fraqtal_out", help="output directory (default fraqtal_out)")
    g.add_argument("--normalization", choices=("log", "linear"), default="log",
                   help="smooth-count normalization (default log)")
    g.add_argument("--workers", type=int, default=None, help=f"worker threads (default ${THREADS_ENV})")

    a = sub.add_parser("analyze", help="extract features, cluster, and emit CSV/JSON/SVG reports")
    a.add_argument("--csv", required=True, help="metadata CSV written by generate")
    a.add_argument("--images", required=True, help="directory holding the PNGs")
    a.add_argument("--k", type=int, default=3, help="number of k-means clusters (default 3)")
    a.add_argument("--out", default=None, help="report directory (default: next to the CSV)")
    a.add_argument("--seed", type=_u64, default=0, help="k-means seed (default 0)")
    a.add_argument("--cluster-space", choices=("features", "pca"), default="features",
                   help="cluster on standardized features or on PCA scores (default features)")
    a.add_argument("--workers", type=int, default=None, help=f"worker threads (default ${THREADS_ENV})")

    v = sub.add_parser("validate", help="check a dataset for missing files and bad values")
    v.add_argument("--csv", required=True, help="metadata CSV to check")
    v.add_argument("--images", required=True, help="directory holding the PNGs")

    c = sub.add_parser("circuit", help="print a circuit with its probabilities and Bloch vectors")
    c.add_argument("--seed", type=_u64, default=0, help="seed for random circuits and shots (default 0)")
    c.add_argument("--qubits", type=int, required=True, help="number of qubits")
    c.add_argument("--depth", type=int, default=3, help="random-circuit layers (default 3)")
    c.add_argument("--preset", choices=[f.value for f in Family], default=None,
                   help="use a preset circuit instead of a random one")
    c.add_argument("--iterations", type=int, default=None,
                   help="Grover iterations (default: floor(pi/4 * sqrt(2^n)))")
    c.add_argument("--marked", type=int, default=0, help="Grover marked basis index (default 0)")
    c.add_argument("--shots", type=int, default=DEFAULT_SHOTS,
                   help=f"shots for the probability digest (default {DEFAULT_SHOTS})")
    return parser


def _cmd_generate(args) -> int:
    w, h = args.size
    cfg = GenerationConfig(master_seed=args.seed, count=args.count, output_dir=args.out,
                           width=w, height=h, shots=args.shots, normalization=args.normalization)
    res = generate_dataset(cfg, workers=args.workers)
    print(f"wrote {len(res.records)} images, {res.csv_path} and {res.manifest_path}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    res = analyze_dataset(args.csv, args.images, out_dir=args.out, k=args.k, seed=args.seed,
                          cluster_space=args.cluster_space, workers=args.workers)
    s = res.summary
    print(f"analyzed {s['counts']['analyzed']} of {s['counts']['rows']} images")
    for cid in sorted(s["cluster_counts"], key=int):
        means = s["cluster_means"][cid]
        print(f"cluster {cid}: n={s['cluster_counts'][cid]} "
              f"fractal_dimension={means['fractal_dimension']:.4f} "
              f"lacunarity={means['lacunarity']:.4f} energy={means['energy']:.6g}")
    for w in s["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {res.enriched_csv}, {res.summary_path}" +
          "".join(f", {p}" for p in res.plot_paths))
    return EXIT_OK


def _cmd_validate(args) -> int:
    report = validate_dataset(args.csv, args.images)
    print(report.format())
    return EXIT_OK if report.ok else EXIT_FINDINGS


def _cmd_circuit(args) -> int:
    n = args.qubits
    if args.preset is None:
        circuit = build_random_circuit(args.seed, n, args.depth)
    else:
        iterations = args.iterations if args.iterations is not None else optimal_grover_iterations(n)
        circuit = preset_circuit(args.preset, n, iterations=iterations, marked=args.marked)
    sv = simulate(circuit)
    print(f"# {n} qubits, {len(circuit.gates)} gates")
    print(circuit.dump())
    print("# probabilities")
    for i, p in enumerate(probabilities(sv)):
        print(f"{bitstring(i, n)} {p:.6f}")
    print("# bloch vectors")
    for q in range(n):
        # round away float dust so exact zeros never print as -0.000000
        x, y, z = (round(v, 12) + 0.0 for v in bloch_vector(sv, q))
        print(f"q{q} ({x:+.6f}, {y:+.6f}, {z:+.6f})")
    hist = sample_shots(sv, args.shots, args.seed ^ SHOT_CONST)
    print(f"# probs_sha1 ({args.shots} shots) {probs_digest(hist)}")
    return EXIT_OK


COMMANDS = {"generate": _cmd_generate, "analyze": _cmd_analyze, "validate": _cmd_validate,
            "circuit": _cmd_circuit}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (GenerationError, AnalysisError, CsvParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
