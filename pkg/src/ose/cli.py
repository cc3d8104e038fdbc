"""Command-line entry point.

Exit codes: 0 success, 1 I/O or environment error, 2 data or math error.
Set ``OSE_LOG`` to error, warn, info or debug to control stderr logging.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .augmentation import (
    RNG_ALGORITHM,
    AugmentationConfig,
    augment,
    filter_min_class_size,
    load_labeled_dataset,
    split_dataset,
    write_labeled_dataset,
)
from .composer import CompositionRequest, compose_sentence, compose_vectors, read_token_vector_blocks, tokenize
from .distances import DistanceSpec, equal_distance_interval, solve_at_distances
from .errors import DataError, DependentRows, Infeasible, InconsistentSystem, OSEError
from .evaluate import CLASSIFIERS, run_benchmark
from .linalg import RANK_TOL, cosine_distances
from .store import format_float, format_vector, load_embeddings, retrieve, write_embeddings

log = logging.getLogger("ose")

EXIT_OK, EXIT_IO, EXIT_DATA = 0, 1, 2

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


@dataclass
class RunConfig:
    command: str
    embeddings_path: str | None = None
    input_path: str | None = None
    output_path: str | None = None
    method: str = "ose"
    k: int = 5
    big_k: int = 1
    k_neighbors: int = 5
    seed: int = 0
    rank_tol: float = RANK_TOL
    format: str | None = None
    fallback: str = "none"
    lowercase: bool = False
    strict: bool = False
    top_k: int = 1
    min_class_size: int | None = None
    split_fraction: float = 0.5

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("--k must be >= 2")
        if self.big_k < 0:
            raise ValueError("--K must be >= 0")
        if self.k_neighbors < 1:
            raise ValueError("--knn must be >= 1")
        if self.top_k < 1:
            raise ValueError("--top-k must be >= 1")
        if not self.rank_tol > 0:
            raise ValueError("--rank-tol must be positive")
        if not 0.0 < self.split_fraction < 1.0:
            raise ValueError("--split-fraction must be in (0, 1)")
        if self.min_class_size is not None and self.min_class_size < 1:
            raise ValueError("--min-class-size must be >= 1")

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _read_lines(path):
    if path is None or path == "-":
        return sys.stdin.read().splitlines()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return fh.read().splitlines()


def _require(value, flag):
    if value is None:
        raise FileNotFoundError(f"{flag} is required for this command")
    return value


def _floats(vec) -> list[float]:
    # round-trip through the 8-significant-digit text form so every format agrees
    return [float(format_float(v)) for v in vec]


def cmd_compose(cfg: RunConfig) -> int:
    """One composed vector per input sentence.

    Without ``--embeddings`` the input is read as blank-line separated blocks
    of precomputed ``<token> <f1> ... <fn>`` lines, one block per sentence.
    """
    lines = _read_lines(cfg.input_path)
    failures = 0
    results = []
    if cfg.embeddings_path is None:
        for i, block in enumerate(read_token_vector_blocks(lines)):
            try:
                vec, used = compose_vectors([v for _, v in block], cfg.method, cfg.fallback, cfg.rank_tol)
                results.append((i, vec, {"token_count": len(block), "oov_count": 0, "method": used}, None))
            except DataError as exc:
                failures += 1
                results.append((i, None, {"token_count": len(block), "oov_count": 0, "method": None}, str(exc)))
    else:
        table = load_embeddings(cfg.embeddings_path, lowercase=cfg.lowercase)
        for i, line in enumerate(lines):
            tokens = tokenize(line, cfg.lowercase)
            req = CompositionRequest(tuple(tokens), cfg.method, "skip", cfg.fallback)
            try:
                vec, rep = compose_sentence(table, req, cfg.rank_tol)
                results.append((i, vec, {"token_count": rep.token_count, "oov_count": rep.oov_count,
                                         "method": rep.method_used}, None))
            except DataError as exc:
                failures += 1
                oov = sum(1 for t in tokens if t not in table)
                results.append((i, None, {"token_count": len(tokens), "oov_count": oov, "method": None}, str(exc)))

    with _open_out(cfg.output_path) as out:
        if cfg.format == "csv":
            out.write("line,token_count,oov_count,method,error,vector\n")
        for i, vec, rep, err in results:
            if err is not None:
                log.warning("line %d: %s", i + 1, err)
            if cfg.format == "json":
                obj = {"line": i + 1, **rep, "vector": None if vec is None else _floats(vec)}
                if err is not None:
                    obj["error"] = err
                out.write(json.dumps(obj, sort_keys=True) + "\n")
            elif cfg.format == "csv":
                vtxt = "" if vec is None else format_vector(vec)
                etxt = "" if err is None else err.replace(",", ";").replace("\n", " ")
                out.write(f"{i + 1},{rep['token_count']},{rep['oov_count']},{rep['method'] or ''},{etxt},{vtxt}\n")
            else:
                out.write(("" if vec is None else format_vector(vec)) + "\n")
                sys.stderr.write(f"{i + 1}\t{rep['token_count']}\t{rep['oov_count']}\t{rep['method'] or 'failed'}\n")
    if failures and cfg.strict:
        return EXIT_DATA
    return EXIT_OK


def _load_dataset(cfg: RunConfig, method: str = "ose"):
    table = load_embeddings(cfg.embeddings_path, lowercase=cfg.lowercase) if cfg.embeddings_path else None
    data, skipped = load_labeled_dataset(_require(cfg.input_path, "--input"), table, cfg.lowercase,
                                         method, cfg.fallback, cfg.rank_tol)
    if cfg.min_class_size is not None:
        data = filter_min_class_size(data, cfg.min_class_size)
    return data, skipped


def cmd_augment(cfg: RunConfig) -> int:
    out_path = _require(cfg.output_path, "--output")
    if cfg.big_k < 1:
        raise ValueError("--K must be >= 1 for augment")
    data, skipped = _load_dataset(cfg, cfg.method)
    conf = AugmentationConfig(cfg.k, cfg.big_k, cfg.method, cfg.seed, cfg.rank_tol)
    result = augment(data, conf)
    with _open_out(out_path) as out:
        write_labeled_dataset(result, out)
    manifest = {
        "command": "augment",
        "config": cfg.echo(),
        "rng_algorithm": RNG_ALGORITHM,
        "n_original": len(data),
        "n_added": len(result) - len(data),
        "n_skipped_input": skipped,
        "class_sizes": data.class_sizes(),
        "version": __version__,
    }
    Path(str(out_path) + ".manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    """Prescribed-distance synthesis from a JSON spec ``{vectors, targets}``.

    Without ``targets`` the lower end of the equal-distance interval is used,
    which reproduces the equidistant synthesis.
    """
    path = cfg.input_path or "<stdin>"
    try:
        doc = json.loads("\n".join(_read_lines(cfg.input_path)))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    vectors = np.asarray(doc["vectors"], dtype=np.float64)
    result = {"feasible": False, "solution": None, "interval": None, "gram_norm": None}
    try:
        iv = equal_distance_interval(vectors, cfg.rank_tol)
        result["interval"] = {"lower": iv.lower, "upper": iv.upper}
        result["gram_norm"] = iv.gram_norm
    except DependentRows as exc:
        log.info("no equal-distance interval: %s", exc)
    targets = doc.get("targets")
    if targets is None:
        if result["interval"] is None:
            raise DependentRows("targets omitted and the vectors are linearly dependent")
        targets = [result["interval"]["lower"]] * len(vectors)
    result["targets"] = [float(t) for t in targets]
    status = EXIT_OK
    try:
        x = solve_at_distances(DistanceSpec(vectors, targets), cfg.rank_tol)
        result["feasible"] = True
        result["solution"] = _floats(x)
        result["distances"] = [float(format_float(d)) for d in cosine_distances(vectors, x)]
    except (Infeasible, InconsistentSystem) as exc:
        result["error"] = f"{type(exc).__name__}: {exc}"
        if cfg.strict:
            status = EXIT_DATA
    for key in ("gram_norm",):
        if result[key] is not None:
            result[key] = float(format_float(result[key]))
    if result["interval"] is not None:
        result["interval"] = {k: float(format_float(v)) for k, v in result["interval"].items()}
    with _open_out(cfg.output_path) as out:
        out.write(json.dumps(result, sort_keys=True) + "\n")
    return status


def cmd_retrieve(cfg: RunConfig) -> int:
    table = load_embeddings(_require(cfg.embeddings_path, "--embeddings"), lowercase=cfg.lowercase)
    queries = []
    for lineno, line in enumerate(_read_lines(cfg.input_path), start=1):
        if not line.strip():
            continue
        try:
            queries.append(np.array([float(v) for v in line.split()], dtype=np.float64))
        except ValueError as exc:
            raise DataError(f"query line {lineno}: {exc}") from None
    with _open_out(cfg.output_path) as out:
        if cfg.format == "csv":
            out.write("query,rank,token,distance\n")
        for qi, q in enumerate(queries, start=1):
            hits = retrieve(table, q, cfg.top_k)
            if cfg.format == "json":
                out.write(json.dumps({"query": qi, "neighbors": [[t, float(format_float(d))] for t, d in hits]},
                                     sort_keys=True) + "\n")
            elif cfg.format == "csv":
                for r, (t, d) in enumerate(hits, start=1):
                    out.write(f"{qi},{r},{t},{format_float(d)}\n")
            else:
                out.write("\t".join(f"{t} {format_float(d)}" for t, d in hits) + "\n")
    return EXIT_OK


def evaluation_grid(data, cfg: RunConfig, methods) -> list[dict]:
    """Split, optionally augment with each method, and score both classifiers."""
    train, test = split_dataset(data, cfg.split_fraction, cfg.seed)
    rows = []
    for method in methods:
        if method == "none":
            aug_train = train
        else:
            aug_train = augment(train, AugmentationConfig(cfg.k, cfg.big_k, method, cfg.seed, cfg.rank_tol))
        for clf in CLASSIFIERS:
            params = {"augmentation": method, "n_train": len(aug_train), "seed": cfg.seed}
            if method != "none":
                params.update({"k": cfg.k, "K": cfg.big_k})
            if clf == "knn":
                params["k_neighbors"] = cfg.k_neighbors
            rows.append(run_benchmark(aug_train, test, clf, params))
    return rows


def cmd_eval(cfg: RunConfig) -> int:
    """Baseline plus ``--method`` augmentation (skipped with ``--K 0``), KNN and NC."""
    data, _ = _load_dataset(cfg, cfg.method)
    methods = ["none"] if cfg.big_k == 0 else ["none", cfg.method]
    reports = evaluation_grid(data, cfg, methods)
    with _open_out(cfg.output_path) as out:
        for i, rep in enumerate(reports):
            if cfg.format == "csv":
                out.write(rep.to_csv_row(header=(i == 0)))
            else:
                out.write(rep.to_json() + "\n")
    return EXIT_OK


def cmd_inspect(cfg: RunConfig) -> int:
    """Print table statistics; with ``--output`` also re-serialize the table."""
    table = load_embeddings(_require(cfg.embeddings_path, "--embeddings"), lowercase=cfg.lowercase)
    norms = np.linalg.norm(table.matrix, axis=1)
    stats = {
        "source": table.source,
        "count": len(table),
        "dim": table.dim,
        "zero_vectors": table.zero_count,
        "min_norm": float(format_float(norms.min())),
        "max_norm": float(format_float(norms.max())),
    }
    if cfg.output_path is not None:
        with _open_out(cfg.output_path) as out:
            write_embeddings(table, out)
    if cfg.format == "csv":
        sys.stdout.write(",".join(stats) + "\n" + ",".join(str(v) for v in stats.values()) + "\n")
    else:
        sys.stdout.write(json.dumps(stats, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {
    "compose": cmd_compose,
    "augment": cmd_augment,
    "solve": cmd_solve,
    "retrieve": cmd_retrieve,
    "eval": cmd_eval,
    "inspect": cmd_inspect,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--embeddings", help="word-embedding text file")
    common.add_argument("--input", help="input file (default: stdin where meaningful)")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--method", choices=("ose", "bov"), default="ose")
    common.add_argument("--k", type=int, default=5, help="seeded words per synthesized example")
    common.add_argument("--K", type=int, default=1, dest="big_k", help="synthesized examples per class")
    common.add_argument("--knn", type=int, default=5, dest="k_neighbors", help="KNN neighbors")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rank-tol", type=float, default=RANK_TOL)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--fallback", choices=("none", "bov"), default="none")
    common.add_argument("--lowercase", action="store_true")
    common.add_argument("--strict", action="store_true")
    common.add_argument("--top-k", type=int, default=1)
    common.add_argument("--min-class-size", type=int, default=None)
    common.add_argument("--split-fraction", type=float, default=0.5)

    parser = argparse.ArgumentParser(prog="ose", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "compose": "compose sentence vectors (bov or ose)",
        "augment": "add synthesized class exemplars to a labeled dataset",
        "solve": "find a unit vector at prescribed cosine distances",
        "retrieve": "nearest vocabulary tokens for query vectors",
        "eval": "split / augment / classify and report accuracy",
        "inspect": "embedding file statistics and integrity check",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], allow_abbrev=False)
    return parser


def _setup_logging() -> None:
    level = LOG_LEVELS.get(os.environ.get("OSE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            embeddings_path=args.embeddings,
            input_path=args.input,
            output_path=args.output,
            method=args.method,
            k=args.k,
            big_k=args.big_k,
            k_neighbors=args.k_neighbors,
            seed=args.seed,
            rank_tol=args.rank_tol,
            format=args.format,
            fallback=args.fallback,
            lowercase=args.lowercase,
            strict=args.strict,
            top_k=args.top_k,
            min_class_size=args.min_class_size,
            split_fraction=args.split_fraction,
        )
    except ValueError as exc:
        print(f"ose: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        return COMMANDS[cfg.command](cfg)
    except (DataError, ValueError, KeyError) as exc:
        print(f"ose {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, OSEError) as exc:
        print(f"ose {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
