"""``compactseg`` command-line interface.

Every command that produces files also writes a JSON run manifest next to
them; ``compactseg rerun MANIFEST`` replays it. Exit codes: 0 success,
1 usage or validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .assign import ClassAdjacencyGraph, assignment_cost, build_adjacency, optimize_assignment
from .codebook import (
    Scheme,
    build_random_codebook,
    encode_labels,
    load_codebook,
    memory_reduction_factor,
    save_codebook,
)
from .decode import corrupt_bits, hard_decode, soft_decode
from .volumes import header_path, read_label_volume, read_prob_volume, write_label_volume, write_prob_volume

MANIFEST_SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class RuntimeFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Manifest:
    def __init__(self, command: str, argv: list[str], args: argparse.Namespace):
        self.data = {
            "schema_version": MANIFEST_SCHEMA,
            "tool": "compactseg",
            "tool_version": __version__,
            "command": command,
            "argv": list(argv),
            "cwd": os.getcwd(),
            "config": {k: v for k, v in vars(args).items() if k != "func"},
            "seeds": {},
            "inputs": [],
            "outputs": {},
            "extra": {},
        }
        self._t0 = time.perf_counter()

    def input(self, path):
        self.data["inputs"].append(str(path))

    def output(self, path):
        self.data["outputs"][str(path)] = None

    def seed(self, name, value):
        self.data["seeds"][name] = value

    def write(self, path):
        for p in list(self.data["outputs"]):
            sidecar = header_path(p)
            if str(p).endswith(".raw") and sidecar.is_file():
                self.data["outputs"][str(sidecar)] = None
        for p in self.data["outputs"]:
            if Path(p).is_file():
                self.data["outputs"][p] = _sha256(p)
        self.data["wall_clock_seconds"] = time.perf_counter() - self._t0
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps(self.data, indent=1, default=str) + "\n")


def _manifest_path(args, default) -> Path | None:
    if getattr(args, "manifest", None):
        return Path(args.manifest)
    return None if default is None else Path(default)


# --- codebook ---------------------------------------------------------------

def cmd_codebook_build(args, man: Manifest):
    if args.classes < 2:
        raise UsageError("--classes must be at least 2")
    cb = build_random_codebook(args.classes, Scheme(args.scheme), args.seed,
                               background_class=args.background)
    save_codebook(cb, args.out)
    man.seed("codebook", args.seed)
    man.output(args.out)
    print(f"wrote {args.out}: {cb.n_classes} classes, {cb.n_data_bits} data bits, "
          f"{cb.n_encoded_bits} channels ({cb.scheme.value})")
    return str(args.out) + ".manifest.json"


def cmd_codebook_inspect(args, man: Manifest):
    cb = load_codebook(args.input)
    man.input(args.input)
    factor = memory_reduction_factor(cb.n_classes, cb.scheme)
    digest = hashlib.sha256(json.dumps(cb.assignment).encode()).hexdigest()[:16]
    print(f"n_classes: {cb.n_classes}")
    print(f"n_data_bits: {cb.n_data_bits}")
    print(f"n_encoded_bits: {cb.n_encoded_bits}")
    print(f"scheme: {cb.scheme.value}")
    print(f"background_class: {cb.background_class}")
    print(f"reduction_factor: {factor.numerator}/{factor.denominator} = {float(factor):.4f}")
    print(f"unused_words: {(1 << cb.n_data_bits) - cb.n_classes}")
    print(f"assignment_sha256: {digest}")
    return None


# --- volumes ----------------------------------------------------------------

def cmd_encode(args, man: Manifest):
    cb = load_codebook(args.codebook)
    labels = read_label_volume(args.labels)
    bits = encode_labels(labels, cb)
    write_prob_volume(args.out, bits.astype(np.float32))
    man.input(args.codebook)
    man.input(args.labels)
    man.output(args.out)
    return str(args.out) + ".manifest.json"


def cmd_decode(args, man: Manifest):
    cb = load_codebook(args.codebook)
    probs = read_prob_volume(args.probs)
    fn = hard_decode if args.mode == "hard" else soft_decode
    write_label_volume(args.out, fn(probs, cb))
    man.input(args.codebook)
    man.input(args.probs)
    man.output(args.out)
    return str(args.out) + ".manifest.json"


def cmd_corrupt(args, man: Manifest):
    if not 0.0 <= args.flip_prob <= 1.0:
        raise UsageError("--flip-prob must lie in [0, 1]")
    bits = read_prob_volume(args.bits)
    if not np.isin(bits, (0.0, 1.0)).all():
        raise ValueError(f"{args.bits} is not a crisp bit volume")
    out, n_flips = corrupt_bits(bits.astype(np.uint8), args.flip_prob, args.seed)
    write_prob_volume(args.out, out.astype(np.float32))
    man.seed("corrupt", args.seed)
    man.input(args.bits)
    man.output(args.out)
    man.data["extra"]["flip_count"] = n_flips
    man.data["extra"]["bit_count"] = int(bits.size)
    print(f"flipped {n_flips} of {bits.size} bits")
    return str(args.out) + ".manifest.json"


# --- synthetic data and assignment -----------------------------------------

def cmd_synth(args, man: Manifest):
    from .toytrain import load_config, bundled_config
    from .toytrain.data import generate_synthetic

    cfg = load_config(args.config) if args.config else bundled_config("standard")
    if args.classes is not None:
        cfg.dataset.n_classes = args.classes
    if args.seed is not None:
        cfg.dataset.seed = args.seed
    ds = generate_synthetic(cfg.dataset)
    out = Path(args.out_dir)
    for split in ("train", "val"):
        (out / split).mkdir(parents=True, exist_ok=True)
        for i, lab in enumerate(ds.split(split)[1]):
            path = out / split / f"labels_{i:03d}.raw"
            # images are stored as (x, y, 1) volumes
            write_label_volume(path, lab.T[..., None])
            man.output(path)
    man.seed("dataset", cfg.dataset.seed)
    man.data["extra"]["dataset"] = vars(cfg.dataset)
    man.data["extra"]["attempt"] = ds.attempt
    print(f"wrote {cfg.dataset.n_train} train and {cfg.dataset.n_val} val label volumes to {out}")
    return out / "manifest.json"


def _read_label_dir(path) -> tuple[list[np.ndarray], list[Path]]:
    d = Path(path)
    if not d.is_dir():
        raise UsageError(f"{d} is not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix == ".raw")
    if not files:
        raise UsageError(f"no .raw label volumes in {d}")
    vols, errors = [], []
    for f in files:
        try:
            vols.append(read_label_volume(f))
        except (ValueError, OSError) as e:
            errors.append(f"{f}: {e}")
    if errors:
        raise ValueError("unreadable label volumes:\n  " + "\n  ".join(errors))
    return vols, files


def cmd_assign(args, man: Manifest):
    if args.iters <= 0:
        raise UsageError("--iters must be positive")
    if args.n_seeds < 1:
        raise UsageError("--n-seeds must be positive")
    vols, files = _read_label_dir(args.labels_dir)
    for f in files:
        man.input(f)
    graph = build_adjacency(vols, args.classes)
    if graph.n_classes < 2:
        raise UsageError("labels contain fewer than 2 classes")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    scheme = Scheme(args.scheme)
    rows = []
    best = None
    for s in range(args.seed, args.seed + args.n_seeds):
        res = optimize_assignment(graph, scheme, s, args.iters, binary=args.binary_weights)
        rand = assignment_cost(graph, build_random_codebook(graph.n_classes, scheme, s),
                               binary=args.binary_weights)
        rows.append((s, res.cost, res.initial_cost, rand, res.iterations))
        if s == args.seed:
            best = res
    save_codebook(best.codebook, out)
    graph_path = out.with_name(out.stem + "_adjacency.json")
    graph.save(graph_path)
    report = out.with_name(out.stem + "_cost_report.csv")
    with open(report, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["seed", "optimized_cost", "greedy_cost", "random_cost", "swaps"])
        w.writerows(rows)
        w.writerow(["mean", repr(float(np.mean([r[1] for r in rows]))), "",
                    repr(float(np.mean([r[3] for r in rows]))), ""])
    for p in (out, graph_path, report):
        man.output(p)
    man.seed("assign", args.seed)
    opt_mean = float(np.mean([r[1] for r in rows]))
    rand_mean = float(np.mean([r[3] for r in rows]))
    man.data["extra"].update(optimized_mean_cost=opt_mean, random_mean_cost=rand_mean)
    print(f"{graph.n_classes} classes, {len(graph.edges)} edges; mean cost over "
          f"{args.n_seeds} seeds: optimized {opt_mean:.1f}, random {rand_mean:.1f}")
    return str(out) + ".manifest.json"


# --- training ---------------------------------------------------------------

def _load_run_config(args):
    from .toytrain import bundled_config, load_config

    if args.config in ("standard", "noiseless"):
        cfg = bundled_config(args.config)
    else:
        cfg = load_config(args.config)
    if getattr(args, "head", None):
        cfg = cfg.with_head(args.head)
    if getattr(args, "epochs", None) is not None:
        cfg.optimizer.epochs = args.epochs
    return cfg.validate()


def _seeds(man: Manifest, cfg):
    man.seed("dataset", cfg.dataset.seed)
    man.seed("model", cfg.model.seed)
    man.seed("codebook", cfg.codebook.seed)
    man.seed("optimizer", cfg.optimizer.seed)


def _progress(verbose):
    if not verbose:
        return None

    def show(rec, head=None):
        tag = f"[{head}] " if head else ""
        dsc = "" if rec.mean_dsc is None else f" dsc={rec.mean_dsc:.4f}"
        print(f"{tag}epoch {rec.epoch} loss={rec.loss:.5f}{dsc}", file=sys.stderr)
    return show


def cmd_train(args, man: Manifest):
    from .toytrain import TrainingDiverged, run, save_config

    cfg = _load_run_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "log.csv"
    if log_path.exists():
        log_path.unlink()
    save_config(cfg, out / "config.json")
    _seeds(man, cfg)
    man.data["extra"]["run_config"] = cfg.to_dict()
    try:
        model, log, _ = run(cfg, log_path=log_path, progress=_progress(args.verbose))
    except TrainingDiverged as e:
        man.data["extra"]["failed_epoch"] = e.epoch
        man.output(log_path)
        man.write(out / "manifest.json")
        raise RuntimeFailure(str(e)) from None
    model.save(out / "model.npz", extra={"config": cfg.to_dict()})
    if model.codebook is not None:
        save_codebook(model.codebook, out / "codebook.json")
        man.output(out / "codebook.json")
    for name in ("config.json", "log.csv", "model.npz"):
        man.output(out / name)
    last = log[-1]
    dsc = "n/a" if last.mean_dsc is None else f"{last.mean_dsc:.4f}"
    print(f"{cfg.model.head}: final loss {last.loss:.5f}, validation mean DSC {dsc}")
    return out / "manifest.json"


def _write_eval(out: Path, name: str, ev, man: Manifest):
    from .metrics import write_size_table

    ev.report.write_csv(out / f"{name}_dsc.csv")
    ev.report.write_summary_csv(out / f"{name}_summary.csv")
    write_size_table(ev.size_table, out / f"{name}_size.csv")
    for suffix in ("dsc", "summary", "size"):
        man.output(out / f"{name}_{suffix}.csv")


def _write_comparison(out: Path, names, evals, man: Manifest):
    from .metrics import dsc_difference, tercile_mean_differences, write_difference_table

    a, b = names
    rows = dsc_difference(evals[a].size_table, evals[b].size_table)
    path = out / f"dsc_difference_{a}_minus_{b}.csv"
    write_difference_table(rows, path, names)
    man.output(path)
    terciles = tercile_mean_differences(rows)
    tpath = out / f"dsc_difference_{a}_minus_{b}_terciles.csv"
    with open(tpath, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["tercile", "mean_dsc_difference"])
        for label, v in zip(("smallest", "middle", "largest"), terciles):
            w.writerow([label, repr(v)])
    man.output(tpath)
    return terciles


def _write_boundary(out: Path, evals, man: Manifest):
    path = out / "boundary.csv"
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["name", "cohort_mean_dsc", "cohort_std_dsc", "voxel_accuracy",
                    "boundary_error_fraction"])
        for name, ev in evals.items():
            w.writerow([name, repr(ev.report.cohort_mean), repr(ev.report.cohort_std),
                        repr(ev.voxel_accuracy), repr(ev.boundary_error_fraction)])
    man.output(path)


def cmd_eval(args, man: Manifest):
    from .toytrain import RunConfig, ToyModel, evaluate
    from .toytrain.data import generate_synthetic

    models = {}
    for spec in args.model:
        if "=" not in spec:
            raise UsageError(f"--model expects NAME=PATH, got {spec!r}")
        name, path = spec.split("=", 1)
        if name in models:
            raise UsageError(f"duplicate model name {name!r}")
        models[name] = Path(path)
    if args.compare:
        names = args.compare.split(",")
        if len(names) != 2 or any(n not in models for n in names):
            raise UsageError("--compare needs two names given with --model")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    evals = {}
    datasets = {}
    for name, path in models.items():
        model, extra = ToyModel.load(path)
        man.input(path)
        cfg = RunConfig.from_dict(extra["config"])
        key = json.dumps(cfg.to_dict()["dataset"], sort_keys=True)
        if key not in datasets:
            datasets[key] = generate_synthetic(cfg.dataset)
        evals[name] = evaluate(model, datasets[key], args.mode, args.split,
                               include_background=not args.exclude_background)
        _write_eval(out, name, evals[name], man)
        r = evals[name].report
        print(f"{name}: mean DSC {r.cohort_mean:.4f} ({r.cohort_std:.4f}), boundary error "
              f"fraction {evals[name].boundary_error_fraction:.4f}")
    if len(datasets) > 1 and args.compare:
        raise ValueError("compared models were trained on different datasets")
    _write_boundary(out, evals, man)
    if args.compare:
        terciles = _write_comparison(out, names, evals, man)
        print(f"DSC difference {names[0]} - {names[1]} by volume tercile "
              f"(small, mid, large): " + ", ".join(f"{t:.4f}" for t in terciles))
    return out / "manifest.json"


def cmd_benchmark(args, man: Manifest):
    from .toytrain.benchmark import run_benchmark

    cfg = _load_run_config(args)
    heads = args.heads.split(",")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _seeds(man, cfg)
    man.data["extra"]["run_config"] = cfg.to_dict()
    show = _progress(args.verbose)
    progress = None if show is None else (lambda head, rec: show(rec, head))
    runs, _ = run_benchmark(cfg, heads, progress=progress)
    evals = {}
    for head, r in runs.items():
        r.model.save(out / f"{head}_model.npz", extra={"config": cfg.with_head(head).to_dict()})
        man.output(out / f"{head}_model.npz")
        _write_eval(out, head, r.evaluation, man)
        evals[head] = r.evaluation
    _write_boundary(out, evals, man)
    if "onehot" in runs and "binary" in runs:
        _write_comparison(out, ("onehot", "binary"), evals, man)
    for head, ev in evals.items():
        print(f"{head}: mean DSC {ev.report.cohort_mean:.4f}, boundary error fraction "
              f"{ev.boundary_error_fraction:.4f}")
    return out / "manifest.json"


def cmd_gradcheck(args, man: Manifest):
    from .gradcheck import check
    from .loss import binary_dice_ce_loss, cross_entropy_loss, dice_loss, one_hot
    from .toytrain import head_gradcheck

    rng = np.random.default_rng(args.seed)
    man.seed("gradcheck", args.seed)
    p = rng.uniform(0.05, 1.0, (3, 4))
    p /= p.sum(axis=0)
    labels = rng.integers(0, 3, 4)
    weights = rng.uniform(0.5, 2.0, 3)
    bits_p = rng.uniform(0.05, 0.95, (7, 6))
    bits_t = (rng.random((7, 6)) < 0.5).astype(float)
    bit_w = rng.uniform(0.5, 2.0, (7, 2))
    results = [
        check("loss/dice", lambda x: dice_loss(x, one_hot(labels, 3)), p, 1e-6),
        check("loss/weighted_ce", lambda x: cross_entropy_loss(x, labels, weights), p, 1e-6),
        check("loss/binary_dice_ce", lambda x: binary_dice_ce_loss(x, bits_t, bit_w), bits_p, 1e-6),
    ]
    for head in args.heads.split(","):
        for kind in ("dice_ce", "weighted_ce"):
            results.append(head_gradcheck(head, kind, seed=args.seed))
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{status} {r.name:28s} rel_error={r.rel_error:.3e} tol={r.tolerance:g} params={r.n_params}")
    man.data["extra"]["results"] = [
        {"name": r.name, "rel_error": r.rel_error, "tolerance": r.tolerance, "passed": r.passed}
        for r in results
    ]
    manifest = None
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "gradcheck.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["name", "rel_error", "tolerance", "passed"])
            for r in results:
                w.writerow([r.name, repr(r.rel_error), r.tolerance, int(r.passed)])
        man.output(out / "gradcheck.csv")
        manifest = out / "manifest.json"
    if failed:
        if manifest is not None:
            man.write(_manifest_path(args, manifest))
        raise RuntimeFailure(f"{failed} gradient check(s) failed")
    return manifest


def cmd_rerun(args, man: Manifest):
    data = json.loads(Path(args.manifest_file).read_text())
    if data.get("schema_version") != MANIFEST_SCHEMA:
        raise ValueError(f"unsupported manifest schema {data.get('schema_version')!r}")
    prev = os.getcwd()
    os.chdir(data["cwd"])
    try:
        code = main(data["argv"])
    finally:
        os.chdir(prev)
    if code != EXIT_OK:
        raise RuntimeFailure(f"replayed command exited with {code}")
    return None


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="compactseg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"compactseg {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--manifest", help="manifest path (default: next to the outputs)")
        return sp

    cb = sub.add_parser("codebook", help="build or inspect a codebook file")
    cb_sub = cb.add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = cb_sub.add_parser("build", help="random class-to-codeword assignment")
    b.set_defaults(func=cmd_codebook_build)
    b.add_argument("--classes", type=int, required=True)
    b.add_argument("--scheme", choices=[s.value for s in Scheme], default="vanilla")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--background", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--manifest")
    i = cb_sub.add_parser("inspect", help="print codebook summary")
    i.set_defaults(func=cmd_codebook_inspect)
    i.add_argument("--in", dest="input", required=True)
    i.add_argument("--manifest")

    e = add("encode", cmd_encode, "label volume -> crisp bit volume")
    e.add_argument("--labels", required=True)
    e.add_argument("--codebook", required=True)
    e.add_argument("--out", required=True)

    d = add("decode", cmd_decode, "probability/bit volume -> label volume")
    d.add_argument("--probs", required=True)
    d.add_argument("--codebook", required=True)
    d.add_argument("--mode", choices=["hard", "soft"], default="hard")
    d.add_argument("--out", required=True)

    c = add("corrupt", cmd_corrupt, "flip bits of a bit volume at random")
    c.add_argument("--bits", required=True)
    c.add_argument("--flip-prob", type=float, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)

    s = add("synth", cmd_synth, "write synthetic label volumes")
    s.add_argument("--config", help="run configuration (default: bundled standard)")
    s.add_argument("--classes", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out-dir", required=True)

    a = add("assign", cmd_assign, "adjacency-aware codeword assignment")
    a.add_argument("--labels-dir", required=True)
    a.add_argument("--scheme", choices=[s.value for s in Scheme], default="vanilla")
    a.add_argument("--classes", type=int, help="class count (default: max label + 1)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--n-seeds", type=int, default=20, help="seeds in the cost report")
    a.add_argument("--iters", type=int, default=10_000)
    a.add_argument("--binary-weights", action="store_true", help="weight every edge 1")
    a.add_argument("--out", required=True)

    t = add("train", cmd_train, "train the toy model")
    t.add_argument("--config", required=True, help="config file, or 'standard' / 'noiseless'")
    t.add_argument("--head", choices=["onehot", "binary", "hamming", "tree"])
    t.add_argument("--epochs", type=int)
    t.add_argument("--out-dir", required=True)
    t.add_argument("-v", "--verbose", action="store_true")

    ev = add("eval", cmd_eval, "evaluate trained models")
    ev.add_argument("--model", action="append", required=True, metavar="NAME=PATH")
    ev.add_argument("--mode", choices=["hard", "soft"], default="hard")
    ev.add_argument("--split", choices=["train", "val"], default="val")
    ev.add_argument("--compare", metavar="A,B", help="write per-class DSC difference A - B")
    ev.add_argument("--exclude-background", action="store_true")
    ev.add_argument("--out-dir", required=True)

    bm = add("benchmark", cmd_benchmark, "train and compare several heads")
    bm.add_argument("--config", required=True, help="config file, or 'standard' / 'noiseless'")
    bm.add_argument("--heads", default="onehot,binary,hamming,tree")
    bm.add_argument("--epochs", type=int)
    bm.add_argument("--out-dir", required=True)
    bm.add_argument("-v", "--verbose", action="store_true")

    g = add("gradcheck", cmd_gradcheck, "finite-difference gradient checks")
    g.add_argument("--heads", default="onehot,binary,hamming,tree")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir")

    r = add("rerun", cmd_rerun, "replay a run manifest")
    r.add_argument("manifest_file")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    command = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
    man = Manifest(command, argv, args)
    try:
        default = args.func(args, man)
    except UsageError as e:
        print(f"compactseg: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, FileNotFoundError) as e:
        print(f"compactseg: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeFailure as e:
        print(f"compactseg: failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        print(f"compactseg: failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.command != "rerun":
        path = _manifest_path(args, default)
        if path is not None:
            man.write(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
