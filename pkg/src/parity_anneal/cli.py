"""Command-line entry point: ``parity-anneal <command> ...``.

Every JSON artifact has the shape {"manifest": ..., "payload": ..., "hash": ...}
where ``hash`` is the SHA-256 of the canonical JSON of manifest and payload.
Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .anneal import DEFAULT_BIAS, DEFAULT_GRID, DEFAULT_LEVELS, encoded_hamiltonians, gap_scan
from .embedding import (
    Embedding,
    build_embedding,
    embed_problem,
    place_compilation,
    place_plaquette,
    validate_embedding,
)
from .ising import BRUTE_FORCE_CAP, IsingHamiltonian, brute_force_ground_states
from .paintshop import (
    PaintShopInstance,
    dominance_threshold,
    enumerate_instances,
    find_instance,
    labelled,
    make_instance,
)
from .parity import ParityCompilation, quadratize, single_plaquette
from .pegasus import generate_pegasus
from .sampler import SAParams, chain_states, distribution_stats, gs_fraction, simulated_anneal

CACHE_ENV = "PARITY_ANNEAL_CACHE"

MIN_GAP_COLUMNS = ["instance", "encoding", "n_qubits", "min_gap", "s_star", "penalty", "source"]
PERFORMANCE_COLUMNS = ["source", "style", "reads", "raw", "logical", "mean_break_rate"]
DISTRIBUTION_COLUMNS = ["source", "state", "count", "uniform_reference"]


class ValidationFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# artifacts


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def make_manifest(command, inputs, seed, params):
    return {
        "command": command,
        "inputs": {str(p): file_digest(p) for p in inputs},
        "seed": seed,
        "params": params,
        "version": __version__,
    }


def artifact(manifest, payload):
    body = {"manifest": manifest, "payload": payload}
    return {**body, "hash": hashlib.sha256(canonical(body).encode()).hexdigest()}


def load_artifact(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ValidationFailure(f"{path}: unreadable artifact ({err})") from err
    if not {"manifest", "payload", "hash"} <= set(data):
        raise ValidationFailure(f"{path}: not an artifact")
    expected = hashlib.sha256(canonical({"manifest": data["manifest"], "payload": data["payload"]}).encode()).hexdigest()
    if expected != data["hash"]:
        raise ValidationFailure(f"{path}: hash mismatch")
    return data


def emit(path, obj):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def _load_instance(args):
    if args.instance:
        text = Path(args.instance).read_text()
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if len(lines) != 1:
            raise ValidationFailure("instance file must hold exactly one instance line")
        return PaintShopInstance.from_text(lines[0].split("\t")[-1])
    if args.label:
        return find_instance(args.label)
    raise ValidationFailure("give --instance or --label")


def _logical(inst):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        h = make_instance(inst)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return h


def cmd_paintshop(args):
    if args.action == "enum":
        rows = labelled(enumerate_instances(args.cmin, args.cmax, args.lam, args.allow_zero))
        text = "".join(f"{tag}\t{inst.to_text()}\n" for tag, inst in rows)
        if args.out:
            write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
        return 0
    if args.label:
        inst = find_instance(args.label, args.lam)
    else:
        if args.C is None or args.groups is None or args.k is None:
            raise ValidationFailure("paintshop gen needs --label or all of --C, --groups, --k")
        inst = PaintShopInstance.from_text(f"C={args.C}; groups={args.groups}; k={args.k}; lambda={args.lam}")
    if inst.lam < dominance_threshold(inst.C):
        print(f"warning: {inst.label} has a feasible/infeasible energy tie at lambda={inst.lam}", file=sys.stderr)
    text = inst.to_text() + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_compile(args):
    inst = _load_instance(args)
    h = _logical(inst)
    enc = encoded_hamiltonians(h, args.bias, BRUTE_FORCE_CAP)
    ham, comp, lam = enc[args.form]
    if ham is None:
        raise ValidationFailure(f"{args.form} encoding exceeds the enumeration cap")
    payload = {
        "instance": inst.to_text(),
        "label": args.label or inst.label,
        "form": args.form,
        "penalty": lam,
        "compilation": comp.to_dict(),
        "logical": enc["logical"][0].to_text(),
        "hamiltonian": ham.to_text(),
    }
    inputs = [args.instance] if args.instance else []
    params = {"form": args.form, "bias": args.bias, "label": args.label}
    emit(args.out, artifact(make_manifest("compile", inputs, args.seed, params), payload))
    return 0


def _cache_path(key):
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"gapscan-{hashlib.sha256(key.encode()).hexdigest()[:32]}.json"


def cmd_gap_scan(args):
    if args.compiled:
        data = load_artifact(args.compiled)["payload"]
        if args.encoding and args.encoding != data["form"]:
            raise ValidationFailure(f"compiled file holds the {data['form']} encoding")
        encoding = data["form"]
        ham = IsingHamiltonian.from_text(data["hamiltonian"])
        label = data["label"]
        inputs = [args.compiled]
        bias = 0.0
    else:
        if not args.encoding:
            raise ValidationFailure("--encoding is required without --compiled")
        inst = _load_instance(args)
        encoding = args.encoding
        ham, _, _ = encoded_hamiltonians(_logical(inst), args.bias)[encoding]
        if ham is None:
            raise ValidationFailure(f"{encoding} encoding exceeds the simulation cap")
        label = args.label or inst.label
        inputs = [args.instance] if args.instance else []
        bias = 0.0
    key = canonical([ham.to_text(), args.grid, bias, args.levels])
    cached = _cache_path(key)
    if cached is not None and cached.exists():
        result = json.loads(cached.read_text())
    else:
        scan = gap_scan(ham, args.grid, bias=bias, k=args.levels)
        result = {"min_gap": scan.min_gap, "s_star": scan.s_star, "csv": scan.to_csv()}
        if cached is not None:
            write_atomic(cached, json.dumps(result, sort_keys=True))
    if args.csv:
        write_atomic(args.csv, result["csv"])
    payload = {
        "instance": label,
        "encoding": encoding,
        "n_qubits": ham.n,
        "min_gap": result["min_gap"],
        "s_star": result["s_star"],
    }
    params = {"encoding": encoding, "grid": args.grid, "bias": args.bias, "levels": args.levels, "label": args.label}
    emit(args.out, artifact(make_manifest("gap-scan", inputs, args.seed, params), payload))
    return 0 if result["min_gap"] > 0 else 1


def cmd_embed(args):
    defects = ()
    inputs = []
    if args.defects:
        defects = [int(tok) for ln in Path(args.defects).read_text().splitlines()
                   for tok in ln.split("#", 1)[0].replace("defect", "").split()]
        inputs.append(args.defects)
    g = generate_pegasus(args.pegasus, defects)
    _, topo = build_embedding(g, args.style)
    if args.compiled:
        data = load_artifact(args.compiled)["payload"]
        if data["form"] != "2body":
            raise ValidationFailure("embedding needs a 2body compilation")
        comp = ParityCompilation.from_dict(data["compilation"])
        h2 = IsingHamiltonian.from_text(data["hamiltonian"])
        e = place_compilation(g, topo, comp)
        problem = data["label"]
        inputs.append(args.compiled)
    else:
        comp = single_plaquette("square")
        h2 = quadratize(comp)
        e = place_plaquette(g, topo, comp)
        problem = "square"
    report = validate_embedding(e, g)
    ep = embed_problem(h2, e, prefactor=args.prefactor)
    payload = {
        "style": args.style,
        "pegasus": args.pegasus,
        "problem": problem,
        "embedding": e.to_dict(),
        "h2": h2.to_text(),
        "physical": ep.hamiltonian.to_text(),
        "nodes": list(ep.nodes),
        "n_nodes": len(ep.nodes),
        "chain_strength": ep.chain_strength,
        "chain_prefactor": args.prefactor,
        "max_chain": max(len(ns) for ns in e.chains.values()),
        "violations": [[kind, str(where)] for kind, where in report.violations],
    }
    params = {"style": args.style, "pegasus": args.pegasus, "prefactor": args.prefactor}
    emit(args.out, artifact(make_manifest("embed", inputs, args.seed, params), payload))
    return 0 if report.ok else 1


def cmd_sample(args):
    data = load_artifact(args.embedded)["payload"]
    e = Embedding.from_dict(data["embedding"])
    h = IsingHamiltonian.from_text(data["physical"])
    h2 = IsingHamiltonian.from_text(data["h2"])
    params = SAParams(
        num_reads=args.reads,
        sweeps_per_temp=args.sweeps,
        num_temps=args.temps,
        gauge_period=args.gauge_period,
    )
    ss = simulated_anneal(h, params, args.seed, nodes=data["nodes"])
    if args.samples:
        write_atomic(args.samples, ss.to_text())
    _, gs = brute_force_ground_states(h2)
    frac = gs_fraction(ss, gs, e)
    stats = distribution_stats(ss, gs, e)
    payload = {
        "style": data["style"],
        "problem": data["problem"],
        "reads": args.reads,
        "raw": frac.raw,
        "logical": frac.logical,
        "break_rate": [float(v) for v in chain_states(ss, e).break_rate],
        "distribution": stats,
    }
    inputs = [args.embedded]
    emit(args.out, artifact(make_manifest("sample", inputs, args.seed, params.to_dict()), payload))
    return 0


def _csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def cmd_report(args):
    gaps, perf, dist = [], [], []
    for path in sorted(args.inputs):
        data = load_artifact(path)
        cmd = data["manifest"]["command"]
        p = data["payload"]
        name = Path(path).name
        if cmd == "gap-scan":
            gaps.append([p["instance"], p["encoding"], p["n_qubits"], repr(p["min_gap"]), repr(p["s_star"]), "", name])
        elif cmd == "sample":
            rate = float(np.mean(p["break_rate"])) if p["break_rate"] else 0.0
            perf.append([name, p["style"], p["reads"], repr(p["raw"]), repr(p["logical"]), repr(rate)])
            d = p["distribution"]
            for state, count in sorted(d["counts"].items()):
                dist.append([name, state, count, repr(d["uniform_reference"])])
            dist.append([name, "other", d["n_samples"] - d["n_ground"], ""])
    out = Path(args.out_dir)
    write_atomic(out / "min_gaps.csv", _csv(MIN_GAP_COLUMNS, gaps))
    write_atomic(out / "square_performance.csv", _csv(PERFORMANCE_COLUMNS, perf))
    write_atomic(out / "gs_distribution.csv", _csv(DISTRIBUTION_COLUMNS, dist))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(prog="parity-anneal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="single source of randomness")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("paintshop", help="paint shop instances")
    ps.add_argument("action", choices=["gen", "enum"])
    ps.add_argument("--cmin", type=int, default=2)
    ps.add_argument("--cmax", type=int, default=5)
    ps.add_argument("--label")
    ps.add_argument("--C", type=int)
    ps.add_argument("--groups")
    ps.add_argument("--k")
    ps.add_argument("--lam", type=float, default=1.0)
    ps.add_argument("--allow-zero", action="store_true", help="also enumerate k_j = 0")
    ps.add_argument("--out")
    ps.set_defaults(func=cmd_paintshop)

    def instance_args(p):
        p.add_argument("--instance", help="instance file")
        p.add_argument("--label", help="enumerated instance label, e.g. '(3,1,1)'")
        p.add_argument("--bias", type=float, default=DEFAULT_BIAS)

    cp = sub.add_parser("compile", help="parity-compile a paint shop instance")
    instance_args(cp)
    cp.add_argument("--form", choices=["multibody", "2body"], required=True)
    cp.add_argument("--out")
    cp.set_defaults(func=cmd_compile)

    em = sub.add_parser("embed", help="embed onto Pegasus")
    em.add_argument("--style", choices=["original", "dense"], required=True)
    em.add_argument("--pegasus", type=int, required=True, metavar="M")
    em.add_argument("--defects", help="file of defective node ids")
    em.add_argument("--compiled", help="2body compile artifact (default: one square plaquette)")
    em.add_argument("--prefactor", type=float, default=1.414, help="chain-strength prefactor")
    em.add_argument("--out")
    em.set_defaults(func=cmd_embed)

    gs = sub.add_parser("gap-scan", help="minimum spectral gap")
    instance_args(gs)
    gs.add_argument("--encoding", choices=["logical", "multibody", "2body"])
    gs.add_argument("--compiled", help="compile artifact")
    gs.add_argument("--grid", type=int, default=DEFAULT_GRID)
    gs.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    gs.add_argument("--csv", help="write the level curves here")
    gs.add_argument("--out")
    gs.set_defaults(func=cmd_gap_scan)

    sa = sub.add_parser("sample", help="simulated annealing on an embedded problem")
    sa.add_argument("--embedded", required=True)
    sa.add_argument("--reads", type=int, default=1000)
    sa.add_argument("--sweeps", type=int, default=4, help="sweeps per temperature")
    sa.add_argument("--temps", type=int, default=64)
    sa.add_argument("--gauge-period", type=int, default=100)
    sa.add_argument("--samples", help="write the sample file here")
    sa.add_argument("--out")
    sa.set_defaults(func=cmd_sample)

    rp = sub.add_parser("report", help="join artifacts into tables")
    rp.add_argument("inputs", nargs="+")
    rp.add_argument("--out-dir", required=True)
    rp.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationFailure, ValueError, RuntimeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
