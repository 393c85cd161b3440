"""Command-line surface.

Subcommands: solve, check, cluster, kbest, gen, certify. Human-readable
tables go to stdout; ``--out PATH`` additionally writes line-delimited JSON
records. Exit codes: 0 success, 1 file parse error, 2 infeasible or
unsupported request, 3 property or certification failure.

All randomness derives from the single ``--seed`` through
numpy.random.SeedSequence(seed).spawn(...), one child per trial/draw.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .checks import check_polymatroid, metric_axiom_check
from .clustering import Corpus, kmeans_score, sh_kmeans, synth_corpus
from .errors import (
    ConvergenceError,
    GroundSetTooLargeError,
    InfeasibleConstraintError,
    InstanceParseError,
    PolymatroidValidationError,
    UnsupportedConstraintError,
)
from .functions import ClusteredConcave, FacilityLocation, Modular, ShiftedOracle
from .generators import best_b_counterexample, sqrt_shift_example, tightness_instance
from .instance import SHObjective, ShInstance, sh_objective
from .kbest import diverse_kbest, synth_kbest_collection
from .maximize import brute_force_max
from .minimize import brute_force_min
from .sets import ElementSet
from .solvers import (
    Solution,
    best_b,
    certify,
    major_min,
    rand_set_max,
    union_split_max,
    union_split_min,
)

MIN_SOLVERS = ("union-split", "best-b", "major-min", "brute")
MAX_SOLVERS = ("union-split-max", "rand-set", "brute")

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_VIOLATION = 3


def _spawn_seeds(seed: int, count: int) -> list[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


def _print_kv(pairs) -> None:
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        print(f"  {k:<{width}}  {v}")


def _run_solver(instance: ShInstance, direction: str, solver: str, args) -> Solution:
    if direction == "min":
        if solver == "union-split":
            return union_split_min(instance, tol=args.tol)
        if solver == "best-b":
            return best_b(instance)
        if solver == "major-min":
            return major_min(instance)
        if solver == "brute":
            res = brute_force_min(SHObjective(instance), instance.constraint)
            return Solution(set=res.argmin, value=res.value, solver="brute", bound=1.0)
        raise UnsupportedConstraintError(
            f"solver {solver!r} does not minimize; choose one of {MIN_SOLVERS}"
        )
    if solver == "union-split-max":
        return union_split_max(instance, seed=args.seed)
    if solver == "rand-set":
        return rand_set_max(instance, seed=args.seed or 0, draws=args.draws)
    if solver == "brute":
        res = brute_force_max(SHObjective(instance), instance.constraint)
        return Solution(set=res.argmax, value=res.value, solver="brute", bound=1.0)
    raise UnsupportedConstraintError(
        f"solver {solver!r} does not maximize; choose one of {MAX_SOLVERS}"
    )


def _solve_record(instance: ShInstance, direction: str, solution: Solution, wall: float) -> dict:
    # Reports never carry stale numbers: re-evaluate the set before writing.
    check = sh_objective(instance, solution.set)
    if abs(check - solution.value) > 1e-9:
        raise RuntimeError(
            f"internal error: reported objective {solution.value} does not "
            f"re-evaluate ({check})"
        )
    record = {
        "record": "solution",
        "direction": direction,
        "solver": solution.solver,
        "n": instance.n,
        "m": instance.m,
        "constraint": str(instance.constraint),
        "set": [int(j) for j in solution.set],
        "objective": solution.value,
        "bound": solution.bound,
        "iterations": solution.iterations,
        "seed": solution.seed,
        "wall_time_s": wall,
    }
    if solution.mean_value is not None:
        record["mean_objective"] = solution.mean_value
    return record


def cmd_solve(args) -> int:
    instance = io.load_instance(args.instance)
    start = time.perf_counter()
    solution = _run_solver(instance, args.direction, args.solver, args)
    wall = time.perf_counter() - start
    record = _solve_record(instance, args.direction, solution, wall)

    print(f"solve {args.direction} with {solution.solver}")
    _print_kv(
        [
            ("instance", f"n={instance.n} m={instance.m} {instance.constraint}"),
            ("set", "{" + ", ".join(map(str, solution.set)) + "}"),
            ("objective", f"{solution.value:.9g}"),
            ("bound", solution.bound),
            ("wall time", f"{wall:.3f}s"),
        ]
    )
    exit_code = EXIT_OK
    if args.certify:
        cert = certify(instance, solution, args.direction)
        record.update(
            {
                "opt_value": cert.opt_value,
                "achieved_ratio": cert.achieved_ratio,
                "certified_bound": cert.bound,
                "certified": cert.ok,
            }
        )
        _print_kv(
            [
                ("optimum", f"{cert.opt_value:.9g}"),
                ("ratio", f"{cert.achieved_ratio:.6g}"),
                ("certificate", "PASS" if cert.ok else "FAIL"),
            ]
        )
        if not cert.ok:
            exit_code = EXIT_VIOLATION
    if args.out:
        io.write_reports(args.out, [record])
    return exit_code


def _check_one(name: str, f, args, records: list[dict]) -> bool:
    mode = "exhaustive" if args.mode == "exhaustive" else "randomized"
    prop = check_polymatroid(f, mode=mode, trials=args.trials, seed=args.seed)
    ok = prop.ok
    rows = [
        ("normalized", prop.normalized),
        ("positive", prop.positive),
        ("monotone", prop.monotone),
        ("submodular", prop.submodular),
    ]
    metric = None
    if not isinstance(f, ShiftedOracle):
        metric_mode = mode if (mode == "randomized" or f.n <= 6) else "randomized"
        metric = metric_axiom_check(f, mode=metric_mode, trials=args.trials, seed=args.seed)
        ok = ok and metric.ok
        rows += [
            ("metric: nonnegative", metric.nonnegative),
            ("metric: identity", metric.identity),
            ("metric: symmetric", metric.symmetric),
            ("metric: triangle", metric.triangle),
        ]
    print(f"check {name} [{mode}]")
    _print_kv([(k, "pass" if v else "FAIL") for k, v in rows])
    if not prop.submodular:
        w = prop.submodular_witness
        print(
            f"  submodularity witness: A1={set(w.sets[0])} A2={set(w.sets[1])} "
            f"f(A1)+f(A2)={w.lhs:.9f} < f(A1|A2)+f(A1&A2)={w.rhs:.9f}"
        )
    if metric is not None and not metric.triangle:
        w = metric.witnesses["triangle"]
        a, b, c = w.sets
        print(
            f"  triangle witness: A={set(a)} B={set(b)} C={set(c)} "
            f"d(A,B)={w.lhs:.9f} > d(A,C)+d(C,B)={w.rhs:.9f}"
        )
    records.append(
        {
            "record": "check",
            "target": name,
            "mode": mode,
            "properties": {k: bool(v) for k, v in rows},
            "ok": bool(ok),
        }
    )
    return ok


def cmd_check(args) -> int:
    records: list[dict] = []
    all_ok = True
    if args.function:
        f = io.load_function(args.function)
        all_ok = _check_one("function", f, args, records)
    else:
        instance = io.load_instance(args.instance)
        if args.shifted:
            for i, (f, b) in enumerate(zip(instance.functions, instance.b_sets)):
                shifted = ShiftedOracle(f, b)
                all_ok &= _check_one(f"g_B[{i}] (f_{i} shifted by B_{i})", shifted, args, records)
        else:
            for i, f in enumerate(instance.functions):
                all_ok &= _check_one(f"f_{i}", f, args, records)
                if instance.homogeneous:
                    break
    if args.out:
        io.write_reports(args.out, records)
    return EXIT_OK if all_ok else EXIT_VIOLATION


CLUSTER_PRESETS = ("paper-synth-disjoint", "paper-synth-sampled")


def _synth_preset(preset: str, seed: int) -> Corpus:
    mode = "disjoint" if preset == "paper-synth-disjoint" else "sampled"
    return synth_corpus(
        num_docs=100,
        num_clusters=10,
        n=1000,
        num_word_classes=100,
        words_per_doc=10,
        overlap_mode=mode,
        seed=seed,
    )


def cmd_cluster(args) -> int:
    seeds = _spawn_seeds(args.seed, args.trials + 1)
    if args.synth:
        corpus = _synth_preset(args.synth, seeds[0])
    else:
        corpus = io.load_corpus(args.corpus)
    if args.distance == "hamming":
        f = Modular.hamming(corpus.n)
    else:
        if corpus.classes is None:
            raise InfeasibleConstraintError(
                "clustered-sqrt distance needs a corpus with word classes"
            )
        f = ClusteredConcave(corpus.n, corpus.classes)
    init = "kmeanspp" if args.init == "kmeanspp" else "farthest_first"

    scorers = {"hamming": Modular.hamming(corpus.n)}
    if corpus.classes is not None:
        scorers["clustered-sqrt"] = ClusteredConcave(corpus.n, corpus.classes)

    records: list[dict] = []
    accuracies: list[float] = []
    print(
        f"cluster: distance={args.distance} init={args.init} k={args.k} "
        f"ell={args.ell} trials={args.trials}"
    )
    for t in range(args.trials):
        start = time.perf_counter()
        result = sh_kmeans(
            corpus,
            f,
            k=args.k,
            ell=args.ell,
            init=init,
            quota=args.quota,
            max_iter=args.max_iter,
            seed=seeds[t + 1],
        )
        wall = time.perf_counter() - start
        scores = {name: kmeans_score(result, g) for name, g in scorers.items()}
        rec = {
            "record": "cluster-trial",
            "trial": t,
            "accuracy": result.accuracy,
            "iterations": result.iterations,
            "kmeans_score": scores,
            "wall_time_s": wall,
        }
        records.append(rec)
        if result.accuracy is not None:
            accuracies.append(result.accuracy)
        score_txt = " ".join(f"{k}={v:.4g}" for k, v in scores.items())
        acc_txt = "n/a" if result.accuracy is None else f"{result.accuracy:.3f}"
        print(f"  trial {t}: accuracy={acc_txt} iters={result.iterations} {score_txt}")
    if accuracies:
        mean = float(np.mean(accuracies))
        std = float(np.std(accuracies))
        print(f"  mean accuracy {mean:.4f} +/- {std:.4f} over {len(accuracies)} trials")
        records.append(
            {
                "record": "cluster-summary",
                "mean_accuracy": mean,
                "std_accuracy": std,
                "trials": args.trials,
            }
        )
    if args.out:
        io.write_reports(args.out, records)
    return EXIT_OK


def cmd_kbest(args) -> int:
    sim = io.load_collection(args.corpus)
    g = FacilityLocation(sim)
    diversity = None if args.method == "hm" else g
    result = diverse_kbest(
        g, diversity, k=args.k, ell=args.ell, optimizer=args.method, seed=args.seed
    )
    overlap = result.pairwise_overlap()
    print(f"kbest: method={args.method} k={args.k} ell={args.ell}")
    for t, (summary, q, d) in enumerate(
        zip(result.summaries, result.qualities, result.diversities)
    ):
        members = "{" + ", ".join(map(str, summary)) + "}"
        print(f"  A_{t}: quality={q:.4f} diversity={d:.4f} objective={q + d:.4f} {members}")
    print(f"  mean pairwise overlap: {result.mean_pairwise_overlap():.4f}")
    if args.out:
        io.write_reports(
            args.out,
            [
                {
                    "record": "kbest",
                    "method": args.method,
                    "k": args.k,
                    "ell": args.ell,
                    "summaries": [[int(j) for j in s] for s in result.summaries],
                    "qualities": result.qualities,
                    "diversities": result.diversities,
                    "objectives": result.objectives,
                    "pairwise_overlap": overlap.tolist(),
                    "mean_pairwise_overlap": result.mean_pairwise_overlap(),
                }
            ],
        )
    return EXIT_OK


GEN_PRESETS = (
    "paper-synth-disjoint",
    "paper-synth-sampled",
    "tightness-family",
    "best-b-counterexample",
    "sqrt-shift-example",
    "kbest-synth",
)


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        path = out / name
        path.write_text(text)
        written.append(path)

    if args.preset in ("paper-synth-disjoint", "paper-synth-sampled"):
        emit(f"{args.preset}.json", io.dump_corpus(_synth_preset(args.preset, args.seed)))
    elif args.preset == "tightness-family":
        for alpha in (2, 4, 16):
            emit(f"tightness_alpha{alpha}.json", io.dump_instance(tightness_instance(alpha)))
    elif args.preset == "best-b-counterexample":
        emit("best_b_counterexample.json", io.dump_instance(best_b_counterexample()))
    elif args.preset == "sqrt-shift-example":
        oracle = sqrt_shift_example()
        instance = ShInstance([oracle.f], [oracle.b])
        emit("sqrt_shift_example.json", io.dump_instance(instance))
    elif args.preset == "kbest-synth":
        emit(
            "kbest_synth.json",
            io.dump_collection(synth_kbest_collection(seed=args.seed)),
        )
    else:
        raise InfeasibleConstraintError(f"unknown preset {args.preset!r}")
    for path in written:
        print(path)
    return EXIT_OK


def cmd_certify(args) -> int:
    args.certify = True
    return cmd_solve(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subhamming",
        description="Submodular Hamming metrics: solve, check, and reproduce.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run an SH-min / SH-max solver on an instance file")
    p_solve.add_argument("direction", choices=("min", "max"))
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--solver", required=True, choices=sorted(set(MIN_SOLVERS + MAX_SOLVERS)))
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--draws", type=int, default=1000)
    p_solve.add_argument("--tol", type=float, default=1e-7)
    p_solve.add_argument("--certify", action="store_true")
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="verify polymatroid and metric properties")
    target = p_check.add_mutually_exclusive_group(required=True)
    target.add_argument("--instance")
    target.add_argument("--function")
    p_check.add_argument("--shifted", action="store_true",
                         help="check the shifted oracles g_B(A) = f(A xor B) instead of the raw functions")
    p_check.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p_check.add_argument("--trials", type=int, default=2000)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--out")
    p_check.set_defaults(func=cmd_check)

    p_cluster = sub.add_parser("cluster", help="balanced k-means under a submodular Hamming distance")
    source = p_cluster.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus")
    source.add_argument("--synth", choices=CLUSTER_PRESETS)
    p_cluster.add_argument("--distance", choices=("hamming", "clustered-sqrt"), required=True)
    p_cluster.add_argument("--k", type=int, default=10)
    p_cluster.add_argument("--ell", type=int, default=100)
    p_cluster.add_argument("--init", choices=("kmeanspp", "farthest-first"), default="kmeanspp")
    p_cluster.add_argument("--trials", type=int, default=10)
    p_cluster.add_argument("--quota", type=int, default=None)
    p_cluster.add_argument("--max-iter", type=int, default=50)
    p_cluster.add_argument("--seed", type=int, default=0)
    p_cluster.add_argument("--out")
    p_cluster.set_defaults(func=cmd_cluster)

    p_kbest = sub.add_parser("kbest", help="diverse k-best summaries of an item collection")
    p_kbest.add_argument("--corpus", required=True)
    p_kbest.add_argument("--k", type=int, default=5)
    p_kbest.add_argument("--ell", type=int, default=6)
    p_kbest.add_argument("--method", choices=("hm", "sp", "tp"), default="tp")
    p_kbest.add_argument("--seed", type=int, default=0)
    p_kbest.add_argument("--out")
    p_kbest.set_defaults(func=cmd_kbest)

    p_gen = sub.add_parser("gen", help="write preset corpora / instance files")
    p_gen.add_argument("--preset", required=True, choices=GEN_PRESETS)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=cmd_gen)

    p_cert = sub.add_parser("certify", help="run a solver and certify its guarantee")
    p_cert.add_argument("direction", choices=("min", "max"))
    p_cert.add_argument("--instance", required=True)
    p_cert.add_argument("--solver", required=True, choices=sorted(set(MIN_SOLVERS + MAX_SOLVERS)))
    p_cert.add_argument("--seed", type=int, default=None)
    p_cert.add_argument("--draws", type=int, default=1000)
    p_cert.add_argument("--tol", type=float, default=1e-7)
    p_cert.add_argument("--out")
    p_cert.set_defaults(func=cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstanceParseError as exc:
        where = ""
        if exc.line is not None:
            where = f" (line {exc.line}, column {exc.column})"
        print(f"parse error: {exc}{where}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (
        InfeasibleConstraintError,
        UnsupportedConstraintError,
        GroundSetTooLargeError,
        PolymatroidValidationError,
        ConvergenceError,
        ValueError,
    ) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
