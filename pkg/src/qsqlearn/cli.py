"""Command-line experiment driver.

Each subcommand runs a seeded batch of trials, writes one CSV of raw rows
(plotting and aggregation happen downstream) and a JSON manifest with the
resolved configuration and query accounting.  Identical config and seed
produce byte-identical CSV output; trial-level parallelism never changes
row order.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .boolean_oracles import separation_gap
from .learners import (
    GlConfig,
    JuntaConfig,
    estimate_coefficients_with_signs,
    goldreich_levin,
    learn_junta,
    learn_shallow,
    qsq_state_tomography,
)
from .metrics import KrausChannel, choi_distance, choi_matrix, purity_unitarity_sandwich_check, unitarity
from .oracle import NoiseModel, QsqOracle
from .pauli import PauliString
from .states import (
    DenseOperator,
    bell_transform,
    choi_of_circuit,
    choi_of_unitary,
    embed_operator,
    haar_random_state,
    haar_random_unitary,
    random_brickwork_circuit,
)

GAP_BOUND = 1 - np.sqrt(17 / 32)

DEFAULTS = {
    "figure1": {"n": 4, "depth": 2, "trials": 10, "gammas": [0.8, 0.4, 0.2, 0.1], "noise": "gaussian"},
    "junta": {"n": 4, "k": 2, "epsilon": 0.2, "trials": 100, "noise": "bounded"},
    "gl": {"n": 3, "depth": 2, "gammas": [0.3, 0.5], "trials": 20, "noise": "adversarial"},
    "shallow": {"n": 3, "depth": 1, "epsilon": 0.3, "trials": 20, "restarts": 50, "noise": "exact"},
    "tomo": {"ms": [1, 2, 3], "epsilon": 0.1, "trials": 50, "noise": "bounded"},
    "unitarity": {"n": 2, "env_dim": 4, "trials": 20, "noise": "exact"},
    "separation": {"n": 2, "noise": "exact"},
}

_NOISE = {
    "exact": NoiseModel.exact,
    "gaussian": NoiseModel.gaussian,
    "bounded": NoiseModel.bounded_uniform,
    "adversarial": NoiseModel.adversarial_sign,
}


def _parse_value(text: str):
    text = text.strip()
    if "," in text:
        return [_parse_value(part) for part in text.split(",")]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def load_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; commas make lists."""
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = _parse_value(value)
    return out


def resolve_config(command: str, args) -> dict:
    cfg = dict(DEFAULTS[command])
    if args.config:
        file_cfg = load_config_file(args.config)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(file_cfg)
    if args.noise:
        cfg["noise"] = args.noise
    for key in ("trials",):
        if cfg.get(key, 1) < 1:
            raise ValueError(f"{key} must be positive")
    return cfg


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


def write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _run_trials(worker, tasks: list, jobs: int) -> list:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, tasks))
    return [worker(task) for task in tasks]


def _zdiag_codes(n: int) -> np.ndarray:
    """Base-4 codes of the strings over {I, Z} only."""
    codes = [0]
    for _ in range(n):
        codes = [c * 4 for c in codes] + [c * 4 + 3 for c in codes]
    return np.array(sorted(codes))


# ---------------------------------------------------------------- figure1

def _figure1_trial(task):
    trial, child, cfg = task
    rng = np.random.default_rng(child)
    n, depth = cfg["n"], cfg["depth"]
    u = random_brickwork_circuit(n, depth, rng).compile()
    zdiag = _zdiag_codes(n)
    rows = []
    for gamma in cfg["gammas"]:
        for code in zdiag:
            p = PauliString(n, int(code))
            a = u.entries.conj().T @ (_pauli_dense(p) @ u.entries)
            choi = choi_of_unitary(DenseOperator(n, a))
            truth = abs(float(np.real(np.sum(bell_transform(choi)[zdiag]))))
            oracle = QsqOracle(choi, _NOISE[cfg["noise"]](), seed=rng)
            found = goldreich_levin(oracle, GlConfig(gamma))
            pred = 0.0
            if found:
                try:
                    coeffs = estimate_coefficients_with_signs(oracle, found, gamma)
                    pred = abs(
                        sum(v for q, v in coeffs.items() if q.code in set(zdiag.tolist()))
                    )
                except ValueError:
                    pred = 0.0
            rows.append(
                (gamma, 1.0 / gamma, p.letters, trial, abs(pred - truth),
                 oracle.ledger.total, oracle.ledger.min_tolerance)
            )
    return rows, sum(r[5] for r in rows), min(r[6] for r in rows), False


def _pauli_dense(p: PauliString) -> np.ndarray:
    from .pauli import pauli_matrix

    return pauli_matrix(p)


def cmd_figure1(cfg: dict, seed: int, jobs: int):
    children = np.random.SeedSequence(seed).spawn(cfg["trials"])
    tasks = [(t, children[t], cfg) for t in range(cfg["trials"])]
    results = _run_trials(_figure1_trial, tasks, jobs)
    rows = []
    for gamma in cfg["gammas"]:
        for trial, (trial_rows, _, _, _) in enumerate(results):
            rows += [r[:5] for r in trial_rows if r[0] == gamma]
    header = ["gamma", "inv_gamma", "observable", "trial", "abs_error"]
    total = sum(r[1] for r in results)
    min_tau = min(r[2] for r in results)
    return header, rows, total, min_tau, False


# ------------------------------------------------------------------ junta

def _junta_trial(task):
    trial, child, cfg = task
    rng = np.random.default_rng(child)
    n, k, eps = cfg["n"], cfg["k"], cfg["epsilon"]
    support = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
    w = haar_random_unitary(k, rng)
    u = DenseOperator(n, embed_operator(w.entries, support, n))
    oracle = QsqOracle(choi_of_unitary(u), _NOISE[cfg["noise"]](), seed=rng)
    learned = learn_junta(oracle, JuntaConfig(k, eps))
    d = choi_distance(u, learned.operator)
    support_ok = set(learned.junta_support) <= set(support)
    row = (trial, d, d <= eps, support_ok, learned.queries, learned.min_tolerance)
    return [row], learned.queries, learned.min_tolerance, not support_ok


def cmd_junta(cfg: dict, seed: int, jobs: int):
    children = np.random.SeedSequence(seed).spawn(cfg["trials"])
    tasks = [(t, children[t], cfg) for t in range(cfg["trials"])]
    results = _run_trials(_junta_trial, tasks, jobs)
    header = ["trial", "distance", "success", "support_ok", "queries", "min_tolerance"]
    rows = [r for res in results for r in res[0]]
    return (header, rows, sum(r[1] for r in results),
            min(r[2] for r in results), any(r[3] for r in results))


# --------------------------------------------------------------------- gl

def _gl_trial(task):
    trial, child, cfg = task
    rng = np.random.default_rng(child)
    n = cfg["n"]
    u = random_brickwork_circuit(n, cfg["depth"], rng).compile()
    coeffs = bell_transform(choi_of_unitary(u))
    bounded = cfg["noise"] in ("exact", "bounded", "adversarial")
    rows, total, min_tau, failed = [], 0, float("inf"), False
    for gamma in cfg["gammas"]:
        oracle = QsqOracle(choi_of_unitary(u), _NOISE[cfg["noise"]](), seed=rng)
        found = goldreich_levin(oracle, GlConfig(gamma))
        found_codes = {p.code for p in found}
        heavy = set(np.nonzero(np.abs(coeffs) >= gamma)[0].tolist())
        complete = heavy <= found_codes
        sound = all(abs(coeffs[c]) >= gamma / 2 - 1e-12 for c in found_codes)
        if bounded and not (complete and sound):
            failed = True
        rows.append((gamma, trial, len(found), oracle.ledger.total, complete, sound))
        total += oracle.ledger.total
        min_tau = min(min_tau, oracle.ledger.min_tolerance)
    return rows, total, min_tau, failed


def cmd_gl(cfg: dict, seed: int, jobs: int):
    children = np.random.SeedSequence(seed).spawn(cfg["trials"])
    tasks = [(t, children[t], cfg) for t in range(cfg["trials"])]
    results = _run_trials(_gl_trial, tasks, jobs)
    header = ["gamma", "trial", "found", "queries", "complete", "sound"]
    rows = []
    for gamma in cfg["gammas"]:
        for res in results:
            rows += [r for r in res[0] if r[0] == gamma]
    return (header, rows, sum(r[1] for r in results),
            min(r[2] for r in results), any(r[3] for r in results))


# ---------------------------------------------------------------- shallow

def _shallow_trial(task):
    trial, child, cfg = task
    rng = np.random.default_rng(child)
    n, depth, eps = cfg["n"], cfg["depth"], cfg["epsilon"]
    circuit = random_brickwork_circuit(n, depth, rng)
    oracle = QsqOracle(choi_of_circuit(circuit), _NOISE[cfg["noise"]](), seed=rng)
    learned = learn_shallow(
        oracle, depth, eps, seed=rng, restarts=cfg["restarts"]
    )
    d = choi_distance(circuit.compile(), learned.operator)
    row = (trial, learned.certified, learned.diagnostics["certificate"], d,
           learned.queries, learned.min_tolerance)
    return [row], learned.queries, learned.min_tolerance, False


def cmd_shallow(cfg: dict, seed: int, jobs: int):
    children = np.random.SeedSequence(seed).spawn(cfg["trials"])
    tasks = [(t, children[t], cfg) for t in range(cfg["trials"])]
    results = _run_trials(_shallow_trial, tasks, jobs)
    header = ["trial", "certified", "certificate", "distance", "queries", "min_tolerance"]
    rows = [r for res in results for r in res[0]]
    return (header, rows, sum(r[1] for r in results),
            min(r[2] for r in results), False)


# ------------------------------------------------------------------- tomo

def _tomo_trial(task):
    trial, child, cfg = task
    rng = np.random.default_rng(child)
    eps = cfg["epsilon"]
    rows, total, min_tau, failed = [], 0, float("inf"), False
    ms = cfg["ms"] if isinstance(cfg["ms"], list) else [cfg["ms"]]
    for m in ms:
        psi = haar_random_state(m, rng)
        oracle = QsqOracle(psi, _NOISE[cfg["noise"]](), seed=rng)
        est = qsq_state_tomography(oracle, eps, pure=True)
        d = float(np.sqrt(max(0.0, 1 - abs(np.vdot(psi.amps, est.amps)) ** 2)))
        count_ok = oracle.ledger.total == 4**m - 1
        if not count_ok:
            failed = True
        rows.append((m, trial, d, d <= eps, oracle.ledger.total))
        total += oracle.ledger.total
        min_tau = min(min_tau, oracle.ledger.min_tolerance)
    return rows, total, min_tau, failed


def cmd_tomo(cfg: dict, seed: int, jobs: int):
    children = np.random.SeedSequence(seed).spawn(cfg["trials"])
    tasks = [(t, children[t], cfg) for t in range(cfg["trials"])]
    results = _run_trials(_tomo_trial, tasks, jobs)
    header = ["m", "trial", "trace_distance", "within_epsilon", "queries"]
    ms = cfg["ms"] if isinstance(cfg["ms"], list) else [cfg["ms"]]
    rows = []
    for m in ms:
        for res in results:
            rows += [r for r in res[0] if r[0] == m]
    return (header, rows, sum(r[1] for r in results),
            min(r[2] for r in results), any(r[3] for r in results))


# -------------------------------------------------------------- unitarity

def _unitarity_trial(task):
    trial, child, cfg = task
    rng = np.random.default_rng(child)
    ch = KrausChannel.random(cfg["n"], rng, env_dim=cfg["env_dim"])
    u = unitarity(ch)  # raises if the two computation paths disagree
    j = choi_matrix(ch).entries
    purity = float(np.real(np.trace(j @ j)))
    sandwich = purity_unitarity_sandwich_check(ch)
    overlap = sum(
        abs(np.trace(a @ b.conj().T)) ** 2 for a in ch.kraus for b in ch.kraus
    )
    identity_ok = abs(overlap - 4 ** cfg["n"] * purity) < 1e-9
    row = (trial, u, purity, sandwich, identity_ok)
    return [row], 0, float("inf"), not (sandwich and identity_ok)


def cmd_unitarity(cfg: dict, seed: int, jobs: int):
    children = np.random.SeedSequence(seed).spawn(cfg["trials"])
    tasks = [(t, children[t], cfg) for t in range(cfg["trials"])]
    results = _run_trials(_unitarity_trial, tasks, jobs)
    header = ["trial", "unitarity", "choi_purity", "sandwich_ok", "identity_ok"]
    rows = [r for res in results for r in res[0]]
    return header, rows, 0, float("inf"), any(r[3] for r in results)


# ------------------------------------------------------------- separation

def cmd_separation(cfg: dict, seed: int, jobs: int):
    gap = separation_gap(cfg["n"])
    ok = gap >= GAP_BOUND
    header = ["n", "gap", "bound", "gap_ok"]
    rows = [(cfg["n"], gap, float(GAP_BOUND), ok)]
    return header, rows, 0, float("inf"), not ok


COMMANDS = {
    "figure1": cmd_figure1,
    "junta": cmd_junta,
    "gl": cmd_gl,
    "shallow": cmd_shallow,
    "tomo": cmd_tomo,
    "unitarity": cmd_unitarity,
    "separation": cmd_separation,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsqlearn", description="statistical-query unitary learning experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--seed", type=int, required=True, help="master RNG seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel trials")
        p.add_argument("--noise", choices=sorted(_NOISE), default=None)
        p.add_argument("--config", default=None, help="key = value config file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0:
        print("seed must be non-negative", file=sys.stderr)
        return 2
    try:
        cfg = resolve_config(args.command, args)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.monotonic()
    header, rows, total_queries, min_tau, failed = COMMANDS[args.command](
        cfg, args.seed, max(1, args.jobs)
    )
    wallclock = time.monotonic() - start
    write_csv(out_dir / f"{args.command}.csv", header, rows)
    manifest = {
        "command": args.command,
        "config": cfg,
        "seed": args.seed,
        "version": __version__,
        "trials": cfg.get("trials", 1),
        "total_queries": int(total_queries),
        "min_tolerance": None if np.isinf(min_tau) else min_tau,
        "wallclock_s": round(wallclock, 3),
    }
    with open(out_dir / f"{args.command}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    if failed:
        print(f"{args.command}: assertion-style checks FAILED", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
