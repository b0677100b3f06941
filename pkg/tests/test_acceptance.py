"""End-to-end acceptance run: one test per headline guarantee, each
printing an explicit pass/fail line (echoed in the terminal summary)."""
import itertools
import time
import warnings

import numpy as np
import pytest

import conftest

from qsqlearn.boolean_oracles import (
    BooleanFunction,
    bitflip_unitary,
    compress_observable_phase,
    diagonal_choi_observable,
    lift_observable_bitflip,
    phase_unitary,
    separation_gap,
    uniform_example_state,
    variance_probe,
)
from qsqlearn.cli import DEFAULTS, cmd_figure1
from qsqlearn.learners import (
    GlConfig,
    JuntaConfig,
    goldreich_levin,
    learn_junta,
    learn_qbf,
    learn_shallow,
    qsq_state_tomography,
)
from qsqlearn.metrics import (
    KrausChannel,
    StateEnsemble,
    choi_distance,
    choi_matrix,
    expected_risk_mc,
    purity_unitarity_sandwich_check,
    unitarity,
)
from qsqlearn.oracle import NoiseModel, Observable, QsqOracle, expectation_exact
from qsqlearn.pauli import PauliPrefix, PauliString, all_pauli_strings, pauli_matrix
from qsqlearn.states import (
    DenseOperator,
    bell_transform,
    choi_of_circuit,
    choi_of_unitary,
    embed_operator,
    haar_random_state,
    haar_random_unitary,
    partial_trace,
    random_brickwork_circuit,
)

GAP_BOUND = 1 - np.sqrt(17 / 32)


def _report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] {name}" + (f" ({detail})" if detail else "")
    print(line)
    conftest.REPORT_LINES.append(line)
    assert ok, f"{name}: {detail}"


def test_fourier_bell_correctness():
    start = time.monotonic()
    rng = np.random.default_rng(1000)
    worst = 0.0
    parseval = 0.0
    for i in range(50):
        n = (1, 2, 3)[i % 3]
        u = haar_random_unitary(n, rng)
        c = bell_transform(choi_of_unitary(u))
        for p in all_pauli_strings(n):
            ref = np.trace(pauli_matrix(p).conj().T @ u.entries) / 2**n
            worst = max(worst, abs(c[p.code] - ref))
        parseval = max(parseval, abs(np.sum(np.abs(c) ** 2) - 1.0))
    elapsed = time.monotonic() - start
    _report(
        "Fourier/Bell coefficients match trace oracle (50 unitaries, n<=3)",
        worst < 1e-9 and parseval < 1e-9 and elapsed < 10,
        f"max dev {worst:.2e}, Parseval dev {parseval:.2e}, {elapsed:.1f}s",
    )


def test_single_query_subset_mass_exhaustive():
    start = time.monotonic()
    ok = True
    worst = 0.0
    for n in (1, 2, 3):
        u = haar_random_unitary(n, 2000 + n)
        coeffs = {
            p: np.trace(pauli_matrix(p).conj().T @ u.entries) / 2**n
            for p in all_pauli_strings(n)
        }
        for k in range(n + 1):
            for fixed in itertools.product("IXYZ", repeat=k):
                pre = PauliPrefix(n, "".join(fixed))
                brute = sum(abs(coeffs[p]) ** 2 for p in pre.members())
                oracle = QsqOracle(choi_of_unitary(u))
                got = oracle.query(Observable.subset_mass(pre), 0.01)
                worst = max(worst, abs(got - brute))
                ok = ok and oracle.ledger.total == 1
    elapsed = time.monotonic() - start
    _report(
        "Single-query subset mass, exhaustive prefixes n<=3",
        ok and worst < 1e-9 and elapsed < 30,
        f"max dev {worst:.2e}, {elapsed:.1f}s",
    )


def _random_hermitian_unitary(n, rng):
    v = haar_random_unitary(n, rng)
    signs = np.where(rng.integers(0, 2, size=2**n) == 0, -1.0, 1.0)
    if np.all(signs == signs[0]):
        signs[0] = -signs[0]
    return DenseOperator(n, (v.entries * signs) @ v.entries.conj().T)


def test_gl_guarantees_adversarial():
    start = time.monotonic()
    rng = np.random.default_rng(3000)
    runs = failures = 0
    count_ok = True
    for trial in range(200):
        a = _random_hermitian_unitary(3, rng)
        coeffs = bell_transform(choi_of_unitary(a))
        for gamma in (0.3, 0.5):
            sign = +1 if trial % 2 == 0 else -1
            oracle = QsqOracle(choi_of_unitary(a), NoiseModel.adversarial_sign(sign))
            found = {p.code for p in goldreich_levin(oracle, GlConfig(gamma))}
            heavy = set(np.nonzero(np.abs(coeffs) >= gamma)[0].tolist())
            complete = heavy <= found
            sound = all(abs(coeffs[c]) >= gamma / 2 - 1e-12 for c in found)
            runs += 1
            failures += not (complete and sound)
            count_ok = count_ok and (
                oracle.ledger.total <= 4 * 3 * int(np.ceil(4 / gamma**2))
            )
    elapsed = time.monotonic() - start
    _report(
        "GL completeness/soundness under adversarial noise (200 targets)",
        failures == 0 and count_ok and elapsed < 120,
        f"{runs - failures}/{runs} runs, query bound ok={count_ok}, {elapsed:.1f}s",
    )


def test_qbf_reconstruction():
    start = time.monotonic()
    successes = 0
    for trial in range(20):
        u = random_brickwork_circuit(3, 2, 4000 + trial).compile()
        p = pauli_matrix(PauliString.from_letters("ZII"))
        a = DenseOperator(3, u.entries.conj().T @ p @ u.entries)
        oracle = QsqOracle(
            choi_of_unitary(a), NoiseModel.bounded_uniform(), seed=trial
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            exp = learn_qbf(oracle, 2, 0.15)
        rec = exp.to_operator()
        err = min(
            np.linalg.norm(a.entries - rec), np.linalg.norm(a.entries + rec)
        ) / np.sqrt(8)
        successes += err <= 0.15
    elapsed = time.monotonic() - start
    _report(
        "QBF reconstruction within 0.15 (20 conjugated-Pauli targets)",
        successes >= 18 and elapsed < 120,
        f"{successes}/20 within bound, {elapsed:.1f}s",
    )


def test_junta_learning():
    start = time.monotonic()
    successes = 0
    support_ok = True
    rng = np.random.default_rng(5000)
    for trial in range(100):
        support = tuple(sorted(rng.choice(4, size=2, replace=False).tolist()))
        w = haar_random_unitary(2, rng)
        u = DenseOperator(4, embed_operator(w.entries, support, 4))
        oracle = QsqOracle(
            choi_of_unitary(u), NoiseModel.bounded_uniform(), seed=trial
        )
        learned = learn_junta(oracle, JuntaConfig(2, 0.2))
        support_ok = support_ok and set(learned.junta_support) <= set(support)
        successes += choi_distance(u, learned.operator) <= 0.2
    elapsed = time.monotonic() - start
    _report(
        "Junta learning D <= 0.2 under bounded noise (100 2-juntas, n=4)",
        successes >= 95 and support_ok and elapsed < 180,
        f"{successes}/100 within bound, support always correct={support_ok}, "
        f"{elapsed:.1f}s",
    )


def test_tomography():
    start = time.monotonic()
    ok = True
    counts_ok = True
    for m in (1, 2, 3):
        for trial in range(50):
            psi = haar_random_state(m, 6000 + 100 * m + trial)
            oracle = QsqOracle(psi, NoiseModel.bounded_uniform(), seed=trial)
            est = qsq_state_tomography(oracle, 0.1, pure=True)
            td = np.sqrt(max(0.0, 1 - abs(np.vdot(psi.amps, est.amps)) ** 2))
            ok = ok and td <= 0.1
            counts_ok = counts_ok and oracle.ledger.total == 4**m - 1
    elapsed = time.monotonic() - start
    _report(
        "Tomography trace distance <= 0.1, exact query count (m=1..3, 50 each)",
        ok and counts_ok and elapsed < 60,
        f"all within bound={ok}, counts exact={counts_ok}, {elapsed:.1f}s",
    )


def test_shallow_learner_certificate():
    start = time.monotonic()
    certified = 0
    soundness_ok = True
    eps = 0.3
    for trial in range(20):
        circuit = random_brickwork_circuit(3, 1, 7000 + trial)
        oracle = QsqOracle(choi_of_circuit(circuit))
        learned = learn_shallow(oracle, 1, eps, seed=trial)
        if learned.certified:
            d = choi_distance(circuit.compile(), learned.operator)
            if d > eps:
                soundness_ok = False
            # re-verify the certificate on the true state, not the estimates
            true_marg = partial_trace(choi_of_circuit(circuit), range(6)).entries
            w_marg = partial_trace(
                choi_of_unitary(learned.operator), range(6)
            ).entries
            gap = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(true_marg - w_marg)))
            soundness_ok = soundness_ok and gap <= 2 * eps**2 / 3
            certified += d <= eps
    elapsed = time.monotonic() - start
    _report(
        "Shallow learner certified recovery (20 depth-1 targets, n=3)",
        certified >= 16 and soundness_ok and elapsed < 300,
        f"{certified}/20 certified+accurate, soundness ok={soundness_ok}, "
        f"{elapsed:.1f}s",
    )


def test_risk_identities():
    start = time.monotonic()
    haar_ok = True
    stab_ok = True
    rng = np.random.default_rng(8000)
    for t in range(20):
        u = haar_random_unitary(2, rng)
        v = haar_random_unitary(2, rng)
        d = choi_distance(u, v)
        mean, se = expected_risk_mc(u, v, StateEnsemble.haar_global(2), 2000, t)
        haar_ok = haar_ok and abs(mean - 4 / 5 * d**2) <= 3 * se
        mean, se = expected_risk_mc(
            u, v, StateEnsemble.stabilizer_product(2), 2000, t
        )
        scaled = 4 / 5 * mean
        stab_ok = stab_ok and (0.5 * d**2 - 3 * se <= scaled <= d**2 + 3 * se)
    elapsed = time.monotonic() - start
    _report(
        "Risk identities (Haar exact factor; stabilizer sandwich; 20 pairs)",
        haar_ok and stab_ok and elapsed < 60,
        f"haar ok={haar_ok}, stabilizer ok={stab_ok}, {elapsed:.1f}s",
    )


def test_unitarity_identities():
    start = time.monotonic()
    ok = True
    for s in range(20):
        ch = KrausChannel.random(2, 9000 + s)
        u = unitarity(ch)  # raises if the two paths disagree beyond 1e-9
        j = choi_matrix(ch).entries
        purity = np.real(np.trace(j @ j))
        overlap = sum(
            abs(np.trace(a @ b.conj().T)) ** 2 for a in ch.kraus for b in ch.kraus
        )
        ok = ok and abs(overlap - 16 * purity) < 1e-9
        ok = ok and purity_unitarity_sandwich_check(ch)
    u1 = unitarity(KrausChannel.from_unitary(haar_random_unitary(2, 1)))
    u0 = unitarity(KrausChannel.depolarizing(2, 1.0))
    elapsed = time.monotonic() - start
    _report(
        "Unitarity identities (overlap sum, dual paths, purity sandwich)",
        ok and abs(u1 - 1) < 1e-9 and abs(u0) < 1e-9 and elapsed < 30,
        f"unitary u={u1:.2e}+1? depol u={u0:.2e}, {elapsed:.1f}s",
    )


def test_separation_gap_and_variance_decay():
    start = time.monotonic()
    gaps = {n: separation_gap(n) for n in (2, 3)}
    variances = []
    for n in (2, 3, 4):
        obs = Observable.subset_mass([PauliString.identity(n)])
        samples = None if n <= 3 else 2000
        variances.append(variance_probe(n, obs, samples=samples, seed=0))
    decay = variances[0] > variances[1] > variances[2]
    elapsed = time.monotonic() - start
    _report(
        "Separation gap >= 0.2712 (n=2,3) and variance decay (n=2,3,4)",
        all(g >= GAP_BOUND for g in gaps.values()) and decay and elapsed < 120,
        f"gaps {gaps[2]:.4f}/{gaps[3]:.4f}, variances "
        + "/".join(f"{v:.4f}" for v in variances)
        + f", {elapsed:.1f}s",
    )


def test_oracle_map_validations():
    start = time.monotonic()
    rng = np.random.default_rng(10_000)
    # bit-flip lift: x-diagonal observable, all 16 functions at n=2
    d = 8
    a = np.zeros((d, d), dtype=complex)
    for x in range(4):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = (g + g.conj().T) / 2
        h /= max(1.0, np.linalg.norm(h, 2))
        a[2 * x : 2 * x + 2, 2 * x : 2 * x + 2] = h
    lifted, scale = lift_observable_bitflip(DenseOperator(3, a))
    lift_ok = True
    for table in itertools.product((0, 1), repeat=4):
        f = BooleanFunction(2, table)
        psi = uniform_example_state(f).amps
        lhs = np.real(psi.conj() @ a @ psi)
        choi = choi_of_unitary(bitflip_unitary(f)).vec.amps
        rhs = scale * np.real(choi.conj() @ lifted.entries @ choi)
        lift_ok = lift_ok and abs(lhs - rhs) < 1e-9
    # phase compression: linear coefficients with scale 2 validate
    c = rng.uniform(-1, 1, size=4)
    b = diagonal_choi_observable(c, 2)
    bp, pscale = compress_observable_phase(c)
    comp_ok = True
    for table in itertools.product((0, 1), repeat=4):
        f = BooleanFunction(2, table)
        lhs = expectation_exact(choi_of_unitary(phase_unitary(f)), b)
        psi = uniform_example_state(f).amps
        rhs = pscale * np.real(psi.conj() @ bp.entries @ psi)
        comp_ok = comp_ok and abs(lhs - rhs) < 1e-9
    elapsed = time.monotonic() - start
    _report(
        "Oracle-map identities (x-diagonal lift; phase compression), n=2",
        lift_ok and comp_ok and elapsed < 60,
        f"lift ok={lift_ok} (scale {scale}), compression ok={comp_ok} "
        f"(scale {pscale}, linear weights), {elapsed:.1f}s",
    )


def _figure1_means(noise):
    cfg = dict(DEFAULTS["figure1"])
    cfg["noise"] = noise
    _, rows, _, _, _ = cmd_figure1(cfg, seed=11_000, jobs=1)
    means, ses = {}, {}
    for gamma in cfg["gammas"]:
        errs = np.array([r[4] for r in rows if r[0] == gamma])
        means[gamma] = errs.mean()
        ses[gamma] = errs.std(ddof=1) / np.sqrt(len(errs))
    return cfg["gammas"], means, ses


def test_figure1_qualitative():
    start = time.monotonic()
    gammas, g_means, g_ses = _figure1_means("gaussian")
    _, e_means, _ = _figure1_means("exact")
    monotone = all(
        g_means[gammas[i + 1]]
        <= g_means[gammas[i]] + np.hypot(g_ses[gammas[i]], g_ses[gammas[i + 1]])
        for i in range(len(gammas) - 1)
    )
    exact_below = all(e_means[g] <= g_means[g] for g in gammas)
    elapsed = time.monotonic() - start
    _report(
        "Figure-1 qualitative: error decreases with 1/gamma; exact <= noisy",
        monotone and exact_below and elapsed < 600,
        "means "
        + " ".join(f"{g}:{g_means[g]:.3f}" for g in gammas)
        + f", exact below={exact_below}, {elapsed:.1f}s",
    )


def test_csv_determinism(tmp_path):
    from qsqlearn.cli import main

    cfg = tmp_path / "c.cfg"
    cfg.write_text("trials = 3\n")
    argv = ["gl", "--seed", "77", "--config", str(cfg)]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    same = (tmp_path / "a" / "gl.csv").read_bytes() == (
        tmp_path / "b" / "gl.csv"
    ).read_bytes()
    _report("CSV determinism: identical seed+config give identical bytes", same)
