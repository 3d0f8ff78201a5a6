"""Acceptance suite.

Each criterion is implemented as a function returning a JSON-serializable
summary; the corresponding test runs it, asserts its verdicts, and prints
one pass/fail line.  The final criterion re-runs all of them and checks
that the summaries are byte-identical, which pins determinism end to end.

Tolerances and budgets are fixed here, not configurable:

  1  pivot closed forms vs tangency oracle, 1e-9 (plot anchors 5e-3)
  2  fixpoint positioning, 1000 bistable draws, comparisons at 1e-7
  3  contractive uniqueness, 1000 draws
  4  settling of 200 random cascades: <= 1e5 iterations at step 1e-12,
     agreement with 1e4-step joint iteration at 1e-9
  5  extraction of the net fixtures: <= 3^n states, no consistency
     violations, exhaustive equivalence (length 12 single-neuron,
     10 multi-letter) plus 1e4 random words, fixed seeds
  6  identity-element detection, exact sets plus 100 random mutations
  7  aperiodicity frontier
  8  succinctness: minimized extracted latch has exactly 2 states,
     matching the bounded residual-class count
  9  every automaton fixture vs its arithmetic/scan oracle to length 8
  10 byte-identical summaries on re-run
"""

import json
import math
import random

import oracles
from tanhcascade import automata_core as ac
from tanhcascade import extraction as ex
from tanhcascade import fixtures as fx
from tanhcascade import rnc_dynamics as rd
from tanhcascade import tanh_analysis as ta
from tanhcascade.rnc_dynamics import (
    CascadeNet,
    GroundedAlphabet,
    InputFunction,
    Neuron,
)

PIVOT_WEIGHTS = (1.01, 1.1, 1.7, 2.0, 4.0, 8.0, 32.0)

_cache = {}


def summary(n):
    if n not in _cache:
        _cache[n] = CRITERIA[n]()
    return _cache[n]


def report(n, data, verdict=True):
    line = f"[{'PASS' if verdict else 'FAIL'}] criterion {n}: {data['headline']}"
    print(line)
    assert verdict, line


# -- criterion 1: pivot closed forms ----------------------------------------

def criterion_1():
    worst = 0.0
    for w in PIVOT_WEIGHTS:
        p_oracle, v_oracle = oracles.tangency_by_newton(w)
        piv = ta.pivots(w)
        worst = max(worst, abs(piv.p_plus - p_oracle),
                    abs(piv.v_plus - v_oracle))
    piv17 = ta.pivots(1.7)
    anchors_ok = (abs(piv17.p_plus - 0.64) <= 0.005
                  and abs(piv17.p_minus + 0.64) <= 0.005
                  and abs(piv17.v_plus + 0.33) <= 0.005
                  and abs(piv17.v_minus - 0.33) <= 0.005)
    return {
        "headline": f"pivot closed forms within {worst:.3e} of the "
                    f"tangency oracle (bound 1e-9), plot anchors ok",
        "worst_oracle_gap": worst,
        "anchors_ok": anchors_ok,
        "passed": worst <= 1e-9 and anchors_ok,
    }


def test_criterion_1():
    data = summary(1)
    report(1, data, data["passed"])


# -- criteria 2 and 3: fixpoint structure ------------------------------------

def criterion_2():
    rng = random.Random(1002)
    tol = 1e-7
    violations = 0
    for _ in range(1000):
        w = rng.uniform(1.0 + 1e-12, 10.0)
        v = rng.uniform(-3.0, 3.0)
        piv = ta.pivots(w)
        pts = ta.fixpoints(w, v).points
        ok = all(-1 - tol <= x <= 1 + tol for x in pts)
        if len(pts) == 1:
            ok &= pts[0] <= piv.p_minus + tol or pts[0] >= piv.p_plus - tol
        elif len(pts) == 2:
            ok &= pts[0] <= piv.p_minus + tol and pts[1] >= piv.p_plus - tol
        elif len(pts) == 3:
            ok &= (pts[0] <= piv.p_minus + tol
                   and piv.p_minus - tol < pts[1] < piv.p_plus + tol
                   and pts[2] >= piv.p_plus - tol)
        else:
            ok = False
        violations += not ok
    return {
        "headline": f"fixpoint positioning: {violations} violations "
                    f"in 1000 bistable draws",
        "violations": violations,
        "passed": violations == 0,
    }


def test_criterion_2():
    data = summary(2)
    report(2, data, data["passed"])


def criterion_3():
    rng = random.Random(1003)
    violations = 0
    for _ in range(1000):
        w = rng.uniform(1e-9, 1.0)
        v = rng.uniform(-3.0, 3.0)
        violations += len(ta.fixpoints(w, v).points) != 1
    return {
        "headline": f"contractive uniqueness: {violations} violations "
                    f"in 1000 draws",
        "violations": violations,
        "passed": violations == 0,
    }


def test_criterion_3():
    data = summary(3)
    report(3, data, data["passed"])


# -- criterion 4: settling convergence ---------------------------------------

def random_rncp(rng, max_neurons=4):
    """Random positive-weight cascade; weights skip the |w - 1| band
    where the fixpoint contraction rate degenerates toward 1."""
    n = rng.randint(1, max_neurons)
    input_dim = rng.randint(1, 2)
    neurons = []
    for i in range(n):
        w = rng.choice([rng.uniform(0.2, 0.9), rng.uniform(1.2, 5.0)])
        weights = tuple(rng.uniform(-1.5, 1.5)
                        for _ in range(input_dim + i))
        neurons.append(Neuron(w, InputFunction.affine(
            weights, rng.uniform(-1.0, 1.0))))
    reps = {letter: tuple(rng.uniform(-2, 2) for _ in range(input_dim))
            for letter in ("e", "a", "b")}
    net = CascadeNet(
        input_dim=input_dim,
        neurons=tuple(neurons),
        initial_state=tuple(rng.uniform(-1, 1) for _ in range(n)),
        output_fn=InputFunction.affine(
            tuple(rng.uniform(-1, 1) for _ in range(n))),
    )
    alphabet = GroundedAlphabet(
        letters=("e", "a", "b"),
        representatives=reps,
        identity_letter="e",
        output_bands=((-math.inf, 0.0, "neg"), (0.0, math.inf, "pos")),
    )
    return net, alphabet


def criterion_4():
    rng = random.Random(1004)
    max_steps = 0
    worst_gap = 0.0
    for _ in range(200):
        net, alphabet = random_rncp(rng)
        x = tuple(rng.uniform(-1, 1) for _ in range(net.n_neurons))
        limit, steps = rd.settle(net, alphabet, x,
                                 tol=1e-12, max_iter=10**5)
        max_steps = max(max_steps, steps)
        u_e = alphabet.representatives["e"]
        joint = oracles.joint_settle(
            lambda s, u: rd.step(net, s, u), x, u_e, 10**4)
        worst_gap = max(worst_gap,
                        max(abs(a - b) for a, b in zip(limit, joint)))
    return {
        "headline": f"settling: max {max_steps} iterations "
                    f"(bound 1e5), joint-iteration gap {worst_gap:.3e} "
                    f"(bound 1e-9)",
        "max_steps": max_steps,
        "worst_gap": worst_gap,
        "passed": max_steps <= 10**5 and worst_gap <= 1e-9,
    }


def test_criterion_4():
    data = summary(4)
    report(4, data, data["passed"])


# -- criterion 5: extraction soundness ---------------------------------------

# exhaustive depth: 12 for single-neuron nets, 10 for the 2-level cascade
NET_FIXTURES = (
    ("latch", fx.latch_net, 12),
    ("p_then_q", fx.p_then_q_net, 10),
    ("p_since_q", fx.p_since_q_net, 12),
)


def criterion_5():
    results = {}
    ok = True
    for name, build, max_len in NET_FIXTURES:
        net, alphabet = build()
        rep = ex.extract(net, alphabet)
        mismatches = sum(d.kind == "RepresentativeMismatch"
                         for d in rep.diagnostics)
        witness = ac.net_equivalent(net, alphabet, rep.flat,
                                    max_len=max_len,
                                    random_trials=10**4, seed=1005)
        results[name] = {
            "states": rep.state_count,
            "bound": 3 ** net.n_neurons,
            "mismatch_diagnostics": mismatches,
            "equivalent": witness is None,
            "counterexample": None if witness is None else list(witness),
        }
        ok &= (rep.state_count <= 3 ** net.n_neurons
               and mismatches == 0 and witness is None)
    return {
        "headline": "extraction of "
                    + ", ".join(f"{k} ({v['states']} states)"
                                for k, v in results.items())
                    + " verified exhaustively plus 1e4 random words",
        "nets": results,
        "passed": ok,
    }


def test_criterion_5():
    data = summary(5)
    report(5, data, data["passed"])


# -- criterion 6: identity detection -----------------------------------------

IDENTITY_FIXTURES = (
    ("diamond_p", fx.dfa_diamond_p, {"{}"}),
    ("p_since_q", fx.dfa_p_since_q, {"{p}"}),
    ("grid_3x3", lambda: fx.dfa_grid(3, 3, (1, 1), (3, 3)), {"stayed"}),
    ("sum_mod_7", lambda: fx.dfa_sum_mod_k(7), {"0"}),
    ("sum_bits_eq_16", lambda: fx.dfa_sum_bits_eq(16), {"0"}),
)


def criterion_6():
    exact_ok = True
    for _, build, want in IDENTITY_FIXTURES:
        exact_ok &= ac.identity_letters(build()) == want

    rng = random.Random(1006)
    spurious = 0
    for trial in range(100):
        _, build, want = IDENTITY_FIXTURES[trial % len(IDENTITY_FIXTURES)]
        a = build()
        non_identity = [letter for letter in a.alphabet
                        if letter not in want]
        letter = rng.choice(non_identity)
        k = a.semi.letter_index(letter)
        q = rng.randrange(a.n_states)
        delta = [list(row) for row in a.semi.delta]
        delta[q][k] = rng.randrange(a.n_states)
        mutated = ac.Automaton(
            ac.Semiautomaton(a.alphabet, a.n_states,
                             tuple(tuple(r) for r in delta)),
            a.initial, a.outputs)
        got = ac.identity_letters(mutated)
        truth = oracles.independent_identity_elements(mutated)
        spurious += got != truth
    return {
        "headline": f"identity letters exact on 5 fixtures; "
                    f"{spurious} spurious results in 100 mutations",
        "exact_ok": exact_ok,
        "spurious": spurious,
        "passed": exact_ok and spurious == 0,
    }


def test_criterion_6():
    data = summary(6)
    report(6, data, data["passed"])


# -- criterion 7: aperiodicity frontier ---------------------------------------

def criterion_7():
    aperiodic = {
        "diamond_p": fx.dfa_diamond_p(),
        "p_since_q": fx.dfa_p_since_q(),
        "grid_3x3": fx.dfa_grid(3, 3, (1, 1), (3, 3)),
        "sum_bits_eq_16": fx.dfa_sum_bits_eq(16),
    }
    periodic = {f"sum_mod_{k}": fx.dfa_sum_mod_k(k) for k in (2, 3, 7)}
    got = {name: ac.is_aperiodic(a) for name, a in aperiodic.items()}
    got.update({name: ac.is_aperiodic(a) for name, a in periodic.items()})
    ok = all(got[name] for name in aperiodic) \
        and not any(got[name] for name in periodic)
    return {
        "headline": "aperiodic: eventually-p, since, grid, bit-counter; "
                    "periodic: mod 2/3/7",
        "verdicts": got,
        "passed": ok,
    }


def test_criterion_7():
    data = summary(7)
    report(7, data, data["passed"])


# -- criterion 8: succinctness ------------------------------------------------

def criterion_8():
    bounds_ok = all(entry["states"] <= entry["bound"]
                    for entry in summary(5)["nets"].values())
    net, alphabet = fx.latch_net()
    rep = ex.extract(net, alphabet)
    minimized = ac.minimize(rep.flat)
    classes = oracles.nerode_class_count(
        fx.dfa_diamond_p().run, fx.PROP_LETTERS_2,
        prefix_len=4, suffix_len=8)
    return {
        "headline": f"3^n bound holds on all extractions; minimized "
                    f"latch automaton has {minimized.n_states} states "
                    f"(residual classes: {classes})",
        "bounds_ok": bounds_ok,
        "minimized_states": minimized.n_states,
        "nerode_classes": classes,
        "passed": bounds_ok and minimized.n_states == 2 == classes,
    }


def test_criterion_8():
    data = summary(8)
    report(8, data, data["passed"])


# -- criterion 9: oracle agreement ---------------------------------------------

def _sweep_words(automaton, oracle, max_len):
    """Word-by-word comparison over all words up to max_len."""
    for word in oracles.words_up_to(automaton.alphabet, max_len):
        if automaton.run(word) != oracle(word):
            return list(word)
    return None


def _sweep_incremental(automaton, orac_init, orac_step, orac_out, max_len):
    """Prefix-tree comparison carrying the oracle's arithmetic state."""
    cols = list(range(len(automaton.alphabet)))
    failure = []

    def visit(q, state, depth):
        if failure:
            return
        if automaton.outputs[q] != orac_out(state):
            failure.append(True)
            return
        if depth == max_len:
            return
        for k in cols:
            visit(automaton.semi.delta[q][k],
                  orac_step(state, automaton.alphabet[k]), depth + 1)

    visit(automaton.initial, orac_init, 0)
    return bool(failure)


def criterion_9():
    verdicts = {}

    word_cases = [
        ("diamond_p", fx.dfa_diamond_p(), fx.brute_diamond_p),
        ("diamond_p_4", fx.dfa_diamond_p(fx.PROP_LETTERS_4),
         fx.brute_diamond_p),
        ("p_since_q", fx.dfa_p_since_q(), fx.brute_p_since_q),
        ("p_then_q", fx.dfa_p_then_q(), fx.brute_p_then_q),
        ("sum_mod_2", fx.dfa_sum_mod_k(2),
         lambda w: fx.brute_sum_mod_k(w, 2)),
        ("sum_mod_3", fx.dfa_sum_mod_k(3),
         lambda w: fx.brute_sum_mod_k(w, 3)),
        ("sum_bits_eq_16", fx.dfa_sum_bits_eq(16),
         lambda w: fx.brute_sum_bits_eq(w, 16)),
        ("product_upto_12", fx.dfa_product_truncated(12, 3),
         lambda w: fx.brute_product_truncated(w, 12)),
    ]
    for name, automaton, oracle in word_cases:
        verdicts[name] = _sweep_words(automaton, oracle, 8) is None

    # wide alphabets: carry the oracle's integer state down the prefix
    # tree instead of re-scanning every word (same arithmetic, no tables)
    verdicts["sum_mod_7"] = not _sweep_incremental(
        fx.dfa_sum_mod_k(7),
        0, lambda total, letter: total + int(letter),
        lambda total: str(total % 7), 8)
    verdicts["grid_3x3"] = not _sweep_incremental(
        fx.dfa_grid(3, 3, (1, 1), (3, 3)),
        (1, 1),
        lambda cell, letter: {
            "left": (max(1, cell[0] - 1), cell[1]),
            "right": (min(3, cell[0] + 1), cell[1]),
            "up": (cell[0], min(3, cell[1] + 1)),
            "down": (cell[0], max(1, cell[1] - 1)),
            "stayed": cell,
        }[letter],
        lambda cell: "1" if cell == (3, 3) else "0", 8)

    ok = all(verdicts.values())
    return {
        "headline": f"{sum(verdicts.values())}/{len(verdicts)} automaton "
                    f"fixtures match their oracles exhaustively to "
                    f"length 8",
        "verdicts": verdicts,
        "passed": ok,
    }


def test_criterion_9():
    data = summary(9)
    report(9, data, data["passed"])


# -- criterion 10: determinism --------------------------------------------------

def test_criterion_10():
    """Re-running criteria 1-9 yields byte-identical JSON summaries."""
    stale = 0
    for n in sorted(CRITERIA):
        first = json.dumps(summary(n), sort_keys=True)
        again = json.dumps(CRITERIA[n](), sort_keys=True)
        stale += first != again
    data = {"headline": f"{stale} of {len(CRITERIA)} criteria summaries "
                        f"changed between runs", "passed": stale == 0}
    report(10, data, data["passed"])


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}
