"""Digit extraction: an equivalent finite cascade from a positive-weight net.

Every neuron of a positive-weight cascade can be summarized by three
digits: where its settled limit under the identity letter lands relative
to the neuron's pivots (below the lower pivot, between the pivots, or
above the upper one).  Contractive neurons (w <= 1) have a unique settled
limit once their prefix has settled, so they carry the constant digit 2.

The extractor explores the reachable digit tuples breadth-first.  Each
discovered tuple keeps the first concrete network state that produced it
as its representative; stepping the representative under each letter and
re-digitizing yields the tuple-level transitions, which factor into one
three-state semiautomaton per neuron (level i's transition depends only
on the base letter and the digits of levels 1..i-1).  Transitions never
exercised by the exploration are completed as self-loops and flagged.

For a conforming net the digits determine the settled limit exactly; the
extractor cannot prove conformance, so it re-checks it wherever two
states claim the same digits and records violations as diagnostics
instead of failing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import automata_core, rnc_dynamics, tanh_analysis
from .automata_core import Automaton, SemiCascade, Semiautomaton
from .errors import NotRncPlus
from .rnc_dynamics import CascadeNet, GroundedAlphabet

DIGITS = (1, 2, 3)


@dataclass(frozen=True)
class ExtractionConfig:
    """Numeric knobs of the extraction."""

    settle_tol: float = 1e-12
    digit_margin: float = 1e-6
    rep_consistency_tol: float = 1e-7
    max_settle_iter: int = 10**6

    def __post_init__(self):
        for name in ("settle_tol", "digit_margin", "rep_consistency_tol",
                     "max_settle_iter"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        return {
            "settle_tol": self.settle_tol,
            "digit_margin": self.digit_margin,
            "rep_consistency_tol": self.rep_consistency_tol,
            "max_settle_iter": self.max_settle_iter,
        }


@dataclass(frozen=True)
class Diagnostic:
    """One extraction event worth surfacing to the caller.

    Kinds: AmbiguousDigit (a settled coordinate within digit_margin of a
    pivot), RepresentativeMismatch (two states with equal digits but
    different settled limits, or conflicting level transitions),
    DummyTransitionUsed (a level transition completed as a self-loop),
    RawOutputMismatch (representative's raw output letter differs from its
    settled output letter).
    """

    kind: str
    detail: dict

    def to_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


@dataclass
class ExtractionReport:
    """Everything the extractor learned about one net."""

    cascade: SemiCascade
    flat: Automaton
    representatives: dict   # digit tuple -> (raw state, settled limit)
    diagnostics: list
    state_count: int
    config: ExtractionConfig

    @property
    def sound(self) -> bool:
        """No consistency violations were observed during extraction."""
        return not any(d.kind == "RepresentativeMismatch"
                       for d in self.diagnostics)


@dataclass(frozen=True)
class VerificationSummary:
    """Outcome of the post-extraction checks."""

    equivalence_ok: bool
    counterexample: tuple | None
    identity_ok: bool
    sound: bool

    @property
    def passed(self) -> bool:
        return self.equivalence_ok and self.identity_ok and self.sound

    def to_dict(self) -> dict:
        return {
            "equivalence_ok": self.equivalence_ok,
            "counterexample": (None if self.counterexample is None
                               else list(self.counterexample)),
            "identity_ok": self.identity_ok,
            "sound": self.sound,
            "passed": self.passed,
        }


def _require_extractable(net: CascadeNet, alphabet: GroundedAlphabet):
    violations = rnc_dynamics.validate_rncp(net)
    if violations:
        raise NotRncPlus(
            f"extraction requires positive weights; offending neurons "
            f"{violations}", violations=violations)
    if alphabet.identity_letter is None:
        raise ValueError("extraction requires an identity letter")


def _digitize(net: CascadeNet, limit, cfg: ExtractionConfig, events):
    """Digits of a settled limit vector; ambiguity resolved by the closed
    pivot boundaries and recorded in events."""
    digits = []
    for i, neuron in enumerate(net.neurons):
        if neuron.weight > 1:
            piv = tanh_analysis.pivots(neuron.weight)
            digit = tanh_analysis.classify(limit[i], piv, cfg.digit_margin)
            if digit is tanh_analysis.AMBIGUOUS:
                events.append(Diagnostic("AmbiguousDigit", {
                    "coordinate": i,
                    "value": limit[i],
                    "pivots": [piv.p_minus, piv.p_plus],
                }))
                digit = tanh_analysis.classify(limit[i], piv, 0.0)
        else:
            digit = 2  # contractive: unique fixpoint, digit carries nothing
        digits.append(digit)
    return tuple(digits)


def _settled_digits(net, alphabet, x, cfg, events):
    limit, _ = rnc_dynamics.settle(net, alphabet, x,
                                   tol=cfg.settle_tol,
                                   max_iter=cfg.max_settle_iter)
    return _digitize(net, limit, cfg, events), limit


def eta(net: CascadeNet, alphabet: GroundedAlphabet, x,
        cfg: ExtractionConfig = ExtractionConfig(),
        diagnostics: list | None = None):
    """Digit tuple of a network state: settle under the identity letter,
    then classify each coordinate against its neuron's pivots."""
    _require_extractable(net, alphabet)
    events = [] if diagnostics is None else diagnostics
    digits, _ = _settled_digits(net, alphabet, x, cfg, events)
    return digits


def extract(net: CascadeNet, alphabet: GroundedAlphabet,
            cfg: ExtractionConfig = ExtractionConfig()) -> ExtractionReport:
    """Breadth-first digit-tuple exploration; see the module docstring.

    Deterministic: tuples are discovered in BFS order with letters taken
    in alphabet order, and representatives are first-wins.
    """
    _require_extractable(net, alphabet)
    diagnostics = []
    n = net.n_neurons
    letters = tuple(alphabet.letters)

    x0 = tuple(net.initial_state)
    d0, limit0 = _settled_digits(net, alphabet, x0, cfg, diagnostics)
    reps = {d0: (x0, limit0)}
    order = [d0]
    flat_delta = {}
    level_delta = [dict() for _ in range(n)]

    head = 0
    while head < len(order):
        d = order[head]
        head += 1
        x, _ = reps[d]
        for letter in letters:
            x2 = rnc_dynamics.step(net, x, alphabet.representative(letter))
            d2, limit2 = _settled_digits(net, alphabet, x2, cfg, diagnostics)
            flat_delta[(d, letter)] = d2
            for i in range(n):
                key = (d[i], (letter,) + d[:i])
                previous = level_delta[i].get(key)
                if previous is None:
                    level_delta[i][key] = d2[i]
                elif previous != d2[i]:
                    diagnostics.append(Diagnostic("RepresentativeMismatch", {
                        "level": i,
                        "state": d[i],
                        "letter": _letter_key(key[1]),
                        "recorded": previous,
                        "conflicting": d2[i],
                    }))
            if d2 not in reps:
                reps[d2] = (x2, limit2)
                order.append(d2)
            else:
                _, stored_limit = reps[d2]
                drift = max(abs(a - b)
                            for a, b in zip(stored_limit, limit2))
                if drift > cfg.rep_consistency_tol:
                    diagnostics.append(Diagnostic("RepresentativeMismatch", {
                        "tuple": list(d2),
                        "drift": drift,
                        "stored": list(stored_limit),
                        "observed": list(limit2),
                    }))

    cascade = _build_cascade(letters, order, level_delta, n, diagnostics)
    flat = _build_flat(net, alphabet, letters, order, flat_delta, reps,
                       diagnostics)
    return ExtractionReport(
        cascade=cascade,
        flat=flat,
        representatives=reps,
        diagnostics=diagnostics,
        state_count=len(order),
        config=cfg,
    )


def _letter_key(level_letter) -> list:
    return [level_letter[0]] + list(level_letter[1:])


def _build_cascade(letters, order, level_delta, n, diagnostics):
    """Per-level three-state semiautomata from the recorded transitions.

    Level i's states are the digits occurring at position i among reached
    tuples; its alphabet is the full product with the preceding levels'
    state sets, and unexercised entries become flagged self-loops.
    """
    levels = []
    for i in range(n):
        states = tuple(sorted({d[i] for d in order}))
        state_index = {digit: k for k, digit in enumerate(states)}
        alphabet_i = automata_core.level_alphabet(letters, tuple(levels))
        delta = []
        for digit in states:
            row = []
            for letter in alphabet_i:
                target = level_delta[i].get((digit, letter))
                if target is None:
                    target = digit  # unconstrained: complete as a self-loop
                    diagnostics.append(Diagnostic("DummyTransitionUsed", {
                        "level": i,
                        "state": digit,
                        "letter": _letter_key(letter),
                    }))
                row.append(state_index[target])
            delta.append(tuple(row))
        levels.append(Semiautomaton(alphabet=alphabet_i,
                                    n_states=len(states),
                                    delta=tuple(delta),
                                    state_labels=states))
    return SemiCascade(base_alphabet=letters, levels=tuple(levels))


def _build_flat(net, alphabet, letters, order, flat_delta, reps,
                diagnostics):
    """Automaton over the reached digit tuples, in discovery order.

    State outputs are read at the settled limit of each representative:
    appending identity letters cannot change the implemented function, so
    the limit's output is the stable label.  A representative whose raw
    output disagrees is flagged.
    """
    index = {d: k for k, d in enumerate(order)}
    delta = tuple(
        tuple(index[flat_delta[(d, letter)]] for letter in letters)
        for d in order
    )
    outputs = []
    for d in order:
        raw, limit = reps[d]
        settled_letter = alphabet.ground_output(net.output_fn(limit))
        raw_letter = alphabet.ground_output(net.output_fn(raw))
        if raw_letter != settled_letter:
            diagnostics.append(Diagnostic("RawOutputMismatch", {
                "tuple": list(d),
                "raw_output": raw_letter,
                "settled_output": settled_letter,
            }))
        outputs.append(settled_letter)
    semi = Semiautomaton(alphabet=letters, n_states=len(order),
                         delta=delta, state_labels=tuple(order))
    return Automaton(semi, initial=0, outputs=tuple(outputs))


def verify_extraction(net: CascadeNet, alphabet: GroundedAlphabet,
                      report: ExtractionReport,
                      max_len: int = 10, trials: int = 0,
                      seed: int = 0, jobs: int = 1) -> VerificationSummary:
    """Post-extraction checks: behavioral equivalence of net and flat
    automaton (bounded exhaustive plus random words) and the identity
    letter acting as an identity transformation of the minimized result."""
    counterexample = automata_core.net_equivalent(
        net, alphabet, report.flat,
        max_len=max_len, random_trials=trials, seed=seed, jobs=jobs)
    identity_ok = True
    if alphabet.identity_letter is not None:
        minimized = automata_core.minimize(report.flat)
        identity_ok = automata_core.is_identity_transformation(
            minimized.semi, alphabet.identity_letter)
    return VerificationSummary(
        equivalence_ok=counterexample is None,
        counterexample=counterexample,
        identity_ok=identity_ok,
        sound=report.sound,
    )


# --- JSON ------------------------------------------------------------------

def _tuple_key(digits) -> str:
    return "".join(str(d) for d in digits)


def report_to_dict(report: ExtractionReport) -> dict:
    cascade = report.cascade
    return {
        "config": report.config.to_dict(),
        "state_count": report.state_count,
        "cascade": {
            "base_alphabet": list(cascade.base_alphabet),
            "levels": [
                {
                    "states": list(level.state_labels),
                    "alphabet": [_letter_key(letter)
                                 for letter in level.alphabet],
                    "delta": [[level.state_labels[t] for t in row]
                              for row in level.delta],
                }
                for level in cascade.levels
            ],
        },
        "flat": automata_core.automaton_to_dict(report.flat),
        "tuples": [list(d) for d in report.representatives],
        "representatives": {
            _tuple_key(d): {"state": list(raw), "settled": list(limit)}
            for d, (raw, limit) in report.representatives.items()
        },
        "diagnostics": [d.to_dict() for d in report.diagnostics],
    }


def report_to_json(report: ExtractionReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2)


def report_from_dict(data: dict) -> ExtractionReport:
    cascade_data = data["cascade"]
    base = tuple(cascade_data["base_alphabet"])
    levels = []
    for level in cascade_data["levels"]:
        states = tuple(level["states"])
        index = {digit: k for k, digit in enumerate(states)}
        levels.append(Semiautomaton(
            alphabet=tuple(tuple(entry) for entry in level["alphabet"]),
            n_states=len(states),
            delta=tuple(tuple(index[t] for t in row)
                        for row in level["delta"]),
            state_labels=states,
        ))
    order = [tuple(t) for t in data["tuples"]]
    flat_data = data["flat"]
    flat_semi = Semiautomaton(
        alphabet=tuple(flat_data["alphabet"]),
        n_states=int(flat_data["states"]),
        delta=tuple(tuple(row) for row in flat_data["delta"]),
        state_labels=tuple(order),
    )
    flat = Automaton(flat_semi, int(flat_data["initial"]),
                     tuple(flat_data["outputs"]))
    reps_data = data["representatives"]
    representatives = {
        d: (tuple(reps_data[_tuple_key(d)]["state"]),
            tuple(reps_data[_tuple_key(d)]["settled"]))
        for d in order
    }
    return ExtractionReport(
        cascade=SemiCascade(base_alphabet=base, levels=tuple(levels)),
        flat=flat,
        representatives=representatives,
        diagnostics=[Diagnostic(d["kind"], d["detail"])
                     for d in data["diagnostics"]],
        state_count=len(order),
        config=ExtractionConfig(**data["config"]),
    )


def report_from_json(text: str) -> ExtractionReport:
    return report_from_dict(json.loads(text))
