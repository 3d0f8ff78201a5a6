"""Finite semiautomata and automata: composition, canonical forms, checks.

States are dense integers 0..n-1.  Letters are arbitrary hashable values;
flat automata use strings while cascade levels use tuples
(sigma, label_1, ..., label_{i-1}) built from the base letter and the
labels of the preceding levels' current states.

The module provides the algebra needed to validate extracted cascades:
flattening a cascade into a product semiautomaton, reachability and
minimization (canonical form), identity-transformation and
identity-element detection, aperiodicity via the transition monoid, and
behavioral equivalence both between automata (exact, product BFS) and
between a grounded network and an automaton (bounded exhaustive sweep
plus random sampling).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from . import rnc_dynamics
from .errors import AlphabetMismatch, CapExceeded, UnknownLetter


@dataclass(frozen=True)
class Semiautomaton:
    """Total transition structure: alphabet, dense states, delta table.

    ``delta[q][k]`` is the successor of state q under the k-th alphabet
    letter.  ``state_labels`` optionally names states for presentation
    (digit values, product tuples); it never affects behavior.
    """

    alphabet: tuple
    n_states: int
    delta: tuple
    state_labels: tuple | None = None

    def __post_init__(self):
        if len(self.delta) != self.n_states:
            raise ValueError("delta must have one row per state")
        for row in self.delta:
            if len(row) != len(self.alphabet):
                raise ValueError("delta row width must match alphabet size")
            for q in row:
                if not 0 <= q < self.n_states:
                    raise ValueError(f"transition target {q} out of range")
        if self.state_labels is not None \
                and len(self.state_labels) != self.n_states:
            raise ValueError("state_labels must have one entry per state")

    def letter_index(self, letter) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise UnknownLetter(f"unknown letter {letter!r}") from None

    def step(self, q: int, letter) -> int:
        return self.delta[q][self.letter_index(letter)]

    def transformation(self, letter) -> tuple:
        """The state map induced by one letter, as a tuple state -> state."""
        k = self.letter_index(letter)
        return tuple(row[k] for row in self.delta)


@dataclass(frozen=True)
class Automaton:
    """Semiautomaton plus initial state and Moore output labeling."""

    semi: Semiautomaton
    initial: int
    outputs: tuple

    def __post_init__(self):
        if not 0 <= self.initial < self.semi.n_states:
            raise ValueError("initial state out of range")
        if len(self.outputs) != self.semi.n_states:
            raise ValueError("outputs must label every state")

    @property
    def alphabet(self) -> tuple:
        return self.semi.alphabet

    @property
    def n_states(self) -> int:
        return self.semi.n_states

    def run(self, word):
        """Output letter after reading the word (initial output for '')."""
        q = self.initial
        for letter in word:
            q = self.semi.step(q, letter)
        return self.outputs[q]


@dataclass(frozen=True)
class SemiCascade:
    """Layered semiautomata; level i reads (sigma, labels of levels < i)."""

    base_alphabet: tuple
    levels: tuple

    def __post_init__(self):
        for i, level in enumerate(self.levels):
            expected = level_alphabet(self.base_alphabet, self.levels[:i])
            if level.alphabet != expected:
                raise ValueError(f"level {i} alphabet is not the expected "
                                 f"product alphabet")


def level_alphabet(base_alphabet, prior_levels) -> tuple:
    """Canonical alphabet of a level: product of base letters and the
    labels of all prior levels, base letter varying slowest."""
    label_sets = [lvl.state_labels if lvl.state_labels is not None
                  else tuple(range(lvl.n_states)) for lvl in prior_levels]
    return tuple(itertools.product(base_alphabet, *label_sets))


@dataclass(frozen=True)
class TransitionMonoid:
    """Closure of a semiautomaton's letter transformations.

    ``elements`` are in breadth-first discovery order starting from the
    identity; ``words`` maps each element to a shortest witnessing word.
    """

    n_states: int
    generators: dict
    elements: tuple
    words: dict

    def __contains__(self, transf):
        return transf in self.words


def flatten(cascade: SemiCascade) -> Semiautomaton:
    """Product semiautomaton of a cascade over the base alphabet.

    Product states enumerate the levels' state tuples with the last level
    varying fastest.  Each level's input letter is assembled from the
    pre-transition labels of the preceding levels.
    """
    levels = cascade.levels
    labels = [lvl.state_labels if lvl.state_labels is not None
              else tuple(range(lvl.n_states)) for lvl in levels]
    combos = list(itertools.product(*(range(lvl.n_states) for lvl in levels)))
    index = {combo: i for i, combo in enumerate(combos)}
    letter_cols = [
        {letter: k for k, letter in enumerate(lvl.alphabet)} for lvl in levels
    ]
    delta = []
    for combo in combos:
        row = []
        for sigma in cascade.base_alphabet:
            nxt = []
            for i, lvl in enumerate(levels):
                letter = (sigma,) + tuple(labels[j][combo[j]]
                                          for j in range(i))
                nxt.append(lvl.delta[combo[i]][letter_cols[i][letter]])
            row.append(index[tuple(nxt)])
        delta.append(tuple(row))
    state_labels = tuple(
        tuple(labels[i][combo[i]] for i in range(len(levels)))
        for combo in combos
    )
    return Semiautomaton(alphabet=cascade.base_alphabet,
                         n_states=len(combos),
                         delta=tuple(delta),
                         state_labels=state_labels)


def reachable(a: Automaton) -> Automaton:
    """Restriction to the states reachable from the initial state.

    States are renumbered in BFS discovery order (letters in alphabet
    order), which makes the result canonical for a given input.
    """
    order = [a.initial]
    seen = {a.initial}
    for q in order:
        for k in range(len(a.alphabet)):
            nxt = a.semi.delta[q][k]
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
    renum = {old: new for new, old in enumerate(order)}
    delta = tuple(
        tuple(renum[a.semi.delta[old][k]] for k in range(len(a.alphabet)))
        for old in order
    )
    labels = None
    if a.semi.state_labels is not None:
        labels = tuple(a.semi.state_labels[old] for old in order)
    semi = Semiautomaton(a.alphabet, len(order), delta, labels)
    return Automaton(semi, 0, tuple(a.outputs[old] for old in order))


def minimize(a: Automaton) -> Automaton:
    """Canonical form: reachable states, Moore partition refinement, BFS
    renumbering.  Equivalent to the input on every word."""
    a = reachable(a)
    n = a.n_states
    n_letters = len(a.alphabet)

    block = {}
    assignment = []
    for q in range(n):
        key = a.outputs[q]
        if key not in block:
            block[key] = len(block)
        assignment.append(block[key])

    while True:
        signatures = {}
        refined = []
        for q in range(n):
            sig = (assignment[q],
                   tuple(assignment[a.semi.delta[q][k]]
                         for k in range(n_letters)))
            if sig not in signatures:
                signatures[sig] = len(signatures)
            refined.append(signatures[sig])
        if refined == assignment:
            break
        assignment = refined

    # quotient, then renumber blocks in BFS order from the initial block
    n_blocks = len(set(assignment))
    rep = {}
    for q in range(n):
        rep.setdefault(assignment[q], q)
    raw_delta = [
        tuple(assignment[a.semi.delta[rep[b]][k]] for k in range(n_letters))
        for b in range(n_blocks)
    ]
    order = [assignment[a.initial]]
    seen = set(order)
    for b in order:
        for k in range(n_letters):
            nxt = raw_delta[b][k]
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
    renum = {old: new for new, old in enumerate(order)}
    delta = tuple(
        tuple(renum[raw_delta[old][k]] for k in range(n_letters))
        for old in order
    )
    outputs = tuple(a.outputs[rep[old]] for old in order)
    return Automaton(Semiautomaton(a.alphabet, len(order), delta), 0, outputs)


def is_identity_transformation(semi: Semiautomaton, letter) -> bool:
    """True iff the letter fixes every state."""
    k = semi.letter_index(letter)
    return all(semi.delta[q][k] == q for q in range(semi.n_states))


def identity_letters(a: Automaton) -> set:
    """Letters that are identity elements of the implemented function.

    Decided on the canonical (minimized) automaton, where a letter is an
    identity element exactly when its transformation fixes every state;
    redundant or unreachable states would otherwise mask identities.
    """
    m = minimize(a)
    return {letter for letter in m.alphabet
            if is_identity_transformation(m.semi, letter)}


def transition_monoid(semi: Semiautomaton, cap: int = 10**6) -> TransitionMonoid:
    """Closure of the letter transformations under composition.

    Breadth-first over words, so each element is recorded with a shortest
    witnessing word.  Raises CapExceeded once more than ``cap`` elements
    are discovered.
    """
    identity = tuple(range(semi.n_states))
    generators = {letter: semi.transformation(letter)
                  for letter in semi.alphabet}
    words = {identity: ()}
    elements = [identity]
    frontier = [identity]
    while frontier:
        nxt_frontier = []
        for t in frontier:
            for letter in semi.alphabet:
                gen = generators[letter]
                composed = tuple(gen[t[q]] for q in range(semi.n_states))
                if composed not in words:
                    words[composed] = words[t] + (letter,)
                    elements.append(composed)
                    if len(elements) > cap:
                        raise CapExceeded(
                            f"monoid closure exceeded cap of {cap} elements")
                    nxt_frontier.append(composed)
        frontier = nxt_frontier
    return TransitionMonoid(n_states=semi.n_states,
                            generators=generators,
                            elements=tuple(elements),
                            words=words)


def _compose(f: tuple, g: tuple) -> tuple:
    """Apply f after g (word of g followed by word of f)."""
    return tuple(f[q] for q in g)


def periodic_witness(monoid: TransitionMonoid):
    """First monoid element with no idempotent power within n steps.

    Returns (element, word) or None.  An element t is aperiodic iff
    t^k = t^(k+1) for some k <= n: powers of t reach their eventual image
    within n compositions, and stability there means t acts as the
    identity on it.
    """
    n = monoid.n_states
    for t in monoid.elements:
        power = t
        ok = False
        for _ in range(n):
            nxt = _compose(t, power)
            if nxt == power:
                ok = True
                break
            power = nxt
        if not ok:
            return t, monoid.words[t]
    return None


def is_aperiodic(a: Automaton, cap: int = 10**6) -> bool:
    """Whether the implemented function is aperiodic (counter-free).

    Decided on the transition monoid of the canonical automaton: the
    function is aperiodic iff no element of that monoid contains a
    nontrivial cycle.
    """
    m = minimize(a)
    return periodic_witness(transition_monoid(m.semi, cap)) is None


def equivalent(a: Automaton, b: Automaton):
    """Exact behavioral comparison of two automata over one alphabet.

    Product BFS over reachable state pairs; complete for finite automata.
    Returns None when equivalent, else a shortest counterexample word
    (ties broken by the letter order of a's alphabet).
    """
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch("automata have different input alphabets")
    b_cols = [b.semi.letter_index(letter) for letter in a.alphabet]
    start = (a.initial, b.initial)
    parents = {start: None}
    queue = [start]
    head = 0
    while head < len(queue):
        pair = queue[head]
        head += 1
        qa, qb = pair
        if a.outputs[qa] != b.outputs[qb]:
            word = []
            cur = pair
            while parents[cur] is not None:
                cur, letter = parents[cur]
                word.append(letter)
            return tuple(reversed(word))
        for k, letter in enumerate(a.alphabet):
            nxt = (a.semi.delta[qa][k], b.semi.delta[qb][b_cols[k]])
            if nxt not in parents:
                parents[nxt] = (pair, letter)
                queue.append(nxt)
    return None


_MEMO_CAP = 1 << 20


def _net_words_sweep(stepper_by_letter, net_output, automaton, letters,
                     x0, max_len, initial_q=None):
    """Exhaustively compare all words of length <= max_len.

    Depth-first in letter order, comparing at every prefix.  Returns the
    best (shortest, then lexicographically least in letter order)
    counterexample or None.

    Subtrees proven mismatch-free are memoized on the exact
    (state, automaton state, remaining depth) triple; saturating nets
    revisit identical float states constantly, which collapses the sweep.
    Mismatching or pruned subtrees are never memoized, so the minimal
    witness stays exact.
    """
    semi = automaton.semi
    outputs = automaton.outputs
    steppers = [stepper_by_letter[letter] for letter in letters]
    cols = [semi.letter_index(letter) for letter in letters]
    best = None
    memo = set()

    def rank(word):
        return tuple(letters.index(l) for l in word)

    def visit(x, q, remaining, prefix):
        """True iff every strict extension of prefix within the budget
        matches (and was fully explored)."""
        nonlocal best
        if remaining == 0:
            return True
        if best is not None and len(best) <= len(prefix):
            return False  # pruned, not fully explored; do not memoize
        key = (x, q, remaining)
        if key in memo:
            return True
        clean = True
        for k in range(len(letters)):
            x2 = steppers[k](x)
            q2 = semi.delta[q][cols[k]]
            prefix.append(letters[k])
            if net_output(x2) != outputs[q2]:
                cand = tuple(prefix)
                if best is None \
                        or (len(cand), rank(cand)) < (len(best), rank(best)):
                    best = cand
                clean = False
            if not visit(x2, q2, remaining - 1, prefix):
                clean = False
            prefix.pop()
        if clean and len(memo) < _MEMO_CAP:
            memo.add(key)
        return clean

    start_q = automaton.initial if initial_q is None else initial_q
    visit(x0, start_q, max_len, [])
    return best


def _random_words(letters, max_len, random_trials, seed):
    rng = random.Random(seed)
    return [
        tuple(rng.choice(letters)
              for _ in range(rng.randint(1, 8 * max_len)))
        for _ in range(random_trials)
    ]


def _check_random_word(steppers, net_output, a, cols, x0, word):
    """Prefix of the first mismatching position, or None."""
    x, q = x0, a.initial
    for pos, letter in enumerate(word, start=1):
        x = steppers[letter](x)
        q = a.semi.delta[q][cols[letter]]
        if net_output(x) != a.outputs[q]:
            return tuple(word[:pos])
    return None


def _equiv_exhaustive_task(args):
    net, alphabet, a, first_letter, max_len = args
    steppers = rnc_dynamics.compile_letter_steppers(net, alphabet)
    net_output = rnc_dynamics.compile_output(net, alphabet)
    letters = tuple(alphabet.letters)
    x1 = steppers[first_letter](tuple(net.initial_state))
    q1 = a.semi.step(a.initial, first_letter)
    if net_output(x1) != a.outputs[q1]:
        return (first_letter,)
    tail = _net_words_sweep(steppers, net_output, a, letters, x1,
                            max_len - 1, initial_q=q1)
    return None if tail is None else (first_letter,) + tail


def _equiv_random_task(args):
    net, alphabet, a, indexed_words = args
    steppers = rnc_dynamics.compile_letter_steppers(net, alphabet)
    net_output = rnc_dynamics.compile_output(net, alphabet)
    cols = {letter: a.semi.letter_index(letter)
            for letter in alphabet.letters}
    x0 = tuple(net.initial_state)
    for idx, word in indexed_words:
        witness = _check_random_word(steppers, net_output, a, cols, x0, word)
        if witness is not None:
            return idx, witness
    return None


def net_equivalent(net, alphabet, a: Automaton,
                   max_len: int = 10, random_trials: int = 0,
                   seed: int = 0, jobs: int = 1):
    """Empirical comparison of a grounded net against an automaton.

    Phase 1 compares outputs on every word of length <= max_len (including
    the empty word); phase 2 on ``random_trials`` random words of length
    up to 8 * max_len.  Returns None if no mismatch was found (an
    empirical verdict, not a proof), else a counterexample word.

    With jobs > 1 the sweep is partitioned across processes (phase 1 by
    first letter, phase 2 by trial chunks) and merged deterministically,
    so the result is identical to the single-process one.
    """
    if set(alphabet.letters) != set(a.alphabet):
        raise AlphabetMismatch("net alphabet differs from automaton alphabet")
    letters = tuple(alphabet.letters)
    steppers = rnc_dynamics.compile_letter_steppers(net, alphabet)
    net_output = rnc_dynamics.compile_output(net, alphabet)
    x0 = tuple(net.initial_state)

    if net_output(x0) != a.outputs[a.initial]:
        return ()

    if jobs <= 1:
        witness = _net_words_sweep(steppers, net_output, a, letters, x0,
                                   max_len)
        if witness is not None:
            return witness
        cols = {letter: a.semi.letter_index(letter) for letter in letters}
        for word in _random_words(letters, max_len, random_trials, seed):
            witness = _check_random_word(steppers, net_output, a, cols,
                                         x0, word)
            if witness is not None:
                return witness
        return None

    import multiprocessing

    def rank(word):
        return (len(word), tuple(letters.index(l) for l in word))

    with multiprocessing.Pool(processes=jobs) as pool:
        tasks = [(net, alphabet, a, letter, max_len) for letter in letters]
        found = [w for w in pool.map(_equiv_exhaustive_task, tasks)
                 if w is not None]
        if found:
            return min(found, key=rank)
        words = list(enumerate(
            _random_words(letters, max_len, random_trials, seed)))
        chunk = max(1, (len(words) + jobs - 1) // jobs)
        tasks = [(net, alphabet, a, words[i:i + chunk])
                 for i in range(0, len(words), chunk)]
        hits = [h for h in pool.map(_equiv_random_task, tasks)
                if h is not None]
        if hits:
            return min(hits)[1]
    return None


# --- JSON and DOT ----------------------------------------------------------

def automaton_to_dict(a: Automaton) -> dict:
    return {
        "alphabet": list(a.alphabet),
        "states": a.n_states,
        "delta": [list(row) for row in a.semi.delta],
        "initial": a.initial,
        "outputs": list(a.outputs),
    }


def automaton_from_dict(data: dict) -> Automaton:
    semi = Semiautomaton(
        alphabet=tuple(data["alphabet"]),
        n_states=int(data["states"]),
        delta=tuple(tuple(row) for row in data["delta"]),
    )
    return Automaton(semi, int(data["initial"]), tuple(data["outputs"]))


def _dot_escape(text: str) -> str:
    return str(text).replace("\\", "\\\\").replace('"', '\\"')


def automaton_to_dot(a: Automaton, name: str = "automaton") -> str:
    """Graphviz rendering with deterministic node and edge order."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];",
             "  __start [shape=point];"]
    for q in range(a.n_states):
        lines.append(f'  q{q} [label="q{q}/{_dot_escape(a.outputs[q])}"];')
    lines.append(f"  __start -> q{a.initial};")
    for q in range(a.n_states):
        for k, letter in enumerate(a.alphabet):
            lines.append(
                f'  q{q} -> q{a.semi.delta[q][k]} '
                f'[label="{_dot_escape(letter)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
