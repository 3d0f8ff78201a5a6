"""Reference automata, hand-built nets, and independent membership oracles.

Letters over proposition alphabets are written like ``{}``, ``{p}``,
``{p,q}``; a letter "contains" a proposition when it appears between the
braces.  Acceptors output ``"1"``/``"0"``.

Net fixtures are built from saturating tanh latches: one neuron per
level with weight w and a per-letter drive of roughly +b (force the high
fixpoint), -b (force the low one), or 0 (hold the current side).  Levels
may gate their drive on the sign of an earlier latch through an affine
term, which is how temporal ordering ("p and later q") is encoded.

The brute_* oracles compute reference outputs directly (scans and
arithmetic, no transition tables) and exist to cross-check the automata.
A few of them describe functions that are deliberately *not* regular
(unbounded counters and products); those have no automaton counterpart
and document what extraction can never produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .automata_core import Automaton, Semiautomaton
from .errors import OutOfBounds, UnknownFixture, WeakDrive
from .rnc_dynamics import CascadeNet, GroundedAlphabet, InputFunction, Neuron
from .tanh_analysis import pivots, settle_scalar

PROP_LETTERS_2 = ("{}", "{p}")
PROP_LETTERS_4 = ("{}", "{p}", "{q}", "{p,q}")
GRID_LETTERS = ("stayed", "left", "right", "up", "down")


def props(letter: str) -> frozenset:
    """Propositions named inside a brace letter like '{p,q}'."""
    inner = letter.strip()
    if not (inner.startswith("{") and inner.endswith("}")):
        raise ValueError(f"not a proposition letter: {letter!r}")
    inner = inner[1:-1].strip()
    return frozenset(p.strip() for p in inner.split(",") if p.strip())


# --- reference automata ------------------------------------------------------

def dfa_diamond_p(letters=PROP_LETTERS_2) -> Automaton:
    """Acceptor of 'p occurs somewhere', over any proposition alphabet."""
    delta = []
    for state in (0, 1):
        row = []
        for letter in letters:
            if state == 1 or "p" in props(letter):
                row.append(1)
            else:
                row.append(0)
        delta.append(tuple(row))
    semi = Semiautomaton(tuple(letters), 2, tuple(delta))
    return Automaton(semi, 0, ("0", "1"))


def dfa_p_since_q() -> Automaton:
    """Acceptor of 'p has always held since the latest q'.

    Three states: a start state that never recurs, the holding state, and
    the broken state.  Start and broken are behaviorally equivalent, so
    the canonical form has two states; keeping the redundant start state
    exercises minimization-sensitive callers (the letter {p} fixes the
    canonical states but not the raw ones).
    """
    def nxt(state, letter):
        ps = props(letter)
        if "q" in ps:
            return 1
        if state == 1 and "p" in ps:
            return 1
        return 2

    delta = tuple(
        tuple(nxt(state, letter) for letter in PROP_LETTERS_4)
        for state in (0, 1, 2)
    )
    semi = Semiautomaton(PROP_LETTERS_4, 3, delta)
    return Automaton(semi, 0, ("0", "1", "0"))


def dfa_p_then_q() -> Automaton:
    """Acceptor of 'p occurs and q occurs strictly later'."""
    def nxt(state, letter):
        ps = props(letter)
        if state == 0:
            return 1 if "p" in ps else 0
        if state == 1:
            return 2 if "q" in ps else 1
        return 2

    delta = tuple(
        tuple(nxt(state, letter) for letter in PROP_LETTERS_4)
        for state in (0, 1, 2)
    )
    return Automaton(Semiautomaton(PROP_LETTERS_4, 3, delta), 0,
                     ("0", "0", "1"))


def dfa_grid(n: int, m: int, start, goal) -> Automaton:
    """Navigation on an n-by-m grid with clamped moves; accept at the goal.

    Cells are 1-based pairs (x, y) with x in 1..n and y in 1..m; 'left'
    and 'right' move x, 'up' and 'down' move y, all clamped at the edges,
    and 'stayed' fixes every cell.
    """
    for name, (cx, cy) in (("start", start), ("goal", goal)):
        if not (1 <= cx <= n and 1 <= cy <= m):
            raise OutOfBounds(f"{name} cell {(cx, cy)} outside {n}x{m} grid")

    def move(cell, letter):
        x, y = cell
        if letter == "left":
            return (max(1, x - 1), y)
        if letter == "right":
            return (min(n, x + 1), y)
        if letter == "up":
            return (x, min(m, y + 1))
        if letter == "down":
            return (x, max(1, y - 1))
        return (x, y)

    cells = [(x, y) for x in range(1, n + 1) for y in range(1, m + 1)]
    index = {cell: i for i, cell in enumerate(cells)}
    delta = tuple(
        tuple(index[move(cell, letter)] for letter in GRID_LETTERS)
        for cell in cells
    )
    semi = Semiautomaton(GRID_LETTERS, len(cells), delta,
                         state_labels=tuple(cells))
    outputs = tuple("1" if cell == tuple(goal) else "0" for cell in cells)
    return Automaton(semi, index[tuple(start)], outputs)


def dfa_sum_mod_k(k: int) -> Automaton:
    """Cyclic counter: sum of digit letters modulo k, state value as output."""
    if k < 2:
        raise ValueError("modulus must be at least 2")
    letters = tuple(str(d) for d in range(k))
    delta = tuple(
        tuple((state + d) % k for d in range(k))
        for state in range(k)
    )
    semi = Semiautomaton(letters, k, delta)
    return Automaton(semi, 0, tuple(str(s) for s in range(k)))


def dfa_sum_bits_eq(target: int) -> Automaton:
    """Acceptor of bit strings whose ones sum to the target exactly.

    States count the ones seen so far, with one overflow sink; target + 2
    states in total.
    """
    if target < 0:
        raise ValueError("target must be non-negative")
    sink = target + 1
    delta = tuple((state, min(state + 1, sink))
                  for state in range(target + 2))
    semi = Semiautomaton(("0", "1"), target + 2, delta)
    outputs = tuple("1" if s == target else "0" for s in range(target + 2))
    return Automaton(semi, 0, outputs)


def dfa_product_truncated(cap: int = 12, max_digit: int = 3) -> Automaton:
    """Running product of digit letters, saturating above the cap.

    States are the exact products 0..cap plus a 'big' sink; multiplying
    the sink by zero still yields exactly zero.  The digit 1 fixes every
    state.
    """
    if cap < 1 or max_digit < 1:
        raise ValueError("cap and max_digit must be at least 1")
    letters = tuple(str(d) for d in range(max_digit + 1))

    def mul(value, d):
        if value == "big":
            return 0 if d == 0 else "big"
        prod = value * d
        return prod if prod <= cap else "big"

    # only values reachable as products of digits (keeps the fixture
    # connected; e.g. primes above max_digit never occur)
    values = [1]
    seen = {1}
    for v in values:
        for d in range(max_digit + 1):
            nxt = mul(v, d)
            if nxt not in seen:
                seen.add(nxt)
                values.append(nxt)
    index = {v: i for i, v in enumerate(values)}
    delta = tuple(
        tuple(index[mul(v, d)] for d in range(max_digit + 1))
        for v in values
    )
    semi = Semiautomaton(letters, len(values), delta,
                         state_labels=tuple(values))
    return Automaton(semi, index[1], tuple(str(v) for v in values))


# --- net fixtures -------------------------------------------------------------

def _check_drive(w: float, b: float):
    bound = math.atanh(pivots(w).p_plus) + w
    if not b > bound:
        raise WeakDrive(
            f"drive b={b} too weak for w={w}; needs b > {bound:.6f}")


def build_latch_net(w: float = 4.0, b: float = 8.0,
                    set_high: str = "{p}", set_low: str | None = None,
                    hold=("{}",)):
    """One saturating latch neuron with direct scalar grounding.

    The input representative itself is the drive: +b for the set-high
    letter, -b for the optional set-low letter, 0 for hold letters.  The
    first hold letter is the identity letter; the output thresholds the
    state at zero.
    """
    _check_drive(w, b)
    letters = [set_high] + ([set_low] if set_low is not None else []) \
        + list(hold)
    reps = {set_high: (b,)}
    if set_low is not None:
        reps[set_low] = (-b,)
    for letter in hold:
        reps[letter] = (0.0,)
    low = settle_scalar(w, 0.0, -1.0)
    net = CascadeNet(
        input_dim=1,
        neurons=(Neuron(w, InputFunction.affine((1.0,))),),
        initial_state=(low,),
        output_fn=InputFunction.affine((1.0,)),
    )
    alphabet = GroundedAlphabet(
        letters=tuple(letters),
        representatives=reps,
        identity_letter=hold[0],
        output_bands=((-math.inf, 0.0, "0"), (0.0, math.inf, "1")),
    )
    return net, alphabet


#: gated commands as (drive with gate high, drive with gate low) in units
#: of b; the letter coefficient is the first entry, the second follows
#: from the shared gate term (coefficient b/2, bias -b/2).
_GATED = {
    "high": (1.5, 0.5),
    "low": (-0.5, -1.5),
    "set_if_gate": (1.0, 0.0),
    "hold_if_gate": (0.0, -1.0),
}
_UNGATED = {"high": 1.0, "low": -1.0, "hold": 0.0}


def build_cascade_net(level_specs, letters, identity: str,
                      w: float = 4.0, b: float = 8.0):
    """Stack of latches, one per level spec, over one-hot grounded letters.

    Each spec is a dict with a ``commands`` table (letter -> command) and
    an optional 1-based ``gate`` pointing at an earlier level.  Ungated
    commands are high / low / hold.  Gated commands condition the drive
    on the gate latch's sign through an affine term (coefficient b/2 on
    the gate coordinate, bias -b/2):

        set_if_gate:  +b when the gate is high, hold otherwise
        hold_if_gate: hold when the gate is high, -b otherwise
        high, low:    saturate regardless of the gate

    The identity letter must act as hold (or hold_if_gate) on every
    level.  A level referenced as a gate should be monotone (commands
    high / hold only): if the gate can drop after the dependent level was
    set, hold_if_gate fires on the way down and the identity letter stops
    being an identity element of the implemented function.  The output
    thresholds the last latch at zero.
    """
    _check_drive(w, b)
    letters = tuple(letters)
    if identity not in letters:
        raise ValueError(f"identity letter {identity!r} not among letters")
    input_dim = len(letters)
    neurons = []
    for i, spec in enumerate(level_specs):
        commands = spec["commands"]
        gate = spec.get("gate")
        missing = [l for l in letters if l not in commands]
        if missing:
            raise ValueError(f"level {i + 1}: no command for {missing}")
        if gate is not None and not 1 <= gate <= i:
            raise ValueError(f"level {i + 1}: gate {gate} is not an earlier "
                             f"level")
        expected_hold = "hold" if gate is None else "hold_if_gate"
        if commands[identity] != expected_hold:
            raise ValueError(f"level {i + 1}: identity letter must be "
                             f"{expected_hold!r}")
        weights = [0.0] * (input_dim + i)
        bias = 0.0
        if gate is None:
            for k, letter in enumerate(letters):
                cmd = commands[letter]
                if cmd not in _UNGATED:
                    raise ValueError(
                        f"level {i + 1}: command {cmd!r} needs a gate")
                weights[k] = _UNGATED[cmd] * b
        else:
            bias = -b / 2.0
            weights[input_dim + gate - 1] = b / 2.0
            for k, letter in enumerate(letters):
                cmd = commands[letter]
                if cmd not in _GATED:
                    raise ValueError(f"level {i + 1}: command {cmd!r} not "
                                     f"usable on a gated level")
                # drive at gate-high is a_letter + b/2 - b/2 = a_letter
                weights[k] = _GATED[cmd][0] * b
        neurons.append(Neuron(w, InputFunction.affine(tuple(weights), bias)))

    reps = {}
    for k, letter in enumerate(letters):
        one_hot = [0.0] * input_dim
        one_hot[k] = 1.0
        reps[letter] = tuple(one_hot)

    # settle every latch low against the already-settled prefix
    u_e = reps[identity]
    initial = []
    for i, neuron in enumerate(neurons):
        v = neuron.beta(u_e + tuple(initial))
        initial.append(settle_scalar(neuron.weight, v, -1.0))

    n = len(neurons)
    out_weights = [0.0] * n
    out_weights[-1] = 1.0
    net = CascadeNet(
        input_dim=input_dim,
        neurons=tuple(neurons),
        initial_state=tuple(initial),
        output_fn=InputFunction.affine(tuple(out_weights)),
    )
    alphabet = GroundedAlphabet(
        letters=letters,
        representatives=reps,
        identity_letter=identity,
        output_bands=((-math.inf, 0.0, "0"), (0.0, math.inf, "1")),
    )
    return net, alphabet


def latch_net():
    """Default latch: sets on {p}, holds on {}; recognizes 'p occurs'."""
    return build_latch_net()


def p_then_q_net():
    """Two gated latches recognizing 'p occurs and q occurs strictly later'."""
    return build_cascade_net(
        [
            {"commands": {"{}": "hold", "{p}": "high",
                          "{q}": "hold", "{p,q}": "high"}},
            {"gate": 1,
             "commands": {"{}": "hold_if_gate", "{p}": "hold_if_gate",
                          "{q}": "set_if_gate", "{p,q}": "set_if_gate"}},
        ],
        letters=PROP_LETTERS_4,
        identity="{}",
    )


def p_since_q_net():
    """One latch recognizing 'p has always held since the latest q'."""
    return build_cascade_net(
        [
            {"commands": {"{}": "low", "{p}": "hold",
                          "{q}": "high", "{p,q}": "high"}},
        ],
        letters=PROP_LETTERS_4,
        identity="{p}",
    )


# --- brute-force oracles ------------------------------------------------------

def brute_diamond_p(word) -> str:
    return "1" if any("p" in props(l) for l in word) else "0"


def brute_p_since_q(word) -> str:
    """Backward scan: accept at the first q going backwards, reject at the
    first letter without p."""
    for letter in reversed(list(word)):
        ps = props(letter)
        if "q" in ps:
            return "1"
        if "p" not in ps:
            return "0"
    return "0"


def brute_p_then_q(word) -> str:
    word = list(word)
    for i, a in enumerate(word):
        if "p" in props(a):
            if any("q" in props(bl) for bl in word[i + 1:]):
                return "1"
    return "0"


def brute_grid(word, n, m, start, goal) -> str:
    x, y = start
    for letter in word:
        if letter == "left":
            x = max(1, x - 1)
        elif letter == "right":
            x = min(n, x + 1)
        elif letter == "up":
            y = min(m, y + 1)
        elif letter == "down":
            y = max(1, y - 1)
        elif letter != "stayed":
            raise ValueError(f"unknown move {letter!r}")
    return "1" if (x, y) == tuple(goal) else "0"


def brute_grid_unbounded(word, start=(0, 0), goal=(1, 1)) -> str:
    """Unclamped grid walk; the induced language is not regular."""
    x, y = start
    moves = {"left": (-1, 0), "right": (1, 0), "up": (0, 1), "down": (0, -1),
             "stayed": (0, 0)}
    for letter in word:
        dx, dy = moves[letter]
        x, y = x + dx, y + dy
    return "1" if (x, y) == tuple(goal) else "0"


def brute_sum_mod_k(word, k) -> str:
    return str(sum(int(l) for l in word) % k)


def brute_sum_bits_eq(word, target) -> str:
    return "1" if sum(int(l) for l in word) == target else "0"


def brute_product_truncated(word, cap) -> str:
    prod = 1
    for letter in word:
        prod *= int(letter)
    return str(prod) if prod <= cap else "big"


def brute_sum_integers(word) -> str:
    """Exact running sum of integer letters; not regular (identity '0')."""
    return str(sum(int(l) for l in word))


def brute_product_naturals(word) -> str:
    """Exact running product of natural letters; not regular (identity '1')."""
    prod = 1
    for letter in word:
        prod *= int(letter)
    return str(prod)


def brute_sign_sum_increments(word) -> str:
    """Sign of the sum of -1/0/+1 letters; not regular (identity '0')."""
    total = sum(int(l) for l in word)
    return "0" if total == 0 else ("+" if total > 0 else "-")


# --- catalog ------------------------------------------------------------------

@dataclass(frozen=True)
class FixtureEntry:
    name: str
    kind: str          # "automaton" | "net" | "oracle"
    build: object      # callable; automata/net constructors or word oracle
    description: str


def _entries():
    return [
        FixtureEntry("diamond_p", "automaton", dfa_diamond_p,
                     "2-state acceptor of 'p occurs', letters {} and {p}"),
        FixtureEntry("diamond_p_4", "automaton",
                     lambda: dfa_diamond_p(PROP_LETTERS_4),
                     "'p occurs' lifted to the 4-letter alphabet"),
        FixtureEntry("p_since_q", "automaton", dfa_p_since_q,
                     "3-state acceptor of 'p always since the latest q'"),
        FixtureEntry("p_then_q", "automaton", dfa_p_then_q,
                     "3-state acceptor of 'p and strictly later q'"),
        FixtureEntry("grid_3x3", "automaton",
                     lambda: dfa_grid(3, 3, (1, 1), (3, 3)),
                     "3x3 clamped grid walk from (1,1), accept at (3,3)"),
        FixtureEntry("sum_mod_2", "automaton", lambda: dfa_sum_mod_k(2),
                     "sum of digits modulo 2"),
        FixtureEntry("sum_mod_3", "automaton", lambda: dfa_sum_mod_k(3),
                     "sum of digits modulo 3"),
        FixtureEntry("sum_mod_7", "automaton", lambda: dfa_sum_mod_k(7),
                     "sum of digits modulo 7"),
        FixtureEntry("sum_bits_eq_16", "automaton",
                     lambda: dfa_sum_bits_eq(16),
                     "bit strings whose ones sum to exactly 16"),
        FixtureEntry("product_upto_12", "automaton",
                     lambda: dfa_product_truncated(12, 3),
                     "running digit product, saturating above 12"),
        FixtureEntry("latch_net", "net", latch_net,
                     "single latch recognizing 'p occurs'"),
        FixtureEntry("p_then_q_net", "net", p_then_q_net,
                     "two gated latches for 'p and strictly later q'"),
        FixtureEntry("p_since_q_net", "net", p_since_q_net,
                     "single latch for 'p always since the latest q'"),
        FixtureEntry("sum_integers", "oracle", brute_sum_integers,
                     "exact integer sum; not regular, oracle only"),
        FixtureEntry("product_naturals", "oracle", brute_product_naturals,
                     "exact natural product; not regular, oracle only"),
        FixtureEntry("sign_sum_increments", "oracle",
                     brute_sign_sum_increments,
                     "sign of a -1/0/+1 sum; not regular, oracle only"),
        FixtureEntry("grid_unbounded", "oracle", brute_grid_unbounded,
                     "unclamped grid walk; not regular, oracle only"),
    ]


def catalog() -> dict:
    """All registered fixtures by name, in declaration order."""
    return {entry.name: entry for entry in _entries()}


_ORACLES = {
    "diamond_p": brute_diamond_p,
    "diamond_p_4": brute_diamond_p,
    "p_since_q": brute_p_since_q,
    "p_then_q": brute_p_then_q,
    "grid_3x3": lambda word: brute_grid(word, 3, 3, (1, 1), (3, 3)),
    "sum_mod_2": lambda word: brute_sum_mod_k(word, 2),
    "sum_mod_3": lambda word: brute_sum_mod_k(word, 3),
    "sum_mod_7": lambda word: brute_sum_mod_k(word, 7),
    "sum_bits_eq_16": lambda word: brute_sum_bits_eq(word, 16),
    "product_upto_12": lambda word: brute_product_truncated(word, 12),
    "latch_net": brute_diamond_p,
    "p_then_q_net": brute_p_then_q,
    "p_since_q_net": brute_p_since_q,
    "sum_integers": brute_sum_integers,
    "product_naturals": brute_product_naturals,
    "sign_sum_increments": brute_sign_sum_increments,
    "grid_unbounded": brute_grid_unbounded,
}


def brute_membership(name: str, word) -> str:
    """Reference output for a named fixture, computed without automata."""
    try:
        oracle = _ORACLES[name]
    except KeyError:
        raise UnknownFixture(f"no oracle named {name!r}") from None
    return oracle(word)
