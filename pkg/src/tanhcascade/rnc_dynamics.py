"""Recurrent tanh cascades under grounded symbolic inputs.

A cascade is an ordered list of recurrent tanh neurons where neuron i sees
the external input vector together with the previous state of neurons
1..i-1 (never of later neurons).  One synchronous update is

    x_i' = tanh(w_i * x_i + beta_i(u, x_1, ..., x_{i-1}))

with every beta_i evaluated on the pre-update state.  A cascade whose
recurrent weights are all strictly positive is an RNC+; only those admit
the digit extraction in :mod:`tanhcascade.extraction`.

Symbols enter through a grounded alphabet: each letter has one
representative input vector, outputs are mapped to output letters through
disjoint threshold bands, and one letter may be designated as the identity
letter.  Repeating the identity letter forever drives the state to a
settled limit: coordinate 1 converges because its offset is constant, and
each later coordinate converges once its prefix has, landing on a
fixpoint of its update map taken at the prefix's limit.  The limit is
computed by iterating the full step map and then refining coordinates
bottom-up against their settled prefixes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    NoConvergence,
    UngroundedOutput,
    UnknownLetter,
)
from .tanh_analysis import DEFAULT_MAX_ITER, DEFAULT_TOL, _newton_polish


@dataclass(frozen=True)
class AffineLayer:
    """One affine map y = W x + b with W given row-wise."""

    weights: tuple  # tuple of rows, each a tuple of floats
    bias: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.bias):
            raise DimensionMismatch("rows of W and entries of b differ")
        if len(self.weights) == 0:
            raise DimensionMismatch("layer must have at least one output")
        widths = {len(row) for row in self.weights}
        if len(widths) != 1:
            raise DimensionMismatch("ragged weight matrix")

    @property
    def in_dim(self) -> int:
        return len(self.weights[0])

    @property
    def out_dim(self) -> int:
        return len(self.weights)

    def apply(self, vec):
        return [
            b + sum(wj * xj for wj, xj in zip(row, vec))
            for row, b in zip(self.weights, self.bias)
        ]


@dataclass(frozen=True)
class InputFunction:
    """Evaluable scalar function of a real vector.

    kind "affine": a single affine layer with one output row.
    kind "layered": affine layers with tanh applied after every layer
    except the last; the last layer has one output row.
    """

    kind: str
    layers: tuple

    def __post_init__(self):
        if self.kind not in ("affine", "layered"):
            raise ValueError(f"unknown input-function kind {self.kind!r}")
        if not self.layers:
            raise DimensionMismatch("input function needs at least one layer")
        if self.kind == "affine" and len(self.layers) != 1:
            raise DimensionMismatch("affine input function must have one layer")
        if self.layers[-1].out_dim != 1:
            raise DimensionMismatch("input function must produce a scalar")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise DimensionMismatch("layer widths do not chain")

    @classmethod
    def affine(cls, weights, bias: float = 0.0) -> "InputFunction":
        """Scalar affine function  v = bias + weights . x."""
        return cls("affine", (AffineLayer((tuple(weights),), (bias,)),))

    @classmethod
    def layered(cls, layers) -> "InputFunction":
        return cls("layered", tuple(layers))

    @property
    def arity(self) -> int:
        return self.layers[0].in_dim

    def __call__(self, vec) -> float:
        if len(vec) != self.arity:
            raise DimensionMismatch(
                f"input function expects {self.arity} values, got {len(vec)}")
        cur = list(vec)
        for layer in self.layers[:-1]:
            cur = [math.tanh(y) for y in layer.apply(cur)]
        return self.layers[-1].apply(cur)[0]


@dataclass(frozen=True)
class Neuron:
    """One recurrent tanh unit: weight w plus input function beta."""

    weight: float
    beta: InputFunction


@dataclass(frozen=True)
class CascadeNet:
    """A cascade of recurrent tanh neurons with a scalar output map."""

    input_dim: int
    neurons: tuple
    initial_state: tuple
    output_fn: InputFunction

    def __post_init__(self):
        n = len(self.neurons)
        if len(self.initial_state) != n:
            raise DimensionMismatch(
                f"initial state has {len(self.initial_state)} entries "
                f"for {n} neurons")
        for i, neuron in enumerate(self.neurons):
            want = self.input_dim + i
            if neuron.beta.arity != want:
                raise DimensionMismatch(
                    f"neuron {i}: beta arity {neuron.beta.arity}, "
                    f"expected {want}")
        if self.output_fn.arity != n:
            raise DimensionMismatch(
                f"output function arity {self.output_fn.arity}, expected {n}")

    @property
    def n_neurons(self) -> int:
        return len(self.neurons)


@dataclass(frozen=True)
class GroundedAlphabet:
    """Finite letters with input representatives and output bands.

    ``output_bands`` is a tuple of (lo, hi, letter) triples interpreted as
    the half-open interval [lo, hi); bands must be disjoint.  ``None`` in
    serialized form stands for an unbounded endpoint.
    """

    letters: tuple
    representatives: dict
    identity_letter: str | None
    output_bands: tuple

    def __post_init__(self):
        for letter in self.letters:
            if letter not in self.representatives:
                raise UnknownLetter(f"no representative for letter {letter!r}")
        if self.identity_letter is not None \
                and self.identity_letter not in self.letters:
            raise UnknownLetter(
                f"identity letter {self.identity_letter!r} not in alphabet")
        spans = sorted((lo, hi) for lo, hi, _ in self.output_bands)
        for (lo1, hi1), (lo2, hi2) in zip(spans, spans[1:]):
            if lo2 < hi1:
                raise ValueError("output bands overlap")

    @property
    def output_letters(self) -> tuple:
        seen = []
        for _, _, letter in self.output_bands:
            if letter not in seen:
                seen.append(letter)
        return tuple(seen)

    def representative(self, letter):
        try:
            return self.representatives[letter]
        except KeyError:
            raise UnknownLetter(f"unknown letter {letter!r}") from None

    def ground_output(self, value: float):
        for lo, hi, letter in self.output_bands:
            if lo <= value < hi:
                return letter
        raise UngroundedOutput(f"output value {value} falls in no band")


def step(net: CascadeNet, x, u):
    """One synchronous cascade update from state x under raw input u.

    Every beta reads the pre-update state, so coordinate i depends only on
    u and the old x_1..x_i.
    """
    if len(x) != net.n_neurons:
        raise DimensionMismatch(
            f"state has {len(x)} entries for {net.n_neurons} neurons")
    if len(u) != net.input_dim:
        raise DimensionMismatch(
            f"input has {len(u)} entries, expected {net.input_dim}")
    u = tuple(u)
    out = []
    for i, neuron in enumerate(net.neurons):
        v = neuron.beta(u + tuple(x[:i]))
        out.append(math.tanh(neuron.weight * x[i] + v))
    return tuple(out)


def run(net: CascadeNet, alphabet: GroundedAlphabet, word):
    """Feed a letter sequence through the net from its initial state.

    Returns (trajectory, output letter at the final state); the trajectory
    includes the initial state, so the empty word yields the grounded
    output at the initial state.
    """
    x = tuple(net.initial_state)
    trajectory = [x]
    for letter in word:
        x = step(net, x, alphabet.representative(letter))
        trajectory.append(x)
    return trajectory, alphabet.ground_output(net.output_fn(x))


def settle(net: CascadeNet, alphabet: GroundedAlphabet, x,
           tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Limit of the state under infinitely repeated identity input.

    Iterates the step map under the identity representative until every
    coordinate's move is within tol (coordinate i can only stabilize once
    1..i-1 have), then refines the coordinates bottom-up with Newton on
    g at the offset induced by the already-refined prefix, so each limit
    coordinate is a fixpoint of its update map at the prefix's limit.
    Returns (limit, steps) with steps the number of iterations of the
    step map.
    """
    if alphabet.identity_letter is None:
        raise ValueError("settling requires an identity letter")
    if len(x) != net.n_neurons:
        raise DimensionMismatch(
            f"state has {len(x)} entries for {net.n_neurons} neurons")
    u_e = tuple(alphabet.representative(alphabet.identity_letter))

    current = tuple(x)
    steps = 0
    while True:
        if steps >= max_iter:
            moves = [abs(a - b) for a, b in
                     zip(step(net, current, u_e), current)]
            slowest = max(range(len(moves)), key=moves.__getitem__)
            raise NoConvergence(
                f"coordinate {slowest} did not settle within {max_iter} "
                f"iterations (residual step {moves[slowest]:.3e})",
                coordinate=slowest, iterations=max_iter)
        nxt = step(net, current, u_e)
        steps += 1
        if max(abs(a - b) for a, b in zip(nxt, current)) <= tol:
            current = nxt
            break
        current = nxt

    limit = []
    for i, neuron in enumerate(net.neurons):
        v = neuron.beta(u_e + tuple(limit))
        limit.append(_newton_polish(neuron.weight, v, current[i], tol))
    return tuple(limit), steps


def validate_rncp(net: CascadeNet):
    """Indices of neurons violating strict weight positivity (empty = ok)."""
    return [i for i, n in enumerate(net.neurons) if not n.weight > 0]


def compile_letter_steppers(net: CascadeNet, alphabet: GroundedAlphabet):
    """Per-letter fast steppers with the representative folded in.

    For affine betas the external input contributes a constant, so a step
    reduces to one tanh plus a short dot product over the state prefix.
    Semantics are identical to :func:`step`; this exists for exhaustive
    equivalence sweeps.
    """
    steppers = {}
    for letter in alphabet.letters:
        u = tuple(alphabet.representative(letter))
        if len(u) != net.input_dim:
            raise DimensionMismatch(
                f"representative of {letter!r} has {len(u)} entries, "
                f"expected {net.input_dim}")
        plans = []
        for i, neuron in enumerate(net.neurons):
            beta = neuron.beta
            if beta.kind == "affine":
                layer = beta.layers[0]
                row = layer.weights[0]
                base = layer.bias[0] + sum(
                    wj * uj for wj, uj in zip(row[:net.input_dim], u))
                coeffs = row[net.input_dim:]
                plans.append((neuron.weight, base, coeffs, None))
            else:
                plans.append((neuron.weight, 0.0, (), (beta, u)))
        tanh = math.tanh

        if len(plans) == 1 and plans[0][3] is None:
            w0, base0, _, _ = plans[0]

            def stepper(x, _w=w0, _b=base0, _tanh=tanh):
                return (_tanh(_w * x[0] + _b),)
        else:
            def stepper(x, _plans=plans, _tanh=tanh):
                out = []
                for i, (w, base, coeffs, generic) in enumerate(_plans):
                    if generic is None:
                        v = base
                        for c, xj in zip(coeffs, x):
                            v += c * xj
                    else:
                        beta, u_fixed = generic
                        v = beta(u_fixed + tuple(x[:i]))
                    out.append(_tanh(w * x[i] + v))
                return tuple(out)

        steppers[letter] = stepper
    return steppers


def compile_output(net: CascadeNet, alphabet: GroundedAlphabet):
    """Fast state -> output letter map matching run()'s grounding."""
    fn = net.output_fn
    bands = alphabet.output_bands

    if fn.kind == "affine":
        row = fn.layers[0].weights[0]
        bias = fn.layers[0].bias[0]

        def grounded(x, _row=row, _bias=bias, _bands=bands):
            y = _bias
            for wj, xj in zip(_row, x):
                y += wj * xj
            for lo, hi, letter in _bands:
                if lo <= y < hi:
                    return letter
            raise UngroundedOutput(f"output value {y} falls in no band")
    else:
        def grounded(x):
            y = fn(x)
            for lo, hi, letter in bands:
                if lo <= y < hi:
                    return letter
            raise UngroundedOutput(f"output value {y} falls in no band")

    return grounded


# --- JSON serialization ----------------------------------------------------
#
# Floats go through json's repr-based encoder, which round-trips exactly.
# Unbounded band endpoints are encoded as null.

def _input_fn_to_dict(fn: InputFunction) -> dict:
    return {
        "kind": fn.kind,
        "layers": [
            {"w": [list(row) for row in layer.weights], "b": list(layer.bias)}
            for layer in fn.layers
        ],
    }


def _input_fn_from_dict(data: dict) -> InputFunction:
    layers = tuple(
        AffineLayer(tuple(tuple(row) for row in layer["w"]),
                    tuple(layer["b"]))
        for layer in data["layers"]
    )
    return InputFunction(data["kind"], layers)


def _band_to_json(band):
    lo, hi, letter = band
    return [None if lo == -math.inf else lo,
            None if hi == math.inf else hi,
            letter]


def _band_from_json(entry):
    lo, hi, letter = entry
    return (-math.inf if lo is None else float(lo),
            math.inf if hi is None else float(hi),
            letter)


def net_to_dict(net: CascadeNet, alphabet: GroundedAlphabet) -> dict:
    return {
        "input_dim": net.input_dim,
        "neurons": [
            {"weight": n.weight, "beta": _input_fn_to_dict(n.beta)}
            for n in net.neurons
        ],
        "initial_state": list(net.initial_state),
        "output": _input_fn_to_dict(net.output_fn),
        "alphabet": {
            "letters": list(alphabet.letters),
            "reps": {letter: list(alphabet.representatives[letter])
                     for letter in alphabet.letters},
            "identity": alphabet.identity_letter,
            "output_bands": [_band_to_json(b) for b in alphabet.output_bands],
        },
    }


def net_from_dict(data: dict):
    net = CascadeNet(
        input_dim=int(data["input_dim"]),
        neurons=tuple(
            Neuron(float(n["weight"]), _input_fn_from_dict(n["beta"]))
            for n in data["neurons"]
        ),
        initial_state=tuple(float(x) for x in data["initial_state"]),
        output_fn=_input_fn_from_dict(data["output"]),
    )
    a = data["alphabet"]
    alphabet = GroundedAlphabet(
        letters=tuple(a["letters"]),
        representatives={letter: tuple(float(x) for x in rep)
                         for letter, rep in a["reps"].items()},
        identity_letter=a["identity"],
        output_bands=tuple(_band_from_json(b) for b in a["output_bands"]),
    )
    return net, alphabet


def net_to_json(net: CascadeNet, alphabet: GroundedAlphabet) -> str:
    return json.dumps(net_to_dict(net, alphabet), sort_keys=True, indent=2)


def net_from_json(text: str):
    return net_from_dict(json.loads(text))
