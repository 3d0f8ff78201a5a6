"""Command-line interface.

Exit codes: 0 success / property holds; 1 property fails or a
counterexample was found; 2 usage or I/O error; 3 numeric nonconvergence.
With --json a machine-readable result is printed on stdout (sorted keys,
stable float formatting), so identical invocations produce byte-identical
output.

Words on the command line are space-separated letter tokens matching the
alphabet names exactly, e.g. --word "{p} {} {p,q}".
"""

from __future__ import annotations

import argparse
import json
import sys

from . import automata_core, extraction, fixtures, rnc_dynamics, tanh_analysis
from .errors import CascadeError, NoConvergence

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3


def _parse_word(text: str):
    return text.split()


def _emit(args, data: dict, human_lines):
    if getattr(args, "json", False):
        print(json.dumps(data, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_net(path: str):
    return rnc_dynamics.net_from_dict(_load_json(path))


def _load_automaton(path: str):
    return automata_core.automaton_from_dict(_load_json(path))


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_json(path: str, data: dict):
    _write_text(path, json.dumps(data, sort_keys=True, indent=2) + "\n")


def _cmd_simulate(args) -> int:
    net, alphabet = _load_net(args.net)
    trajectory, output = rnc_dynamics.run(net, alphabet,
                                          _parse_word(args.word))
    _emit(args, {"output": output,
                 "final_state": list(trajectory[-1]),
                 "steps": len(trajectory) - 1},
          [f"output: {output}", f"final state: {list(trajectory[-1])}"])
    return EXIT_OK


def _cmd_settle(args) -> int:
    net, alphabet = _load_net(args.net)
    x = tuple(net.initial_state)
    if args.word:
        trajectory, _ = rnc_dynamics.run(net, alphabet,
                                         _parse_word(args.word))
        x = trajectory[-1]
    limit, steps = rnc_dynamics.settle(net, alphabet, x, tol=args.tol)
    _emit(args, {"limit": list(limit), "steps": steps},
          [f"settled limit: {list(limit)}", f"iterations: {steps}"])
    return EXIT_OK


def _cmd_analyze_neuron(args) -> int:
    w, v = args.weight, args.offset
    if not w > 0:
        raise CascadeError(f"weight must be positive, got {w}")
    fps = tanh_analysis.fixpoints(w, v, tol=args.tol)
    data = {
        "weight": w,
        "offset": v,
        "regime": tanh_analysis.NeuronShape(w).regime.value,
        "fixpoints": list(fps.points),
        "digits": list(fps.digits),
    }
    lines = [f"regime: {data['regime']}",
             f"fixpoints: {list(fps.points)} (digits {list(fps.digits)})"]
    if w > 1:
        piv = tanh_analysis.pivots(w)
        s_lo, s_hi = tanh_analysis.stationary_points(w, v)
        data.update({
            "pivots": [piv.p_minus, piv.p_plus],
            "tangent_offsets": [piv.v_minus, piv.v_plus],
            "stationary_points": [s_lo, s_hi],
        })
        lines += [f"pivots: [{piv.p_minus}, {piv.p_plus}]",
                  f"tangent offsets: [{piv.v_minus}, {piv.v_plus}]",
                  f"stationary points: [{s_lo}, {s_hi}]"]
    _emit(args, data, lines)
    return EXIT_OK


def _cmd_extract(args) -> int:
    net, alphabet = _load_net(args.net)
    cfg = extraction.ExtractionConfig(settle_tol=args.tol,
                                      digit_margin=args.margin)
    report = extraction.extract(net, alphabet, cfg)
    report_dict = extraction.report_to_dict(report)
    if args.out:
        _write_json(args.out, report_dict)
    if args.dot:
        _write_text(args.dot, automata_core.automaton_to_dot(report.flat))
    _emit(args,
          {"state_count": report.state_count,
           "diagnostics": [d.to_dict() for d in report.diagnostics],
           "sound": report.sound,
           "out": args.out, "dot": args.dot},
          [f"states: {report.state_count}",
           f"diagnostics: {len(report.diagnostics)}",
           f"sound: {report.sound}"]
          + ([f"report written to {args.out}"] if args.out else []))
    return EXIT_OK


def _cmd_verify(args) -> int:
    net, alphabet = _load_net(args.net)
    cfg = extraction.ExtractionConfig(settle_tol=args.tol,
                                      digit_margin=args.margin)
    report = extraction.extract(net, alphabet, cfg)
    summary = extraction.verify_extraction(
        net, alphabet, report,
        max_len=args.max_len, trials=args.trials, seed=args.seed,
        jobs=args.jobs)
    data = summary.to_dict()
    data["state_count"] = report.state_count
    lines = [
        f"equivalence: {'ok' if summary.equivalence_ok else 'FAIL'}"
        + (f" (counterexample {list(summary.counterexample)})"
           if summary.counterexample is not None else ""),
        f"identity transformation: {'ok' if summary.identity_ok else 'FAIL'}",
        f"consistency: {'ok' if summary.sound else 'UNSOUND'}",
    ]
    _emit(args, data, lines)
    return EXIT_OK if summary.passed else EXIT_PROPERTY_FAILS


def _cmd_minimize(args) -> int:
    a = _load_automaton(args.automaton)
    m = automata_core.minimize(a)
    if args.out:
        _write_json(args.out, automata_core.automaton_to_dict(m))
    if args.dot:
        _write_text(args.dot, automata_core.automaton_to_dot(m))
    _emit(args, {"states": m.n_states, "out": args.out},
          [f"minimized states: {m.n_states}"])
    return EXIT_OK


def _cmd_check_identity(args) -> int:
    a = _load_automaton(args.automaton)
    letters = sorted(automata_core.identity_letters(a), key=str)
    _emit(args, {"identity_letters": letters},
          [f"identity letters: {letters}"])
    return EXIT_OK if letters else EXIT_PROPERTY_FAILS


def _cmd_check_aperiodic(args) -> int:
    a = _load_automaton(args.automaton)
    m = automata_core.minimize(a)
    monoid = automata_core.transition_monoid(m.semi, cap=args.cap)
    witness = automata_core.periodic_witness(monoid)
    if witness is None:
        _emit(args, {"aperiodic": True}, ["aperiodic: yes"])
        return EXIT_OK
    element, word = witness
    _emit(args,
          {"aperiodic": False,
           "witness_element": list(element),
           "witness_word": list(word)},
          [f"aperiodic: no",
           f"witness element: {list(element)} (word {list(word)})"])
    return EXIT_PROPERTY_FAILS


def _cmd_equiv(args) -> int:
    if args.net and args.automaton:
        net, alphabet = _load_net(args.net)
        a = _load_automaton(args.automaton)
        witness = automata_core.net_equivalent(
            net, alphabet, a, max_len=args.max_len,
            random_trials=args.trials, seed=args.seed, jobs=args.jobs)
    elif args.automaton and args.automaton2:
        a = _load_automaton(args.automaton)
        b = _load_automaton(args.automaton2)
        witness = automata_core.equivalent(a, b)
    else:
        raise CascadeError(
            "equiv needs --net and --automaton, or --automaton and "
            "--automaton2")
    if witness is None:
        _emit(args, {"equivalent": True}, ["equivalent: yes"])
        return EXIT_OK
    _emit(args, {"equivalent": False, "counterexample": list(witness)},
          [f"equivalent: no", f"counterexample: {' '.join(witness)!r}"])
    return EXIT_PROPERTY_FAILS


def _cmd_fixtures(args) -> int:
    entries = fixtures.catalog()
    if not args.name:
        _emit(args,
              {"fixtures": [{"name": e.name, "kind": e.kind,
                             "description": e.description}
                            for e in entries.values()]},
              [f"{e.name:22s} {e.kind:10s} {e.description}"
               for e in entries.values()])
        return EXIT_OK
    if args.name not in entries:
        raise CascadeError(f"unknown fixture {args.name!r}")
    entry = entries[args.name]
    if entry.kind == "oracle":
        raise CascadeError(
            f"fixture {args.name!r} is an oracle without a finite "
            f"representation; it cannot be exported")
    built = entry.build()
    if entry.kind == "net":
        net, alphabet = built
        data = rnc_dynamics.net_to_dict(net, alphabet)
        dot_text = None
    else:
        data = automata_core.automaton_to_dict(built)
        dot_text = automata_core.automaton_to_dot(built)
    if args.out:
        _write_json(args.out, data)
    if args.dot:
        if dot_text is None:
            raise CascadeError("DOT export is only available for automata")
        _write_text(args.dot, dot_text)
    _emit(args, {"name": entry.name, "kind": entry.kind, "out": args.out},
          [f"{entry.name}: {entry.description}"]
          + ([f"written to {args.out}"] if args.out else []))
    return EXIT_OK


def _cmd_export_dot(args) -> int:
    a = _load_automaton(args.automaton)
    _write_text(args.dot or "-", automata_core.automaton_to_dot(a))
    return EXIT_OK


def _add_common(sub, *, net=False, automaton=False, word=False,
                sweep=False, tol=False, margin=False, out=False,
                dot=False):
    if net:
        sub.add_argument("--net", required=True, metavar="FILE",
                         help="network JSON file")
    if automaton:
        sub.add_argument("--automaton", required=True, metavar="FILE",
                         help="automaton JSON file")
    if word:
        sub.add_argument("--word", default="", metavar="LETTERS",
                         help="space-separated letters")
    if sweep:
        sub.add_argument("--max-len", type=int, default=10, metavar="N",
                         help="exhaustive sweep depth (default 10)")
        sub.add_argument("--trials", type=int, default=0, metavar="N",
                         help="random words after the sweep (default 0)")
        sub.add_argument("--seed", type=int, default=0, metavar="N")
        sub.add_argument("--jobs", type=int, default=1, metavar="N",
                         help="worker processes for sweeps (default 1)")
    if tol:
        sub.add_argument("--tol", type=float, default=1e-12, metavar="X",
                         help="numeric tolerance (default 1e-12)")
    if margin:
        sub.add_argument("--margin", type=float, default=1e-6, metavar="X",
                         help="digit ambiguity margin (default 1e-6)")
    if out:
        sub.add_argument("--out", metavar="FILE", help="output JSON file")
    if dot:
        sub.add_argument("--dot", metavar="FILE",
                         help="DOT graph file ('-' for stdout)")
    sub.add_argument("--json", action="store_true",
                     help="machine-readable JSON on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tanhcascade",
        description="Simulate recurrent tanh cascades, analyze their "
                    "fixpoint structure, and extract equivalent finite "
                    "automata.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("simulate", help="run a word through a network")
    _add_common(s, net=True, word=True)
    s.set_defaults(func=_cmd_simulate)

    s = subs.add_parser("settle",
                        help="settled limit under the identity letter")
    _add_common(s, net=True, word=True, tol=True)
    s.set_defaults(func=_cmd_settle)

    s = subs.add_parser("analyze-neuron",
                        help="pivots, stationary points, and fixpoints of "
                             "one neuron")
    s.add_argument("--weight", type=float, required=True, metavar="W")
    s.add_argument("--offset", type=float, default=0.0, metavar="V")
    _add_common(s, tol=True)
    s.set_defaults(func=_cmd_analyze_neuron)

    s = subs.add_parser("extract",
                        help="extract the digit cascade and flat automaton")
    _add_common(s, net=True, tol=True, margin=True, out=True, dot=True)
    s.set_defaults(func=_cmd_extract)

    s = subs.add_parser("verify",
                        help="extract, then check equivalence and identity")
    _add_common(s, net=True, sweep=True, tol=True, margin=True)
    s.set_defaults(func=_cmd_verify)

    s = subs.add_parser("minimize", help="canonical minimal automaton")
    _add_common(s, automaton=True, out=True, dot=True)
    s.set_defaults(func=_cmd_minimize)

    s = subs.add_parser("check-identity",
                        help="identity elements of an automaton")
    _add_common(s, automaton=True)
    s.set_defaults(func=_cmd_check_identity)

    s = subs.add_parser("check-aperiodic",
                        help="aperiodicity via the transition monoid")
    _add_common(s, automaton=True)
    s.add_argument("--cap", type=int, default=10**6, metavar="N",
                   help="monoid element cap (default 1e6)")
    s.set_defaults(func=_cmd_check_aperiodic)

    s = subs.add_parser("equiv",
                        help="compare a net against an automaton, or two "
                             "automata")
    s.add_argument("--net", metavar="FILE", help="network JSON file")
    s.add_argument("--automaton", metavar="FILE",
                   help="automaton JSON file")
    s.add_argument("--automaton2", metavar="FILE",
                   help="second automaton JSON file")
    _add_common(s, sweep=True)
    s.set_defaults(func=_cmd_equiv)

    s = subs.add_parser("fixtures", help="list or export bundled fixtures")
    s.add_argument("--name", metavar="NAME", help="fixture to export")
    _add_common(s, out=True, dot=True)
    s.set_defaults(func=_cmd_fixtures)

    s = subs.add_parser("export-dot", help="write an automaton as DOT")
    _add_common(s, automaton=True, dot=True)
    s.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (CascadeError, OSError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
