"""Reference automata vs their independent oracles; net fixture builders."""

import itertools
import math

import pytest

import oracles
from tanhcascade import automata_core as ac
from tanhcascade import fixtures as fx
from tanhcascade import rnc_dynamics as rd
from tanhcascade.errors import OutOfBounds, UnknownFixture, WeakDrive
from tanhcascade.tanh_analysis import pivots


def sweep_against_oracle(automaton, oracle, max_len):
    for word in oracles.words_up_to(automaton.alphabet, max_len):
        assert automaton.run(word) == oracle(word), word


class TestLetterParsing:
    def test_props(self):
        assert fx.props("{}") == frozenset()
        assert fx.props("{p}") == {"p"}
        assert fx.props("{p,q}") == {"p", "q"}
        with pytest.raises(ValueError):
            fx.props("p")


class TestDfaAgainstOracles:
    def test_diamond_p(self):
        sweep_against_oracle(fx.dfa_diamond_p(), fx.brute_diamond_p, 8)

    def test_diamond_p_four_letters(self):
        sweep_against_oracle(fx.dfa_diamond_p(fx.PROP_LETTERS_4),
                             fx.brute_diamond_p, 6)

    def test_p_since_q(self):
        sweep_against_oracle(fx.dfa_p_since_q(), fx.brute_p_since_q, 6)

    def test_p_then_q(self):
        sweep_against_oracle(fx.dfa_p_then_q(), fx.brute_p_then_q, 6)

    def test_grid(self):
        a = fx.dfa_grid(3, 3, (1, 1), (3, 3))
        sweep_against_oracle(
            a, lambda w: fx.brute_grid(w, 3, 3, (1, 1), (3, 3)), 5)

    def test_sum_mod_7_incremental(self):
        """Exhaustive to length 6 with the oracle kept as an exact integer
        sum (independent of the transition table)."""
        a = fx.dfa_sum_mod_k(7)
        cols = {l: a.semi.letter_index(l) for l in a.alphabet}

        def visit(q, total, depth):
            assert a.outputs[q] == str(total % 7)
            if depth == 0:
                return
            for letter in a.alphabet:
                visit(a.semi.delta[q][cols[letter]],
                      total + int(letter), depth - 1)

        visit(a.initial, 0, 6)

    def test_sum_bits(self):
        sweep_against_oracle(fx.dfa_sum_bits_eq(4),
                             lambda w: fx.brute_sum_bits_eq(w, 4), 8)

    def test_product_truncated(self):
        sweep_against_oracle(fx.dfa_product_truncated(12, 3),
                             lambda w: fx.brute_product_truncated(w, 12), 6)

    def test_sum_bits_eq_16_shape(self):
        a = fx.dfa_sum_bits_eq(16)
        assert a.n_states == 18
        assert a.run(("1",) * 16) == "1"
        assert a.run(("1",) * 17) == "0"
        assert a.run(("1", "0") * 16) == "1"


class TestGrid:
    def test_empty_word_accepts_at_goal_start(self):
        a = fx.dfa_grid(3, 3, (1, 1), (1, 1))
        assert a.run(()) == "1"

    def test_move_right_to_goal(self):
        a = fx.dfa_grid(3, 3, (1, 1), (2, 1))
        assert a.run(("right",)) == "1"

    def test_left_clamps_at_edge(self):
        a = fx.dfa_grid(3, 3, (1, 1), (1, 1))
        assert a.run(("left",)) == "1"
        assert a.run(("left", "left", "left")) == "1"

    def test_out_of_bounds(self):
        with pytest.raises(OutOfBounds):
            fx.dfa_grid(3, 3, (0, 1), (1, 1))
        with pytest.raises(OutOfBounds):
            fx.dfa_grid(3, 3, (1, 1), (4, 1))


class TestLatchNet:
    def test_hold_dynamics_fixpoints(self):
        net, _ = fx.latch_net()
        pts = oracles.fixpoints_by_grid(4.0, 0.0)
        assert [round(p, 4) for p in pts] == [-0.9993, 0.0, 0.9993]
        assert net.initial_state[0] == pytest.approx(pts[0], abs=1e-9)

    def test_weak_drive_rejected(self):
        bound = math.atanh(pivots(4.0).p_plus) + 4.0
        with pytest.raises(WeakDrive):
            fx.build_latch_net(w=4.0, b=bound)
        fx.build_latch_net(w=4.0, b=bound + 0.1)  # just above is fine

    def test_hold_repetition_keeps_digit(self):
        from tanhcascade import extraction as ex
        net, alphabet = fx.latch_net()
        x = rd.run(net, alphabet, ["{p}"])[0][-1]
        d = ex.eta(net, alphabet, x)
        for _ in range(100):
            x = rd.step(net, x, alphabet.representatives["{}"])
        assert ex.eta(net, alphabet, x) == d == (3,)

    def test_set_low_letter(self):
        net, alphabet = fx.build_latch_net(set_low="{r}")
        assert rd.run(net, alphabet, ["{p}", "{r}"])[1] == "0"
        assert rd.run(net, alphabet, ["{p}", "{r}", "{p}"])[1] == "1"


class TestCascadeBuilder:
    def test_single_level_equals_latch(self):
        stacked, stacked_alpha = fx.build_cascade_net(
            [{"commands": {"{}": "hold", "{p}": "high"}}],
            letters=("{}", "{p}"), identity="{}")
        plain, plain_alpha = fx.latch_net()
        for word in oracles.words_up_to(("{}", "{p}"), 8):
            assert rd.run(stacked, stacked_alpha, word)[1] \
                == rd.run(plain, plain_alpha, word)[1]

    def test_p_since_q_net_matches_dfa(self):
        net, alphabet = fx.p_since_q_net()
        assert ac.net_equivalent(net, alphabet, fx.dfa_p_since_q(),
                                 max_len=8, random_trials=100,
                                 seed=3) is None

    def test_p_then_q_net_matches_dfa(self):
        net, alphabet = fx.p_then_q_net()
        assert ac.net_equivalent(net, alphabet, fx.dfa_p_then_q(),
                                 max_len=8, random_trials=100,
                                 seed=3) is None

    def test_all_net_fixtures_are_rnc_plus(self):
        for entry in fx.catalog().values():
            if entry.kind == "net":
                net, _ = entry.build()
                assert rd.validate_rncp(net) == []

    def test_command_validation(self):
        with pytest.raises(ValueError):
            fx.build_cascade_net(
                [{"commands": {"{}": "hold"}}],
                letters=("{}", "{p}"), identity="{}")  # missing command
        with pytest.raises(ValueError):
            fx.build_cascade_net(
                [{"commands": {"{}": "high", "{p}": "high"}}],
                letters=("{}", "{p}"), identity="{}")  # identity must hold
        with pytest.raises(ValueError):
            fx.build_cascade_net(
                [{"gate": 1,
                  "commands": {"{}": "hold_if_gate", "{p}": "high"}}],
                letters=("{}", "{p}"), identity="{}")  # gate before level 1
        with pytest.raises(ValueError):
            fx.build_cascade_net(
                [{"commands": {"{}": "hold", "{p}": "set_if_gate"}}],
                letters=("{}", "{p}"), identity="{}")  # gated cmd, no gate


class TestIdentityDesignations:
    def test_paper_designated_identities(self):
        cases = {
            "diamond_p": {"{}"},
            "p_since_q": {"{p}"},
            "grid_3x3": {"stayed"},
            "sum_mod_7": {"0"},
            "sum_bits_eq_16": {"0"},
            "product_upto_12": {"1"},
        }
        entries = fx.catalog()
        for name, want in cases.items():
            assert ac.identity_letters(entries[name].build()) == want


class TestOracleRegistry:
    def test_named_oracles(self):
        assert fx.brute_membership("sum_mod_7", ("3", "5", "6")) == "0"
        assert fx.brute_membership("diamond_p", ("{}", "{p}")) == "1"
        assert fx.brute_membership("p_since_q", ("{q}", "{p}")) == "1"
        assert fx.brute_membership("p_since_q", ("{q}", "{}")) == "0"

    def test_unknown_fixture(self):
        with pytest.raises(UnknownFixture):
            fx.brute_membership("nope", ())

    def test_nonregular_oracles_documented(self):
        # these exist only as oracles: unbounded counters and products
        assert fx.brute_membership("sum_integers", ("5", "-3", "4")) == "6"
        assert fx.brute_membership("product_naturals", ("3", "7")) == "21"
        assert fx.brute_membership("sign_sum_increments",
                                   ("1", "-1", "1")) == "+"
        assert fx.brute_membership("grid_unbounded",
                                   ("right", "up")) == "1"
        for name in ("sum_integers", "product_naturals",
                     "sign_sum_increments", "grid_unbounded"):
            assert fx.catalog()[name].kind == "oracle"

    def test_identity_of_nonregular_oracles(self):
        """The documented identity letters hold on sampled insertions."""
        cases = [
            ("sum_integers", "0", ("7", "-2", "9")),
            ("product_naturals", "1", ("2", "3", "5")),
            ("sign_sum_increments", "0", ("1", "1", "-1")),
            ("grid_unbounded", "stayed", ("up", "right", "down")),
        ]
        for name, e, word in cases:
            base = fx.brute_membership(name, word)
            for pos in range(len(word) + 1):
                padded = word[:pos] + (e,) + word[pos:]
                assert fx.brute_membership(name, padded) == base


class TestCatalog:
    def test_every_entry_builds(self):
        for entry in fx.catalog().values():
            if entry.kind == "automaton":
                entry.build().run(())
            elif entry.kind == "net":
                net, alphabet = entry.build()
                rd.run(net, alphabet, [])
            else:
                entry.build(())

    def test_dfa_fixtures_are_connected(self):
        for entry in fx.catalog().values():
            if entry.kind == "automaton":
                a = entry.build()
                assert ac.reachable(a).n_states == a.n_states
