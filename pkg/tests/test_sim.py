"""Simulator semantics: bit order, gates, arithmetic, projection, tallies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slacq.sim import (
    AddConst,
    AddRegister,
    GateTally,
    Gate,
    LayoutError,
    Program,
    QftStep,
    RegisterLayout,
    Statevector,
    apply_controlled_swap,
    apply_dense_unitary,
    apply_gate,
    apply_modular_add_const,
    apply_modular_add_register,
    apply_qft,
    apply_reversible_function,
    basis_state,
    inequality_cost_components,
    inner,
    project_and_extract,
    tally_inequality_cost,
    zero_state,
)


def small_layout():
    return RegisterLayout((("a", 2), ("b", 3), ("f", 1)))


def random_state(layout, seed=0):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << layout.total) + 1j * rng.normal(size=1 << layout.total)
    amps /= np.linalg.norm(amps)
    return Statevector(layout, amps)


# --- layout -----------------------------------------------------------------


def test_layout_offsets_first_register_least_significant():
    lay = small_layout()
    assert lay.offset("a") == 0
    assert lay.offset("b") == 2
    assert lay.offset("f") == 5
    assert lay.total == 6
    i = lay.index_for(a=3, b=5, f=1)
    assert i == 3 + (5 << 2) + (1 << 5)
    assert lay.value_of(i, "b") == 5


def test_layout_rejects_over_cap():
    with pytest.raises(LayoutError):
        RegisterLayout((("big", 27),))


def test_layout_rejects_duplicates_and_zero_width():
    with pytest.raises(LayoutError):
        RegisterLayout((("x", 2), ("x", 1)))
    with pytest.raises(LayoutError):
        RegisterLayout((("x", 0),))


def test_layout_without():
    lay = small_layout()
    rest = lay.without(["b"])
    assert rest.names == ("a", "f")
    assert rest.total == 3


# --- elementary gates -------------------------------------------------------


def test_x_moves_basis_state():
    lay = small_layout()
    s = zero_state(lay)
    apply_gate(s, "x", ("b", 1))
    assert s.amplitude(b=2) == 1.0
    assert s.tally.clifford1 == 1


def test_h_twice_is_identity():
    lay = RegisterLayout((("q", 1),))
    s = random_state(lay, seed=3)
    want = s.amps.copy()
    apply_gate(s, "h", ("q", 0))
    apply_gate(s, "h", ("q", 0))
    assert np.max(np.abs(s.amps - want)) < 1e-12


def test_controlled_x_with_both_polarities():
    lay = RegisterLayout((("c", 1), ("t", 1)))
    s = zero_state(lay)
    apply_gate(s, "x", ("t", 0), controls=[(("c", 0), 0)])
    assert s.amplitude(c=0, t=1) == 1.0  # fired on control=0
    s2 = zero_state(lay)
    apply_gate(s2, "x", ("t", 0), controls=[(("c", 0), 1)])
    assert s2.amplitude(c=0, t=0) == 1.0  # did not fire
    assert s2.tally.cx == 1


def test_toffoli_tally_and_action():
    lay = RegisterLayout((("c", 2), ("t", 1)))
    s = basis_state(lay, c=3)
    apply_gate(s, "x", ("t", 0), controls=[(("c", 0), 1), (("c", 1), 1)])
    assert s.amplitude(c=3, t=1) == 1.0
    assert s.tally.toffoli == 1


def test_deep_controls_rejected():
    lay = RegisterLayout((("c", 3), ("t", 1)))
    s = zero_state(lay)
    ctl = [(("c", k), 1) for k in range(3)]
    with pytest.raises(ValueError):
        apply_gate(s, "x", ("t", 0), controls=ctl)
    with pytest.raises(ValueError):
        apply_gate(s, "z", ("t", 0), controls=ctl[:2])


def test_phase_gate_and_inverse():
    lay = RegisterLayout((("q", 2),))
    s = random_state(lay, seed=11)
    want = s.amps.copy()
    g = Gate("phase", ("q", 1), angle=0.7)
    g.apply(s)
    g.inverted().apply(s)
    assert np.max(np.abs(s.amps - want)) < 1e-12
    assert s.tally.rotation == 2


def test_qft_two_qubit_example():
    lay = RegisterLayout((("q", 2),))
    s = basis_state(lay, q=1)
    apply_qft(s, "q")
    want = np.array([1, 1j, -1, -1j]) / 2.0
    assert np.max(np.abs(s.amps - want)) < 1e-12
    assert s.tally.qft == 1


def test_qft_roundtrip_with_spectators():
    lay = RegisterLayout((("lo", 2), ("q", 3), ("hi", 1)))
    s = random_state(lay, seed=5)
    want = s.amps.copy()
    apply_qft(s, "q")
    apply_qft(s, "q", inverse=True)
    assert np.max(np.abs(s.amps - want)) < 1e-12


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_random_gate_programs_preserve_norm(seed):
    lay = RegisterLayout((("a", 2), ("b", 2)))
    rng = np.random.default_rng(seed)
    s = random_state(lay, seed=seed)
    kinds = ["x", "h", "z", "s", "ry", "rz", "phase"]
    for _ in range(12):
        kind = kinds[rng.integers(len(kinds))]
        reg = "a" if rng.integers(2) else "b"
        bit = int(rng.integers(2))
        angle = float(rng.uniform(-3, 3)) if kind in ("ry", "rz", "phase") else None
        apply_gate(s, kind, (reg, bit), angle=angle)
    assert abs(s.norm() - 1.0) < 1e-12


# --- modular arithmetic -----------------------------------------------------


def test_add_const_semantics():
    lay = RegisterLayout((("x", 3),))
    s = basis_state(lay, x=5)
    apply_modular_add_const(s, "x", 6)
    assert s.amplitude(x=(5 + 6) % 8) == 1.0


@given(st.integers(1, 6), st.integers(0, 63), st.integers(0, 63))
@settings(max_examples=60, deadline=None)
def test_add_const_involution(w, x, c):
    x %= 1 << w
    c %= 1 << w
    lay = RegisterLayout((("x", w),))
    s = basis_state(lay, x=x)
    apply_modular_add_const(s, "x", c)
    apply_modular_add_const(s, "x", (1 << w) - c)
    assert s.amplitude(x=x) == 1.0


def test_add_const_controlled():
    lay = RegisterLayout((("x", 3), ("c", 1)))
    s = basis_state(lay, x=2, c=0)
    apply_modular_add_const(s, "x", 3, controls=[(("c", 0), 1)])
    assert s.amplitude(x=2, c=0) == 1.0  # control unsatisfied
    s = basis_state(lay, x=2, c=1)
    apply_modular_add_const(s, "x", 3, controls=[(("c", 0), 1)])
    assert s.amplitude(x=5, c=1) == 1.0


def test_add_const_draper_crosscheck():
    # gate-level Fourier-space adder must agree with the vectorized roll
    for w in (1, 2, 3):
        for c in range(1 << w):
            lay = RegisterLayout((("x", w),))
            s = random_state(lay, seed=w * 16 + c)
            ref = Statevector(lay, s.amps.copy())
            apply_modular_add_const(ref, "x", c)
            apply_qft(s, "x")
            for k in range(w):
                apply_gate(
                    s, "phase", ("x", k), angle=2 * math.pi * c * (1 << k) / (1 << w)
                )
            apply_qft(s, "x", inverse=True)
            assert np.max(np.abs(s.amps - ref.amps)) < 1e-12, (w, c)


def test_add_register_semantics_and_inverse():
    lay = RegisterLayout((("t", 3), ("s", 3)))
    st_ = basis_state(lay, t=6, s=5)
    apply_modular_add_register(st_, "t", "s")
    assert st_.amplitude(t=(6 + 5) % 8, s=5) == 1.0
    apply_modular_add_register(st_, "t", "s", sign=-1)
    assert st_.amplitude(t=6, s=5) == 1.0
    assert st_.tally.toffoli == 2 * 4 * 3


def test_add_register_controlled():
    lay = RegisterLayout((("t", 2), ("s", 2), ("c", 1)))
    s = basis_state(lay, t=1, s=3, c=0)
    apply_modular_add_register(s, "t", "s", controls=[(("c", 0), 1)])
    assert s.amplitude(t=1, s=3, c=0) == 1.0
    s = basis_state(lay, t=1, s=3, c=1)
    apply_modular_add_register(s, "t", "s", controls=[(("c", 0), 1)])
    assert s.amplitude(t=0, s=3, c=1) == 1.0


def test_controlled_swap():
    lay = RegisterLayout((("a", 2), ("b", 2), ("c", 1)))
    s = basis_state(lay, a=1, b=2, c=1)
    apply_controlled_swap(s, "a", "b", ("c", 0))
    assert s.amplitude(a=2, b=1, c=1) == 1.0
    s = basis_state(lay, a=1, b=2, c=0)
    apply_controlled_swap(s, "a", "b", ("c", 0))
    assert s.amplitude(a=1, b=2, c=0) == 1.0


# --- reversible functions ---------------------------------------------------


def test_flag_predicate_fast_path():
    lay = RegisterLayout((("j", 3), ("f", 1)))  # flag on top: fast path
    s = random_state(lay, seed=9)
    before = s.amps.copy()
    apply_reversible_function(s, ["j"], "f", lambda j: j >= 3)
    # amplitudes with j >= 3 swapped between f=0 and f=1
    for j in range(8):
        i0 = lay.index_for(j=j, f=0)
        i1 = lay.index_for(j=j, f=1)
        if j >= 3:
            assert s.amps[i0] == before[i1] and s.amps[i1] == before[i0]
        else:
            assert s.amps[i0] == before[i0] and s.amps[i1] == before[i1]


def test_flag_predicate_general_path_matches():
    lay = RegisterLayout((("f", 1), ("j", 3)))  # flag at bottom: general path
    s = random_state(lay, seed=9)
    before = s.amps.copy()
    apply_reversible_function(s, ["j"], "f", lambda j: j >= 3)
    for j in range(8):
        i0 = lay.index_for(j=j, f=0)
        i1 = lay.index_for(j=j, f=1)
        if j >= 3:
            assert s.amps[i0] == before[i1] and s.amps[i1] == before[i0]
        else:
            assert s.amps[i0] == before[i0] and s.amps[i1] == before[i1]


@given(st.integers(0, 500))
@settings(max_examples=30, deadline=None)
def test_predicate_involution(seed):
    lay = RegisterLayout((("j", 3), ("m", 2), ("f", 1)))
    s = random_state(lay, seed=seed)
    want = s.amps.copy()
    fn = lambda j, m: (m * j) % 3 == 1
    apply_reversible_function(s, ["j", "m"], "f", fn)
    apply_reversible_function(s, ["j", "m"], "f", fn)
    assert np.max(np.abs(s.amps - want)) < 1e-12


def test_predicate_with_controls():
    lay = RegisterLayout((("j", 2), ("c", 1), ("f", 1)))
    s = basis_state(lay, j=3, c=0)
    apply_reversible_function(s, ["j"], "f", lambda j: j == 3, controls=[(("c", 0), 1)])
    assert s.amplitude(j=3, c=0, f=0) == 1.0
    s = basis_state(lay, j=3, c=1)
    apply_reversible_function(s, ["j"], "f", lambda j: j == 3, controls=[(("c", 0), 1)])
    assert s.amplitude(j=3, c=1, f=1) == 1.0


def test_multibit_xor_function():
    lay = RegisterLayout((("x", 3), ("y", 3)))
    s = basis_state(lay, x=6, y=1)
    apply_reversible_function(s, ["x"], "y", lambda x: x)
    assert s.amplitude(x=6, y=6 ^ 1) == 1.0


def test_reversible_function_books_cost():
    lay = RegisterLayout((("j", 3), ("f", 1)))
    s = zero_state(lay)
    cost = tally_inequality_cost(4, 4, 2)
    apply_reversible_function(s, ["j"], "f", lambda j: j > 5, cost=cost)
    assert s.tally.toffoli == cost.toffoli
    assert s.tally.ancilla == cost.ancilla


# --- dense oracle unitaries -------------------------------------------------


def test_dense_unitary_matches_kron():
    rng = np.random.default_rng(4)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    lay = RegisterLayout((("lo", 1), ("r", 2), ("hi", 1)))
    s = random_state(lay, seed=21)
    want = (np.kron(np.eye(2), np.kron(q, np.eye(2))) @ s.amps).reshape(-1)
    apply_dense_unitary(s, "r", q)
    assert np.max(np.abs(s.amps - want)) < 1e-12


# --- projection -------------------------------------------------------------


def test_project_and_extract_probability_and_state():
    lay = RegisterLayout((("a", 1), ("b", 1)))
    s = zero_state(lay)
    apply_gate(s, "h", ("a", 0))
    apply_gate(s, "x", ("b", 0), controls=[(("a", 0), 1)])  # Bell pair
    prob, rest = project_and_extract(s, {"a": 1})
    assert prob == pytest.approx(0.5)
    assert rest.layout.names == ("b",)
    assert abs(rest.amplitude(b=1)) == pytest.approx(1.0)


def test_project_zero_probability_returns_zero_vector():
    lay = RegisterLayout((("a", 2), ("b", 1)))
    s = basis_state(lay, a=1)
    prob, rest = project_and_extract(s, {"a": 3})
    assert prob == 0.0
    assert rest.norm() == 0.0
    assert rest.layout.names == ("b",)


def test_project_multiword():
    lay = RegisterLayout((("a", 2), ("b", 2), ("c", 1)))
    s = random_state(lay, seed=17)
    prob, rest = project_and_extract(s, {"a": 2, "c": 1})
    manual = np.array(
        [s.amplitude(a=2, b=b, c=1) for b in range(4)], dtype=np.complex128
    )
    assert prob == pytest.approx(float(np.sum(np.abs(manual) ** 2)))
    assert np.max(np.abs(rest.amps - manual / np.linalg.norm(manual))) < 1e-12


# --- inequality cost formulas ----------------------------------------------


def test_inequality_components_match_pinned_examples():
    assert inequality_cost_components(5, 5, 2)["squarer"] == 12
    t2 = tally_inequality_cost(5, 5, 2)
    assert t2.toffoli == 100
    assert t2.ancilla == 13
    t1 = tally_inequality_cost(5, 5, 1)
    assert t1.toffoli == 44
    assert t1.ancilla == 9


@pytest.mark.parametrize("n", range(3, 11))
@pytest.mark.parametrize("n_ref", [3, 5, 8])
def test_inequality_totals_follow_formula(n, n_ref):
    w = n - 1
    assert tally_inequality_cost(n, n_ref, 2).toffoli == w * w + w + 4 * w * n_ref
    assert tally_inequality_cost(n, n_ref, 1).toffoli == 2 * w * n_ref + w
    assert tally_inequality_cost(n, n_ref, 2).ancilla == 2 * w + n_ref
    assert tally_inequality_cost(n, n_ref, 1).ancilla == w + n_ref


def test_component_sum_equals_total_order2():
    for n in range(3, 9):
        comps = inequality_cost_components(n, 6, 2)
        assert sum(comps.values()) == tally_inequality_cost(n, 6, 2).toffoli


# --- programs and tallies ---------------------------------------------------


def test_program_inversion_roundtrip():
    lay = RegisterLayout((("x", 3), ("f", 1)))
    prog = Program(
        (
            Gate("h", ("x", 0)),
            Gate("ry", ("x", 1), angle=0.4),
            AddConst("x", 3),
            QftStep("x"),
            Gate("s", ("x", 2)),
            AddRegister("x", "x") if False else AddConst("x", 5),
        )
    )
    s = random_state(lay, seed=33)
    want = s.amps.copy()
    prog.apply(s)
    prog.inverted().apply(s)
    assert np.max(np.abs(s.amps - want)) < 1e-12


def test_gate_tally_sum_and_ancilla_max():
    t = GateTally(toffoli=2, ancilla=5) + GateTally(toffoli=3, ancilla=4)
    assert t.toffoli == 5
    assert t.ancilla == 5
    assert (GateTally(cx=1) + GateTally(rotation=2)).total_gates() == 3


def test_inner_product():
    lay = RegisterLayout((("q", 2),))
    a = random_state(lay, seed=1)
    assert inner(a, a) == pytest.approx(1.0)
