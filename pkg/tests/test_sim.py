import numpy as np
import pytest

from conftest import random_state_vector
from terniq.circuit import Circuit, GateOp, MeasureOp
from terniq.errors import NonUnitaryError, RusCapError, SizeError, WidthCapError
from terniq.gates import matrix_for_name, states_equal_up_to_phase
from terniq.sim import (
    StateVector,
    apply_gate,
    basis_state,
    born_probabilities,
    circuit_permutation,
    circuit_unitary,
    compile_classical,
    index_of_trits,
    measure_wire,
    product_state,
    resource_state,
    run,
    run_compiled,
    trits_of_index,
)
from terniq import widgets


def g(name, *wires):
    return GateOp(matrix_for_name(name), tuple(wires))


def test_little_endian_indexing():
    assert index_of_trits([1, 0]) == 1
    assert index_of_trits([0, 1]) == 3
    assert trits_of_index(5, 3) == (2, 1, 0)


def test_apply_inc_wire0():
    s = apply_gate(basis_state(2, 0), matrix_for_name("INC"), (0,))
    assert s.amps[1] == 1.0  # basis index 1 = trit 1 on wire 0


def test_apply_sum():
    # SUM control wire 0, target wire 1 on |2,2>: target -> 2+2 = 1
    s = apply_gate(basis_state(2, index_of_trits([2, 2])), matrix_for_name("SUM"), (0, 1))
    assert abs(s.amps[index_of_trits([2, 1])] - 1.0) < 1e-14


def test_h_then_hdag_roundtrip():
    s = basis_state(1, 0)
    s = apply_gate(s, matrix_for_name("H"), (0,))
    s = apply_gate(s, matrix_for_name("H_INV"), (0,))
    assert abs(s.amps[0] - 1.0) < 1e-12


def test_wire_clash_rejected():
    with pytest.raises(SizeError):
        apply_gate(basis_state(2, 0), matrix_for_name("SUM"), (1, 1))


def test_measure_deterministic():
    m, s = measure_wire(basis_state(1, 1), 0, np.random.default_rng(0))
    assert m == 1
    assert abs(s.amps[1] - 1) < 1e-14


def test_measure_uniform_frequencies():
    rng = np.random.default_rng(7)
    s = apply_gate(basis_state(1, 0), matrix_for_name("H"), (0,))
    counts = np.zeros(3)
    for _ in range(100_000):
        m, _ = measure_wire(s, 0, rng)
        counts[m] += 1
    freqs = counts / counts.sum()
    assert np.all(np.abs(freqs - 1 / 3) < 0.02)


def test_measure_after_sum_entangler(rng):
    # measuring the resource wire of SUM(psi (x) input) is uniform
    v = random_state_vector(rng, 1)
    init = product_state([v, resource_state("psi")])
    s = apply_gate(init, matrix_for_name("SUM"), (0, 1))
    probs = born_probabilities(s, 1)
    assert np.allclose(probs, 1 / 3, atol=1e-12)


def test_run_empty_circuit_returns_initial(rng):
    init = StateVector(2, random_state_vector(rng, 2))
    rec = run(Circuit(2, ()), init, seed=3)
    assert np.array_equal(rec.state.amps, init.amps)


def test_run_determinism():
    w = widgets.r2_injection_rus()
    a = run(w, basis_state(2, 0), seed=11)
    b = run(w, basis_state(2, 0), seed=11)
    assert a.slots == b.slots
    assert a.rus_trials == b.rus_trials
    assert np.array_equal(a.state.amps, b.state.amps)


def test_norm_preserved_through_run(rng):
    init = StateVector(2, random_state_vector(rng, 2))
    rec = run(widgets.cnot_emulated(), init, seed=0)
    assert abs(rec.state.norm() - 1.0) < 1e-10


def test_rus_cap_raises():
    # an impossible predicate exhausts the iteration cap
    body = Circuit(1, (g("INC", 0), MeasureOp(0, 0)))
    from terniq.circuit import RusOp
    rus = RusOp(body, predicate=((0, 5),), max_iters=8)
    with pytest.raises(RusCapError):
        run(Circuit(1, (rus,)), seed=0)


def test_width_cap(monkeypatch):
    monkeypatch.setenv("TERNIQ_WIDTH_CAP", "3")
    with pytest.raises(WidthCapError):
        run(Circuit(4, ()), seed=0)


def test_classical_path_matches_dense(rng):
    circ = widgets.toffoli_emulated("none")
    # toffoli contains P9 phases: not classical
    with pytest.raises(NonUnitaryError):
        compile_classical(circ)
    from terniq.arithmetic import ShiftSpec, ripple_add_const
    ac = ripple_add_const(ShiftSpec(3, 3, "binary"))
    comp = compile_classical(ac.circuit)
    perm = circuit_permutation(ac.circuit)
    u = circuit_unitary(ac.circuit, cap=8)
    for idx in rng.choice(3**ac.circuit.width, size=24, replace=False):
        out = run_compiled(comp, int(idx))
        assert perm[idx] == out
        assert abs(u[out, idx] - 1.0) < 1e-12


def test_injected_equivalence_all_widgets(rng):
    cases = [
        widgets.c1z_from_p9(),
        widgets.c1z_depth_one(),
        widgets.cnot_emulated(),
        widgets.cnot_emulated(depth_two=True),
        widgets.c_binary_inc(0),
        widgets.c_binary_inc(1),
        widgets.c_binary_inc(2),
        widgets.toffoli_emulated("none"),
    ]
    for circ in cases:
        for i in range(50):
            init = StateVector(circ.width, random_state_vector(rng, circ.width))
            ideal = run(circ, init, seed=i).state
            inj = run(circ, init, seed=9999 - i, gate_mode="injected").state
            pool0 = inj.amps.reshape(3, -1)
            assert np.linalg.norm(pool0[1:]) < 1e-10  # pool wire back to |0>
            assert states_equal_up_to_phase(pool0[0], ideal.amps, 1e-9), circ.name


def test_injected_consumption_tally(rng):
    init = StateVector(2, random_state_vector(rng, 2))
    rec = run(widgets.c1z_from_p9(), init, seed=1, gate_mode="injected")
    assert rec.consumed["mu"] == 3
    assert rec.p9_executed == 3


def test_injected_r2_gate():
    circ = Circuit(1, (g("R2", 0),))
    for seed in range(40):
        v = np.array([0.5, 0.5j, np.sqrt(0.5)])
        rec = run(circ, StateVector(1, v), seed=seed, gate_mode="injected")
        out = rec.state.amps.reshape(3, 3)[0]
        want = matrix_for_name("R2").matrix @ v
        assert states_equal_up_to_phase(out, want, 1e-10)
        assert rec.consumed["psi"] == rec.rus_trials["injected-r2"][0]
