import numpy as np
import pytest

from conftest import random_unitary
from terniq.circuit import (
    Circuit,
    GateOp,
    MeasureOp,
    compose,
    count_resources,
    inverse,
)
from terniq.errors import NonUnitaryError, ParseError, WidthMismatchError
from terniq.gates import GateMatrix, matrix_for_name
from terniq.sim import basis_state, circuit_unitary, run
from terniq.textfmt import deserialize, serialize
from terniq import widgets


def g(name, *wires):
    return GateOp(matrix_for_name(name), tuple(wires))


def x_ladder(width):
    return Circuit(width, tuple(g("INC", w) for w in range(width)))


def test_compose_inverse_identity():
    c = x_ladder(3)
    both = compose(c, inverse(c))
    u = circuit_unitary(both)
    assert np.allclose(u, np.eye(27), atol=1e-12)


def test_compose_width_mismatch():
    with pytest.raises(WidthMismatchError):
        compose(x_ladder(2), x_ladder(3))


def test_counts_additive():
    a = widgets.cnot_emulated()
    b = widgets.c1z_from_p9()
    ca, cb = count_resources(a), count_resources(b)
    cc = count_resources(compose(a, b))
    assert cc.p9_count == ca.p9_count + cb.p9_count
    assert cc.clifford_count == ca.clifford_count + cb.clifford_count
    assert cc.p9_depth <= ca.p9_depth + cb.p9_depth


def test_inverse_rejects_measurement():
    c = Circuit(1, (MeasureOp(0, 0),))
    with pytest.raises(NonUnitaryError):
        inverse(c)


def test_inverse_involution():
    c = widgets.cnot_emulated()
    assert inverse(inverse(c)).instructions == c.instructions


def test_inverse_single_inc():
    c = Circuit(1, (g("INC", 0),))
    u = circuit_unitary(inverse(c))
    v = np.zeros(3)
    v[0] = 1
    assert (u @ v)[2] == 1.0  # INC^dag |0> = |2>


def test_inverse_random_clifford_circuits(rng):
    names = ["H", "Q", "INC", "Z", "SUM", "TSWAP"]
    for trial in range(10):
        ops = []
        for _ in range(12):
            name = names[rng.integers(len(names))]
            gm = matrix_for_name(name)
            wires = tuple(rng.choice(3, size=gm.arity, replace=False))
            ops.append(GateOp(gm, wires))
        c = Circuit(3, tuple(ops))
        u = circuit_unitary(compose(c, inverse(c)))
        assert np.allclose(u, np.eye(27), atol=1e-10)


def test_depth_subadditive_and_deterministic():
    a = widgets.toffoli_emulated("one_clean")
    ra = count_resources(a)
    rb = count_resources(compose(a, a))
    assert rb.p9_depth <= 2 * ra.p9_depth
    assert count_resources(a) == count_resources(a)


def test_costed_primitive_tally():
    c = widgets.horner_gates("CF_LSUM", f=1)
    rc = count_resources(c)
    assert rc.p9_count == 23
    assert dict(rc.costed_primitive_tally) == {"L[SUM]": 2, "C1[SUM]": 1}


def test_injection_widget_composes_to_p9_squared(rng):
    # running the injection widget twice applies P9^2
    w = widgets.p9_injection_widget()
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    v /= np.linalg.norm(v)
    state = v
    from terniq.sim import product_state, resource_state
    for i in range(2):
        rec = run(w, product_state([state, resource_state("mu")]), seed=i)
        m = rec.slots[0]
        state = rec.state.amps.reshape(3, 3)[m, :]
        state = state / np.linalg.norm(state)
    want = np.linalg.matrix_power(matrix_for_name("P9").matrix, 2) @ v
    idx = np.argmax(np.abs(want))
    assert np.linalg.norm(state - (state[idx] / want[idx]) * want) < 1e-10


# -------------------------------------------------------- serialization

from terniq.arithmetic import ShiftSpec, mod_add_const, ripple_add_const
from terniq.qft import qft3n

WIDGET_CIRCUITS = [
    widgets.p9_injection_widget(),
    widgets.r2_injection_rus(),
    widgets.c1z_from_p9(),
    widgets.c1z_depth_one(),
    widgets.cnot_emulated(),
    widgets.toffoli_emulated("none"),
    widgets.toffoli_emulated("one_clean"),
    widgets.ccc_not("two_clean"),
    widgets.ccc_not("one_clean"),
    widgets.horner_gates("LLSUM"),
    widgets.resource_state_prep("plus_omega3"),
    widgets.resource_state_prep("eta"),
    widgets.resource_state_prep("psi"),
    ripple_add_const(ShiftSpec(11, 4, "binary", control="double")).circuit,
    mod_add_const(ShiftSpec(7, 4, "ternary", modulus=13,
                            control="single", control_mode="ternary")).circuit,
    qft3n(4),
]


@pytest.mark.parametrize("circ", WIDGET_CIRCUITS, ids=lambda c: c.name)
def test_round_trip_identity(circ):
    text = serialize(circ)
    back = deserialize(text)
    assert back == circ
    assert serialize(back) == text


def test_parse_simple_gate_line():
    c = deserialize("circuit 2\ngate SUM 0 1\n")
    assert len(c.instructions) == 1
    assert c.instructions[0].gate.name == "SUM"


def test_parse_rejects_bad_wire():
    with pytest.raises(ParseError):
        deserialize("circuit 2\ngate SUM 0 9\n")


def test_parse_error_carries_location():
    try:
        deserialize("circuit 2\n# fine\ngate NOPE 0\n")
    except ParseError as exc:
        assert exc.line == 3
    else:
        raise AssertionError("expected ParseError")


def test_comments_and_blank_lines():
    c = deserialize("circuit 1\n\n# comment\ngate INC 0  # trailing\n")
    assert len(c.instructions) == 1


def test_depth_bounded_by_count():
    for circ in WIDGET_CIRCUITS:
        rc = count_resources(circ)
        assert rc.p9_depth <= rc.p9_count or rc.p9_count == 0


def test_counts_invariant_under_disjoint_interleaving():
    a = [g("P9", 0), g("H", 0), g("P9", 1), g("INC", 1)]
    b = [g("P9", 1), g("P9", 0), g("INC", 1), g("H", 0)]
    ca, cb = Circuit(2, tuple(a)), Circuit(2, tuple(b))
    ra, rb = count_resources(ca), count_resources(cb)
    assert (ra.p9_count, ra.clifford_count, ra.r_count) == \
           (rb.p9_count, rb.clifford_count, rb.r_count)


def test_rus_body_requires_measurement():
    from terniq.circuit import RusOp
    from terniq.errors import NonUnitaryError
    with pytest.raises(NonUnitaryError):
        RusOp(Circuit(1, (g("INC", 0),)), predicate=((0, 0),))


@pytest.mark.parametrize("text", [
    "",
    "circuit",
    "circuit x",
    "circuit 2\ngate",
    "circuit 2\ngate SUM 0",
    "circuit 2\nmeasure 0 ->",
    "circuit 2\ncc c0=1 gate INC 0",
    "circuit 1\nrus {\n",
    "circuit 1\nrus {\ngate INC 0\n} until",
    "circuit 1\nrus {\nmeasure 0 -> c0\n} until c0==0 corrections {\nbad\n}",
    "circuit 2\ngate TAU2[1,99] 0 1",
    "circuit 1\ngate PHASE[1,0] 0",
    "circuit 1\nancilla 5\n",
])
def test_malformed_documents_raise_parse_errors(text):
    from terniq.errors import ParseError
    with pytest.raises(ParseError):
        deserialize(text)


def test_fuzz_round_trips(rng):
    # random gate soups over the name grammar survive exact round trips
    names = ["INC", "H", "Q", "P9", "R2", "SUM", "TSWAP", "C2[INC]", "L[SUM]",
             "TAU1[0,2]", "TAU2[3,7]", "PHASE[5,27]", "X2Z1", "C1[SUM]_INV"]
    for _ in range(30):
        width = int(rng.integers(2, 6))
        ops = []
        for _ in range(int(rng.integers(1, 25))):
            gm = matrix_for_name(names[rng.integers(len(names))])
            if gm.arity > width:
                continue
            wires = tuple(int(w) for w in rng.choice(width, size=gm.arity, replace=False))
            ops.append(GateOp(gm, wires))
        c = Circuit(width, tuple(ops))
        assert deserialize(serialize(c)) == c
