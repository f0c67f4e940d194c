import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import frontier_replay
from parqc.circuit import (
    BARRIER,
    Circuit,
    Instruction,
    QasmError,
    compute_metrics,
    parse_qasm,
    read_final_layout_comment,
    serialize_qasm,
    write_qasm,
)
from parqc.densitygen import DensitySpec, generate_with_density


def _random_circuit(seed, width=6, depth=12, density=0.8):
    return generate_with_density(DensitySpec(width=width, depth=depth, density=density, seed=seed))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_example_circuit(example6q):
    assert example6q.width == 6
    assert len(example6q.instructions) == 29
    kinds = [ins.kind for ins in example6q.instructions]
    assert kinds.count("cx") == 7


def test_parse_header_only():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[3];\n")
    assert c.width == 3
    assert c.instructions == ()


def test_parse_creg_and_measure_dropped():
    text = (
        "OPENQASM 2.0;\n"
        'include "qelib1.inc";\n'
        "qreg q[2];\n"
        "creg c[2];\n"
        "h q[0];\n"
        "measure q[0] -> c[0];\n"
        "measure q[1] -> c[1];\n"
    )
    with pytest.warns(UserWarning, match="dropped 2 measure"):
        c = parse_qasm(text)
    assert [ins.kind for ins in c.instructions] == ["h"]


def test_parse_broadcast_expands_in_index_order():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[3];\nh q;\n")
    assert [ins.qubits for ins in c.instructions] == [(0,), (1,), (2,)]


def test_parse_angle_expressions():
    c = parse_qasm(
        "OPENQASM 2.0;\nqreg q[1];\nrx(pi/2) q[0];\nrz(-pi) q[0];\nry(2*pi/3) q[0];\nrx(1e-3) q[0];\nu(pi/4,0.5,-0.25) q[0];\n"
    )
    assert c.instructions[0].params[0] == pytest.approx(math.pi / 2, abs=0)
    assert c.instructions[1].params[0] == pytest.approx(-math.pi, abs=0)
    assert c.instructions[2].params[0] == pytest.approx(2 * math.pi / 3, abs=1e-15)
    assert c.instructions[3].params[0] == 1e-3
    assert c.instructions[4].params == (math.pi / 4, 0.5, -0.25)


@pytest.mark.parametrize(
    "text, match",
    [
        ("OPENQASM 3.0;\nqreg q[2];\n", "unsupported OpenQASM version"),
        ("qreg q[2];\n", "expected 'OPENQASM 2.0;'"),
        ("OPENQASM 2.0;\nqreg q[2];\nqreg r[2];\n", "multiple quantum registers"),
        ("OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n", "unknown gate 'foo'"),
        ("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[5];\n", "out of range"),
        ("OPENQASM 2.0;\nqreg q[2];\nh q[0]\n", "not terminated"),
        ("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[0];\n", "distinct"),
        ("OPENQASM 2.0;\nqreg q[2];\nrx(0.5,0.5) q[0];\n", "takes 1 parameter"),
        ("OPENQASM 2.0;\nqreg q[2];\nh r[0];\n", "unknown register"),
        ("OPENQASM 2.0;\nh q[0];\nqreg q[2];\n", "before qreg"),
        ("OPENQASM 2.0;\nqreg q[2];\nrx(pi**2) q[0];\n", "angle"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(QasmError, match=match):
        parse_qasm(text)


def test_parse_error_reports_position():
    try:
        parse_qasm("OPENQASM 2.0;\nqreg q[4];\nh q[0];\nfrob q[1];\n")
    except QasmError as exc:
        assert exc.line == 4
        assert exc.col == 1
        assert "line 4" in str(exc)
    else:
        pytest.fail("expected QasmError")


def test_statement_may_span_lines():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx\n  q[0],\n  q[1];\n")
    assert c.instructions == (Instruction("cx", (0, 1)),)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_serialize_single_cx():
    text = serialize_qasm(Circuit(2, [Instruction("cx", (0, 1))]))
    cx_lines = [ln for ln in text.splitlines() if ln.startswith("cx")]
    assert cx_lines == ["cx q[0],q[1];"]


def test_roundtrip_seeded_circuits():
    for seed in range(100):
        c = _random_circuit(seed, width=2 + seed % 7, depth=1 + seed % 20, density=1.0)
        assert parse_qasm(serialize_qasm(c)) == c


def test_serializer_byte_stable():
    c = _random_circuit(3)
    assert serialize_qasm(c) == serialize_qasm(parse_qasm(serialize_qasm(c)))


def test_serializer_injective_on_distinct_circuits():
    seen = {}
    for seed in range(1000):
        c = _random_circuit(seed, width=2 + seed % 4, depth=1 + seed % 5, density=1.0)
        digest = hash(serialize_qasm(c))
        if digest in seen:
            assert seen[digest] == c.instructions  # hash collision would be a real clash
        seen[digest] = c.instructions
    assert len(seen) > 900  # distinct instruction lists serialize distinctly


def test_barrier_roundtrip():
    c = Circuit(
        4,
        [
            Instruction("h", (0,)),
            Instruction(BARRIER, (0, 1, 2, 3)),
            Instruction("cx", (1, 2)),
            Instruction(BARRIER, (0, 2)),
        ],
    )
    text = serialize_qasm(c)
    assert "barrier q;" in text
    assert "barrier q[0],q[2];" in text
    assert parse_qasm(text) == c


def test_final_layout_comment_roundtrip(tmp_path):
    from parqc.circuit import read_qasm

    c = Circuit(3, [Instruction("h", (0,))])
    path = tmp_path / "c.qasm"
    write_qasm(c, path, final_layout=[2, 0, 1])
    assert read_final_layout_comment(path) == [2, 0, 1]
    assert read_qasm(path) == c


def test_angle_precision_survives_roundtrip():
    angles = [math.pi, 1 / 3, 2.220446049250313e-16, 6.283185307179586, 0.1 + 0.2]
    c = Circuit(1, [Instruction("rz", (0,), (a,)) for a in angles])
    back = parse_qasm(serialize_qasm(c))
    for ins, a in zip(back.instructions, angles):
        assert ins.params[0] == a  # 17 significant digits are lossless for float64


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def test_metrics_example_circuit(example6q):
    m = compute_metrics(example6q)
    assert m.depth == 6
    assert m.width == 6
    assert m.n_q1 == 22
    assert m.n_q2 == 7
    assert m.density == 1.0


def test_metrics_single_layer_of_h():
    for w in (1, 3, 8):
        c = Circuit(w, [Instruction("h", (q,)) for q in range(w)])
        m = compute_metrics(c)
        assert m.depth == 1
        assert m.n_q1 == w
        assert m.density == 1.0


def test_metrics_against_replay_oracle():
    for seed in range(1000):
        c = _random_circuit(
            seed,
            width=4 + seed % 6,
            depth=2 + seed % 17,
            density=(0.5, 0.75, 1.0)[seed % 3],
        )
        m = compute_metrics(c)
        depth, ones, twos = frontier_replay(c)
        assert (m.depth, m.n_q1, m.n_q2) == (depth, ones, twos)
        assert m.density == (ones + 2 * twos) / (depth * c.width)


def test_metrics_empty_circuit_rejected():
    with pytest.raises(ValueError, match="no gates"):
        compute_metrics(Circuit(3))
    with pytest.raises(ValueError, match="no gates"):
        compute_metrics(Circuit(3, [Instruction(BARRIER, (0, 1, 2))]))


def test_depth_monotone_under_append():
    c = _random_circuit(1, width=5, depth=9, density=1.0)
    base = compute_metrics(c)
    for q in range(5):
        grown = Circuit(5, c.instructions + (Instruction("h", (q,)),))
        assert compute_metrics(grown).depth >= base.depth
    # a gate on a critical-path qubit extends depth by exactly one
    frontier = [0] * 5
    for ins in c.instructions:
        t = 1 + max(frontier[q] for q in ins.qubits)
        for q in ins.qubits:
            frontier[q] = t
    critical = frontier.index(max(frontier))
    grown = Circuit(5, c.instructions + (Instruction("h", (critical,)),))
    assert compute_metrics(grown).depth == base.depth + 1


def test_barriers_do_not_change_metrics():
    c = _random_circuit(2, width=4, depth=7, density=1.0)
    interleaved = []
    for ins in c.instructions:
        interleaved.append(ins)
        interleaved.append(Instruction(BARRIER, (0, 1, 2, 3)))
    m0 = compute_metrics(c)
    m1 = compute_metrics(Circuit(4, interleaved))
    assert m0 == m1


def test_density_identity_is_exact_in_integers():
    for seed in range(50):
        c = _random_circuit(seed, width=4 + seed % 5, depth=6, density=0.5)
        m = compute_metrics(c)
        assert m.n_q1 + 2 * m.n_q2 == round(m.density * m.depth * m.width)


# ---------------------------------------------------------------------------
# instruction validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "kind, qubits, params",
    [
        ("nope", (0,), ()),
        ("h", (0, 1), ()),
        ("cx", (0,), ()),
        ("cx", (1, 1), ()),
        ("rx", (0,), ()),
        ("u", (0,), (0.1,)),
        ("h", (0,), (0.1,)),
        ("rz", (0,), (float("nan"),)),
        ("barrier", (), ()),
    ],
)
def test_instruction_validation(kind, qubits, params):
    with pytest.raises(ValueError):
        Instruction(kind, qubits, params)


def test_circuit_rejects_out_of_range_qubits():
    with pytest.raises(ValueError, match="out of range"):
        Circuit(2, [Instruction("h", (2,))])


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

_KIND_1Q = st.sampled_from(sorted({"h", "x", "y", "z", "s", "t"}))
_ANGLE = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def circuits(draw):
    width = draw(st.integers(min_value=2, max_value=6))
    n = draw(st.integers(min_value=0, max_value=30))
    instrs = []
    for _ in range(n):
        choice = draw(st.integers(min_value=0, max_value=3))
        if choice == 0:
            instrs.append(Instruction(draw(_KIND_1Q), (draw(st.integers(0, width - 1)),)))
        elif choice == 1:
            kind = draw(st.sampled_from(["rx", "ry", "rz"]))
            instrs.append(Instruction(kind, (draw(st.integers(0, width - 1)),), (draw(_ANGLE),)))
        elif choice == 2:
            instrs.append(
                Instruction("u", (draw(st.integers(0, width - 1)),), tuple(draw(_ANGLE) for _ in range(3)))
            )
        else:
            a = draw(st.integers(0, width - 1))
            b = draw(st.integers(0, width - 2))
            if b >= a:
                b += 1
            instrs.append(Instruction(draw(st.sampled_from(["cx", "cz", "swap"])), (a, b)))
    return Circuit(width, instrs)


@settings(max_examples=150, deadline=None)
@given(circuits())
def test_roundtrip_property(c):
    back = parse_qasm(serialize_qasm(c))
    assert back.width == c.width
    assert back.instructions == c.instructions


@settings(max_examples=100, deadline=None)
@given(circuits())
def test_density_consistency_property(c):
    if c.n_gates == 0:
        return
    m = compute_metrics(c)
    assert m.n_q1 + m.n_q2 == c.n_gates
    assert m.density * m.depth * m.width == pytest.approx(m.n_q1 + 2 * m.n_q2, abs=1e-9)
    assert 0 < m.density <= 1.0
