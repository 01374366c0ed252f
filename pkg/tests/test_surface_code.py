import itertools
import math

import numpy as np
import pytest

from heavytail_qec.surface_code import (
    CNOT_LAYERS,
    LOGICAL_X,
    LOGICAL_Z,
    N_DATA,
    N_QUBITS,
    TICKS_PER_ROUND,
    X_ANCILLAS,
    X_STABILIZERS,
    Z_ANCILLAS,
    Z_STABILIZERS,
    PauliCorrection,
    RotatedSurfaceCode,
    SyndromeRecord,
)


@pytest.fixture(scope="module")
def code():
    return RotatedSurfaceCode()


def pauli_string(support, kind, n=N_QUBITS):
    return "".join(kind if q in support else "I" for q in range(n))


def overlap_parity(a, b):
    return len(set(a) & set(b)) % 2


# -- stabilizer algebra (symbolic, no state vector) -------------------------


def test_stabilizers_commute_pairwise():
    # X-type and Z-type stabilizers commute iff supports overlap evenly
    for xs in X_STABILIZERS:
        for zs in Z_STABILIZERS:
            assert overlap_parity(xs, zs) == 0


def test_logicals_commute_with_stabilizers_and_anticommute():
    for zs in Z_STABILIZERS:
        assert overlap_parity(LOGICAL_X, zs) == 0
    for xs in X_STABILIZERS:
        assert overlap_parity(LOGICAL_Z, xs) == 0
    assert overlap_parity(LOGICAL_X, LOGICAL_Z) == 1


def _syndrome(x_support, z_support):
    """Flipped checks for an error with X part x_support and Z part z_support."""
    z_checks = tuple(overlap_parity(x_support, zs) for zs in Z_STABILIZERS)
    x_checks = tuple(overlap_parity(z_support, xs) for xs in X_STABILIZERS)
    return x_checks + z_checks


def _stabilizer_group():
    group = set()
    for x_bits in itertools.product((0, 1), repeat=4):
        xs = frozenset(q for b, s in zip(x_bits, X_STABILIZERS) if b for q in s) ^ frozenset()
        x_supp = frozenset()
        for b, s in zip(x_bits, X_STABILIZERS):
            if b:
                x_supp ^= frozenset(s)
        for z_bits in itertools.product((0, 1), repeat=4):
            z_supp = frozenset()
            for b, s in zip(z_bits, Z_STABILIZERS):
                if b:
                    z_supp ^= frozenset(s)
            group.add((x_supp, z_supp))
    return group


def test_low_weight_errors_detectable_or_stabilizer():
    # every weight-1 and weight-2 data Pauli is either detected by the
    # perfect syndrome or acts trivially (is in the stabilizer group)
    group = _stabilizer_group()
    singles = [((q,), kind) for q in range(N_DATA) for kind in "XYZ"]
    errors = [dict([s]) for s in singles]
    for (q1, k1), (q2, k2) in itertools.combinations(singles, 2):
        if q1[0] != q2[0]:
            errors.append({q1: k1, q2: k2})
    for err in errors:
        x_supp = frozenset(q for qs, k in err.items() for q in qs if k in "XY")
        z_supp = frozenset(q for qs, k in err.items() for q in qs if k in "ZY")
        if any(_syndrome(x_supp, z_supp)):
            continue
        assert (x_supp, z_supp) in group, err


def test_logical_operators_are_not_stabilizers():
    group = _stabilizer_group()
    assert (frozenset(LOGICAL_X), frozenset()) not in group
    assert (frozenset(), frozenset(LOGICAL_Z)) not in group


def test_schedule_tick_counts_in_range():
    # per-stabilizer circuits span 2..6 ticks
    for i, anc in enumerate(X_ANCILLAS):
        cnots = sum(any(c == anc for c, _ in layer) for layer in CNOT_LAYERS)
        assert 2 <= cnots + 2 <= 6
        assert cnots == len(X_STABILIZERS[i])
    for i, anc in enumerate(Z_ANCILLAS):
        cnots = sum(any(t == anc for _, t in layer) for layer in CNOT_LAYERS)
        assert 2 <= cnots <= 6
        assert cnots == len(Z_STABILIZERS[i])


def test_no_qubit_touched_twice_per_tick():
    for layer in CNOT_LAYERS:
        qs = [q for gate in layer for q in gate]
        assert len(qs) == len(set(qs))


# -- encoding ----------------------------------------------------------------


def test_encode_zero_logical(code):
    state = code.encode(0.0, 0.0)
    for s in X_STABILIZERS:
        assert state.pauli_expectation(pauli_string(s, "X")) == pytest.approx(1.0, abs=1e-10)
    for s in Z_STABILIZERS:
        assert state.pauli_expectation(pauli_string(s, "Z")) == pytest.approx(1.0, abs=1e-10)
    assert state.pauli_expectation(pauli_string(LOGICAL_Z, "Z")) == pytest.approx(1.0, abs=1e-10)
    # ancillas all |0>
    for a in range(9, 17):
        assert state.prob_bit0(a) == pytest.approx(1.0, abs=1e-12)


def test_encode_one_and_plus_logical(code):
    one = code.encode(math.pi / 2.0, 0.0)
    assert one.pauli_expectation(pauli_string(LOGICAL_Z, "Z")) == pytest.approx(-1.0, abs=1e-10)
    plus = code.encode(math.pi / 4.0, 0.0)
    assert plus.pauli_expectation(pauli_string(LOGICAL_X, "X")) == pytest.approx(1.0, abs=1e-10)


def test_encode_normalized(code):
    rng = np.random.default_rng(0)
    for _ in range(5):
        a, b = rng.uniform(0, 2 * math.pi, 2)
        assert code.encode(a, b).norm_sq() == pytest.approx(1.0, abs=1e-12)


# -- syndrome rounds -----------------------------------------------------------


def test_clean_round_all_plus_one(code):
    state = code.encode(0.7, 1.3)
    out = code.run_syndrome_round(state, np.zeros((N_QUBITS, TICKS_PER_ROUND)), np.random.default_rng(0))
    assert np.all(out == 1)
    # state unchanged up to numerical noise
    assert code.logical_fidelity(state, 0.7, 1.3) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("q", range(N_DATA))
def test_single_x_flips_adjacent_z_checks(code, q):
    state = code.encode(0.3, 0.2)
    code._inject_pauli(state, q, "X")
    out = code.run_syndrome_round(state, np.zeros((N_QUBITS, TICKS_PER_ROUND)), np.random.default_rng(1))
    for i, s in enumerate(X_STABILIZERS):
        assert out[i] == 1
    for i, s in enumerate(Z_STABILIZERS):
        assert out[4 + i] == (-1 if q in s else 1)


def test_round_determinism(code):
    rng1 = np.random.default_rng(42)
    rng2 = np.random.default_rng(42)
    angles = np.random.default_rng(5).normal(0.0, 0.2, (N_QUBITS, TICKS_PER_ROUND))
    s1 = code.encode(0.5, 0.5)
    s2 = code.encode(0.5, 0.5)
    o1 = code.run_syndrome_round(s1, angles, rng1)
    o2 = code.run_syndrome_round(s2, angles, rng2)
    assert np.array_equal(o1, o2)
    assert np.array_equal(s1.amp, s2.amp)


def test_perfect_syndrome_examples(code):
    rng = np.random.default_rng(2)
    state = code.encode(1.1, 0.4)
    assert np.all(code.perfect_syndrome(state, rng) == 1)
    code._inject_pauli(state, 4, "X")
    out = code.perfect_syndrome(state, rng)
    again = code.perfect_syndrome(state, rng)
    assert np.array_equal(out, again)  # idempotent on the collapsed state
    for i, s in enumerate(Z_STABILIZERS):
        assert out[4 + i] == (-1 if 4 in s else 1)


# -- decoding -------------------------------------------------------------------


def test_detection_events_reference_and_xor():
    rounds = [np.ones(8, dtype=np.int8) for _ in range(4)]
    rounds[1] = rounds[1].copy()
    rounds[1][2] = -1
    rec = SyndromeRecord(rounds=rounds)
    ev = rec.detection_events
    assert ev.shape == (4, 8)
    assert ev[0].sum() == 0  # first round compared against all-+1 reference
    assert ev[1][2] == 1 and ev[2][2] == 1 and ev[3][2] == 0


def test_decode_empty(code):
    rec = SyndromeRecord(rounds=[np.ones(8, dtype=np.int8) for _ in range(4)])
    corr = code.decode(rec)
    assert corr.x_support == frozenset() and corr.z_support == frozenset()


@pytest.mark.parametrize("q", range(N_DATA))
def test_decode_persistent_single_x(code, q):
    # an X present from round 0 on: same flipped checks in every round
    out = np.ones(8, dtype=np.int8)
    for i, s in enumerate(Z_STABILIZERS):
        if q in s:
            out[4 + i] = -1
    rec = SyndromeRecord(rounds=[out.copy() for _ in range(4)])
    corr = code.decode(rec)
    assert corr.z_support == frozenset()
    # correction must equal {q} up to a stabilizer
    residual = corr.x_support ^ frozenset({q})
    assert not any(_syndrome(residual, frozenset()))
    assert (residual, frozenset()) in _stabilizer_group()


def test_decode_deterministic(code):
    rng = np.random.default_rng(4)
    rounds = [np.where(rng.random(8) < 0.3, -1, 1).astype(np.int8) for _ in range(4)]
    rec = SyndromeRecord(rounds=rounds)
    assert code.decode(rec) == code.decode(rec)


def test_correction_validation():
    with pytest.raises(ValueError):
        PauliCorrection(x_support=frozenset({12}), z_support=frozenset())


# -- pipeline --------------------------------------------------------------------


def test_noiseless_pipeline_fidelity_one(code):
    rng = np.random.default_rng(3)
    angles = np.zeros((N_QUBITS, 3 * TICKS_PER_ROUND))
    for _ in range(20):
        a, b = rng.uniform(0.0, 2.0 * math.pi, 2)
        fid = code.run_trial(a, b, angles, rng)
        assert abs(fid - 1.0) < 1e-9


def test_single_fault_round0_sweep(code):
    # distance-3 fault tolerance: any single Pauli fault at any round-0
    # gate site decodes cleanly (full 3-round sweep runs in acceptance)
    from heavytail_qec.surface_code import GATED_QUBITS

    angles = np.zeros((N_QUBITS, 3 * TICKS_PER_ROUND))
    for tick in range(TICKS_PER_ROUND):
        for q in GATED_QUBITS[tick]:
            for p in "XYZ":
                fid = code.run_trial(0.8, 2.1, angles, np.random.default_rng(9), inject=(0, tick, q, p))
                assert abs(fid - 1.0) < 1e-9, (tick, q, p)


def test_logical_x_without_decode(code):
    state = code.encode(0.0, 0.0)
    code.apply_correction(state, PauliCorrection(frozenset(LOGICAL_X), frozenset()))
    assert code.logical_fidelity(state, 0.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    state = code.encode(math.pi / 4.0, 0.0)
    code.apply_correction(state, PauliCorrection(frozenset(LOGICAL_X), frozenset()))
    assert code.logical_fidelity(state, math.pi / 4.0, 0.0) == pytest.approx(1.0, abs=1e-10)


def test_layout_dump(code):
    text = code.layout_dump()
    assert "tick 0" in text and "tick 5" in text
    assert "logical X: [0, 3, 6]" in text
    for anc in range(9, 17):
        assert f"a{anc}:" in text


def test_run_trial_shape_checks(code):
    with pytest.raises(ValueError):
        code.run_syndrome_round(code.encode(0, 0), np.zeros((3, 3)), np.random.default_rng(0))
