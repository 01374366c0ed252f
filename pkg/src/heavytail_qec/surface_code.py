"""Distance-3 rotated surface code: layout, scheduled syndrome extraction,
decoding, and logical fidelity.

Nine data qubits sit on a 3x3 grid (data index q = 3*row + col); four X-type
and four Z-type stabilizers are measured through ancillas 9..16.  One
syndrome round is six ticks: X-ancilla basis rotations, four interleaved
CNOT layers (X checks in NW-NE-SW-SE order, Z checks in NW-SW-NE-SE order,
the standard hook-avoiding pairing), rotations back, then ancilla
measurement and reset.  Weight-2 boundary checks occupy 2 CNOT ticks and
weight-4 bulk checks 4, so per-stabilizer circuits span 2-6 ticks.

Noise model: an error rotation by theta[qubit, tick] follows every gate, on
the qubits that gate touches (idle qubits are not hit; the white/DC
equivalence observed for Gaussian noise pins this placement -- idle-tick
noise would accumulate coherently under DC and split the curves).
Consecutive rotations on a qubit with no gate in between compose exactly
by angle addition, so the runner accumulates pending angles per qubit and
flushes them right before the qubit's next gate or measurement -- an exact
algebraic merge, not an approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .statevector import (
    MeasurementError,
    StateVector,
    _apply_sign_mask_pass,
    _apply_x_string_pass,
    _cnot_pass,
    _lincomb_pass,
    _lowest_bit,
    _project_bit_pass,
    _project_signed_pass,
    _project_x_string_pass,
    _prob_bit0_pass,
    _prob_signed_pass,
    _real_dots_pass,
    _rot4_pass,
    _rot_pass,
    _rot_prob_pass,
    _x_string_expectation_pass,
)

N_DATA = 9
N_ANCILLA = 8
N_QUBITS = 17

DATA_COORDS = tuple((q // 3, q % 3) for q in range(N_DATA))

# stabilizer supports over data qubits; index order fixes ancilla and
# syndrome-bit order: X checks 0..3 = ancillas 9..12, Z checks 0..3 = 13..16
X_STABILIZERS = ((0, 1), (1, 2, 4, 5), (3, 4, 6, 7), (7, 8))
Z_STABILIZERS = ((0, 1, 3, 4), (4, 5, 7, 8), (3, 6), (2, 5))
X_STABILIZER_CENTERS = ((-0.5, 0.5), (0.5, 1.5), (1.5, 0.5), (2.5, 1.5))
Z_STABILIZER_CENTERS = ((0.5, 0.5), (1.5, 1.5), (1.5, -0.5), (0.5, 2.5))

LOGICAL_X = (0, 3, 6)
LOGICAL_Z = (0, 1, 2)

X_ANCILLAS = tuple(range(9, 13))
Z_ANCILLAS = tuple(range(13, 17))

TICKS_PER_ROUND = 6

_X_CORNER_ORDER = ("nw", "ne", "sw", "se")
_Z_CORNER_ORDER = ("nw", "sw", "ne", "se")
_CORNER_OFFSETS = {"nw": (-0.5, -0.5), "ne": (-0.5, 0.5), "sw": (0.5, -0.5), "se": (0.5, 0.5)}

PREP_ANGLE = math.pi / 4.0  # exp(-i pi/4 sigma_y) maps |0> -> |+>


def _corner_qubit(center, corner):
    r = center[0] + _CORNER_OFFSETS[corner][0]
    c = center[1] + _CORNER_OFFSETS[corner][1]
    if r in (0.0, 1.0, 2.0) and c in (0.0, 1.0, 2.0):
        return int(3 * r + c)
    return None


def _build_cnot_layers():
    """Four CNOT layers as (control, target) lists; X ancillas control,
    Z ancillas are targets."""
    layers = [[] for _ in range(4)]
    for i, (stab, center) in enumerate(zip(X_STABILIZERS, X_STABILIZER_CENTERS)):
        for layer, corner in enumerate(_X_CORNER_ORDER):
            d = _corner_qubit(center, corner)
            if d is not None:
                assert d in stab
                layers[layer].append((X_ANCILLAS[i], d))
    for i, (stab, center) in enumerate(zip(Z_STABILIZERS, Z_STABILIZER_CENTERS)):
        for layer, corner in enumerate(_Z_CORNER_ORDER):
            d = _corner_qubit(center, corner)
            if d is not None:
                assert d in stab
                layers[layer].append((d, Z_ANCILLAS[i]))
    return tuple(tuple(sorted(layer)) for layer in layers)


CNOT_LAYERS = _build_cnot_layers()


def _gated_qubits_by_tick():
    ticks = []
    ticks.append(tuple(X_ANCILLAS))
    for layer in CNOT_LAYERS:
        qs = set()
        for c, t in layer:
            qs.add(c)
            qs.add(t)
        ticks.append(tuple(sorted(qs)))
    ticks.append(tuple(X_ANCILLAS))
    return tuple(ticks)


GATED_QUBITS = _gated_qubits_by_tick()
_GATED_IDX = tuple(np.array(qs, dtype=np.intp) for qs in GATED_QUBITS)


@dataclass
class SyndromeRecord:
    """Per-round ancilla outcomes (+-1), ordered [X0..X3, Z0..Z3]; the last
    round is the perfect one."""

    rounds: list

    @property
    def detection_events(self) -> np.ndarray:
        """XOR of consecutive rounds per stabilizer; round 0 is compared
        against the encoded state's all-+1 reference syndrome."""
        rounds = np.asarray(self.rounds)
        events = np.empty_like(rounds, dtype=np.uint8)
        events[0] = rounds[0] != 1
        events[1:] = rounds[1:] != rounds[:-1]
        return events


@dataclass(frozen=True)
class PauliCorrection:
    x_support: frozenset
    z_support: frozenset

    def __post_init__(self):
        allowed = set(range(N_DATA))
        if not (set(self.x_support) <= allowed and set(self.z_support) <= allowed):
            raise ValueError("correction supports must be data qubits")


@numba.njit(cache=True)
def _mwpm_assign(wpair, wb):
    """Exact minimum-weight assignment of events to pairs or boundary by
    subset DP.  Returns match[i] = partner index or -1 for boundary."""
    k = wb.shape[0]
    size = 1 << k
    best = np.full(size, np.inf)
    choice = np.full(size, -1, np.int8)
    best[0] = 0.0
    for mask in range(1, size):
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rem = mask & ~(1 << i)
        b = wb[i] + best[rem]
        bc = -1
        for j in range(i + 1, k):
            if (rem >> j) & 1:
                c = wpair[i, j] + best[rem & ~(1 << j)]
                # ties go to pairing: hook faults produce diagonal event
                # pairs whose boundary-boundary alternative is a logical
                if c < b + 1e-9:
                    b = c
                    bc = j
        best[mask] = b
        choice[mask] = bc
    match = np.full(k, -1, np.int64)
    mask = size - 1
    while mask:
        i = 0
        while not (mask >> i) & 1:
            i += 1
        j = choice[mask]
        mask &= ~(1 << i)
        if j >= 0:
            match[i] = j
            match[j] = i
            mask &= ~(1 << j)
    return match


def _greedy_assign(wpair: np.ndarray, wb: np.ndarray) -> np.ndarray:
    """Fallback matching for event counts past the exact-DP cap: repeatedly
    take the cheapest remaining pair-or-boundary option."""
    k = wb.shape[0]
    options = [(wb[i], 1, i, -1) for i in range(k)]
    options += [(wpair[i, j], 0, i, -j) for i in range(k) for j in range(i + 1, k)]
    options.sort()
    options = [(w, i, -j if kind == 0 else j) for w, kind, i, j in options]
    match = np.full(k, -2, np.int64)
    for _, i, j in options:
        if match[i] != -2 or (j >= 0 and match[j] != -2):
            continue
        match[i] = j
        if j >= 0:
            match[j] = i
    return np.where(match == -2, -1, match)


class _MatchGraph:
    """Spatial matching graph for one stabilizer type: checks are nodes,
    data qubits give unit-weight edges (to another check or the boundary)."""

    def __init__(self, stabilizers):
        n = len(stabilizers)
        owners = {}
        for c, stab in enumerate(stabilizers):
            for d in stab:
                owners.setdefault(d, []).append(c)
        self.neighbors = [[] for _ in range(n)]
        self.boundary_data = [[] for _ in range(n)]
        for d, cs in sorted(owners.items()):
            if len(cs) == 2:
                a, b = cs
                self.neighbors[a].append((b, d))
                self.neighbors[b].append((a, d))
            else:
                self.boundary_data[cs[0]].append(d)
        self.n = n
        self.dist = np.zeros((n, n))
        self.path = [[frozenset() for _ in range(n)] for _ in range(n)]
        for src in range(n):
            dist, path = self._bfs(src)
            self.dist[src] = dist
            self.path[src] = path
        self.bdist = np.full(n, np.inf)
        self.bpath = [frozenset()] * n
        for c in range(n):
            for via in range(n):
                if self.boundary_data[via] and self.dist[c, via] + 1 < self.bdist[c]:
                    self.bdist[c] = self.dist[c, via] + 1
                    self.bpath[c] = self.path[c][via] | {min(self.boundary_data[via])}

    def _bfs(self, src):
        dist = np.full(self.n, np.inf)
        path = [frozenset()] * self.n
        dist[src] = 0
        frontier = [src]
        while frontier:
            nxt = []
            for u in frontier:
                for v, d in sorted(self.neighbors[u]):
                    if dist[u] + 1 < dist[v]:
                        dist[v] = dist[u] + 1
                        path[v] = path[u] | {d}
                        nxt.append(v)
            frontier = nxt
        return dist, path

    def match_events(self, events, max_exact_events: int = 16) -> frozenset:
        """events: list of (check, round); returns the data-qubit support of
        the matched correction."""
        k = len(events)
        if k == 0:
            return frozenset()
        wb = np.array([self.bdist[c] for c, _ in events])
        wpair = np.zeros((k, k))
        for i in range(k):
            ci, ti = events[i]
            for j in range(i + 1, k):
                cj, tj = events[j]
                wpair[i, j] = wpair[j, i] = self.dist[ci, cj] + abs(ti - tj)
        if k <= max_exact_events:
            match = _mwpm_assign(wpair, wb)
        else:
            match = _greedy_assign(wpair, wb)
        support = set()
        for i in range(k):
            if match[i] == -1:
                support ^= self.bpath[events[i][0]]
            elif match[i] > i:
                support ^= self.path[events[i][0]][events[match[i]][0]]
        return frozenset(support)


def _sign_table(zmask: int) -> np.ndarray:
    idx = np.arange(1 << N_QUBITS, dtype=np.uint32)
    parity = (np.bitwise_count(idx & np.uint32(zmask)) & 1).astype(np.int8)
    return (1 - 2 * parity).astype(np.int8)


def _mask(qubits) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


class RotatedSurfaceCode:
    """Layout, schedule, encoder, decoder, and trial pipeline."""

    def __init__(self):
        self.x_masks = [_mask(s) for s in X_STABILIZERS]
        self.z_masks = [_mask(s) for s in Z_STABILIZERS]
        self.z_tables = [_sign_table(m) for m in self.z_masks]
        self.logical_x_mask = _mask(LOGICAL_X)
        self.logical_z_mask = _mask(LOGICAL_Z)
        self.x_graph = _MatchGraph(X_STABILIZERS)
        self.z_graph = _MatchGraph(Z_STABILIZERS)
        self._v0, self._v1 = self._build_logical_basis()

    def _build_logical_basis(self):
        state = StateVector(N_QUBITS)
        for m in self.x_masks:
            p = 0.5 * (1.0 + _x_string_expectation_pass(state.amp, m, _lowest_bit(m)))
            _project_x_string_pass(state.amp, m, _lowest_bit(m), 1.0, 1.0 / math.sqrt(p))
        assert abs(state.norm_sq() - 1.0) < 1e-12
        for m in self.x_masks:
            exp = _x_string_expectation_pass(state.amp, m, _lowest_bit(m))
            assert abs(exp - 1.0) < 1e-10
        for t in self.z_tables:
            assert abs(_prob_signed_pass(state.amp, t) - 1.0) < 1e-10
        v0 = state.amp.real.copy()
        one = state.copy()
        _apply_x_string_pass(one.amp, self.logical_x_mask, _lowest_bit(self.logical_x_mask))
        v1 = one.amp.real.copy()
        return v0, v1

    # -- encoding ----------------------------------------------------------

    def encode(self, alpha: float, beta: float) -> StateVector:
        """cos(alpha)|0_L> + e^(i beta) sin(alpha)|1_L> on 17 qubits with all
        ancillas in |0>; noiseless by construction."""
        state = StateVector.__new__(StateVector)
        state.n_qubits = N_QUBITS
        state.amp = np.empty(1 << N_QUBITS, dtype=np.complex128)
        sa = math.sin(alpha)
        _lincomb_pass(
            state.amp.view(np.float64),
            self._v0,
            self._v1,
            math.cos(alpha),
            math.cos(beta) * sa,
            math.sin(beta) * sa,
        )
        return state

    def logical_fidelity(self, state: StateVector, alpha: float, beta: float) -> float:
        """|<ideal(alpha, beta)|state>|^2 via the cached logical basis."""
        r0, i0, r1, i1 = _real_dots_pass(state.amp, self._v0, self._v1)
        c0 = math.cos(alpha)
        c1 = complex(math.cos(beta), math.sin(beta)) * math.sin(alpha)
        ov = c0 * complex(r0, i0) + c1.conjugate() * complex(r1, i1)
        return abs(ov) ** 2

    # -- syndrome extraction -------------------------------------------------

    def _flush(self, state: StateVector, pending: np.ndarray, qubits) -> None:
        # apply pending rotations; adjacent qubit pairs share one traversal
        # (non-adjacent pairings stride badly and lose to two plain passes)
        nz = [q for q in qubits if pending[q] != 0.0]
        nz.sort(reverse=True)
        f = state.amp.view(np.float64)
        i = 0
        while i < len(nz):
            q = nz[i]
            if i + 1 < len(nz) and nz[i + 1] == q - 1 and q >= 3:
                p = q - 1
                view = f.reshape(-1, 2, 1, 2, 1 << (p + 1))
                _rot4_pass(
                    view, math.cos(pending[q]), math.sin(pending[q]), math.cos(pending[p]), math.sin(pending[p])
                )
                pending[q] = 0.0
                pending[p] = 0.0
                i += 2
            else:
                theta = pending[q]
                _rot_pass(state._rot_view(q), math.cos(theta), math.sin(theta))
                pending[q] = 0.0
                i += 1

    def run_syndrome_round(
        self,
        state: StateVector,
        angles: np.ndarray,
        rng: np.random.Generator,
        pending: np.ndarray | None = None,
        inject=None,
    ) -> np.ndarray:
        """Execute one faulty round; angles has shape (17, 6).

        angles[q, t] is consumed only when qubit q carries a gate at tick t
        (noise follows gates); entries at idle slots are ignored, which
        keeps trajectory rows aligned with circuit time for every qubit.
        pending carries not-yet-applied noise angles across round boundaries
        (the pipeline passes one array through all rounds); when omitted the
        round is self-contained and flushes everything before returning.
        inject=(tick, qubit, pauli) plants one extra Pauli fault after that
        tick's gates, for fault-tolerance sweeps.
        """
        if angles.shape != (N_QUBITS, TICKS_PER_ROUND):
            raise ValueError(f"angles must have shape {(N_QUBITS, TICKS_PER_ROUND)}, got {angles.shape}")
        standalone = pending is None
        if standalone:
            pending = np.zeros(N_QUBITS)
        for tick in range(TICKS_PER_ROUND):
            if tick == 0:
                # the basis-change Ry commutes with every other Y rotation on
                # the ancilla, so it rides along in the pending accumulator
                for a in X_ANCILLAS:
                    pending[a] += PREP_ANGLE
            elif tick == TICKS_PER_ROUND - 1:
                for a in X_ANCILLAS:
                    pending[a] -= PREP_ANGLE
            else:
                self._flush(state, pending, GATED_QUBITS[tick])
                for control, target in CNOT_LAYERS[tick - 1]:
                    _cnot_pass(state.amp, control, target)
            idx = _GATED_IDX[tick]
            pending[idx] += angles[idx, tick]
            if inject is not None and inject[0] == tick:
                # bring the target qubit up to date so the fault lands at its
                # true circuit position (after this tick's gates and noise)
                self._flush(state, pending, (inject[1],))
                self._inject_pauli(state, inject[1], inject[2])
        outcomes = np.empty(N_ANCILLA, dtype=np.int8)
        for i, a in enumerate(range(9, 17)):
            outcomes[i] = self._measure_reset_flushing(state, pending, a, rng)
        if standalone:
            self._flush(state, pending, range(N_DATA))
        return outcomes

    @staticmethod
    def _measure_reset_flushing(
        state: StateVector, pending: np.ndarray, qubit: int, rng: np.random.Generator
    ) -> int:
        # flush the ancilla's pending rotation fused with the Born probability
        theta = pending[qubit]
        view = state._rot_view(qubit)
        if theta != 0.0:
            p0 = _rot_prob_pass(view, math.cos(theta), math.sin(theta))
            pending[qubit] = 0.0
        else:
            p0 = _prob_bit0_pass(view)
        bit = 0 if rng.random() < p0 else 1
        p = p0 if bit == 0 else 1.0 - p0
        if p < 1e-15:
            raise MeasurementError(f"selected branch has probability {p:.3e}")
        _project_bit_pass(view, bit, 1.0 / math.sqrt(p), 1 if bit else 0)
        return 1 - 2 * bit

    @staticmethod
    def _inject_pauli(state: StateVector, qubit: int, pauli: str) -> None:
        if pauli in ("X", "Y"):
            _apply_x_string_pass(state.amp, 1 << qubit, qubit)
        if pauli in ("Z", "Y"):
            _apply_sign_mask_pass(state.amp, 1 << qubit)

    def perfect_syndrome(self, state: StateVector, rng: np.random.Generator) -> np.ndarray:
        """Projectively measure all eight stabilizers (no circuit, no noise)
        in fixed order; Born-samples each sign and collapses the state."""
        outcomes = np.empty(N_ANCILLA, dtype=np.int8)
        for i, m in enumerate(self.x_masks):
            exp = _x_string_expectation_pass(state.amp, m, _lowest_bit(m))
            p_plus = min(max(0.5 * (1.0 + exp), 0.0), 1.0)
            sign = 1 if rng.random() < p_plus else -1
            p = p_plus if sign == 1 else 1.0 - p_plus
            _project_x_string_pass(state.amp, m, _lowest_bit(m), float(sign), 1.0 / math.sqrt(p))
            outcomes[i] = sign
        for i, table in enumerate(self.z_tables):
            p_plus = min(_prob_signed_pass(state.amp, table), 1.0)
            sign = 1 if rng.random() < p_plus else -1
            p = p_plus if sign == 1 else 1.0 - p_plus
            _project_signed_pass(state.amp, table, sign, 1.0 / math.sqrt(p))
            outcomes[4 + i] = sign
        return outcomes

    # -- decoding ------------------------------------------------------------

    def decode(self, record: SyndromeRecord, max_exact_events: int = 16) -> PauliCorrection:
        """Minimum-weight perfect matching on the spacetime detection-event
        graph, X and Z types independently, unit edge weights."""
        events = record.detection_events
        z_events = []  # flipped Z checks <- X errors
        x_events = []  # flipped X checks <- Z errors
        for t in range(events.shape[0]):
            for c in range(4):
                if events[t, c]:
                    x_events.append((c, t))
                if events[t, 4 + c]:
                    z_events.append((c, t))
        x_support = self.z_graph.match_events(z_events, max_exact_events)
        z_support = self.x_graph.match_events(x_events, max_exact_events)
        return PauliCorrection(x_support=x_support, z_support=z_support)

    def apply_correction(self, state: StateVector, correction: PauliCorrection) -> None:
        xm = _mask(correction.x_support)
        zm = _mask(correction.z_support)
        if zm:
            _apply_sign_mask_pass(state.amp, zm)
        if xm:
            _apply_x_string_pass(state.amp, xm, _lowest_bit(xm))

    # -- full pipeline ---------------------------------------------------------

    def run_trial(
        self,
        alpha: float,
        beta: float,
        angles: np.ndarray,
        rng: np.random.Generator,
        n_rounds: int = 3,
        inject=None,
    ) -> float:
        """encode -> n_rounds faulty rounds -> perfect round -> decode ->
        correct -> squared overlap with the ideal encoded state.

        angles has shape (17, 6 * n_rounds); inject=(round, tick, qubit,
        pauli) plants a single Pauli fault.
        """
        state = self.encode(alpha, beta)
        pending = np.zeros(N_QUBITS)
        rounds = []
        for r in range(n_rounds):
            fault = inject[1:] if inject is not None and inject[0] == r else None
            sl = angles[:, r * TICKS_PER_ROUND : (r + 1) * TICKS_PER_ROUND]
            rounds.append(self.run_syndrome_round(state, sl, rng, pending, fault))
        self._flush(state, pending, range(N_QUBITS))
        rounds.append(self.perfect_syndrome(state, rng))
        correction = self.decode(SyndromeRecord(rounds=rounds))
        self.apply_correction(state, correction)
        return self.logical_fidelity(state, alpha, beta)

    # -- documentation ----------------------------------------------------------

    def layout_dump(self) -> str:
        lines = ["rotated surface code, distance 3", "", "data qubits (row, col):"]
        for q, (r, c) in enumerate(DATA_COORDS):
            lines.append(f"  d{q}: ({r}, {c})")
        lines.append("")
        lines.append("stabilizers (ancilla: type support):")
        for i, s in enumerate(X_STABILIZERS):
            lines.append(f"  a{X_ANCILLAS[i]}: X {list(s)}")
        for i, s in enumerate(Z_STABILIZERS):
            lines.append(f"  a{Z_ANCILLAS[i]}: Z {list(s)}")
        lines.append("")
        lines.append(f"logical X: {list(LOGICAL_X)}    logical Z: {list(LOGICAL_Z)}")
        lines.append("")
        lines.append("round schedule (6 ticks):")
        lines.append(f"  tick 0: Ry(+pi/4) on X ancillas {list(X_ANCILLAS)}")
        for layer, cnots in enumerate(CNOT_LAYERS):
            gates = " ".join(f"CX({c}->{t})" for c, t in cnots)
            lines.append(f"  tick {layer + 1}: {gates}")
        lines.append(f"  tick 5: Ry(-pi/4) on X ancillas {list(X_ANCILLAS)}")
        lines.append("  then: measure ancillas 9..16 in Z basis, reset to |0>")
        return "\n".join(lines)
