"""Dense state-vector simulation kernel for up to 20 qubits.

Amplitudes are a single contiguous complex128 array in little-endian qubit
order: qubit 0 is the least significant bit of the basis-state index.  Gates
are applied in place with blocked stride iteration; nothing ever
materializes a 2^n x 2^n matrix.  The numba kernels below view the
amplitude buffer as (groups, 2, block) so the inner loops stay contiguous
and vectorize.
"""

from __future__ import annotations

import math

import numba
import numpy as np

MAX_QUBITS = 20

_PAULI_CHARS = frozenset("IXYZ")


class ContractViolation(ValueError):
    """A gate argument breaks its contract (e.g. a non-unitary matrix)."""


class DomainError(ValueError):
    """An argument is outside the operation's domain."""


class ProjectionError(RuntimeError):
    """Projection onto a (near-)zero-probability subspace."""


class MeasurementError(RuntimeError):
    """Born sampling selected a branch with vanishing probability."""


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True, fastmath=True)
def _rot_pass(v, c, s):
    # v: float64 view (groups, 2, block); real rotation mixing bit=0/bit=1
    G, _, B = v.shape
    for g in range(G):
        for j in range(B):
            x = v[g, 0, j]
            y = v[g, 1, j]
            v[g, 0, j] = c * x - s * y
            v[g, 1, j] = s * x + c * y


@numba.njit(cache=True, fastmath=True)
def _rot4_pass(v, cq, sq, cp, sp):
    # v: float64 view (G, 2, A, 2, B); two Y rotations (qubit q then p, q > p)
    # fused into one traversal
    G, _, A, _, B = v.shape
    for g in range(G):
        for a in range(A):
            for j in range(B):
                x00 = v[g, 0, a, 0, j]
                x01 = v[g, 0, a, 1, j]
                x10 = v[g, 1, a, 0, j]
                x11 = v[g, 1, a, 1, j]
                t00 = cp * x00 - sp * x01
                t01 = sp * x00 + cp * x01
                t10 = cp * x10 - sp * x11
                t11 = sp * x10 + cp * x11
                v[g, 0, a, 0, j] = cq * t00 - sq * t10
                v[g, 0, a, 1, j] = cq * t01 - sq * t11
                v[g, 1, a, 0, j] = sq * t00 + cq * t10
                v[g, 1, a, 1, j] = sq * t01 + cq * t11


@numba.njit(cache=True, fastmath=True)
def _rot_prob_pass(v, c, s):
    # rotate, then return the probability of bit = 0, in one traversal
    G, _, B = v.shape
    acc = 0.0
    for g in range(G):
        for j in range(B):
            x = v[g, 0, j]
            y = v[g, 1, j]
            x2 = c * x - s * y
            v[g, 0, j] = x2
            v[g, 1, j] = s * x + c * y
            acc += x2 * x2
    return acc


@numba.njit(cache=True, fastmath=True)
def _u2_pass(v, u00, u01, u10, u11):
    # v: complex128 view (groups, 2, block); general 2x2
    G, _, B = v.shape
    for g in range(G):
        for j in range(B):
            a = v[g, 0, j]
            b = v[g, 1, j]
            v[g, 0, j] = u00 * a + u01 * b
            v[g, 1, j] = u10 * a + u11 * b


@numba.njit(cache=True, fastmath=True)
def _cnot_pass(amp, cbit, tbit):
    # swap target pairs on the control=1 half
    if cbit < tbit:
        blo, bhi = cbit, tbit
    else:
        blo, bhi = tbit, cbit
    lo = 1 << blo
    hi = 1 << bhi
    n = amp.shape[0]
    for outer in range(0, n, hi << 1):
        for mid in range(0, hi, lo << 1):
            base = outer + mid
            if cbit > tbit:
                # pair (c=1,t=0) <-> (c=1,t=1): both in the hi=1 half
                a0 = base + hi
                a1 = base + hi + lo
            else:
                # control is the low bit: pair (c=1,t=0) <-> (c=1,t=1)
                a0 = base + lo
                a1 = base + lo + hi
            for j in range(lo):
                tmp = amp[a0 + j]
                amp[a0 + j] = amp[a1 + j]
                amp[a1 + j] = tmp


@numba.njit(cache=True, fastmath=True)
def _prob_bit0_pass(v):
    # v: float64 view (groups, 2, block); probability of bit = 0
    G, _, B = v.shape
    acc = 0.0
    for g in range(G):
        for j in range(B):
            x = v[g, 0, j]
            acc += x * x
    return acc


@numba.njit(cache=True, fastmath=True)
def _project_bit_pass(v, keep, scale, reset):
    # collapse onto bit=keep; optionally move the surviving branch to bit 0
    G, _, B = v.shape
    drop = 1 - keep
    for g in range(G):
        for j in range(B):
            x = v[g, keep, j] * scale
            if reset == 1:
                v[g, 0, j] = x
                v[g, 1, j] = 0.0
            else:
                v[g, keep, j] = x
                v[g, drop, j] = 0.0


@numba.njit(cache=True, fastmath=True)
def _scale_pass(amp, scale):
    for i in range(amp.shape[0]):
        amp[i] *= scale


@numba.njit(cache=True, fastmath=True)
def _prob_signed_pass(amp, table):
    # probability accumulated over indices with table[i] == +1
    acc = 0.0
    for i in range(amp.shape[0]):
        if table[i] > 0:
            a = amp[i]
            acc += a.real * a.real + a.imag * a.imag
    return acc


@numba.njit(cache=True, fastmath=True)
def _project_signed_pass(amp, table, keep, scale):
    for i in range(amp.shape[0]):
        if table[i] == keep:
            amp[i] *= scale
        else:
            amp[i] = 0.0


@numba.njit(cache=True, fastmath=True)
def _x_string_expectation_pass(amp, xmask, pivot):
    # <psi| X-string |psi> = sum over pivot=0 indices of 2*Re(conj(a_i) a_{i^xmask})
    half = amp.shape[0] >> 1
    low = (1 << pivot) - 1
    acc = 0.0
    for k in range(half):
        i0 = ((k >> pivot) << (pivot + 1)) | (k & low)
        i1 = i0 ^ xmask
        a = amp[i0]
        b = amp[i1]
        acc += a.real * b.real + a.imag * b.imag
    return 2.0 * acc


@numba.njit(cache=True, fastmath=True)
def _project_x_string_pass(amp, xmask, pivot, sign, scale):
    # amp <- scale * (amp + sign * X-string amp) / 2
    half = amp.shape[0] >> 1
    low = (1 << pivot) - 1
    h = 0.5 * scale
    for k in range(half):
        i0 = ((k >> pivot) << (pivot + 1)) | (k & low)
        i1 = i0 ^ xmask
        a = amp[i0]
        b = amp[i1]
        amp[i0] = h * (a + sign * b)
        amp[i1] = h * (b + sign * a)


@numba.njit(cache=True, fastmath=True)
def _apply_x_string_pass(amp, xmask, pivot):
    half = amp.shape[0] >> 1
    low = (1 << pivot) - 1
    for k in range(half):
        i0 = ((k >> pivot) << (pivot + 1)) | (k & low)
        i1 = i0 ^ xmask
        tmp = amp[i0]
        amp[i0] = amp[i1]
        amp[i1] = tmp


@numba.njit(cache=True, fastmath=True)
def _apply_sign_mask_pass(amp, mask):
    # amp[i] *= (-1)^popcount(i & mask)
    for i in range(amp.shape[0]):
        x = i & mask
        x ^= x >> 16
        x ^= x >> 8
        x ^= x >> 4
        x ^= x >> 2
        x ^= x >> 1
        if x & 1:
            amp[i] = -amp[i]


@numba.njit(cache=True, fastmath=True)
def _pauli_project_pass(amp, xmask, sign_mask, phase, pivot, sign, want_prob):
    # amp <- (amp + sign * P amp)/2 for a general Pauli string P; returns the
    # squared norm afterwards.  (P amp)(x) = phase * (-1)^par(x') * amp[x'],
    # x' = x ^ xmask.  For xmask == 0 the pairing degenerates to a sign mask.
    norm = 0.0
    if xmask == 0:
        for i in range(amp.shape[0]):
            x = i & sign_mask
            x ^= x >> 16
            x ^= x >> 8
            x ^= x >> 4
            x ^= x >> 2
            x ^= x >> 1
            par = -1.0 if x & 1 else 1.0
            a = 0.5 * (amp[i] + sign * phase * par * amp[i])
            amp[i] = a
            if want_prob:
                norm += a.real * a.real + a.imag * a.imag
        return norm
    half = amp.shape[0] >> 1
    low = (1 << pivot) - 1
    for k in range(half):
        i0 = ((k >> pivot) << (pivot + 1)) | (k & low)
        i1 = i0 ^ xmask
        x = i0 & sign_mask
        x ^= x >> 16
        x ^= x >> 8
        x ^= x >> 4
        x ^= x >> 2
        x ^= x >> 1
        par0 = -1.0 if x & 1 else 1.0
        x = i1 & sign_mask
        x ^= x >> 16
        x ^= x >> 8
        x ^= x >> 4
        x ^= x >> 2
        x ^= x >> 1
        par1 = -1.0 if x & 1 else 1.0
        a = amp[i0]
        b = amp[i1]
        na = 0.5 * (a + sign * phase * par1 * b)
        nb = 0.5 * (b + sign * phase * par0 * a)
        amp[i0] = na
        amp[i1] = nb
        if want_prob:
            norm += na.real * na.real + na.imag * na.imag
            norm += nb.real * nb.real + nb.imag * nb.imag
    return norm


@numba.njit(cache=True, fastmath=True)
def _lincomb_pass(f, v0, v1, c0, c1r, c1i):
    # f: float64 view of the output; out = c0 * v0 + (c1r + i c1i) * v1
    for i in range(v0.shape[0]):
        f[2 * i] = c0 * v0[i] + c1r * v1[i]
        f[2 * i + 1] = c1i * v1[i]


@numba.njit(cache=True, fastmath=True)
def _real_dots_pass(amp, v0, v1):
    # (<v0|psi>, <v1|psi>) for real v0, v1
    r0 = 0.0
    i0 = 0.0
    r1 = 0.0
    i1 = 0.0
    for i in range(amp.shape[0]):
        a = amp[i]
        r0 += v0[i] * a.real
        i0 += v0[i] * a.imag
        r1 += v1[i] * a.real
        i1 += v1[i] * a.imag
    return r0, i0, r1, i1


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def parse_pauli(pauli: str, n_qubits: int) -> tuple[int, int, int]:
    """Parse an n-character IXYZ string (index i = qubit i) into
    (xmask, sign_mask, n_y); sign_mask collects Z and Y positions."""
    if len(pauli) != n_qubits:
        raise DomainError(f"pauli string length {len(pauli)} != {n_qubits} qubits")
    if not set(pauli) <= _PAULI_CHARS:
        raise DomainError(f"invalid pauli string {pauli!r}")
    xmask = 0
    sign_mask = 0
    n_y = 0
    for q, ch in enumerate(pauli):
        if ch in ("X", "Y"):
            xmask |= 1 << q
        if ch in ("Z", "Y"):
            sign_mask |= 1 << q
        if ch == "Y":
            n_y += 1
    return xmask, sign_mask, n_y


class StateVector:
    """2^n complex amplitudes with little-endian qubit indexing."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        if not (1 <= n_qubits <= MAX_QUBITS):
            raise DomainError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
        self.n_qubits = n_qubits
        dim = 1 << n_qubits
        if amplitudes is None:
            self.amp = np.zeros(dim, dtype=np.complex128)
            self.amp[0] = 1.0
        else:
            amp = np.ascontiguousarray(amplitudes, dtype=np.complex128)
            if amp.shape != (dim,):
                raise DomainError(f"expected {dim} amplitudes, got shape {amp.shape}")
            norm = np.vdot(amp, amp).real
            if abs(norm - 1.0) > 1e-8:
                raise DomainError(f"amplitudes not normalized: |psi|^2 = {norm}")
            self.amp = amp

    def copy(self) -> "StateVector":
        other = object.__new__(StateVector)
        other.n_qubits = self.n_qubits
        other.amp = self.amp.copy()
        return other

    def norm_sq(self) -> float:
        return float(np.vdot(self.amp, self.amp).real)

    def _check_qubit(self, qubit: int):
        if not (0 <= qubit < self.n_qubits):
            raise DomainError(f"qubit {qubit} out of range for {self.n_qubits} qubits")

    def _rot_view(self, qubit: int):
        b = 1 << (qubit + 1)
        return self.amp.view(np.float64).reshape(-1, 2, b)

    # -- gates ------------------------------------------------------------

    def apply_1q(self, qubit: int, u: np.ndarray) -> "StateVector":
        """Apply a 2x2 unitary to one qubit (in place)."""
        self._check_qubit(qubit)
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (2, 2):
            raise ContractViolation(f"expected a 2x2 matrix, got shape {u.shape}")
        dev = np.abs(u @ u.conj().T - np.eye(2)).max()
        if dev > 1e-12:
            raise ContractViolation(f"matrix is not unitary (deviation {dev:.2e})")
        view = self.amp.reshape(-1, 2, 1 << qubit)
        _u2_pass(view, u[0, 0], u[0, 1], u[1, 0], u[1, 1])
        return self

    def rotate_y(self, qubit: int, theta: float) -> "StateVector":
        """Apply exp(-i theta sigma_y): the full angle sits in the exponent,
        so a lone gate flips a basis state with probability sin^2(theta)."""
        self._check_qubit(qubit)
        if not math.isfinite(theta):
            raise DomainError(f"rotation angle must be finite, got {theta}")
        if theta != 0.0:
            _rot_pass(self._rot_view(qubit), math.cos(theta), math.sin(theta))
        return self

    def apply_cnot(self, control: int, target: int) -> "StateVector":
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise DomainError("control and target must differ")
        _cnot_pass(self.amp, control, target)
        return self

    def apply_pauli_string(self, pauli: str) -> "StateVector":
        """Apply a Pauli string (X/Z masks plus the i^n_y phase)."""
        xmask, sign_mask, n_y = parse_pauli(pauli, self.n_qubits)
        if sign_mask:
            _apply_sign_mask_pass(self.amp, sign_mask)
        if xmask:
            _apply_x_string_pass(self.amp, xmask, _lowest_bit(xmask))
        if n_y % 4:
            self.amp *= 1j ** (n_y % 4)
        return self

    # -- measurement and projection ---------------------------------------

    def prob_bit0(self, qubit: int) -> float:
        self._check_qubit(qubit)
        return _prob_bit0_pass(self._rot_view(qubit))

    def measure_z(self, qubit: int, rng: np.random.Generator) -> int:
        """Born-rule Z measurement; returns +1 (|0>) or -1 (|1>) and
        collapses the state."""
        p0 = self.prob_bit0(qubit)
        u = rng.random()
        bit = 0 if u < p0 else 1
        p = p0 if bit == 0 else 1.0 - p0
        if p < 1e-15:
            raise MeasurementError(f"selected branch has probability {p:.3e}")
        _project_bit_pass(self._rot_view(qubit), bit, 1.0 / math.sqrt(p), 0)
        return 1 - 2 * bit

    def measure_z_reset(self, qubit: int, rng: np.random.Generator) -> int:
        """measure_z followed by reset to |0>, fused into one pass."""
        p0 = self.prob_bit0(qubit)
        u = rng.random()
        bit = 0 if u < p0 else 1
        p = p0 if bit == 0 else 1.0 - p0
        if p < 1e-15:
            raise MeasurementError(f"selected branch has probability {p:.3e}")
        _project_bit_pass(self._rot_view(qubit), bit, 1.0 / math.sqrt(p), 1 if bit else 0)
        return 1 - 2 * bit

    def project_pauli(self, pauli: str, sign: int) -> float:
        """Project onto the sign eigenspace of a Pauli string via
        (I + sign P)/2, renormalize, and return the pre-normalization
        squared norm (the Born probability of that outcome)."""
        if sign not in (-1, 1):
            raise DomainError(f"sign must be +-1, got {sign}")
        xmask, sign_mask, n_y = parse_pauli(pauli, self.n_qubits)
        phase = 1j ** (n_y % 4)
        pivot = _lowest_bit(xmask) if xmask else 0
        prob = _pauli_project_pass(self.amp, xmask, sign_mask, phase, pivot, float(sign), 1)
        if prob < 1e-15:
            raise ProjectionError(f"projection probability {prob:.3e} below guard")
        _scale_pass(self.amp, 1.0 / math.sqrt(prob))
        return float(prob)

    def pauli_expectation(self, pauli: str) -> float:
        """<psi|P|psi> for a Hermitian Pauli string (computed via a copy)."""
        probe = self.copy()
        xmask, sign_mask, n_y = parse_pauli(pauli, self.n_qubits)
        phase = 1j ** (n_y % 4)
        pivot = _lowest_bit(xmask) if xmask else 0
        prob = _pauli_project_pass(probe.amp, xmask, sign_mask, phase, pivot, 1.0, 1)
        return float(2.0 * prob - 1.0)

    # -- overlaps ----------------------------------------------------------

    def overlap_sq(self, other: "StateVector") -> float:
        if self.n_qubits != other.n_qubits:
            raise DomainError("states have different qubit counts")
        return float(abs(np.vdot(self.amp, other.amp)) ** 2)
