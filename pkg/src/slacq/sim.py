"""Named-register statevector simulator with gate tallies.

Registers are declared in order of increasing significance: the first register
in a :class:`RegisterLayout` occupies the least significant bits of the basis
index.  A basis index ``i`` therefore decodes as ``value(r) = (i >> offset(r))
& (2**width(r) - 1)``.  Amplitude arrays are flat ``complex128`` of length
``2**total``; layouts beyond 26 qubits are refused.

Arithmetic (modular adds, comparators, generic reversible maps) is applied as
vectorized basis permutations rather than gate by gate; each such call adds an
*analytic* gate-count contribution to the running tally (see
:class:`GateTally`), which is the package-wide convention for costing
arithmetic.  Elementary gates are simulated directly and tally themselves.

Tally conventions:

* ``x`` with 0/1/2 controls counts as ``clifford1``/``cx``/``toffoli``.
* ``h``, ``z``, ``s``, ``sdg`` uncontrolled count as ``clifford1``; with one
  control they count as ``rotation`` (controlled-phase class).
* ``ry``, ``rz``, ``phase`` count as ``rotation`` (with or without a control).
* More deeply controlled gates must be decomposed explicitly (the builders in
  this package lower them to Toffoli ladders over ancillas).
* Whole-register QFTs count once in ``qft``.
* ``ancilla`` is a workspace high-water mark, combined with ``max``.

Modular-adder analytic costs (documented convention, used consistently):
a controlled constant add on ``w`` bits books ``2w`` Toffoli + ``w`` CX;
a register-into-register modular add books ``4w`` Toffoli + ``w + 1`` CX.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

MAX_QUBITS = 26

BitRef = tuple[str, int]  # (register name, bit index inside the register)
ControlSpec = tuple[BitRef, int]  # (bit, required value 0 or 1)


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers; first entry is least significant."""

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [n for n, _ in self.registers]
        if len(set(names)) != len(names):
            raise LayoutError(f"duplicate register names in {names}")
        for name, width in self.registers:
            if width < 1:
                raise LayoutError(f"register {name!r} has width {width}")
        if self.total > MAX_QUBITS:
            raise LayoutError(
                f"layout has {self.total} qubits, cap is {MAX_QUBITS}"
            )

    @property
    def total(self) -> int:
        return sum(w for _, w in self.registers)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.registers)

    def width(self, name: str) -> int:
        for n, w in self.registers:
            if n == name:
                return w
        raise LayoutError(f"no register {name!r}")

    def offset(self, name: str) -> int:
        off = 0
        for n, w in self.registers:
            if n == name:
                return off
            off += w
        raise LayoutError(f"no register {name!r}")

    def has(self, name: str) -> bool:
        return any(n == name for n, _ in self.registers)

    def bit(self, ref: BitRef) -> int:
        """Global bit position of (register, k)."""
        name, k = ref
        w = self.width(name)
        if not 0 <= k < w:
            raise LayoutError(f"bit {k} outside register {name!r} of width {w}")
        return self.offset(name) + k

    def index_for(self, **values: int) -> int:
        """Basis index with the given register values (others zero)."""
        idx = 0
        for name, v in values.items():
            w = self.width(name)
            if not 0 <= v < (1 << w):
                raise LayoutError(f"value {v} does not fit register {name!r}")
            idx |= v << self.offset(name)
        return idx

    def value_of(self, index: int, name: str) -> int:
        return (index >> self.offset(name)) & ((1 << self.width(name)) - 1)

    def without(self, names: Sequence[str]) -> "RegisterLayout":
        gone = set(names)
        return RegisterLayout(tuple(r for r in self.registers if r[0] not in gone))


@dataclass
class GateTally:
    """Gate counts by class; see the module docstring for the conventions."""

    toffoli: int = 0
    cx: int = 0
    clifford1: int = 0
    rotation: int = 0
    qft: int = 0
    ancilla: int = 0

    def __add__(self, other: "GateTally") -> "GateTally":
        return GateTally(
            self.toffoli + other.toffoli,
            self.cx + other.cx,
            self.clifford1 + other.clifford1,
            self.rotation + other.rotation,
            self.qft + other.qft,
            max(self.ancilla, other.ancilla),
        )

    def add_(self, other: "GateTally") -> None:
        self.toffoli += other.toffoli
        self.cx += other.cx
        self.clifford1 += other.clifford1
        self.rotation += other.rotation
        self.qft += other.qft
        self.ancilla = max(self.ancilla, other.ancilla)

    def total_gates(self) -> int:
        """Total elementary gate count (QFT calls and ancillas excluded)."""
        return self.toffoli + self.cx + self.clifford1 + self.rotation

    def as_dict(self) -> dict[str, int]:
        return {
            "toffoli": self.toffoli,
            "cx": self.cx,
            "clifford1": self.clifford1,
            "rotation": self.rotation,
            "qft": self.qft,
            "ancilla": self.ancilla,
        }


@dataclass
class Statevector:
    layout: RegisterLayout
    amps: np.ndarray = field(repr=False)
    tally: GateTally = field(default_factory=GateTally)

    def __post_init__(self) -> None:
        want = 1 << self.layout.total
        if self.amps.shape != (want,):
            raise LayoutError(
                f"amplitude vector has shape {self.amps.shape}, want ({want},)"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "Statevector":
        return Statevector(self.layout, self.amps.copy(), replace(self.tally))

    def amplitude(self, **values: int) -> complex:
        return complex(self.amps[self.layout.index_for(**values)])


def zero_state(layout: RegisterLayout) -> Statevector:
    amps = np.zeros(1 << layout.total, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(layout, amps)


def basis_state(layout: RegisterLayout, **values: int) -> Statevector:
    amps = np.zeros(1 << layout.total, dtype=np.complex128)
    amps[layout.index_for(**values)] = 1.0
    return Statevector(layout, amps)


def inner(a: Statevector, b: Statevector) -> complex:
    return complex(np.vdot(a.amps, b.amps))


# --- elementary gates ------------------------------------------------------

_SQ = 1.0 / math.sqrt(2.0)


def _gate_matrix(kind: str, angle: float | None) -> np.ndarray:
    if kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if kind == "h":
        return np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=np.complex128)
    if kind == "z":
        return np.diag([1.0, -1.0]).astype(np.complex128)
    if kind == "s":
        return np.diag([1.0, 1j]).astype(np.complex128)
    if kind == "sdg":
        return np.diag([1.0, -1j]).astype(np.complex128)
    if angle is None:
        raise ValueError(f"gate {kind!r} needs an angle")
    if kind == "ry":
        c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "rz":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind == "phase":
        return np.diag([1.0, np.exp(1j * angle)]).astype(np.complex128)
    raise ValueError(f"unknown gate kind {kind!r}")


def _tally_gate(tally: GateTally, kind: str, n_controls: int) -> None:
    if kind == "x":
        if n_controls == 0:
            tally.clifford1 += 1
        elif n_controls == 1:
            tally.cx += 1
        elif n_controls == 2:
            tally.toffoli += 1
        else:
            raise ValueError("decompose X gates with >2 controls explicitly")
    elif kind in ("h", "z", "s", "sdg"):
        if n_controls == 0:
            tally.clifford1 += 1
        elif n_controls == 1:
            tally.rotation += 1
        else:
            raise ValueError(f"decompose {kind!r} with >1 control explicitly")
    elif kind in ("ry", "rz", "phase"):
        if n_controls <= 1:
            tally.rotation += 1
        else:
            raise ValueError(f"decompose {kind!r} with >1 control explicitly")
    else:
        raise ValueError(f"unknown gate kind {kind!r}")


def apply_gate(
    state: Statevector,
    kind: str,
    target: BitRef,
    controls: Sequence[ControlSpec] = (),
    angle: float | None = None,
) -> None:
    """Apply a single-qubit gate, optionally controlled on other bits."""
    lay = state.layout
    T = lay.total
    tbit = lay.bit(target)
    g = _gate_matrix(kind, angle)
    view = state.amps.reshape((2,) * T)
    idx: list = [slice(None)] * T
    for ref, pol in controls:
        cbit = lay.bit(ref)
        if cbit == tbit:
            raise LayoutError("control collides with target")
        if pol not in (0, 1):
            raise ValueError("control polarity must be 0 or 1")
        idx[T - 1 - cbit] = pol
    ax = T - 1 - tbit
    i0, i1 = list(idx), list(idx)
    i0[ax] = 0
    i1[ax] = 1
    i0t, i1t = tuple(i0), tuple(i1)
    a0 = view[i0t].copy()
    a1 = view[i1t]
    view[i0t] = g[0, 0] * a0 + g[0, 1] * a1
    view[i1t] = g[1, 0] * a0 + g[1, 1] * a1
    _tally_gate(state.tally, kind, len(controls))


def apply_qft(state: Statevector, register: str, inverse: bool = False) -> None:
    """Whole-register QFT with kernel ``exp(+2i pi j q / 2**w)``.

    Two-qubit check: QFT|1> = (1, i, -1, -i)/2.
    """
    lay = state.layout
    w = lay.width(register)
    o = lay.offset(register)
    T = lay.total
    Nw = 1 << w
    j = np.arange(Nw)
    F = np.exp(2j * math.pi * np.outer(j, j) / Nw) / math.sqrt(Nw)
    if inverse:
        F = F.conj().T
    high = 1 << (T - o - w)
    low = 1 << o
    cube = state.amps.reshape(high, Nw, low)
    state.amps = np.einsum("qj,hjl->hql", F, cube).reshape(-1)
    state.tally.qft += 1


# --- vectorized classical maps ---------------------------------------------


def _control_mask_fn(lay: RegisterLayout, controls: Sequence[ControlSpec]):
    bits = [(lay.bit(ref), pol) for ref, pol in controls]

    def sat(indices: np.ndarray) -> np.ndarray:
        ok = np.ones(indices.shape, dtype=bool)
        for b, pol in bits:
            ok &= ((indices >> b) & 1) == pol
        return ok

    return sat


def _apply_classical_map(
    state: Statevector,
    regs: Sequence[str],
    fn: Callable[..., tuple[np.ndarray, ...]],
    controls: Sequence[ControlSpec] = (),
) -> None:
    """Permute basis states: values of ``regs`` become ``fn(*values)``.

    ``fn`` receives one integer array per register and must return the same
    number of arrays forming a bijection on the joint value space.  Control
    bits must lie outside the mapped registers.
    """
    lay = state.layout
    T = lay.total
    reg_bits: list[int] = []
    positions: dict[str, tuple[int, int]] = {}
    pos = 0
    for r in regs:
        w = lay.width(r)
        o = lay.offset(r)
        positions[r] = (pos, w)
        reg_bits.extend(range(o, o + w))
        pos += w
    ctrl_bits = [lay.bit(ref) for ref, _ in controls]
    if set(ctrl_bits) & set(reg_bits):
        raise LayoutError("controls overlap mapped registers")
    joint_bits = reg_bits + ctrl_bits
    K = len(joint_bits)
    axes = [T - 1 - b for b in joint_bits]
    # joint bit p lives at moved-axis position K-1-p counted from the block start
    dest = list(range(T - K, T))
    moved = np.moveaxis(state.amps.reshape((2,) * T), axes[::-1], dest)
    work = np.ascontiguousarray(moved).reshape(-1, 1 << K)

    j = np.arange(1 << K, dtype=np.int64)
    vals = [(j >> positions[r][0]) & ((1 << positions[r][1]) - 1) for r in regs]
    out = fn(*[v.copy() for v in vals])
    if len(out) != len(regs):
        raise ValueError("fn must return one array per register")
    new_j = j & ~sum(((1 << positions[r][1]) - 1) << positions[r][0] for r in regs)
    for r, nv in zip(regs, out):
        p0, w = positions[r]
        nv = np.asarray(nv, dtype=np.int64) & ((1 << w) - 1)
        new_j = new_j | (nv << p0)
    if controls:
        sat = np.ones(j.shape, dtype=bool)
        for cpos, (_, pol) in zip(range(len(reg_bits), K), controls):
            sat &= ((j >> cpos) & 1) == pol
        new_j = np.where(sat, new_j, j)
    if len(np.unique(new_j)) != new_j.size:
        raise ValueError("classical map is not a bijection")

    res = np.empty_like(work)
    res[:, new_j] = work
    back = np.moveaxis(res.reshape(moved.shape), dest, axes[::-1])
    state.amps = np.ascontiguousarray(back).reshape(-1)


def apply_modular_add_const(
    state: Statevector,
    register: str,
    constant: int,
    controls: Sequence[ControlSpec] = (),
) -> None:
    """``|x> -> |(x + constant) mod 2**w>``, optionally controlled."""
    lay = state.layout
    w = lay.width(register)
    c = constant % (1 << w)
    if c == 0:
        return
    if not controls:
        o = lay.offset(register)
        T = lay.total
        cube = state.amps.reshape(1 << (T - o - w), 1 << w, 1 << o)
        state.amps = np.roll(cube, c, axis=1).reshape(-1)
    else:
        _apply_classical_map(
            state, [register], lambda x: ((x + c) % (1 << w),), controls
        )
    state.tally.add_(GateTally(toffoli=2 * w, cx=w))


def apply_modular_add_register(
    state: Statevector,
    target: str,
    source: str,
    sign: int = 1,
    controls: Sequence[ControlSpec] = (),
) -> None:
    """``|t>|s> -> |(t + sign*s) mod 2**w>|s>``, optionally controlled."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    w = state.layout.width(target)

    def fn(t: np.ndarray, s: np.ndarray):
        return ((t + sign * s) % (1 << w), s)

    _apply_classical_map(state, [target, source], fn, controls)
    state.tally.add_(GateTally(toffoli=4 * w, cx=w + 1))


def apply_controlled_swap(
    state: Statevector, reg_a: str, reg_b: str, control: BitRef
) -> None:
    """Fredkin on two equal-width registers, one positive control bit."""
    wa = state.layout.width(reg_a)
    if wa != state.layout.width(reg_b):
        raise LayoutError("swap registers must have equal width")

    def fn(a: np.ndarray, b: np.ndarray):
        return (b, a)

    _apply_classical_map(state, [reg_a, reg_b], fn, controls=[(control, 1)])
    state.tally.add_(GateTally(toffoli=wa, cx=2 * wa))


def _fast_flag_path_ok(
    lay: RegisterLayout,
    in_registers: Sequence[str],
    out: str,
    controls: Sequence[ControlSpec],
) -> bool:
    if lay.width(out) != 1:
        return False
    if lay.offset(out) != lay.total - 1:
        return False
    top = lay.offset(out)
    for r in in_registers:
        if lay.offset(r) + lay.width(r) > top:
            return False
    return all(lay.bit(ref) < top for ref, _ in controls)


_CHUNK = 1 << 22


def apply_reversible_function(
    state: Statevector,
    in_registers: Sequence[str],
    out: str,
    fn: Callable[..., np.ndarray],
    controls: Sequence[ControlSpec] = (),
    cost: GateTally | None = None,
) -> None:
    """``|x>|b> -> |x>|b XOR fn(x)>`` over named registers.

    ``fn`` receives one integer array per input register and returns the XOR
    payload (boolean array for a one-bit ``out``).  ``cost`` is the analytic
    tally contribution of the implied circuit; when a flag sits on top of the
    layout the amplitude swap runs in fixed-size chunks so statevectors near
    the qubit cap never need index arrays of their own size.
    """
    lay = state.layout
    if out in in_registers:
        raise LayoutError("out register cannot also be an input")
    if _fast_flag_path_ok(lay, in_registers, out, controls):
        sat = _control_mask_fn(lay, controls)
        offsets = [(lay.offset(r), (1 << lay.width(r)) - 1) for r in in_registers]
        half = state.amps.reshape(2, -1)
        L = half.shape[1]
        for start in range(0, L, _CHUNK):
            cols = np.arange(start, min(start + _CHUNK, L), dtype=np.int64)
            vals = [(cols >> o) & m for o, m in offsets]
            flip = np.asarray(fn(*vals), dtype=bool)
            if controls:
                flip &= sat(cols)
            sel = cols[flip]
            tmp = half[0, sel].copy()
            half[0, sel] = half[1, sel]
            half[1, sel] = tmp
    else:
        wout = lay.width(out)

        def mapped(*vals: np.ndarray):
            ins = vals[:-1]
            b = vals[-1]
            payload = np.asarray(fn(*ins)).astype(np.int64) & ((1 << wout) - 1)
            return (*ins, b ^ payload)

        _apply_classical_map(state, [*in_registers, out], mapped, controls)
    if cost is not None:
        state.tally.add_(cost)


def apply_dense_unitary(
    state: Statevector,
    register: str,
    matrix: np.ndarray,
    cost: GateTally | None = None,
) -> None:
    """Apply an explicit unitary to one named register (an oracle gate)."""
    lay = state.layout
    w = lay.width(register)
    Nw = 1 << w
    if matrix.shape != (Nw, Nw):
        raise LayoutError(f"matrix shape {matrix.shape} does not fit register")
    o = lay.offset(register)
    T = lay.total
    cube = state.amps.reshape(1 << (T - o - w), Nw, 1 << o)
    state.amps = np.einsum("qj,hjl->hql", matrix, cube).reshape(-1)
    if cost is not None:
        state.tally.add_(cost)


def project_and_extract(
    state: Statevector, assignment: dict[str, int]
) -> tuple[float, Statevector]:
    """Project named registers onto basis values; return (probability, rest).

    The remaining registers keep their order.  A zero-probability projection
    returns probability 0 and the zero vector (not an exception).
    """
    lay = state.layout
    T = lay.total
    idx: list = [slice(None)] * T
    for name, v in assignment.items():
        w = lay.width(name)
        o = lay.offset(name)
        if not 0 <= v < (1 << w):
            raise LayoutError(f"value {v} does not fit register {name!r}")
        for k in range(w):
            idx[T - 1 - (o + k)] = (v >> k) & 1
    sub = state.amps.reshape((2,) * T)[tuple(idx)].copy().reshape(-1)
    rest = lay.without(list(assignment))
    prob = float(np.sum(np.abs(sub) ** 2))
    if prob > 0.0:
        sub = sub / math.sqrt(prob)
    return prob, Statevector(rest, sub, replace(state.tally))


# --- inequality-test costs -------------------------------------------------


def inequality_cost_components(n: int, n_ref: int, order: int) -> dict[str, int]:
    """Toffoli counts per arithmetic stage of the acceptance comparator.

    Order 2 compares ``m * j**2 >= 2**(2 mu) * M`` via an out-of-place squarer,
    a multiplier into the comparison accumulator, and a final threshold
    comparator; order 1 needs no squarer and is reported as a single total.
    """
    if n < 2 or n_ref < 1:
        raise ValueError("need n >= 2 and n_ref >= 1")
    w = n - 1
    if order == 2:
        return {
            "squarer": w * w - w,
            "multiplier": 4 * w * n_ref - n_ref,
            "comparator": 2 * w + n_ref,
        }
    if order == 1:
        return {"total": 2 * w * n_ref + w}
    raise ValueError(f"order must be 1 or 2, got {order}")


def tally_inequality_cost(n: int, n_ref: int, order: int) -> GateTally:
    """Analytic cost of one acceptance-test evaluation.

    Order 2: ``(n-1)^2 + (n-1) + 4(n-1)n_ref`` Toffoli with ``2(n-1) + n_ref``
    ancillas.  Order 1: ``2(n-1)n_ref + (n-1)`` Toffoli with ``(n-1) + n_ref``
    ancillas.
    """
    comps = inequality_cost_components(n, n_ref, order)
    w = n - 1
    if order == 2:
        toffoli = comps["squarer"] + comps["multiplier"] + comps["comparator"]
        ancilla = 2 * w + n_ref
    else:
        toffoli = comps["total"]
        ancilla = w + n_ref
    return GateTally(toffoli=toffoli, ancilla=ancilla)


# --- replayable programs ---------------------------------------------------


@dataclass(frozen=True)
class Gate:
    kind: str
    target: BitRef
    controls: tuple[ControlSpec, ...] = ()
    angle: float | None = None

    def apply(self, state: Statevector) -> None:
        apply_gate(state, self.kind, self.target, self.controls, self.angle)

    def inverted(self) -> "Gate":
        if self.kind in ("x", "h", "z"):
            return self
        if self.kind == "s":
            return replace(self, kind="sdg")
        if self.kind == "sdg":
            return replace(self, kind="s")
        return replace(self, angle=-self.angle)


@dataclass(frozen=True)
class QftStep:
    register: str
    inverse: bool = False

    def apply(self, state: Statevector) -> None:
        apply_qft(state, self.register, self.inverse)

    def inverted(self) -> "QftStep":
        return replace(self, inverse=not self.inverse)


@dataclass(frozen=True)
class AddConst:
    register: str
    constant: int
    controls: tuple[ControlSpec, ...] = ()

    def apply(self, state: Statevector) -> None:
        apply_modular_add_const(state, self.register, self.constant, self.controls)

    def inverted(self) -> "AddConst":
        return replace(self, constant=-self.constant)


@dataclass(frozen=True)
class AddRegister:
    target: str
    source: str
    sign: int = 1
    controls: tuple[ControlSpec, ...] = ()

    def apply(self, state: Statevector) -> None:
        apply_modular_add_register(
            state, self.target, self.source, self.sign, self.controls
        )

    def inverted(self) -> "AddRegister":
        return replace(self, sign=-self.sign)


@dataclass(frozen=True)
class Predicate:
    """Flag/XOR oracle step; self-inverse by construction."""

    in_registers: tuple[str, ...]
    out: str
    fn: Callable[..., np.ndarray] = field(compare=False)
    controls: tuple[ControlSpec, ...] = ()
    cost: GateTally | None = None
    label: str = ""

    def apply(self, state: Statevector) -> None:
        apply_reversible_function(
            state, self.in_registers, self.out, self.fn, self.controls, self.cost
        )

    def inverted(self) -> "Predicate":
        return self


@dataclass(frozen=True)
class CSwap:
    reg_a: str
    reg_b: str
    control: BitRef

    def apply(self, state: Statevector) -> None:
        apply_controlled_swap(state, self.reg_a, self.reg_b, self.control)

    def inverted(self) -> "CSwap":
        return self


@dataclass(frozen=True)
class DenseUnitary:
    register: str
    matrix: np.ndarray = field(compare=False)
    cost: GateTally | None = None
    label: str = ""

    def apply(self, state: Statevector) -> None:
        apply_dense_unitary(state, self.register, self.matrix, self.cost)

    def inverted(self) -> "DenseUnitary":
        return replace(self, matrix=self.matrix.conj().T)


@dataclass(frozen=True)
class Program:
    """A replayable sequence of circuit steps."""

    steps: tuple = ()

    def apply(self, state: Statevector) -> None:
        for step in self.steps:
            step.apply(state)

    def inverted(self) -> "Program":
        return Program(tuple(s.inverted() for s in reversed(self.steps)))

    def then(self, other: "Program") -> "Program":
        return Program(self.steps + other.steps)

    def __len__(self) -> int:
        return len(self.steps)
