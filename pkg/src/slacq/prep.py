"""Inequality-test preparation of the derivative coefficient ladders.

The LCU coefficient profiles (``1/j**2`` for order 2, ``1/j`` for order 1 over
the half-range offsets ``1 <= j < N/2``) are loaded without arithmetic on
amplitudes: a unary ladder selects a dyadic box ``B_mu = {2**mu <= j <
2**(mu+1)}``, Hadamards spread uniformly inside the box, and a strict
comparator against a uniform reference register ``m in [0, M)`` carves the
``1/j**2`` (or ``1/j``) profile out of the box weights by accepting
``m * j**2 < 2**(2 mu) * M`` (``m * j < 2**mu * M``).  Rejected branches raise
a failure flag ``f``; the success branch (``f = 0``) carries the profile up to
an O(1/M) ceiling correction.

Box weights:

* order 2: the ladder halves at every rung, so box ``mu`` carries exactly
  ``2**-(mu+1)`` and the leftover ``2**-(n-1)`` lands on the all-ones rung,
  which is routed to ``f = 1``.  Combined with the initial rotation that puts
  ``pi**2/(pi**2 + 24)`` on the identity branch (``j = 0``), the accepted
  state converges to the ``sqrt(pi**2/3), sqrt(2)/j`` magnitude profile as
  ``M -> infinity`` at every ``n``.
* order 1: rung ``k`` stops with probability ``1/(n-1-k)`` of the mass that
  reaches it, giving every box exactly ``1/(n-1)`` with no leftover.

Register order (least significant first): ``mu, j, d, a, ref, f`` (``a`` only
for order 2).  ``d`` selects the shift direction downstream, ``a`` separates
the order-2 identity branch, ``mu`` ends one-hot at ``mu - 1`` (all-zero for
the first box).  All amplitudes written here are real and nonnegative; signs
and phases belong to the downstream sign/phase stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from slacq.sim import (
    Gate,
    GateTally,
    Predicate,
    Program,
    RegisterLayout,
    Statevector,
    tally_inequality_cost,
    zero_state,
)

PI2 = math.pi**2


def box_of(j: int) -> int:
    """Dyadic box index: ``2**mu <= j < 2**(mu+1)``."""
    if j < 1:
        raise ValueError(f"box index needs j >= 1, got {j}")
    return j.bit_length() - 1


def accept_count(mu: int, j: int, M: int, order: int) -> int:
    """Number of reference values ``m in [0, M)`` the comparator accepts.

    Order 2 accepts ``m * j**2 < 2**(2 mu) * M``; order 1 accepts
    ``m * j < 2**mu * M``; both counts are exact ceilings.
    """
    if M < 1:
        raise ValueError("M must be positive")
    if box_of(j) != mu:
        raise ValueError(f"j={j} lies outside box mu={mu}")
    if order == 2:
        return -((-(1 << (2 * mu)) * M) // (j * j))
    if order == 1:
        return -((-(1 << mu) * M) // j)
    raise ValueError(f"order must be 1 or 2, got {order}")


@dataclass(frozen=True)
class PrepConfig:
    """Sizes and angle schedules for the ladder preparation.

    ``n`` system qubits (``N = 2**n`` sites, ``n >= 3`` so there are at least
    two boxes), ``n_ref`` reference qubits (``M = 2**n_ref >= 4``).
    """

    n: int
    order: int
    n_ref: int | None = None

    def __post_init__(self) -> None:
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.n < 3:
            raise ValueError(f"need n >= 3, got n={self.n}")
        if self.ref_width < 2:
            raise ValueError("need M >= 4 (n_ref >= 2)")

    @property
    def ref_width(self) -> int:
        return self.n if self.n_ref is None else self.n_ref

    @property
    def M(self) -> int:
        return 1 << self.ref_width

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def theta_ini(self) -> float:
        """Half-angle of the identity-branch rotation: tan = sqrt(24/pi^2)."""
        return math.atan(math.sqrt(24.0 / PI2))

    @property
    def ladder_angles(self) -> tuple[float, ...]:
        """Ry angles of the unary box ladder, rung ``k = 0 .. n-2``.

        Order 2 halves at every rung (all ``pi/2``); order 1 uses
        ``2 arccos(1/sqrt(n-1-k))`` so each box receives ``1/(n-1)`` exactly
        (the final rung angle is 0 and is not emitted by the builder).
        """
        if self.order == 2:
            return tuple(math.pi / 2.0 for _ in range(self.n - 1))
        return tuple(
            2.0 * math.acos(1.0 / math.sqrt(self.n - 1 - k))
            for k in range(self.n - 1)
        )


@dataclass
class PrepOutcome:
    """Prepared state, success probability, and the accepted-branch profile.

    ``amplitude_map`` aggregates the success branch (``f = 0``) over the
    reference register: entry ``(mu, j, d)`` holds the root-sum-square
    amplitude of that shift branch (real nonnegative by construction).
    """

    state: Statevector
    success_probability: float
    amplitude_map: dict[tuple[int, int, int], float]


def prep_layout(cfg: PrepConfig) -> RegisterLayout:
    regs: list[tuple[str, int]] = [("mu", cfg.n - 1), ("j", cfg.n - 1), ("d", 1)]
    if cfg.order == 2:
        regs.append(("a", 1))
    regs.extend([("ref", cfg.ref_width), ("f", 1)])
    return RegisterLayout(tuple(regs))


def _box_mapping_steps(cfg: PrepConfig) -> list:
    """Shared j-register wiring: box anchor bits, in-box Hadamards, one-hot."""
    n = cfg.n
    steps: list = []
    for k in range(1, n - 1):
        steps.append(Gate("x", ("j", k), ((("mu", k - 1), 1),)))
        steps.append(Gate("x", ("j", k), ((("mu", k), 1),)))
    for k in range(0, n - 2):
        steps.append(Gate("h", ("j", k), ((("mu", k), 1),)))
    return steps


def _one_hot_cascade(cfg: PrepConfig) -> list:
    # unary 1^mu 0.. -> one-hot at mu-1 (all zero for mu = 0)
    return [
        Gate("x", ("mu", k), ((("mu", k + 1), 1),)) for k in range(0, cfg.n - 2)
    ]


def _ref_spread(cfg: PrepConfig) -> list:
    return [Gate("h", ("ref", k)) for k in range(cfg.ref_width)]


def _mu_from_j(j: np.ndarray) -> np.ndarray:
    # floor(log2 j) for j >= 1, exact via frexp; 0 where j = 0
    mu = np.frexp(np.maximum(j, 1).astype(np.float64))[1] - 1
    return mu.astype(np.int64)


def build_prep_laplacian(cfg: PrepConfig) -> tuple[Program, PrepOutcome]:
    """Order-2 ladder preparation; returns the circuit and its outcome."""
    if cfg.order != 2:
        raise ValueError("config is not order 2")
    n, M = cfg.n, cfg.M
    steps: list = [Gate("ry", ("a", 0), angle=2.0 * cfg.theta_ini)]
    steps.append(Gate("ry", ("mu", 0), ((("a", 0), 1),), math.pi / 2.0))
    for k in range(1, n - 1):
        steps.append(Gate("ry", ("mu", k), ((("mu", k - 1), 1),), math.pi / 2.0))
    steps.append(Gate("x", ("j", 0), ((("a", 0), 1),)))
    steps.append(Gate("x", ("j", 0), ((("mu", 0), 1),)))
    steps.extend(_box_mapping_steps(cfg))
    # overflow rung: box weights below it are exact halves, so route it to f=1
    steps.append(Gate("x", ("f", 0), ((("mu", n - 2), 1),)))
    steps.extend(_one_hot_cascade(cfg))
    steps.extend(_ref_spread(cfg))

    def reject(a: np.ndarray, j: np.ndarray, m: np.ndarray) -> np.ndarray:
        mu = _mu_from_j(j)
        return (a == 1) & (j >= 1) & (m * j * j >= (1 << (2 * mu)) * M)

    steps.append(
        Predicate(
            ("a", "j", "ref"),
            "f",
            reject,
            controls=((("mu", n - 2), 0),),  # overflow rung already failed
            cost=tally_inequality_cost(n, cfg.ref_width, 2),
            label="ladder-compare",
        )
    )
    steps.append(Gate("h", ("d", 0), ((("a", 0), 1),)))
    program = Program(tuple(steps))
    return program, _run(cfg, program)


def build_prep_first_order(cfg: PrepConfig) -> tuple[Program, PrepOutcome]:
    """Order-1 ladder preparation; every rung lands a box, no leftover."""
    if cfg.order != 1:
        raise ValueError("config is not order 1")
    n, M = cfg.n, cfg.M
    angles = cfg.ladder_angles
    steps: list = [Gate("ry", ("mu", 0), angle=angles[0])]
    for k in range(1, n - 1):
        if angles[k] == 0.0:
            continue
        steps.append(Gate("ry", ("mu", k), ((("mu", k - 1), 1),), angles[k]))
    steps.append(Gate("x", ("j", 0)))
    steps.append(Gate("x", ("j", 0), ((("mu", 0), 1),)))
    steps.extend(_box_mapping_steps(cfg))
    steps.extend(_one_hot_cascade(cfg))
    steps.extend(_ref_spread(cfg))

    def reject(j: np.ndarray, m: np.ndarray) -> np.ndarray:
        mu = _mu_from_j(j)
        return (j >= 1) & (m * j >= (1 << mu) * M)

    steps.append(
        Predicate(
            ("j", "ref"),
            "f",
            reject,
            cost=tally_inequality_cost(n, cfg.ref_width, 1),
            label="ladder-compare",
        )
    )
    steps.append(Gate("h", ("d", 0)))
    program = Program(tuple(steps))
    return program, _run(cfg, program)


def _run(cfg: PrepConfig, program: Program) -> PrepOutcome:
    lay = prep_layout(cfg)
    state = zero_state(lay)
    program.apply(state)
    n = cfg.n
    w = n - 1
    if cfg.order == 2:
        # axes: f, ref, a, d, j, mu (most significant first)
        cube = state.amps.reshape(2, cfg.M, 2, 2, 1 << w, 1 << w)
        weights = np.sum(np.abs(cube[0]) ** 2, axis=(0, 3))  # -> [a, d, j]
        weights = weights.sum(axis=0)  # supports of a=0 / a=1 are disjoint in j
    else:
        cube = state.amps.reshape(2, cfg.M, 2, 1 << w, 1 << w)
        weights = np.sum(np.abs(cube[0]) ** 2, axis=(0, 3))  # -> [d, j]
    amplitude_map: dict[tuple[int, int, int], float] = {}
    for d in range(2):
        for j in range(1 << w):
            p = float(weights[d, j])
            if p > 0.0:
                mu = box_of(j) if j >= 1 else 0
                amplitude_map[(mu, j, d)] = math.sqrt(p)
    success = float(np.sum(weights))
    return PrepOutcome(state, success, amplitude_map)


def success_probability_formula(cfg: PrepConfig) -> float:
    """Closed-form success probability via the accepted-count loop."""
    n, M = cfg.n, cfg.M
    if cfg.order == 2:
        p = PI2 / (PI2 + 24.0)
        box_mass = 24.0 / (PI2 + 24.0)
        for mu in range(n - 1):
            for j in range(1 << mu, 1 << (mu + 1)):
                q = accept_count(mu, j, M, 2)
                p += box_mass * 2.0 ** -(mu + 1) * 2.0**-mu * q / M
        return p
    p = 0.0
    for mu in range(n - 1):
        for j in range(1 << mu, 1 << (mu + 1)):
            q = accept_count(mu, j, M, 1)
            p += (1.0 / (n - 1)) * 2.0**-mu * q / M
    return p


def analytic_target(order: int, n: int) -> np.ndarray:
    """Unit vector of root coefficient magnitudes over full offsets ``[0, N)``.

    The ``M -> infinity`` profile the prepared success branch converges to:
    entries proportional to ``sqrt(|c_j|)`` of the truncated operator of the
    given order (zero at the dropped wrap offset ``N/2``, and at 0 for
    order 1).
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    N = 1 << n
    v = np.zeros(N)
    for k in range(N):
        jp = min(k, N - k)
        if k == 0:
            v[0] = math.sqrt(PI2 / 3.0) if order == 2 else 0.0
        elif jp == N // 2 and k == N // 2:
            v[k] = 0.0
        elif order == 2:
            v[k] = math.sqrt(2.0) / jp
        else:
            v[k] = 1.0 / math.sqrt(jp)
    return v / np.linalg.norm(v)


def success_branch_vector(cfg: PrepConfig, outcome: PrepOutcome) -> np.ndarray:
    """Accepted-branch magnitudes mapped to full offsets and normalized.

    Branch ``(j, d=1)`` lands at offset ``j``, ``(j, d=0)`` at ``N - j``
    (the identity branch ``j = 0`` at offset 0).
    """
    N = cfg.N
    v = np.zeros(N)
    for (_, j, d), amp in outcome.amplitude_map.items():
        idx = j if (d == 1 or j == 0) else N - j
        v[idx] = math.hypot(v[idx], amp)
    nrm = np.linalg.norm(v)
    if nrm > 0:
        v /= nrm
    return v


def asymptotic_success_amplitudes(
    order: int, n: int
) -> tuple[dict[tuple[int, int], float], float]:
    """Exact ``M -> infinity`` success amplitudes per ``(j, d)`` plus deficit.

    Order 2 includes the identity branch as ``(0, 0)``; the deficit is the
    root of the leftover probability, parked on a failure-flagged state by
    the idealized preparation in the encoding layer.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    amps: dict[tuple[int, int], float] = {}
    total = 0.0
    if order == 2:
        amps[(0, 0)] = math.sqrt(PI2 / (PI2 + 24.0))
        total += amps[(0, 0)] ** 2
        for j in range(1, 1 << (n - 1)):
            a = math.sqrt(6.0 / (PI2 + 24.0)) / j
            for d in (0, 1):
                amps[(j, d)] = a
                total += a * a
    else:
        for j in range(1, 1 << (n - 1)):
            a = 1.0 / math.sqrt(2.0 * (n - 1) * j)
            for d in (0, 1):
                amps[(j, d)] = a
                total += a * a
    deficit = math.sqrt(max(0.0, 1.0 - total))
    return amps, deficit
