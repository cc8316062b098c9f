"""Circulant lattice derivative operators with non-local kernels.

All operators here live on a periodic lattice of ``N = 2**n`` sites and are
circulant: fully described by a coefficient vector ``c`` with action
``(A f)[r] = sum_j c[j] f[(r - j) mod N]``.  Two families are provided, each in
an order-1 (first derivative) and order-2 (second derivative) variant:

* *exact*: the inverse DFT of the ideal band-limited derivative symbol, so the
  operator differentiates every resolvable plane wave exactly;
* *truncated*: the infinite-lattice kernel restricted to offsets ``|j| < N/2``
  (wrap-boundary term dropped), which keeps the coefficients N-independent at
  the cost of an O(1/N) symbol error away from the band edge.

Conventions, fixed once and used by every other module:

* ``to_dense`` places ``c[w]`` on the diagonal ``r - c ≡ w (mod N)``; hence
  ``to_dense(e_1)`` is the *add-one* cyclic permutation ``|k> -> |k+1>``.
* Eigenvectors are ``v_k[m] = exp(+2i pi m k / N)/sqrt(N)`` and eigenvalues are
  ``lambda(k) = sum_j c[j] exp(-2i pi j k / N)`` (``numpy.fft.fft`` of ``c``).
* Spectra are *presented* on the shifted momentum window ``(-N/2, N/2]``.  On
  that window the exact order-2 operator has eigenvalues ``-(2 pi k/N)**2`` and
  the exact order-1 operator has ``-i 2 pi k/N`` (edge value ``-i pi``).  The
  sign of the order-1 spectrum follows from pairing eigenvalue ``k`` with the
  eigenvector ``exp(+2i pi m k/N)``; sampled waves of the conjugate family
  ``exp(-2i pi m k/N)`` are differentiated with the usual ``+i q`` sign, and
  every derived quantity in this package (symbol magnitudes, truncation
  errors, singular values, quadratic forms ``D a D``) is invariant under that
  pairing choice.

Closed forms (tested against independent inverse-DFT oracles):

* order 2, exact: ``c[0] = -pi^2/3 - 2 pi^2/(3 N^2)``,
  ``c[j] = 2 pi^2 (-1)^(1+j) / (N^2 sin^2(pi j / N))``;
* order 2, truncated: ``c[0] = -pi^2/3``, ``c[j] = 2 (-1)^(1+j)/j^2`` for
  ``1 <= j <= N/2 - 1``, ``c[N/2] = 0``, mirrored on the upper half;
* order 1, exact: ``c[0] = -i pi / N``,
  ``c[j] = (pi (-1)^(1+j)/N) (cot(pi j/N) + i)``;
* order 1, truncated: ``c[0] = c[N/2] = 0`` and
  ``c[j] = ((-1)^(1+j)/j') exp(i pi j/N)`` with ``j' = min(j, N-j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TO_DENSE_SIZE_LIMIT = 4096


@dataclass(frozen=True)
class LatticeConfig:
    """Periodic lattice with ``N = 2**n`` sites, unit spacing.

    ``n >= 2`` so that the half-range offset set ``1 <= j < N/2`` is nonempty.
    """

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"lattice needs n >= 2 qubits, got n={self.n}")

    @property
    def N(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class CirculantOperator:
    """Coefficient vector of a circulant operator plus its lattice.

    ``order`` is 1 or 2 (derivative order), ``exact`` distinguishes the
    band-limited variant from the kernel-truncated one.
    """

    cfg: LatticeConfig
    coeffs: np.ndarray = field(repr=False)
    order: int = 2
    exact: bool = True

    @property
    def N(self) -> int:
        return self.cfg.N


def infinite_kernel(r: int, order: int) -> complex:
    """Infinite-lattice derivative kernel at signed offset ``r``.

    Order 2: ``-pi^2/3`` at ``r = 0`` and ``2 (-1)^(|r|+1) / r^2`` otherwise.
    Order 1: ``0`` at ``r = 0`` and ``(-1)^(|r|+1) / r`` otherwise (odd in r).
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if r == 0:
        return complex(-math.pi**2 / 3.0) if order == 2 else 0j
    sign = -1.0 if (abs(r) % 2 == 0) else 1.0
    if order == 2:
        return complex(2.0 * sign / r**2)
    return complex(sign / r)


def _half_range(N: int) -> np.ndarray:
    return np.arange(1, N // 2)


def exact_laplacian(cfg: LatticeConfig) -> CirculantOperator:
    """Second-derivative operator that is exact on every resolvable mode.

    Spectrum: ``-(2 pi k/N)^2`` for momenta ``k`` in ``(-N/2, N/2]``.
    """
    N = cfg.N
    c = np.zeros(N, dtype=np.complex128)
    c[0] = -math.pi**2 / 3.0 - 2.0 * math.pi**2 / (3.0 * N**2)
    j = np.arange(1, N)
    signs = np.where(j % 2 == 1, 1.0, -1.0)
    c[1:] = 2.0 * math.pi**2 * signs / (N**2 * np.sin(math.pi * j / N) ** 2)
    return CirculantOperator(cfg, c, order=2, exact=True)


def truncated_laplacian(cfg: LatticeConfig) -> CirculantOperator:
    """Infinite second-derivative kernel cut to offsets ``|j| < N/2``.

    The wrap-boundary offset ``N/2`` is dropped entirely, making each retained
    coefficient independent of ``N``.
    """
    N = cfg.N
    c = np.zeros(N, dtype=np.complex128)
    c[0] = -math.pi**2 / 3.0
    j = _half_range(N)
    vals = np.where(j % 2 == 1, 1.0, -1.0) * 2.0 / j.astype(np.float64) ** 2
    c[j] = vals
    c[N - j] = vals  # symmetric kernel
    return CirculantOperator(cfg, c, order=2, exact=False)


def exact_first_order(cfg: LatticeConfig) -> CirculantOperator:
    """First-derivative operator: eigenvalue ``-i 2 pi k/N``, ``k`` in ``(-N/2, N/2]``.

    Same presented window as the order-2 operator; the trace pins
    ``c[0] = -i pi / N`` and the edge mode carries ``-i pi``.
    """
    N = cfg.N
    c = np.zeros(N, dtype=np.complex128)
    c[0] = -1j * math.pi / N
    j = np.arange(1, N)
    signs = np.where(j % 2 == 1, 1.0, -1.0)
    c[1:] = (math.pi * signs / N) * (1.0 / np.tan(math.pi * j / N) + 1j)
    return CirculantOperator(cfg, c, order=1, exact=True)


def truncated_first_order(cfg: LatticeConfig) -> CirculantOperator:
    """Infinite first-derivative kernel cut to ``|j| < N/2``, lattice-phased.

    Each coefficient carries the half-site phase ``exp(i pi j / N)``; the
    resulting operator is anti-Hermitian (``c[N-j] = -conj(c[j])``).
    """
    N = cfg.N
    c = np.zeros(N, dtype=np.complex128)
    j = _half_range(N)
    jp = j.astype(np.float64)
    signs = np.where(j % 2 == 1, 1.0, -1.0)
    phase = np.exp(1j * math.pi * j / N)
    c[j] = signs / jp * phase
    # upper half: offset N-j has distance j' = j and sign/phase evaluated at N-j
    ju = N - j
    signs_u = np.where(ju % 2 == 1, 1.0, -1.0)
    c[ju] = signs_u / jp * np.exp(1j * math.pi * ju / N)
    return CirculantOperator(cfg, c, order=1, exact=False)


def to_dense(op: CirculantOperator) -> np.ndarray:
    """Dense matrix with entry ``(r, c) = coeffs[(r - c) mod N]``.

    Refuses lattices above ``N = 4096`` (dense circulants are an O(N^2) cost;
    use the spectrum for anything larger).
    """
    N = op.N
    if N > TO_DENSE_SIZE_LIMIT:
        raise ValueError(f"to_dense refuses N={N} > {TO_DENSE_SIZE_LIMIT}")
    r = np.arange(N).reshape(-1, 1)
    cidx = np.arange(N).reshape(1, -1)
    return op.coeffs[(r - cidx) % N]


def circulant_spectrum(op: CirculantOperator) -> np.ndarray:
    """Eigenvalues ``lambda(k) = sum_j c[j] exp(-2i pi j k/N)``, k = 0..N-1."""
    return np.fft.fft(op.coeffs)


def shifted_spectrum(op: CirculantOperator) -> tuple[np.ndarray, np.ndarray]:
    """Spectrum on the presented window: momenta ``(-N/2, N/2]``.

    Returns ``(k, lambda(k))`` with ``k`` ascending from ``-N/2 + 1``.
    """
    N = op.N
    lam = circulant_spectrum(op)
    k = np.arange(-N // 2 + 1, N // 2 + 1)
    return k, lam[k % N]


@dataclass(frozen=True)
class FourierSymbol:
    """A named symbol sampled on a shared momentum grid ``q`` in ``(-pi, pi]``."""

    name: str
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ProjectionSpec:
    """Momentum cutoff ``|k| <= k_max`` used to restrict an error norm."""

    k_max: int

    def __post_init__(self) -> None:
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")


def symbol_table(cfg: LatticeConfig, samples: int) -> list[FourierSymbol]:
    """Derivative symbols on ``q`` in ``(-pi, pi]`` with ``samples`` points.

    Six entries, in order: the continuum first-derivative symbol ``q``; the
    central-difference symbol ``sin q``; the truncated non-local symbol
    ``2 sum_{j=1}^{N-1} (-1)^(j+1) sin(j q)/j``; then the second-derivative
    trio ``q^2``, ``4 sin^2(q/2)``, and
    ``pi^2/3 + 4 sum_{j=1}^{N-1} (-1)^j cos(j q)/j^2``.

    The partial sums run over the full offset range ``j <= N-1`` (symbol-level
    truncation), which is a coarser object than the circulant coefficient
    arrays above.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    N = cfg.N
    i = np.arange(samples)
    q = -math.pi + (i + 1) * (2.0 * math.pi / samples)  # (-pi, pi], endpoint kept
    j = np.arange(1, N)
    signs = np.where(j % 2 == 1, 1.0, -1.0)
    jq = np.outer(q, j)
    d1_trunc = 2.0 * np.sin(jq) @ (signs / j)
    d2_trunc = math.pi**2 / 3.0 + 4.0 * np.cos(jq) @ (-signs / j.astype(float) ** 2)
    return [
        FourierSymbol("continuum_d1", q, q.copy()),
        FourierSymbol("fd_d1", q, np.sin(q)),
        FourierSymbol("slac_trunc_d1", q, d1_trunc),
        FourierSymbol("continuum_d2", q, q**2),
        FourierSymbol("fd_d2", q, 4.0 * np.sin(q / 2.0) ** 2),
        FourierSymbol("slac_trunc_d2", q, d2_trunc),
    ]


def truncation_error(
    exact: CirculantOperator,
    truncated: CirculantOperator,
    proj: ProjectionSpec | None = None,
) -> float:
    """Spectral-norm distance between two circulants, optionally band-limited.

    Both operators are simultaneously diagonalized by the DFT, so the operator
    norm of the difference is ``max_k |lambda_e(k) - lambda_t(k)|``; with a
    projection it is the max over ``|k| <= k_max`` on the shifted window.  The
    first-order pair needs the projection to show its O(1/N) interior decay:
    its unprojected error is dominated by an O(1) band-edge discrepancy.
    """
    if exact.N != truncated.N:
        raise ValueError("operators live on different lattices")
    k, lam_e = shifted_spectrum(exact)
    _, lam_t = shifted_spectrum(truncated)
    err = np.abs(lam_e - lam_t)
    if proj is not None:
        keep = np.abs(k) <= proj.k_max
        if not np.any(keep):
            raise ValueError("projection window contains no modes")
        err = err[keep]
    return float(err.max())
