"""Verblunsky-sequence numerics: GGT truncations and sum-rule functionals.

The truncated GGT matrix is the N x N top-left corner

    U[k, l] = -alpha_{k-1} * conj(alpha_l) * rho_k * ... * rho_{l-1}   (k <= l)
    U[l+1, l] = rho_l
    U[k, l] = 0                                                        (k >= l+2)

with ``rho_j = sqrt(1 - |alpha_j|^2)`` and the conventions ``alpha_{-1} =
-1``, ``alpha_n = 0`` for n < -1.  Negative powers of the (non-unitary)
truncation are read as powers of the adjoint, which is exact in the
unitary limit and differs only by N-independent boundary terms otherwise.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .trig import TrigPoly


class OpucError(Exception):
    pass


class VerblunskySeq:
    """A coefficient sequence ``alpha_0, alpha_1, ...`` with |alpha_n| < 1.

    Backed by a callable; ``alpha(-1) = -1`` and ``alpha(n) = 0`` for
    n < -1 by convention.  ``support`` is the length of the nonzero head
    for finitely supported sequences, or None.
    """

    def __init__(self, fn: Callable[[int], complex], support: int | None = None,
                 description: str = "custom"):
        self._fn = fn
        self.support = support
        self.description = description

    @staticmethod
    def from_values(values: Sequence[complex]) -> "VerblunskySeq":
        vals = [complex(v) for v in values]
        for v in vals:
            if abs(v) >= 1.0:
                raise OpucError("Verblunsky coefficients must satisfy |alpha| < 1")
        return VerblunskySeq(
            lambda n: vals[n] if n < len(vals) else 0.0 + 0.0j,
            support=len(vals),
            description="finiteSupport",
        )

    def __call__(self, n: int) -> complex:
        if n == -1:
            return -1.0 + 0.0j
        if n < -1:
            return 0.0 + 0.0j
        return complex(self._fn(n))

    def head(self, n: int) -> np.ndarray:
        """``alpha_0 .. alpha_{n-1}`` as an array, validating |alpha| < 1."""
        out = np.array([self(k) for k in range(n)], dtype=complex)
        if out.size and np.max(np.abs(out)) >= 1.0:
            raise OpucError("Verblunsky coefficients must satisfy |alpha| < 1")
        return out


def ggt_matrix(alpha: VerblunskySeq, n: int) -> np.ndarray:
    """Dense N x N top-left GGT corner for the sequence."""
    if n < 1:
        raise OpucError("matrix size must be at least 1")
    a = np.empty(n + 1, dtype=complex)
    a[0] = -1.0
    a[1:] = alpha.head(n)
    rho = np.sqrt(1.0 - np.abs(a[1:]) ** 2)
    u = np.zeros((n, n), dtype=complex)
    conj_tail = np.conj(a[1:])
    for k in range(n):
        # rho_k * ... * rho_{l-1} for l = k..n-1, leading factor 1
        prods = np.empty(n - k, dtype=complex)
        prods[0] = 1.0
        if n - k > 1:
            np.cumprod(rho[k:n - 1], out=prods[1:])
        u[k, k:] = -a[k] * conj_tail[k:] * prods
        if k + 1 < n:
            u[k + 1, k] = rho[k]
    return u


def trace_powers(u: np.ndarray, max_power: int) -> list:
    """Traces of u^1 .. u^max_power by repeated multiplication."""
    traces = []
    power = u
    for l in range(1, max_power + 1):
        traces.append(complex(np.trace(power)))
        if l < max_power:
            power = power @ u
    return traces


def trace_v(u: np.ndarray, h: TrigPoly) -> float:
    """``Tr(V(U))`` with negative powers read through the adjoint.

    Equals ``-(2 / Z_H) * Re sum_{l=1}^{d} (h_l / l) Tr(U^l)`` because
    ``h_{-l} = conj(h_l)`` pairs each power with its adjoint.
    """
    d = h.degree
    if d >= u.shape[0]:
        raise OpucError("weight degree must be smaller than the matrix size")
    z_h = h.z_h_numeric()
    traces = trace_powers(u, d)
    acc = 0.0 + 0.0j
    for l in range(1, d + 1):
        acc += h.coeff_numeric(l) / l * traces[l - 1]
    return float(-(2.0 / z_h) * acc.real)


def trace_v_inverse(u: np.ndarray, h: TrigPoly) -> float:
    """Reference evaluation using the exact matrix inverse for x^{-l}.

    Only meaningful when u is (numerically) unitary; used to validate the
    adjoint convention of :func:`trace_v`.
    """
    d = h.degree
    z_h = h.z_h_numeric()
    traces = trace_powers(u, d)
    inv_traces = trace_powers(np.linalg.inv(u), d)
    acc = 0.0 + 0.0j
    for l in range(1, d + 1):
        acc += h.coeff_numeric(l) / l * traces[l - 1]
        acc += h.coeff_numeric(-l) / l * inv_traces[l - 1]
    return float((-1.0 / z_h) * acc.real)


def log_term(alpha: VerblunskySeq, n: int) -> float:
    """``sum_{j < n} log(1 - |alpha_j|^2)``."""
    head = alpha.head(n)
    return float(np.sum(np.log1p(-np.abs(head) ** 2)))


def sum_rule_functional(alpha: VerblunskySeq, n: int, h: TrigPoly) -> float:
    """``Tr(V(U_N)) - sum_{j<N} log(1 - |alpha_j|^2)``.

    Bounded in N exactly when the weighted integral condition of the
    higher-order sum rule holds.
    """
    u = ggt_matrix(alpha, n)
    return trace_v(u, h) - log_term(alpha, n)


# -- Bernstein-Szego quadrature oracle -------------------------------------------


def szego_pstar_coeffs(alpha: VerblunskySeq) -> np.ndarray:
    """Coefficients of the reversed monic polynomial Phi*_{N0}.

    Szego recursion: Phi_{n+1} = z Phi_n - conj(alpha_n) Phi*_n and
    Phi*_{n+1} = Phi*_n - alpha_n z Phi_n.  Index i of the result is the
    coefficient of z^i.  Requires finite support.
    """
    if alpha.support is None:
        raise OpucError("Szego weight needs a finitely supported sequence")
    n0 = alpha.support
    phi = np.zeros(n0 + 1, dtype=complex)
    pstar = np.zeros(n0 + 1, dtype=complex)
    phi[0] = 1.0
    pstar[0] = 1.0
    for n in range(n0):
        a = alpha(n)
        shifted = np.roll(phi, 1)
        shifted[0] = 0.0
        phi_next = shifted - np.conj(a) * pstar
        pstar_next = pstar - a * shifted
        phi, pstar = phi_next, pstar_next
    return pstar


def bs_weight_on_grid(alpha: VerblunskySeq, thetas: np.ndarray) -> np.ndarray:
    """Bernstein-Szego weight ``w(theta)`` of a finitely supported sequence."""
    pstar = szego_pstar_coeffs(alpha)
    head = alpha.head(alpha.support)
    norm = float(np.prod(1.0 - np.abs(head) ** 2)) if head.size else 1.0
    z = np.exp(1j * thetas)
    values = np.polyval(pstar[::-1], z)
    return norm / np.abs(values) ** 2


def bs_weight_quadrature(alpha: VerblunskySeq, h: TrigPoly | None,
                         grid_size: int = 4096, tol: float = 1e-10) -> float:
    """``(1/2pi) \\int H(e^{i theta}) log w(theta) d theta`` by quadrature.

    Uniform trapezoid rule on the periodic integrand (the grid mean); the
    grid doubles until two successive results agree within ``tol``.  With
    ``h=None`` the weight H is 1, which recovers the classical Szego sum
    ``sum log(1 - |alpha_n|^2)``.
    """
    if alpha.support is None:
        raise OpucError("quadrature needs a finitely supported sequence")
    if grid_size < 2 ** 10:
        raise OpucError("grid size must be at least 2^10")

    def integral(m: int) -> float:
        thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        w = bs_weight_on_grid(alpha, thetas)
        integrand = np.log(w)
        if h is not None:
            integrand = integrand * h.eval_numeric(thetas)
        return float(np.mean(integrand))

    value = integral(grid_size)
    m = grid_size
    while m < 2 ** 20:
        m *= 2
        refined = integral(m)
        if abs(refined - value) < tol:
            return refined
        value = refined
    return value
