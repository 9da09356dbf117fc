"""QR-type steps on symmetric matrices and the slice structure they live on.

A slice here is the set of symmetric matrices reachable from a starting point
by conjugating with the orthogonal factor of f(S) for strictly positive
functions f of the spectrum.  One QR step (factor, swap, multiply) is the
f(x) = x case; general f gives ``functional_step``; the k-th root gives
fractional steps whose rescaled differences converge to the interpolating
vector field [S, skew_part(log S)].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainViolation, SingularMatrix
from .linalg import (
    SpectralFunction,
    apply_function,
    as_symmetric,
    commutator,
    eigensystem,
    frobenius,
    function_values,
    qr_factor,
    skew_part,
    spectral_decompose,
    symmetrize,
)

IRREDUCIBLE_RTOL = 1e-12  # off-diagonal coupling threshold for the adjacency graph


@dataclass
class Trajectory:
    """A sampled matrix path: strictly increasing times, one state per time."""

    times: np.ndarray
    states: list[np.ndarray]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) != len(self.states):
            raise ValueError("times and states must align one to one")
        if len(self.states) == 0:
            raise ValueError("a trajectory needs at least one sample")
        if not np.all(np.isfinite(self.times)):
            raise ValueError("sample times must be finite")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        n = self.states[0].shape[0]
        for state in self.states:
            if state.shape != (n, n):
                raise ValueError("all states must share one square shape")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def n(self) -> int:
        return self.states[0].shape[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def qr_step(s) -> np.ndarray:
    """One QR step: s = q r  ->  r q (equivalently q.T s q, or r s r^-1).

    Requires invertibility only; SingularMatrix propagates from the factorization.
    """
    a = as_symmetric(s)
    q, r = qr_factor(a)
    return symmetrize(r @ q)


def functional_step(s, f: SpectralFunction) -> np.ndarray:
    """Conjugate s by the orthogonal factor of f(s).

    ``f`` must be defined on the spectrum of ``s`` (DomainViolation
    otherwise) and f(s) must be invertible (SingularMatrix otherwise);
    negative values are fine.  For f(x) = x^k this is exactly k plain QR
    steps; scaling f by a positive constant does not change the result.
    """
    a = as_symmetric(s)
    lam, q = eigensystem(a)
    w = function_values(f, lam, frobenius(a))
    wabs = np.abs(w)
    if float(wabs.min()) <= 1e-12 * float(wabs.max()):
        raise SingularMatrix(
            f"step function vanishes on the spectrum (smallest |value| "
            f"{float(wabs.min()):.3e}); the QR step is undefined"
        )
    fs = a if f.kind == "identity" else symmetrize((q.T * w) @ q)
    qf, _ = qr_factor(fs)
    return symmetrize(qf.T @ a @ qf)


def fractional_step(s, k: int) -> np.ndarray:
    """The k-th root step: functional_step with f(x) = x^(1/k).

    Composing it k times reproduces one full QR step on a positive spectrum.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError("k must be a positive integer")
    return functional_step(s, SpectralFunction.power(Fraction(1, int(k))))


def interpolating_field(s) -> np.ndarray:
    """Vector field [s, skew_part(log s)] interpolating the QR iteration.

    Defined for strictly positive spectra; the rescaled fractional-step
    differences (fractional_step(s, k) - s) * k converge to this field as
    k grows.
    """
    a = as_symmetric(s)
    return symmetrize(commutator(a, skew_part(apply_function(a, SpectralFunction.log()))))


def iterate_qr(s, steps: int, f: SpectralFunction = SpectralFunction.identity()) -> Trajectory:
    """Repeated functional steps; sample index doubles as time."""
    if not isinstance(steps, (int, np.integer)) or steps < 0:
        raise ValueError("steps must be a nonnegative integer")
    state = as_symmetric(s)
    states = [state]
    for _ in range(int(steps)):
        state = functional_step(state, f)
        states.append(state)
    return Trajectory(times=np.arange(len(states), dtype=float), states=states)


def slice_point(s, w) -> np.ndarray:
    """Point of the slice through ``s`` selected by positive spectral weights.

    Builds q.T diag(w) q in the eigenbasis of ``s`` (eigenvalues descending),
    QR-factors it, and conjugates ``s`` by the orthogonal factor.  Weights are
    normalized internally, so w and c*w (c > 0) give the same point.  Raises
    DomainViolation for nonpositive weights and DegenerateSpectrum when the
    spectrum of ``s`` is not simple.
    """
    a = as_symmetric(s)
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.shape[0] != a.shape[0]:
        raise ValueError(f"need {a.shape[0]} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if float(w.min()) <= 0.0:
        raise DomainViolation("slice weights must be strictly positive")
    w = w / float(np.linalg.norm(w))
    dec = spectral_decompose(a)
    fs = symmetrize((dec.q.T * w) @ dec.q)
    qf, _ = qr_factor(fs)
    return symmetrize(qf.T @ a @ qf)


def is_irreducible(s) -> bool:
    """True when no proper coordinate subset spans an invariant subspace.

    Couplings with |s[i][j]| <= 1e-12 * ||s|| count as zero; every proper
    nonempty index subset is checked directly against that zero pattern
    (2^n - 2 subsets, fine at desk scale).
    """
    a = as_symmetric(s)
    n = a.shape[0]
    coupled = np.abs(a) > IRREDUCIBLE_RTOL * frobenius(a)
    np.fill_diagonal(coupled, False)
    indices = np.arange(n)
    for mask in range(1, 2 ** n - 1):
        inside = (mask >> indices) & 1 == 1
        if not coupled[np.ix_(~inside, inside)].any():
            return False
    return True
