"""Two-party binary no-signaling boxes and the CHSH landscape.

A box is the conditional table p(a,b|x,y) for binary inputs and outputs.
The module provides the extremal examples (deterministic, white noise,
the algebraically maximal box), boxes induced by measuring a two-qubit
state at X-Z plane angles, and a coordinate-ascent optimizer that pushes
the entangled-state value up to its ceiling of 2*sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebras as alg
from . import states as st
from .states import State

__all__ = [
    "NoSignalingBox",
    "QuantumStrategy",
    "bell_state",
    "box_from_quantum",
    "chsh_value",
    "deterministic_box",
    "maximize_quantum_chsh",
    "mix_boxes",
    "pr_box",
    "white_noise_box",
]

BOX_TOL = 1e-12


@dataclass(frozen=True)
class NoSignalingBox:
    """Conditional probability table indexed ``table[x][y][a][b]``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2, 2, 2, 2):
            raise ValueError(f"expected a 2x2x2x2 table, got {t.shape}")
        object.__setattr__(self, "table", t)

    def validate(self, tol: float = BOX_TOL) -> None:
        t = self.table
        if np.any(t < -tol):
            raise ValueError(f"negative probability {t.min()!r}")
        sums = t.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1.0)) > tol:
            raise ValueError(f"settings do not normalize: {sums}")
        gap = self.no_signaling_residual()
        if gap > tol:
            raise ValueError(f"signaling residual {gap:.3e}")

    def no_signaling_residual(self) -> float:
        t = self.table
        alice = t.sum(axis=3)  # p(a|x, y)
        bob = t.sum(axis=2)    # p(b|x, y)
        return float(
            max(
                np.max(np.abs(alice[:, 0, :] - alice[:, 1, :])),
                np.max(np.abs(bob[0, :, :] - bob[1, :, :])),
            )
        )

    def correlator(self, x: int, y: int) -> float:
        signs = np.array([[1.0, -1.0], [-1.0, 1.0]])
        return float(np.sum(self.table[x, y] * signs))


def chsh_value(box: NoSignalingBox) -> float:
    """E00 + E01 + E10 - E11 with parity correlators."""
    box.validate(tol=1e-10)
    return (
        box.correlator(0, 0)
        + box.correlator(0, 1)
        + box.correlator(1, 0)
        - box.correlator(1, 1)
    )


def pr_box() -> NoSignalingBox:
    """The box with a XOR b = x AND y and uniform marginals."""
    t = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    if (a ^ b) == (x & y):
                        t[x, y, a, b] = 0.5
    return NoSignalingBox(t)


def white_noise_box() -> NoSignalingBox:
    return NoSignalingBox(np.full((2, 2, 2, 2), 0.25))


def deterministic_box(fa=(0, 0), fb=(0, 0)) -> NoSignalingBox:
    """Outputs fixed by local functions a = fa[x], b = fb[y]."""
    t = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            t[x, y, fa[x], fb[y]] = 1.0
    return NoSignalingBox(t)


def mix_boxes(boxes, weights) -> NoSignalingBox:
    weights = np.asarray(weights, dtype=float)
    table = sum(w * b.table for w, b in zip(weights, boxes))
    return NoSignalingBox(table)


# ---------------------------------------------------------------------------
# quantum strategies
# ---------------------------------------------------------------------------

_LAYOUT_22 = st.composite_layout(st.COMPLEX_TENSOR, (2, 2))


def bell_state() -> State:
    """The maximally entangled two-qubit state (|00> + |11>)/sqrt(2)."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0 / math.sqrt(2.0)
    rep = np.outer(vec, vec.conj())
    return State.make(
        alg.element_from_reps(_LAYOUT_22.ambient, [rep]), _LAYOUT_22
    )


def product_strategy_state(alpha: float, beta: float) -> State:
    """Product of two X-Z plane pure qubit states."""
    qubit = alg.complex_hermitian(2)

    def pure(theta):
        v = np.array([math.cos(theta / 2.0), math.sin(theta / 2.0)],
                     dtype=complex)
        return State.make(
            alg.element_from_reps(qubit, [np.outer(v, v.conj())])
        )

    return st.tensor(pure(alpha), pure(beta), _LAYOUT_22)


@dataclass(frozen=True)
class QuantumStrategy:
    """A two-qubit state with one X-Z measurement angle per setting."""

    state: State
    alice_angles: tuple[float, float]
    bob_angles: tuple[float, float]


def _angle_projectors(theta: float):
    """Eigenprojectors of cos(theta) Z + sin(theta) X, outcome 0 first."""
    direction = np.array(
        [[math.cos(theta), math.sin(theta)],
         [math.sin(theta), -math.cos(theta)]],
        dtype=complex,
    )
    eye = np.eye(2, dtype=complex)
    return 0.5 * (eye + direction), 0.5 * (eye - direction)


def box_from_quantum(strategy: QuantumStrategy) -> NoSignalingBox:
    """Outcome table of the strategy via the trace inner product."""
    layout = strategy.state.layout
    t = np.zeros((2, 2, 2, 2))
    for x, theta in enumerate(strategy.alice_angles):
        pa = _angle_projectors(theta)
        for y, phi in enumerate(strategy.bob_angles):
            pb = _angle_projectors(phi)
            for a in range(2):
                for b in range(2):
                    effect = alg.element_from_reps(
                        layout.ambient, [np.kron(pa[a], pb[b])]
                    )
                    t[x, y, a, b] = alg.inner_product(
                        effect, strategy.state.element
                    )
    return NoSignalingBox(np.clip(t, 0.0, None))


def _chsh_of_angles(state: State, angles: np.ndarray) -> float:
    strategy = QuantumStrategy(
        state, (angles[0], angles[1]), (angles[2], angles[3])
    )
    return chsh_value(box_from_quantum(strategy))


_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _correlation_tensor(state: State) -> np.ndarray:
    """Expectations <s_i x s_j> for s in (Z, X); correlators at X-Z plane
    angles are bilinear in (cos, sin) against this tensor."""
    rep = state.element.reps()[0]
    t = np.empty((2, 2))
    for i, si in enumerate((_Z, _X)):
        for j, sj in enumerate((_Z, _X)):
            t[i, j] = float(np.trace(np.kron(si, sj) @ rep).real)
    return t


def _chsh_from_tensor(t: np.ndarray, angles) -> float:
    def c(theta):
        return np.array([math.cos(theta), math.sin(theta)])

    a0, a1 = c(angles[0]), c(angles[1])
    b0, b1 = c(angles[2]), c(angles[3])
    return float(a0 @ t @ b0 + a0 @ t @ b1 + a1 @ t @ b0 - a1 @ t @ b1)


def _golden_section(f, lo, hi, tol=1e-10, max_iter=200):
    """Maximize a unimodal-enough section by golden ratio search."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def maximize_quantum_chsh(
    seed: int = 0,
    restarts: int = 10,
    entangled: bool = True,
    value_tol: float = 1e-9,
    max_rounds: int = 60,
):
    """Multi-start coordinate ascent over the four measurement angles.

    With ``entangled`` the maximally entangled state is used; otherwise
    the search also optimizes a product state's two preparation angles,
    whose ceiling is the classical value 2.
    """
    rng = np.random.default_rng(seed)
    best_value = -math.inf
    best_strategy = None
    bell_tensor = _correlation_tensor(bell_state()) if entangled else None

    for _ in range(max(1, restarts)):
        n_params = 4 if entangled else 6

        def objective(p):
            if entangled:
                return _chsh_from_tensor(bell_tensor, p[:4])
            # product strategy: correlators factorize into local overlaps
            return (
                math.cos(p[0] - p[4]) * math.cos(p[2] - p[5])
                + math.cos(p[0] - p[4]) * math.cos(p[3] - p[5])
                + math.cos(p[1] - p[4]) * math.cos(p[2] - p[5])
                - math.cos(p[1] - p[4]) * math.cos(p[3] - p[5])
            )

        params = rng.uniform(0.0, 2.0 * math.pi, size=n_params)
        current = objective(params)
        for _ in range(max_rounds):
            previous = current
            for i in range(n_params):
                def line(v, i=i):
                    trial = params.copy()
                    trial[i] = v
                    return objective(trial)

                width = math.pi if i < 4 else 2.0 * math.pi
                params[i] = _golden_section(
                    line, params[i] - width, params[i] + width
                )
                current = objective(params)
            if current - previous < value_tol:
                break
        if current > best_value:
            best_value = current
            state = (
                bell_state() if entangled
                else product_strategy_state(params[4], params[5])
            )
            best_strategy = QuantumStrategy(
                state,
                (params[0], params[1]),
                (params[2], params[3]),
            )
    return best_value, best_strategy
