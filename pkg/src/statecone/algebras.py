"""Finite-dimensional Euclidean Jordan algebras and their spectral calculus.

An algebra is a direct sum of simple factors of five kinds:

===========  =========================================  ==========  ====
kind         concrete picture                           dimension   rank
===========  =========================================  ==========  ====
real         real symmetric n x n matrices              n(n+1)/2    n
complex      complex Hermitian n x n matrices           n^2         n
quaternion   quaternionic Hermitian n x n matrices      n(2n-1)     n
spin         pairs (t, v) with v in R^d                 d + 1       2
classical    R^n with the pointwise product             n           n
===========  =========================================  ==========  ====

Elements are stored as real coefficient vectors in a fixed basis that is
orthonormal for the trace inner product ``<a, b> = tr(a o b)``, so the
coefficient map is an isometry.  The basis layout per factor is:

* matrix kinds: the ``n`` diagonal matrix units first, then for each pair
  ``i < j`` (row-major) the symmetrized off-diagonal units scaled by
  ``1/sqrt(2)`` -- for ``complex`` the real part followed by the imaginary
  part, for ``quaternion`` the real part followed by the i, j, k parts;
* spin: ``unit/sqrt(2)`` first, then the ``d`` ball axes scaled by
  ``1/sqrt(2)``;
* classical: the canonical coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .jacobi import jacobi_eigh

__all__ = [
    "Algebra",
    "AlgebraMismatchError",
    "DomainError",
    "JordanElement",
    "SimpleFactor",
    "SpectralDecomposition",
    "apply_function",
    "basis_element",
    "classical",
    "complex_hermitian",
    "direct_sum",
    "embed_quaternion",
    "inner_product",
    "jordan_product",
    "norm",
    "quaternion_hermitian",
    "real_hermitian",
    "spectral_decompose",
    "spin_factor",
    "trace",
    "unit",
    "zero",
]

DEFAULT_GROUP_TOL = 1e-8

_KINDS = ("real", "complex", "quaternion", "spin", "classical")


class AlgebraMismatchError(ValueError):
    """Operands live in different algebras."""


class DomainError(ValueError):
    """A scalar function was applied outside its domain."""

    def __init__(self, message: str, value: float | None = None):
        super().__init__(message)
        self.value = value


@dataclass(frozen=True)
class SimpleFactor:
    """One simple summand of an algebra."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}")
        minimum = 2 if self.kind == "spin" else 1
        if self.size < minimum:
            raise ValueError(f"{self.kind} factor needs size >= {minimum}")

    @property
    def dim(self) -> int:
        n = self.size
        return {
            "real": n * (n + 1) // 2,
            "complex": n * n,
            "quaternion": n * (2 * n - 1),
            "spin": n + 1,
            "classical": n,
        }[self.kind]

    @property
    def rank(self) -> int:
        return 2 if self.kind == "spin" else self.size

    def __str__(self):
        letter = {"real": "R", "complex": "C", "quaternion": "H",
                  "spin": "S", "classical": "P"}[self.kind]
        return f"{letter}{self.size}"


@dataclass(frozen=True)
class Algebra:
    """A direct sum of simple factors."""

    summands: tuple[SimpleFactor, ...]

    def __post_init__(self):
        if not self.summands:
            raise ValueError("an algebra needs at least one summand")

    @property
    def dim(self) -> int:
        return sum(s.dim for s in self.summands)

    @property
    def rank(self) -> int:
        return sum(s.rank for s in self.summands)

    def slices(self) -> list[slice]:
        """Coefficient slice of each summand."""
        out, start = [], 0
        for s in self.summands:
            out.append(slice(start, start + s.dim))
            start += s.dim
        return out

    def __str__(self):
        return "+".join(str(s) for s in self.summands)


def real_hermitian(n: int) -> Algebra:
    return Algebra((SimpleFactor("real", n),))


def complex_hermitian(n: int) -> Algebra:
    return Algebra((SimpleFactor("complex", n),))


def quaternion_hermitian(n: int) -> Algebra:
    return Algebra((SimpleFactor("quaternion", n),))


def spin_factor(d: int) -> Algebra:
    return Algebra((SimpleFactor("spin", d),))


def classical(n: int) -> Algebra:
    return Algebra((SimpleFactor("classical", n),))


class JordanElement:
    """An algebra element, stored as coefficients in the fixed basis.

    Instances are immutable; the coefficient array is marked read-only.
    A per-instance cache holds spectral decompositions keyed by grouping
    tolerance, which is safe to share between threads because entries are
    only ever computed from the immutable coefficients.
    """

    __slots__ = ("algebra", "coeffs", "_spectral_cache")

    def __init__(self, algebra: Algebra, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (algebra.dim,):
            raise ValueError(
                f"coefficient vector of length {coeffs.shape} does not match "
                f"algebra {algebra} of dimension {algebra.dim}"
            )
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_spectral_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("JordanElement is immutable")

    # -- vector-space sugar ------------------------------------------------

    def _require_same(self, other: "JordanElement"):
        if self.algebra != other.algebra:
            raise AlgebraMismatchError(
                f"operands live in {self.algebra} and {other.algebra}"
            )

    def __add__(self, other):
        self._require_same(other)
        return JordanElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._require_same(other)
        return JordanElement(self.algebra, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return JordanElement(self.algebra, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return JordanElement(self.algebra, self.coeffs / float(scalar))

    def __neg__(self):
        return JordanElement(self.algebra, -self.coeffs)

    def __repr__(self):
        return f"JordanElement({self.algebra}, dim={self.algebra.dim})"

    # -- representations ---------------------------------------------------

    def reps(self) -> list:
        """Concrete representation of each summand (matrix, 4-stack, ...)."""
        return [
            _COERCE_TO_REP[s.kind](self.coeffs[sl], s.size)
            for s, sl in zip(self.algebra.summands, self.algebra.slices())
        ]


def element_from_reps(algebra: Algebra, reps: Sequence) -> JordanElement:
    """Assemble an element from per-summand concrete representations."""
    coeffs = np.empty(algebra.dim)
    for s, sl, rep in zip(algebra.summands, algebra.slices(), reps):
        coeffs[sl] = _COERCE_TO_COEFFS[s.kind](rep, s.size)
    return JordanElement(algebra, coeffs)


# ---------------------------------------------------------------------------
# basis maps per simple kind
# ---------------------------------------------------------------------------

_SQRT2 = np.sqrt(2.0)


def _offdiag_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _real_to_rep(c, n):
    m = np.zeros((n, n))
    m[np.diag_indices(n)] = c[:n]
    k = n
    for i, j in _offdiag_pairs(n):
        m[i, j] = m[j, i] = c[k] / _SQRT2
        k += 1
    return m


def _real_to_coeffs(m, n):
    c = np.empty(n * (n + 1) // 2)
    c[:n] = np.diag(m).real
    k = n
    for i, j in _offdiag_pairs(n):
        c[k] = _SQRT2 * 0.5 * (m[i, j] + m[j, i]).real
        k += 1
    return c


def _complex_to_rep(c, n):
    m = np.zeros((n, n), dtype=complex)
    m[np.diag_indices(n)] = c[:n]
    k = n
    for i, j in _offdiag_pairs(n):
        m[i, j] = (c[k] + 1j * c[k + 1]) / _SQRT2
        m[j, i] = np.conj(m[i, j])
        k += 2
    return m


def _complex_to_coeffs(m, n):
    c = np.empty(n * n)
    c[:n] = np.diag(m).real
    k = n
    for i, j in _offdiag_pairs(n):
        upper = 0.5 * (m[i, j] + np.conj(m[j, i]))
        c[k] = _SQRT2 * upper.real
        c[k + 1] = _SQRT2 * upper.imag
        k += 2
    return c


def _quaternion_to_rep(c, n):
    """Stack of the four real component matrices (1, i, j, k parts)."""
    m = np.zeros((4, n, n))
    m[0][np.diag_indices(n)] = c[:n]
    k = n
    for i, j in _offdiag_pairs(n):
        m[0, i, j] = m[0, j, i] = c[k] / _SQRT2
        for part in (1, 2, 3):
            m[part, i, j] = c[k + part] / _SQRT2
            m[part, j, i] = -c[k + part] / _SQRT2
        k += 4
    return m


def _quaternion_to_coeffs(m, n):
    c = np.empty(n * (2 * n - 1))
    c[:n] = np.diag(m[0])
    k = n
    for i, j in _offdiag_pairs(n):
        c[k] = _SQRT2 * 0.5 * (m[0, i, j] + m[0, j, i])
        for part in (1, 2, 3):
            c[k + part] = _SQRT2 * 0.5 * (m[part, i, j] - m[part, j, i])
        k += 4
    return c


def _spin_to_rep(c, d):
    rep = c / _SQRT2
    return rep


def _spin_to_coeffs(rep, d):
    return np.asarray(rep, dtype=float) * _SQRT2


def _classical_to_rep(c, n):
    return c.copy()


def _classical_to_coeffs(rep, n):
    return np.asarray(rep, dtype=float).copy()


_COERCE_TO_REP = {
    "real": _real_to_rep,
    "complex": _complex_to_rep,
    "quaternion": _quaternion_to_rep,
    "spin": _spin_to_rep,
    "classical": _classical_to_rep,
}
_COERCE_TO_COEFFS = {
    "real": _real_to_coeffs,
    "complex": _complex_to_coeffs,
    "quaternion": _quaternion_to_coeffs,
    "spin": _spin_to_coeffs,
    "classical": _classical_to_coeffs,
}


# ---------------------------------------------------------------------------
# products, traces, units
# ---------------------------------------------------------------------------


def _quaternion_matmul(a, b):
    """Product of quaternionic matrices in 4-component representation."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.stack([
        a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
        a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
        a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
        a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
    ])


def _product_rep(kind, ra, rb):
    if kind in ("real", "complex"):
        return 0.5 * (ra @ rb + rb @ ra)
    if kind == "quaternion":
        return 0.5 * (_quaternion_matmul(ra, rb) + _quaternion_matmul(rb, ra))
    if kind == "spin":
        s, u = ra[0], ra[1:]
        t, v = rb[0], rb[1:]
        return np.concatenate(([s * t + u @ v], s * v + t * u))
    return ra * rb


def _trace_rep(kind, rep):
    if kind in ("real", "complex"):
        return float(np.trace(rep).real)
    if kind == "quaternion":
        return float(np.trace(rep[0]))
    if kind == "spin":
        return 2.0 * float(rep[0])
    return float(np.sum(rep))


def _unit_rep(kind, size):
    if kind in ("real", "complex"):
        dtype = float if kind == "real" else complex
        return np.eye(size, dtype=dtype)
    if kind == "quaternion":
        m = np.zeros((4, size, size))
        m[0] = np.eye(size)
        return m
    if kind == "spin":
        rep = np.zeros(size + 1)
        rep[0] = 1.0
        return rep
    return np.ones(size)


def jordan_product(a: JordanElement, b: JordanElement) -> JordanElement:
    """The symmetrized product, evaluated blockwise per summand."""
    a._require_same(b)
    reps = [
        _product_rep(s.kind, ra, rb)
        for s, ra, rb in zip(a.algebra.summands, a.reps(), b.reps())
    ]
    return element_from_reps(a.algebra, reps)


def trace(a: JordanElement) -> float:
    return sum(
        _trace_rep(s.kind, rep) for s, rep in zip(a.algebra.summands, a.reps())
    )


def inner_product(a: JordanElement, b: JordanElement) -> float:
    """Trace inner product; a plain dot because the basis is orthonormal."""
    a._require_same(b)
    return float(a.coeffs @ b.coeffs)


def norm(a: JordanElement) -> float:
    return float(np.linalg.norm(a.coeffs))


def unit(algebra: Algebra) -> JordanElement:
    return element_from_reps(
        algebra, [_unit_rep(s.kind, s.size) for s in algebra.summands]
    )


def zero(algebra: Algebra) -> JordanElement:
    return JordanElement(algebra, np.zeros(algebra.dim))


def basis_element(algebra: Algebra, index: int) -> JordanElement:
    coeffs = np.zeros(algebra.dim)
    coeffs[index] = 1.0
    return JordanElement(algebra, coeffs)


def direct_sum(a: JordanElement, b: JordanElement) -> JordanElement:
    """Block-diagonal join of two elements."""
    alg = Algebra(a.algebra.summands + b.algebra.summands)
    return JordanElement(alg, np.concatenate([a.coeffs, b.coeffs]))


# ---------------------------------------------------------------------------
# spectral decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (distinct, descending) with orthogonal idempotents.

    ``multiplicities[i]`` is the trace of ``idempotents[i]``; merged
    eigenvalue groups give idempotents of trace larger than one, so the
    fine spectrum is recovered by weighting each eigenvalue with its
    multiplicity.
    """

    eigenvalues: np.ndarray
    idempotents: tuple[JordanElement, ...]
    multiplicities: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.multiplicities is None:
            mult = np.array([trace(e) for e in self.idempotents])
            object.__setattr__(self, "multiplicities", mult)

    def reconstruct(self) -> JordanElement:
        alg = self.idempotents[0].algebra
        coeffs = np.zeros(alg.dim)
        for lam, e in zip(self.eigenvalues, self.idempotents):
            coeffs += lam * e.coeffs
        return JordanElement(alg, coeffs)

    def fine_spectrum(self) -> np.ndarray:
        """Eigenvalues repeated with (rounded) multiplicity, descending."""
        reps = np.rint(self.multiplicities).astype(int)
        return np.repeat(self.eigenvalues, reps)


def _group_indices(values: np.ndarray, group_tol: float) -> list[np.ndarray]:
    """Split sorted-descending values into groups of near-equal entries."""
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[start] - values[i] > group_tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def _complex_to_real_embedding(m: np.ndarray) -> np.ndarray:
    x, y = m.real, m.imag
    return np.block([[x, -y], [y, x]])


def _real_projection_to_complex(p: np.ndarray, n: int) -> np.ndarray:
    xp = 0.5 * (p[:n, :n] + p[n:, n:])
    yp = 0.5 * (p[n:, :n] - p[:n, n:])
    return xp + 1j * yp


def _quaternion_to_complex_embedding(m: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = m
    return np.block([
        [a0 + 1j * a1, a2 + 1j * a3],
        [-a2 + 1j * a3, a0 - 1j * a1],
    ])


def _complex_projection_to_quaternion(p: np.ndarray, n: int) -> np.ndarray:
    b11, b12 = p[:n, :n], p[:n, n:]
    b21, b22 = p[n:, :n], p[n:, n:]
    return np.stack([
        0.5 * (b11.real + b22.real),
        0.5 * (b11.imag - b22.imag),
        0.5 * (b12.real - b21.real),
        0.5 * (b12.imag + b21.imag),
    ])


def _spectral_pairs(kind, rep, size, group_tol):
    """Per-summand spectral data: list of (eigenvalue, projection rep).

    Eigenvalues are descending; projection traces carry multiplicities.
    """
    if kind == "classical":
        order = np.argsort(rep)[::-1]
        values = rep[order]
        pairs = []
        for idx in _group_indices(values, group_tol):
            proj = np.zeros(size)
            proj[order[idx]] = 1.0
            pairs.append((float(np.mean(values[idx])), proj))
        return pairs

    if kind == "spin":
        t, v = rep[0], rep[1:]
        r = float(np.linalg.norm(v))
        if 2.0 * r <= group_tol:
            return [(t, _unit_rep("spin", size))]
        axis = v / r
        top = np.concatenate(([0.5], 0.5 * axis))
        bottom = np.concatenate(([0.5], -0.5 * axis))
        return [(t + r, top), (t - r, bottom)]

    if kind == "real":
        w, vecs = jacobi_eigh(rep)
        unembed = None
        n_embed = size
    elif kind == "complex":
        w, vecs = jacobi_eigh(_complex_to_real_embedding(rep))
        unembed = lambda p: _real_projection_to_complex(p, size)
        n_embed = 2 * size
    else:  # quaternion
        cm = _quaternion_to_complex_embedding(rep)
        w, vecs = jacobi_eigh(_complex_to_real_embedding(cm))
        unembed = lambda p: _complex_projection_to_quaternion(
            _real_projection_to_complex(p, 2 * size), size
        )
        n_embed = 4 * size

    w = w[::-1]
    vecs = vecs[:, ::-1]
    pairs = []
    for idx in _group_indices(w, group_tol):
        cols = vecs[:, idx]
        proj = cols @ cols.T
        if unembed is not None:
            proj = unembed(proj)
        pairs.append((float(np.mean(w[idx])), proj))
    return pairs


def spectral_decompose(
    a: JordanElement, group_tol: float = DEFAULT_GROUP_TOL
) -> SpectralDecomposition:
    """Decompose into eigenvalues and orthogonal idempotents.

    Eigenvalues closer than ``group_tol`` are merged into a single
    idempotent, also across direct summands.  Results are cached on the
    element per tolerance.
    """
    cached = a._spectral_cache.get(group_tol)
    if cached is not None:
        return cached

    alg = a.algebra
    scattered = []  # (eigenvalue, summand index, projection rep)
    for pos, (s, rep) in enumerate(zip(alg.summands, a.reps())):
        for lam, proj in _spectral_pairs(s.kind, rep, s.size, group_tol):
            scattered.append((lam, pos, proj))

    scattered.sort(key=lambda item: -item[0])
    values = np.array([item[0] for item in scattered])

    eigenvalues = []
    idempotents = []
    for idx in _group_indices(values, group_tol):
        group = [scattered[i] for i in idx]
        reps = [
            np.zeros_like(_unit_rep(s.kind, s.size)) for s in alg.summands
        ]
        lam = 0.0
        total = 0.0
        for value, pos, proj in group:
            reps[pos] = reps[pos] + proj
            mult = _trace_rep(alg.summands[pos].kind, proj)
            lam += value * mult
            total += mult
        eigenvalues.append(lam / total)
        idempotents.append(element_from_reps(alg, reps))

    decomposition = SpectralDecomposition(
        eigenvalues=np.array(eigenvalues),
        idempotents=tuple(idempotents),
    )
    a._spectral_cache[group_tol] = decomposition
    return decomposition


def seed_spectral_cache(
    a: JordanElement,
    decomposition: SpectralDecomposition,
    group_tol: float = DEFAULT_GROUP_TOL,
) -> None:
    """Install a decomposition computed by other exact means (tensor
    products, clipping) so later spectral calls reuse it."""
    a._spectral_cache[group_tol] = decomposition


def apply_function(
    a: JordanElement,
    f: Callable[[float], float],
    domain: Callable[[float], bool] | None = None,
    group_tol: float = DEFAULT_GROUP_TOL,
) -> JordanElement:
    """Evaluate a scalar function through the spectral decomposition.

    When ``domain`` is given, every eigenvalue must satisfy it; the first
    offender is reported in a :class:`DomainError`.
    """
    dec = spectral_decompose(a, group_tol)
    coeffs = np.zeros(a.algebra.dim)
    for lam, e in zip(dec.eigenvalues, dec.idempotents):
        if domain is not None and not domain(lam):
            raise DomainError(
                f"eigenvalue {lam!r} outside the domain of {f!r}", value=lam
            )
        coeffs += float(f(lam)) * e.coeffs
    return JordanElement(a.algebra, coeffs)


def embed_quaternion(a: JordanElement) -> JordanElement:
    """Symplectic embedding of a quaternionic element into complex
    Hermitian matrices of twice the size.

    The embedding is a unital Jordan homomorphism that doubles traces and
    preserves eigenvalues with doubled multiplicity.
    """
    if len(a.algebra.summands) != 1 or a.algebra.summands[0].kind != "quaternion":
        raise AlgebraMismatchError(
            f"expected a single quaternion summand, got {a.algebra}"
        )
    n = a.algebra.summands[0].size
    cm = _quaternion_to_complex_embedding(a.reps()[0])
    return element_from_reps(complex_hermitian(2 * n), [cm])
