"""Real (k,l)-tensors over a single finite-dimensional space, with a metric.

Components are stored densely with one numpy axis per index; the variance
tuple says, slot by slot, whether an index is contravariant (``UP``) or
covariant (``DOWN``).  The order of the variance tuple is authoritative:
a ``[DOWN, UP]`` tensor is not silently reordered.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    DimMismatch,
    InvalidMetric,
    SingularBasisChange,
    SlotOutOfRange,
    VarianceMismatch,
    ZeroNorm,
)

SYMMETRY_TOL = 1e-12
INVERSE_TOL = 1e-9


class Variance(str, Enum):
    UP = "up"
    DOWN = "down"

    def flipped(self) -> "Variance":
        return Variance.DOWN if self is Variance.UP else Variance.UP


UP, DOWN = Variance.UP, Variance.DOWN


@dataclass(frozen=True, eq=False)
class Tensor:
    dim: int
    variance: tuple[Variance, ...]
    components: np.ndarray

    def __post_init__(self):
        if self.dim <= 0:
            raise DimMismatch("tensor dimension must be positive")
        variance = tuple(Variance(v) for v in self.variance)
        comps = np.array(self.components, dtype=float)
        shape = (self.dim,) * len(variance)
        if comps.size != self.dim ** len(variance):
            raise DimMismatch(f"expected {self.dim ** len(variance)} components, got {comps.size}")
        comps = comps.reshape(shape)
        comps.setflags(write=False)
        object.__setattr__(self, "variance", variance)
        object.__setattr__(self, "components", comps)

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def kind(self) -> tuple[int, int]:
        """``(k, l)``: number of up and down indices."""
        k = sum(v is UP for v in self.variance)
        return k, self.rank - k

    def allclose(self, other: "Tensor", atol: float = 1e-12) -> bool:
        return (
            self.dim == other.dim
            and self.variance == other.variance
            and np.allclose(self.components, other.components, rtol=0, atol=atol)
        )

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "variance": [v.value for v in self.variance],
            "components": [float(x) for x in self.components.ravel()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Tensor":
        return cls(int(data["dim"]), tuple(data["variance"]), np.asarray(data["components"], float))

    def __repr__(self):
        return f"Tensor(dim={self.dim}, variance={[v.value for v in self.variance]})"


def vector(components: Sequence[float]) -> Tensor:
    comps = np.asarray(components, dtype=float)
    return Tensor(comps.size, (UP,), comps)


def covector(components: Sequence[float]) -> Tensor:
    comps = np.asarray(components, dtype=float)
    return Tensor(comps.size, (DOWN,), comps)


def scalar_value(t: Tensor) -> float:
    if t.rank:
        raise VarianceMismatch(f"expected a scalar, got rank {t.rank}")
    return float(t.components)


@dataclass(frozen=True, eq=False)
class Metric:
    """Symmetric nondegenerate bilinear form; ``d`` covariant, ``dinv`` contravariant."""

    d: np.ndarray
    dinv: np.ndarray

    @classmethod
    def from_matrix(cls, d) -> "Metric":
        d = np.array(d, dtype=float)
        if d.ndim == 1:
            n = int(round(np.sqrt(d.size)))
            if n * n != d.size:
                raise InvalidMetric(f"{d.size} entries do not form a square matrix")
            d = d.reshape(n, n)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise InvalidMetric(f"metric must be a non-empty square matrix, got shape {d.shape}")
        if not np.allclose(d, d.T, rtol=0, atol=SYMMETRY_TOL):
            raise InvalidMetric("metric is not symmetric")
        try:
            dinv = np.linalg.inv(d)
        except np.linalg.LinAlgError as exc:
            raise InvalidMetric("metric is degenerate") from exc
        dinv = (dinv + dinv.T) / 2
        if not np.allclose(d @ dinv, np.eye(len(d)), rtol=0, atol=INVERSE_TOL):
            raise InvalidMetric("metric is numerically degenerate")
        d.setflags(write=False)
        dinv.setflags(write=False)
        return cls(d, dinv)

    @classmethod
    def identity(cls, dim: int) -> "Metric":
        return cls.from_matrix(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.d.shape[0]

    def inverse(self) -> "Metric":
        """The metric whose covariant components are this one's ``dinv``."""
        return Metric(self.dinv, self.d)

    def to_json(self) -> dict:
        return {"dim": self.dim, "d": [float(x) for x in self.d.ravel()]}

    @classmethod
    def from_json(cls, data: dict) -> "Metric":
        m = cls.from_matrix(np.asarray(data["d"], float))
        if "dim" in data and int(data["dim"]) != m.dim:
            raise InvalidMetric(f"dim {data['dim']} does not match {m.dim}x{m.dim} matrix")
        return m

    def __repr__(self):
        return f"Metric(d={self.d.tolist()})"


def _check_dim(*items):
    dims = {x.dim for x in items}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")


def _check_kind(t: Tensor, variance: tuple, what: str):
    if t.variance != variance:
        raise VarianceMismatch(f"{what} must have variance {[v.value for v in variance]}")


# ---------------------------------------------------------------------------
# algebra


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    _check_dim(a, b)
    return Tensor(a.dim, a.variance + b.variance, np.multiply.outer(a.components, b.components))


def contract(t: Tensor, up_slot: int, down_slot: int) -> Tensor:
    """Pair an upper with a lower index and sum over it."""
    for s in (up_slot, down_slot):
        if not 0 <= s < t.rank:
            raise SlotOutOfRange(f"slot {s} out of range for rank {t.rank}")
    if up_slot == down_slot:
        raise SlotOutOfRange("cannot contract a slot with itself")
    if t.variance[up_slot] is not UP or t.variance[down_slot] is not DOWN:
        raise VarianceMismatch("contraction pairs one UP slot with one DOWN slot")
    comps = np.trace(t.components, axis1=up_slot, axis2=down_slot)
    rest = tuple(v for i, v in enumerate(t.variance) if i not in (up_slot, down_slot))
    return Tensor(t.dim, rest, comps)


def inner_product(m: Metric, v: Tensor, w: Tensor) -> float:
    _check_dim(m, v, w)
    _check_kind(v, (UP,), "v")
    _check_kind(w, (UP,), "w")
    return float(v.components @ m.d @ w.components)


def norm(m: Metric, v: Tensor) -> float:
    sq = inner_product(m, v, v)
    if sq <= 0:
        raise ZeroNorm(f"vector has non-positive squared norm {sq}")
    return float(np.sqrt(sq))


def cosine_similarity(m: Metric, v: Tensor, w: Tensor) -> float:
    return inner_product(m, v, w) / (norm(m, v) * norm(m, w))


def dual_vector(m: Metric, v: Tensor) -> Tensor:
    """``d(-, v)`` as a covector."""
    _check_dim(m, v)
    _check_kind(v, (UP,), "v")
    return Tensor(v.dim, (DOWN,), np.einsum("jk,j->k", m.d, v.components))


def _apply_to_slot(matrix: np.ndarray, t: Tensor, slot: int, new: Variance) -> Tensor:
    comps = np.moveaxis(np.tensordot(matrix, t.components, axes=([1], [slot])), 0, slot)
    variance = t.variance[:slot] + (new,) + t.variance[slot + 1:]
    return Tensor(t.dim, variance, comps)


def lower_index(m: Metric, t: Tensor, slot: int) -> Tensor:
    """``sum_j' d[j, j'] T[.., j', ..]`` with the slot turned covariant."""
    _check_dim(m, t)
    if not 0 <= slot < t.rank:
        raise SlotOutOfRange(f"slot {slot} out of range for rank {t.rank}")
    if t.variance[slot] is not UP:
        raise VarianceMismatch("can only lower an UP index")
    return _apply_to_slot(m.d, t, slot, DOWN)


def raise_index(m: Metric, t: Tensor, slot: int) -> Tensor:
    _check_dim(m, t)
    if not 0 <= slot < t.rank:
        raise SlotOutOfRange(f"slot {slot} out of range for rank {t.rank}")
    if t.variance[slot] is not DOWN:
        raise VarianceMismatch("can only raise a DOWN index")
    return _apply_to_slot(m.dinv, t, slot, UP)


def canonicalize_mixed(m: Metric, t: Tensor) -> Tensor:
    """Turn a ``[DOWN, UP]`` tensor into its ``[UP, DOWN]`` form.

    ``R^i_j = sum d^{i i'} d_{j j'} T_{i'}^{j'}``: the lower index is raised
    and the upper one lowered, so ``R = d^-1 T d`` as matrices.  With the
    Euclidean metric the numbers are unchanged and only the index roles swap.
    """
    _check_dim(m, t)
    _check_kind(t, (DOWN, UP), "t")
    comps = np.einsum("ia,jb,ab->ij", m.dinv, m.d, t.components)
    return Tensor(t.dim, (UP, DOWN), comps)


def decanonicalize_mixed(m: Metric, t: Tensor) -> Tensor:
    """Inverse of :func:`canonicalize_mixed`: ``T = d R d^-1``."""
    _check_dim(m, t)
    _check_kind(t, (UP, DOWN), "t")
    comps = np.einsum("ia,jb,ab->ij", m.d, m.dinv, t.components)
    return Tensor(t.dim, (DOWN, UP), comps)


# ---------------------------------------------------------------------------
# basis change


@dataclass(frozen=True, eq=False)
class BasisChange:
    """``e_i = sum_i' L[i, i'] e'_i'``; components go ``v'^i' = sum_i v^i L[i, i']``."""

    matrix: np.ndarray

    def __post_init__(self):
        lam = np.array(self.matrix, dtype=float)
        if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
            raise SingularBasisChange("basis change must be square")
        if abs(np.linalg.det(lam)) <= 1e-12:
            raise SingularBasisChange("basis change is singular")
        lam.setflags(write=False)
        object.__setattr__(self, "matrix", lam)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def transform_vector(bc: BasisChange, v: Tensor) -> Tensor:
    _check_dim(bc, v)
    _check_kind(v, (UP,), "v")
    return Tensor(v.dim, (UP,), bc.matrix.T @ v.components)


def transform_metric(bc: BasisChange, m: Metric) -> Metric:
    # new components use the inverse pair so that d'(v', w') = d(v, w)
    _check_dim(bc, m)
    half = np.linalg.solve(bc.matrix, m.d)
    d_new = np.linalg.solve(bc.matrix, half.T).T
    return Metric.from_matrix((d_new + d_new.T) / 2)


# ---------------------------------------------------------------------------
# cups and caps


def eta_l(m: Metric) -> Tensor:
    """Unit into V (x) V*: ``sum d^{i i'} e_i (x) d(e_i', -)``."""
    inverse_metric = Tensor(m.dim, (UP, UP), m.dinv)
    return lower_index(m, inverse_metric, 1)


def eta_r(m: Metric) -> Tensor:
    """Unit into V* (x) V: ``sum d^{i i'} d(-, e_i) (x) e_i'``."""
    inverse_metric = Tensor(m.dim, (UP, UP), m.dinv)
    return lower_index(m, inverse_metric, 0)


def eps_l(dual: Tensor, u: Tensor) -> float:
    """Counit on V* (x) V: ``d(-, v) (x) u -> d(u, v)``."""
    _check_dim(dual, u)
    _check_kind(dual, (DOWN,), "dual")
    _check_kind(u, (UP,), "u")
    return scalar_value(contract(tensor_product(dual, u), 1, 0))


def eps_r(v: Tensor, dual: Tensor) -> float:
    """Counit on V (x) V*: ``v (x) d(u, -) -> d(u, v)``."""
    _check_dim(dual, v)
    _check_kind(dual, (DOWN,), "dual")
    _check_kind(v, (UP,), "v")
    return scalar_value(contract(tensor_product(v, dual), 0, 1))


def snake_l(m: Metric, v: Tensor) -> Tensor:
    """``(id (x) eps_l) . (eta_l (x) id)`` applied to ``v``."""
    return contract(tensor_product(eta_l(m), v), 2, 1)


def snake_r(m: Metric, v: Tensor) -> Tensor:
    """``(eps_r (x) id) . (id (x) eta_r)`` applied to ``v``."""
    return contract(tensor_product(v, eta_r(m)), 0, 1)
