"""Density-matrix spaces built over labelled copies of base vector spaces.

A ``DMTensor`` is an ordered list of factors.  Each factor is one density
matrix space ``V (x) V*`` (STANDARD) or its dual (DUAL) and contributes a
pair of numpy axes.  A STANDARD pair is stored ``(i, i')`` for
``X^{ii'} |i><i'|`` and a DUAL pair is stored ``(j', j)`` for
``X_{j'j} |^j'><^j|``.  With this layout the pairing of a dual element ``Y``
with a standard element ``X`` is ``sum Y[a, b] X[b, a] = Tr(Y X)``.

Factors carry a label (which base space) and a subsystem id; contraction
only ever happens between factors agreeing on both.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    FactorMismatch,
    FactorNotFound,
    NoContractibleBoundary,
    ShapeMismatch,
    VarianceMismatch,
    WeightError,
)
from .tensor import UP, Metric, Tensor


class FactorVariance(str, Enum):
    STANDARD = "standard"
    DUAL = "dual"
    # left behind by dm_multiply before the closing trace
    RESIDUE = "residue"

    def flipped(self) -> "FactorVariance":
        if self is FactorVariance.STANDARD:
            return FactorVariance.DUAL
        if self is FactorVariance.DUAL:
            return FactorVariance.STANDARD
        raise VarianceMismatch("a residue factor has no dual")


STANDARD, DUAL, RESIDUE = FactorVariance.STANDARD, FactorVariance.DUAL, FactorVariance.RESIDUE


@dataclass(frozen=True)
class SpaceFactor:
    label: str
    subsystem: int = 0
    variance: FactorVariance = STANDARD
    dim: int = 2

    def __post_init__(self):
        if self.dim <= 0:
            raise DimMismatch("factor dimension must be positive")
        object.__setattr__(self, "variance", FactorVariance(self.variance))

    def flipped(self) -> "SpaceFactor":
        return replace(self, variance=self.variance.flipped())

    def with_subsystem(self, subsystem: int) -> "SpaceFactor":
        return replace(self, subsystem=subsystem)

    def pairs_with(self, other: "SpaceFactor") -> bool:
        return (
            {self.variance, other.variance} == {STANDARD, DUAL}
            and self.label == other.label
            and self.subsystem == other.subsystem
            and self.dim == other.dim
        )

    def __str__(self):
        mark = {STANDARD: "", DUAL: "*", RESIDUE: "~"}[self.variance]
        return f"{self.label}{self.subsystem}{mark}"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "subsystem": self.subsystem,
            "variance": self.variance.value,
            "dim": self.dim,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SpaceFactor":
        return cls(str(data["label"]), int(data["subsystem"]), FactorVariance(data["variance"]), int(data["dim"]))


def shape_of(factors: Sequence[SpaceFactor]) -> tuple[int, ...]:
    return tuple(n for f in factors for n in (f.dim, f.dim))


@dataclass(frozen=True, eq=False)
class DMTensor:
    factors: tuple[SpaceFactor, ...]
    components: np.ndarray

    def __post_init__(self):
        factors = tuple(self.factors)
        shape = shape_of(factors)
        comps = np.array(self.components, dtype=float)
        if comps.size != int(np.prod(shape, dtype=int)):
            raise ShapeMismatch(
                f"factors {[str(f) for f in factors]} need {int(np.prod(shape, dtype=int))} components, got {comps.size}"
            )
        comps = comps.reshape(shape)
        comps.setflags(write=False)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "components", comps)

    @property
    def scalar(self) -> float:
        if self.factors:
            raise ShapeMismatch("tensor still has open factors")
        return float(self.components)

    def allclose(self, other: "DMTensor", atol: float = 1e-12) -> bool:
        return self.factors == other.factors and np.allclose(
            self.components, other.components, rtol=0, atol=atol
        )

    def relabel(self, subsystems: Sequence[int]) -> "DMTensor":
        if len(subsystems) != len(self.factors):
            raise ShapeMismatch("one subsystem id per factor is required")
        factors = tuple(f.with_subsystem(s) for f, s in zip(self.factors, subsystems))
        return DMTensor(factors, self.components)

    def to_json(self) -> dict:
        return {
            "factors": [f.to_json() for f in self.factors],
            "components": [float(x) for x in self.components.ravel()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DMTensor":
        factors = tuple(SpaceFactor.from_json(f) for f in data["factors"])
        return cls(factors, np.asarray(data["components"], float))

    def __repr__(self):
        return f"DMTensor([{', '.join(str(f) for f in self.factors)}])"


def scalar_dm(value: float) -> DMTensor:
    return DMTensor((), np.asarray(float(value)))


def basis_element(factors: Sequence[SpaceFactor], index: Sequence[int]) -> DMTensor:
    comps = np.zeros(shape_of(factors))
    comps[tuple(index)] = 1.0
    return DMTensor(tuple(factors), comps)


def identity_dm(factor: SpaceFactor) -> DMTensor:
    """The delta-component element of a single factor."""
    return DMTensor((factor,), np.eye(factor.dim))


# ---------------------------------------------------------------------------
# construction


def dm_from_vector(v: Tensor, factor: SpaceFactor) -> DMTensor:
    """Pure state ``X^{ii'} = v^i v^i'``."""
    if v.variance != (UP,):
        raise VarianceMismatch("dm_from_vector expects a contravariant vector")
    if factor.variance is not STANDARD:
        raise VarianceMismatch("dm_from_vector builds a STANDARD factor")
    if v.dim != factor.dim:
        raise DimMismatch(f"vector has dim {v.dim}, factor {factor} has dim {factor.dim}")
    return DMTensor((factor,), np.outer(v.components, v.components))


def dm_mix(weights: Sequence[float], dms: Sequence[DMTensor]) -> DMTensor:
    weights = [float(w) for w in weights]
    if not dms or len(weights) != len(dms):
        raise WeightError("need one weight per density matrix")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise WeightError(f"weights must be non-negative and sum to 1, got {weights}")
    factors = dms[0].factors
    if any(dm.factors != factors for dm in dms):
        raise ShapeMismatch("mixed density matrices must share their factors")
    comps = sum(w * dm.components for w, dm in zip(weights, dms))
    return DMTensor(factors, comps)


def dm_validate(t: DMTensor, tol: float = 1e-9) -> list[str]:
    """Problems preventing ``t`` from being a physical state; empty if none."""
    if any(f.variance is RESIDUE for f in t.factors):
        return ["tensor has an untraced residue factor"]
    n = len(t.factors)
    rows = int(np.prod([f.dim for f in t.factors], dtype=int))
    mat = np.transpose(t.components, [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])
    mat = mat.reshape(rows, rows)
    problems = []
    if not np.allclose(mat, mat.T, rtol=0, atol=1e-12):
        problems.append("not symmetric")
    elif np.linalg.eigvalsh(mat).min() < -tol:
        problems.append("not positive semidefinite")
    if abs(np.trace(mat) - 1.0) > tol:
        problems.append(f"trace {np.trace(mat):.6g} is not 1")
    return problems


# ---------------------------------------------------------------------------
# multiplication and traces


def dm_multiply(a: DMTensor, b: DMTensor) -> DMTensor:
    """Matrix-multiply ``a``'s last factor into ``b``'s first factor.

    The two boundary factors must be a STANDARD/DUAL pair on the same label
    and subsystem.  They merge into one RESIDUE factor holding
    ``sum_c A[.., p, c] B[c, q, ..]``; the surviving factors keep their order.
    """
    if not a.factors or not b.factors:
        raise NoContractibleBoundary("both operands need at least one factor")
    fa, fb = a.factors[-1], b.factors[0]
    if not fa.pairs_with(fb):
        raise NoContractibleBoundary(f"cannot contract {fa} with {fb}")
    comps = np.tensordot(a.components, b.components, axes=([a.components.ndim - 1], [0]))
    residue = replace(fa, variance=RESIDUE)
    return DMTensor(a.factors[:-1] + (residue,) + b.factors[1:], comps)


def _find_factor(t: DMTensor, target, variance=None) -> int:
    if isinstance(target, int):
        if not 0 <= target < len(t.factors):
            raise FactorNotFound(f"no factor at position {target}")
        return target
    if isinstance(target, SpaceFactor):
        key = (target.label, target.subsystem)
    else:
        key = tuple(target)
    for k, f in enumerate(t.factors):
        if (f.label, f.subsystem) == key and (variance is None or f.variance is variance):
            return k
    raise FactorNotFound(f"no factor {key[0]}{key[1]} in {t!r}")


def dm_trace(t: DMTensor, target=None) -> DMTensor:
    """Close a residue factor by summing its diagonal.

    ``target`` selects the factor by position, by ``SpaceFactor`` or by a
    ``(label, subsystem)`` pair; by default the only residue is used.  A
    tensor made of a single plain factor may also be traced directly.
    """
    if target is None:
        residues = [k for k, f in enumerate(t.factors) if f.variance is RESIDUE]
        if len(residues) == 1:
            k = residues[0]
        elif not residues and len(t.factors) == 1:
            k = 0
        else:
            raise FactorNotFound(f"no unique residue factor to trace in {t!r}")
    else:
        k = _find_factor(t, target, RESIDUE if len(t.factors) > 1 else None)
        if t.factors[k].variance is not RESIDUE and len(t.factors) > 1:
            raise FactorNotFound(f"factor {t.factors[k]} is not a residue")
    comps = np.trace(t.components, axis1=2 * k, axis2=2 * k + 1)
    return DMTensor(t.factors[:k] + t.factors[k + 1 :], comps)


def dm_contract(t: DMTensor, left: int, right: int | None = None) -> DMTensor:
    """Pair factor ``left`` with factor ``right`` (default ``left + 1``) of one tensor.

    This is ``dm_trace`` of the matrix product of the two factors, for
    factors already living in the same tensor.
    """
    right = left + 1 if right is None else right
    if left == right or not (0 <= left < len(t.factors) and 0 <= right < len(t.factors)):
        raise FactorNotFound(f"bad factor positions {left}, {right}")
    fl, fr = t.factors[left], t.factors[right]
    if not fl.pairs_with(fr):
        raise FactorMismatch(f"cannot contract {fl} with {fr}")
    n = t.components.ndim
    letters = string.ascii_letters
    idx = list(letters[:n])
    a, b = idx[2 * left], idx[2 * left + 1]
    idx[2 * right], idx[2 * right + 1] = b, a
    out = [c for k, c in enumerate(idx) if k // 2 not in (left, right)]
    comps = np.einsum("".join(idx) + "->" + "".join(out), t.components)
    factors = tuple(f for k, f in enumerate(t.factors) if k not in (left, right))
    return DMTensor(factors, comps)


def pairing(y: DMTensor, x: DMTensor) -> float:
    """``Tr(Y X)`` for two single-factor tensors."""
    return dm_trace(dm_multiply(y, x)).scalar


# ---------------------------------------------------------------------------
# the lifted metric


@dataclass(frozen=True, eq=False)
class BigMetric:
    """Metric on a density matrix space induced by a metric on the base space."""

    base: Metric

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def D(self) -> np.ndarray:
        """Flattened components ``D[(j', j), (i, i')] = d_{i j'} d_{i' j}``."""
        n, d = self.dim, self.base.d
        return np.einsum("ia,kb->abik", d, d).reshape(n * n, n * n)

    @property
    def Dinv(self) -> np.ndarray:
        n, e = self.dim, self.base.dinv
        return np.einsum("ia,kb->abik", e, e).reshape(n * n, n * n)

    def lower_flat(self, comps: np.ndarray) -> np.ndarray:
        """``T_J = sum_J' D_{JJ'} T^{J'}`` on flattened pair indices."""
        n = self.dim
        return (self.D @ np.asarray(comps, float).reshape(n * n)).reshape(n, n)

    def lower_explicit(self, comps: np.ndarray) -> np.ndarray:
        """Same map written with the base metric and explicit Kronecker deltas."""
        d, n = self.base.d, self.dim
        delta = np.eye(n)
        return np.einsum("ik,jl,kq,lp,ij->qp", delta, delta, d, d, np.asarray(comps, float))

    def raise_flat(self, comps: np.ndarray) -> np.ndarray:
        n = self.dim
        return (self.Dinv @ np.asarray(comps, float).reshape(n * n)).reshape(n, n)


def _single(t: DMTensor, variance: FactorVariance, D: BigMetric) -> SpaceFactor:
    if len(t.factors) != 1 or t.factors[0].variance is not variance:
        raise VarianceMismatch(f"expected a single {variance.value} factor, got {t!r}")
    if t.factors[0].dim != D.dim:
        raise DimMismatch(f"factor dim {t.factors[0].dim} vs metric dim {D.dim}")
    return t.factors[0]


def big_metric_apply(D: BigMetric, t: DMTensor, form: str = "flat") -> DMTensor:
    """``D(-, T)``: ``T_{j'j} = sum T^{ii'} d_{ij'} d_{i'j}``, stored at ``[j', j]``."""
    f = _single(t, STANDARD, D)
    if form == "flat":
        comps = D.lower_flat(t.components)
    elif form == "explicit":
        comps = D.lower_explicit(t.components)
    else:
        raise ValueError(f"unknown form {form!r}")
    return DMTensor((f.flipped(),), comps)


def big_metric_raise(D: BigMetric, t: DMTensor) -> DMTensor:
    """Inverse of :func:`big_metric_apply`."""
    f = _single(t, DUAL, D)
    return DMTensor((f.flipped(),), D.raise_flat(t.components))


def _metric_for(metrics: Mapping[str, Metric] | None, f: SpaceFactor) -> Metric:
    m = (metrics or {}).get(f.label)
    if m is None:
        return Metric.identity(f.dim)
    if m.dim != f.dim:
        raise DimMismatch(f"metric for {f.label} has dim {m.dim}, factor has {f.dim}")
    return m


def _convert_pair(comps: np.ndarray, k: int, M: np.ndarray) -> np.ndarray:
    n = comps.ndim
    letters = string.ascii_letters[:n]
    a, b = "Y", "Z"
    src = list(letters)
    dst = list(letters)
    dst[2 * k], dst[2 * k + 1] = a, b
    subscripts = f"{src[2 * k]}{a},{src[2 * k + 1]}{b},{''.join(src)}->{''.join(dst)}"
    return np.einsum(subscripts, M, M, comps)


def dual_functor(t: DMTensor, metrics: Mapping[str, Metric] | None = None) -> DMTensor:
    """Reverse the factor order, flip every variance and convert the components.

    STANDARD pairs are lowered with the lifted metric, DUAL pairs raised with
    its inverse; ``metrics`` maps space labels to base metrics (identity by
    default).  The map is an involution.
    """
    n = len(t.factors)
    perm = [ax for k in reversed(range(n)) for ax in (2 * k, 2 * k + 1)]
    comps = np.transpose(t.components, perm)
    factors = tuple(reversed(t.factors))
    for k, f in enumerate(factors):
        m = _metric_for(metrics, f)
        if f.variance is STANDARD:
            comps = _convert_pair(comps, k, m.d)
        elif f.variance is DUAL:
            comps = _convert_pair(comps, k, m.dinv)
        else:
            raise VarianceMismatch("cannot dualize a residue factor")
    return DMTensor(tuple(f.flipped() for f in factors), comps)


def directional_swap(t: DMTensor, metrics: Mapping[str, Metric] | None = None) -> DMTensor:
    """Send a two-factor tensor across the canonical isomorphism, factor by factor.

    ``F[I, J] = sum D^{II'} D_{JJ'} G[I', J']``: a DUAL pair is raised with the
    lifted inverse metric and a STANDARD pair lowered with the lifted metric,
    so ``B* (x) A`` becomes ``B (x) A*``.  This is the density-level version of
    the base-space symmetry map ``canonicalize_mixed`` and, like it, leaves the
    numbers alone under the identity metric.
    """
    if len(t.factors) != 2:
        raise ShapeMismatch("directional_swap needs exactly two factors")
    if {f.variance for f in t.factors} != {STANDARD, DUAL}:
        raise VarianceMismatch("directional_swap needs one STANDARD and one DUAL factor")
    comps = t.components
    for k, f in enumerate(t.factors):
        m = _metric_for(metrics, f)
        comps = _convert_pair(comps, k, m.dinv if f.variance is DUAL else m.d)
    return DMTensor(tuple(f.flipped() for f in t.factors), comps)


# ---------------------------------------------------------------------------
# subsystems and permutations


class PermutationKind(str, Enum):
    UPPER = "upper"
    LOWER = "lower"


UPPER, LOWER = PermutationKind.UPPER, PermutationKind.LOWER


@dataclass(frozen=True)
class PermutationOp:
    kind: PermutationKind
    subsystems: tuple[int, int]
    label: str | None = None

    def __post_init__(self):
        a, b = self.subsystems
        if a == b:
            raise ValueError("a permutation needs two distinct subsystems")
        object.__setattr__(self, "kind", PermutationKind(self.kind))
        object.__setattr__(self, "subsystems", (int(a), int(b)))

    def swap(self, subsystem: int) -> int:
        a, b = self.subsystems
        return b if subsystem == a else a if subsystem == b else subsystem

    def applies_to(self, f: SpaceFactor) -> bool:
        if self.label is not None and f.label != self.label:
            return False
        return f.variance is (STANDARD if self.kind is UPPER else DUAL)

    def __str__(self):
        a, b = sorted(self.subsystems)
        return f"P^{a}{b}" if self.kind is UPPER else f"P_{a}{b}"


def apply_permutation(p: PermutationOp, t: DMTensor, trace_target=None):
    """Swap subsystem ids on the legs ``p`` acts on.

    UPPER operators act on STANDARD legs and LOWER operators on DUAL legs;
    residue factors are left alone.  If ``trace_target`` is given it is
    retargeted too and the pair ``(tensor, new_target)`` is returned.
    """
    factors = tuple(
        f.with_subsystem(p.swap(f.subsystem)) if p.applies_to(f) else f for f in t.factors
    )
    out = t if factors == t.factors else DMTensor(factors, t.components)
    if trace_target is None:
        return out
    return out, retarget_trace(p, trace_target)


def retarget_trace(p: PermutationOp, target):
    """Move a trace target ``(label, subsystem)`` or a set of subsystem ids."""
    if isinstance(target, SpaceFactor):
        if p.label is not None and target.label != p.label:
            return target
        return target.with_subsystem(p.swap(target.subsystem))
    if isinstance(target, (set, frozenset)):
        return frozenset(p.swap(s) for s in target)
    label, subsystem = target
    if p.label is not None and label != p.label:
        return target
    return (label, p.swap(subsystem))


def contract_network(tensors: Iterable[DMTensor], traced: Iterable[int]) -> DMTensor:
    """Contract a set of tensors in one go.

    Every subsystem id in ``traced`` must occur on exactly one STANDARD and
    one DUAL factor per label; those two are paired.  The other factors stay
    open, in the order of the input tensors.
    """
    tensors = list(tensors)
    traced = set(traced)
    symbols = iter(string.ascii_letters)
    open_slots: dict[tuple[str, int], list] = {}
    operands, out, out_factors = [], [], []
    for t in tensors:
        sub = []
        for f in t.factors:
            if f.variance is RESIDUE:
                raise VarianceMismatch("close residues before contracting a network")
            if f.subsystem in traced:
                key = (f.label, f.subsystem)
                slot = open_slots.setdefault(key, [])
                slot.append(f)
                if len(slot) == 1:
                    a, b = next(symbols), next(symbols)
                    slot.append((a, b))
                    sub += [a, b]
                elif len(slot) == 3:
                    first = slot[0]
                    if not first.pairs_with(f):
                        raise FactorMismatch(f"cannot contract {first} with {f}")
                    a, b = slot[1]
                    sub += [b, a]
                else:
                    raise FactorMismatch(f"subsystem {f.label}{f.subsystem} occurs more than twice")
            else:
                a, b = next(symbols), next(symbols)
                sub += [a, b]
                out += [a, b]
                out_factors.append(f)
        operands += [t.components, sub]
    for key, slot in open_slots.items():
        if len(slot) != 3:
            raise FactorMismatch(f"traced subsystem {key[0]}{key[1]} has no partner")
    subscripts = ",".join("".join(s) for s in operands[1::2]) + "->" + "".join(out)
    comps = np.einsum(subscripts, *operands[0::2], optimize=True)
    return DMTensor(tuple(out_factors), comps)
