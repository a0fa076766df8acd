"""Exact discrete probability machinery on named dense tensors.

Everything downstream (region solvers, codebooks, adversaries) manipulates
joint distributions over small named alphabets.  This module provides the
carrier type :class:`JointDist` plus the handful of exact functionals the rest
of the package needs: marginalization, conditioning, composition from
conditional factors, Shannon entropy and mutual information (base-2, bits),
and payoff expectations against an attack map.

Conventions
-----------
* log base 2 everywhere; rates and entropies are bits per symbol.
* ``0 * log 0 == 0``; conditionals on zero-probability events are defined as
  uniform (they are never consulted by any measure because they carry zero
  weight).
* Tensors are dense; alphabets at desk scale are expected to stay below ~8
  symbols per axis, where exhaustive oracles dominate cost anyway.
* Normalization drift beyond ``NORM_TOL`` is an error, never silently
  renormalized: drift surfaces solver bugs.

All values are immutable after construction and safe to share across parallel
workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import xlogy

__all__ = [
    "NORM_TOL",
    "AxisError",
    "DistributionError",
    "Axis",
    "JointDist",
    "PayoffTensor",
    "from_pmf",
    "compose",
    "marginalize",
    "condition",
    "entropy",
    "mutual_information",
    "expected_payoff",
    "markov_defect",
]

NORM_TOL = 1e-9
_LN2 = float(np.log(2.0))


class AxisError(KeyError):
    """An axis name is unknown to the distribution at hand."""


class DistributionError(ValueError):
    """Mass tensor violates nonnegativity or normalization."""


@dataclass(frozen=True)
class Axis:
    """A named finite alphabet."""

    name: str
    size: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("axis name must be non-empty")
        if self.size < 1:
            raise ValueError(f"axis {self.name!r} must have size >= 1")


@dataclass(frozen=True)
class PayoffTensor:
    """Per-symbol payoff pi(x, y, z); finite real entries."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3:
            raise ValueError("payoff tensor must be indexed (x, y, z)")
        if not np.all(np.isfinite(v)):
            raise ValueError("payoff tensor entries must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape


@dataclass(frozen=True)
class JointDist:
    """A joint pmf over an ordered tuple of named axes.

    Invariants enforced at construction: one tensor dimension per axis, axis
    names unique, every entry >= 0, total mass within ``NORM_TOL`` of 1.
    """

    axes: tuple[Axis, ...]
    mass: np.ndarray

    def __post_init__(self):
        axes = tuple(self.axes)
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names: {names}")
        m = np.asarray(self.mass, dtype=np.float64)
        if m.shape != tuple(a.size for a in axes):
            raise DistributionError(
                f"mass shape {m.shape} does not match axes {[(a.name, a.size) for a in axes]}"
            )
        m = m.copy()
        tiny = (m < 0) & (m > -1e-12)
        if tiny.any():
            m[tiny] = 0.0
        if (m < 0).any():
            raise DistributionError("negative probability mass")
        total = float(m.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise DistributionError(f"total mass {total!r} drifts from 1 by more than {NORM_TOL}")
        m.flags.writeable = False
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "mass", m)

    # -- axis bookkeeping ----------------------------------------------------
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    def axis(self, name: str) -> Axis:
        for a in self.axes:
            if a.name == name:
                return a
        raise AxisError(name)

    def index(self, name: str) -> int:
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        raise AxisError(name)

    def size(self, name: str) -> int:
        return self.axis(name).size

    def _indices(self, names: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.index(n) for n in names)


def from_pmf(name: str, probs) -> JointDist:
    """One-axis distribution from a probability vector."""
    p = np.asarray(probs, dtype=np.float64)
    return JointDist((Axis(name, p.shape[0]),), p)


def marginalize(d: JointDist, keep: Sequence[str]) -> JointDist:
    """Marginal over the named axes, returned in the requested order."""
    keep = tuple(keep)
    idx = d._indices(keep)
    drop = tuple(i for i in range(len(d.axes)) if i not in idx)
    m = d.mass.sum(axis=drop) if drop else d.mass
    # reorder surviving axes to the requested order
    survivors = [i for i in range(len(d.axes)) if i not in drop]
    order = [survivors.index(i) for i in idx]
    m = np.transpose(m, order)
    return JointDist(tuple(d.axes[i] for i in idx), m)


def condition(d: JointDist, targets: Sequence[str], given: Sequence[str]) -> np.ndarray:
    """Conditional tensor p(targets | given), shaped (given..., targets...).

    Rows attached to zero-probability conditioning events are uniform.
    """
    targets, given = tuple(targets), tuple(given)
    _check_disjoint(targets, given)
    joint = marginalize(d, given + targets).mass
    g_sizes = joint.shape[: len(given)]
    t_sizes = joint.shape[len(given):]
    flat = joint.reshape(int(np.prod(g_sizes, dtype=int)) if given else 1, -1)
    row_mass = flat.sum(axis=1, keepdims=True)
    n_t = flat.shape[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(row_mass > 0, flat / np.where(row_mass > 0, row_mass, 1.0), 1.0 / n_t)
    return cond.reshape(g_sizes + t_sizes) if given else cond.reshape(t_sizes)


def compose(base: JointDist, cond: np.ndarray, given: Sequence[str], new_axes: Sequence[Axis]) -> JointDist:
    """Extend ``base`` by conditional factors: p(base) * cond(new | given).

    ``cond`` is shaped (given axes..., new axes...) and each (given...) row
    must be a pmf over the new axes.  The result carries base.axes + new_axes.
    """
    given = tuple(given)
    new_axes = tuple(new_axes)
    cond = np.asarray(cond, dtype=np.float64)
    expected = tuple(base.axis(n).size for n in given) + tuple(a.size for a in new_axes)
    if cond.shape != expected:
        raise DistributionError(f"conditional factor shape {cond.shape}, expected {expected}")
    letters = "abcdefghijklmnopqrstuvwx"
    n_total = len(base.axes) + len(new_axes)
    if n_total > len(letters):
        raise ValueError("too many axes")
    base_sub = letters[: len(base.axes)]
    new_sub = letters[len(base.axes): n_total]
    given_sub = "".join(base_sub[base.index(n)] for n in given)
    mass = np.einsum(f"{base_sub},{given_sub}{new_sub}->{base_sub}{new_sub}", base.mass, cond)
    return JointDist(base.axes + new_axes, mass)


def _check_disjoint(*groups: Sequence[str]) -> None:
    seen: set[str] = set()
    for g in groups:
        for n in g:
            if n in seen:
                raise ValueError(f"axis sets must be disjoint; {n!r} repeats")
            seen.add(n)


def _joint_entropy(d: JointDist, names: Sequence[str]) -> float:
    m = marginalize(d, tuple(names)).mass if names else None
    if m is None:
        return 0.0
    return float(-xlogy(m, m).sum() / _LN2)


def entropy(d: JointDist, targets: Sequence[str], given: Sequence[str] = ()) -> float:
    """H(targets | given) in bits."""
    targets, given = tuple(targets), tuple(given)
    _check_disjoint(targets, given)
    return _joint_entropy(d, given + targets) - _joint_entropy(d, given)


def mutual_information(d: JointDist, a: Sequence[str], b: Sequence[str], given: Sequence[str] = ()) -> float:
    """I(a; b | given) in bits, clamped to 0 when within -1e-9 of zero."""
    a, b, given = tuple(a), tuple(b), tuple(given)
    _check_disjoint(a, b, given)
    value = entropy(d, a, given) - entropy(d, a, b + given)
    if -NORM_TOL < value < 0.0:
        return 0.0
    return value


def expected_payoff(joint_xyu: JointDist, pi: PayoffTensor, zmap) -> float:
    """E pi(X, Y, zmap(U)) for a joint over axes X, Y, U and a total map U -> Z."""
    zmap = np.asarray(zmap, dtype=np.int64)
    j = marginalize(joint_xyu, ("X", "Y", "U")).mass
    nx, ny, nu = j.shape
    if zmap.shape != (nu,):
        raise ValueError(f"zmap must assign one z to each of the {nu} u symbols")
    if zmap.min() < 0 or zmap.max() >= pi.values.shape[2]:
        raise ValueError("zmap targets fall outside the Z alphabet")
    sel = pi.values[:, :, zmap]          # (x, y, u)
    return float(np.einsum("xyu,xyu->", j, sel))


def markov_defect(d: JointDist, target: str = "Y", given: Sequence[str] = ("U", "V"), versus: Sequence[str] = ("X",)) -> float:
    """Max deviation of p(target | given, versus) from p(target | given) on support.

    Returns the largest absolute difference over cells whose conditioning
    event (given + versus) has positive probability.  Zero means the chain
    versus - given - target holds exactly.
    """
    given, versus = tuple(given), tuple(versus)
    full = condition(d, (target,), given + versus)        # (given..., versus..., target)
    coarse = condition(d, (target,), given)               # (given..., target)
    weights = marginalize(d, given + versus).mass         # (given..., versus...)
    nv = len(versus)
    coarse_exp = coarse.reshape(coarse.shape[: len(given)] + (1,) * nv + coarse.shape[len(given):])
    diff = np.abs(full - coarse_exp)
    support = weights > 0
    return float((diff * support[..., None]).max()) if diff.size else 0.0
