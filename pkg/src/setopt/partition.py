"""Minimal elements of a finite vector set and the partition structure.

Given the family values F(x) = {f^1(x), ..., f^p(x)} and an ordering cone,
this module finds the cone-minimal and weakly minimal members, groups the
weakly minimal indices by (near-)equal value, and enumerates the Cartesian
product of those groups, one factor per distinct minimal value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .cone import Cone

PARTITION_CAP = 4096


class PartitionCapError(RuntimeError):
    """The group-product cardinality exceeds the enumeration cap."""


@dataclass(frozen=True)
class MinimalStructure:
    """Distinct weakly minimal values of F(x) with their active index groups.

    ``values[j]`` is the representative vector of group j, ``groups[j]`` the
    1-based function indices attaining it, ``omega`` the number of groups.
    ``is_regular_hint`` records whether minimal and weakly minimal index
    sets coincided at this point (a necessary sign of regularity, not a
    proof of it).
    """

    values: tuple
    groups: tuple
    omega: int
    is_regular_hint: bool

    def group_sizes(self) -> tuple:
        return tuple(len(g) for g in self.groups)

    def partition_count(self) -> int:
        count = 1
        for g in self.groups:
            count *= len(g)
        return count


def _close(u: np.ndarray, v: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(u - v))) <= tol


def minimal_elements(values, cone: Cone, value_tol: float = 0.0):
    """Indices (0-based) of minimal and weakly minimal rows of ``values``.

    Row i is minimal when no other row is <=_K it with a different value
    (value equality is sup-norm distance <= value_tol); weakly minimal when
    no row is strictly <_K it.  Minimal indices are always a subset of the
    weakly minimal ones.
    """
    vals = np.atleast_2d(np.asarray(values, dtype=float))
    n = vals.shape[0]
    w = cone.dual_normals
    tol = cone.tolerance
    # pairwise scalar products; diff[i, j, l] = w_l^T (vals[i] - vals[j])
    wv = vals @ w.T
    diff = wv[:, None, :] - wv[None, :, :]
    dominates_leq = np.all(diff >= -tol, axis=2)  # [i, j]: vals[j] <=_K vals[i]
    dominates_lt = np.all(diff > tol, axis=2)
    equal = np.max(np.abs(vals[:, None, :] - vals[None, :, :]), axis=2) <= value_tol
    strict_leq = dominates_leq & ~equal
    np.fill_diagonal(strict_leq, False)
    np.fill_diagonal(dominates_lt, False)
    min_idx = [i for i in range(n) if not strict_leq[i].any()]
    wmin_idx = [i for i in range(n) if not dominates_lt[i].any()]
    return min_idx, wmin_idx


def structure_from_values(values: np.ndarray, cone: Cone, value_tol: float | None = None) -> MinimalStructure:
    """Build the minimal structure from an already evaluated (p, m) array."""
    vals = np.atleast_2d(np.asarray(values, dtype=float))
    if value_tol is None:
        scale = 1.0 + float(np.max(np.abs(vals)))
        value_tol = 1e-8 * scale
    min_idx, wmin_idx = minimal_elements(vals, cone, value_tol=value_tol)
    reps: list[np.ndarray] = []
    groups: list[list[int]] = []
    for i in wmin_idx:
        tol_i = 1e-8 * (1.0 + float(np.max(np.abs(vals[i]))))
        for rep, grp in zip(reps, groups):
            if _close(vals[i], rep, max(tol_i, value_tol)):
                grp.append(i + 1)
                break
        else:
            reps.append(vals[i].copy())
            groups.append([i + 1])
    return MinimalStructure(
        values=tuple(reps),
        groups=tuple(tuple(g) for g in groups),
        omega=len(groups),
        is_regular_hint=set(min_idx) == set(wmin_idx),
    )


def minimal_structure(problem, cone: Cone, x, value_tol: float | None = None) -> MinimalStructure:
    """Evaluate F(x) and group its weakly minimal values."""
    return structure_from_values(problem.eval_all(x), cone, value_tol)


def partition_iter(structure: MinimalStructure, cap: int = PARTITION_CAP):
    """Yield every index tuple of the group product in lexicographic order."""
    count = structure.partition_count()
    if count > cap:
        sizes = structure.group_sizes()
        raise PartitionCapError(
            f"partition set has {count} elements (group sizes {sizes}), cap is {cap}"
        )
    return itertools.product(*structure.groups)
