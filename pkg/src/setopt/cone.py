"""Polyhedral ordering cones and their scalarization.

A cone is described by the normals of its dual halfspaces,
``K = {y : w_j^T y >= 0 for all j}``.  The scalarization
``scalarize(y) = max_j w_j^T y`` is a signed distance to ``-K``: negative
inside, zero on the boundary, positive outside.  With each ``w_j``
normalized to unit 1-norm it is 1-Lipschitz in the sup norm, and for the
nonnegative orthant (``w_j = e_j``) it reduces to the max-coordinate
function.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog


class ConeError(ValueError):
    """The given dual normals do not describe a usable ordering cone."""


class Region(enum.Enum):
    """Position of a point relative to -K."""

    INTERIOR_NEG_K = "InteriorNegK"
    BOUNDARY_NEG_K = "BoundaryNegK"
    EXTERIOR_NEG_K = "ExteriorNegK"


@dataclass(frozen=True)
class Cone:
    """Closed convex pointed solid polyhedral cone in R^m.

    Parameters
    ----------
    dual_normals : array_like, shape (q, m)
        Halfspace normals; each row is rescaled to unit 1-norm.
    tolerance : float
        Absolute slack used by membership and order tests.

    Construction verifies that the cone is solid (some y has
    ``w_j^T y > 0`` for every j, via a small LP) and pointed
    (``w_j^T y = 0`` for all j only at y = 0, i.e. the normals span R^m).
    """

    dual_normals: np.ndarray
    tolerance: float = 1e-10

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.dual_normals, dtype=float))
        if w.ndim != 2 or w.size == 0:
            raise ConeError("dual_normals must be a nonempty (q, m) array")
        norms = np.abs(w).sum(axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(w)):
            raise ConeError("each dual normal must be finite and nonzero")
        w = w / norms[:, None]
        w.setflags(write=False)
        object.__setattr__(self, "dual_normals", w)
        if self.tolerance < 0:
            raise ConeError("tolerance must be nonnegative")
        if np.linalg.matrix_rank(w) < self.m:
            raise ConeError("cone is not pointed: dual normals do not span R^m")
        if not self._is_solid():
            raise ConeError("cone has empty interior under the given normals")

    def _is_solid(self) -> bool:
        # maximize t s.t. w_j^T y >= t, |y| <= 1, t <= 1
        q, m = self.dual_normals.shape
        c = np.zeros(m + 1)
        c[-1] = -1.0
        a_ub = np.hstack([-self.dual_normals, np.ones((q, 1))])
        bounds = [(-1.0, 1.0)] * m + [(None, 1.0)]
        res = linprog(c, A_ub=a_ub, b_ub=np.zeros(q), bounds=bounds, method="highs")
        return bool(res.success) and res.x[-1] > 1e-9

    @property
    def m(self) -> int:
        return self.dual_normals.shape[1]

    @property
    def n_normals(self) -> int:
        return self.dual_normals.shape[0]

    def scalarize(self, y) -> float:
        """Signed distance of y to -K: ``max_j w_j^T y``."""
        return float(np.max(self.dual_normals @ np.asarray(y, dtype=float)))

    def scalarize_rows(self, ys: np.ndarray) -> np.ndarray:
        """Scalarize each row of a (N, m) array at once."""
        return np.max(np.asarray(ys, dtype=float) @ self.dual_normals.T, axis=-1)

    def classify(self, y) -> Region:
        """Locate y relative to -K within the cone tolerance."""
        v = self.scalarize(y)
        if v < -self.tolerance:
            return Region.INTERIOR_NEG_K
        if v <= self.tolerance:
            return Region.BOUNDARY_NEG_K
        return Region.EXTERIOR_NEG_K

    def leq(self, y, z) -> bool:
        """Partial order: y <= z iff z - y lies in K (within tolerance)."""
        d = np.asarray(z, dtype=float) - np.asarray(y, dtype=float)
        return bool(np.all(self.dual_normals @ d >= -self.tolerance))

    def lt(self, y, z) -> bool:
        """Strict order: y < z iff z - y lies in the interior of K."""
        d = np.asarray(z, dtype=float) - np.asarray(y, dtype=float)
        return bool(np.all(self.dual_normals @ d > self.tolerance))

    def to_json(self) -> str:
        return json.dumps({"dual_normals": self.dual_normals.tolist()})

    @staticmethod
    def from_json(text: str) -> "Cone":
        data = json.loads(text)
        return Cone(np.asarray(data["dual_normals"], dtype=float))


def orthant(m: int) -> Cone:
    """The nonnegative orthant of R^m; scalarize is the max coordinate."""
    return Cone(np.eye(m))


def k2prime() -> Cone:
    """Wedge {y in R^2_+ : y2 <= 3 y1 and y1 <= 3 y2}."""
    return Cone(np.array([[3.0, -1.0], [-1.0, 3.0]]))


_PRESETS = {"k2prime": k2prime}


def preset(name: str) -> Cone:
    """Resolve a named cone: ``orthant:m`` or ``k2prime``."""
    if name.startswith("orthant:"):
        return orthant(int(name.split(":", 1)[1]))
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ConeError(f"unknown cone preset {name!r}") from None
