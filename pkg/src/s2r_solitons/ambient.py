"""Geometry of S^2 x R viewed as a hypersurface of R^4.

Points carry coordinates (x, y, z, t) with x^2 + y^2 + z^2 = 1. All inner
products are the Euclidean product of R^4, which restricts to the product
metric on S^2 x R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleError, UsageError

SPHERE_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
TANGENT_TOL = 1e-10
FRAME_TOL = 1e-12
POLE_TOL = 1e-9


@dataclass(frozen=True)
class AmbientPoint:
    """A point of S^2 x R.

    Construction renormalizes the sphere part when its norm is off by less
    than ``RENORMALIZE_TOL`` (integration drift) and raises otherwise.
    """

    x: float
    y: float
    z: float
    t: float

    def __post_init__(self) -> None:
        r = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(r - 1.0) > SPHERE_TOL:
            if not abs(r - 1.0) < RENORMALIZE_TOL:
                raise UsageError(f"point ({self.x}, {self.y}, {self.z}) is not on S^2 (|p| = {r})")
            object.__setattr__(self, "x", self.x / r)
            object.__setattr__(self, "y", self.y / r)
            object.__setattr__(self, "z", self.z / r)

    @classmethod
    def from_array(cls, a) -> "AmbientPoint":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.t])

    @property
    def sphere(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def radial(self) -> np.ndarray:
        """Unit normal of S^2 x R inside R^4 at this point."""
        return np.array([self.x, self.y, self.z, 0.0])


@dataclass(frozen=True, eq=False)
class AmbientVector:
    """A vector of R^4 attached to a base point.

    With ``tangent=True`` the vector is checked to be tangent to S^2 x R,
    i.e. orthogonal to the radial direction (x, y, z, 0).
    """

    base: AmbientPoint
    components: np.ndarray
    tangent: bool = field(default=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.components, dtype=float).reshape(4)
        object.__setattr__(self, "components", c)
        if self.tangent:
            radial = float(np.dot(c, self.base.radial))
            if abs(radial) > TANGENT_TOL:
                raise UsageError(f"vector is not tangent to S^2 x R (radial part {radial:.3e})")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __getitem__(self, i: int) -> float:
        return float(self.components[i])


def _same_base(p: AmbientPoint, q: AmbientPoint) -> bool:
    return p is q or bool(np.allclose(p.array, q.array, rtol=0.0, atol=1e-12))


def inner(a: AmbientVector, b: AmbientVector) -> float:
    """Euclidean inner product of two vectors sharing a base point."""
    if not _same_base(a.base, b.base):
        raise UsageError("inner product of vectors attached to different base points")
    return float(np.dot(a.components, b.components))


def frame_vector(m: float, n: float) -> np.ndarray:
    """Unit vector of R^3 with latitude ``m`` and longitude ``n``."""
    return np.array([math.cos(m) * math.cos(n), math.cos(m) * math.sin(n), math.sin(m)])


@dataclass(frozen=True, eq=False)
class KillingField:
    """Selector for the Killing fields used by the soliton equation.

    ``kind`` is one of ``"V"`` (the vertical field d/dt), ``"R_z"`` (rotation
    about the z-axis) or ``"R_general"`` (rotation about E1 x E2 for an
    orthonormal pair E1, E2 of R^3, each given by latitude/longitude angles).
    """

    kind: str
    e1: np.ndarray | None = None
    e2: np.ndarray | None = None
    angles: tuple[float, float, float, float] | None = None

    KINDS = ("V", "R_z", "R_general")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise UsageError(f"unknown Killing field kind {self.kind!r}")
        if self.kind != "R_general":
            return
        if self.e1 is None or self.e2 is None:
            raise UsageError("R_general needs a frame E1, E2")
        e1 = np.asarray(self.e1, dtype=float).reshape(3)
        e2 = np.asarray(self.e2, dtype=float).reshape(3)
        if abs(np.linalg.norm(e1) - 1.0) > FRAME_TOL or abs(np.linalg.norm(e2) - 1.0) > FRAME_TOL:
            raise UsageError("frame vectors must be unit vectors")
        if abs(float(np.dot(e1, e2))) > FRAME_TOL:
            raise UsageError(f"frame vectors are not orthogonal (<E1,E2> = {np.dot(e1, e2):.3e})")
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @classmethod
    def vertical(cls) -> "KillingField":
        return cls("V")

    @classmethod
    def rotation_z(cls) -> "KillingField":
        return cls("R_z")

    @classmethod
    def from_angles(cls, m1: float, n1: float, m2: float, n2: float) -> "KillingField":
        """Rotation field for the frame E_i = (cos m_i cos n_i, cos m_i sin n_i, sin m_i)."""
        return cls("R_general", frame_vector(m1, n1), frame_vector(m2, n2), (m1, n1, m2, n2))

    @classmethod
    def from_axis(cls, axis, spin: float = 0.0) -> "KillingField":
        """Rotation field about ``axis``; ``spin`` rotates the frame inside the orthogonal plane.

        The frame is chosen with E1 x E2 = axis / |axis|.
        """
        a = np.asarray(axis, dtype=float)
        na = np.linalg.norm(a)
        if na == 0.0:
            raise UsageError("rotation axis must be nonzero")
        a = a / na
        helper = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        b1 = np.cross(helper, a)
        b1 /= np.linalg.norm(b1)
        b2 = np.cross(a, b1)
        e1 = math.cos(spin) * b1 + math.sin(spin) * b2
        e2 = np.cross(a, e1)
        angles = tuple(
            float(x)
            for e in (e1, e2)
            for x in (math.atan2(e[2], math.hypot(e[0], e[1])), math.atan2(e[1], e[0]))
        )
        # recompute from the angles so that angles and frame agree to rounding
        return cls.from_angles(*angles)

    @property
    def axis(self) -> np.ndarray:
        if self.kind == "R_general":
            return np.cross(self.e1, self.e2)
        if self.kind == "R_z":
            return np.array([0.0, 0.0, 1.0])
        raise UsageError("the vertical field has no rotation axis")


def killing_array(killing: KillingField, p: np.ndarray) -> np.ndarray:
    """Raw R^4 components of the Killing field at the point ``p`` (length-4 array)."""
    if killing.kind == "V":
        return np.array([0.0, 0.0, 0.0, 1.0])
    if killing.kind == "R_z":
        return np.array([-p[1], p[0], 0.0, 0.0])
    q = p[:3]
    w = -np.dot(q, killing.e2) * killing.e1 + np.dot(q, killing.e1) * killing.e2
    return np.array([w[0], w[1], w[2], 0.0])


def killing_eval(killing: KillingField, p: AmbientPoint) -> AmbientVector:
    """Evaluate the Killing field at ``p``; the result is tangent to S^2 x R."""
    return AmbientVector(p, killing_array(killing, p.array), tangent=True)


def stereographic(p: AmbientPoint) -> np.ndarray:
    """Project from the north pole: (x, y, z, t) -> (x/(1-z), y/(1-z), t)."""
    d = 1.0 - p.z
    if abs(d) < POLE_TOL:
        raise PoleError(f"stereographic projection at the pole (1 - z = {d:.3e})")
    return np.array([p.x / d, p.y / d, p.t])
