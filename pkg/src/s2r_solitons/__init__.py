"""Translating and rotating solitons of the mean curvature flow in S^2 x R.

Modules: ``ambient`` (points, vectors and Killing fields of S^2 x R in R^4),
``charts`` (vertical and rotational surface charts, exact solutions),
``systems`` (the soliton ODE systems and their equilibria), ``integrate``
(trajectories), ``analyze`` (qualitative checks), ``oracle`` (finite-difference
verification), ``meshio`` (meshes and file output) and ``cli``.
"""

from .ambient import AmbientPoint, AmbientVector, KillingField, inner, killing_eval, stereographic
from .charts import CurveState, SurfaceChart, exact_solution
from .integrate import IntegrationConfig, Trajectory, integrate
from .systems import S11, S12, S21, S22, equilibria, jacobian, rhs

__all__ = [
    "AmbientPoint", "AmbientVector", "KillingField", "inner", "killing_eval", "stereographic",
    "CurveState", "SurfaceChart", "exact_solution",
    "IntegrationConfig", "Trajectory", "integrate",
    "S11", "S12", "S21", "S22", "equilibria", "jacobian", "rhs",
]
