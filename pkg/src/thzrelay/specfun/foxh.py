"""Meijer G, Fox H and bivariate Fox H functions by contour quadrature."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .mellin import ContourSpec, GammaFactor, MellinBarnesIntegral


@dataclass(frozen=True)
class GammaPair:
    """One ``(a, A)`` entry of a Fox H parameter list."""

    a: float
    A: float = 1.0

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"GammaPair scale must be positive, got {self.A}")


@dataclass(frozen=True)
class JointPair:
    """Upper entry of the coupling group of a bivariate Fox H function.

    The two scales may carry either sign.
    """

    a: float
    A_x: float
    A_y: float


def _pairs(seq):
    out = []
    for p in seq:
        if isinstance(p, GammaPair):
            out.append(p)
        elif np.isscalar(p):
            out.append(GammaPair(float(p), 1.0))
        else:
            out.append(GammaPair(float(p[0]), float(p[1])))
    return tuple(out)


@dataclass(frozen=True)
class FoxHParams:
    """Parameters of H^{m,n}_{p,q}[x | (a_j, A_j); (b_j, B_j)].

    Entries of `upper`/`lower` may be :class:`GammaPair` objects, ``(a, A)``
    tuples or bare offsets (scale 1).
    """

    m: int
    n: int
    upper: Sequence = ()
    lower: Sequence = ()
    p: Optional[int] = None
    q: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "upper", _pairs(self.upper))
        object.__setattr__(self, "lower", _pairs(self.lower))
        if self.p is None:
            object.__setattr__(self, "p", len(self.upper))
        if self.q is None:
            object.__setattr__(self, "q", len(self.lower))
        if self.p != len(self.upper) or self.q != len(self.lower):
            raise ValueError("parameter lists do not match the declared p, q")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError(f"need 0 <= m <= q and 0 <= n <= p, got m={self.m}, n={self.n}, "
                             f"p={self.p}, q={self.q}")

    def factors(self, dim=1, axis=0, tag=""):
        """Gamma factors of the Mellin–Barnes integrand in the variable σ = s."""
        def vec(x):
            v = [0.0] * dim
            v[axis] = x
            return tuple(v)

        num, den = [], []
        for j, g in enumerate(self.lower):
            if j < self.m:
                num.append(GammaFactor(g.a, vec(g.A), f"{tag}Γ(b{j + 1} + B·s)"))
            else:
                den.append(GammaFactor(1.0 - g.a, vec(-g.A), f"{tag}Γ(1 - b{j + 1} - B·s)"))
        for j, g in enumerate(self.upper):
            if j < self.n:
                num.append(GammaFactor(1.0 - g.a, vec(-g.A), f"{tag}Γ(1 - a{j + 1} - A·s)"))
            else:
                den.append(GammaFactor(g.a, vec(g.A), f"{tag}Γ(a{j + 1} + A·s)"))
        return num, den


@dataclass(frozen=True)
class BivFoxHParams:
    """Bivariate Fox H function H^{0,n1:m2,n2:m3,n3}[x, y].

    `joint` holds the coupling upper entries; the first `n1` enter the
    numerator.  `inner_x` and `inner_y` are the one-variable groups; their
    ``m, n`` give ``m2, n2`` and ``m3, n3``.  `joint_lower` (rarely needed)
    holds coupling entries that only ever appear in the denominator.
    """

    n1: int
    joint: Sequence[JointPair]
    inner_x: FoxHParams
    inner_y: FoxHParams
    joint_lower: Sequence[JointPair] = field(default_factory=tuple)

    def __post_init__(self):
        joint = tuple(j if isinstance(j, JointPair) else JointPair(*map(float, j))
                      for j in self.joint)
        jl = tuple(j if isinstance(j, JointPair) else JointPair(*map(float, j))
                   for j in self.joint_lower)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "joint_lower", jl)
        if not 0 <= self.n1 <= len(joint):
            raise ValueError("n1 must lie between 0 and the number of joint entries")

    @property
    def index(self):
        return (0, self.n1, self.inner_x.m, self.inner_x.n, self.inner_y.m, self.inner_y.n)

    def integral(self, x, y):
        # With σ = -s, -t the integrand x^s y^t becomes x^{-σ1} y^{-σ2} and
        # each group takes the one-variable Fox H form.
        nx, dx = self.inner_x.factors(2, 0, "x:")
        ny, dy = self.inner_y.factors(2, 1, "y:")
        num, den = nx + ny, dx + dy
        for j, g in enumerate(self.joint):
            if j < self.n1:
                num.append(GammaFactor(1.0 - g.a, (-g.A_x, -g.A_y), f"joint Γ(1 - a{j + 1} ...)"))
            else:
                den.append(GammaFactor(g.a, (g.A_x, g.A_y), f"joint Γ(a{j + 1} ...)"))
        for j, g in enumerate(self.joint_lower):
            den.append(GammaFactor(1.0 - g.a, (-g.A_x, -g.A_y), f"joint Γ(1 - b{j + 1} ...)"))
        return MellinBarnesIntegral(num, den, [np.log(x), np.log(y)])


def _check_positive(**kw):
    for k, v in kw.items():
        if not (np.isfinite(v) and v > 0):
            raise ValueError(f"{k} must be a positive finite number, got {v}")


def fox_h(params: FoxHParams, x: float, contour: Optional[ContourSpec] = None,
          full_output: bool = False):
    """Fox H-function H^{m,n}_{p,q}[x] on a vertical Mellin–Barnes contour.

    Returns a float, or a :class:`MellinBarnesResult` if `full_output`.
    Raises ``ContourPlacementError`` when the pole sets overlap and
    ``AccuracyNotReachedError`` when refinement stalls.
    """
    _check_positive(x=x)
    num, den = params.factors()
    res = MellinBarnesIntegral(num, den, [np.log(x)]).evaluate(contour)
    return res if full_output else res.value


def meijer_g(params: FoxHParams, x: float, contour: Optional[ContourSpec] = None,
             full_output: bool = False):
    """Meijer G-function G^{m,n}_{p,q}(x | a; b); every scale must be 1."""
    if any(g.A != 1.0 for g in params.upper + params.lower):
        raise ValueError("meijer_g requires unit scales; use fox_h instead")
    return fox_h(params, x, contour, full_output)


def bivariate_fox_h(params: BivFoxHParams, x: float, y: float,
                    contour: Optional[ContourSpec] = None, full_output: bool = False):
    """Bivariate Fox H-function as a two-fold Mellin–Barnes integral.

    With no joint entries the value is ``fox_h(inner_x, x) * fox_h(inner_y, y)``.
    """
    _check_positive(x=x, y=y)
    res = params.integral(x, y).evaluate(contour)
    return res if full_output else res.value
