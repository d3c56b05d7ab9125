"""Vertical-contour quadrature of Mellin–Barnes integrals in one or two variables.

Every integrand handled here has the form

    Π_j Γ(u_j + v_j·σ) / Π_k Γ(u_k + v_k·σ) · exp(-σ·log z)

with σ ranging over a product of vertical lines c + iR^d.  The contour
abscissa c is placed so that every numerator gamma has an argument with
positive real part (this is exactly the pole-separation condition), pushed
towards the saddle of the integrand magnitude to limit cancellation.  The
integral over each line is computed with the trapezoidal rule, which
converges exponentially for integrands analytic in a strip.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize
from scipy import special as sp


class ContourPlacementError(ValueError):
    """No vertical contour separates the pole sets (or the integrand does not decay)."""


class AccuracyNotReachedError(ArithmeticError):
    """Refinement budget exhausted before the requested tolerance was met."""

    def __init__(self, message, value, error):
        super().__init__(f"{message} (value={value:.6g}, error estimate={error:.3g})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class ContourSpec:
    """Contour and quadrature controls.

    Attributes left as ``None`` are chosen automatically.  Abscissae refer to
    the variable in which the argument enters as ``z**(-s)``.
    """

    shift_x: Optional[float] = None
    shift_y: Optional[float] = None
    half_length: Optional[float] = None
    nodes: Optional[int] = None
    rel_tol: float = 1e-8
    max_doublings: int = 4

    def __post_init__(self):
        if self.half_length is not None and self.half_length <= 0:
            raise ValueError("half_length must be positive")
        if self.nodes is not None and self.nodes < 16:
            raise ValueError("nodes must be >= 16")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class MellinBarnesResult:
    value: float
    error: float
    abscissae: tuple
    half_lengths: tuple
    steps: tuple


@dataclass(frozen=True)
class GammaFactor:
    """Γ(u + v·σ); `label` is used in error messages."""

    u: float
    v: tuple
    label: str = ""


_MAX_POINTS = {1: 400_001, 2: 12_000_000}
_CHUNK = 2_000_000


class MellinBarnesIntegral:
    """A Mellin–Barnes integrand in `dim` variables, ready for quadrature."""

    def __init__(self, numerators: Sequence[GammaFactor], denominators: Sequence[GammaFactor],
                 log_z: Sequence[float]):
        self.log_z = np.asarray(log_z, dtype=float)
        self.dim = self.log_z.size
        if self.dim not in (1, 2):
            raise ValueError("only one- and two-fold contour integrals are supported")
        self.num = list(numerators)
        self.den = list(denominators)
        for f in self.num + self.den:
            if len(f.v) != self.dim:
                raise ValueError(f"factor {f.label!r} has wrong dimension")
        self._check_decay()

    # -- geometry ---------------------------------------------------------

    def _check_decay(self):
        if self.dim == 1:
            dirs = np.array([[1.0]])
        else:
            th = np.linspace(0.0, np.pi, 721)
            dirs = np.column_stack([np.cos(th), np.sin(th)])
        kappa = np.zeros(len(dirs))
        for f in self.num:
            kappa += np.abs(dirs @ np.asarray(f.v))
        for f in self.den:
            kappa -= np.abs(dirs @ np.asarray(f.v))
        if kappa.min() <= 1e-12:
            bad = dirs[np.argmin(kappa)]
            raise ContourPlacementError(
                f"integrand does not decay exponentially along direction {np.round(bad, 4)}"
                f" (exponent {kappa.min():.3g})")

    def _margins(self, c):
        return np.array([f.u + np.dot(f.v, c) for f in self.num])

    def log_scale(self, c):
        """Real log-magnitude proxy on the real axis (numerator gammas only)."""
        args = self._margins(c)
        if np.any(args <= 0):
            return np.inf
        return float(np.sum(sp.gammaln(args)) - np.dot(c, self.log_z))

    def place(self, override=None):
        """Return the contour abscissae as an array of length `dim`."""
        if not self.num:
            raise ContourPlacementError("no numerator gamma factors: nothing to separate")
        if override is not None:
            c = np.asarray(override, dtype=float)
            bad = [f.label for f, g in zip(self.num, self._margins(c)) if g <= 0]
            if bad:
                raise ContourPlacementError(f"contour at {c} crosses poles of {', '.join(bad)}")
            return c
        V = np.array([f.v for f in self.num], dtype=float)
        U = np.array([f.u for f in self.num], dtype=float)
        norms = np.linalg.norm(V, axis=1)
        # maximise the smallest normalised distance to a pole line
        A_ub = np.column_stack([-V, norms])
        res = optimize.linprog(
            np.r_[np.zeros(self.dim), -1.0], A_ub=A_ub, b_ub=U,
            bounds=[(-1e3, 1e3)] * self.dim + [(None, 2.0)], method="highs")
        if res.status != 0 or res.x[-1] <= 1e-10:
            if res.status == 0:
                c0 = res.x[:-1]
                slack = U + V @ c0 - res.x[-1] * norms
                blocking = [f.label for f, s in zip(self.num, slack) if s < 1e-7]
            else:
                blocking = [f.label for f in self.num]
            raise ContourPlacementError(
                "pole sets cannot be separated by a vertical contour; blocking factors: "
                + ", ".join(blocking))
        c0 = res.x[:-1]
        delta = 0.5 * res.x[-1]
        cons = {"type": "ineq", "fun": lambda c: U + V @ c - delta * norms,
                "jac": lambda c: V}
        try:
            opt = optimize.minimize(
                self.log_scale, c0, jac=self._log_scale_grad, constraints=[cons],
                method="SLSQP", bounds=[(-1e3, 1e3)] * self.dim,
                options={"maxiter": 200, "ftol": 1e-10})
            c = opt.x
            if not np.all(U + V @ c >= 0.99 * delta * norms) or not np.isfinite(self.log_scale(c)):
                c = c0
            elif self.log_scale(c) > self.log_scale(c0):
                c = c0
        except (ValueError, FloatingPointError):
            c = c0
        return c

    def _log_scale_grad(self, c):
        args = self._margins(c)
        if np.any(args <= 0):
            return np.zeros(self.dim)
        V = np.array([f.v for f in self.num], dtype=float)
        return sp.digamma(args) @ V - self.log_z

    def strip_widths(self, c):
        """Half-width of the analyticity strip of the integrand in each τ_i."""
        d = np.full(self.dim, 4.0)
        for f, g in zip(self.num, self._margins(c)):
            for i, vi in enumerate(f.v):
                if vi != 0:
                    d[i] = min(d[i], g / abs(vi))
        return 0.8 * d

    # -- integrand --------------------------------------------------------

    def log_integrand(self, c, taus):
        """log of the integrand on the tensor grid c + i·(taus[0] × taus[1] ...)."""
        shape = tuple(len(t) for t in taus)
        out = np.zeros(shape, dtype=complex)

        def axis_view(arr, i):
            idx = [None] * self.dim
            idx[i] = slice(None)
            return arr[tuple(idx)]

        # linear term
        for i in range(self.dim):
            out = out + axis_view(-(c[i] + 1j * taus[i]) * self.log_z[i], i)
        for sign, group in ((1.0, self.num), (-1.0, self.den)):
            for f in group:
                v = np.asarray(f.v, dtype=float)
                base = f.u + float(v @ c)
                arg = np.full((1,) * self.dim, base, dtype=complex)
                for i in range(self.dim):
                    if v[i] != 0:
                        arg = arg + axis_view(1j * v[i] * taus[i], i)
                lg = sp.loggamma(arg)
                if sign < 0:
                    lg = np.where(np.isfinite(lg), lg, np.inf)
                    out = out - lg
                else:
                    out = out + lg
        return out

    def _ray_profile(self, c, rel_tol, r_max=600.0, npts=6001):
        if self.dim == 1:
            dirs = np.array([[1.0]])
        else:
            th = np.linspace(0.0, np.pi, 37)[:-1]
            dirs = np.column_stack([np.cos(th), np.sin(th)])
        r = np.linspace(0.0, r_max, npts)
        peak = -np.inf
        profiles = []
        for e in dirs:
            logf = np.zeros(npts, dtype=complex)
            logf += -(c + 1j * np.outer(r, e)) @ self.log_z
            for sign, group in ((1.0, self.num), (-1.0, self.den)):
                for f in group:
                    v = np.asarray(f.v, dtype=float)
                    lg = sp.loggamma(f.u + v @ c + 1j * r * (v @ e))
                    if sign < 0:
                        lg = np.where(np.isfinite(lg), lg, np.inf)
                    logf += sign * lg
            re = logf.real
            peak = max(peak, np.nanmax(re))
            profiles.append(re)
        cut = peak + np.log(rel_tol) - 12.0
        half = np.zeros(self.dim)
        for e, re in zip(dirs, profiles):
            above = np.nonzero(re >= cut)[0]
            if above.size == 0:
                continue
            if above[-1] >= npts - 2:
                raise AccuracyNotReachedError(
                    "integrand has not decayed at the end of the scanned contour", np.nan, np.inf)
            rc = r[above[-1]]
            half = np.maximum(half, rc * np.abs(e))
        return peak, 1.1 * half + 1.0

    def _trapezoid(self, c, T, h, ref):
        # conjugate symmetry: f(-τ) = conj f(τ); integrate τ_0 >= 0 and double.
        tau0 = np.arange(0.0, T[0] + 0.5 * h[0], h[0])
        w0 = np.full(tau0.size, 2.0)
        w0[0] = 1.0
        if self.dim == 1:
            logf = self.log_integrand(c, [tau0]) - ref
            f = np.exp(logf)
            band = np.abs(tau0) > 0.8 * T[0]
            total = np.sum(w0 * f.real)
            absum = np.sum(w0 * np.abs(f))
            tail = np.sum((w0 * np.abs(f))[band])
            scale = h[0] / (2 * np.pi)
            return total * scale, tail * scale, absum * scale
        n1 = int(np.floor(T[1] / h[1]))
        tau1 = h[1] * np.arange(-n1, n1 + 1)
        band1 = np.abs(tau1) > 0.8 * T[1]
        rows = max(1, _CHUNK // tau1.size)
        total = tail = absum = 0.0
        for start in range(0, tau0.size, rows):
            t0 = tau0[start:start + rows]
            ww = w0[start:start + rows]
            f = np.exp(self.log_integrand(c, [t0, tau1]) - ref)
            af = np.abs(f) * ww[:, None]
            total += float(np.sum(f.real * ww[:, None]))
            absum += float(np.sum(af))
            band = (np.abs(t0) > 0.8 * T[0])[:, None] | band1[None, :]
            tail += float(np.sum(af[band]))
        scale = h[0] * h[1] / (2 * np.pi) ** 2
        return total * scale, tail * scale, absum * scale

    def evaluate(self, spec: Optional[ContourSpec] = None) -> MellinBarnesResult:
        spec = spec or ContourSpec()
        override = None
        if spec.shift_x is not None or spec.shift_y is not None:
            if self.dim == 1:
                override = [spec.shift_x]
            else:
                if spec.shift_x is None or spec.shift_y is None:
                    raise ContourPlacementError("both shift_x and shift_y are required")
                override = [spec.shift_x, spec.shift_y]
        c = self.place(override)
        rel_tol = spec.rel_tol
        peak, T = self._ray_profile(c, rel_tol)
        if spec.half_length is not None and spec.nodes is not None:
            T = np.full(self.dim, float(spec.half_length))
            h = np.full(self.dim, 2.0 * spec.half_length / (spec.nodes - 1))
        else:
            d = self.strip_widths(c)
            L0 = self.log_scale(c)
            h = np.empty(self.dim)
            for i in range(self.dim):
                e = np.zeros(self.dim)
                e[i] = d[i]
                grow = max(self.log_scale(c + e), self.log_scale(c - e)) - L0
                h[i] = 2 * np.pi * d[i] / (np.log(1.0 / rel_tol) + 5.0 + max(grow, 0.0))
            if spec.half_length is not None:
                T = np.full(self.dim, float(spec.half_length))
            if spec.nodes is not None:
                h = 2.0 * T / (spec.nodes - 1)
        ref = peak
        prev, prev_tail, _ = self._trapezoid(c, T, h, ref)
        err = np.inf
        value = prev
        tail = prev_tail
        for _ in range(spec.max_doublings):
            if prev_tail > rel_tol * abs(prev):
                T = 2.0 * T
            h = h / 2.0
            npts = np.prod(np.floor(T / h) * 2 + 1) / 2
            if npts > _MAX_POINTS[self.dim]:
                break
            value, tail, absum = self._trapezoid(c, T, h, ref)
            err = abs(value - prev)
            roundoff = 50 * np.finfo(float).eps * absum
            tol = max(rel_tol * abs(value), roundoff)
            if err <= tol and tail <= tol:
                scale = np.exp(ref)
                return MellinBarnesResult(
                    value=float(value * scale), error=float((err + tail + roundoff) * scale),
                    abscissae=tuple(float(x) for x in c), half_lengths=tuple(float(x) for x in T),
                    steps=tuple(float(x) for x in h))
            prev, prev_tail = value, tail
        scale = np.exp(ref)
        raise AccuracyNotReachedError(
            "Mellin–Barnes quadrature did not converge", float(value * scale),
            float((err + tail) * scale))
