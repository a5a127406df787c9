"""Branch-correct conformal charts and their Newton inversions.

Three model charts, each biholomorphic from a simple model domain onto (half
of) the positive phase of an exact solution family:

* ``HHPStrip`` — φ(ζ) = ζ + sinh ζ on the strip S = {|Im ζ| < π/2}, onto the
  hairpin phase Ω₁ = {|x₂| < π/2 + cosh x₁}.  Height H(z) = Re cosh(φ⁻¹(z)).

* ``SlitHalfPlane(a)`` — the closed form
  Φ_a(ζ) = a[((ζ/a)²−1)^{1/2} + log(ζ/a + ((ζ/a)²−1)^{1/2})]
  from S_a = {Re ζ > 0} ∖ (0, a] onto D_a = Ω_a ∩ {x₁ > 0}, with
  Φ_a′(ζ) = ((ζ+a)/(ζ−a))^{1/2}.  Height H_a(z) = Re Φ_a⁻¹(z); the square
  roots are split as √(ζ/a−1)·√(ζ/a+1) so each factor's argument stays off
  the principal cut on S_a.

* ``ScherkStrip(s)`` — Φ_s(ζ) = ∫₀^ζ e^{φ_s(η)} dη + c_s on the half-strip
  S_l = {Re ζ > 0, |Im ζ| < l/2}, l = 2πs, where

      φ_s(ζ) = −½ log(e^{2π(ζ−b)/l} + 1) + ½ log(e^{−2π(ζ+b)/l} + 1) + πζ/l,

  b = 2s·log(1/s) (so e^{πb/l} = 1/s).  The real constant c_s is fixed by
  Re Φ_s(ζ) → 0 as ζ → ± i l/2.  Height S_s(z) = Re Φ_s⁻¹(z) on the image
  half-cell D_s ⊂ {x₁ > 0, |x₂| < π}.

All charts carry ``newton_tol`` and ``max_iter``; inversions are damped
Newton iterations (vectorized, with family-specific initializations) plus a
scalar homotopy-continuation fallback for stragglers.  φ′ = 1 + cosh has
positive real part on the closed strip, and the Scherk/slit derivatives are
nonvanishing in the model interiors, so the iterations are well posed.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, InvalidInputError
from .quad import adaptive_complex_quad, gauss_nodes, segment_quad

__all__ = [
    "ConformalChart",
    "HHPStrip",
    "SlitHalfPlane",
    "ScherkStrip",
    "hhp_forward",
    "hhp_inverse",
    "slit_forward",
    "slit_inverse",
    "scherk_forward",
    "scherk_inverse",
    "scherk_offset",
    "scherk_loop_point",
    "scherk_loop_implicit",
    "scherk_loop_x2_extent",
]

_HALF_PI = np.pi / 2.0


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _nearest_anchor(targets, anchors):
    """Index of the nearest anchor per target, without forming the full
    pairwise distance matrix (targets may number in the hundreds of
    thousands when meshes are built)."""
    from scipy.spatial import cKDTree
    pts = np.stack([targets.real, targets.imag], axis=-1)
    table = np.stack([anchors.real, anchors.imag], axis=-1)
    _, idx = cKDTree(table).query(pts)
    return idx


# ----------------------------------------------------------------------
# shared Newton driver
# ----------------------------------------------------------------------

def _damped_newton(targets, z0, f, fprime, project, tol, max_iter,
                   max_halvings: int = 10):
    """Vectorized damped Newton for f(ζ) = target.

    targets, z0: complex arrays of one shape.  `project` folds iterates back
    into the model domain.  Returns (zeta, converged_mask).  Residual test is
    |f(ζ) − target| ≤ tol · max(1, |target|).
    """
    target = _as_complex(targets)
    zeta = project(_as_complex(z0).copy())
    res = f(zeta) - target
    scale = np.maximum(1.0, np.abs(target))
    for _ in range(max_iter):
        active = np.abs(res) > tol * scale
        if not np.any(active):
            break
        with np.errstate(all="ignore"):
            step = np.where(active, -res / fprime(zeta), 0.0)
        step = np.where(np.isfinite(step), step, 0.0)
        # damped update: halve the step until the residual does not grow
        factor = np.ones_like(scale)
        for _h in range(max_halvings):
            # np.asarray: 0-d operands decay to scalars, which the in-place
            # projections cannot modify
            cand = project(np.asarray(zeta + factor * step))
            cand_res = f(cand) - target
            worse = active & (np.abs(cand_res) > np.abs(res))
            if not np.any(worse):
                break
            factor = np.where(worse, factor * 0.5, factor)
        zeta = np.asarray(np.where(active, cand, zeta))
        res = np.asarray(np.where(active, cand_res, res))
    return zeta, np.abs(res) <= tol * scale


def _homotopy_rescue(bad_targets, anchor_target, anchor_zeta, f, fprime,
                     project, tol, max_iter):
    """Scalar continuation along the segment anchor→target for stragglers."""
    out = np.empty(bad_targets.shape, dtype=complex)
    ok = np.zeros(bad_targets.shape, dtype=bool)
    for idx, zt in np.ndenumerate(bad_targets):
        steps = 4
        for _attempt in range(6):
            zeta = complex(anchor_zeta)
            good = True
            for k in range(1, steps + 1):
                t = anchor_target + (zt - anchor_target) * (k / steps)
                zeta_arr, conv = _damped_newton(
                    np.array(t), np.array(zeta), f, fprime, project,
                    tol, max_iter)
                if not bool(conv):
                    good = False
                    break
                zeta = complex(zeta_arr)
            if good:
                out[idx] = zeta
                ok[idx] = True
                break
            steps *= 2
    return out, ok


# ----------------------------------------------------------------------
# HHP strip chart: φ(ζ) = ζ + sinh ζ
# ----------------------------------------------------------------------

@dataclass
class ConformalChart:
    """Base chart record: kind tag plus the Newton inversion policy."""

    kind: str = field(init=False, default="abstract")
    newton_tol: float = 1e-12
    max_iter: int = 60


@dataclass
class HHPStrip(ConformalChart):
    """φ(ζ) = ζ + sinh ζ on S = {|Im ζ| < π/2} onto Ω₁."""

    def __post_init__(self):
        self.kind = "hhp_strip"

    @staticmethod
    def forward(zeta):
        zeta = _as_complex(zeta)
        if np.any(np.abs(zeta.imag) > _HALF_PI + 1e-12):
            raise DomainError("hhp_forward: ζ outside the closed strip |Im ζ| ≤ π/2")
        return zeta + np.sinh(zeta)

    @staticmethod
    def derivative(zeta):
        return 1.0 + np.cosh(_as_complex(zeta))

    @staticmethod
    def contains_image(z, tol: float = 0.0):
        """Membership of z in (a tol-neighborhood of) Ω₁ = {|x₂| < π/2 + cosh x₁}."""
        z = _as_complex(z)
        x = np.clip(np.abs(z.real), 0.0, 700.0)
        return np.abs(z.imag) <= _HALF_PI + np.cosh(x) + tol

    def inverse(self, z):
        """φ⁻¹(z) for z in the closure of Ω₁ (vectorized)."""
        z = _as_complex(z)
        if not np.all(self.contains_image(z, tol=1e-9 * (1.0 + np.abs(z)))):
            raise DomainError("hhp_inverse: z outside the hairpin phase closure")
        shape = z.shape
        zf = z.ravel()

        def project(w):
            w.imag = np.clip(w.imag, -_HALF_PI, _HALF_PI)
            return w

        f = lambda w: w + np.sinh(w)
        fp = lambda w: 1.0 + np.cosh(w)

        w0 = np.where(np.abs(zf) <= 2.5, zf / 2.0, np.arcsinh(zf))
        w, conv = _damped_newton(zf, w0, f, fp, project,
                                 self.newton_tol, self.max_iter)
        if not np.all(conv):
            # retry the complementary initialization
            alt = np.where(np.abs(zf) <= 2.5, np.arcsinh(zf), zf / 2.0)
            w2, conv2 = _damped_newton(zf[~conv], alt[~conv], f, fp, project,
                                       self.newton_tol, self.max_iter)
            w[~conv] = w2
            conv[~conv] = conv2
        if not np.all(conv):
            bad = ~conv
            res, ok = _homotopy_rescue(zf[bad], 0.0 + 0.0j, 0.0 + 0.0j,
                                       f, fp, project,
                                       self.newton_tol, self.max_iter)
            w[bad] = res
            if not np.all(ok):
                raise ConvergenceError(
                    f"hhp_inverse: {int(np.sum(~ok))} point(s) failed to converge",
                    last_iterate=w.reshape(shape))
        return w.reshape(shape)


# ----------------------------------------------------------------------
# Slit half-plane chart (hairpin route 2)
# ----------------------------------------------------------------------

@dataclass
class SlitHalfPlane(ConformalChart):
    """Φ_a on S_a = {Re ζ > 0} ∖ (0, a], the double-hairpin description."""

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise InvalidInputError("SlitHalfPlane requires a > 0")
        self.kind = "slit_half_plane"
        self._anchors = None

    # -- forward map -----------------------------------------------------
    def _sqrt_factors(self, zeta):
        """√(ζ/a − 1)·√(ζ/a + 1); each factor principal, product analytic
        on S_a (arguments only reach the cut on the excluded slit)."""
        t = _as_complex(zeta) / self.a
        return np.sqrt(t - 1.0) * np.sqrt(t + 1.0)

    def forward(self, zeta):
        zeta = _as_complex(zeta)
        if np.any(zeta.real < -1e-12 * self.a):
            raise DomainError("slit_forward: Re ζ must be ≥ 0")
        t = zeta / self.a
        w1 = self._sqrt_factors(zeta)
        return self.a * (w1 + np.log(t + w1))

    def derivative(self, zeta):
        zeta = _as_complex(zeta)
        t = zeta / self.a
        return np.sqrt(t + 1.0) / np.sqrt(t - 1.0)

    # -- inverse map -------------------------------------------------------
    def _anchor_table(self):
        if self._anchors is None:
            a = self.a
            xi = a * np.concatenate([np.geomspace(0.05, 1.0, 8),
                                     np.geomspace(1.2, 60.0, 16)])
            # even count: no η = 0 row (it would sit on the slit, where the
            # branch is ambiguous and the tip ζ = a has Φ' = ∞)
            eta = a * np.sinh(np.linspace(-4.5, 4.5, 24))
            Z = (xi[:, None] + 1j * eta[None, :]).ravel()
            Z = Z[np.abs(Z - a) > 0.05 * a]
            W = self.forward(Z)
            self._anchors = (Z, W)
        return self._anchors

    def inverse(self, z):
        """Φ_a⁻¹(z) for z in the closure of D_a = Ω_a ∩ {x₁ ≥ 0}."""
        z = _as_complex(z)
        shape = z.shape
        zf = z.ravel()
        a = self.a
        if np.any(zf.real < -1e-9 * a):
            raise DomainError("slit_inverse: z must satisfy x₁ ≥ 0")

        def project(zeta):
            zeta.real = np.maximum(zeta.real, 1e-300)
            return zeta

        f = self.forward
        fp = self.derivative

        zeta0 = np.empty_like(zf)
        small = np.abs(zf) <= 0.5 * a
        large = np.abs(zf) > 4.0 * a
        mid = ~(small | large)
        # saddle-local square-root expansion: Φ_a(ζ) ≈ 2√(2a)·√(ζ−a)
        zeta0[small] = a + zf[small] ** 2 / (8.0 * a)
        if np.any(large):
            zl = zf[large]
            est = zl - a * np.log(2.0 * zl / a)
            est = np.where(est.real <= 0.1 * a, 0.1 * a + 1j * est.imag, est)
            zeta0[large] = zl - a * np.log(2.0 * est / a)
        if np.any(mid):
            anchors_zeta, anchors_z = self._anchor_table()
            zeta0[mid] = anchors_zeta[_nearest_anchor(zf[mid], anchors_z)]

        zeta, conv = _damped_newton(zf, zeta0, f, fp, project,
                                    self.newton_tol, self.max_iter)
        if not np.all(conv):
            bad = ~conv
            # rescue along a segment from the image of ζ = 2a (a regular
            # interior point on the symmetry axis)
            res, ok = _homotopy_rescue(zf[bad],
                                       complex(self.forward(np.array(2.0 * a))),
                                       complex(2.0 * a), f, fp, project,
                                       self.newton_tol, self.max_iter)
            zeta[bad] = res
            if not np.all(ok):
                raise ConvergenceError(
                    f"slit_inverse: {int(np.sum(~ok))} point(s) failed to converge",
                    last_iterate=zeta.reshape(shape))
        return zeta.reshape(shape)


# ----------------------------------------------------------------------
# Scherk strip chart
# ----------------------------------------------------------------------

def _log1p_exp(w):
    """Principal log(1 + e^w), overflow-safe, branch-correct for |Im w| < π."""
    w = _as_complex(w)
    out = np.empty_like(w)
    big = w.real > 0.0
    # Re w > 0: log(1+e^w) = w + log(1+e^{−w})
    out[big] = w[big] + np.log(1.0 + np.exp(-w[big]))
    out[~big] = np.log(1.0 + np.exp(w[~big]))
    return out


@dataclass
class ScherkStrip(ConformalChart):
    """Φ_s on S_l = {Re ζ > 0, |Im ζ| < l/2} with l = 2πs, b = 2s log(1/s)."""

    s: float = 0.5
    quad_order: int = 16

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise InvalidInputError("ScherkStrip requires 0 < s < 1")
        self.kind = "scherk_strip"
        self.l = 2.0 * np.pi * self.s
        self.b = 2.0 * self.s * np.log(1.0 / self.s)
        self._c = None
        self._anchors = None
        self._c_inf = None
        self._phi_top = None
        self._corner = None

    # -- φ_s and the integrand ------------------------------------------
    def phi(self, zeta):
        zeta = _as_complex(zeta)
        l, b = self.l, self.b
        t1 = -0.5 * _log1p_exp(2.0 * np.pi * (zeta - b) / l)
        t2 = 0.5 * _log1p_exp(-2.0 * np.pi * (zeta + b) / l)
        return t1 + t2 + np.pi * zeta / l

    def integrand(self, zeta):
        return np.exp(self.phi(zeta))

    def phi_im_axis(self, t):
        """Im φ_s(it) closed form: t/(2s) − arctan(s² sin(t/s) / (1 + s² cos(t/s)))."""
        t = np.asarray(t, dtype=float)
        s = self.s
        return t / (2.0 * s) - np.arctan(s**2 * np.sin(t / s)
                                         / (1.0 + s**2 * np.cos(t / s)))

    # -- offset ----------------------------------------------------------
    @property
    def offset(self) -> float:
        """c_s = −Re ∫₀^{il/2} e^{φ_s(η)} dη (adaptive quadrature).

        The integrand is smooth on the whole closed segment — the half-log
        singularities of φ_s sit at ζ = b ± il/2, off the imaginary axis —
        so no endpoint substitution is needed here.
        """
        if self._c is None:
            val = adaptive_complex_quad(
                lambda t: 1j * self.integrand(1j * t), 0.0, self.l / 2.0,
                tol=1e-13)
            self._c = -float(val.real)
        return self._c

    # -- forward map -------------------------------------------------------
    def _singularities(self):
        return np.array([self.b + 0.5j * self.l, self.b - 0.5j * self.l])

    def forward(self, zeta, order: int | None = None):
        """Φ_s(ζ) by composite Gauss–Legendre along the straight segment
        0 → ζ, with refinement keyed to the distance from the half-log
        singularities b ± il/2.  Arguments within l/10 of a singular corner
        are evaluated through the square-root corner chart instead, which is
        regular right up to (and at) the corner."""
        zeta = _as_complex(zeta)
        if np.any(zeta.real < -1e-12):
            raise DomainError("scherk_forward: Re ζ must be ≥ 0")
        order = order or self.quad_order
        flat = zeta.ravel()
        out = np.empty_like(flat)
        zeta_c = self.b + 0.5j * self.l
        zone = self.l / 10.0
        up = np.abs(flat - zeta_c) <= zone
        lo = ~up & (np.abs(flat - np.conj(zeta_c)) <= zone)
        if np.any(up):
            # δ in the closed strip has Im ≤ 0, so √(−δ) lands in the
            # closed first τ-quadrant — the chart's domain.
            out[up] = self._corner_G(np.sqrt(zeta_c - flat[up]))
        if np.any(lo):
            out[lo] = np.conj(
                self._corner_G(np.sqrt(zeta_c - np.conj(flat[lo]))))
        bulk = ~(up | lo)
        if np.any(bulk):
            fb = flat[bulk]
            sing = self._singularities()
            # Bucket by required composite refinement (distance of the
            # segment to the singularities — conservatively the endpoints').
            dist = np.min(np.abs(fb[:, None] - sing[None, :]), axis=1)
            npieces = np.clip(
                (np.abs(fb) / np.maximum(dist, 1e-12)).astype(int) + 4, 4, 256)
            vals = np.empty_like(fb)
            for p in np.unique(npieces):
                m = npieces == p
                vals[m] = segment_quad(self.integrand,
                                       np.zeros(int(np.sum(m)), complex),
                                       fb[m], order=order, pieces=int(p))
            out[bulk] = vals + self.offset
        return out.reshape(zeta.shape)

    def derivative(self, zeta):
        return self.integrand(zeta)

    # -- anchors and asymptotics ----------------------------------------
    def _anchor_table(self):
        if self._anchors is None:
            l, b = self.l, self.b
            u = np.concatenate([np.linspace(0.0, 2.0 * b, 17)[1:],
                                np.linspace(2.0 * b, b + 3.0 * l, 12)[1:]])
            v = np.linspace(-0.5 * l, 0.5 * l, 27)[1:-1]
            Z = u[:, None] + 1j * v[None, :]
            # March column by column: Φ on column 0 from the axis values,
            # then horizontal segments between columns (all inside S_l).
            W = np.empty_like(Z)
            axis_vals = self._axis_values(v)
            W[0] = axis_vals + segment_quad(self.integrand, 1j * v,
                                            Z[0], order=self.quad_order, pieces=4)
            for i in range(1, len(u)):
                W[i] = W[i - 1] + segment_quad(self.integrand, Z[i - 1], Z[i],
                                               order=self.quad_order, pieces=4)
            self._anchors = (Z.ravel(), W.ravel())
        return self._anchors

    def _axis_values(self, v):
        """Φ_s(iv) for an ascending array of ordinates (cumulative Gauss)."""
        v = np.asarray(v, dtype=float)
        vs = np.concatenate([[0.0], v])
        incs = segment_quad(self.integrand, 1j * vs[:-1], 1j * vs[1:],
                            order=self.quad_order, pieces=6)
        return self.offset + np.cumsum(incs)

    @property
    def asymptotic_offset(self) -> float:
        """C∞ with Φ_s(ζ) = ζ/s + C∞ + O(e^{−2πRe ζ/l}); real."""
        if self._c_inf is None:
            u_far = self.b + 6.0 * self.l
            val = self.forward(np.array(u_far + 0.0j))
            self._c_inf = float(val.real) - u_far / self.s
        return self._c_inf

    # -- corner-local inversion (saddle neighborhood) ----------------------
    #
    # Near the corner ζ* = b + il/2 the map has a square-root branch:
    # Φ_s(ζ* − τ²) = iπ + B·τ·(1 + O(τ²)) with B = −2i·√((1−s⁴)/s).
    # Newton in τ is regular there (dΦ/dτ → B ≠ 0), and the integrand
    # e^{φ_s(ζ*−τ²)}·(−2τ) is analytic at τ = 0, so straight τ-space legs
    # integrate cleanly — the same square-root substitution used for the
    # boundary-line coordinate, in complex form.
    def _corner_data(self):
        if self._corner is None:
            zeta_c = self.b + 0.5j * self.l
            tau_ref = np.exp(0.25j * np.pi) * np.sqrt(self.l / 8.0)
            val_ref = complex(self.forward(np.array(zeta_c - tau_ref**2)))
            B = -2j * np.sqrt((1.0 - self.s**4) / self.s)
            self._corner = (zeta_c, tau_ref, val_ref, B)
        return self._corner

    @property
    def corner_zone_radius(self) -> float:
        """Image radius around the saddle iπ handled by the τ-chart."""
        _, _, _, B = self._corner_data()
        return 0.5 * abs(B) * np.sqrt(self.l / 8.0)

    def _corner_G(self, tau):
        zeta_c, tau_ref, val_ref, _ = self._corner_data()
        tau = _as_complex(tau)
        g = lambda t: -2.0 * t * self.integrand(zeta_c - t * t)
        inc = segment_quad(g, np.full(tau.shape, tau_ref, dtype=complex),
                           tau, order=16, pieces=6)
        return val_ref + inc

    def _corner_Gp(self, tau):
        zeta_c, _, _, B = self._corner_data()
        with np.errstate(all="ignore"):
            val = -2.0 * tau * self.integrand(zeta_c - tau * tau)
        return np.where(np.abs(tau) > 0.0, val, B)

    def _inverse_corner(self, z):
        """Invert targets near the upper saddle via the τ = √(ζ*−ζ) chart."""
        zeta_c, _, _, B = self._corner_data()
        cap = 0.9 * np.sqrt(self.l)

        def project(t):
            t = np.where(t.real < 0.0, -t, t)          # τ and −τ are the same ζ
            t = np.where(t.imag < 0.0, np.conj(t), t)  # mirror into the strip
            r = np.abs(t)
            return np.where(r > cap, t * (cap / np.maximum(r, 1e-300)), t)

        tau0 = (z - 1j * np.pi) / B
        tau, conv = _damped_newton(z, tau0, self._corner_G, self._corner_Gp,
                                   project, self.newton_tol, self.max_iter)
        if not np.all(conv):
            bad = ~conv
            anchor_tau = 0.5 * np.exp(0.25j * np.pi) * np.sqrt(self.l / 8.0)
            res, ok = _homotopy_rescue(
                z[bad], complex(self._corner_G(np.array(anchor_tau))),
                complex(anchor_tau), self._corner_G, self._corner_Gp,
                project, self.newton_tol, self.max_iter)
            tau[bad] = res
            if not np.all(ok):
                raise ConvergenceError(
                    f"scherk_inverse: {int(np.sum(~ok))} corner point(s) failed",
                    last_iterate=zeta_c - tau**2)
        return zeta_c - tau**2

    # -- inverse -----------------------------------------------------------
    def inverse(self, z):
        """Φ_s⁻¹(z) for z in the closure of the image half-cell D_s.

        Bulk targets run damped Newton with incremental segment integration
        (each step updates Φ(ζ_{n+1}) = Φ(ζ_n) + ∫_{ζ_n}^{ζ_{n+1}} e^{φ_s});
        targets within `corner_zone_radius` of a saddle ±iπ go through the
        square-root corner chart instead.
        """
        z = _as_complex(z)
        shape = z.shape
        zall = z.ravel()
        r_zone = self.corner_zone_radius
        up = np.abs(zall - 1j * np.pi) <= r_zone
        lo = np.abs(zall + 1j * np.pi) <= r_zone
        out = np.empty_like(zall)
        if np.any(up):
            out[up] = self._inverse_corner(zall[up])
        if np.any(lo):
            # conjugation symmetry: Φ_s(ζ̄) = conj Φ_s(ζ)
            out[lo] = np.conj(self._inverse_corner(np.conj(zall[lo])))
        bulk = ~(up | lo)
        if np.any(bulk):
            out[bulk] = self._inverse_bulk(zall[bulk])
        return out.reshape(shape)

    def _inverse_bulk(self, zf):
        l = self.l
        margin = 1e-13 * l

        anchors_zeta, anchors_w = self._anchor_table()
        far = zf.real > float(np.max(anchors_w.real)) - 2.0
        zeta = np.empty_like(zf)
        if np.any(far):
            zeta[far] = self.s * (zf[far] - self.asymptotic_offset)
        if np.any(~far):
            zeta[~far] = anchors_zeta[_nearest_anchor(zf[~far], anchors_w)]

        def project(zt):
            zt.real = np.maximum(zt.real, 0.0)
            zt.imag = np.clip(zt.imag, -0.5 * l + margin, 0.5 * l - margin)
            return zt

        zeta = project(zeta)
        val = self.forward(zeta)
        scale = np.maximum(1.0, np.abs(zf))
        conv = np.zeros(zf.shape, dtype=bool)
        for _ in range(self.max_iter):
            res = val - zf
            conv = np.abs(res) <= self.newton_tol * scale
            if np.all(conv):
                break
            with np.errstate(all="ignore"):
                step = np.where(~conv, -res / self.integrand(zeta), 0.0)
            step = np.where(np.isfinite(step), step, 0.0)
            factor = np.ones(zf.shape)
            for _h in range(10):
                cand = project(zeta + factor * step)
                inc = segment_quad(self.integrand, zeta, cand,
                                   order=self.quad_order, pieces=3)
                cand_val = val + inc
                worse = ~conv & (np.abs(cand_val - zf) > np.abs(res))
                if not np.any(worse):
                    break
                factor = np.where(worse, 0.5 * factor, factor)
            zeta = np.where(~conv, cand, zeta)
            val = np.where(~conv, cand_val, val)
        if not np.all(conv):
            bad = ~conv
            u0 = self.b + self.l
            res_zeta, ok = _homotopy_rescue(
                zf[bad], complex(self.forward(np.array(u0 + 0j))), complex(u0),
                self.forward, self.integrand, project,
                self.newton_tol, self.max_iter)
            zeta[bad] = res_zeta
            if not np.all(ok):
                raise ConvergenceError(
                    f"scherk_inverse: {int(np.sum(~ok))} point(s) failed to converge",
                    last_iterate=zeta)
        return zeta

    # -- boundary line (steepest descent segment → saddle) ----------------
    def _top_corner_value(self) -> complex:
        """Φ_s(il/2): offset integral continued to the strip's top edge."""
        if getattr(self, "_phi_top", None) is None:
            top = adaptive_complex_quad(
                lambda t: 1j * self.integrand(1j * t), 0.0, self.l / 2.0,
                tol=1e-13)
            self._phi_top = self.offset + top
        return self._phi_top

    def upper_line_x2(self, u: float) -> float:
        """x₂-coordinate Im Φ_s(u + il/2) of the image of the upper strip
        boundary, 0 ≤ u ≤ b.

        The integrand has the half-log singularity at u = b; the square-root
        substitution t = b − σ² makes it smooth, so the corner value (the
        saddle) is directly reachable:
        ∫₀^u f(t+il/2) dt = ∫_{√(b−u)}^{√b} f(b−σ²+il/2)·2σ dσ.
        """
        if not 0.0 <= u <= self.b:
            raise DomainError("upper_line_x2: u must lie in [0, b]")
        start = self._top_corner_value()
        if u == 0.0:
            return float(start.imag)
        lhalf = 0.5j * self.l
        seg = adaptive_complex_quad(
            lambda sg: 2.0 * sg * self.integrand(self.b - sg**2 + lhalf),
            np.sqrt(self.b - u), np.sqrt(self.b), tol=1e-13)
        return float((start + seg).imag)

    def measure_saddle_height(self, target_x2: float = np.pi) -> float:
        """Measured chart height u* of the saddle point.

        Since Φ_s′ blows up like an inverse square root at the corner
        b + il/2, the preimage of x₂ = target − ε satisfies
        u(ε) = u* − K ε² + O(ε³); two roots and a Richardson step remove
        the ε² term.  Roots are found in the substituted variable
        σ = √(b − u), where x₂ depends on σ with a nonzero slope.
        """
        sqrt_b = np.sqrt(self.b)

        def root_for(e):
            g = lambda sg: self.upper_line_x2(self.b - sg**2) - (target_x2 - e)
            sg = brentq(g, 0.0, sqrt_b * (1.0 - 1e-12),
                        xtol=1e-15, rtol=8.9e-16)
            return self.b - sg**2

        eps = 1e-4
        t1 = root_for(eps)
        t2 = root_for(2.0 * eps)
        return (4.0 * t1 - t2) / 3.0


# ----------------------------------------------------------------------
# closed-form Scherk loop (free boundary of one zero-phase component)
# ----------------------------------------------------------------------

def scherk_loop_point(s: float, u_tilde):
    """Right half of the loop through the chart boundary parameter ũ ∈ [−l/2, l/2]:

    x₁(ũ) = (1−s²) log[(√(1+s⁴+2s²cos(ũ/s)) + 2s cos(ũ/(2s))) / (1−s²)]
    x₂(ũ) = (1+s²) arctan[2s sin(ũ/(2s)) / √(1+s⁴+2s²cos(ũ/s))]
    """
    u_tilde = np.asarray(u_tilde, dtype=float)
    root = np.sqrt(1.0 + s**4 + 2.0 * s**2 * np.cos(u_tilde / s))
    x1 = (1.0 - s**2) * np.log((root + 2.0 * s * np.cos(u_tilde / (2.0 * s)))
                               / (1.0 - s**2))
    x2 = (1.0 + s**2) * np.arctan(2.0 * s * np.sin(u_tilde / (2.0 * s)) / root)
    return np.stack([x1, x2], axis=-1)


def scherk_loop_implicit(s: float, p):
    """Implicit loop residual (1−s²)cosh(x₁/(1−s²)) − (1+s²)cos(x₂/(1+s²));
    zero on the loop, negative strictly inside (zero phase), positive outside."""
    p = np.asarray(p, dtype=float)
    x1 = np.clip(np.abs(p[..., 0]) / (1.0 - s**2), 0.0, 700.0)
    return ((1.0 - s**2) * np.cosh(x1)
            - (1.0 + s**2) * np.cos(p[..., 1] / (1.0 + s**2)))


def scherk_loop_x2_extent(s: float) -> float:
    """Half-height of the loop on the x₂ axis: (1+s²)·arctan(2s/(1−s²))."""
    return (1.0 + s**2) * np.arctan(2.0 * s / (1.0 - s**2))


# ----------------------------------------------------------------------
# operation-style wrappers (module-level vocabulary)
# ----------------------------------------------------------------------

_HHP = HHPStrip()


def hhp_forward(zeta):
    """φ(ζ) = ζ + sinh ζ."""
    return _HHP.forward(zeta)


def hhp_inverse(z, newton_tol: float = 1e-12, max_iter: int = 60):
    chart = HHPStrip(newton_tol=newton_tol, max_iter=max_iter)
    return chart.inverse(z)


def slit_forward(a: float, zeta):
    return SlitHalfPlane(a=a).forward(zeta)


def slit_inverse(a: float, z, newton_tol: float = 1e-12, max_iter: int = 60):
    return SlitHalfPlane(a=a, newton_tol=newton_tol, max_iter=max_iter).inverse(z)


def scherk_offset(s: float) -> float:
    return ScherkStrip(s=s).offset


def scherk_forward(s: float, zeta):
    return ScherkStrip(s=s).forward(zeta)


def scherk_inverse(s: float, z, newton_tol: float = 1e-12, max_iter: int = 60):
    return ScherkStrip(s=s, newton_tol=newton_tol, max_iter=max_iter).inverse(z)
