// SPDX-License-Identifier: Apache-2.0
//! The natural scale ξ(x,E) = 2∫₀ˣ p, its inverse, its complex continuation
//! and the adiabatic coupling θ′.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::quad::{composite_gl, fixed_gl, gl20, Quadrature};
use crate::numerics::roots::safeguarded_newton;
use crate::potential::PotentialModel;

/// Integrands cached along the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// p
    Momentum,
    /// 1/p
    InverseMomentum,
    /// 1/p³
    InverseCube,
}

impl Kernel {
    fn eval(self, p: f64) -> f64 {
        match self {
            Kernel::Momentum => p,
            Kernel::InverseMomentum => 1.0 / p,
            Kernel::InverseCube => 1.0 / (p * p * p),
        }
    }

    fn eval_c(self, p: C) -> C {
        match self {
            Kernel::Momentum => p,
            Kernel::InverseMomentum => p.inv(),
            Kernel::InverseCube => (p * p * p).inv(),
        }
    }

    const ALL: [Kernel; 3] = [Kernel::Momentum, Kernel::InverseMomentum, Kernel::InverseCube];

    fn index(self) -> usize {
        self as usize
    }
}

/// Tunables for [`NaturalScaleMap`].
#[derive(Debug, Clone, Copy)]
pub struct ScaleConfig {
    pub quad_tol: f64,
    pub inv_tol: f64,
    /// Start of the mapped tail for ω, in units of `a`.
    pub x_cut: f64,
    /// Half-width of the cached table, in units of `a`.
    pub table_half_width: f64,
    /// Table spacing, in units of `a`.
    pub table_step: f64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self { quad_tol: 1e-12, inv_tol: 1e-12, x_cut: 30.0, table_half_width: 40.0, table_step: 0.25 }
    }
}

/// ξ(·, E) for one energy, with cumulative integrals cached on a grid.
#[derive(Debug, Clone)]
pub struct NaturalScaleMap {
    pub model: PotentialModel,
    pub e: f64,
    pub config: ScaleConfig,
    p_inf: f64,
    omega: [f64; 3],
    h: f64,
    n_half: usize,
    cum: [Vec<f64>; 3],
}

impl NaturalScaleMap {
    pub fn new(model: PotentialModel, e: f64) -> Result<Self> {
        Self::with_config(model, e, ScaleConfig::default())
    }

    pub fn with_config(model: PotentialModel, e: f64, config: ScaleConfig) -> Result<Self> {
        if !(e > model.sup()) {
            return Err(Error::InvalidParameter(format!("energy {e} does not exceed the barrier {}", model.sup())));
        }
        let h = config.table_step * model.a;
        let n_half = (config.table_half_width / config.table_step).round() as usize;
        let q = Quadrature { abs_tol: 1e-15, rel_tol: 1e-15, max_panels: 200 };
        let mut cum: [Vec<f64>; 3] = Default::default();
        for k in Kernel::ALL {
            let mut v = vec![0.0; 2 * n_half + 1];
            for i in 0..n_half {
                let lo = i as f64 * h;
                let f = |x: f64| k.eval(model.momentum_real(e, x));
                let up = q.integrate(f, lo, lo + h).or_else(|_| Ok::<f64, Error>(composite_gl(gl20(), f, lo, lo + h, 8)))?;
                let dn = q
                    .integrate(f, -lo - h, -lo)
                    .or_else(|_| Ok::<f64, Error>(composite_gl(gl20(), f, -lo - h, -lo, 8)))?;
                v[n_half + i + 1] = v[n_half + i] + up;
                v[n_half - i - 1] = v[n_half - i] - dn;
            }
            cum[k.index()] = v;
        }
        let mut map = Self { model, e, config, p_inf: e.sqrt(), omega: [0.0; 3], h, n_half, cum };
        map.omega = map.compute_omega()?;
        Ok(map)
    }

    pub fn energy(&self) -> f64 {
        self.e
    }

    /// Asymptotic momentum p(∞, E).
    pub fn p_inf(&self) -> f64 {
        self.p_inf
    }

    /// ω(E) = ∫₀^∞ (p − p(∞)) dy.
    pub fn omega(&self) -> f64 {
        self.omega[0]
    }

    /// (ω, ∂_E ω, ∂²_E ω).
    pub fn omega_derivatives(&self) -> [f64; 3] {
        self.omega
    }

    fn compute_omega(&self) -> Result<[f64; 3]> {
        let m = self.model;
        let e = self.e;
        let pi = self.p_inf;
        let x_cut = self.config.x_cut * m.a;
        let q = Quadrature::with_tol(self.config.quad_tol * 1e-2);
        // cancellation-free forms of p − p∞ and its E-derivatives
        let g = move |x: f64| {
            let v = m.eval_real(x);
            let p = m.momentum_real(e, x);
            let d = p - pi;
            let d = if v.abs() < 1e-3 * e { -v / (p + pi) } else { d };
            let d1 = v / (2.0 * p * pi * (p + pi));
            let d3 = -v * (p * p + p * pi + pi * pi) / (p + pi) / (4.0 * p.powi(3) * pi.powi(3));
            [d, d1, d3]
        };
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let inner = q.integrate(|x| g(x)[k], 0.0, x_cut)?;
            let tail = q.integrate(
                |u: f64| {
                    if u <= 0.0 {
                        0.0
                    } else {
                        g(x_cut / u)[k] * x_cut / (u * u)
                    }
                },
                0.0,
                1.0,
            )?;
            *o = inner + tail;
        }
        Ok(out)
    }

    /// ∫₀ˣ K(p(y)) dy along the real axis.
    pub fn cumulative(&self, kernel: Kernel, x: f64) -> f64 {
        let m = self.model;
        let e = self.e;
        let f = |y: f64| kernel.eval(m.momentum_real(e, y));
        let table = &self.cum[kernel.index()];
        let lim = self.n_half as f64 * self.h;
        if x.abs() <= lim {
            let k = (x / self.h).round() as i64;
            let idx = (k + self.n_half as i64) as usize;
            let xk = k as f64 * self.h;
            table[idx] + fixed_gl(gl20(), f, xk, x)
        } else {
            let (base, from) = if x > 0.0 { (table[2 * self.n_half], lim) } else { (table[0], -lim) };
            let q = Quadrature::with_tol(self.config.quad_tol);
            let extra = q.integrate(f, from, x).unwrap_or_else(|_| composite_gl(gl20(), f, from, x, 64));
            base + extra
        }
    }

    /// ξ(x, E) for real x.
    pub fn xi(&self, x: f64) -> f64 {
        2.0 * self.cumulative(Kernel::Momentum, x)
    }

    /// ∂_E ξ(x, E) = ∫₀ˣ dy/p.
    pub fn xi_de(&self, x: f64) -> f64 {
        self.cumulative(Kernel::InverseMomentum, x)
    }

    /// ∂²_E ξ(x, E) = −½∫₀ˣ dy/p³.
    pub fn xi_de2(&self, x: f64) -> f64 {
        -0.5 * self.cumulative(Kernel::InverseCube, x)
    }

    /// Inverse of the natural scale: the x with ξ(x) = `xi`.
    pub fn xi_inverse(&self, xi: f64) -> Result<f64> {
        if xi == 0.0 {
            return Ok(0.0);
        }
        let p_min = (self.e - self.model.sup()).sqrt();
        let p_max = self.p_inf.max(self.model.momentum_real(self.e, 0.0));
        let (lo, hi) = if xi > 0.0 {
            (xi / (2.0 * p_max), xi / (2.0 * p_min))
        } else {
            (xi / (2.0 * p_min), xi / (2.0 * p_max))
        };
        let (lo, hi) = (lo - 1e-9 * (1.0 + lo.abs()), hi + 1e-9 * (1.0 + hi.abs()));
        let tol = self.config.inv_tol * 1e-2;
        let x = safeguarded_newton(|x| (self.xi(x) - xi, 2.0 * self.model.momentum_real(self.e, x)), lo, hi, tol)?;
        let resid = (self.xi(x) - xi).abs();
        if resid > self.config.inv_tol * (1.0 + xi.abs()) {
            return Err(Error::NoConvergence(format!("ξ inverse residual {resid:e} at ξ = {xi}")));
        }
        Ok(x)
    }

    /// θ′ as a function of x: ∂ₓp/(2p²), i.e. d/dξ ln p.
    pub fn theta_prime_at_x(&self, x: f64) -> f64 {
        theta_prime_at_x(&self.model, self.e, x)
    }

    /// θ′(ξ).
    pub fn theta_prime(&self, xi: f64) -> Result<f64> {
        Ok(self.theta_prime_at_x(self.xi_inverse(xi)?))
    }

    /// ξ at a complex point, along the path 0 → Re z → z.
    pub fn xi_complex(&self, z: C) -> Result<C> {
        self.check_path_clear(z)?;
        path_integral(&self.model, self.e, &[C::new(0.0, 0.0), C::new(z.re, 0.0), z], Kernel::Momentum, false)
            .map(|v| v * 2.0)
    }

    /// Rejects paths whose vertical leg passes over another singular point,
    /// i.e. crosses that point's vertical branch cut.
    fn check_path_clear(&self, z: C) -> Result<()> {
        let im_max = z.im.abs() + self.model.a;
        let mut sing = self.model.poles(im_max);
        sing.extend(self.model.turning_points(self.e, z.re.abs() + self.model.a, im_max));
        for s in sing {
            let s = if z.im < 0.0 { s.conj() } else { s };
            let below = s.im.abs() < z.im.abs() - 1e-9;
            if (s.re - z.re).abs() < 1e-9 * (1.0 + z.re.abs()) && below {
                return Err(Error::PathCrossesCut(s));
            }
        }
        Ok(())
    }
}

/// θ′ at real x: ∂ₓp/(2p²) = −V′/(4p³).
pub fn theta_prime_at_x(model: &PotentialModel, e: f64, x: f64) -> f64 {
    let p = model.momentum_real(e, x);
    -model.derivative_real(x) / (4.0 * p * p * p)
}

/// ∫ K(p) dz along the piecewise-straight path through `waypoints`, with the
/// square-root branch continued along the path (starting positive on the
/// real axis). When `singular_end` is set, the last segment is
/// reparametrised quadratically so that integrable power singularities at
/// the final point become smooth; there p is taken as √(V(end) − V(z)), so
/// the final point must be a turning point (V(end) = E).
pub fn path_integral(model: &PotentialModel, e: f64, waypoints: &[C], kernel: Kernel, singular_end: bool) -> Result<C> {
    let tol = 1e-13;
    let mut prev = None;
    let mut panels = 32;
    for _ in 0..6 {
        let v = path_integral_fixed(model, e, waypoints, kernel, singular_end, panels)?;
        if let Some(p) = prev {
            let d: C = v - p;
            if d.norm() <= tol * (1.0 + v.norm()) {
                return Ok(v);
            }
        }
        prev = Some(v);
        panels *= 2;
    }
    let v = path_integral_fixed(model, e, waypoints, kernel, singular_end, panels)?;
    let d = (v - prev.unwrap_or_default()).norm();
    Err(Error::QuadratureNotConverged { err: d, tol: tol * (1.0 + v.norm()) })
}

fn path_integral_fixed(
    model: &PotentialModel,
    e: f64,
    waypoints: &[C],
    kernel: Kernel,
    singular_end: bool,
    panels: usize,
) -> Result<C> {
    let rule = gl20();
    let mut p_prev = model.momentum(e, waypoints[0])?;
    let mut total = C::new(0.0, 0.0);
    let nseg = waypoints.len() - 1;
    for (i, w) in waypoints.windows(2).enumerate() {
        let (za, zb) = (w[0], w[1]);
        if (zb - za).norm() == 0.0 {
            continue;
        }
        let quadratic = singular_end && i + 1 == nseg;
        let dh = 1.0 / panels as f64;
        for k in 0..panels {
            let lo = k as f64 * dh;
            let c = lo + 0.5 * dh;
            for (x, wt) in rule.0.iter().zip(&rule.1) {
                let s = c + 0.5 * dh * x;
                let r = if quadratic {
                    let t = 1.0 - s;
                    let off = (za - zb) * (t * t);
                    (model.gap(zb, off)?.sqrt(), (zb - za) * (2.0 * t))
                } else {
                    (model.momentum(e, za + (zb - za) * s)?, zb - za)
                };
                let (r, dz) = r;
                let p = if (r - p_prev).norm() <= (-r - p_prev).norm() { r } else { -r };
                p_prev = p;
                total += kernel.eval_c(p) * dz * (0.5 * dh * wt);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Family;

    fn eckart() -> NaturalScaleMap {
        NaturalScaleMap::new(PotentialModel::eckart(1.0, 1.0).unwrap(), 2.0).unwrap()
    }

    #[test]
    fn free_limit_is_linear() {
        let s = NaturalScaleMap::new(PotentialModel::free(), 1.0).unwrap();
        assert!((s.xi(3.0) - 6.0).abs() < 1e-13);
        assert!((s.xi_inverse(6.0).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(s.theta_prime(2.0).unwrap(), 0.0);
    }

    #[test]
    fn xi_vanishes_at_origin_and_is_odd_for_even_barrier() {
        let s = eckart();
        assert_eq!(s.xi(0.0), 0.0);
        assert!((s.xi(1.3) + s.xi(-1.3)).abs() < 1e-13);
    }

    #[test]
    fn eckart_xi_at_one_matches_reference() {
        // 2∫₀¹ √(2 − sech²y) dy, evaluated independently at 40 digits
        assert!((eckart().xi(1.0) - 2.219_509_871_831_934_6).abs() < 1e-12);
    }

    #[test]
    fn omega_and_tail_limit() {
        let s = eckart();
        assert!((s.omega() + 0.391_244_515_285_269_43).abs() < 1e-11, "{}", s.omega());
        let lim = |x: f64| s.xi(x) - 2.0 * x * s.p_inf();
        assert!((lim(50.0) - lim(100.0)).abs() < 1e-10);
        assert!((lim(100.0) - 2.0 * s.omega()).abs() < 1e-10);
    }

    #[test]
    fn omega_derivatives_match_differences() {
        let m = PotentialModel::new(Family::RationalPole, 1.0, 1.0).unwrap();
        let at = |e: f64| NaturalScaleMap::new(m, e).unwrap().omega();
        let s = NaturalScaleMap::new(m, 2.0).unwrap();
        let h = 1e-3;
        let d1 = (at(2.0 + h) - at(2.0 - h)) / (2.0 * h);
        let d2 = (at(2.0 + h) - 2.0 * at(2.0) + at(2.0 - h)) / (h * h);
        let [_, w1, w2] = s.omega_derivatives();
        assert!((d1 - w1).abs() < 1e-6, "{d1} {w1}");
        assert!((d2 - w2).abs() < 1e-4, "{d2} {w2}");
    }

    #[test]
    fn inverse_round_trips_on_a_grid() {
        let s = eckart();
        for i in -40..=40 {
            let x = i as f64 * 0.75;
            let back = s.xi_inverse(s.xi(x)).unwrap();
            assert!((back - x).abs() < 1e-11, "x={x} back={back}");
        }
    }

    #[test]
    fn theta_prime_is_log_derivative_in_xi() {
        let s = eckart();
        let pt = |xi: f64| s.model.momentum_real(2.0, s.xi_inverse(xi).unwrap());
        let xi0 = s.xi(1.0);
        let h = 1e-3;
        let fd = (pt(xi0 + h) - pt(xi0 - h)) / (2.0 * h) / pt(xi0);
        assert!((fd - s.theta_prime(xi0).unwrap()).abs() < 1e-6);
        assert_eq!(s.theta_prime(0.0).unwrap(), 0.0);
        assert!((s.theta_prime(-xi0).unwrap() + s.theta_prime(xi0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn complex_xi_at_turning_point_has_known_imaginary_part() {
        let s = eckart();
        let z = C::new(0.0, std::f64::consts::FRAC_PI_4);
        let xi = path_integral(&s.model, 2.0, &[C::new(0.0, 0.0), z], Kernel::Momentum, true).unwrap() * 2.0;
        let exact = std::f64::consts::PI * (2f64.sqrt() - 1.0);
        assert!(xi.re.abs() < 1e-13 && (xi.im - exact).abs() < 1e-12, "{xi}");
    }

    #[test]
    fn complex_xi_rejects_paths_over_singularities() {
        let s = eckart();
        assert!(matches!(s.xi_complex(C::new(0.0, 1.0)), Err(Error::PathCrossesCut(_))));
        let v = s.xi_complex(C::new(0.3, 0.2)).unwrap();
        assert!(v.im > 0.0);
    }
}
