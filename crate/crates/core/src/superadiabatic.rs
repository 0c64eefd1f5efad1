// SPDX-License-Identifier: Apache-2.0
//! Superadiabatic projections and frames.
//!
//! Everything is assembled pointwise from a [`CoefficientJets`] in the
//! adiabatic representation ψ_a = T₀ψ, where the basis matrices become
//! X = −σ_x, Y = −σ_z, Z = [[0,1],[−1,0]] and π₀ = diag(1, 0).
//!
//! The eigenvector matrix of π^(n) is W = [[α, β̄], [β, α]] with
//! α² − |β|² = 1, so W preserves the flux form |c₁|² − |c₂|².

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numerics::linalg::Mat2;
use crate::potential::PotentialModel;
use crate::recursion::{CoefficientJets, Component, JetSource, PoleModel};
use crate::scale::NaturalScaleMap;
use crate::stokes::StokesData;

const I: C = C::new(0.0, 1.0);

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Even n_ε = ξ_c/ε − 1 + σ_ε with the smallest σ_ε ∈ [0, 2).
pub fn optimal_n(eps: f64, xi_c: f64) -> (usize, f64) {
    let r = xi_c / eps - 1.0;
    let snapped = if (r - r.round()).abs() < 1e-9 { r.round() } else { r };
    let mut n = snapped.ceil().max(0.0);
    if n % 2.0 == 1.0 {
        n += 1.0;
    }
    let sigma = (n - snapped).max(0.0);
    (n as usize, if sigma < 1e-9 { 0.0 } else { sigma })
}

/// Basis matrices in the adiabatic representation.
pub fn basis_x() -> Mat2 {
    Mat2::real([[0.0, -1.0], [-1.0, 0.0]])
}

pub fn basis_y() -> Mat2 {
    Mat2::real([[-1.0, 0.0], [0.0, 1.0]])
}

pub fn basis_z() -> Mat2 {
    Mat2::real([[0.0, 1.0], [-1.0, 0.0]])
}

pub fn pi0() -> Mat2 {
    Mat2::real([[1.0, 0.0], [0.0, 0.0]])
}

/// π_k in the adiabatic representation.
pub fn pi_k(j: &CoefficientJets, k: usize) -> Mat2 {
    if k == 0 {
        return pi0();
    }
    let x = I * j.value(Component::X, k);
    basis_x().scale(x) + basis_y().scale(c(j.value(Component::Y, k))) + basis_z().scale(c(j.value(Component::Z, k)))
}

/// π^(n) = Σ_{k≤n} ε^k π_k.
pub fn assemble_projection(j: &CoefficientJets, eps: f64, n: usize) -> Mat2 {
    (0..=n).fold(Mat2::ZERO, |acc, k| acc + pi_k(j, k).scale(c(eps.powi(k as i32))))
}

/// The defect (π^(n))² − π^(n) = Σ_{m>n} ε^m Σ_{j+k=m} π_jπ_k as a matrix,
/// built from the cancellation-free tail of the product.
pub fn projection_defect_matrix(j: &CoefficientJets, eps: f64, n: usize) -> Mat2 {
    let mut acc = Mat2::ZERO;
    for a in 1..=n {
        for b in (n + 1 - a).max(1)..=n {
            let w = eps.powi((a + b) as i32);
            acc = acc + (pi_k(j, a) * pi_k(j, b)).scale(c(w));
        }
    }
    acc
}

/// The scalar g with (π^(n))² − π^(n) = g·1.
pub fn defect_scalar(j: &CoefficientJets, eps: f64, n: usize) -> f64 {
    let mut g = 0.0;
    for a in 1..=n {
        for b in (n + 1 - a).max(1)..=n {
            let v = |cc| j.value(cc, a) * j.value(cc, b);
            // x_a x_b = −x̂_a x̂_b
            g += eps.powi((a + b) as i32) * (-v(Component::X) + v(Component::Y) - v(Component::Z));
        }
    }
    g
}

/// dg/dξ from g_{n+1,k}′ = 2i(x_k z_{n+1} − z_k x_{n+1}).
pub fn defect_scalar_derivative(j: &CoefficientJets, eps: f64, n: usize) -> f64 {
    let (xn, zn) = (j.value(Component::X, n + 1), j.value(Component::Z, n + 1));
    (1..=n)
        .map(|k| {
            let gk = -2.0 * (j.value(Component::X, k) * zn - j.value(Component::Z, k) * xn);
            eps.powi((n + k) as i32) * gk
        })
        .sum()
}

/// Checks that a defect matrix is scalar, returning the scalar.
pub fn projection_defect(m: &Mat2, tol: f64) -> Result<f64> {
    let s = (m.0[0][0] + m.0[1][1]) / 2.0;
    let off = (*m - Mat2::diag(s, s)).max_abs();
    if off > tol * s.norm() && off > f64::MIN_POSITIVE {
        return Err(Error::NotScalar { off, scalar: s.norm() });
    }
    Ok(s.re)
}

/// The order-n frame at one point, in the adiabatic representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub eps: f64,
    pub order: usize,
    pub theta: f64,
    /// χ = Σ ε^k x_k (purely imaginary), η, ζ
    pub chi: C,
    pub eta: f64,
    pub zeta: f64,
    pub g: f64,
    pub lambda: [f64; 2],
    pub alpha: f64,
    pub beta: C,
    pub alpha_prime: f64,
    pub beta_prime: C,
    /// Effective diagonal K₁₁.
    pub rho: f64,
    /// Off-diagonal K₁₂ (so K₂₁ = −K̄₁₂), from the commutator identity.
    pub k12: C,
}

impl FramePoint {
    pub fn new(j: &CoefficientJets, eps: f64, n: usize) -> Result<Self> {
        assert!(j.top() > n, "jets must reach order n + 1");
        let mut chi_h = 0.0;
        let (mut eta, mut zeta) = (0.0, 0.0);
        let (mut dchi_h, mut deta, mut dzeta) = (0.0, 0.0, 0.0);
        for k in 1..=n {
            let e = eps.powi(k as i32);
            chi_h += e * j.value(Component::X, k);
            eta += e * j.value(Component::Y, k);
            zeta += e * j.value(Component::Z, k);
            dchi_h += e * j.derivative(Component::X, k);
            deta += e * j.derivative(Component::Y, k);
            dzeta += e * j.derivative(Component::Z, k);
        }
        let (chi, dchi) = (I * chi_h, I * dchi_h);
        let g = defect_scalar(j, eps, n);
        let dg = defect_scalar_derivative(j, eps, n);
        let s = (1.0 + 4.0 * g).sqrt();
        if !(s.abs() >= 1e-8) {
            return Err(Error::EigenCollision(s.abs()));
        }
        let ds = 2.0 * dg / s;
        let a2 = (1.0 + s - 2.0 * eta) / (2.0 * s);
        let alpha = a2.sqrt();
        let da2 = (-2.0 * deta * s - (1.0 - 2.0 * eta) * ds) / (2.0 * s * s);
        let dalpha = da2 / (2.0 * alpha);
        let num = -(chi + zeta);
        let dnum = -(dchi + dzeta);
        let den = s * alpha;
        let dden = ds * alpha + s * dalpha;
        let beta = num / den;
        let dbeta = (dnum * den - num * dden) / (den * den);
        let theta = j.theta().0;
        let mut fp = FramePoint {
            eps,
            order: n,
            theta,
            chi,
            eta,
            zeta,
            g,
            lambda: [(1.0 + s) / 2.0, (1.0 - s) / 2.0],
            alpha,
            beta,
            alpha_prime: dalpha,
            beta_prime: dbeta,
            rho: 0.0,
            k12: C::new(0.0, 0.0),
        };
        fp.rho = fp.k_direct().0[0][0].re;
        // T C T⁻¹ with C = [iε∂ − H, π^(n)] = −ε^{n+1}(z_{n+1}X + x_{n+1}Z)
        let e1 = eps.powi(n as i32 + 1);
        let xn = I * j.value(Component::X, n + 1);
        let zn = c(j.value(Component::Z, n + 1));
        let comm = (basis_x().scale(zn) + basis_z().scale(xn)).scale(c(-e1));
        let t = fp.w().inverse() * comm * fp.w();
        fp.k12 = t.0[0][1] / s;
        Ok(fp)
    }

    /// W, mapping superadiabatic amplitudes to the adiabatic representation.
    pub fn w(&self) -> Mat2 {
        let a = c(self.alpha);
        Mat2([[a, self.beta.conj()], [self.beta, a]])
    }

    pub fn w_inverse(&self) -> Mat2 {
        let a = c(self.alpha);
        Mat2([[a, -self.beta.conj()], [-self.beta, a]])
    }

    pub fn w_prime(&self) -> Mat2 {
        let a = c(self.alpha_prime);
        Mat2([[a, self.beta_prime.conj()], [self.beta_prime, a]])
    }

    /// The adiabatic generator K_a = diag(½, −½) + (iεθ′/2)σ_x.
    pub fn k_adiabatic(&self) -> Mat2 {
        let o = I * (self.eps * self.theta / 2.0);
        Mat2([[c(0.5), o], [o, c(-0.5)]])
    }

    /// K = W⁻¹K_aW − iεW⁻¹W′ evaluated directly. Its off-diagonal entries
    /// suffer cancellation and are only meaningful at moderate ε.
    pub fn k_direct(&self) -> Mat2 {
        let wi = self.w_inverse();
        wi * self.k_adiabatic() * self.w() - (wi * self.w_prime()).scale(I * self.eps)
    }

    /// The frame T_n = W⁻¹·T with T = [[√p, 1/√p], [√p, −1/√p]].
    pub fn t_matrix(&self, p: f64) -> Mat2 {
        self.w_inverse() * adiabatic_t(p)
    }
}

/// T = [[√p, 1/√p], [√p, −1/√p]], det T = −2.
pub fn adiabatic_t(p: f64) -> Mat2 {
    let r = p.sqrt();
    Mat2::real([[r, 1.0 / r], [r, -1.0 / r]])
}

/// Where superadiabatic coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientSource {
    /// Generic recursion on the true coupling, via Taylor jets.
    #[default]
    Numeric,
    /// Closed-form pure-pole surrogate built from the Stokes data.
    Pole,
}

impl std::str::FromStr for CoefficientSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "numeric" => Ok(Self::Numeric),
            "pole" => Ok(Self::Pole),
            other => Err(Error::InvalidParameter(format!("unknown coefficient source `{other}`"))),
        }
    }
}

/// Frame factory for one (E, ε, n).
#[derive(Debug, Clone, Copy)]
pub struct SuperadiabaticFrame<'a> {
    pub scale: &'a NaturalScaleMap,
    pub stokes: StokesData,
    pub eps: f64,
    pub order: usize,
    pub source: CoefficientSource,
}

impl<'a> SuperadiabaticFrame<'a> {
    pub fn new(scale: &'a NaturalScaleMap, stokes: StokesData, eps: f64, order: usize, source: CoefficientSource) -> Self {
        Self { scale, stokes, eps, order, source }
    }

    /// The frame whose coupling has leading index n_ε, i.e. projection
    /// order n_ε − 1.
    pub fn optimal(scale: &'a NaturalScaleMap, stokes: StokesData, eps: f64, source: CoefficientSource) -> Self {
        let (n, _) = optimal_n(eps, stokes.xi_c);
        Self::new(scale, stokes, eps, n.saturating_sub(1).max(1), source)
    }

    fn model(&self) -> &PotentialModel {
        &self.scale.model
    }

    pub fn jets_at_x(&self, x: f64) -> Result<CoefficientJets> {
        let top = self.order + 1;
        match self.source {
            CoefficientSource::Numeric => {
                CoefficientJets::new(JetSource::Potential { model: self.model(), e: self.scale.e, x }, top)
            }
            CoefficientSource::Pole => {
                let s = &self.stokes;
                let xi = self.scale.xi(x);
                CoefficientJets::new(JetSource::Pole { gamma: s.gamma, xi_c: s.xi_c, xi_r: s.xi_r, xi }, top)
            }
        }
    }

    pub fn at_x(&self, x: f64) -> Result<FramePoint> {
        FramePoint::new(&self.jets_at_x(x)?, self.eps, self.order)
    }

    /// Pole surrogate matching this frame's Stokes data.
    pub fn pole_model(&self) -> PoleModel {
        PoleModel::new(self.stokes.gamma, self.stokes.xi_c, self.stokes.xi_r, self.order + 2)
    }
}
