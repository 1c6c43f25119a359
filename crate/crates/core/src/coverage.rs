//! Analytical coverage probabilities under a Poisson field of jammers.
//!
//! The Laplace transform of the aggregate jammer interference seen by a
//! receiver at distance `r` from its transmitter is
//!
//! ```text
//! L(r) = exp(-π ρ_J r² (γβ)^(2/α) ∫_{z_l}^{z_u} du / (1 + u^(α/2)))
//! ```
//!
//! with `z_l = (z1 / (r (γβ)^(1/α)))²` and likewise `z_u` for `z2`. The same
//! exponent has the hypergeometric closed form
//!
//! ```text
//! π ρ_J γβ r^α / (α/2 - 1) · [ z2^(2-α) ₂F₁(1, 1-2/α; 2-2/α; -γβ (r/z2)^α)
//!                             - z1^(2-α) ₂F₁(1, 1-2/α; 2-2/α; -γβ (r/z1)^α) ]
//! ```
//!
//! whose bracket is negative, so `L ≤ 1`. Coverage averages `L` over the
//! Rayleigh-distributed follower distance.

use std::f64::consts::PI;

use serde::Serialize;

use crate::channel::NetworkParams;
use crate::error::{domain, Result};
use crate::geometry::AnnulusRegion;
use crate::quadrature::{integrate, QuadConfig};
use crate::specfun::hyp2f1;

/// Below this inner radius the closed form is a `0·∞` limit and the
/// u-integral is used instead.
pub const Z1_MIN_SWITCH: f64 = 1e-3;

/// Absolute tolerance of the outer distance integral.
pub const COVERAGE_ABS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    QuadratureOracle,
    MonteCarlo,
}

/// How the Laplace transform is evaluated inside the coverage integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceMethod {
    /// ₂F₁ closed form, quadrature only when `z1 < Z1_MIN_SWITCH`.
    ClosedForm,
    /// u-integral quadrature everywhere.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageResult {
    pub p_dl: f64,
    pub p_ul: f64,
    pub p_joint: f64,
    pub method: Method,
    /// Analytical methods: summed quadrature error estimate.
    /// Monte Carlo: 95% half-width of the joint estimate.
    pub quadrature_error_estimate: f64,
}

/// Arguments of one Laplace-transform evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceArgs {
    /// Link distance (m).
    pub r: f64,
    /// Linear SIR threshold.
    pub beta: f64,
    /// Jammer-to-transmitter power ratio.
    pub gamma: f64,
    /// Jammer intensity (nodes/m²).
    pub rho_j: f64,
    pub alpha: f64,
    pub annulus: AnnulusRegion,
}

impl InterferenceArgs {
    fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return domain(format!("link distance must be > 0, got {}", self.r));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return domain(format!("threshold must be finite and > 0, got {}", self.beta));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return domain(format!("power ratio must be finite and > 0, got {}", self.gamma));
        }
        if !(self.rho_j >= 0.0) || !self.rho_j.is_finite() {
            return domain(format!("jammer intensity must be >= 0, got {}", self.rho_j));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return domain(format!("alpha must exceed 2, got {}", self.alpha));
        }
        Ok(())
    }
}

/// `E[exp(-s I_J)]` at `s = r^α β / P`, dispatching between the closed form
/// and the u-integral on `z1`.
pub fn laplace_interference(args: &InterferenceArgs) -> Result<f64> {
    args.validate()?;
    if args.rho_j == 0.0 {
        return Ok(1.0);
    }
    if args.annulus.z1() >= Z1_MIN_SWITCH {
        laplace_interference_closed_form(args)
    } else {
        laplace_interference_quadrature(args)
    }
}

/// Hypergeometric closed form. Requires `z1 > 0`.
pub fn laplace_interference_closed_form(args: &InterferenceArgs) -> Result<f64> {
    args.validate()?;
    if args.rho_j == 0.0 {
        return Ok(1.0);
    }
    let InterferenceArgs {
        r,
        beta,
        gamma,
        rho_j,
        alpha,
        annulus,
    } = *args;
    let (z1, z2) = (annulus.z1(), annulus.z2());
    if !(z1 > 0.0) {
        return domain("closed form needs z1 > 0; use the quadrature branch");
    }
    let k = gamma * beta;
    let (a, b, c) = (1.0, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha);
    let edge = |z: f64| -> Result<f64> {
        let arg = -k * (r / z).powf(alpha);
        Ok(z.powf(2.0 - alpha) * hyp2f1(a, b, c, arg)?)
    };
    let bracket = edge(z2)? - edge(z1)?;
    let exponent = PI * rho_j * k * r.powf(alpha) / (alpha / 2.0 - 1.0) * bracket;
    Ok(exponent.exp().min(1.0))
}

/// `∫_{lo}^{hi} du / (1 + u^(α/2))`, split at `u = 1` with a logarithmic
/// substitution on the tail.
pub fn u_integral(lo: f64, hi: f64, alpha: f64, abs_tol: f64) -> Result<(f64, f64)> {
    let half = alpha / 2.0;
    let cfg = QuadConfig {
        abs_tol,
        max_subdivisions: 4000,
    };
    let mut value = 0.0;
    let mut err = 0.0;
    if lo < 1.0 {
        let upper = hi.min(1.0);
        let q = integrate(|u| 1.0 / (1.0 + u.powf(half)), lo, upper, &cfg)?;
        value += q.value;
        err += q.error_estimate;
    }
    if hi > 1.0 {
        let lower = lo.max(1.0);
        // u = e^t, du = e^t dt; written to avoid overflow for large t.
        let q = integrate(
            |t| {
                let e = (t * (1.0 - half)).exp();
                e / (1.0 + (-t * half).exp())
            },
            lower.ln(),
            hi.ln(),
            &cfg,
        )?;
        value += q.value;
        err += q.error_estimate;
    }
    Ok((value, err))
}

/// Direct quadrature of the u-integral form.
pub fn laplace_interference_quadrature(args: &InterferenceArgs) -> Result<f64> {
    laplace_interference_quadrature_with_error(args).map(|(v, _)| v)
}

fn laplace_interference_quadrature_with_error(args: &InterferenceArgs) -> Result<(f64, f64)> {
    args.validate()?;
    if args.rho_j == 0.0 {
        return Ok((1.0, 0.0));
    }
    let InterferenceArgs {
        r,
        beta,
        gamma,
        rho_j,
        alpha,
        annulus,
    } = *args;
    let k = gamma * beta;
    let scale = r * k.powf(1.0 / alpha);
    let z_l = (annulus.z1() / scale).powi(2);
    let z_u = (annulus.z2() / scale).powi(2);
    let prefactor = PI * rho_j * r * r * k.powf(2.0 / alpha);
    let tol = (1e-12 / prefactor).clamp(1e-15, 1e-10);
    let (integral, err) = u_integral(z_l, z_u, alpha, tol)?;
    let value = (-prefactor * integral).exp();
    Ok((value, value * prefactor * err))
}

/// Upper limit of the distance integral: the tail mass of `f_R` beyond it is
/// `e^-30 < 1e-13`.
pub fn r_max(rho_t: f64) -> f64 {
    (30.0 / (PI * rho_t)).sqrt()
}

/// One direction's coverage probability with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageValue {
    pub value: f64,
    pub error_estimate: f64,
}

fn coverage_integral(
    params: &NetworkParams,
    gamma: f64,
    beta: f64,
    method: LaplaceMethod,
) -> Result<CoverageValue> {
    params.validate()?;
    if beta == f64::INFINITY {
        return Ok(CoverageValue {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let rho_t = params.rho_t;
    let laplace = |r: f64| -> Result<f64> {
        let args = InterferenceArgs {
            r,
            beta,
            gamma,
            rho_j: params.rho_j,
            alpha: params.alpha,
            annulus: params.jam_annulus,
        };
        match method {
            LaplaceMethod::ClosedForm => laplace_interference(&args),
            LaplaceMethod::Quadrature => laplace_interference_quadrature(&args),
        }
    };

    // The integrand closure cannot return errors; capture the first one.
    let failure = std::cell::RefCell::new(None);
    let integrand = |r: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match laplace(r) {
            Ok(l) => l * 2.0 * PI * rho_t * r * (-rho_t * PI * r * r).exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let q = integrate(
        integrand,
        0.0,
        r_max(rho_t),
        &QuadConfig::with_abs_tol(COVERAGE_ABS_TOL),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(CoverageValue {
        value: q.value.clamp(0.0, 1.0),
        error_estimate: q.error_estimate,
    })
}

/// Downlink coverage `P[SIR_DL > β_D]`.
pub fn coverage_dl(params: &NetworkParams) -> Result<f64> {
    coverage_dl_with(params, LaplaceMethod::ClosedForm).map(|c| c.value)
}

pub fn coverage_dl_with(params: &NetworkParams, method: LaplaceMethod) -> Result<CoverageValue> {
    coverage_integral(params, params.gamma_dl(), params.beta_dl(), method)
}

/// Uplink coverage `P[SIR_UL > β_U]`.
pub fn coverage_ul(params: &NetworkParams) -> Result<f64> {
    coverage_ul_with(params, LaplaceMethod::ClosedForm).map(|c| c.value)
}

pub fn coverage_ul_with(params: &NetworkParams, method: LaplaceMethod) -> Result<CoverageValue> {
    coverage_integral(params, params.gamma_ul(), params.beta_ul(), method)
}

/// Downlink, uplink and joint (product) coverage.
pub fn coverage_joint(params: &NetworkParams) -> Result<CoverageResult> {
    coverage_joint_with(params, LaplaceMethod::ClosedForm)
}

pub fn coverage_joint_with(params: &NetworkParams, method: LaplaceMethod) -> Result<CoverageResult> {
    let dl = coverage_dl_with(params, method)?;
    let ul = coverage_ul_with(params, method)?;
    Ok(CoverageResult {
        p_dl: dl.value,
        p_ul: ul.value,
        p_joint: dl.value * ul.value,
        method: match method {
            LaplaceMethod::ClosedForm => Method::ClosedForm,
            LaplaceMethod::Quadrature => Method::QuadratureOracle,
        },
        quadrature_error_estimate: dl.error_estimate + ul.error_estimate,
    })
}
