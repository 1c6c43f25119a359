//! Link budget: pathloss, Rayleigh fading and signal-to-interference ratios.
//!
//! All arithmetic is interference limited (no thermal noise), so an empty
//! jammer set yields an infinite SIR.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Result};
use crate::geometry::{AnnulusRegion, DiskRegion, Point2D};

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `Ψ = 10 α log₁₀(d)` in dB.
pub fn pathloss_db(distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return domain(format!("pathloss needs a positive distance, got {distance}"));
    }
    Ok(10.0 * alpha * distance.log10())
}

/// Power gain `|h|²` of a unit-variance Rayleigh channel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FadingSample(f64);

impl FadingSample {
    pub const UNIT: FadingSample = FadingSample(1.0);

    pub fn new(gain: f64) -> Result<Self> {
        if !(gain >= 0.0) || !gain.is_finite() {
            return domain(format!("fading gain must be finite and >= 0, got {gain}"));
        }
        Ok(Self(gain))
    }

    /// Draws `|h|² ~ Exp(1)`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(Exp1.sample(rng))
    }

    pub fn gain(&self) -> f64 {
        self.0
    }
}

/// Fading for one receiver: the desired link plus one gain per jammer.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkFading {
    pub signal: FadingSample,
    pub jammers: Vec<FadingSample>,
}

impl LinkFading {
    pub fn unit(n_jammers: usize) -> Self {
        Self {
            signal: FadingSample::UNIT,
            jammers: vec![FadingSample::UNIT; n_jammers],
        }
    }

    pub fn sample<R: Rng + ?Sized>(n_jammers: usize, rng: &mut R) -> Self {
        Self {
            signal: FadingSample::sample(rng),
            jammers: (0..n_jammers).map(|_| FadingSample::sample(rng)).collect(),
        }
    }
}

/// Radio and deployment parameters shared by the analytical and simulated
/// coverage computations. Powers are in dBm, thresholds in dB, intensities in
/// nodes per square metre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub p_leader_dbm: f64,
    pub p_follower_dbm: f64,
    pub p_jammer_dbm: f64,
    pub alpha: f64,
    pub beta_dl_db: f64,
    pub beta_ul_db: f64,
    pub rho_t: f64,
    pub rho_j: f64,
    pub jam_annulus: AnnulusRegion,
    pub disk: DiskRegion,
}

/// Follower intensity of the reference deployment: 15 followers on a 500 m disk.
pub const BASELINE_RHO_T: f64 = 15.0 / (std::f64::consts::PI * 500.0 * 500.0);

impl NetworkParams {
    /// Reference configuration: 30/20/10 dBm, α = 3, 15 followers per
    /// π·500² m², jammers at the same intensity on a 0–300 m annulus,
    /// thresholds −20 dB.
    pub fn baseline() -> Self {
        Self {
            p_leader_dbm: 30.0,
            p_follower_dbm: 20.0,
            p_jammer_dbm: 10.0,
            alpha: 3.0,
            beta_dl_db: -20.0,
            beta_ul_db: -20.0,
            rho_t: BASELINE_RHO_T,
            rho_j: BASELINE_RHO_T,
            jam_annulus: AnnulusRegion::new(0.0, 300.0).expect("valid annulus"),
            disk: DiskRegion::new(500.0).expect("valid disk"),
        }
    }

    /// Checks the invariants the closed forms rely on.
    ///
    /// Thresholds may be `+∞` (a "never covered" sentinel) but not NaN or `−∞`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_leader_dbm", self.p_leader_dbm),
            ("p_follower_dbm", self.p_follower_dbm),
            ("p_jammer_dbm", self.p_jammer_dbm),
        ] {
            if !v.is_finite() {
                return domain(format!("{name} must be finite, got {v}"));
            }
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return domain(format!("alpha must exceed 2, got {}", self.alpha));
        }
        for (name, v) in [("beta_dl_db", self.beta_dl_db), ("beta_ul_db", self.beta_ul_db)] {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return domain(format!("{name} must be a number or +inf, got {v}"));
            }
        }
        if !(self.rho_t > 0.0) || !self.rho_t.is_finite() {
            return domain(format!("rho_t must be > 0, got {}", self.rho_t));
        }
        if !(self.rho_j >= 0.0) || !self.rho_j.is_finite() {
            return domain(format!("rho_j must be >= 0, got {}", self.rho_j));
        }
        Ok(())
    }

    pub fn p_leader_mw(&self) -> f64 {
        dbm_to_mw(self.p_leader_dbm)
    }

    pub fn p_follower_mw(&self) -> f64 {
        dbm_to_mw(self.p_follower_dbm)
    }

    pub fn p_jammer_mw(&self) -> f64 {
        dbm_to_mw(self.p_jammer_dbm)
    }

    /// Jammer-to-leader power ratio `γ_j = P_j / P`.
    pub fn gamma_dl(&self) -> f64 {
        db_to_linear(self.p_jammer_dbm - self.p_leader_dbm)
    }

    /// Jammer-to-follower power ratio `γ_j^U = P_j / P_F`.
    pub fn gamma_ul(&self) -> f64 {
        db_to_linear(self.p_jammer_dbm - self.p_follower_dbm)
    }

    pub fn beta_dl(&self) -> f64 {
        db_to_linear(self.beta_dl_db)
    }

    pub fn beta_ul(&self) -> f64 {
        db_to_linear(self.beta_ul_db)
    }

    pub fn with_beta_db(self, beta_db: f64) -> Self {
        Self {
            beta_dl_db: beta_db,
            beta_ul_db: beta_db,
            ..self
        }
    }

    pub fn with_rho_j(self, rho_j: f64) -> Self {
        Self { rho_j, ..self }
    }

    pub fn with_annulus(self, jam_annulus: AnnulusRegion) -> Self {
        Self {
            jam_annulus,
            ..self
        }
    }
}

/// SIR from raw link quantities. `interferers` yields (distance, gain) pairs.
pub(crate) fn sir_from_parts(
    signal_mw: f64,
    signal_gain: f64,
    link_distance: f64,
    jammer_mw: f64,
    alpha: f64,
    interferers: impl Iterator<Item = (f64, f64)>,
) -> f64 {
    let interference: f64 = interferers
        .map(|(d, g)| jammer_mw * g * d.powf(-alpha))
        .sum();
    let signal = signal_mw * signal_gain * link_distance.powf(-alpha);
    if interference == 0.0 {
        f64::INFINITY
    } else {
        signal / interference
    }
}

fn check_fading(jammers: &[Point2D], fading: &LinkFading) -> Result<()> {
    if fading.jammers.len() != jammers.len() {
        return domain(format!(
            "need one fading gain per jammer: {} jammers, {} gains",
            jammers.len(),
            fading.jammers.len()
        ));
    }
    Ok(())
}

/// Downlink SIR at `follower` for a transmission from the leader at the
/// origin. Jammer distances are measured to the follower.
pub fn sir_dl(
    follower: &Point2D,
    jammers: &[Point2D],
    fading: &LinkFading,
    params: &NetworkParams,
) -> Result<f64> {
    let r = follower.norm();
    if r == 0.0 {
        return domain("follower cannot sit at the leader's position");
    }
    check_fading(jammers, fading)?;
    Ok(sir_from_parts(
        params.p_leader_mw(),
        fading.signal.gain(),
        r,
        params.p_jammer_mw(),
        params.alpha,
        jammers
            .iter()
            .zip(&fading.jammers)
            .map(|(j, g)| (j.distance(follower), g.gain())),
    ))
}

/// Uplink SIR at the leader for a vote sent by `follower`. Jammer distances
/// are measured to the origin.
pub fn sir_ul(
    follower: &Point2D,
    jammers: &[Point2D],
    fading: &LinkFading,
    params: &NetworkParams,
) -> Result<f64> {
    let r = follower.norm();
    if r == 0.0 {
        return domain("follower cannot sit at the leader's position");
    }
    check_fading(jammers, fading)?;
    Ok(sir_from_parts(
        params.p_follower_mw(),
        fading.signal.gain(),
        r,
        params.p_jammer_mw(),
        params.alpha,
        jammers
            .iter()
            .zip(&fading.jammers)
            .map(|(j, g)| (j.norm(), g.gain())),
    ))
}
