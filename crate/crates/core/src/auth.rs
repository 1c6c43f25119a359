//! Pathloss-fingerprint authentication at the leader.
//!
//! Every legitimate follower is identified by its pathloss to the leader.
//! A received vote yields a noisy measurement `z = Ψ + n`, `n ~ N(0, σ²)`;
//! the leader picks the nearest known fingerprint (maximum likelihood) and
//! accepts the vote when the residual is below a threshold `ε`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::pathloss_db;
use crate::error::{domain, Result};
use crate::geometry::{Deployment, DiskRegion, Point2D, Region};
use crate::quadrature::{integrate_with_breakpoints, QuadConfig};
use crate::specfun::{q_function, q_inverse, q_unchecked};

const PRIOR_SUM_TOL: f64 = 1e-9;

/// Measurement-noise standard deviation (dB) for a link quality `LQ = 1/σ²`
/// given in dB.
pub fn sigma_from_lq_db(lq_db: f64) -> f64 {
    10f64.powf(-lq_db / 20.0)
}

pub fn lq_db_from_sigma(sigma: f64) -> f64 {
    -20.0 * sigma.log10()
}

/// Eve pathloss prior bounds from the deployment geometry: pathloss at 1 m
/// and at the disk edge.
pub fn default_eve_bounds(disk: &DiskRegion, alpha: f64) -> (f64, f64) {
    (
        pathloss_db(1.0, alpha).expect("positive distance"),
        pathloss_db(disk.radius(), alpha).expect("positive radius"),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthProfile {
    ground_truth: Vec<f64>,
    sorted_truth: Vec<f64>,
    // Prior of sorted_truth[k] (priors follow their fingerprint when sorting).
    sorted_priors: Vec<f64>,
    sigma: f64,
    epsilon: f64,
    psi_min: f64,
    psi_max: f64,
    priors: Vec<f64>,
    eve_priors: Vec<f64>,
}

fn check_priors(name: &str, priors: &[f64]) -> Result<()> {
    if priors.is_empty() {
        return domain(format!("{name} must not be empty"));
    }
    if priors.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return domain(format!("{name} must be non-negative"));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > PRIOR_SUM_TOL {
        return domain(format!("{name} must sum to 1, got {sum}"));
    }
    Ok(())
}

fn equal_priors(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

impl AuthProfile {
    /// Profile with equal priors over the `M` followers and `n_eves` Eves.
    pub fn new(
        ground_truth: Vec<f64>,
        sigma: f64,
        epsilon: f64,
        eve_bounds: (f64, f64),
        n_eves: usize,
    ) -> Result<Self> {
        let m = ground_truth.len();
        if n_eves == 0 {
            return domain("at least one Eve is required");
        }
        Self::with_priors(
            ground_truth,
            sigma,
            epsilon,
            eve_bounds,
            equal_priors(m.max(1)),
            equal_priors(n_eves),
        )
    }

    pub fn with_priors(
        ground_truth: Vec<f64>,
        sigma: f64,
        epsilon: f64,
        (psi_min, psi_max): (f64, f64),
        priors: Vec<f64>,
        eve_priors: Vec<f64>,
    ) -> Result<Self> {
        if ground_truth.is_empty() {
            return domain("at least one follower fingerprint is required");
        }
        if ground_truth.iter().any(|p| !p.is_finite()) {
            return domain("fingerprints must be finite");
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return domain(format!("sigma must be > 0, got {sigma}"));
        }
        if !(epsilon >= 0.0) {
            return domain(format!("epsilon must be >= 0, got {epsilon}"));
        }
        if !psi_min.is_finite() || !psi_max.is_finite() || !(psi_min < psi_max) {
            return domain(format!(
                "Eve prior needs psi_min < psi_max, got ({psi_min}, {psi_max})"
            ));
        }
        if priors.len() != ground_truth.len() {
            return domain("one follower prior per fingerprint is required");
        }
        check_priors("follower priors", &priors)?;
        check_priors("Eve priors", &eve_priors)?;

        let mut order: Vec<usize> = (0..ground_truth.len()).collect();
        order.sort_by(|&a, &b| ground_truth[a].total_cmp(&ground_truth[b]));
        let sorted_truth = order.iter().map(|&i| ground_truth[i]).collect();
        let sorted_priors = order.iter().map(|&i| priors[i]).collect();

        Ok(Self {
            ground_truth,
            sorted_truth,
            sorted_priors,
            sigma,
            epsilon,
            psi_min,
            psi_max,
            priors,
            eve_priors,
        })
    }

    pub fn ground_truth(&self) -> &[f64] {
        &self.ground_truth
    }

    pub fn sorted_truth(&self) -> &[f64] {
        &self.sorted_truth
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eve_bounds(&self) -> (f64, f64) {
        (self.psi_min, self.psi_max)
    }

    /// Width `Δ = Ψ_max − Ψ_min` of the Eve pathloss prior.
    pub fn delta(&self) -> f64 {
        self.psi_max - self.psi_min
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn eve_priors(&self) -> &[f64] {
        &self.eve_priors
    }

    pub fn m(&self) -> usize {
        self.ground_truth.len()
    }

    pub fn n_eves(&self) -> usize {
        self.eve_priors.len()
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        self.rebuild(self.sigma, epsilon)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        self.rebuild(sigma, self.epsilon)
    }

    fn rebuild(&self, sigma: f64, epsilon: f64) -> Result<Self> {
        Self::with_priors(
            self.ground_truth.clone(),
            sigma,
            epsilon,
            (self.psi_min, self.psi_max),
            self.priors.clone(),
            self.eve_priors.clone(),
        )
    }
}

/// A probability from a closed form, together with the unclipped value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Clipped {
    pub value: f64,
    pub raw: f64,
}

impl Clipped {
    fn new(raw: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            raw,
        }
    }

    /// True when the raw expression left `[0, 1]`.
    pub fn was_clipped(&self) -> bool {
        self.value != self.raw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorProbabilities {
    pub p_fa: f64,
    pub p_md: f64,
    pub p_md_expected: f64,
    pub p_mc: f64,
}

/// Leader-side fingerprints `Ψ_i = 10 α log₁₀ ‖F_i‖`.
pub fn ground_truth_from_deployment(dep: &Deployment, alpha: f64) -> Result<Vec<f64>> {
    dep.followers
        .iter()
        .map(|f| {
            let d = f.norm();
            if d == 0.0 {
                return domain("follower at the leader's position has no pathloss");
            }
            pathloss_db(d, alpha)
        })
        .collect()
}

/// Pathlosses of `count` nodes dropped uniformly on the disk.
pub fn sample_fingerprints<R: Rng + ?Sized>(
    count: usize,
    disk: DiskRegion,
    alpha: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let region = Region::Disk(disk);
    (0..count)
        .map(|_| {
            let mut p: Point2D = region.sample_uniform(rng);
            while p.norm() == 0.0 {
                p = region.sample_uniform(rng);
            }
            pathloss_db(p.norm(), alpha)
        })
        .collect()
}

/// Follower and Eve pathlosses for one seeded deployment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    pub followers: Vec<f64>,
    pub eves: Vec<f64>,
}

impl Realization {
    /// `m` followers and `n` Eves placed uniformly on the disk.
    pub fn sample(m: usize, n: usize, disk: DiskRegion, alpha: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let followers = sample_fingerprints(m, disk, alpha, &mut rng)?;
        let eves = sample_fingerprints(n, disk, alpha, &mut rng)?;
        Ok(Self { followers, eves })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identification {
    /// Minimum residual `TS* = min_i |z − Ψ_i|` (dB).
    pub statistic: f64,
    /// Index into the ground-truth vector.
    pub index: usize,
}

/// Maximum-likelihood identification: nearest fingerprint, lowest index on ties.
pub fn ml_identify(z: f64, profile: &AuthProfile) -> Identification {
    nearest(z, &profile.ground_truth)
}

pub(crate) fn nearest(z: f64, truth: &[f64]) -> Identification {
    let mut best = Identification {
        statistic: f64::INFINITY,
        index: 0,
    };
    for (i, psi) in truth.iter().enumerate() {
        let d = (z - psi).abs();
        if d < best.statistic {
            best = Identification {
                statistic: d,
                index: i,
            };
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// Vote accepted as coming from a legitimate follower.
    H0NoImpersonation,
    /// Vote rejected as an impersonation.
    H1Impersonation,
}

/// Threshold test; a statistic exactly at `ε` is rejected.
pub fn decide(statistic: f64, epsilon: f64) -> Hypothesis {
    if statistic < epsilon {
        Hypothesis::H0NoImpersonation
    } else {
        Hypothesis::H1Impersonation
    }
}

/// Neyman–Pearson threshold `ε = σ Q⁻¹(P_fa / 2)`.
pub fn threshold_for_pfa(p_fa_target: f64, sigma: f64) -> Result<f64> {
    if !(p_fa_target > 0.0 && p_fa_target < 1.0) {
        return domain(format!("target false-alarm rate must lie in (0, 1), got {p_fa_target}"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return domain(format!("sigma must be > 0, got {sigma}"));
    }
    Ok(sigma * q_inverse(p_fa_target / 2.0)?)
}

/// False-alarm probability `2 Q(ε/σ)`, capped at 1.
pub fn p_fa_closed_form(epsilon: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return domain(format!("sigma must be > 0, got {sigma}"));
    }
    if !(epsilon >= 0.0) {
        return domain(format!("epsilon must be >= 0, got {epsilon}"));
    }
    if epsilon == f64::INFINITY {
        return Ok(0.0);
    }
    Ok((2.0 * q_function(epsilon / sigma)?).min(1.0))
}

// P(|Ψ_eve + n − Ψ_i| < ε) for one fingerprint.
fn window_mass(psi_i: f64, psi_eve: f64, epsilon: f64, sigma: f64) -> f64 {
    q_unchecked((psi_i - psi_eve - epsilon) / sigma) - q_unchecked((psi_i - psi_eve + epsilon) / sigma)
}

/// Missed-detection probability for a fixed Eve realisation:
/// `Σ_j Σ_i [Q((Ψ_i − Ψ_j − ε)/σ) − Q((Ψ_i − Ψ_j + ε)/σ)] π(j)/M`.
pub fn p_md_closed_form(profile: &AuthProfile, eve_pathlosses: &[f64]) -> Result<Clipped> {
    if eve_pathlosses.is_empty() {
        return domain("at least one Eve pathloss is required");
    }
    if eve_pathlosses.len() != profile.n_eves() {
        return domain(format!(
            "{} Eve pathlosses for {} Eve priors",
            eve_pathlosses.len(),
            profile.n_eves()
        ));
    }
    let m = profile.m() as f64;
    let (eps, sigma) = (profile.epsilon, profile.sigma);
    let raw: f64 = eve_pathlosses
        .iter()
        .zip(&profile.eve_priors)
        .map(|(&psi_j, &pj)| {
            let s: f64 = profile
                .ground_truth
                .iter()
                .map(|&psi_i| window_mass(psi_i, psi_j, eps, sigma))
                .sum();
            s * pj / m
        })
        .sum();
    Ok(Clipped::new(raw))
}

/// Missed-detection probability averaged over an Eve pathloss uniform on
/// `[Ψ_min, Ψ_max]`:
/// `Σ_j π(j)/Δ · ∫ Σ_i [Q((Ψ_i − Ψ − ε)/σ) − Q((Ψ_i − Ψ + ε)/σ)] dΨ`.
pub fn p_md_expected(profile: &AuthProfile) -> Result<Clipped> {
    let (eps, sigma) = (profile.epsilon, profile.sigma);
    if eps == 0.0 {
        return Ok(Clipped::new(0.0));
    }
    let (lo, hi) = (profile.psi_min, profile.psi_max);

    // The integrand is a sum of plateaus of width 2ε with edges of width ~σ.
    let mut breakpoints = Vec::new();
    for &psi in &profile.ground_truth {
        for k in [0.0, 2.0, 4.0, 8.0] {
            breakpoints.push(psi - eps - k * sigma);
            breakpoints.push(psi + eps + k * sigma);
        }
        breakpoints.push(psi);
    }
    let integrand = |psi_eve: f64| -> f64 {
        profile
            .ground_truth
            .iter()
            .map(|&psi_i| window_mass(psi_i, psi_eve, eps, sigma))
            .sum()
    };
    let q = integrate_with_breakpoints(
        integrand,
        lo,
        hi,
        &breakpoints,
        &QuadConfig {
            abs_tol: 1e-9,
            max_subdivisions: 5000,
        },
    )?;
    let weight: f64 = profile.eve_priors.iter().sum::<f64>() / profile.delta();
    Ok(Clipped::new(weight * q.value))
}

/// Misclassification probability from the nearest-fingerprint cells:
/// `Σ_i π(i) [1 − (Q((Ψ̃_{l,i} − Ψ̃_i)/σ) − Q((Ψ̃_{u,i} − Ψ̃_i)/σ))]`,
/// with cell edges at midpoints between sorted fingerprints and the outer
/// edges closed by `Ψ_min` and `Ψ_max`. Independent of `ε`.
pub fn p_mc_closed_form(profile: &AuthProfile) -> Result<Clipped> {
    let s = &profile.sorted_truth;
    let m = s.len();
    let sigma = profile.sigma;
    let raw: f64 = (0..m)
        .map(|i| {
            let lower = if i == 0 {
                profile.psi_min
            } else {
                0.5 * (s[i - 1] + s[i])
            };
            let upper = if i + 1 == m {
                profile.psi_max
            } else {
                0.5 * (s[i] + s[i + 1])
            };
            let inside = q_unchecked((lower - s[i]) / sigma) - q_unchecked((upper - s[i]) / sigma);
            profile.sorted_priors[i] * (1.0 - inside)
        })
        .sum();
    Ok(Clipped::new(raw))
}

/// All four closed-form error probabilities of a profile.
pub fn error_probabilities(profile: &AuthProfile, eve_pathlosses: &[f64]) -> Result<ErrorProbabilities> {
    Ok(ErrorProbabilities {
        p_fa: p_fa_closed_form(profile.epsilon, profile.sigma)?,
        p_md: p_md_closed_form(profile, eve_pathlosses)?.value,
        p_md_expected: p_md_expected(profile)?.value,
        p_mc: p_mc_closed_form(profile)?.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub p_fa: f64,
    pub epsilon: f64,
    pub p_d: f64,
}

/// Detection probability `1 − P̄_md` at the Neyman–Pearson threshold of each
/// target false-alarm rate.
pub fn roc_curve(profile: &AuthProfile, p_fa_grid: &[f64]) -> Result<Vec<RocPoint>> {
    p_fa_grid
        .iter()
        .map(|&p_fa| {
            let epsilon = threshold_for_pfa(p_fa, profile.sigma)?;
            let p_md = p_md_expected(&profile.with_epsilon(epsilon)?)?;
            Ok(RocPoint {
                p_fa,
                epsilon,
                p_d: 1.0 - p_md.value,
            })
        })
        .collect()
}
