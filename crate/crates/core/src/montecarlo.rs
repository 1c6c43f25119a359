//! Monte Carlo estimators for coverage, consensus and authentication.
//!
//! Trial `k` draws from its own ChaCha8 stream keyed by `(master_seed, k)`,
//! and per-trial results are reduced as integer tallies, so estimates are
//! bit-identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::auth::{decide, nearest, AuthProfile, Hypothesis};
use crate::channel::{sir_dl, sir_ul, LinkFading, NetworkParams};
use crate::coverage::{CoverageResult, Method};
use crate::error::{domain, Result};
use crate::geometry::{sample_follower_distance, sample_ppp, Deployment, Point2D};

const Z95: f64 = 1.959_963_984_540_054;

// Stream families, so different estimators never share random numbers.
const TAG_COVERAGE: u64 = 0x636f_7665_7261_6765;
const TAG_CONSENSUS: u64 = 0x636f_6e73_656e_7375;
const TAG_AUTH: u64 = 0x6175_7468_656e_7469;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub n_trials: u64,
    pub master_seed: u64,
    pub params: NetworkParams,
}

impl TrialConfig {
    pub fn new(n_trials: u64, master_seed: u64, params: NetworkParams) -> Result<Self> {
        let cfg = Self {
            n_trials,
            master_seed,
            params,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return domain("n_trials must be >= 1");
        }
        self.params.validate()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Random stream for trial `index` of the estimator family `tag`.
pub fn trial_rng(master_seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ tag));
    rng.set_stream(index);
    rng
}

/// 95% normal-approximation half-width of a binomial proportion.
pub fn ci95_half_width(p: f64, n: u64) -> f64 {
    Z95 * binomial_std_error(p, n)
}

pub fn binomial_std_error(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn ratio(k: u64, n: u64) -> f64 {
    k as f64 / n as f64
}

fn run_trials<T, F>(n_trials: u64, trial: F) -> Result<T>
where
    T: Default + Send + Merge,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n_trials)
        .into_par_iter()
        .map(trial)
        .try_reduce(T::default, |a, b| Ok(a.merge(b)))
}

trait Merge {
    fn merge(self, other: Self) -> Self;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct CoverageTally {
    dl: u64,
    ul: u64,
    both: u64,
}

impl Merge for CoverageTally {
    fn merge(self, o: Self) -> Self {
        Self {
            dl: self.dl + o.dl,
            ul: self.ul + o.ul,
            both: self.both + o.both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    pub result: CoverageResult,
    /// Empirical rate of trials where both links succeed.
    pub p_both_empirical: f64,
    pub ci_dl: f64,
    pub ci_ul: f64,
    pub ci_joint: f64,
    pub n_trials: u64,
}

fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    2.0 * std::f64::consts::PI * rng.random::<f64>()
}

/// Empirical DL/UL coverage of a typical follower.
///
/// Each link sees its own follower distance drawn from `f_R` and its own
/// jammer PPP on the annulus centred at the receiver, so `p_joint` is the
/// product of two independent estimates, like the analytic joint coverage.
/// The CI of `p_joint` is propagated by the delta method.
pub fn estimate_coverage(cfg: &TrialConfig) -> Result<CoverageEstimate> {
    cfg.validate()?;
    let p = cfg.params;
    let (beta_dl, beta_ul) = (p.beta_dl(), p.beta_ul());

    let tally = run_trials(cfg.n_trials, |k| -> Result<CoverageTally> {
        let mut rng = trial_rng(cfg.master_seed, TAG_COVERAGE, k);

        // Downlink: jammers around the follower.
        let r = positive_distance(p.rho_t, &mut rng);
        let follower = Point2D::from_polar(r, random_angle(&mut rng));
        let jammers: Vec<Point2D> = sample_ppp(p.rho_j, p.jam_annulus, &mut rng)?
            .iter()
            .map(|j| j.translate(&follower))
            .collect();
        let fading = LinkFading::sample(jammers.len(), &mut rng);
        let dl = sir_dl(&follower, &jammers, &fading, &p)? > beta_dl;

        // Uplink: jammers around the leader.
        let r = positive_distance(p.rho_t, &mut rng);
        let follower = Point2D::from_polar(r, random_angle(&mut rng));
        let jammers = sample_ppp(p.rho_j, p.jam_annulus, &mut rng)?;
        let fading = LinkFading::sample(jammers.len(), &mut rng);
        let ul = sir_ul(&follower, &jammers, &fading, &p)? > beta_ul;

        Ok(CoverageTally {
            dl: dl as u64,
            ul: ul as u64,
            both: (dl && ul) as u64,
        })
    })?;

    let n = cfg.n_trials;
    let p_dl = ratio(tally.dl, n);
    let p_ul = ratio(tally.ul, n);
    let p_joint = p_dl * p_ul;
    let ci_dl = ci95_half_width(p_dl, n);
    let ci_ul = ci95_half_width(p_ul, n);
    let ci_joint = (p_ul * ci_dl).hypot(p_dl * ci_ul);
    Ok(CoverageEstimate {
        result: CoverageResult {
            p_dl,
            p_ul,
            p_joint,
            method: Method::MonteCarlo,
            quadrature_error_estimate: ci_joint,
        },
        p_both_empirical: ratio(tally.both, n),
        ci_dl,
        ci_ul,
        ci_joint,
        n_trials: n,
    })
}

fn positive_distance<R: Rng + ?Sized>(rho_t: f64, rng: &mut R) -> f64 {
    loop {
        let r = sample_follower_distance(rho_t, rng);
        if r > 0.0 {
            return r;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConsensusOutcome {
    pub n_followers: u64,
    pub n_dl_success: u64,
    pub n_ul_success: u64,
    pub n_both: u64,
    pub consensus_reached: bool,
}

impl ConsensusOutcome {
    pub fn from_counts(n_followers: u64, n_dl_success: u64, n_ul_success: u64, n_both: u64) -> Self {
        Self {
            n_followers,
            n_dl_success,
            n_ul_success,
            n_both,
            consensus_reached: 2 * n_both > n_followers,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.n_both <= self.n_dl_success.min(self.n_ul_success)
            && self.n_dl_success.max(self.n_ul_success) <= self.n_followers
            && self.consensus_reached == (2 * self.n_both > self.n_followers)
    }
}

/// One consensus round: followers on the disk, jammers on the annulus around
/// the leader. Followers at the leader's exact position are dropped.
pub fn consensus_trial(cfg: &TrialConfig, index: u64) -> Result<ConsensusOutcome> {
    let p = cfg.params;
    let mut rng = trial_rng(cfg.master_seed, TAG_CONSENSUS, index);
    let mut dep = Deployment::sample(p.disk, p.jam_annulus, p.rho_t, p.rho_j, &mut rng)?;
    dep.followers.retain(|f| f.norm() > 0.0);

    let (beta_dl, beta_ul) = (p.beta_dl(), p.beta_ul());
    let (mut dl, mut ul, mut both) = (0, 0, 0);
    for f in &dep.followers {
        let fading = LinkFading::sample(dep.jammers.len(), &mut rng);
        let ok_dl = sir_dl(f, &dep.jammers, &fading, &p)? > beta_dl;
        let fading = LinkFading::sample(dep.jammers.len(), &mut rng);
        let ok_ul = sir_ul(f, &dep.jammers, &fading, &p)? > beta_ul;
        dl += ok_dl as u64;
        ul += ok_ul as u64;
        both += (ok_dl && ok_ul) as u64;
    }
    Ok(ConsensusOutcome::from_counts(dep.followers.len() as u64, dl, ul, both))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ConsensusTally {
    reached: u64,
    empty: u64,
    inconsistent: u64,
}

impl Merge for ConsensusTally {
    fn merge(self, o: Self) -> Self {
        Self {
            reached: self.reached + o.reached,
            empty: self.empty + o.empty,
            inconsistent: self.inconsistent + o.inconsistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsensusEstimate {
    pub probability: f64,
    pub ci_half_width: f64,
    pub n_trials: u64,
    /// Trials whose deployment had no followers (counted as failures).
    pub empty_trials: u64,
}

pub fn simulate_consensus(cfg: &TrialConfig) -> Result<ConsensusEstimate> {
    cfg.validate()?;
    let tally = run_trials(cfg.n_trials, |k| {
        let o = consensus_trial(cfg, k)?;
        Ok(ConsensusTally {
            reached: o.consensus_reached as u64,
            empty: (o.n_followers == 0) as u64,
            inconsistent: (!o.is_consistent()) as u64,
        })
    })?;
    debug_assert_eq!(tally.inconsistent, 0);
    let probability = ratio(tally.reached, cfg.n_trials);
    Ok(ConsensusEstimate {
        probability,
        ci_half_width: ci95_half_width(probability, cfg.n_trials),
        n_trials: cfg.n_trials,
        empty_trials: tally.empty,
    })
}

/// Who transmits in a simulated authentication trial.
#[derive(Debug, Clone, PartialEq)]
pub enum AuthScenario {
    /// A legitimate follower drawn from the follower priors.
    Legit,
    /// An Eve drawn from the Eve priors, with these pathlosses.
    EveFixed(Vec<f64>),
    /// An Eve whose pathloss is redrawn uniformly on `[Ψ_min, Ψ_max]`.
    EveUniform,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AuthTally {
    pub n_trials: u64,
    /// Legit vote rejected.
    pub false_alarms: u64,
    /// Eve vote accepted.
    pub missed_detections: u64,
    /// Legit vote mapped to the wrong follower, accepted or not.
    pub wrong_index: u64,
    /// Legit vote accepted.
    pub accepted: u64,
    /// Legit vote accepted under the wrong follower.
    pub wrong_index_accepted: u64,
}

impl Merge for AuthTally {
    fn merge(self, o: Self) -> Self {
        Self {
            n_trials: self.n_trials + o.n_trials,
            false_alarms: self.false_alarms + o.false_alarms,
            missed_detections: self.missed_detections + o.missed_detections,
            wrong_index: self.wrong_index + o.wrong_index,
            accepted: self.accepted + o.accepted,
            wrong_index_accepted: self.wrong_index_accepted + o.wrong_index_accepted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalAuth {
    pub tally: AuthTally,
    pub p_fa: f64,
    pub p_md: f64,
    /// Wrong-index rate over all legit trials.
    pub p_mc: f64,
    /// Wrong-index rate among accepted legit trials (NaN if none accepted).
    pub p_mc_given_accept: f64,
}

impl EmpiricalAuth {
    fn from_tally(t: AuthTally) -> Self {
        let n = t.n_trials;
        Self {
            tally: t,
            p_fa: ratio(t.false_alarms, n),
            p_md: ratio(t.missed_detections, n),
            p_mc: ratio(t.wrong_index, n),
            p_mc_given_accept: if t.accepted == 0 {
                f64::NAN
            } else {
                ratio(t.wrong_index_accepted, t.accepted)
            },
        }
    }
}

fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Empirical authentication error rates: each trial forms `z = Ψ + n` for
/// the chosen transmitter and runs identification and the threshold test.
pub fn simulate_auth(
    profile: &AuthProfile,
    scenario: &AuthScenario,
    n_trials: u64,
    master_seed: u64,
) -> Result<EmpiricalAuth> {
    if n_trials == 0 {
        return domain("n_trials must be >= 1");
    }
    if let AuthScenario::EveFixed(psi) = scenario {
        if psi.len() != profile.n_eves() {
            return domain(format!(
                "{} Eve pathlosses for {} Eve priors",
                psi.len(),
                profile.n_eves()
            ));
        }
    }
    let truth = profile.ground_truth();
    let (sigma, eps) = (profile.sigma(), profile.epsilon());
    let (lo, hi) = profile.eve_bounds();

    let tally = run_trials(n_trials, |k| -> Result<AuthTally> {
        let mut rng = trial_rng(master_seed, TAG_AUTH, k);
        let noise: f64 = StandardNormal.sample(&mut rng);
        let mut t = AuthTally {
            n_trials: 1,
            ..AuthTally::default()
        };
        match scenario {
            AuthScenario::Legit => {
                let i = draw_index(profile.priors(), &mut rng);
                let id = nearest(truth[i] + sigma * noise, truth);
                let accepted = decide(id.statistic, eps) == Hypothesis::H0NoImpersonation;
                let wrong = id.index != i;
                t.false_alarms = (!accepted) as u64;
                t.accepted = accepted as u64;
                t.wrong_index = wrong as u64;
                t.wrong_index_accepted = (wrong && accepted) as u64;
            }
            AuthScenario::EveFixed(psi) => {
                let j = draw_index(profile.eve_priors(), &mut rng);
                let id = nearest(psi[j] + sigma * noise, truth);
                t.missed_detections = (decide(id.statistic, eps) == Hypothesis::H0NoImpersonation) as u64;
            }
            AuthScenario::EveUniform => {
                let psi = rng.random_range(lo..hi);
                let id = nearest(psi + sigma * noise, truth);
                t.missed_detections = (decide(id.statistic, eps) == Hypothesis::H0NoImpersonation) as u64;
            }
        }
        Ok(t)
    })?;
    Ok(EmpiricalAuth::from_tally(tally))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: u64, params: NetworkParams) -> TrialConfig {
        TrialConfig::new(n, 11, params).unwrap()
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(TrialConfig::new(0, 1, NetworkParams::baseline()).is_err());
    }

    #[test]
    fn streams_differ_by_index_and_seed() {
        let a: u64 = trial_rng(1, TAG_AUTH, 0).random();
        let b: u64 = trial_rng(1, TAG_AUTH, 1).random();
        let c: u64 = trial_rng(2, TAG_AUTH, 0).random();
        let d: u64 = trial_rng(1, TAG_AUTH, 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, d);
    }

    #[test]
    fn no_jammers_means_full_coverage() {
        let est = estimate_coverage(&small(2000, NetworkParams::baseline().with_rho_j(0.0))).unwrap();
        assert_eq!((est.result.p_dl, est.result.p_ul, est.result.p_joint), (1.0, 1.0, 1.0));
        assert_eq!(est.ci_joint, 0.0);
    }

    #[test]
    fn infinite_threshold_means_no_coverage() {
        let mut p = NetworkParams::baseline();
        p.beta_dl_db = f64::INFINITY;
        p.beta_ul_db = f64::INFINITY;
        let est = estimate_coverage(&small(2000, p)).unwrap();
        assert_eq!((est.result.p_dl, est.result.p_ul), (0.0, 0.0));
        assert_eq!(simulate_consensus(&small(500, p)).unwrap().probability, 0.0);
    }

    #[test]
    fn consensus_without_jammers() {
        let cfg = small(3000, NetworkParams::baseline().with_rho_j(0.0));
        let est = simulate_consensus(&cfg).unwrap();
        let expected = 1.0 - ratio(est.empty_trials, cfg.n_trials);
        assert_eq!(est.probability, expected);
    }

    #[test]
    fn majority_rule() {
        assert!(!ConsensusOutcome::from_counts(0, 0, 0, 0).consensus_reached);
        assert!(!ConsensusOutcome::from_counts(4, 2, 2, 2).consensus_reached);
        assert!(ConsensusOutcome::from_counts(5, 3, 4, 3).consensus_reached);
        assert!(!ConsensusOutcome::from_counts(5, 2, 4, 3).is_consistent());
    }

    #[test]
    fn consensus_outcomes_are_consistent() {
        let cfg = small(300, NetworkParams::baseline().with_beta_db(-5.0));
        for k in 0..cfg.n_trials {
            assert!(consensus_trial(&cfg, k).unwrap().is_consistent());
        }
    }

    #[test]
    fn auth_noiseless_legit() {
        let p = AuthProfile::new(vec![40.0, 50.0, 60.0], 1e-12, 0.1, (0.0, 81.0), 2).unwrap();
        let e = simulate_auth(&p, &AuthScenario::Legit, 5000, 3).unwrap();
        assert_eq!((e.p_fa, e.p_mc), (0.0, 0.0));
    }

    #[test]
    fn auth_zero_threshold_eve() {
        let p = AuthProfile::new(vec![40.0, 50.0], 1.0, 0.0, (0.0, 81.0), 2).unwrap();
        let e = simulate_auth(&p, &AuthScenario::EveFixed(vec![40.0, 50.0]), 5000, 3).unwrap();
        assert_eq!(e.p_md, 0.0);
        let e = simulate_auth(&p, &AuthScenario::EveUniform, 5000, 3).unwrap();
        assert_eq!(e.p_md, 0.0);
        assert!(simulate_auth(&p, &AuthScenario::EveFixed(vec![1.0]), 10, 3).is_err());
    }

    #[test]
    fn ci_shrinks_like_inverse_sqrt() {
        let r = ci95_half_width(0.3, 1000) / ci95_half_width(0.3, 2000);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
