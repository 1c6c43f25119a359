//! Acceptance criteria. Prints one PASS/FAIL line per criterion and fails
//! if any criterion fails.

use std::fs;
use std::path::Path;

use raftguard::auth::{
    default_eve_bounds, p_fa_closed_form, p_mc_closed_form, p_md_closed_form, p_md_expected, roc_curve,
    sigma_from_lq_db, threshold_for_pfa, AuthProfile, Realization,
};
use raftguard::channel::{NetworkParams, BASELINE_RHO_T};
use raftguard::coverage::{
    coverage_joint, laplace_interference_closed_form, laplace_interference_quadrature, InterferenceArgs,
};
use raftguard::experiment::{load_config, run, Overrides};
use raftguard::geometry::{AnnulusRegion, DiskRegion};
use raftguard::montecarlo::{
    binomial_std_error, estimate_coverage, simulate_auth, AuthScenario, TrialConfig,
};

const SEED: u64 = 42;
const TRIALS: u64 = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn criterion_1_laplace_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for alpha in [2.5, 3.0, 4.0] {
        for beta_db in [-30.0, -20.0, -10.0, 0.0] {
            for z1 in [10.0, 50.0, 150.0] {
                for r in [10.0, 100.0, 400.0] {
                    let args = InterferenceArgs {
                        r,
                        beta: db(beta_db),
                        gamma: 0.01,
                        rho_j: BASELINE_RHO_T,
                        alpha,
                        annulus: AnnulusRegion::new(z1, z1 + 50.0).unwrap(),
                    };
                    let cf = laplace_interference_closed_form(&args).unwrap();
                    let q = laplace_interference_quadrature(&args).unwrap();
                    worst = worst.max((cf - q).abs());
                    n += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("{n} points, max |closed form - quadrature| = {worst:.2e} (tol 1e-8)"))
}

fn criterion_2_coverage_vs_mc() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for k in [1.0, 2.0] {
        for step in 0..=6 {
            let beta_db = -30.0 + 5.0 * step as f64;
            let params = NetworkParams::baseline()
                .with_rho_j(k * BASELINE_RHO_T)
                .with_beta_db(beta_db);
            let cf = coverage_joint(&params).unwrap();
            let mc = estimate_coverage(&TrialConfig::new(TRIALS, SEED, params).unwrap()).unwrap().result;
            for gap in [
                (cf.p_dl - mc.p_dl).abs(),
                (cf.p_ul - mc.p_ul).abs(),
                (cf.p_joint - mc.p_joint).abs(),
            ] {
                if gap > worst {
                    worst = gap;
                    at = format!("rho_j = {k} rho_t, beta = {beta_db} dB");
                }
            }
        }
    }
    outcome(worst <= 0.02, format!("14 points x 3 probabilities, max gap {worst:.4} at {at} (tol 0.02)"))
}

fn criterion_3_threshold_and_density_trends() -> Outcome {
    let sweep: Vec<f64> = (0..=30).map(|k| -30.0 + k as f64).collect();
    let joint = |k: f64| -> Vec<f64> {
        sweep
            .iter()
            .map(|&b| {
                coverage_joint(&NetworkParams::baseline().with_rho_j(k * BASELINE_RHO_T).with_beta_db(b))
                    .unwrap()
                    .p_joint
            })
            .collect()
    };
    let (one, two) = (joint(1.0), joint(2.0));
    let monotone = one.windows(2).all(|w| w[1] <= w[0]) && two.windows(2).all(|w| w[1] <= w[0]);
    let ordered = one.iter().zip(&two).all(|(a, b)| b < a);
    outcome(
        monotone && ordered,
        format!(
            "p_joint non-increasing in beta: {monotone}; 2 rho_t below rho_t at every beta: {ordered} (p_joint at 0 dB: {:.4} vs {:.4})",
            one[30], two[30]
        ),
    )
}

fn sign_changes(xs: &[f64]) -> usize {
    let signs: Vec<i32> = xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .map(|d| if d > 0.0 { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

fn criterion_4_jam_distance_shape() -> Outcome {
    let z1s: Vec<f64> = (0..=15).map(|k| 20.0 * k as f64).collect();
    let mut pass = true;
    let mut notes = Vec::new();
    for beta_db in [-30.0, -20.0, -10.0, 0.0] {
        let rows: Vec<_> = z1s
            .iter()
            .map(|&z1| {
                let params = NetworkParams::baseline()
                    .with_beta_db(beta_db)
                    .with_annulus(AnnulusRegion::new(z1, z1 + 50.0).unwrap());
                coverage_joint(&params).unwrap()
            })
            .collect();
        let ul: Vec<f64> = rows.iter().map(|r| r.p_ul).collect();
        let dl_far: Vec<f64> = rows.iter().zip(&z1s).filter(|(_, z)| **z >= 100.0).map(|(r, _)| r.p_dl).collect();
        let joint: Vec<f64> = rows.iter().map(|r| r.p_joint).collect();
        let ul_ok = ul.windows(2).all(|w| w[1] >= w[0]);
        let dl_ok = dl_far.windows(2).all(|w| w[1] <= w[0]);
        let changes = sign_changes(&joint);
        let peak = joint.windows(2).next().is_some_and(|w| w[1] > w[0]) && changes == 1;
        pass &= ul_ok && dl_ok && peak;
        notes.push(format!(
            "beta {beta_db} dB: ul up {ul_ok}, dl down past 100 m {dl_ok}, joint sign changes {changes}"
        ));
    }
    outcome(pass, notes.join("; "))
}

fn default_realization() -> (Realization, (f64, f64)) {
    let disk = DiskRegion::new(500.0).unwrap();
    (
        Realization::sample(5, 5, disk, 3.0, SEED).unwrap(),
        default_eve_bounds(&disk, 3.0),
    )
}

fn within_3se(cf: f64, empirical: f64) -> bool {
    (cf - empirical).abs() <= 3.0 * binomial_std_error(cf, TRIALS)
}

fn criterion_5_false_alarm_law() -> Outcome {
    let (real, bounds) = default_realization();
    let sigma = sigma_from_lq_db(10.0);
    let mut pass = true;
    let mut notes = Vec::new();
    for target in [0.01, 0.05, 0.1, 0.3] {
        let eps = threshold_for_pfa(target, sigma).unwrap();
        let profile = AuthProfile::new(real.followers.clone(), sigma, eps, bounds, 5).unwrap();
        let cf = p_fa_closed_form(eps, sigma).unwrap();
        let emp = simulate_auth(&profile, &AuthScenario::Legit, TRIALS, SEED).unwrap().p_fa;
        let ok = within_3se(cf, emp);
        pass &= ok;
        notes.push(format!("{target}: 2Q = {cf:.4}, mc = {emp:.4} ({})", if ok { "ok" } else { "off" }));
    }
    // Control: with one follower the statistic is |n| and the law is exact.
    let eps = threshold_for_pfa(0.1, sigma).unwrap();
    let single = AuthProfile::new(vec![real.followers[0]], sigma, eps, bounds, 5).unwrap();
    let control = simulate_auth(&single, &AuthScenario::Legit, TRIALS, SEED).unwrap().p_fa;
    outcome(
        pass,
        format!(
            "M=5 seed-{SEED} realization, LQ 10 dB: {}; M=1 control at 0.1: mc = {control:.4}",
            notes.join(", ")
        ),
    )
}

fn criterion_6_md_mc_closed_forms() -> Outcome {
    let (real, bounds) = default_realization();
    let mut pass = true;
    let mut notes = Vec::new();
    for lq in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let sigma = sigma_from_lq_db(lq);
        let eps = threshold_for_pfa(0.1, sigma).unwrap();
        let profile = AuthProfile::new(real.followers.clone(), sigma, eps, bounds, 5).unwrap();
        let md = p_md_closed_form(&profile, &real.eves).unwrap().value;
        let md_bar = p_md_expected(&profile).unwrap().value;
        let mc = p_mc_closed_form(&profile).unwrap().value;
        let eve_fixed = simulate_auth(&profile, &AuthScenario::EveFixed(real.eves.clone()), TRIALS, SEED).unwrap();
        let eve_uniform = simulate_auth(&profile, &AuthScenario::EveUniform, TRIALS, SEED).unwrap();
        let legit = simulate_auth(&profile, &AuthScenario::Legit, TRIALS, SEED).unwrap();
        let checks = [
            ("md", md, eve_fixed.p_md),
            ("md_bar", md_bar, eve_uniform.p_md),
            ("mc", mc, legit.p_mc),
        ];
        let mut parts = Vec::new();
        for (name, cf, emp) in checks {
            let ok = within_3se(cf, emp);
            pass &= ok;
            parts.push(format!("{name} {cf:.4}/{emp:.4}{}", if ok { "" } else { "!" }));
        }
        notes.push(format!(
            "LQ {lq}: {} (mc given accept {:.4})",
            parts.join(" "),
            legit.p_mc_given_accept
        ));
    }
    outcome(pass, format!("closed form/empirical, ! = outside 3 SE; {}", notes.join("; ")))
}

fn criterion_7_detection_claim() -> Outcome {
    let (real, bounds) = default_realization();
    let pd = |seed_real: &Realization, lq: f64, p_fa: f64| {
        let p = AuthProfile::new(seed_real.followers.clone(), sigma_from_lq_db(lq), 0.0, bounds, 5).unwrap();
        roc_curve(&p, &[p_fa]).unwrap()[0].p_d
    };
    let headline = pd(&real, 10.0, 0.1);
    let disk = DiskRegion::new(500.0).unwrap();
    let mut monotone = true;
    for seed in [SEED, 1, 2, 3, 4, 5, 6, 7] {
        let r = Realization::sample(5, 5, disk, 3.0, seed).unwrap();
        let curve: Vec<f64> = (0..=20).map(|lq| pd(&r, lq as f64, 0.1)).collect();
        monotone &= curve.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    }
    outcome(
        headline >= 0.95 && monotone,
        format!("p_d at LQ 10 dB, p_fa 0.1 = {headline:.4} (need >= 0.95); p_d non-decreasing in LQ on 8 seeds: {monotone}"),
    )
}

fn criterion_8_trivial_limits() -> Outcome {
    let mut notes = Vec::new();

    let params = NetworkParams::baseline().with_rho_j(0.0);
    let cf = coverage_joint(&params).unwrap();
    let mc = estimate_coverage(&TrialConfig::new(10_000, SEED, params).unwrap()).unwrap().result;
    let coverage_ok = [cf.p_dl, cf.p_ul, cf.p_joint].iter().all(|p| (p - 1.0).abs() <= 1e-8)
        && [mc.p_dl, mc.p_ul, mc.p_joint].iter().all(|p| *p == 1.0);
    notes.push(format!("rho_j = 0 coverage: {coverage_ok}"));

    let (real, bounds) = default_realization();
    let zero_eps = AuthProfile::new(real.followers.clone(), 0.5, 0.0, bounds, 5).unwrap();
    let eps_ok = p_fa_closed_form(0.0, 0.5).unwrap() == 1.0
        && p_md_closed_form(&zero_eps, &real.eves).unwrap().value == 0.0
        && p_md_expected(&zero_eps).unwrap().value == 0.0
        && simulate_auth(&zero_eps, &AuthScenario::Legit, TRIALS, SEED).unwrap().p_fa == 1.0
        && simulate_auth(&zero_eps, &AuthScenario::EveUniform, TRIALS, SEED).unwrap().p_md == 0.0;
    notes.push(format!("epsilon = 0: {eps_ok}"));

    let quiet = AuthProfile::new(real.followers.clone(), 1e-12, 0.1, bounds, 5).unwrap();
    let legit = simulate_auth(&quiet, &AuthScenario::Legit, TRIALS, SEED).unwrap();
    let sigma_ok = legit.p_fa == 0.0 && legit.p_mc == 0.0;
    notes.push(format!("sigma -> 0: {sigma_ok}"));

    outcome(coverage_ok && eps_ok && sigma_ok, notes.join(", "))
}

fn criterion_9_determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut names = Vec::new();
    for name in ["baseline.json", "coverage_vs_jam_distance_beta_0db.json", "auth_errors_pfa_0.1.json", "roc_lq10.json"] {
        let mut outputs = Vec::new();
        for (i, threads) in [1usize, 4, 4].into_iter().enumerate() {
            let out = dir.path().join(format!("{name}.{i}"));
            let overrides = Overrides {
                out: Some(out.clone()),
                ..Overrides::default()
            };
            let cfg = load_config(&configs.join(name), &overrides).unwrap();
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run(&cfg)).unwrap();
            outputs.push(fs::read(&out).unwrap());
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        names.push(format!("{name} {}", if same { "identical" } else { "DIFFERS" }));
    }
    outcome(pass, format!("1, 4 and 4 threads: {}", names.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 Laplace closed form vs quadrature", criterion_1_laplace_oracle),
        ("2 coverage closed form vs Monte Carlo", criterion_2_coverage_vs_mc),
        ("3 coverage falls with threshold and jammer density", criterion_3_threshold_and_density_trends),
        ("4 coverage vs jamming distance shape", criterion_4_jam_distance_shape),
        ("5 false-alarm law", criterion_5_false_alarm_law),
        ("6 missed detection and misclassification vs Monte Carlo", criterion_6_md_mc_closed_forms),
        ("7 detection >= 0.95 at p_fa 0.1, LQ 10 dB", criterion_7_detection_claim),
        ("8 trivial limits", criterion_8_trivial_limits),
        ("9 deterministic outputs", criterion_9_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let o = check();
        println!("criterion {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
