//! Acceptance gate: eight criteria, each a single pass/fail test with
//! its stated tolerance and runtime budget.

use std::time::Instant;

use moserlab_core::aux;
use moserlab_core::config::RunConfig;
use moserlab_core::forge::{lbeta_mass_check, doubling_report, AnnularWeightSpec, Schedule};
use moserlab_core::grid::{derive_params, estimate_admissibility, tbar_interval};
use moserlab_core::moser::{self, tail_sum_geo, tail_sum_weighted, ProblemData};
use moserlab_core::pde::{
    assemble_and_solve, bound_consistency, manufactured_convergence, random_admissible_test,
    weak_residual,
};
use moserlab_core::verify::{default_registry, run_all, ClaimKind, SampleSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn claims_of(kind: ClaimKind) -> Vec<moserlab_core::verify::Claim> {
    default_registry()
        .into_iter()
        .filter(|c| c.kind == kind)
        .collect()
}

#[test]
fn criterion_1_exact_identities() {
    let start = Instant::now();
    let claims = claims_of(ClaimKind::ExactIdentity);
    assert!(claims.len() >= 20, "identity registry too small");
    let report = run_all(&claims, &SampleSpec::default());
    for c in &report.claims {
        assert_eq!(c.status, "pass", "identity {} failed: {:?}", c.label, c.witness);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "identity suite too slow: {elapsed:?}");
    println!("PASS criterion 1: {} exact identities, zero residual, {elapsed:?}", report.claims.len());
}

#[test]
fn criterion_2_certified_positivity() {
    let start = Instant::now();
    let claims = claims_of(ClaimKind::CertifiedPositivity);
    let report = run_all(&claims, &SampleSpec::default());
    for c in &report.claims {
        assert_eq!(c.status, "pass", "positivity {} failed: {:?}", c.label, c.witness);
    }
    // the three headline certificates must be present
    for label in ["k23-positive", "quartic-global", "kprime-quartic-positive"] {
        assert!(report.claims.iter().any(|c| c.label == label), "missing {label}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "positivity suite too slow: {elapsed:?}");
    println!("PASS criterion 2: {} certificates, depth <= 32, {elapsed:?}", report.claims.len());
}

#[test]
fn criterion_3_sampled_inequalities() {
    let claims = claims_of(ClaimKind::SampledInequality);
    assert!(claims.len() >= 10, "inequality registry too small");
    let report = run_all(&claims, &SampleSpec::default());
    for c in &report.claims {
        assert_eq!(c.status, "pass", "inequality {} violated: {:?}", c.label, c.witness);
    }
    println!("PASS criterion 3: {} inequality families, zero violations at rel tol 1e-9", report.claims.len());
}

#[test]
fn criterion_4_constants_and_series() {
    let c = aux::constants();
    assert_eq!(c.delta, 1e-6);
    assert_eq!(c.alpha0, 1.0 - 1e-8);
    assert_eq!(c.c0, 1e8);
    assert_eq!(c.k0, 49.0 / 4.0);

    // closed-form tails against 1000-term partial sums
    for &kappa in &[14.0 / 9.0, 1.5, 2.0, 3.0] {
        for &m0 in &[0usize, 1, 3, 7] {
            let mut geo = 0.0;
            let mut weighted = 0.0;
            for j in (m0 + 1)..=(m0 + 1000) {
                let term = (kappa as f64).powi(-(j as i32));
                geo += term;
                weighted += j as f64 * term;
            }
            let cg = tail_sum_geo(kappa, m0);
            let cw = tail_sum_weighted(kappa, m0);
            assert!((cg - geo).abs() <= 1e-12 * (1.0 + geo), "geometric tail kappa={kappa} m0={m0}");
            assert!((cw - weighted).abs() <= 1e-12 * (1.0 + weighted), "weighted tail kappa={kappa} m0={m0}");
        }
    }
    println!("PASS criterion 4: constants reproduced, series tails match partial sums to 1e-12");
}

#[test]
fn criterion_5_doubling_weight() {
    let start = Instant::now();
    let spec = AnnularWeightSpec::new(2, 2, 10, Schedule::Steep).unwrap();
    let mut prev_log2 = f64::NEG_INFINITY;
    for k in spec.k_range() {
        // doubling_report itself asserts ratio >= analytic bound
        let rep = doubling_report(&spec, k).unwrap();
        assert!(rep.log2_ratio > prev_log2, "ratio not strictly increasing at k={k}");
        prev_log2 = rep.log2_ratio;
        if k == 5 {
            assert!(
                (rep.lower_bound - 7.2115).abs() / 7.2115 < 1e-4,
                "k=5 bound {} disagrees with 7.2115", rep.lower_bound
            );
        }
        let mass = lbeta_mass_check(&spec, k).unwrap();
        assert!(mass.pass, "mass bound failed at k={k}");
        assert!(mass.margin_log2 > 0.0);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "doubling suite too slow: {elapsed:?}");
    println!("PASS criterion 5: doubling ratios clear analytic bounds for k=5..10, {elapsed:?}");
}

const SOLVE_CONFIG: &str = r#"
[domain]
shape = "unit-square"
a_faces = ["all"]
t_final = 1.0

[grid]
n = 16
nt = 8

[chain]
dimension = 2
tbar = 1.6
"#;

#[test]
fn criterion_6_solver() {
    let start = Instant::now();
    let conv = manufactured_convergence(&[16, 32, 64]).unwrap();
    assert!(
        (1.8..=2.2).contains(&conv.order),
        "spatial order {} outside [1.8, 2.2]; errors {:?}", conv.order, conv.errors
    );
    let cfg = RunConfig::from_str(SOLVE_CONFIG).unwrap();
    let p = cfg.build_problem().unwrap();
    let (u, _) = assemble_and_solve(&p).unwrap();
    for i in 0..10 {
        let phi = random_admissible_test(&p.grid, cfg.seed + i);
        let res = weak_residual(&u, &p, &phi).unwrap();
        let scale = (1.0 + u.sup_norm()) * (1.0 + phi.sup_norm());
        assert!(res.abs() <= 1e-8 * scale, "weak residual {res} too large for test {i}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "solver suite too slow: {elapsed:?}");
    println!("PASS criterion 6: order {:.3} in [1.8, 2.2], 10 weak residuals below 1e-8 scale, {elapsed:?}", conv.order);
}

fn battery_config(shape: &str, source: &str, weight_kind: &str, gamma: f64) -> String {
    format!(
        r#"
[domain]
shape = "{shape}"
a_faces = ["all"]
t_final = 1.0

[grid]
n = 16
nt = 8

[chain]
dimension = 2
tbar = 1.6

[weight]
kind = "{weight_kind}"
gamma = {gamma}

[problem]
source = "{source}"
amplitude = 1.0
alpha = 9.0
"#
    )
}

#[test]
fn criterion_7_end_to_end_battery() {
    let start = Instant::now();
    let mut configs = vec![
        battery_config("unit-square", "constant", "identity", 0.0),
        battery_config("unit-square", "sine", "identity", 0.0),
        battery_config("unit-ball", "constant", "identity", 0.0),
        battery_config("unit-ball", "sine", "identity", 0.0),
        battery_config("l-shape", "constant", "identity", 0.0),
    ];
    // degenerate distance weights: gamma * tbar/(2 - tbar) < 1 for both
    configs.push(battery_config("unit-square", "constant", "distance", 0.1));
    configs.push(battery_config("unit-square", "constant", "distance", 0.2));
    assert!(configs.len() >= 7);

    for (idx, text) in configs.iter().enumerate() {
        let cfg = RunConfig::from_str(text).unwrap();
        let chain = cfg.build_chain().unwrap();
        let domain = cfg.build_domain().unwrap();
        let p = cfg.build_problem().unwrap();
        let c_adm =
            2.0 * estimate_admissibility(&domain, &chain, 24, 200, cfg.seed).unwrap();
        let alpha = cfg.problem.alpha;
        // asserts sup_norm <= certified bound internally
        let rep = bound_consistency(&p, &chain, c_adm, alpha).unwrap();
        assert!(rep.log10_slack >= 0.0, "problem {idx}: no slack");
        assert!(rep.source_bound_ok, "problem {idx}: structure bound violated");

        // ladder recursion, m <= 8, asserted rung by rung
        let (u, _) = assemble_and_solve(&p).unwrap();
        let q = p.grid.q_measure();
        let a_norm = p.structure.a * q.powf((chain.rbar - 2.0) / chain.rbar);
        let data =
            ProblemData::new(chain, q, c_adm, a_norm, alpha, rep.u_alpha_norm).unwrap();
        let rungs = moser::empirical_iteration(&u, &p.grid, &data, 8).unwrap();
        assert_eq!(rungs.len(), 9, "problem {idx}: wrong ladder length");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "battery too slow: {elapsed:?}");
    println!("PASS criterion 7: {} problems, sup <= bound and 8-rung ladder recursion everywhere, {elapsed:?}", configs.len());
}

#[test]
fn criterion_8_parameter_chain_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in 2u32..=5 {
        let (lo, hi) = tbar_interval(n);
        for _ in 0..100 {
            let tbar = rng.gen_range(lo..hi);
            let tbar = if tbar <= lo { (lo + hi) / 2.0 } else { tbar };
            let chain = derive_params(n, tbar, rng.gen_range(0.01..0.99)).unwrap();
            assert!(1.0 < chain.tbar);
            assert!(chain.tbar < 2.0);
            assert!(2.0 < chain.rbar);
            assert!(chain.rbar < chain.r);
            assert!(chain.r < chain.tstar);
        }
    }
    println!("PASS criterion 8: chain ordering 1 < tbar < 2 < rbar < r < tstar, 4 x 100 draws");
}
