//! Mechanical re-verification of the identity, positivity, and inequality
//! claims behind the auxiliary-function layer.
//!
//! Claims come in three kinds: exact identities (zero rational residual,
//! loaded from a data file), certified positivity (exact bisection
//! certificates), and sampled inequalities (deterministic grids plus
//! seeded random nodes, relative tolerance 1e-9).

use serde::Serialize;

use crate::aux::{self, SLParams, SlFn, SmallFn, SmallSParams};
use crate::poly::{
    certify_positive, certify_positive_global, equal_exact, parse_claim_file, rat, Expr,
    PositivityFailure, Rat, TopForm,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDENTITY_DATA: &str = include_str!("../../data/identities.sexp");

/// Relative tolerance for sampled inequalities; absorbs float roundoff in
/// true-equality cases.
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    ExactIdentity,
    CertifiedPositivity,
    SampledInequality,
}

#[derive(Debug, Clone)]
enum Check {
    Identity { lhs: Expr, rhs: Expr },
    Positivity(PositivitySpec),
    Inequality(InequalityId),
}

#[derive(Debug, Clone)]
struct PositivitySpec {
    coeffs: Vec<Rat>,
    region: Region,
    threshold: Rat,
    max_depth: u32,
}

#[derive(Debug, Clone)]
enum Region {
    Interval(Rat, Rat),
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InequalityId {
    /// `|t F'| <= 4 s F` for the capped family, all t.
    LargeSTf,
    /// `(F')^2 <= s^2 G'` for the capped family.
    LargeSGradient,
    /// `|G| = s F^(2 - 1/s)` on `|t| <= 1` for the capped family.
    LargeSGEquality,
    /// `F_{s,l} <= F_{s,k}` for `l < k`.
    LargeSMonotoneL,
    /// `|t F_s'| <= 5 F_s` for the small family.
    SmallSTf,
    /// `(F_s')^2 <= c0 G_s'` with `c0 = 1e8`.
    SmallSGradient,
    /// `|G_s| <= k_s F_s^(2 - 1/s)` on `|t| <= 1`.
    SmallSGBound,
    /// `Fbar <= F_s^(1/s) <= Fbar + k0`.
    SmallSRootSandwich,
    /// Sampled positivity of the perturbed ratio at `α₀ = 1 - 1e-8`.
    AlphaMargin,
    /// The derivative bracket squares below 1e4 on the unit box.
    BracketSquareBound,
}

/// One registered claim.
#[derive(Debug, Clone)]
pub struct Claim {
    pub label: String,
    pub kind: ClaimKind,
    /// Human-readable parameter domain of the claim.
    pub domain: String,
    check: Check,
}

/// Sampling parameters for the inequality suite.
#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub seed: u64,
    /// grid nodes per t-range
    pub t_nodes: usize,
    /// extra seeded random t-points per claim
    pub random_points: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            seed: 0x5eed,
            t_nodes: 1000,
            random_points: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub label: String,
    pub kind: ClaimKind,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Worst-case slack for positivity claims (min certified lower bound
    /// minus threshold) and for the inequality suite where meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub claims: Vec<ClaimReport>,
    pub all_passed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown claim label `{0}`")]
    UnknownLabel(String),
    #[error("claim data file is malformed: {0}")]
    BadData(String),
}

fn parse_defs() -> (
    std::collections::BTreeMap<String, Expr>,
    Vec<(String, Expr, Expr)>,
) {
    let forms = parse_claim_file(IDENTITY_DATA).expect("bundled claim file parses");
    let mut defs = std::collections::BTreeMap::new();
    let mut idents = Vec::new();
    for f in forms {
        match f {
            TopForm::Def { name, expr } => {
                defs.insert(name, expr);
            }
            TopForm::Identity { name, lhs, rhs } => idents.push((name, lhs, rhs)),
        }
    }
    (defs, idents)
}

fn t_poly(defs: &std::collections::BTreeMap<String, Expr>, name: &str) -> Vec<Rat> {
    defs[name]
        .as_t_polynomial()
        .unwrap_or_else(|| panic!("def `{name}` is not a plain polynomial"))
}

fn poly_linear_combo(polys: &[(&[Rat], Rat)]) -> Vec<Rat> {
    let n = polys.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
    let mut out = vec![Rat::from_integer(0.into()); n];
    for (p, w) in polys {
        for (i, c) in p.iter().enumerate() {
            out[i] += c * w;
        }
    }
    while out.last().map_or(false, num_traits::Zero::is_zero) {
        out.pop();
    }
    out
}

/// The built-in registry: every claim of the verification suite, each
/// exactly once.
pub fn default_registry() -> Vec<Claim> {
    let (defs, idents) = parse_defs();
    let mut claims: Vec<Claim> = idents
        .into_iter()
        .map(|(name, lhs, rhs)| Claim {
            label: name,
            kind: ClaimKind::ExactIdentity,
            domain: "exact, all t (and s where present)".to_string(),
            check: Check::Identity { lhs, rhs },
        })
        .collect();

    let qa = t_poly(&defs, "qA");
    let qb = t_poly(&defs, "qB");
    let qc = t_poly(&defs, "qC");
    let qk = t_poly(&defs, "qK");
    let k23 = t_poly(&defs, "k23");

    let one = Rat::from_integer(1.into());
    let pos = |label: &str, domain: &str, spec: PositivitySpec| Claim {
        label: label.to_string(),
        kind: ClaimKind::CertifiedPositivity,
        domain: domain.to_string(),
        check: Check::Positivity(spec),
    };

    claims.push(pos(
        "k23-positive",
        "t in [0,1]",
        PositivitySpec {
            coeffs: k23,
            region: Region::Interval(rat(0, 1), rat(1, 1)),
            threshold: rat(1, 100),
            max_depth: 32,
        },
    ));
    claims.push(pos(
        "quartic-global",
        "t in R",
        PositivitySpec {
            coeffs: qa.clone(),
            region: Region::Real,
            threshold: rat(3, 1),
            max_depth: 32,
        },
    ));
    claims.push(pos(
        "kprime-quartic-positive",
        "t in [0,1]",
        PositivitySpec {
            coeffs: qk,
            region: Region::Interval(rat(0, 1), rat(1, 1)),
            threshold: rat(0, 1),
            max_depth: 32,
        },
    ));
    // s-elimination: k(s) is increasing in s (the k' lower bound is the
    // claim above), so positivity over the whole admissible s-range
    // follows from positivity at the left endpoint s = 2/3 - 1e-6.
    let s_star = rat(1_999_997, 3_000_000);
    let k_at_s_star = poly_linear_combo(&[
        (&qa, &s_star * &s_star),
        (&qb, s_star.clone()),
        (&qc, one.clone()),
    ]);
    claims.push(pos(
        "h-left-endpoint-positive",
        "t in [0,1], s-eliminated at 2/3 - 1e-6",
        PositivitySpec {
            coeffs: k_at_s_star,
            region: Region::Interval(rat(0, 1), rat(1, 1)),
            threshold: rat(1, 1000),
            max_depth: 32,
        },
    ));
    // k'(s) <= 1e3 on (1/2,1]: k' is linear in s with positive slope 2*qA,
    // so its maximum over the range sits at s = 1.
    let kprime_at_one = poly_linear_combo(&[(&qa, rat(2, 1)), (&qb, one.clone())]);
    let upper_margin = poly_linear_combo(&[
        (&[rat(1000, 1)], one.clone()),
        (&kprime_at_one, rat(-1, 1)),
    ]);
    claims.push(pos(
        "kprime-upper-margin",
        "t in [0,1], s-eliminated at 1",
        PositivitySpec {
            coeffs: upper_margin,
            region: Region::Interval(rat(0, 1), rat(1, 1)),
            threshold: rat(0, 1),
            max_depth: 32,
        },
    ));
    claims.push(pos(
        "edge-positive",
        "s in [1,100]",
        PositivitySpec {
            coeffs: vec![rat(0, 1), rat(3, 1)],
            region: Region::Interval(rat(1, 1), rat(100, 1)),
            threshold: rat(0, 1),
            max_depth: 32,
        },
    ));

    let ineq = |label: &str, domain: &str, id: InequalityId| Claim {
        label: label.to_string(),
        kind: ClaimKind::SampledInequality,
        domain: domain.to_string(),
        check: Check::Inequality(id),
    };
    claims.push(ineq(
        "large-s-tf-bound",
        "s in {1.1,1.5,2,3}, l in {3,5,10}, t in [-100,100]",
        InequalityId::LargeSTf,
    ));
    claims.push(ineq(
        "large-s-gradient-bound",
        "s in {1.1,1.5,2,3}, l in {3,5,10}, t in [-100,100]",
        InequalityId::LargeSGradient,
    ));
    claims.push(ineq(
        "large-s-g-equality",
        "s in {1.1,1.5,2,3}, l in {3,5,10}, |t| <= 1",
        InequalityId::LargeSGEquality,
    ));
    claims.push(ineq(
        "large-s-monotone-l",
        "s in {1.1,1.5,2,3}, l<k in {3,5,10}, t in [-100,100]",
        InequalityId::LargeSMonotoneL,
    ));
    claims.push(ineq(
        "small-s-tf-bound",
        "20 s-values in (2/3-1e-6, 1], t in [-5,5]",
        InequalityId::SmallSTf,
    ));
    claims.push(ineq(
        "small-s-gradient-bound",
        "20 s-values in (2/3-1e-6, 1], t in [-5,5], c0 = 1e8",
        InequalityId::SmallSGradient,
    ));
    claims.push(ineq(
        "small-s-g-bound",
        "20 s-values in (2/3-1e-6, 1], |t| <= 1",
        InequalityId::SmallSGBound,
    ));
    claims.push(ineq(
        "small-s-root-sandwich",
        "20 s-values in (2/3-1e-6, 1], t in [-5,5]",
        InequalityId::SmallSRootSandwich,
    ));
    claims.push(ineq(
        "alpha-margin",
        "20 s-values in (2/3-1e-6, 1], t in (0,1]",
        InequalityId::AlphaMargin,
    ));
    claims.push(ineq(
        "bracket-square-bound",
        "20 s-values in (1/2, 1], |t| <= 1",
        InequalityId::BracketSquareBound,
    ));
    claims
}

/// Run one claim.
pub fn run_claim(claim: &Claim, spec: &SampleSpec) -> ClaimReport {
    let (status, witness, margin) = match &claim.check {
        Check::Identity { lhs, rhs } => {
            if equal_exact(lhs, rhs) {
                ("pass".to_string(), None, None)
            } else {
                let residual = lhs - rhs;
                ("fail".to_string(), Some(format!("residual: {residual}")), None)
            }
        }
        Check::Positivity(p) => run_positivity(p),
        Check::Inequality(id) => run_inequality(*id, spec),
    };
    ClaimReport {
        label: claim.label.clone(),
        kind: claim.kind,
        status,
        witness,
        margin,
        runtime_ms: None,
    }
}

fn run_positivity(p: &PositivitySpec) -> (String, Option<String>, Option<f64>) {
    let result = match &p.region {
        Region::Interval(lo, hi) => certify_positive(&p.coeffs, lo, hi, &p.threshold, p.max_depth),
        Region::Real => certify_positive_global(&p.coeffs, &p.threshold, p.max_depth),
    };
    match result {
        Ok(cert) => {
            let margin = cert
                .leaves
                .iter()
                .map(|l| (&l.lower_bound - &p.threshold).to_f64().unwrap_or(0.0))
                .fold(f64::INFINITY, f64::min);
            let margin = if margin.is_finite() { Some(margin) } else { None };
            ("pass".to_string(), None, margin)
        }
        Err(PositivityFailure::Counterexample { t, value }) => (
            "fail".to_string(),
            Some(format!("p({t}) = {value} <= threshold")),
            None,
        ),
        Err(PositivityFailure::DepthExhausted { lo, hi }) => (
            "inconclusive".to_string(),
            Some(format!("bisection depth exhausted on [{lo}, {hi}]")),
            None,
        ),
        Err(PositivityFailure::UnboundedBelow) => (
            "fail".to_string(),
            Some("leading term does not dominate".to_string()),
            None,
        ),
    }
}

fn ineq_ok(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * lhs.abs().max(rhs.abs()).max(1e-30)
}

fn eq_ok(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= REL_TOL * lhs.abs().max(rhs.abs()).max(1e-30)
}

fn t_points(spec: &SampleSpec, lo: f64, hi: f64, exclude_zero: bool) -> Vec<f64> {
    let n = spec.t_nodes;
    let mut pts: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    pts.extend((0..spec.random_points).map(|_| rng.gen_range(lo..hi)));
    if exclude_zero {
        pts.retain(|t| t.abs() > 1e-9);
    }
    pts
}

fn small_s_values(n: usize) -> Vec<f64> {
    let smin = 2.0 / 3.0 - 1e-6;
    (1..=n).map(|j| smin + (1.0 - smin) * j as f64 / n as f64).collect()
}

fn bracket_q(at: f64) -> f64 {
    at * at - 10.0 / 3.0 * at + 5.0
}

fn bracket_p(s: f64, at: f64) -> f64 {
    (2.5 + s) * at * at - (5.0 + 10.0 * s / 3.0) * at + 2.5 + 5.0 * s
}

fn bracket_r(s: f64, at: f64) -> f64 {
    (3.75 + 4.0 * s + s * s) * at * at - (2.5 + 20.0 * s / 3.0 + 10.0 * s * s / 3.0) * at - 1.25
        + 5.0 * s * s
}

fn run_inequality(id: InequalityId, spec: &SampleSpec) -> (String, Option<String>, Option<f64>) {
    let fail = |s: f64, l: Option<f64>, t: f64, lhs: f64, rhs: f64| {
        let lpart = l.map(|l| format!(", l = {l}")).unwrap_or_default();
        (
            "fail".to_string(),
            Some(format!("s = {s}{lpart}, t = {t}: {lhs} vs {rhs}")),
            None,
        )
    };
    let large_s = [1.1, 1.5, 2.0, 3.0];
    let ls = [3.0, 5.0, 10.0];
    let mut min_margin = f64::INFINITY;
    match id {
        InequalityId::LargeSTf | InequalityId::LargeSGradient | InequalityId::LargeSGEquality => {
            let (lo, hi) = if id == InequalityId::LargeSGEquality {
                (-1.0, 1.0)
            } else {
                (-100.0, 100.0)
            };
            for &s in &large_s {
                for &l in &ls {
                    let p = SLParams::new(s, l).unwrap();
                    for t in t_points(spec, lo, hi, false) {
                        let ok = match id {
                            InequalityId::LargeSTf => {
                                let lhs =
                                    (t * aux::eval_sl(SlFn::FPrime, &p, t).unwrap()).abs();
                                let rhs = 4.0 * s * aux::eval_sl(SlFn::F, &p, t).unwrap();
                                min_margin = min_margin.min(rhs - lhs);
                                if !ineq_ok(lhs, rhs) {
                                    return fail(s, Some(l), t, lhs, rhs);
                                }
                                true
                            }
                            InequalityId::LargeSGradient => {
                                let f1 = aux::eval_sl(SlFn::FPrime, &p, t).unwrap();
                                let lhs = f1 * f1;
                                let rhs =
                                    s * s * aux::eval_sl(SlFn::GPrime, &p, t).unwrap();
                                min_margin = min_margin.min(rhs - lhs);
                                if !ineq_ok(lhs, rhs) {
                                    return fail(s, Some(l), t, lhs, rhs);
                                }
                                true
                            }
                            _ => {
                                let lhs = aux::eval_sl(SlFn::G, &p, t).unwrap().abs();
                                let rhs = s
                                    * aux::eval_sl(SlFn::F, &p, t)
                                        .unwrap()
                                        .powf(2.0 - 1.0 / s);
                                if !eq_ok(lhs, rhs) {
                                    return fail(s, Some(l), t, lhs, rhs);
                                }
                                true
                            }
                        };
                        debug_assert!(ok);
                    }
                }
            }
        }
        InequalityId::LargeSMonotoneL => {
            for &s in &large_s {
                for (i, &l) in ls.iter().enumerate() {
                    for &k in &ls[i + 1..] {
                        let pl = SLParams::new(s, l).unwrap();
                        let pk = SLParams::new(s, k).unwrap();
                        for t in t_points(spec, -100.0, 100.0, false) {
                            let lhs = aux::eval_sl(SlFn::F, &pl, t).unwrap();
                            let rhs = aux::eval_sl(SlFn::F, &pk, t).unwrap();
                            min_margin = min_margin.min(rhs - lhs);
                            if !ineq_ok(lhs, rhs) {
                                return fail(s, Some(l), t, lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
        InequalityId::SmallSTf
        | InequalityId::SmallSGradient
        | InequalityId::SmallSGBound
        | InequalityId::SmallSRootSandwich => {
            let c = aux::constants();
            for &s in &small_s_values(20) {
                let p = SmallSParams::new(s).unwrap();
                let k_s = if id == InequalityId::SmallSGBound {
                    aux::estimate_k_s(s, 2000, 1.1).unwrap()
                } else {
                    0.0
                };
                let (lo, hi) = if id == InequalityId::SmallSGBound {
                    (-1.0, 1.0)
                } else {
                    (-5.0, 5.0)
                };
                for t in t_points(spec, lo, hi, true) {
                    match id {
                        InequalityId::SmallSTf => {
                            let lhs =
                                (t * aux::eval_small_s(SmallFn::FsPrime, &p, t).unwrap()).abs();
                            let rhs = 5.0 * aux::eval_small_s(SmallFn::Fs, &p, t).unwrap();
                            min_margin = min_margin.min(rhs - lhs);
                            if !ineq_ok(lhs, rhs) {
                                return fail(s, None, t, lhs, rhs);
                            }
                        }
                        InequalityId::SmallSGradient => {
                            let f1 = aux::eval_small_s(SmallFn::FsPrime, &p, t).unwrap();
                            let lhs = f1 * f1;
                            let rhs =
                                c.c0 * aux::eval_small_s(SmallFn::GsPrime, &p, t).unwrap();
                            if !ineq_ok(lhs, rhs) {
                                return fail(s, None, t, lhs, rhs);
                            }
                        }
                        InequalityId::SmallSGBound => {
                            let lhs = aux::eval_small_s(SmallFn::Gs, &p, t).unwrap().abs();
                            let rhs = k_s
                                * aux::eval_small_s(SmallFn::Fs, &p, t)
                                    .unwrap()
                                    .powf(2.0 - 1.0 / s);
                            if !ineq_ok(lhs, rhs) {
                                return fail(s, None, t, lhs, rhs);
                            }
                        }
                        _ => {
                            let fbar = aux::eval_small_s(SmallFn::FBar, &p, t).unwrap();
                            let mid = aux::eval_small_s(SmallFn::Fs, &p, t)
                                .unwrap()
                                .powf(1.0 / s);
                            if !ineq_ok(fbar, mid) {
                                return fail(s, None, t, fbar, mid);
                            }
                            if !ineq_ok(mid, fbar + c.k0) {
                                return fail(s, None, t, mid, fbar + c.k0);
                            }
                        }
                    }
                }
            }
        }
        InequalityId::AlphaMargin => {
            let c = aux::constants();
            for &s in &small_s_values(20) {
                for t in t_points(spec, 0.0, 1.0, true) {
                    let t = t.abs();
                    let p = bracket_p(s, t);
                    let val = c.alpha0 * p * p + bracket_q(t) * bracket_r(s, t);
                    min_margin = min_margin.min(val - 1e-4);
                    if val <= 1e-4 {
                        return fail(s, None, t, val, 1e-4);
                    }
                }
            }
        }
        InequalityId::BracketSquareBound => {
            let n = 20;
            let svals: Vec<f64> = (1..=n).map(|j| 0.5 + 0.5 * j as f64 / n as f64).collect();
            for &s in &svals {
                for t in t_points(spec, -1.0, 1.0, false) {
                    let p = bracket_p(s, t.abs());
                    let lhs = p * p;
                    min_margin = min_margin.min(1e4 - lhs);
                    if !ineq_ok(lhs, 1e4) {
                        return fail(s, None, t, lhs, 1e4);
                    }
                }
            }
        }
    }
    let margin = if min_margin.is_finite() {
        Some(min_margin)
    } else {
        None
    };
    ("pass".to_string(), None, margin)
}

/// Execute every claim in the registry; the report is sorted by label.
pub fn run_all(claims: &[Claim], spec: &SampleSpec) -> SuiteReport {
    run_all_with_timings(claims, spec, false)
}

/// As [`run_all`], optionally recording wall-clock runtimes. Timings are
/// off by default so identical inputs yield byte-identical reports.
pub fn run_all_with_timings(claims: &[Claim], spec: &SampleSpec, timings: bool) -> SuiteReport {
    let mut reports: Vec<ClaimReport> = claims
        .iter()
        .map(|c| {
            let start = std::time::Instant::now();
            let mut r = run_claim(c, spec);
            if timings {
                r.runtime_ms = Some(start.elapsed().as_millis() as u64);
            }
            r
        })
        .collect();
    reports.sort_by(|a, b| a.label.cmp(&b.label));
    let all_passed = reports.iter().all(|r| r.status == "pass");
    SuiteReport {
        claims: reports,
        all_passed,
    }
}

/// Run the single claim with the given label from the default registry.
pub fn run_label(label: &str, spec: &SampleSpec) -> Result<ClaimReport, VerifyError> {
    let registry = default_registry();
    let claim = registry
        .iter()
        .find(|c| c.label == label)
        .ok_or_else(|| VerifyError::UnknownLabel(label.to_string()))?;
    Ok(run_claim(claim, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_labels_unique() {
        let reg = default_registry();
        let mut labels: Vec<&str> = reg.iter().map(|c| c.label.as_str()).collect();
        let n = labels.len();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels.len(), n);
        assert!(n >= 35, "expected a full registry, got {n}");
    }

    #[test]
    fn identities_all_pass() {
        let spec = SampleSpec::default();
        for claim in default_registry()
            .iter()
            .filter(|c| c.kind == ClaimKind::ExactIdentity)
        {
            let r = run_claim(claim, &spec);
            assert_eq!(r.status, "pass", "{}: {:?}", claim.label, r.witness);
        }
    }

    #[test]
    fn positivity_all_pass() {
        let spec = SampleSpec::default();
        for claim in default_registry()
            .iter()
            .filter(|c| c.kind == ClaimKind::CertifiedPositivity)
        {
            let r = run_claim(claim, &spec);
            assert_eq!(r.status, "pass", "{}: {:?}", claim.label, r.witness);
        }
    }

    #[test]
    fn inequalities_all_pass() {
        let spec = SampleSpec::default();
        for claim in default_registry()
            .iter()
            .filter(|c| c.kind == ClaimKind::SampledInequality)
        {
            let r = run_claim(claim, &spec);
            assert_eq!(r.status, "pass", "{}: {:?}", claim.label, r.witness);
        }
    }

    #[test]
    fn injected_defect_is_caught() {
        use crate::poly::parse_sexpr;
        let claim = Claim {
            label: "defect".to_string(),
            kind: ClaimKind::ExactIdentity,
            domain: "test".to_string(),
            check: Check::Identity {
                lhs: parse_sexpr("(+ (pow t 2) 51)").unwrap(),
                rhs: parse_sexpr("(+ (pow t 2) 50)").unwrap(),
            },
        };
        let r = run_claim(&claim, &SampleSpec::default());
        assert_eq!(r.status, "fail");
        assert!(r.witness.unwrap().contains("residual"));
    }

    #[test]
    fn empty_registry_empty_report() {
        let rep = run_all(&[], &SampleSpec::default());
        assert!(rep.claims.is_empty());
        assert!(rep.all_passed);
    }

    #[test]
    fn unknown_label_errors() {
        assert!(matches!(
            run_label("no-such-claim", &SampleSpec::default()),
            Err(VerifyError::UnknownLabel(_))
        ));
    }

    #[test]
    fn report_serializes_deterministically() {
        let reg = default_registry();
        let spec = SampleSpec::default();
        let a = serde_json::to_string(&run_all(&reg, &spec)).unwrap();
        let b = serde_json::to_string(&run_all(&reg, &spec)).unwrap();
        assert_eq!(a, b);
    }
}
