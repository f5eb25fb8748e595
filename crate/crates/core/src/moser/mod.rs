//! The explicit-constant iteration pipeline: from problem data to a
//! certified L-infinity bound, with the geometric exponent ladder
//! checked empirically on grid functions.
//!
//! All constant arithmetic that can overflow runs in log10 space; the
//! lower weight constant c0 = 1e8 makes the raw constants astronomically
//! large by design, and no tightening is attempted.

use serde::Serialize;

use crate::aux;
use crate::grid::{Grid, GridFunction, ParamChain};

#[derive(Debug, thiserror::Error)]
pub enum MoserError {
    #[error("alpha must be >= 1, got {alpha}")]
    AlphaBelowOne { alpha: f64 },
    #[error("alpha/rbar = {ratio} violates the lower threshold 2/3 - delta{}", if *.alpha_at_least_one { " (alpha clears the proof floor of 1 but not the headline ratio condition)" } else { "" })]
    RatioTooSmall { ratio: f64, alpha_at_least_one: bool },
    #[error("a_norm must be positive, got {0}")]
    BadANorm(f64),
    #[error("admissibility constant must be positive, got {0}")]
    BadAdmissibility(f64),
    #[error("Q measure must be positive, got {0}")]
    BadMeasure(f64),
    #[error("ladder needs m_max >= 3, got {0}")]
    BadLadderLength(usize),
    #[error("ladder requires a nonzero function")]
    ZeroFunction,
    #[error(transparent)]
    Aux(#[from] aux::AuxError),
}

/// Inputs to the bound pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemData {
    pub chain: ParamChain,
    /// measure of the space-time cylinder Q
    pub q_measure: f64,
    /// admissibility constant (estimated or supplied)
    pub c_adm: f64,
    /// norm of the structure bound a over Q
    pub a_norm: f64,
    pub alpha: f64,
    pub u_alpha_norm: f64,
}

impl ProblemData {
    pub fn new(
        chain: ParamChain,
        q_measure: f64,
        c_adm: f64,
        a_norm: f64,
        alpha: f64,
        u_alpha_norm: f64,
    ) -> Result<Self, MoserError> {
        let c = aux::constants();
        let threshold = 2.0 / 3.0 - c.delta;
        if alpha < 1.0 {
            return Err(MoserError::AlphaBelowOne { alpha });
        }
        let ratio = alpha / chain.rbar;
        if ratio <= threshold {
            // since rbar > 2 the ratio condition already implies alpha >
            // 4/3, so the proof floor alpha >= 1 never binds; inputs
            // caught here with alpha >= 1 sit in that statement gap
            return Err(MoserError::RatioTooSmall {
                ratio,
                alpha_at_least_one: true,
            });
        }
        if a_norm <= 0.0 {
            return Err(MoserError::BadANorm(a_norm));
        }
        if c_adm <= 0.0 {
            return Err(MoserError::BadAdmissibility(c_adm));
        }
        if q_measure <= 0.0 {
            return Err(MoserError::BadMeasure(q_measure));
        }
        Ok(ProblemData {
            chain,
            q_measure,
            c_adm,
            a_norm,
            alpha,
            u_alpha_norm,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.chain.r / self.chain.rbar
    }

    /// s_m = kappa^m * alpha / rbar.
    pub fn s_m(&self, m: usize) -> f64 {
        self.kappa().powi(m as i32) * self.alpha / self.chain.rbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    One,
    Two,
}

/// Case 1 iff s_0 = alpha/rbar > 1; the boundary alpha = rbar goes to
/// Case 2 (the exponent cap `s_m <= 1` is non-strict).
pub fn classify_case(d: &ProblemData) -> Case {
    if d.alpha > d.chain.rbar {
        Case::One
    } else {
        Case::Two
    }
}

/// Closed form of `sum_{j >= m0+1} kappa^-j`.
pub fn tail_sum_geo(kappa: f64, m0: usize) -> f64 {
    kappa.powi(-(m0 as i32)) / (kappa - 1.0)
}

/// Closed form of `sum_{j >= m0+1} j kappa^-j`.
pub fn tail_sum_weighted(kappa: f64, m0: usize) -> f64 {
    kappa.powi(-(m0 as i32)) * (m0 as f64 / (kappa - 1.0) + kappa / (kappa - 1.0).powi(2))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub case: u8,
    pub kappa: f64,
    /// first m_alpha + 2 ladder exponents (two entries in Case 1)
    pub s_schedule: Vec<f64>,
    pub m_alpha: Option<usize>,
    /// the square-root aggregate constant of the iteration step
    pub big_c1: f64,
    pub c1: f64,
    pub c2: f64,
    /// max of the small-exponent comparison constants (Case 2)
    pub m_const: Option<f64>,
    pub c_alpha: Option<f64>,
    pub k1: Option<f64>,
    pub k0: f64,
    /// tail sums from the iteration start index
    pub sum1: f64,
    pub sum2: f64,
    pub log10_bound: f64,
    /// natural-scale bound; +inf when it exceeds f64 range
    pub final_bound: f64,
}

/// Populate every constant of the pipeline; the bound itself is filled
/// by [`compute_bound`].
pub fn compute_constants(d: &ProblemData) -> Result<BoundReport, MoserError> {
    let c = aux::constants();
    let case = classify_case(d);
    let kappa = d.kappa();
    let big_c1 = (18.0 * d.c_adm.powi(2) * c.c0.powi(2) * (d.q_measure + 2.0) * d.a_norm + 1.0)
        .sqrt();
    let rba = d.chain.rbar / d.alpha;
    // c1 and c2 only ever enter through their logs
    let log10_c1 = rba * (big_c1.log10() + (d.alpha / d.chain.rbar).log10());
    let log10_c2 = rba * kappa.log10();

    let (s_schedule, m_alpha, m_const, c_alpha, k1, sum1, sum2) = match case {
        Case::One => (
            vec![d.s_m(0), d.s_m(1)],
            None,
            None,
            None,
            None,
            tail_sum_geo(kappa, 0),
            tail_sum_weighted(kappa, 0),
        ),
        Case::Two => {
            let mut m_alpha = 0;
            while d.s_m(m_alpha + 1) <= 1.0 {
                m_alpha += 1;
            }
            let schedule: Vec<f64> = (0..=m_alpha + 1).map(|m| d.s_m(m)).collect();
            // comparison constants for every ladder exponent still <= 1;
            // the first exponent past 1 needs none and is dropped
            let mut m_const = f64::NEG_INFINITY;
            for &s in schedule.iter().filter(|&&s| s <= 1.0) {
                m_const = m_const.max(aux::estimate_k_s(s, 1000, 1.1)?);
            }
            let c_alpha = (2.0
                * d.c_adm.powi(2)
                * c.c0
                * ((c.c0 + 10.0) + m_const * (1.0 + d.q_measure) * d.a_norm))
                .sqrt();
            let k1 = (c_alpha + (c.k0 + 1.0) * (1.0 + d.q_measure) + 2.0).powf(2.0 / d.alpha);
            (
                schedule,
                Some(m_alpha),
                Some(m_const),
                Some(c_alpha),
                Some(k1),
                tail_sum_geo(kappa, m_alpha),
                tail_sum_weighted(kappa, m_alpha),
            )
        }
    };
    let log10_bound = f64::NAN; // filled by compute_bound
    Ok(BoundReport {
        case: if case == Case::One { 1 } else { 2 },
        kappa,
        s_schedule,
        m_alpha,
        big_c1,
        c1: 10f64.powf(log10_c1),
        c2: 10f64.powf(log10_c2),
        m_const,
        c_alpha,
        k1,
        k0: c.k0,
        sum1,
        sum2,
        log10_bound,
        final_bound: f64::NAN,
    })
}

/// log10 of `sum 10^x_i` without overflow.
fn log10_sum(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms
        .iter()
        .map(|x| 10f64.powf(x - m))
        .sum::<f64>()
        .log10()
}

/// The final bound in log10 space:
/// `c1^sum1 * c2^sum2 * max(1, starting norm)`, where the starting norm
/// in Case 2 is the finite inner ladder `k1^m_alpha * ||u||_alpha +
/// sum_{i=1..m_alpha} k1^i`.
pub fn compute_bound(d: &ProblemData) -> Result<BoundReport, MoserError> {
    let mut rep = compute_constants(d)?;
    let log10_c1 = rep.c1.log10();
    let log10_c2 = rep.c2.log10();
    let log10_start = match rep.case {
        1 => {
            if d.u_alpha_norm > 0.0 {
                d.u_alpha_norm.log10().max(0.0)
            } else {
                0.0
            }
        }
        _ => {
            let m_alpha = rep.m_alpha.unwrap();
            let lk1 = rep.k1.unwrap().log10();
            let mut terms = Vec::with_capacity(m_alpha + 1);
            if d.u_alpha_norm > 0.0 {
                terms.push(m_alpha as f64 * lk1 + d.u_alpha_norm.log10());
            }
            for i in 1..=m_alpha {
                terms.push(i as f64 * lk1);
            }
            log10_sum(&terms).max(0.0)
        }
    };
    rep.log10_bound = rep.sum1 * log10_c1 + rep.sum2 * log10_c2 + log10_start;
    rep.final_bound = 10f64.powf(rep.log10_bound);
    Ok(rep)
}

/// One rung of the empirical exponent ladder.
#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    pub m: usize,
    pub p: f64,
    pub log10_norm: f64,
}

/// log10 of the L^p(Q) norm of the positive part, stable for huge p.
pub fn log10_lp_norm_pos(u: &GridFunction, grid: &Grid, p: f64) -> f64 {
    let log_meas = (grid.h * grid.h * grid.dt).log10();
    let mut terms = Vec::new();
    for k in 1..=grid.nt {
        for j in 0..grid.n {
            for i in 0..grid.n {
                if !grid.is_active(i, j) {
                    continue;
                }
                let v = u.at(k, i, j);
                if v > 0.0 {
                    terms.push(p * v.log10() + log_meas);
                }
            }
        }
    }
    log10_sum(&terms) / p
}

/// Compute the ladder of `L^(kappa^m alpha)` norms for m = 0..m_max,
/// assert each rung obeys the one-step recursion with the computed
/// constants and that the final rung stays below the certified bound.
pub fn empirical_iteration(
    u: &GridFunction,
    grid: &Grid,
    d: &ProblemData,
    m_max: usize,
) -> Result<Vec<LadderRung>, MoserError> {
    if m_max < 3 {
        return Err(MoserError::BadLadderLength(m_max));
    }
    if u.values.iter().all(|&v| v <= 0.0) {
        return Err(MoserError::ZeroFunction);
    }
    let rep = compute_bound(d)?;
    let kappa = d.kappa();
    let log10_c1 = rep.c1.log10();
    let log10_c2 = rep.c2.log10();
    let mut rungs = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let p = kappa.powi(m as i32) * d.alpha;
        rungs.push(LadderRung {
            m,
            p,
            log10_norm: log10_lp_norm_pos(u, grid, p),
        });
    }
    for m in 0..m_max {
        let step = kappa.powi(-(m as i32)) * (log10_c1 + m as f64 * log10_c2);
        let rhs = step + rungs[m].log10_norm.max(0.0);
        assert!(
            rungs[m + 1].log10_norm <= rhs + 1e-9,
            "ladder recursion violated at m = {m}"
        );
    }
    assert!(
        rungs[m_max].log10_norm <= rep.log10_bound + 1e-9,
        "ladder exceeded the certified bound"
    );
    Ok(rungs)
}
