//! Floating-point evaluators for the auxiliary function families driving
//! the iteration: the large-exponent family `F_{s,l}` (s > 1) and the
//! small-exponent family built from the cutoff `θ` (1/2 < s <= 1),
//! together with the fixed constants they generate.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AuxError {
    #[error("parameter out of range: {0}")]
    Param(String),
    #[error("{which} is singular at t = 0 for s = {s}")]
    SingularAtZero { which: &'static str, s: f64 },
}

/// Parameters of the family `F_{s,l}`: `|t|^s` capped to an affine-plus-
/// inverse branch past `|t| = l`, glued to second order.
#[derive(Debug, Clone, Copy)]
pub struct SLParams {
    pub s: f64,
    pub l: f64,
    /// `(1 - s^2) l^s`
    pub eta: f64,
    /// `s(s+1)/2 * l^(s-1)`
    pub a: f64,
    /// `s(s-1)/2 * l^(s+1)`
    pub b: f64,
}

impl SLParams {
    pub fn new(s: f64, l: f64) -> Result<Self, AuxError> {
        if !(s > 1.0) {
            return Err(AuxError::Param(format!("s must exceed 1, got {s}")));
        }
        if !(l >= 3.0) {
            return Err(AuxError::Param(format!("l must be at least 3, got {l}")));
        }
        Ok(SLParams {
            s,
            l,
            eta: (1.0 - s * s) * l.powf(s),
            a: 0.5 * s * (s + 1.0) * l.powf(s - 1.0),
            b: 0.5 * s * (s - 1.0) * l.powf(s + 1.0),
        })
    }
}

/// Parameter for the small-exponent family: `1/2 < s <= 1`.
#[derive(Debug, Clone, Copy)]
pub struct SmallSParams {
    pub s: f64,
}

impl SmallSParams {
    pub fn new(s: f64) -> Result<Self, AuxError> {
        if !(s > 0.5 && s <= 1.0) {
            return Err(AuxError::Param(format!("s must lie in (1/2, 1], got {s}")));
        }
        Ok(SmallSParams { s })
    }
}

/// Fixed constants of the small-s chain, each recomputed from its
/// defining formula by [`constants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedConstants {
    pub delta: f64,
    pub alpha0: f64,
    pub c0: f64,
    pub k0: f64,
}

/// `δ = 10⁻⁶`, `α₀ = 1 − 10⁻⁸`, `c₀ = max{1/(1−α₀), 2}`,
/// `k₀ = [3/8 · (1 + 10/3 + 5)]²`.
pub fn constants() -> FixedConstants {
    let delta: f64 = 1e-6;
    // the gap 1 - α₀ is the primitive quantity; recovering it from α₀ in
    // floating point loses 8 digits to cancellation
    let alpha0_gap: f64 = 1e-8;
    let alpha0 = 1.0 - alpha0_gap;
    let c0 = (1.0 / alpha0_gap).max(2.0);
    let k0 = (3.0_f64 / 8.0 * (1.0 + 10.0 / 3.0 + 5.0)).powi(2);
    FixedConstants {
        delta,
        alpha0,
        c0,
        k0,
    }
}

/// Member selector for the `F_{s,l}` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlFn {
    F,
    FPrime,
    FSecond,
    G,
    GPrime,
}

/// Evaluate one member of the `F_{s,l}` family.
///
/// `FSecond` is unbounded at `t = 0` when `s < 2` and returns an error
/// there; every other member is defined on all of `R`.
pub fn eval_sl(which: SlFn, p: &SLParams, t: f64) -> Result<f64, AuxError> {
    let at = t.abs();
    let sg = sign(t);
    let inner = at <= p.l;
    Ok(match which {
        SlFn::F => {
            if inner {
                at.powf(p.s)
            } else {
                p.eta + p.a * at + p.b / at
            }
        }
        SlFn::FPrime => {
            if inner {
                p.s * sg * at.powf(p.s - 1.0)
            } else {
                sg * (p.a - p.b / (at * at))
            }
        }
        SlFn::FSecond => {
            if at == 0.0 && p.s < 2.0 {
                return Err(AuxError::SingularAtZero {
                    which: "F_{s,l}''",
                    s: p.s,
                });
            }
            if inner {
                p.s * (p.s - 1.0) * at.powf(p.s - 2.0)
            } else {
                2.0 * p.b / (at * at * at)
            }
        }
        SlFn::G => {
            if inner {
                p.s * sg * at.powf(2.0 * p.s - 1.0)
            } else {
                eval_sl(SlFn::F, p, t)? * eval_sl(SlFn::FPrime, p, t)?
            }
        }
        SlFn::GPrime => {
            if inner {
                p.s * (2.0 * p.s - 1.0) * at.powf(2.0 * (p.s - 1.0))
            } else {
                let f1 = eval_sl(SlFn::FPrime, p, t)?;
                f1 * f1 + eval_sl(SlFn::F, p, t)? * eval_sl(SlFn::FSecond, p, t)?
            }
        }
    })
}

/// Member selector for the small-s family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallFn {
    Theta,
    ThetaPrime,
    ThetaSecond,
    Fs,
    FsPrime,
    FsSecond,
    Gs,
    GsPrime,
    FBar,
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Evaluate one member of the small-s family.
///
/// Members with a negative power of `|t|` in their inner branch
/// (`θ'`, `θ''`, `F_s''`, and `G_s'` for `s < 1`) error at `t = 0`.
pub fn eval_small_s(which: SmallFn, p: &SmallSParams, t: f64) -> Result<f64, AuxError> {
    let s = p.s;
    let at = t.abs();
    let sg = sign(t);
    let inner = at <= 1.0;
    let singular = |which: &'static str| AuxError::SingularAtZero { which, s };
    Ok(match which {
        SmallFn::Theta => {
            if inner {
                0.375 * at.sqrt() * (at * at - 10.0 / 3.0 * at + 5.0)
            } else {
                1.0
            }
        }
        SmallFn::ThetaPrime => {
            if inner {
                if at == 0.0 {
                    return Err(singular("θ'"));
                }
                0.375 * sg / at.sqrt() * (2.5 * t * t - 5.0 * at + 2.5)
            } else {
                0.0
            }
        }
        SmallFn::ThetaSecond => {
            if inner {
                if at == 0.0 {
                    return Err(singular("θ''"));
                }
                0.375 * at.powf(-1.5) * (3.75 * t * t - 2.5 * at - 1.25)
            } else {
                0.0
            }
        }
        SmallFn::Fs => {
            if inner {
                0.375 * at.powf(s + 0.5) * (at * at - 10.0 / 3.0 * at + 5.0)
            } else {
                at.powf(s)
            }
        }
        SmallFn::FsPrime => {
            if inner {
                0.375
                    * sg
                    * at.powf(s - 0.5)
                    * ((2.5 + s) * t * t - (5.0 + 10.0 * s / 3.0) * at + 2.5 + 5.0 * s)
            } else {
                s * sg * at.powf(s - 1.0)
            }
        }
        SmallFn::FsSecond => {
            if inner {
                if at == 0.0 {
                    return Err(singular("F_s''"));
                }
                0.375
                    * at.powf(s - 1.5)
                    * ((3.75 + 4.0 * s + s * s) * t * t
                        - (2.5 + 20.0 * s / 3.0 + 10.0 * s * s / 3.0) * at
                        - 1.25
                        + 5.0 * s * s)
            } else {
                s * (s - 1.0) * at.powf(s - 2.0)
            }
        }
        SmallFn::Gs => {
            if inner {
                (9.0 / 64.0)
                    * sg
                    * at.powf(2.0 * s)
                    * (at * at - 10.0 / 3.0 * at + 5.0)
                    * ((2.5 + s) * t * t - (5.0 + 10.0 * s / 3.0) * at + 2.5 + 5.0 * s)
            } else {
                s * sg * at.powf(2.0 * s - 1.0)
            }
        }
        SmallFn::GsPrime => {
            if inner {
                if at == 0.0 && 2.0 * s - 2.0 < 0.0 {
                    return Err(singular("G_s'"));
                }
                (9.0 / 64.0)
                    * at.powf(2.0 * s - 1.0)
                    * ((10.0 + 9.0 * s + 2.0 * s * s) * at.powi(4)
                        - (40.0 + 140.0 * s / 3.0 + 40.0 * s * s / 3.0) * at.powi(3)
                        + (190.0 / 3.0 + 950.0 * s / 9.0 + 380.0 * s * s / 9.0) * at.powi(2)
                        - (100.0 / 3.0 + 100.0 * s + 200.0 * s * s / 3.0) * at
                        + 25.0 * s
                        + 50.0 * s * s)
            } else {
                s * (2.0 * s - 1.0) * at.powf(2.0 * s - 2.0)
            }
        }
        SmallFn::FBar => {
            if inner {
                0.0
            } else {
                at
            }
        }
    })
}

/// Grid-supremum estimate of the constant `k_s` with
/// `|G_s(t)| <= k_s F_s(t)^(2 - 1/s)` on `[-1, 1]`.
///
/// The claim only asserts existence; any upper bound works downstream, so
/// the supremum over a uniform grid of `(0, 1]` is multiplied by `slack`.
/// The ratio extends continuously to 0 (the exponents cancel in `t`),
/// so sampling away from 0 loses nothing.
pub fn estimate_k_s(s: f64, grid_points: usize, slack: f64) -> Result<f64, AuxError> {
    if grid_points < 1000 {
        return Err(AuxError::Param(format!(
            "need at least 1000 grid points, got {grid_points}"
        )));
    }
    if !(slack > 1.0) {
        return Err(AuxError::Param(format!("slack must exceed 1, got {slack}")));
    }
    let p = SmallSParams::new(s)?;
    let mut max_ratio: f64 = 0.0;
    for i in 1..=grid_points {
        let t = i as f64 / grid_points as f64;
        let g = eval_small_s(SmallFn::Gs, &p, t)?.abs();
        let f = eval_small_s(SmallFn::Fs, &p, t)?;
        let ratio = g / f.powf(2.0 - 1.0 / s);
        if ratio.is_finite() {
            max_ratio = max_ratio.max(ratio);
        }
    }
    Ok(slack * max_ratio)
}
