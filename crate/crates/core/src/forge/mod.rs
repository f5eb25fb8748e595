//! Degenerate and non-uniform weight constructions: the annular
//! non-doubling weight (closed-form masses in log-scale arithmetic) and
//! the boundary-distance weight, with their integrability checks.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::grid::{Grid, ParamChain, WeightField};

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error("beta must be >= 2, got {0}")]
    BadBeta(u32),
    #[error("k range must start at 5 and reach at least 5, got K = {0}")]
    BadKRange(u32),
    #[error("k = {0} outside the configured range")]
    KOutOfRange(u32),
    #[error("gamma must lie in (0,1), got {0}")]
    BadGamma(f64),
    #[error("weight vanishes at cell {0}; inverse integral undefined")]
    ZeroWeightCell(usize),
    #[error("exponent schedule must be strictly increasing")]
    BadSchedule,
}

/// Signed magnitude held as `sign * 2^(e + f)` with an arbitrary-precision
/// integer exponent `e` and fractional part `f` in [0,1). Arithmetic on
/// values whose logarithms differ by astronomical amounts stays exact in
/// the dominant term.
#[derive(Debug, Clone, PartialEq)]
pub struct LogScalar {
    sign: i8,
    e: BigInt,
    f: f64,
}

impl LogScalar {
    pub fn zero() -> Self {
        LogScalar {
            sign: 0,
            e: BigInt::zero(),
            f: 0.0,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        let sign = if x > 0.0 { 1 } else { -1 };
        let l = x.abs().log2();
        Self::from_log2(BigInt::zero(), l).with_sign(sign)
    }

    /// Positive value `2^(e + f)`; `f` may be any finite real.
    pub fn from_log2(e: BigInt, f: f64) -> Self {
        let fl = f.floor();
        LogScalar {
            sign: 1,
            e: e + BigInt::from(fl as i64),
            f: f - fl,
        }
    }

    fn with_sign(mut self, sign: i8) -> Self {
        if self.sign != 0 {
            self.sign = sign;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// log2 of the magnitude, approximated as f64 (may overflow to inf
    /// for gigantic exponents; the exact parts stay available).
    pub fn log2_approx(&self) -> f64 {
        self.e
            .to_f64()
            .unwrap_or(if self.e.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            })
            + self.f
    }

    pub fn log2_parts(&self) -> (&BigInt, f64) {
        (&self.e, self.f)
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let l = self.log2_approx();
        self.sign as f64 * l.exp2()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::zero();
        }
        Self::from_log2(&self.e + &other.e, self.f + other.f).with_sign(self.sign * other.sign)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(other.sign != 0, "division by zero");
        if self.sign == 0 {
            return Self::zero();
        }
        Self::from_log2(&self.e - &other.e, self.f - other.f).with_sign(self.sign * other.sign)
    }

    /// Scale by an exact power of two.
    pub fn scale_exp2(&self, m: i64) -> Self {
        if self.sign == 0 {
            return Self::zero();
        }
        let mut out = self.clone();
        out.e += m;
        out
    }

    fn cmp_magnitude(&self, other: &Self) -> std::cmp::Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            _ => (&self.e, self.f)
                .partial_cmp(&(&other.e, other.f))
                .unwrap(),
        }
    }

    /// Magnitude comparison of positives; panics on mixed signs to keep
    /// semantics obvious at call sites.
    pub fn ge(&self, other: &Self) -> bool {
        assert!(self.sign >= 0 && other.sign >= 0);
        self.cmp_magnitude(other) != std::cmp::Ordering::Less
    }

    /// Stable addition: factor out the larger magnitude; a term more than
    /// 2^64 times smaller cannot move the result at f64 resolution.
    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return other.clone();
        }
        if other.sign == 0 {
            return self.clone();
        }
        let (big, small) = if self.cmp_magnitude(other) == std::cmp::Ordering::Less {
            (other, self)
        } else {
            (self, other)
        };
        let diff_e = &big.e - &small.e;
        let diff = match diff_e.to_f64() {
            Some(d) if d < 128.0 => d + big.f - small.f,
            _ => return big.clone(),
        };
        if diff > 64.0 {
            return big.clone();
        }
        let ratio = (-diff).exp2(); // |small| / |big| in (0, 1]
        if big.sign == small.sign {
            Self::from_log2(big.e.clone(), big.f + (1.0 + ratio).log2()).with_sign(big.sign)
        } else if (1.0 - ratio).abs() < 1e-300 {
            Self::zero()
        } else {
            Self::from_log2(big.e.clone(), big.f + (1.0 - ratio).log2()).with_sign(big.sign)
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.clone().with_sign(-other.sign))
    }
}

/// Volume of the unit ball in dimension N (recurrence in N-2).
pub fn unit_ball_volume(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// The genuine construction: radius exponent e(k) = k^(4 k beta).
    Steep,
    /// Rasterizable stand-in with e(k) = k; not the analyzed weight, only
    /// for solver experiments.
    Toy,
}

/// The annular weight: value k^(4k) on the shell between r_k and 2 r_k
/// around x_k, value 1 elsewhere, with r_k = 2^(-e(k)).
#[derive(Debug, Clone)]
pub struct AnnularWeightSpec {
    pub n: u32,
    pub beta: u32,
    pub k_max: u32,
    pub schedule: Schedule,
    pub centers: Vec<(f64, f64)>,
}

fn halton(index: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

impl AnnularWeightSpec {
    pub fn new(n: u32, beta: u32, k_max: u32, schedule: Schedule) -> Result<Self, ForgeError> {
        if beta < 2 {
            return Err(ForgeError::BadBeta(beta));
        }
        if k_max < 5 {
            return Err(ForgeError::BadKRange(k_max));
        }
        // low-discrepancy centers inside the unit square, one per k
        let centers = (5..=k_max)
            .map(|k| (halton(k, 2), halton(k, 3)))
            .collect();
        let spec = AnnularWeightSpec {
            n,
            beta,
            k_max,
            schedule,
            centers,
        };
        let mut prev: Option<BigInt> = None;
        for k in 5..=k_max {
            let e = spec.exponent(k)?;
            if let Some(p) = prev {
                if e <= p {
                    return Err(ForgeError::BadSchedule);
                }
            }
            prev = Some(e);
        }
        Ok(spec)
    }

    pub fn k_range(&self) -> std::ops::RangeInclusive<u32> {
        5..=self.k_max
    }

    /// The radius exponent e(k): r_k = 2^(-e(k)).
    pub fn exponent(&self, k: u32) -> Result<BigInt, ForgeError> {
        if !self.k_range().contains(&k) {
            return Err(ForgeError::KOutOfRange(k));
        }
        Ok(match self.schedule {
            Schedule::Steep => BigInt::from(k).pow(4 * k * self.beta),
            Schedule::Toy => BigInt::from(k),
        })
    }

    /// Ball volume sigma_N * r_k^N as a log-scale value.
    pub fn ball_mass(&self, k: u32) -> Result<LogScalar, ForgeError> {
        let e = self.exponent(k)?;
        Ok(LogScalar::from_log2(
            -e * BigInt::from(self.n),
            unit_ball_volume(self.n).log2(),
        ))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingReport {
    pub k: u32,
    /// log2 of r_k as a string (the exponent exceeds any float)
    pub log2_r_k: String,
    pub log2_ratio: f64,
    pub lower_bound: f64,
    /// log2 of ratio / lower_bound
    pub margin: f64,
}

/// Analytic lower bound 3 / (2^N (k^-2 + 8 k^-3 + 2 k^-4k)).
pub fn doubling_lower_bound(n: u32, k: u32) -> f64 {
    let kf = k as f64;
    let tail = kf.powi(-2) + 8.0 * kf.powi(-3) + 2.0 * kf.powf(-4.0 * kf);
    3.0 / ((1u64 << n) as f64 * tail)
}

/// Mass ratio of the doubled ball to the ball at the k-th annulus,
/// computed from closed-form masses: the annulus alone gives the doubled
/// ball at least (2^N - 1) k^(4k) v_k, while the small ball carries at
/// most its own Lebesgue mass plus the three partial-sum estimates for
/// the other annuli. Asserts the ratio clears the analytic bound.
pub fn doubling_report(spec: &AnnularWeightSpec, k: u32) -> Result<DoublingReport, ForgeError> {
    let v_k = spec.ball_mass(k)?;
    let kf = k as f64;
    let weight = LogScalar::from_log2(BigInt::zero(), 4.0 * kf * kf.log2()); // k^(4k)
    let shells = (1i64 << spec.n) - 1;
    let doubled_lower = v_k
        .mul(&weight)
        .mul(&LogScalar::from_f64(shells as f64));

    // small-ball upper estimate: own annulus cap, coarser annuli overlap,
    // finer annuli total mass -- the three partial-sum terms
    let base = v_k.mul(&weight).scale_exp2(spec.n as i64);
    let term_coarse = base.mul(&LogScalar::from_f64(kf.powi(-2)));
    let term_mid = base.mul(&LogScalar::from_f64(8.0 * kf.powi(-3)));
    let term_fine = v_k.mul(&LogScalar::from_f64(1.0 + (1u64 << spec.n) as f64));
    let ball_upper = term_coarse.add(&term_mid).add(&term_fine);

    let ratio = doubled_lower.div(&ball_upper);
    let lower_bound = doubling_lower_bound(spec.n, k);
    // ratio >= bound holds term by term after cancelling k^(4k) v_k:
    //   (2^N - 1) >= 3  and  (1 + 2^N) k^-4k <= 2 * 2^N k^-4k.
    // The slack is ~k^-4k relative, far below f64 resolution, so compare
    // the cancelled denominators instead of the log-space values.
    let two_n = (1u64 << spec.n) as f64;
    let den_ratio = two_n * (kf.powi(-2) + 8.0 * kf.powi(-3)) + (1.0 + two_n) * kf.powf(-4.0 * kf);
    let den_bound = two_n * (kf.powi(-2) + 8.0 * kf.powi(-3) + 2.0 * kf.powf(-4.0 * kf));
    assert!(shells as f64 >= 3.0 && den_ratio <= den_bound,
        "doubling ratio fell below the analytic bound at k = {k}"
    );
    let log2_ratio = ratio.log2_approx();
    Ok(DoublingReport {
        k,
        log2_r_k: format!("-{}", spec.exponent(k)?),
        log2_ratio,
        lower_bound,
        margin: log2_ratio - lower_bound.log2(),
    })
}

/// Doubling ratio of the weight with no annuli at all: plain Lebesgue
/// measure, ratio exactly 2^N.
pub fn doubling_ratio_unweighted(n: u32) -> f64 {
    (1u64 << n) as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct MassCheck {
    pub k: u32,
    pub pass: bool,
    /// log2(bound) - log2(mass); positive means the bound holds
    pub margin_log2: f64,
}

/// Verifies in log2 space that the weighted mass of the doubled ball,
/// k^(4 beta k) * 2^N * v_k, stays below 2^N * sigma_N * 2^(-k), which
/// sums over k: the weight is locally beta-integrable.
pub fn lbeta_mass_check(spec: &AnnularWeightSpec, k: u32) -> Result<MassCheck, ForgeError> {
    let e = spec.exponent(k)?;
    let kf = k as f64;
    let n = BigInt::from(spec.n);
    let sigma_log = unit_ball_volume(spec.n).log2();
    // lhs: 4 beta k log2 k + N + log2 sigma_N - N e(k)
    let lhs = LogScalar::from_log2(
        -&e * &n + BigInt::from(spec.n),
        4.0 * spec.beta as f64 * kf * kf.log2() + sigma_log,
    );
    // rhs: N + log2 sigma_N - k
    let rhs = LogScalar::from_log2(
        BigInt::from(spec.n) - BigInt::from(k),
        sigma_log,
    );
    let (le, lf) = lhs.log2_parts();
    let (re, rf) = rhs.log2_parts();
    let margin = (re - le).to_f64().unwrap_or(f64::INFINITY) + (rf - lf);
    Ok(MassCheck {
        k,
        pass: rhs.ge(&lhs),
        margin_log2: margin,
    })
}

/// Boundary-distance weight b(x) = dist(x, boundary)^gamma.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistanceWeightSpec {
    pub gamma: f64,
    /// constant upper weight paired with b on the remaining axes
    pub bbar: f64,
}

impl DistanceWeightSpec {
    pub fn new(gamma: f64, bbar: f64) -> Result<Self, ForgeError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(ForgeError::BadGamma(gamma));
        }
        Ok(DistanceWeightSpec { gamma, bbar })
    }
}

/// Per-cell b = dist(center, boundary)^gamma with the diagonal matrix
/// diag(b, bbar). Cell centers never sit on the boundary, so b > 0.
pub fn build_distance_weight(spec: &DistanceWeightSpec, grid: &Grid) -> WeightField {
    let mut w = WeightField::identity(grid);
    for j in 0..grid.n {
        for i in 0..grid.n {
            let cell = grid.idx(i, j);
            if !grid.active[cell] {
                continue;
            }
            let (x, y) = grid.center(i, j);
            let b = grid.domain.distance_to_boundary(x, y).max(0.0).powf(spec.gamma);
            w.b[cell] = b.min(spec.bbar);
            w.bbar[cell] = spec.bbar.max(b);
            w.bmat[cell] = [b, 0.0, spec.bbar];
        }
    }
    w
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseIntegrabilityReport {
    pub exponent: f64,
    pub integral: f64,
    /// analytic criterion gamma * tbar / (2 - tbar) < 1, when a distance
    /// weight exponent is supplied
    pub analytic_pass: Option<bool>,
    pub pass: bool,
}

/// Discrete integral of b^(-tbar/(2-tbar)) over the active cells, with
/// the closed-form boundary-layer criterion for distance weights.
pub fn check_inverse_integrability(
    w: &WeightField,
    grid: &Grid,
    chain: &ParamChain,
    gamma: Option<f64>,
) -> Result<InverseIntegrabilityReport, ForgeError> {
    let q = chain.tbar / (2.0 - chain.tbar);
    let cell_area = grid.h * grid.h;
    let mut integral = 0.0;
    for (cell, &active) in grid.active.iter().enumerate() {
        if !active {
            continue;
        }
        if w.b[cell] <= 0.0 {
            return Err(ForgeError::ZeroWeightCell(cell));
        }
        integral += w.b[cell].powf(-q) * cell_area;
    }
    let analytic_pass = gamma.map(|g| g * q < 1.0);
    Ok(InverseIntegrabilityReport {
        exponent: gamma.map_or(q, |g| g * q),
        integral,
        analytic_pass,
        pass: analytic_pass.unwrap_or(integral.is_finite()),
    })
}
