//! Certified lower bounds for rational polynomials by recursive bisection.
//!
//! On each subinterval the polynomial is bounded from below by
//! `p(mid) - halfwidth * M` where `M` is an exact upper bound on `|p'|`
//! over the subinterval (coefficient sums against the endpoint of largest
//! magnitude). Every certificate is exact: no floating point enters.

use num_traits::{One, Signed, Zero};

use super::expr::Rat;

/// One certified leaf: `p > threshold` holds on `[lo, hi]` because the
/// recorded lower bound exceeds the threshold.
#[derive(Debug, Clone)]
pub struct CertLeaf {
    pub lo: Rat,
    pub hi: Rat,
    pub lower_bound: Rat,
}

/// Proof that `p(t) > threshold` on the certified region.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub threshold: Rat,
    pub leaves: Vec<CertLeaf>,
    pub max_depth_used: u32,
    /// Set when the claim covers all of `R`: outside `[-tail_radius,
    /// tail_radius]` the leading term dominates by the recorded margin.
    pub tail_radius: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PositivityFailure {
    /// Bisection hit `max_depth` without resolving; not a refutation.
    DepthExhausted { lo: Rat, hi: Rat },
    /// Exact rational point with `p(t) <= threshold`.
    Counterexample { t: Rat, value: Rat },
    /// Whole-line claim with non-dominating leading coefficient.
    UnboundedBelow,
}

pub fn eval_poly(coeffs: &[Rat], t: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn derivative(coeffs: &[Rat]) -> Vec<Rat> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rat::from_integer(i.into()))
        .collect()
}

/// `max(|lo|, |hi|)`, the radius bounding `|t|` on the subinterval.
fn interval_radius(lo: &Rat, hi: &Rat) -> Rat {
    let a = lo.abs();
    let b = hi.abs();
    if a > b {
        a
    } else {
        b
    }
}

/// Exact bound on `|q(t)|` for `t` in `[-radius, radius]`:
/// sum of `|c_i| * radius^i`.
fn abs_bound(coeffs: &[Rat], radius: &Rat) -> Rat {
    let mut acc = Rat::zero();
    let mut pow = Rat::one();
    for c in coeffs {
        acc += c.abs() * &pow;
        pow *= radius;
    }
    acc
}

/// Certify `p(t) > threshold` on `[lo, hi]` with exact arithmetic.
pub fn certify_positive(
    coeffs: &[Rat],
    lo: &Rat,
    hi: &Rat,
    threshold: &Rat,
    max_depth: u32,
) -> Result<Certificate, PositivityFailure> {
    assert!(lo < hi, "empty interval");
    let deriv = derivative(coeffs);
    let mut leaves = Vec::new();
    let mut max_used = 0;
    bisect(
        coeffs, &deriv, lo, hi, threshold, 0, max_depth, &mut leaves, &mut max_used,
    )?;
    Ok(Certificate {
        threshold: threshold.clone(),
        leaves,
        max_depth_used: max_used,
        tail_radius: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    coeffs: &[Rat],
    deriv: &[Rat],
    lo: &Rat,
    hi: &Rat,
    threshold: &Rat,
    depth: u32,
    max_depth: u32,
    leaves: &mut Vec<CertLeaf>,
    max_used: &mut u32,
) -> Result<(), PositivityFailure> {
    *max_used = (*max_used).max(depth);
    let two = Rat::from_integer(2.into());
    let mid = (lo + hi) / &two;
    let mid_val = eval_poly(coeffs, &mid);
    if mid_val <= *threshold {
        return Err(PositivityFailure::Counterexample {
            t: mid,
            value: mid_val,
        });
    }
    let halfwidth = (hi - lo) / &two;
    let deriv_bound = abs_bound(deriv, &interval_radius(lo, hi));
    let lower = &mid_val - &halfwidth * &deriv_bound;
    if lower > *threshold {
        leaves.push(CertLeaf {
            lo: lo.clone(),
            hi: hi.clone(),
            lower_bound: lower,
        });
        return Ok(());
    }
    if depth >= max_depth {
        return Err(PositivityFailure::DepthExhausted {
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    bisect(
        coeffs, deriv, lo, &mid, threshold, depth + 1, max_depth, leaves, max_used,
    )?;
    bisect(
        coeffs, deriv, &mid, hi, threshold, depth + 1, max_depth, leaves, max_used,
    )
}

/// Certify `p(t) > threshold` on all of `R`: the leading term dominates
/// outside an exactly computed radius, and `[-R, R]` is bisected.
pub fn certify_positive_global(
    coeffs: &[Rat],
    threshold: &Rat,
    max_depth: u32,
) -> Result<Certificate, PositivityFailure> {
    let n = coeffs.len();
    if n == 0 {
        return Err(PositivityFailure::UnboundedBelow);
    }
    let lead = &coeffs[n - 1];
    if n == 1 {
        return if lead > threshold {
            Ok(Certificate {
                threshold: threshold.clone(),
                leaves: vec![],
                max_depth_used: 0,
                tail_radius: Some(Rat::zero()),
            })
        } else {
            Err(PositivityFailure::Counterexample {
                t: Rat::zero(),
                value: lead.clone(),
            })
        };
    }
    if (n - 1) % 2 != 0 || !lead.is_positive() {
        return Err(PositivityFailure::UnboundedBelow);
    }
    // For |t| >= R >= 1 with even degree d and c_d > 0:
    //   p(t) >= |t|^(d-1) (c_d |t| - sum_{i<d} |c_i|) >= c_d R - sum |c_i|.
    // Pick R so this clears the threshold strictly.
    let lower_sum: Rat = coeffs[..n - 1].iter().map(|c| c.abs()).sum();
    let r = {
        let need = (&lower_sum + threshold + Rat::one()) / lead;
        if need > Rat::one() {
            need
        } else {
            Rat::one()
        }
    };
    let mut cert = certify_positive(coeffs, &(-r.clone()), &r, threshold, max_depth)?;
    cert.tail_radius = Some(r);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::expr::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_quartic() -> Vec<Rat> {
        vec![rat(50, 1), rat(-200, 3), rat(380, 9), rat(-40, 3), rat(2, 1)]
    }

    #[test]
    fn simple_quadratic() {
        let p = vec![rat(1, 1), rat(0, 1), rat(1, 1)]; // t^2 + 1
        let cert = certify_positive(&p, &rat(0, 1), &rat(1, 1), &rat(0, 1), 32).unwrap();
        assert!(!cert.leaves.is_empty());
    }

    #[test]
    fn quartic_above_three_on_unit_interval() {
        let cert = certify_positive(&sample_quartic(), &rat(0, 1), &rat(1, 1), &rat(3, 1), 32).unwrap();
        assert!(cert.max_depth_used <= 32);
    }

    #[test]
    fn quartic_above_three_globally() {
        // analytic floor is 32/9 > 3, attained from the sum-of-squares form
        let cert = certify_positive_global(&sample_quartic(), &rat(3, 1), 32).unwrap();
        assert!(cert.tail_radius.is_some());
        for leaf in &cert.leaves {
            assert!(leaf.lower_bound > rat(3, 1));
        }
    }

    #[test]
    fn global_detects_low_points() {
        // the quartic dips below 50 (e.g. near t = 5/3), so a threshold of
        // 50 must produce an exact counterexample
        let res = certify_positive_global(&sample_quartic(), &rat(50, 1), 40);
        assert!(matches!(
            res,
            Err(PositivityFailure::Counterexample { .. })
        ));
    }

    #[test]
    fn counterexample_found() {
        let p = vec![rat(0, 1), rat(0, 1), rat(1, 1)]; // t^2
        match certify_positive(&p, &rat(-1, 1), &rat(1, 1), &rat(0, 1), 32) {
            Err(PositivityFailure::Counterexample { t, .. }) => assert!(t == rat(0, 1)),
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn odd_degree_unbounded() {
        let p = vec![rat(0, 1), rat(1, 1)]; // t
        assert!(matches!(
            certify_positive_global(&p, &rat(0, 1), 32),
            Err(PositivityFailure::UnboundedBelow)
        ));
    }

    #[test]
    fn certificate_survives_random_sampling() {
        let p = sample_quartic();
        let thr = rat(3, 1);
        certify_positive(&p, &rat(0, 1), &rat(1, 1), &thr, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let num: i64 = rng.gen_range(0..=10_000);
            let t = rat(num, 10_000);
            assert!(eval_poly(&p, &t) > thr);
        }
    }
}
