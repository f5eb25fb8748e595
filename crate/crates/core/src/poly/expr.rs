//! Exact symbolic expressions of the form `c(s) * sign(t)^j * |t|^(a*s+q)`.
//!
//! `Expr` is the carrier for every identity check in the auxiliary-function
//! layer: coefficients are polynomials in the parameter `s` with rational
//! coefficients, exponents of `|t|` are affine in `s`, and `sign(t)` is
//! tracked as an explicit factor with the rewrite `sign(t)^2 = 1`.
//! Canonical form merges terms sharing `(sign_power, a, q)` and drops zero
//! coefficients, so structural equality is semantic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar, always reduced with positive denominator
/// (`BigRational` maintains both invariants).
pub type Rat = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Polynomial in the parameter `s` with rational coefficients, dense
/// ascending order. Zero is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SPoly(pub Vec<Rat>);

impl SPoly {
    pub fn zero() -> Self {
        SPoly(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            SPoly(vec![c])
        }
    }

    /// The monomial `c * s^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        SPoly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn trim(mut v: Vec<Rat>) -> Self {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
        SPoly(v)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![Rat::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] += c;
        }
        Self::trim(v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::trim(v)
    }

    pub fn neg(&self) -> Self {
        SPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SPoly(self.0.iter().map(|x| x * c).collect())
    }

    /// Exact evaluation at a rational `s`.
    pub fn eval_rat(&self, s: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * s + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Constant coefficient if the polynomial is constant in `s`.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.0.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }
}

/// Key identifying a canonical term: `sign(t)^sign_pow * |t|^(a*s + q)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub sign_pow: u8,
    pub exp_s_coeff: Rat,
    pub exp_const: Rat,
}

/// Canonical sum of terms `coeff(s) * sign(t)^j * |t|^(a*s+q)`.
///
/// Always canonical: construction and every operation merge duplicate keys
/// and remove zero coefficients. `expand_collect` is therefore a no-op on
/// values of this type; it exists as the public entry point for callers
/// holding unsimplified combinations (see [`Expr::canonicalize`]).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Expr {
    terms: BTreeMap<TermKey, SPoly>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &SPoly)> {
        self.terms.iter()
    }

    /// Single term `coeff(s) * sign(t)^sign_pow * |t|^(a*s+q)`.
    pub fn term(coeff: SPoly, sign_pow: u8, exp_s_coeff: Rat, exp_const: Rat) -> Self {
        let mut e = Expr::zero();
        if !coeff.is_zero() {
            e.terms.insert(
                TermKey {
                    sign_pow: sign_pow % 2,
                    exp_s_coeff,
                    exp_const,
                },
                coeff,
            );
        }
        e
    }

    /// Rational constant.
    pub fn constant(c: Rat) -> Self {
        Self::term(SPoly::constant(c), 0, Rat::zero(), Rat::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n, 1))
    }

    /// The monomial `t^n` (`n >= 0`), i.e. `sign(t)^n |t|^n`.
    pub fn t_pow(n: u32) -> Self {
        Self::term(
            SPoly::constant(Rat::one()),
            (n % 2) as u8,
            Rat::zero(),
            rat(n as i64, 1),
        )
    }

    /// `|t|^q` for rational `q`.
    pub fn abs_t_pow(q: Rat) -> Self {
        Self::term(SPoly::constant(Rat::one()), 0, Rat::zero(), q)
    }

    /// `|t|^(a*s + q)`.
    pub fn abs_t_spow(a: Rat, q: Rat) -> Self {
        Self::term(SPoly::constant(Rat::one()), 0, a, q)
    }

    /// The factor `sign(t)`.
    pub fn sign_t() -> Self {
        Self::term(SPoly::constant(Rat::one()), 1, Rat::zero(), Rat::zero())
    }

    /// The parameter `s` as a coefficient polynomial.
    pub fn s() -> Self {
        Self::term(SPoly::monomial(Rat::one(), 1), 0, Rat::zero(), Rat::zero())
    }

    /// Coefficient-only expression `p(s)`.
    pub fn s_poly(p: SPoly) -> Self {
        Self::term(p, 0, Rat::zero(), Rat::zero())
    }

    /// Merge duplicate `(sign_power, a, q)` keys and drop zero coefficients.
    /// The canonical form of plain polynomials is exactly the collected
    /// coefficient list in `t`.
    pub fn canonicalize(self) -> Self {
        // `Expr` maintains canonical form on every operation; rebuilding
        // from terms revalidates the invariant for deserialized input.
        let mut out = Expr::zero();
        for (k, c) in self.terms {
            out.add_term(k, c);
        }
        out
    }

    fn add_term(&mut self, key: TermKey, coeff: SPoly) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert_with(SPoly::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, c: Rat) -> Self {
        let mut out = Expr::zero();
        for (k, p) in &self.terms {
            out.add_term(k.clone(), p.scale(&c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Expr::int(1);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Term-wise derivative in `t` on the open half-lines `t != 0`:
    /// `d/dt [c(s) sign^j |t|^e] = c(s) (a s + q) sign^(j+1) |t|^(e-1)`.
    pub fn differentiate(&self) -> Self {
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            // multiply coefficient by the affine exponent a*s + q
            let exp_poly = SPoly::trim_pair(k.exp_const.clone(), k.exp_s_coeff.clone());
            let coeff = c.mul(&exp_poly);
            out.add_term(
                TermKey {
                    sign_pow: (k.sign_pow + 1) % 2,
                    exp_s_coeff: k.exp_s_coeff.clone(),
                    exp_const: &k.exp_const - Rat::one(),
                },
                coeff,
            );
        }
        out
    }

    /// Substitute an exact rational value for `s`, collapsing coefficients
    /// to constants and exponents to plain rationals.
    pub fn substitute_s(&self, s: &Rat) -> Self {
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            let coeff = SPoly::constant(c.eval_rat(s));
            out.add_term(
                TermKey {
                    sign_pow: k.sign_pow,
                    exp_s_coeff: Rat::zero(),
                    exp_const: &k.exp_const + &k.exp_s_coeff * s,
                },
                coeff,
            );
        }
        out
    }

    /// Multiply by `|t|^(-(a*s+q))` (exponent shift); exact on `t != 0`.
    pub fn shift_abs_exponent(&self, a: &Rat, q: &Rat) -> Self {
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            out.add_term(
                TermKey {
                    sign_pow: k.sign_pow,
                    exp_s_coeff: &k.exp_s_coeff - a,
                    exp_const: &k.exp_const - q,
                },
                c.clone(),
            );
        }
        out
    }

    /// Numeric evaluation at `(s, t)`. Exact structure, floating result.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let at = t.abs();
        let sg = if t > 0.0 {
            1.0
        } else if t < 0.0 {
            -1.0
        } else {
            0.0
        };
        let mut acc = 0.0;
        for (k, c) in &self.terms {
            let e = k.exp_s_coeff.to_f64().unwrap() * s + k.exp_const.to_f64().unwrap();
            let base = if at == 0.0 && e == 0.0 { 1.0 } else { at.powf(e) };
            let sfac = if k.sign_pow == 1 { sg } else { 1.0 };
            acc += c.eval_f64(s) * sfac * base;
        }
        acc
    }

    /// Interpret as a plain univariate polynomial in `t`: every term must
    /// have `a = 0`, a non-negative integer exponent `q`, `sign_pow == q mod 2`
    /// (so the term is a monomial `t^q`), and an `s`-free coefficient.
    /// Returns ascending coefficients.
    pub fn as_t_polynomial(&self) -> Option<Vec<Rat>> {
        let mut coeffs: Vec<Rat> = Vec::new();
        for (k, c) in &self.terms {
            if !k.exp_s_coeff.is_zero() || !k.exp_const.is_integer() || k.exp_const.is_negative() {
                return None;
            }
            let deg = k.exp_const.to_integer().to_usize()?;
            if (deg % 2) as u8 != k.sign_pow {
                return None;
            }
            let c = c.as_constant()?;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, Rat::zero());
            }
            coeffs[deg] += c;
            // duplicate degrees cannot occur in canonical form
        }
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Some(coeffs)
    }

    /// Interpret as a polynomial in `s` alone (all exponents zero, no sign
    /// factor). Returns ascending coefficients.
    pub fn as_s_polynomial(&self) -> Option<Vec<Rat>> {
        let mut acc = SPoly::zero();
        for (k, c) in &self.terms {
            if k.sign_pow != 0 || !k.exp_s_coeff.is_zero() || !k.exp_const.is_zero() {
                return None;
            }
            acc = acc.add(c);
        }
        Some(acc.0)
    }

    /// Build a plain polynomial in `t` from ascending coefficients.
    pub fn from_t_coeffs(coeffs: &[Rat]) -> Self {
        let mut e = Expr::zero();
        for (deg, c) in coeffs.iter().enumerate() {
            e = &e + &Expr::t_pow(deg as u32).scale(c.clone());
        }
        e
    }
}

impl SPoly {
    /// Affine polynomial `q + a*s` as an `SPoly`.
    fn trim_pair(q: Rat, a: Rat) -> Self {
        Self::trim(vec![q, a])
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, other: &Expr) -> Expr {
        self + &(-other)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        let mut out = Expr::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.neg());
        }
        out
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, other: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(
                    TermKey {
                        sign_pow: (ka.sign_pow + kb.sign_pow) % 2,
                        exp_s_coeff: &ka.exp_s_coeff + &kb.exp_s_coeff,
                        exp_const: &ka.exp_const + &kb.exp_const,
                    },
                    ca.mul(cb),
                );
            }
        }
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "(")?;
            let mut cf = true;
            for (i, coef) in c.0.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                if !cf {
                    write!(f, " + ")?;
                }
                cf = false;
                match i {
                    0 => write!(f, "{coef}")?,
                    1 => write!(f, "{coef}*s")?,
                    _ => write!(f, "{coef}*s^{i}")?,
                }
            }
            write!(f, ")")?;
            if k.sign_pow == 1 {
                write!(f, "*sign(t)")?;
            }
            if !k.exp_s_coeff.is_zero() || !k.exp_const.is_zero() {
                write!(f, "*|t|^({}*s+{})", k.exp_s_coeff, k.exp_const)?;
            }
        }
        Ok(())
    }
}

/// Expand and collect into canonical form. For plain polynomials the result
/// is the collected coefficient list in the main variable.
pub fn expand_collect(e: &Expr) -> Expr {
    e.clone().canonicalize()
}

/// Term-wise derivative in `t`, canonicalized.
pub fn differentiate(e: &Expr) -> Expr {
    e.differentiate()
}

/// Exact structural equality of canonical forms.
pub fn equal_exact(a: &Expr, b: &Expr) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsq_minus() -> Expr {
        // (t - 1)^2
        (&Expr::t_pow(1) - &Expr::int(1)).pow(2)
    }

    #[test]
    fn binomial_expansion() {
        let want = &(&Expr::t_pow(2) - &Expr::t_pow(1).scale(rat(2, 1))) + &Expr::int(1);
        assert!(equal_exact(&tsq_minus(), &want));
    }

    #[test]
    fn sum_of_squares_expansion_matches_quartic() {
        // 2(t^2 - 10/3 t + 1)^2 + 16(t - 5/3)^2 - 16(5/3)^2 + 48
        let q1 = &(&Expr::t_pow(2) - &Expr::t_pow(1).scale(rat(10, 3))) + &Expr::int(1);
        let q2 = &Expr::t_pow(1) - &Expr::constant(rat(5, 3));
        let lhs = &(&q1.pow(2).scale(rat(2, 1)) + &q2.pow(2).scale(rat(16, 1)))
            + &Expr::constant(rat(-400, 9) + rat(48, 1));
        let rhs = Expr::from_t_coeffs(&[
            rat(50, 1),
            rat(-200, 3),
            rat(380, 9),
            rat(-40, 3),
            rat(2, 1),
        ]);
        assert!(equal_exact(&lhs, &rhs));
    }

    #[test]
    fn quartic_scaled_square() {
        // 11(t^2 - 30/11 t + 2)^2 = 11t^4 - 60t^3 + 1384/11 t^2 - 120t + 44
        let q = &(&Expr::t_pow(2) - &Expr::t_pow(1).scale(rat(30, 11))) + &Expr::int(2);
        let lhs = q.pow(2).scale(rat(11, 1));
        let rhs = Expr::from_t_coeffs(&[
            rat(44, 1),
            rat(-120, 1),
            rat(1384, 11),
            rat(-60, 1),
            rat(11, 1),
        ]);
        assert!(equal_exact(&lhs, &rhs));
    }

    #[test]
    fn derivative_of_t_squared() {
        let d = differentiate(&Expr::t_pow(2));
        assert!(equal_exact(&d, &Expr::t_pow(1).scale(rat(2, 1))));
    }

    #[test]
    fn derivative_of_abs_t_to_s() {
        // d/dt |t|^s = s sign(t) |t|^(s-1)
        let d = differentiate(&Expr::abs_t_spow(rat(1, 1), rat(0, 1)));
        let want = Expr::term(
            SPoly::monomial(Rat::one(), 1),
            1,
            rat(1, 1),
            rat(-1, 1),
        );
        assert!(equal_exact(&d, &want));
    }

    #[test]
    fn sign_squared_collapses() {
        let s2 = Expr::sign_t().pow(2);
        assert!(equal_exact(&s2, &Expr::int(1)));
    }

    #[test]
    fn not_equal_when_constant_differs() {
        let a = &Expr::t_pow(2) + &Expr::int(1);
        assert!(!equal_exact(&Expr::t_pow(2), &a));
    }

    #[test]
    fn derivative_commutes_with_canonicalization() {
        let e = &tsq_minus() * &Expr::abs_t_spow(rat(1, 1), rat(1, 2));
        let a = differentiate(&expand_collect(&e));
        let b = expand_collect(&differentiate(&e));
        assert!(equal_exact(&a, &b));
    }

    #[test]
    fn substitute_s_collapses_exponents() {
        // |t|^(2s-1) at s = 2/3 -> |t|^(1/3)
        let e = Expr::abs_t_spow(rat(2, 1), rat(-1, 1));
        let sub = e.substitute_s(&rat(2, 3));
        assert!(equal_exact(&sub, &Expr::abs_t_pow(rat(1, 3))));
    }

    #[test]
    fn eval_matches_closed_form() {
        // (3/8)|t|^(s+1/2)(t^2 - 10/3|t| + 5) at s=1, t=-1/2
        let poly = &(&(&Expr::t_pow(2) - &Expr::abs_t_pow(rat(1, 1)).scale(rat(10, 3)))
            + &Expr::int(5))
            * &Expr::abs_t_spow(rat(1, 1), rat(1, 2)).scale(rat(3, 8));
        let t: f64 = -0.5;
        let want = 3.0 / 8.0 * 0.5_f64.powf(1.5) * (0.25 - 10.0 / 3.0 * 0.5 + 5.0);
        assert!((poly.eval(1.0, t) - want).abs() < 1e-14);
    }
}
