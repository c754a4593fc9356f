//! Exact polynomials with rational coefficients in the series ratio
//! `t = 2^(-alpha)`.
//!
//! Partial-sum values of the function and the slopes of its linear pieces
//! are elements of `Q[t]`, so comparisons between them can be decided
//! exactly: interval evaluation resolves the sign in almost every case,
//! and for rational `alpha = p/q` a reduction through `t^q = 2^(-p)`
//! decides exact ties (`x^q - 2^(-p)` is irreducible for gcd(p, q) = 1,
//! hence a nonzero reduced polynomial cannot vanish at `t`).

use crate::real::{two_pow, RealBound};
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Polynomial `sum_j coeffs[j] * t^j` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPoly {
    coeffs: Vec<Rational>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            TPoly { coeffs: vec![c] }
        }
    }

    /// `c * t^j`.
    pub fn monomial(c: Rational, j: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); j + 1];
        coeffs[j] = c;
        TPoly { coeffs }
    }

    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add_coeff(&mut self, j: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if self.coeffs.len() <= j {
            self.coeffs.resize(j + 1, Rational::zero());
        }
        self.coeffs[j] += c;
    }

    fn trim(mut self) -> Self {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            coeffs.push(self.coeff(j) + o.coeff(j));
        }
        TPoly { coeffs }.trim()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        TPoly {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact multiplication by `t^j`.
    pub fn shift_up(&self, j: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); j];
        coeffs.extend(self.coeffs.iter().cloned());
        TPoly { coeffs }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        TPoly { coeffs }.trim()
    }

    /// Horner evaluation at an interval base.
    pub fn eval(&self, base: &RealBound, prec: u32) -> RealBound {
        let mut acc = RealBound::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(base, prec);
            if !c.is_zero() {
                acc = acc.add(&RealBound::from_rational(c, prec), prec);
            }
        }
        acc
    }

    /// Evaluation against a precomputed power table (`pows[j]` encloses
    /// `base^j`).
    pub fn eval_powers(&self, pows: &[RealBound], prec: u32) -> RealBound {
        let mut acc = RealBound::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&pows[j].mul_rational(c, prec), prec);
        }
        acc
    }

    /// Reduces through `t^q = 2^(-p)` for `alpha = p/q` in lowest terms,
    /// returning the residual polynomial of degree `< q`. Zero iff the
    /// value vanishes exactly at `t = 2^(-alpha)`.
    fn reduce_at(&self, alpha: &Rational) -> TPoly {
        let p = alpha
            .numer()
            .to_u64()
            .expect("alpha numerator does not fit in u64");
        let q = alpha
            .denom()
            .to_u64()
            .expect("alpha denominator does not fit in u64");
        let mut res = TPoly::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = j as u64 / q;
            let s = (j as u64 % q) as usize;
            // t^j = 2^(-p d) * t^s
            let scale = Rational::new(BigInt::one(), BigInt::one() << (p * d));
            res.add_coeff(s, &(c * scale));
        }
        res.trim()
    }

    /// Exact sign of the value at `t = 2^(-alpha)`, `alpha` rational in
    /// (0, 1). Interval evaluation with escalating precision; the
    /// algebraic reduction decides exact ties, which also guarantees the
    /// escalation terminates.
    pub fn sign_at(&self, alpha: &Rational, start_prec: u32) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let reduced = self.reduce_at(alpha);
        if reduced.is_zero() {
            return Ordering::Equal;
        }
        let mut prec = start_prec.max(32);
        loop {
            let t = two_pow(&-alpha.clone(), prec);
            let v = reduced.eval(&t, prec);
            if let Some(s) = v.sign_definite() {
                return s;
            }
            prec *= 2;
            assert!(
                prec <= 1 << 22,
                "sign_at failed to converge on a provably nonzero value"
            );
        }
    }

    /// Exact comparison of two polynomial values at `t = 2^(-alpha)`.
    pub fn cmp_at(&self, o: &Self, alpha: &Rational, prec: u32) -> Ordering {
        self.sub(o).sign_at(alpha, prec)
    }

    pub fn eq_rational(&self, r: &Rational, alpha: &Rational) -> bool {
        self.sub(&TPoly::constant(r.clone())).sign_at(alpha, 64) == Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn eval_matches_rational_substitution() {
        let mut p = TPoly::zero();
        p.add_coeff(0, &ratio(1, 3));
        p.add_coeff(1, &ratio(1, 2));
        p.add_coeff(3, &ratio(-2, 1));
        let t = RealBound::from_rational(&ratio(1, 4), 96);
        let v = p.eval(&t, 96);
        let want = ratio(1, 3) + ratio(1, 8) - ratio(2, 64);
        assert!(v.contains_rational(&want));
        assert!(v.width().log2_f64() < -80.0);
    }

    #[test]
    fn eval_powers_agrees_with_horner() {
        let mut p = TPoly::zero();
        p.add_coeff(0, &ratio(-3, 7));
        p.add_coeff(2, &ratio(5, 11));
        p.add_coeff(4, &ratio(1, 13));
        let base = RealBound::from_rational(&ratio(3, 5), 96);
        let mut pows = vec![RealBound::one()];
        for _ in 0..4 {
            pows.push(pows.last().unwrap().mul(&base, 96));
        }
        let a = p.eval(&base, 96);
        let b = p.eval_powers(&pows, 96);
        // the two enclosures overlap around the true value
        assert!(a.lo <= b.hi && b.lo <= a.hi);
    }

    #[test]
    fn sign_at_detects_exact_tie() {
        // 2 t^2 - 1 vanishes exactly at alpha = 1/2
        let mut p = TPoly::zero();
        p.add_coeff(2, &ratio(2, 1));
        p.add_coeff(0, &ratio(-1, 1));
        assert_eq!(p.sign_at(&ratio(1, 2), 64), Ordering::Equal);
        assert_eq!(p.sign_at(&ratio(3, 10), 64), Ordering::Greater);
        assert_eq!(p.sign_at(&ratio(7, 10), 64), Ordering::Less);
    }

    #[test]
    fn reduce_handles_high_degrees() {
        // t^5 at alpha = 1/2: t^4 = 1/4, so t^5 = t/4
        let p = TPoly::monomial(ratio(1, 1), 5);
        let q = p.reduce_at(&ratio(1, 2));
        assert_eq!(q.coeff(1), ratio(1, 4));
        assert_eq!(q.degree(), Some(1));
    }
}
