//! Exact dyadic floating-point numbers (`mant * 2^exp` with a big-integer
//! mantissa) and directed-rounding interval arithmetic built on them.
//!
//! Addition, subtraction and multiplication of [`DyadicFloat`]s are exact;
//! rounding happens only where requested, always with an explicit
//! direction. [`RealBound`] is a closed interval `[lo, hi]` whose
//! endpoints are rounded outward, so every interval result encloses the
//! true real value. The transcendental helpers (`ln`, `exp`, `log2`,
//! `2^r`) enclose their values with explicit series remainder bounds.

use crate::error::{Error, Result};
use crate::Rational;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Rounding direction: toward minus or plus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

impl Rounding {
    pub fn flip(self) -> Self {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
        }
    }
}

/// Exact dyadic rational `mant * 2^exp`.
///
/// Nonzero values keep an odd mantissa so the representation is unique;
/// zero is `(0, 0)`.
#[derive(Clone, Debug)]
pub struct DyadicFloat {
    mant: BigInt,
    exp: i64,
}

impl DyadicFloat {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut v = DyadicFloat { mant, exp };
        v.normalize();
        v
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn zero() -> Self {
        DyadicFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        DyadicFloat {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        DyadicFloat {
            mant: BigInt::one(),
            exp: e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    fn mant_bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// Smallest `m` with `|self| < 2^m` (for nonzero values).
    pub fn mag_exp(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exp + self.mant_bits() as i64
    }

    pub fn neg(&self) -> Self {
        DyadicFloat {
            mant: -self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        DyadicFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        DyadicFloat {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add_exact(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &o.mant << (o.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub_exact(&self, o: &Self) -> Self {
        self.add_exact(&o.neg())
    }

    pub fn mul_exact(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    /// Directed rounding to `prec` significant bits. Exact when the
    /// mantissa already fits.
    pub fn round(&self, prec: u32, dir: Rounding) -> Self {
        let bits = self.mant_bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        self.round_drop(bits - prec as u64, dir).0
    }

    /// Drops `shift` low mantissa bits with directed rounding; also
    /// reports whether the dropped bits were all zero.
    fn round_drop(&self, shift: u64, dir: Rounding) -> (Self, bool) {
        let negative = self.mant.sign() == Sign::Minus;
        let mag = self.mant.magnitude();
        let exact = mag.trailing_zeros().map_or(true, |tz| tz >= shift);
        let mut q: BigUint = mag >> shift;
        if !exact {
            // magnitude truncation rounds toward zero; fix per direction
            let bump = matches!(
                (negative, dir),
                (false, Rounding::Up) | (true, Rounding::Down)
            );
            if bump {
                q += 1u32;
            }
        }
        let mant = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, q);
        (Self::new(mant, self.exp + shift as i64), exact)
    }

    /// Rounds `self + eps*sticky` (with `eps` an infinitesimal of the
    /// given sign) to `prec` bits in direction `dir`.
    fn round_sticky(&self, prec: u32, dir: Rounding, sticky: Ordering) -> Self {
        let mut r = self.round(prec, dir);
        let nudge = matches!(
            (dir, sticky),
            (Rounding::Up, Ordering::Greater) | (Rounding::Down, Ordering::Less)
        );
        if nudge {
            // one ulp at the result's scale keeps the bound valid
            let ulp = Self::pow2(if r.is_zero() {
                // scale irrelevant for a zero result; any tiny value works,
                // pick the scale the caller is rounding at
                self.exp
            } else {
                r.exp
            });
            r = match dir {
                Rounding::Up => r.add_exact(&ulp),
                Rounding::Down => r.sub_exact(&ulp),
            };
        }
        r
    }

    /// Rounded addition with a shortcut when the operands' scales are too
    /// far apart for the small one to matter beyond one ulp.
    pub fn add_round(&self, o: &Self, prec: u32, dir: Rounding) -> Self {
        if self.is_zero() {
            return o.round(prec, dir);
        }
        if o.is_zero() {
            return self.round(prec, dir);
        }
        let ma = self.mag_exp();
        let mb = o.mag_exp();
        let (big, small, mbig, msmall) = if ma >= mb {
            (self, o, ma, mb)
        } else {
            (o, self, mb, ma)
        };
        if msmall < mbig - prec as i64 - 2 {
            let sticky = if small.signum() > 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
            return big.round_sticky(prec, dir, sticky);
        }
        self.add_exact(o).round(prec, dir)
    }

    pub fn sub_round(&self, o: &Self, prec: u32, dir: Rounding) -> Self {
        self.add_round(&o.neg(), prec, dir)
    }

    pub fn mul_round(&self, o: &Self, prec: u32, dir: Rounding) -> Self {
        self.mul_exact(o).round(prec, dir)
    }

    /// Directed conversion of an exact rational.
    pub fn from_ratio(r: &Rational, prec: u32, dir: Rounding) -> Self {
        let num = r.numer();
        let den = r.denom(); // always positive after Ratio normalization
        if num.is_zero() {
            return Self::zero();
        }
        debug_assert!(den.sign() == Sign::Plus);
        let negative = num.sign() == Sign::Minus;
        let nb = num.magnitude().bits();
        let db = den.magnitude().bits();
        // scale so the raw quotient carries prec + 2 significant bits
        let s = (db + prec as u64 + 2).saturating_sub(nb.saturating_sub(1));
        let scaled: BigUint = num.magnitude() << s;
        let (q, rem) = num_integer::Integer::div_rem(&scaled, den.magnitude());
        let exact = rem.is_zero();
        let mant = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, q);
        let raw = Self::new(mant, -(s as i64));
        if exact {
            raw.round(prec, dir)
        } else {
            let sticky = if negative {
                Ordering::Less
            } else {
                Ordering::Greater
            };
            raw.round_sticky(prec, dir, sticky)
        }
    }

    /// The exact rational this value represents, when the denominator is a
    /// power of two (always true for this type).
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Floor of the value as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        let negative = self.mant.sign() == Sign::Minus;
        let q: BigUint = self.mant.magnitude() >> shift;
        let exact = self
            .mant
            .magnitude()
            .trailing_zeros()
            .map_or(true, |tz| tz >= shift);
        if negative {
            let mut r = -BigInt::from(q);
            if !exact {
                r -= 1;
            }
            r
        } else {
            BigInt::from(q)
        }
    }

    pub fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant_bits();
        let (top, e_extra) = if bits > 64 {
            let shifted: BigUint = self.mant.magnitude() >> (bits - 64);
            (shifted.to_u64().unwrap_or(u64::MAX), (bits - 64) as i64)
        } else {
            (self.mant.magnitude().to_u64().unwrap_or(0), 0)
        };
        let sign = if self.signum() < 0 { -1.0 } else { 1.0 };
        let e = self.exp + e_extra;
        if e > 1100 {
            return sign * f64::INFINITY;
        }
        if e < -1200 {
            return 0.0;
        }
        sign * (top as f64) * (e as f64).exp2()
    }

    /// `log2` of the absolute value, as a lossy f64 (for display and
    /// heuristics only). Returns -inf for zero.
    pub fn log2_f64(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant_bits();
        let top = if bits > 56 {
            let shifted: BigUint = self.mant.magnitude() >> (bits - 56);
            shifted.to_u64().unwrap_or(1) as f64 * ((bits - 56) as f64).exp2()
        } else {
            self.mant.magnitude().to_u64().unwrap_or(1) as f64
        };
        top.log2() + self.exp as f64
    }

    /// Manual scientific-notation rendering that works far outside the f64
    /// exponent range. Display only; not directed.
    pub fn sci_string(&self, sig: usize) -> String {
        if self.is_zero() {
            return format!("{:.*e}", sig, 0.0);
        }
        let l2 = self.log2_f64();
        let l10 = l2 * std::f64::consts::LOG10_2;
        let mut d10 = l10.floor() as i64;
        let mut m10 = 10f64.powf(l10 - d10 as f64);
        if m10 >= 10.0 {
            m10 /= 10.0;
            d10 += 1;
        }
        if m10 < 1.0 {
            m10 *= 10.0;
            d10 -= 1;
        }
        let sign = if self.signum() < 0 { "-" } else { "" };
        format!("{sign}{m10:.*}e{d10}", sig)
    }
}

impl PartialEq for DyadicFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for DyadicFloat {}

impl PartialOrd for DyadicFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let ss = self.signum();
        let so = other.signum();
        if ss != so {
            return ss.cmp(&so);
        }
        if ss == 0 {
            return Ordering::Equal;
        }
        let ma = self.mag_exp();
        let mb = other.mag_exp();
        if ma != mb {
            let c = ma.cmp(&mb);
            return if ss > 0 { c } else { c.reverse() };
        }
        self.sub_exact(other).signum().cmp(&0)
    }
}

/// A closed interval `[lo, hi]` certified to contain a real value.
#[derive(Clone, Debug)]
pub struct RealBound {
    pub lo: DyadicFloat,
    pub hi: DyadicFloat,
}

impl RealBound {
    pub fn new(lo: DyadicFloat, hi: DyadicFloat) -> Self {
        debug_assert!(lo <= hi, "inverted bracket");
        RealBound { lo, hi }
    }

    pub fn point(v: DyadicFloat) -> Self {
        RealBound {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::point(DyadicFloat::zero())
    }

    pub fn one() -> Self {
        Self::point(DyadicFloat::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(DyadicFloat::from_int(v))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        RealBound {
            lo: DyadicFloat::from_ratio(r, prec, Rounding::Down),
            hi: DyadicFloat::from_ratio(r, prec, Rounding::Up),
        }
    }

    pub fn hull(&self, o: &Self) -> Self {
        RealBound {
            lo: if self.lo <= o.lo {
                self.lo.clone()
            } else {
                o.lo.clone()
            },
            hi: if self.hi >= o.hi {
                self.hi.clone()
            } else {
                o.hi.clone()
            },
        }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        RealBound {
            lo: self.lo.add_round(&o.lo, prec, Rounding::Down),
            hi: self.hi.add_round(&o.hi, prec, Rounding::Up),
        }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        RealBound {
            lo: self.lo.sub_round(&o.hi, prec, Rounding::Down),
            hi: self.hi.sub_round(&o.lo, prec, Rounding::Up),
        }
    }

    pub fn neg(&self) -> Self {
        RealBound {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let p1 = self.lo.mul_exact(&o.lo);
        let p2 = self.lo.mul_exact(&o.hi);
        let p3 = self.hi.mul_exact(&o.lo);
        let p4 = self.hi.mul_exact(&o.hi);
        let mut lo = &p1;
        let mut hi = &p1;
        for p in [&p2, &p3, &p4] {
            if *p < *lo {
                lo = p;
            }
            if *p > *hi {
                hi = p;
            }
        }
        RealBound {
            lo: lo.round(prec, Rounding::Down),
            hi: hi.round(prec, Rounding::Up),
        }
    }

    pub fn mul_rational(&self, r: &Rational, prec: u32) -> Self {
        self.mul(&Self::from_rational(r, prec + 2), prec)
    }

    pub fn scale_pow2(&self, k: i64) -> Self {
        RealBound {
            lo: self.lo.shl(k),
            hi: self.hi.shl(k),
        }
    }

    /// Reciprocal; the interval must not contain zero.
    pub fn recip(&self, prec: u32) -> Result<Self> {
        if self.lo.signum() <= 0 && self.hi.signum() >= 0 {
            return Err(Error::OutOfDomain(
                "reciprocal of an interval containing zero".into(),
            ));
        }
        let inv = |v: &DyadicFloat, dir: Rounding| {
            let r = v.to_rational().recip();
            DyadicFloat::from_ratio(&r, prec, dir)
        };
        Ok(RealBound {
            lo: inv(&self.hi, Rounding::Down),
            hi: inv(&self.lo, Rounding::Up),
        })
    }

    pub fn div(&self, o: &Self, prec: u32) -> Result<Self> {
        Ok(self.mul(&o.recip(prec + 4)?, prec))
    }

    pub fn abs(&self) -> Self {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            let m = if self.lo.neg() >= self.hi {
                self.lo.neg()
            } else {
                self.hi.clone()
            };
            RealBound {
                lo: DyadicFloat::zero(),
                hi: m,
            }
        }
    }

    pub fn min_b(&self, o: &Self) -> Self {
        RealBound {
            lo: if self.lo <= o.lo {
                self.lo.clone()
            } else {
                o.lo.clone()
            },
            hi: if self.hi <= o.hi {
                self.hi.clone()
            } else {
                o.hi.clone()
            },
        }
    }

    pub fn max_b(&self, o: &Self) -> Self {
        RealBound {
            lo: if self.lo >= o.lo {
                self.lo.clone()
            } else {
                o.lo.clone()
            },
            hi: if self.hi >= o.hi {
                self.hi.clone()
            } else {
                o.hi.clone()
            },
        }
    }

    /// Widens both endpoints outward by `eps >= 0`.
    pub fn widen(&self, eps: &DyadicFloat) -> Self {
        debug_assert!(eps.signum() >= 0);
        RealBound {
            lo: self.lo.sub_exact(eps),
            hi: self.hi.add_exact(eps),
        }
    }

    pub fn width(&self) -> DyadicFloat {
        self.hi.sub_exact(&self.lo)
    }

    pub fn contains(&self, v: &DyadicFloat) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    /// Sign of the enclosed value when the interval resolves it.
    pub fn sign_definite(&self) -> Option<Ordering> {
        if self.lo.signum() > 0 {
            Some(Ordering::Greater)
        } else if self.hi.signum() < 0 {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn lt_certain(&self, o: &Self) -> bool {
        self.hi < o.lo
    }

    pub fn le_certain(&self, o: &Self) -> bool {
        self.hi <= o.lo
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64_lossy() + self.hi.to_f64_lossy())
    }
}

// ---------------------------------------------------------------------------
// transcendental enclosures
// ---------------------------------------------------------------------------

/// Enclosure of `ln 2` via `2 atanh(1/3)`.
pub fn ln2(prec: u32) -> RealBound {
    let p = prec + 16;
    let ninth = Rational::new(BigInt::one(), BigInt::from(9));
    let third = Rational::new(BigInt::one(), BigInt::from(3));
    let mut pw = RealBound::from_rational(&third, p); // (1/3)^(2k+1)
    let mut sum = RealBound::zero();
    let mut k: u64 = 0;
    let cutoff = DyadicFloat::pow2(-(p as i64));
    loop {
        let denom = Rational::new(BigInt::one(), BigInt::from(2 * k + 1));
        let term = pw.mul_rational(&denom, p);
        sum = sum.add(&term, p);
        // remaining tail <= pw * (1/9) * (1/(1-1/9)) / (2k+3) = pw / (8(2k+3))
        let tail_hi = pw.hi.mul_round(
            &DyadicFloat::from_ratio(
                &Rational::new(BigInt::one(), BigInt::from(8 * (2 * k + 3))),
                32,
                Rounding::Up,
            ),
            p,
            Rounding::Up,
        );
        if tail_hi < cutoff {
            sum = RealBound::new(sum.lo.clone(), sum.hi.add_exact(&tail_hi));
            break;
        }
        pw = pw.mul_rational(&ninth, p);
        k += 1;
    }
    sum.scale_pow2(1)
}

/// Enclosure of `ln x` for an exact positive dyadic `x`.
fn ln_dyadic(x: &DyadicFloat, prec: u32, ln2v: &RealBound) -> RealBound {
    debug_assert!(x.signum() > 0);
    let p = prec + 16;
    // x = m * 2^e with m in [1, 2)
    let bits = x.mag_exp() - x.exp; // mantissa bit length
    let e = x.exp + bits - 1;
    let m = x.shl(-e); // in [1, 2)
    let num = m.sub_exact(&DyadicFloat::one()).to_rational();
    let den = m.add_exact(&DyadicFloat::one()).to_rational();
    let z_r = num / den; // in [0, 1/3]
    let z = RealBound::from_rational(&z_r, p);
    let z2 = z.mul(&z, p);
    let mut pw = z.clone();
    let mut sum = RealBound::zero();
    let mut k: u64 = 0;
    let cutoff = DyadicFloat::pow2(-(p as i64));
    loop {
        let denom = Rational::new(BigInt::one(), BigInt::from(2 * k + 1));
        sum = sum.add(&pw.mul_rational(&denom, p), p);
        let next = pw.mul(&z2, p);
        // tail <= next/(2k+3) * 1/(1 - z^2), z^2 <= 1/9 so factor <= 9/8
        let tail_hi = next
            .hi
            .mul_round(
                &DyadicFloat::from_ratio(
                    &Rational::new(BigInt::from(9), BigInt::from(8 * (2 * k + 3))),
                    32,
                    Rounding::Up,
                ),
                p,
                Rounding::Up,
            )
            .abs();
        if tail_hi < cutoff || next.hi.is_zero() {
            sum = RealBound::new(sum.lo.clone(), sum.hi.add_exact(&tail_hi));
            break;
        }
        pw = next;
        k += 1;
    }
    let ln_m = sum.scale_pow2(1);
    let e_term = ln2v.mul(&RealBound::from_int(e), p);
    ln_m.add(&e_term, prec)
}

/// Enclosure of `ln x` over an interval with positive lower endpoint.
pub fn ln_bound(x: &RealBound, prec: u32) -> Result<RealBound> {
    if x.lo.signum() <= 0 {
        return Err(Error::OutOfDomain("ln of a non-positive bracket".into()));
    }
    let l2 = ln2(prec);
    let lo = ln_dyadic(&x.lo, prec, &l2).lo;
    let hi = ln_dyadic(&x.hi, prec, &l2).hi;
    Ok(RealBound::new(lo, hi))
}

/// Enclosure of `log2 x` over an interval with positive lower endpoint.
pub fn log2_bound(x: &RealBound, prec: u32) -> Result<RealBound> {
    let l = ln_bound(x, prec + 8)?;
    l.div(&ln2(prec + 8), prec)
}

/// Enclosure of `exp x` for an exact dyadic `x`.
fn exp_dyadic(x: &DyadicFloat, prec: u32, ln2v: &RealBound) -> RealBound {
    let p = prec + 16;
    // range reduction x = n ln2 + s, |s| <= 0.4
    let n_guess = (x.to_f64_lossy() / std::f64::consts::LN_2).round();
    assert!(
        n_guess.is_finite(),
        "exp argument magnitude beyond supported range"
    );
    let mut n = n_guess as i64;
    let xb = RealBound::point(x.clone());
    let mut s;
    let limit = DyadicFloat::from_ratio(&crate::ratio(2, 5), 32, Rounding::Up);
    loop {
        s = xb.sub(&ln2v.mul(&RealBound::from_int(n), p), p);
        if s.abs().hi <= limit {
            break;
        }
        // adjust n toward the remainder's sign
        if s.hi.signum() > 0 {
            n += 1;
        } else {
            n -= 1;
        }
    }
    // Taylor sum of exp(s)
    let mut term = RealBound::one();
    let mut sum = RealBound::one();
    let mut k: u64 = 1;
    let cutoff = DyadicFloat::pow2(-(p as i64));
    loop {
        term = term.mul(&s, p).mul_rational(&Rational::new(BigInt::one(), BigInt::from(k)), p);
        sum = sum.add(&term, p);
        let tmag = term.abs().hi;
        if tmag < cutoff {
            // remainder <= |term| * |s|/(k+1) / (1 - |s|/(k+2)) <= |term| (crude, |s| <= 0.4)
            sum = RealBound::new(sum.lo.sub_exact(&tmag), sum.hi.add_exact(&tmag));
            break;
        }
        k += 1;
    }
    sum.scale_pow2(n)
}

/// Enclosure of `exp x` over an interval.
pub fn exp_bound(x: &RealBound, prec: u32) -> RealBound {
    let l2 = ln2(prec + 16);
    let lo = exp_dyadic(&x.lo, prec, &l2).lo;
    let hi = exp_dyadic(&x.hi, prec, &l2).hi;
    RealBound::new(lo, hi)
}

/// Enclosure of `2^r` for an exact rational exponent.
pub fn two_pow(r: &Rational, prec: u32) -> RealBound {
    let p = prec + 16;
    let l2 = ln2(p);
    let x = RealBound::from_rational(r, p).mul(&l2, p);
    exp_bound(&x, prec)
}

/// Enclosure of `x^a` for a positive interval `x` and exact rational `a`.
pub fn pow_bound(x: &RealBound, a: &Rational, prec: u32) -> Result<RealBound> {
    let p = prec + 16;
    let lx = ln_bound(x, p)?;
    let ax = lx.mul(&RealBound::from_rational(a, p), p);
    Ok(exp_bound(&ax, prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn df(v: i64, e: i64) -> DyadicFloat {
        DyadicFloat::new(BigInt::from(v), e)
    }

    #[test]
    fn rounding_directions() {
        // 0.101011₂ rounded to 3 bits
        let x = df(0b101011, -6);
        let d = x.round(3, Rounding::Down);
        let u = x.round(3, Rounding::Up);
        assert!(d < x && x < u);
        assert_eq!(d, df(0b101, -3));
        assert_eq!(u, df(0b110, -3));
        let n = x.neg();
        assert_eq!(n.round(3, Rounding::Down), df(0b110, -3).neg());
        assert_eq!(n.round(3, Rounding::Up), df(0b101, -3).neg());
    }

    #[test]
    fn add_round_gap_shortcut_is_sound() {
        let big = df(1, 0);
        let tiny = df(1, -200);
        let up = big.add_round(&tiny, 16, Rounding::Up);
        let down = big.add_round(&tiny, 16, Rounding::Down);
        let exact = big.add_exact(&tiny);
        assert!(down <= exact && exact <= up);
        assert!(down < up); // the tiny positive summand must push Up strictly above 1
        let tiny_neg = tiny.neg();
        let up2 = big.add_round(&tiny_neg, 16, Rounding::Up);
        let down2 = big.add_round(&tiny_neg, 16, Rounding::Down);
        let exact2 = big.add_exact(&tiny_neg);
        assert!(down2 <= exact2 && exact2 <= up2);
    }

    #[test]
    fn from_ratio_directed() {
        let third = ratio(1, 3);
        let lo = DyadicFloat::from_ratio(&third, 64, Rounding::Down);
        let hi = DyadicFloat::from_ratio(&third, 64, Rounding::Up);
        assert!(lo < hi);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        let exact = ratio(3, 8);
        let e1 = DyadicFloat::from_ratio(&exact, 64, Rounding::Down);
        let e2 = DyadicFloat::from_ratio(&exact, 64, Rounding::Up);
        assert_eq!(e1, e2);
    }

    #[test]
    fn floor_int_negative() {
        assert_eq!(df(-3, -1).floor_int(), BigInt::from(-2)); // -1.5 -> -2
        assert_eq!(df(3, -1).floor_int(), BigInt::from(1));
        assert_eq!(df(-1, 2).floor_int(), BigInt::from(-4));
    }

    #[test]
    fn ln2_encloses_reference() {
        let v = ln2(128);
        let r = std::f64::consts::LN_2;
        assert!(v.lo.to_f64_lossy() <= r && r <= v.hi.to_f64_lossy());
        assert!(v.width().log2_f64() < -120.0);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = RealBound::from_rational(&ratio(7, 5), 96);
        let l = ln_bound(&x, 96).unwrap();
        let back = exp_bound(&l, 96);
        assert!(back.lo.to_f64_lossy() <= 1.4 && 1.4 <= back.hi.to_f64_lossy());
        assert!(back.width().log2_f64() < -80.0);
    }

    #[test]
    fn two_pow_values() {
        let v = two_pow(&ratio(-1, 2), 128); // 2^(-1/2)
        let r = 0.7071067811865476_f64;
        assert!(v.lo.to_f64_lossy() <= r && r <= v.hi.to_f64_lossy());
        let w = two_pow(&ratio(1, 2), 128);
        let s = std::f64::consts::SQRT_2;
        assert!(w.lo.to_f64_lossy() <= s && s <= w.hi.to_f64_lossy());
    }

    #[test]
    fn log2_of_powers() {
        let x = RealBound::point(DyadicFloat::pow2(-37));
        let l = log2_bound(&x, 96).unwrap();
        assert!(l.contains(&df(-37, 0)));
        assert!(l.width().log2_f64() < -80.0);
    }

    #[test]
    fn interval_mul_contains_products() {
        let a = RealBound::from_rational(&ratio(-7, 3), 64);
        let b = RealBound::from_rational(&ratio(22, 7), 64);
        let p = a.mul(&b, 64);
        let want = ratio(-22, 3);
        assert!(p.lo.to_rational() <= want && want <= p.hi.to_rational());
    }

    #[test]
    fn sci_string_tiny() {
        let v = DyadicFloat::pow2(-4000);
        let s = v.sci_string(6);
        assert!(s.ends_with("e-1205") || s.ends_with("e-1204"));
    }
}
