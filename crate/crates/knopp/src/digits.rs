//! Points of `[0,1]` represented as inspectable binary-digit sources.
//!
//! A [`DigitStream`] answers `digit(l)` queries for the binary expansion
//! `x = sum_l i_l 2^-l`, supports the shift `tau` (drop the leading
//! digit), decides membership in the dyadics and in the set `S` of
//! abscissas of local maxima (`k/2^N + 1/(3 2^N)` and `k/2^N + 2/(3 2^N)`,
//! i.e. eventually alternating digits), and measures how well the point is
//! approximated by dyadics (rate `r`) and by points of `S` (rate `s`).
//! Rule-based streams realize the explicit constructions with prescribed
//! rates and expose the scale subsequences where those rates bite.

use crate::error::{Error, Result};
use crate::real::{log2_bound, DyadicFloat, RealBound};
use crate::Rational;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

/// Which infinite tail a finite dyadic expansion carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `i_N = 1`, zeros afterwards (the default).
    ZeroTail,
    /// `i_N = 0`, ones afterwards.
    OneTail,
}

/// Membership of a point among the special sets of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Dyadic,
    MaximaSet,
    Neither,
    /// Not decidable from the available digits (truncated input).
    Unknown(u64),
}

/// Rule-based digit generators for points with prescribed approximation
/// rates. All are pure functions of the digit index.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    /// Ones exactly at positions `[u^n]`, n >= 0: dyadic rate `u`,
    /// maxima rate 1.
    SparseOnes { u: Rational },
    /// The `0101...` expansion of 1/3 with the ones at positions
    /// `2 [u^n]` removed: maxima rate `u`, dyadic rate 1.
    PuncturedThirds { u: Rational },
    /// Alternating blocks: ones at even positions `2k` for
    /// `k in [a_n, c_n)` with `a_n = [s^(n-1) u^n]`, `c_n = [s^n u^n]`:
    /// dyadic rate `u`, maxima rate `s`.
    AlternatingBlocks { u: Rational, s: Rational },
}

/// A point of `[0,1]` as a digit source.
#[derive(Clone, Debug, PartialEq)]
pub enum DigitStream {
    /// `(prefix + tail) / 2^len` with the prefix giving digits `1..=len`
    /// and a constant tail digit afterwards.
    FiniteDyadic {
        prefix: BigUint,
        len: u32,
        tail: u8,
    },
    EventuallyPeriodic {
        preamble: Vec<u8>,
        period: Vec<u8>,
    },
    RuleBased {
        rule: Rule,
        offset: u64,
    },
    Truncated {
        bits: Vec<u8>,
    },
}

use DigitStream::*;

impl DigitStream {
    // -- constructors -------------------------------------------------------

    /// Dyadic point `k / 2^n` under the requested tail convention.
    pub fn dyadic(k: BigUint, n: u32, conv: Convention) -> Result<Self> {
        let den = BigUint::one() << n;
        if k > den {
            return Err(Error::OutOfDomain(format!(
                "dyadic point {k}/2^{n} lies outside [0,1]"
            )));
        }
        // strip trailing zero bits so the numerator is odd
        let (mut k, mut n) = (k, n);
        while n > 0 && !k.is_zero() && !k.bit(0) {
            k >>= 1;
            n -= 1;
        }
        if k.is_zero() {
            // zero has only the all-zeros expansion
            return Ok(FiniteDyadic {
                prefix: BigUint::zero(),
                len: 0,
                tail: 0,
            });
        }
        if n == 0 {
            // one has only the all-ones expansion
            return Ok(FiniteDyadic {
                prefix: BigUint::zero(),
                len: 0,
                tail: 1,
            });
        }
        Ok(match conv {
            Convention::ZeroTail => FiniteDyadic {
                prefix: k,
                len: n,
                tail: 0,
            },
            Convention::OneTail => FiniteDyadic {
                prefix: k - 1u32,
                len: n,
                tail: 1,
            },
        })
    }

    /// Rational point `p/q` in `[0,1]`, expanded by long division in base
    /// two. Dyadic denominators collapse to the finite representation.
    pub fn rational(x: &Rational) -> Result<Self> {
        if x < &Rational::zero() || x > &Rational::one() {
            return Err(Error::OutOfDomain(format!("point {x} lies outside [0,1]")));
        }
        let den = x.denom().magnitude();
        if den.count_ones() == 1 {
            let n = (den.bits() - 1) as u32;
            return Self::dyadic(x.numer().magnitude().clone(), n, Convention::ZeroTail);
        }
        // long division; remainders repeat after at most q steps
        let q = den.clone();
        let mut r = x.numer().magnitude().clone();
        let mut digits: Vec<u8> = Vec::new();
        let mut seen: HashMap<BigUint, usize> = HashMap::new();
        let cycle_start;
        loop {
            if let Some(&pos) = seen.get(&r) {
                cycle_start = pos;
                break;
            }
            seen.insert(r.clone(), digits.len());
            r <<= 1;
            if r >= q {
                digits.push(1);
                r -= &q;
            } else {
                digits.push(0);
            }
        }
        let period = digits.split_off(cycle_start);
        Ok(EventuallyPeriodic {
            preamble: digits,
            period,
        })
    }

    /// Point `k/2^n + v/(3 * 2^n)` of the maxima set, `v` in {1, 2}.
    pub fn maxima_point(n: u32, k: BigUint, v: u8) -> Result<Self> {
        if !(v == 1 || v == 2) {
            return Err(Error::OutOfDomain(format!(
                "maxima-set offset must be 1 or 2, got {v}"
            )));
        }
        if k >= (BigUint::one() << n) {
            return Err(Error::OutOfDomain(format!(
                "maxima-set point {k}/2^{n} + {v}/(3*2^{n}) lies outside [0,1]"
            )));
        }
        let mut preamble = Vec::with_capacity(n as usize);
        for l in 1..=n {
            preamble.push(u8::from(k.bit((n - l) as u64)));
        }
        let period = if v == 1 { vec![0, 1] } else { vec![1, 0] };
        Ok(EventuallyPeriodic { preamble, period })
    }

    /// Truncated stream: the listed digits and nothing beyond.
    pub fn truncated(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|b| *b > 1) {
            return Err(Error::OutOfDomain("digits must be 0 or 1".into()));
        }
        Ok(Truncated { bits })
    }

    /// Builds the explicit construction with the requested approximation
    /// rates (`r` toward dyadics, `s` toward the maxima set).
    pub fn with_rates(r: Option<&Rational>, s: Option<&Rational>) -> Result<Self> {
        let check = |name: &str, v: &Rational| -> Result<Rational> {
            if v <= &Rational::one() {
                Err(Error::InvalidTarget(format!(
                    "{name}-rate target must exceed 1, got {v}"
                )))
            } else {
                Ok(v.clone())
            }
        };
        let rule = match (r, s) {
            (Some(u), None) => Rule::SparseOnes {
                u: check("r", u)?,
            },
            (None, Some(u)) => Rule::PuncturedThirds {
                u: check("s", u)?,
            },
            (Some(u), Some(s)) => Rule::AlternatingBlocks {
                u: check("r", u)?,
                s: check("s", s)?,
            },
            (None, None) => {
                return Err(Error::InvalidTarget(
                    "at least one of r, s must be given".into(),
                ))
            }
        };
        Ok(RuleBased { rule, offset: 0 })
    }

    // -- digit access -------------------------------------------------------

    /// `i_l(x)` for `l >= 1`.
    pub fn digit(&self, l: u64) -> Result<u8> {
        assert!(l >= 1, "digit indices start at 1");
        match self {
            FiniteDyadic { prefix, len, tail } => {
                if l <= *len as u64 {
                    Ok(u8::from(prefix.bit(*len as u64 - l)))
                } else {
                    Ok(*tail)
                }
            }
            EventuallyPeriodic { preamble, period } => {
                let p = preamble.len() as u64;
                if l <= p {
                    Ok(preamble[(l - 1) as usize])
                } else {
                    Ok(period[((l - 1 - p) % period.len() as u64) as usize])
                }
            }
            RuleBased { rule, offset } => Ok(rule.digit(l + offset)),
            Truncated { bits } => {
                if l <= bits.len() as u64 {
                    Ok(bits[(l - 1) as usize])
                } else {
                    Err(Error::DepthExceeded {
                        depth: bits.len() as u64,
                        requested: l,
                    })
                }
            }
        }
    }

    /// Greatest inspectable digit index, if bounded.
    pub fn depth(&self) -> Option<u64> {
        match self {
            Truncated { bits } => Some(bits.len() as u64),
            _ => None,
        }
    }

    /// Digits `1..=n` as a vector (bulk form of [`digit`]).
    pub fn digits_prefix(&self, n: u64) -> Result<Vec<u8>> {
        if let Some(d) = self.depth() {
            if n > d {
                return Err(Error::DepthExceeded {
                    depth: d,
                    requested: n,
                });
            }
        }
        if let RuleBased { rule, offset } = self {
            return Ok(rule.digits_range(*offset + 1, *offset + n));
        }
        (1..=n).map(|l| self.digit(l)).collect()
    }

    // -- shift --------------------------------------------------------------

    /// The shift `tau^j x`: digit `l` of the result is digit `l + j` of
    /// the input. Agrees with `2x mod 1` pointwise (with `tau 1 = 1`).
    pub fn shift(&self, j: u64) -> Result<Self> {
        if j == 0 {
            return Ok(self.clone());
        }
        Ok(match self {
            FiniteDyadic { prefix, len, tail } => {
                if j < *len as u64 {
                    let keep = *len as u64 - j;
                    let mask = (BigUint::one() << keep) - 1u32;
                    FiniteDyadic {
                        prefix: prefix & mask,
                        len: keep as u32,
                        tail: *tail,
                    }
                } else {
                    FiniteDyadic {
                        prefix: BigUint::zero(),
                        len: 0,
                        tail: *tail,
                    }
                }
            }
            EventuallyPeriodic { preamble, period } => {
                let p = preamble.len() as u64;
                if j <= p {
                    EventuallyPeriodic {
                        preamble: preamble[j as usize..].to_vec(),
                        period: period.clone(),
                    }
                } else {
                    let r = ((j - p) % period.len() as u64) as usize;
                    let mut per = period[r..].to_vec();
                    per.extend_from_slice(&period[..r]);
                    EventuallyPeriodic {
                        preamble: Vec::new(),
                        period: per,
                    }
                }
            }
            RuleBased { rule, offset } => RuleBased {
                rule: rule.clone(),
                offset: offset + j,
            },
            Truncated { bits } => {
                if j >= bits.len() as u64 {
                    return Err(Error::DepthExceeded {
                        depth: bits.len() as u64,
                        requested: j + 1,
                    });
                }
                Truncated {
                    bits: bits[j as usize..].to_vec(),
                }
            }
        })
    }

    // -- values -------------------------------------------------------------

    /// Exact rational value, for representations that admit one.
    pub fn exact_value(&self) -> Option<Rational> {
        match self {
            FiniteDyadic { prefix, len, tail } => {
                let num = BigInt::from(prefix + BigUint::from(*tail));
                Some(Rational::new(num, BigInt::one() << *len))
            }
            EventuallyPeriodic { preamble, period } => {
                let p = preamble.len();
                let q = period.len();
                let a = bits_to_int(preamble);
                let b = bits_to_int(period);
                let m = (BigUint::one() << q) - 1u32; // 2^q - 1
                let num = BigInt::from(a * &m + b);
                let den = BigInt::from(m) << p;
                Some(Rational::new(num, den))
            }
            _ => None,
        }
    }

    /// Exact value of the depth-`n` truncation `sum_{l<=n} i_l 2^-l`.
    pub fn prefix_value(&self, n: u64) -> Result<DyadicFloat> {
        let ds = self.digits_prefix(n)?;
        Ok(DyadicFloat::new(BigInt::from(bits_to_int(&ds)), -(n as i64)))
    }

    /// A certified bracket for the value. Exact representations give a
    /// point bracket (up to outward rounding); truncations carry their
    /// full `2^-depth` uncertainty.
    pub fn value_bracket(&self, digits: u64, prec: u32) -> Result<RealBound> {
        if let Some(v) = self.exact_value() {
            return Ok(RealBound::from_rational(&v, prec));
        }
        let lo = self.prefix_value(digits)?;
        let hi = lo.add_exact(&DyadicFloat::pow2(-(digits as i64)));
        Ok(RealBound::new(lo, hi))
    }

    // -- classification -----------------------------------------------------

    /// Exact membership for finite and eventually periodic expansions;
    /// rule-based constructions are non-members by construction; truncated
    /// streams are undecidable.
    pub fn classify(&self) -> Membership {
        match self {
            FiniteDyadic { .. } => Membership::Dyadic,
            EventuallyPeriodic { period, .. } => {
                if period.iter().all(|&b| b == 0) || period.iter().all(|&b| b == 1) {
                    return Membership::Dyadic;
                }
                let q = period.len();
                let alternates = (0..q).all(|i| period[i] + period[(i + 1) % q] == 1);
                if alternates {
                    Membership::MaximaSet
                } else {
                    Membership::Neither
                }
            }
            RuleBased { .. } => Membership::Neither,
            Truncated { bits } => Membership::Unknown(bits.len() as u64),
        }
    }

    // -- approximation machinery ---------------------------------------------

    /// The fraction `tau^j x` either exactly or as a bracket.
    fn shifted_fraction(&self, j: u64, prec: u32) -> Result<FracValue> {
        let sh = self.shift(j)?;
        match sh.exact_value() {
            Some(v) => Ok(FracValue::Exact(v)),
            None => Ok(FracValue::Bracket(
                sh.value_bracket(prec as u64 + 8, prec)?,
            )),
        }
    }

    /// Nearest point `K_j / 2^j` of the depth-`j` dyadic grid, with a
    /// certified bracket for the distance (exact zero when the point is
    /// itself on the grid).
    pub fn nearest_dyadic(&self, j: u64, prec: u32) -> Result<(BigInt, RealBound)> {
        let frac = self.shifted_fraction(j, prec)?;
        let mut k = BigInt::from(bits_to_int(&self.digits_prefix(j)?));
        if self.digit(j + 1)? == 1 {
            k += 1;
        }
        let dist = frac.lambda_distance(prec).scale_pow2(-(j as i64));
        Ok((k, dist))
    }

    /// Nearest point of the maxima set at scale `j` (of the form
    /// `(3k + v) / (3 * 2^j)`, `v` in {1,2}), with a certified distance.
    pub fn nearest_maxima_point(&self, j: u64, prec: u32) -> Result<(Rational, RealBound)> {
        let frac = self.shifted_fraction(j, prec)?;
        let trunc = bits_to_int(&self.digits_prefix(j)?);
        // candidate offset: whichever of 1/3, 2/3 is closer
        let mid = frac.midpoint();
        let v: u32 = if mid <= crate::ratio(1, 2) { 1 } else { 2 };
        let m = Rational::new(
            BigInt::from(trunc * 3u32 + v),
            BigInt::from(3) * (BigInt::one() << j),
        );
        let dist = frac.thirds_distance(prec).scale_pow2(-(j as i64));
        Ok((m, dist))
    }

    /// Per-scale approximation-rate trace for `j = 1..=j_max`.
    pub fn rate_trace(&self, kind: RateKind, j_max: u64, prec: u32) -> Result<ApproxRateTrace> {
        let mut entries = Vec::with_capacity(j_max as usize);
        for j in 1..=j_max {
            let frac = self.shifted_fraction(j, prec)?;
            let dist = match kind {
                RateKind::Dyadic => frac.lambda_distance(prec),
                RateKind::Maxima => frac.thirds_distance(prec),
            }
            .scale_pow2(-(j as i64));
            let ratio = if dist.lo.signum() > 0 {
                let l = log2_bound(&dist, 64).expect("positive distance");
                Some(
                    l.neg()
                        .mul_rational(&Rational::new(BigInt::one(), BigInt::from(j)), 64),
                )
            } else {
                None
            };
            entries.push(RateEntry { j, dist, ratio });
        }
        let window = (j_max as usize).div_ceil(3).max(1);
        let tail = &entries[entries.len().saturating_sub(window)..];
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut finite = true;
        for e in tail {
            match &e.ratio {
                Some(r) => {
                    lo = lo.max(r.lo.to_f64_lossy());
                    hi = hi.max(r.hi.to_f64_lossy());
                }
                None => finite = false,
            }
        }
        let summary = RateSummary {
            finite,
            lo: if finite { lo } else { f64::INFINITY },
            hi: if finite { hi } else { f64::INFINITY },
        };
        Ok(ApproxRateTrace {
            kind,
            entries,
            window,
            summary,
        })
    }

    /// Scale subsequences where the construction's rates are realized:
    /// radii `2^-J` for `J` in the first list probe the maxima-like
    /// behavior (the Omega side), the second list the dyadic-like behavior
    /// (the complement side). Empty for non-rule-based or shifted streams.
    pub fn probe_scales(&self, cap: u64) -> ProbeScales {
        let mut out = ProbeScales::default();
        let RuleBased { rule, offset: 0 } = self else {
            return out;
        };
        match rule {
            Rule::SparseOnes { u } => {
                out.omega_c = floor_powers(u, cap)
                    .into_iter()
                    .filter(|&v| v >= 4)
                    .collect();
            }
            Rule::PuncturedThirds { u } => {
                out.omega = floor_powers(u, cap / 2)
                    .into_iter()
                    .map(|v| 2 * v)
                    .filter(|&v| v >= 4)
                    .collect();
            }
            Rule::AlternatingBlocks { u, s } => {
                for (a, c) in block_schedule(u, s, cap / 2) {
                    if 2 * a <= cap && 2 * a >= 4 {
                        out.omega.push(2 * a);
                    }
                    if 2 * c <= cap && 2 * c >= 4 {
                        out.omega_c.push(2 * c);
                    }
                }
            }
        }
        out
    }

    /// Canonical point-spec string (the CLI grammar).
    pub fn spec_string(&self) -> String {
        match self {
            FiniteDyadic { prefix, len, tail } => {
                let k = prefix + BigUint::from(*tail);
                format!("dyadic:{k}/2^{len}")
            }
            EventuallyPeriodic { .. } => {
                let v = self.exact_value().unwrap();
                format!("rational:{}/{}", v.numer(), v.denom())
            }
            RuleBased { rule, offset } => {
                let base = match rule {
                    Rule::SparseOnes { u } => format!("rule:r={}", fmt_ratio(u)),
                    Rule::PuncturedThirds { u } => format!("rule:s={}", fmt_ratio(u)),
                    Rule::AlternatingBlocks { u, s } => {
                        format!("rule:r={},s={}", fmt_ratio(u), fmt_ratio(s))
                    }
                };
                if *offset > 0 {
                    format!("{base}>>{offset}")
                } else {
                    base
                }
            }
            Truncated { bits } => {
                let s: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                format!("bits:0.{s}")
            }
        }
    }
}

fn fmt_ratio(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Which set the approximation rate targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    Dyadic,
    Maxima,
}

#[derive(Clone, Debug)]
pub struct RateEntry {
    pub j: u64,
    pub dist: RealBound,
    /// `log(dist) / log(2^-j)`; `None` when the distance bracket touches
    /// zero (the point sits on the target set at this scale).
    pub ratio: Option<RealBound>,
}

#[derive(Clone, Copy, Debug)]
pub struct RateSummary {
    pub finite: bool,
    pub lo: f64,
    pub hi: f64,
}

/// Trace of per-scale approximation rates with a tail-window limsup proxy.
#[derive(Clone, Debug)]
pub struct ApproxRateTrace {
    pub kind: RateKind,
    pub entries: Vec<RateEntry>,
    pub window: usize,
    pub summary: RateSummary,
}

/// Scale subsequences exposed by rule-based constructions.
#[derive(Clone, Debug, Default)]
pub struct ProbeScales {
    pub omega: Vec<u64>,
    pub omega_c: Vec<u64>,
}

impl Rule {
    fn digit(&self, l: u64) -> u8 {
        match self {
            Rule::SparseOnes { u } => u8::from(floor_powers(u, l).contains(&l)),
            Rule::PuncturedThirds { u } => {
                if l % 2 == 1 {
                    0
                } else {
                    let k = l / 2;
                    u8::from(k >= 1 && !floor_powers(u, k).contains(&k))
                }
            }
            Rule::AlternatingBlocks { u, s } => {
                if l % 2 == 1 {
                    0
                } else {
                    let k = l / 2;
                    u8::from(
                        block_schedule(u, s, k)
                            .iter()
                            .any(|&(a, c)| a <= k && k < c),
                    )
                }
            }
        }
    }

    fn digits_range(&self, from: u64, to: u64) -> Vec<u8> {
        if to < from {
            return Vec::new();
        }
        match self {
            Rule::SparseOnes { u } => {
                let pos = floor_powers(u, to);
                (from..=to).map(|l| u8::from(pos.contains(&l))).collect()
            }
            Rule::PuncturedThirds { u } => {
                let pos = floor_powers(u, to / 2 + 1);
                (from..=to)
                    .map(|l| {
                        if l % 2 == 1 {
                            0
                        } else {
                            let k = l / 2;
                            u8::from(k >= 1 && !pos.contains(&k))
                        }
                    })
                    .collect()
            }
            Rule::AlternatingBlocks { u, s } => {
                let blocks = block_schedule(u, s, to / 2 + 1);
                (from..=to)
                    .map(|l| {
                        if l % 2 == 1 {
                            0
                        } else {
                            let k = l / 2;
                            u8::from(blocks.iter().any(|&(a, c)| a <= k && k < c))
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Strictly increasing values `[u^n]` for `n >= 0`, up to `max_value`,
/// duplicates collapsed (set semantics for exponents of very small bases).
fn floor_powers(u: &Rational, max_value: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut pw = Rational::one();
    loop {
        let f = pw.to_integer();
        let Some(v) = f.to_u64() else { break };
        if v > max_value {
            break;
        }
        if out.last() != Some(&v) && v >= 1 {
            out.push(v);
        }
        pw *= u;
        if out.len() > 4096 {
            break; // safety; unreachable for admissible targets
        }
    }
    out
}

/// Block boundaries `(a_n, c_n)` for the two-rate construction, with
/// guards keeping the blocks nonempty and separated; covers all blocks
/// with `a_n <= k_max`.
fn block_schedule(u: &Rational, s: &Rational, k_max: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    let mut pow_s = Rational::one(); // s^(n-1)
    let mut pow_u = u.clone(); // u^n
    loop {
        let a_raw = (pow_s.clone() * pow_u.clone()).to_integer();
        let c_raw = (pow_s.clone() * s * pow_u.clone()).to_integer();
        let prev_end = out.last().map(|&(_, c)| c).unwrap_or(1);
        let a = a_raw.to_u64().unwrap_or(u64::MAX).max(prev_end + 1);
        let c = c_raw.to_u64().unwrap_or(u64::MAX).max(a + 1);
        if a > k_max {
            break;
        }
        out.push((a, c));
        pow_s *= s;
        pow_u *= u;
        if out.len() > 2048 {
            break;
        }
    }
    out
}

fn bits_to_int(bits: &[u8]) -> BigUint {
    let mut v = BigUint::zero();
    for &b in bits {
        v <<= 1;
        if b == 1 {
            v += 1u32;
        }
    }
    v
}

/// A shifted fraction, exact when the stream admits a rational value.
enum FracValue {
    Exact(Rational),
    Bracket(RealBound),
}

impl FracValue {
    fn midpoint(&self) -> Rational {
        match self {
            FracValue::Exact(r) => r.clone(),
            FracValue::Bracket(b) => {
                (b.lo.to_rational() + b.hi.to_rational()) / Rational::from(BigInt::from(2))
            }
        }
    }

    /// Distance `min(y, 1-y)` to the integers.
    fn lambda_distance(&self, prec: u32) -> RealBound {
        match self {
            FracValue::Exact(r) => {
                let d = r.clone().min(Rational::one() - r);
                if d.is_zero() {
                    RealBound::zero()
                } else {
                    RealBound::from_rational(&d, prec)
                }
            }
            FracValue::Bracket(b) => lambda_interval(b),
        }
    }

    /// Distance `min(|y - 1/3|, |y - 2/3|)` to the unit-scale maxima set.
    fn thirds_distance(&self, prec: u32) -> RealBound {
        match self {
            FracValue::Exact(r) => {
                let d = (r.clone() - crate::ratio(1, 3))
                    .abs()
                    .min((r.clone() - crate::ratio(2, 3)).abs());
                if d.is_zero() {
                    RealBound::zero()
                } else {
                    RealBound::from_rational(&d, prec)
                }
            }
            FracValue::Bracket(b) => thirds_distance_interval(b),
        }
    }
}

/// Enclosure of `min(y, 1-y)` over an interval `[a,b]` within `[0,1]`.
pub fn lambda_interval(y: &RealBound) -> RealBound {
    let one = DyadicFloat::one();
    let la = y
        .lo
        .clone()
        .min(one.sub_exact(&y.lo).max(DyadicFloat::zero()));
    let lb = y
        .hi
        .clone()
        .min(one.sub_exact(&y.hi).max(DyadicFloat::zero()));
    let lo = la.clone().min(lb.clone()).max(DyadicFloat::zero());
    let half = DyadicFloat::new(BigInt::one(), -1);
    let hi = if y.lo <= half && half <= y.hi {
        half
    } else {
        la.max(lb)
    };
    RealBound::new(lo, hi)
}

/// Enclosure of `min(|y - 1/3|, |y - 2/3|)` over an interval within
/// `[0,1]` (the distance from the shifted point to the maxima set at unit
/// scale).
fn thirds_distance_interval(y: &RealBound) -> RealBound {
    let third = crate::ratio(1, 3);
    let two_thirds = crate::ratio(2, 3);
    let g = |v: &DyadicFloat| -> Rational {
        let r = v.to_rational();
        let d1 = (r.clone() - &third).abs();
        let d2 = (r - &two_thirds).abs();
        d1.min(d2)
    };
    let ga = g(&y.lo);
    let gb = g(&y.hi);
    let (alo, ahi) = (y.lo.to_rational(), y.hi.to_rational());
    let contains = |p: &Rational| &alo <= p && p <= &ahi;
    let lo_r = if contains(&third) || contains(&two_thirds) {
        Rational::zero()
    } else {
        ga.clone().min(gb.clone())
    };
    // interior peaks of the distance function: 1/6 at y = 1/2, 1/3 at y in {0, 1}
    let mut hi_r = ga.max(gb);
    if contains(&crate::ratio(1, 2)) {
        hi_r = hi_r.max(crate::ratio(1, 6));
    }
    if contains(&Rational::zero()) || contains(&Rational::one()) {
        hi_r = hi_r.max(third);
    }
    RealBound::new(
        DyadicFloat::from_ratio(&lo_r, 128, crate::real::Rounding::Down),
        DyadicFloat::from_ratio(&hi_r, 128, crate::real::Rounding::Up),
    )
}

/// True iff the rational lies in the maxima set: in lowest terms the
/// denominator is `3 * 2^N` (equivalently, an eventually alternating
/// expansion).
pub fn is_maxima_rational(x: &Rational) -> bool {
    if x < &Rational::zero() || x > &Rational::one() {
        return false;
    }
    let den = x.denom().magnitude();
    let three = BigUint::from(3u32);
    let (q, r) = den.div_rem(&three);
    r.is_zero() && (q.count_ones() == 1 || q.is_zero())
}

// ---------------------------------------------------------------------------
// point-spec grammar
// ---------------------------------------------------------------------------

/// Parses a decimal literal ("0.5") or a fraction ("1/3") as an exact
/// rational.
pub fn parse_decimal_or_fraction(s: &str) -> Result<Rational> {
    let err = |pos: usize, msg: &str| Error::Parse {
        input: s.to_string(),
        pos,
        msg: msg.to_string(),
    };
    if let Some(slash) = s.find('/') {
        let num: BigInt = s[..slash]
            .parse()
            .map_err(|_| err(0, "invalid numerator"))?;
        let den: BigInt = s[slash + 1..]
            .parse()
            .map_err(|_| err(slash + 1, "invalid denominator"))?;
        if den.is_zero() {
            return Err(err(slash + 1, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some(dot) = s.find('.') {
        let int_part = &s[..dot];
        let frac_part = &s[dot + 1..];
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(dot + 1, "invalid fractional part"));
        }
        let int_v: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err(0, "invalid integer part"))?
        };
        let frac_v: BigInt = frac_part.parse().map_err(|_| err(dot + 1, "invalid digits"))?;
        let scale = num_traits::pow::pow(BigInt::from(10), frac_part.len());
        let negative = s.starts_with('-');
        let mag = Rational::new(int_v.abs() * &scale + frac_v, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let v: BigInt = s.parse().map_err(|_| err(0, "invalid integer"))?;
    Ok(Rational::from(v))
}

/// Parses the point-spec grammar:
/// `dyadic:K/2^N | rational:P/Q | smax:N:K:v | rule:r=U[,s=S] |
/// rule:s=S[,r=U] | bits:0.b1b2...bn`.
pub fn parse_point(spec: &str) -> Result<DigitStream> {
    let err = |pos: usize, msg: &str| Error::Parse {
        input: spec.to_string(),
        pos,
        msg: msg.to_string(),
    };
    let Some(colon) = spec.find(':') else {
        return Err(err(0, "expected `kind:...`"));
    };
    let kind = &spec[..colon];
    let rest = &spec[colon + 1..];
    let base = colon + 1;
    match kind {
        "dyadic" => {
            let Some(slash) = rest.find("/2^") else {
                return Err(err(base, "expected K/2^N"));
            };
            let k: BigUint = rest[..slash]
                .parse()
                .map_err(|_| err(base, "invalid numerator K"))?;
            let n: u32 = rest[slash + 3..]
                .parse()
                .map_err(|_| err(base + slash + 3, "invalid exponent N"))?;
            DigitStream::dyadic(k, n, Convention::ZeroTail)
        }
        "rational" => {
            let r = parse_decimal_or_fraction(rest).map_err(|e| match e {
                Error::Parse { pos, msg, .. } => err(base + pos, &msg),
                other => other,
            })?;
            DigitStream::rational(&r)
        }
        "smax" => {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(err(base, "expected N:K:v"));
            }
            let n: u32 = parts[0].parse().map_err(|_| err(base, "invalid N"))?;
            let k: BigUint = parts[1].parse().map_err(|_| err(base, "invalid K"))?;
            let v: u8 = parts[2].parse().map_err(|_| err(base, "invalid v"))?;
            DigitStream::maxima_point(n, k, v)
        }
        "rule" => {
            let mut r = None;
            let mut s = None;
            for item in rest.split(',') {
                let Some(eq) = item.find('=') else {
                    return Err(err(base, "expected r=U or s=S"));
                };
                let val = parse_decimal_or_fraction(&item[eq + 1..])?;
                match &item[..eq] {
                    "r" => r = Some(val),
                    "s" => s = Some(val),
                    other => return Err(err(base, &format!("unknown rate `{other}`"))),
                }
            }
            DigitStream::with_rates(r.as_ref(), s.as_ref())
        }
        "bits" => {
            let Some(tail) = rest.strip_prefix("0.") else {
                return Err(err(base, "expected 0.b1b2..."));
            };
            let bits: Result<Vec<u8>> = tail
                .bytes()
                .enumerate()
                .map(|(i, b)| match b {
                    b'0' => Ok(0),
                    b'1' => Ok(1),
                    _ => Err(err(base + 2 + i, "digits must be 0 or 1")),
                })
                .collect();
            DigitStream::truncated(bits?)
        }
        other => Err(err(0, &format!("unknown point kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn fd(k: u64, n: u32) -> DigitStream {
        DigitStream::dyadic(BigUint::from(k), n, Convention::ZeroTail).unwrap()
    }

    #[test]
    fn digit_examples() {
        // 1/4 = 0.01, zeros convention
        let x = fd(1, 2);
        assert_eq!(x.digit(1).unwrap(), 0);
        assert_eq!(x.digit(2).unwrap(), 1);
        assert_eq!(x.digit(3).unwrap(), 0);
        // 1/3 = 0.010101...
        let t = DigitStream::rational(&ratio(1, 3)).unwrap();
        assert_eq!(t.digit(4).unwrap(), 1);
        assert_eq!(t.digit(5).unwrap(), 0);
        // truncated query beyond depth
        let tr = DigitStream::truncated(vec![1, 0, 1]).unwrap();
        assert_eq!(
            tr.digit(5),
            Err(Error::DepthExceeded {
                depth: 3,
                requested: 5
            })
        );
    }

    #[test]
    fn one_tail_convention() {
        // 1/4 with ones tail: 0.00111...
        let x = DigitStream::dyadic(BigUint::from(1u32), 2, Convention::OneTail).unwrap();
        assert_eq!(x.digit(1).unwrap(), 0);
        assert_eq!(x.digit(2).unwrap(), 0);
        assert_eq!(x.digit(3).unwrap(), 1);
        assert_eq!(x.digit(100).unwrap(), 1);
        assert_eq!(x.exact_value().unwrap(), ratio(1, 4));
    }

    #[test]
    fn shift_examples() {
        let third = DigitStream::rational(&ratio(1, 3)).unwrap();
        let shifted = third.shift(1).unwrap();
        assert_eq!(shifted.exact_value().unwrap(), ratio(2, 3));
        let quarter = fd(1, 2);
        assert_eq!(quarter.shift(2).unwrap().exact_value().unwrap(), ratio(0, 1));
        assert_eq!(quarter.shift(0).unwrap(), quarter);
        // endpoint fixed points
        let one = fd(1, 0);
        assert_eq!(one.shift(5).unwrap().exact_value().unwrap(), ratio(1, 1));
    }

    #[test]
    fn shift_semigroup() {
        let x = DigitStream::rational(&ratio(5, 7)).unwrap();
        for (a, b) in [(1u64, 2u64), (3, 4), (2, 5)] {
            let left = x.shift(a).unwrap().shift(b).unwrap();
            let right = x.shift(a + b).unwrap();
            for l in 1..=40 {
                assert_eq!(left.digit(l).unwrap(), right.digit(l).unwrap());
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(fd(1, 2).classify(), Membership::Dyadic);
        let third = DigitStream::rational(&ratio(1, 3)).unwrap();
        assert_eq!(third.classify(), Membership::MaximaSet);
        // digits 001 repeating = 1/7
        let x = DigitStream::rational(&ratio(1, 7)).unwrap();
        assert_eq!(x.classify(), Membership::Neither);
        let tr = DigitStream::truncated(vec![1, 0, 1]).unwrap();
        assert_eq!(tr.classify(), Membership::Unknown(3));
        let r2 = DigitStream::with_rates(Some(&ratio(2, 1)), None).unwrap();
        assert_eq!(r2.classify(), Membership::Neither);
    }

    #[test]
    fn maxima_membership_exhaustive_small() {
        // exhaustive over preambles of length <= 6 and periods of length <= 4:
        // the digit characterization agrees with the arithmetic one
        for plen in 0..=6u32 {
            for pbits in 0..(1u32 << plen) {
                let preamble: Vec<u8> =
                    (0..plen).map(|i| ((pbits >> (plen - 1 - i)) & 1) as u8).collect();
                for qlen in 1..=4u32 {
                    for qbits in 0..(1u32 << qlen) {
                        let period: Vec<u8> =
                            (0..qlen).map(|i| ((qbits >> (qlen - 1 - i)) & 1) as u8).collect();
                        let st = DigitStream::EventuallyPeriodic {
                            preamble: preamble.clone(),
                            period: period.clone(),
                        };
                        let v = st.exact_value().unwrap();
                        let is_max = st.classify() == Membership::MaximaSet;
                        assert_eq!(
                            is_max,
                            is_maxima_rational(&v),
                            "preamble {preamble:?} period {period:?} value {v}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nearest_dyadic_examples() {
        let third = DigitStream::rational(&ratio(1, 3)).unwrap();
        let (k, d) = third.nearest_dyadic(2, 96).unwrap();
        assert_eq!(k, BigInt::from(1));
        assert!(d.contains_rational(&ratio(1, 12)));
        assert!(d.width().log2_f64() < -80.0);

        let quarter = fd(1, 2);
        let (k2, d2) = quarter.nearest_dyadic(2, 96).unwrap();
        assert_eq!(k2, BigInt::from(1));
        assert!(d2.contains_rational(&ratio(0, 1)));
        assert!(d2.hi.is_zero());

        // truncated 0.011, depth 3: value in [3/8, 1/2], distance to the
        // half-integer grid is anywhere in [0, 1/8]
        let tr = DigitStream::truncated(vec![0, 1, 1]).unwrap();
        let (k3, d3) = tr.nearest_dyadic(1, 32).unwrap();
        assert_eq!(k3, BigInt::from(1));
        assert!(d3.lo.is_zero());
        assert!(d3.contains_rational(&ratio(1, 8)));
        assert!(d3.hi.to_rational() == ratio(1, 8));
    }

    #[test]
    fn nearest_maxima_examples() {
        let third = DigitStream::rational(&ratio(1, 3)).unwrap();
        let (m, d) = third.nearest_maxima_point(1, 96).unwrap();
        assert_eq!(m, ratio(1, 3)); // 1/3 = (3*0+2)/(3*2)? -> 2/6 = 1/3
        assert!(d.hi.is_zero());

        let half = fd(1, 1);
        let (m2, d2) = half.nearest_maxima_point(1, 96).unwrap();
        assert!(d2.contains_rational(&ratio(1, 6)));
        assert!(m2 == ratio(1, 3) || m2 == ratio(2, 3));

        let two_thirds = DigitStream::rational(&ratio(2, 3)).unwrap();
        let (_, d3) = two_thirds.nearest_maxima_point(3, 96).unwrap();
        assert!(d3.hi.is_zero());
    }

    #[test]
    fn rate_trace_examples() {
        // r-target 2: ones at 1, 2, 4, 8, ...; dyadic rate tends to 2
        let x = DigitStream::with_rates(Some(&ratio(2, 1)), None).unwrap();
        let tr = x.rate_trace(RateKind::Dyadic, 64, 96).unwrap();
        assert!(tr.summary.finite);
        assert!(
            tr.summary.hi > 1.7 && tr.summary.lo < 2.1,
            "estimate [{}, {}]",
            tr.summary.lo,
            tr.summary.hi
        );
        // 1/3 sits on the maxima set at every scale
        let third = DigitStream::rational(&ratio(1, 3)).unwrap();
        let tm = third.rate_trace(RateKind::Maxima, 24, 96).unwrap();
        assert!(!tm.summary.finite);
        // the 001-repeating point has both rates 1
        let x7 = DigitStream::rational(&ratio(1, 7)).unwrap();
        for kind in [RateKind::Dyadic, RateKind::Maxima] {
            let t = x7.rate_trace(kind, 48, 96).unwrap();
            assert!(t.summary.finite);
            assert!(t.summary.lo >= 1.0 - 1e-9 && t.summary.hi < 1.35);
        }
    }

    #[test]
    fn rates_are_at_least_one() {
        let pts = [
            DigitStream::rational(&ratio(1, 7)).unwrap(),
            DigitStream::rational(&ratio(3, 5)).unwrap(),
            DigitStream::with_rates(Some(&ratio(5, 2)), None).unwrap(),
            DigitStream::with_rates(None, Some(&ratio(2, 1))).unwrap(),
        ];
        for p in pts {
            for kind in [RateKind::Dyadic, RateKind::Maxima] {
                let t = p.rate_trace(kind, 40, 96).unwrap();
                for e in &t.entries {
                    if let Some(r) = &e.ratio {
                        assert!(
                            r.hi.to_f64_lossy() >= 1.0 - 1e-9,
                            "rate below 1 at j={}",
                            e.j
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn constructed_rates_converge() {
        // two-rate construction r=3, s=2: both traces approach targets
        let x = DigitStream::with_rates(Some(&ratio(3, 1)), Some(&ratio(2, 1))).unwrap();
        assert_eq!(x.classify(), Membership::Neither);
        let tr = x.rate_trace(RateKind::Dyadic, 220, 96).unwrap();
        assert!(tr.summary.finite);
        assert!(
            tr.summary.hi > 2.4 && tr.summary.lo < 3.2,
            "r-rate window [{}, {}]",
            tr.summary.lo,
            tr.summary.hi
        );
        let ts = x.rate_trace(RateKind::Maxima, 220, 96).unwrap();
        assert!(
            ts.summary.hi > 1.6 && ts.summary.lo < 2.2,
            "s-rate window [{}, {}]",
            ts.summary.lo,
            ts.summary.hi
        );
        // s-only construction
        let y = DigitStream::with_rates(None, Some(&ratio(2, 1))).unwrap();
        let ty = y.rate_trace(RateKind::Maxima, 128, 96).unwrap();
        assert!(ty.summary.hi > 1.7 && ty.summary.lo < 2.2);
        let tyd = y.rate_trace(RateKind::Dyadic, 128, 96).unwrap();
        assert!(tyd.summary.hi < 1.35, "dyadic rate should stay near 1");
    }

    #[test]
    fn invalid_targets_rejected() {
        assert!(matches!(
            DigitStream::with_rates(Some(&ratio(1, 1)), None),
            Err(Error::InvalidTarget(_))
        ));
        assert!(matches!(
            DigitStream::with_rates(None, Some(&ratio(1, 2))),
            Err(Error::InvalidTarget(_))
        ));
    }

    #[test]
    fn parse_grammar_roundtrip() {
        for spec in [
            "dyadic:5/2^4",
            "rational:1/3",
            "smax:3:2:1",
            "rule:r=2",
            "rule:s=2",
            "rule:r=3,s=3",
            "bits:0.0110",
        ] {
            let p = parse_point(spec).expect(spec);
            let _ = p.classify();
        }
        assert!(parse_point("dyadic:3/2^1").is_err()); // outside [0,1]
        assert!(parse_point("nonsense").is_err());
        assert!(parse_point("rule:q=2").is_err());
        // decimal rate targets
        let p = parse_point("rule:r=2.5").unwrap();
        assert_eq!(p.classify(), Membership::Neither);
    }

    #[test]
    fn smax_points_live_in_maxima_set() {
        let x = DigitStream::maxima_point(3, BigUint::from(2u32), 1).unwrap();
        assert_eq!(x.classify(), Membership::MaximaSet);
        let v = x.exact_value().unwrap();
        assert_eq!(v, ratio(2, 8) + ratio(1, 24));
        let y = DigitStream::maxima_point(0, BigUint::zero(), 2).unwrap();
        assert_eq!(y.exact_value().unwrap(), ratio(2, 3));
    }

    #[test]
    fn truncation_uncertainty_is_explicit() {
        let tr = DigitStream::truncated(vec![0, 1, 1]).unwrap();
        let b = tr.value_bracket(3, 64).unwrap();
        assert_eq!(b.lo.to_rational(), ratio(3, 8));
        assert_eq!(b.hi.to_rational(), ratio(1, 2));
        assert!(tr.value_bracket(9, 64).is_err());
    }

    #[test]
    fn probe_scales_exposed() {
        let x = DigitStream::with_rates(Some(&ratio(3, 1)), Some(&ratio(3, 1))).unwrap();
        let sc = x.probe_scales(600);
        assert_eq!(sc.omega, vec![6, 54, 486]);
        assert_eq!(sc.omega_c, vec![18, 162]);
        let y = DigitStream::with_rates(Some(&ratio(2, 1)), None).unwrap();
        let sy = y.probe_scales(64);
        assert_eq!(sy.omega_c, vec![4, 8, 16, 32, 64]);
        assert!(sy.omega.is_empty());
    }
}
