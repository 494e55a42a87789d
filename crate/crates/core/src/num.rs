//! Exact numbers used by the rational quantales.
//!
//! [`Rational`] is an arbitrary-precision fraction. [`Real`] extends it with
//! rational multiples of logarithms of primes, `q + Σ c_p·ln p`, which is
//! enough to keep the isomorphism `u ↦ -ln u` between `[0,1]` under
//! multiplication and the extended half-line exact. Since `1, ln 2, ln 3, …`
//! are linearly independent over the rationals, the canonical form makes
//! structural equality coincide with numeric equality; order is decided by
//! certified interval refinement. [`Extended`] adjoins `+∞`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NumError {
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("logarithm of non-positive value `{0}`")]
    LogDomain(String),
    #[error("logarithm argument `{0}` is too large to factor")]
    LogTooLarge(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.75`.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let bad = || NumError::Malformed(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let w: BigInt = match whole.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            w => w.parse().map_err(|_| bad())?,
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w * &scale + f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `q + Σ c_p·ln p` over primes `p`, kept canonical (no zero coefficients).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Real {
    rational: Rational,
    logs: BTreeMap<u64, Rational>,
}

impl Real {
    pub fn zero() -> Self {
        Real::default()
    }

    pub fn rational(&self) -> &Rational {
        &self.rational
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    /// `ln(u)` for a positive rational `u`, via prime factorisation.
    pub fn ln(u: &Rational) -> Result<Self, NumError> {
        if !u.is_positive() {
            return Err(NumError::LogDomain(format_rational(u)));
        }
        let mut logs = BTreeMap::new();
        for (p, e) in factor(u.numer())? {
            *logs.entry(p).or_insert_with(Rational::zero) += int(e as i64);
        }
        for (p, e) in factor(u.denom())? {
            *logs.entry(p).or_insert_with(Rational::zero) -= int(e as i64);
        }
        logs.retain(|_, c| !c.is_zero());
        Ok(Real {
            rational: Rational::zero(),
            logs,
        })
    }

    pub fn signum(&self) -> Ordering {
        if self.logs.is_empty() {
            return self.rational.cmp(&Rational::zero());
        }
        self.float_signum().unwrap_or_else(|| self.refined_signum())
    }

    fn refined_signum(&self) -> Ordering {
        // Nonzero by linear independence, so refinement terminates.
        let mut terms = 8usize;
        loop {
            let (lo, hi) = self.enclosure(terms);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            assert!(terms < 1 << 14, "sign refinement did not converge");
            terms *= 2;
        }
    }

    /// The sign when a double-precision estimate is far enough from zero that
    /// rounding cannot change it. Each term carries a relative error of a few
    /// ulps, so a margin of `1e-9` times the sum of magnitudes is safe.
    fn float_signum(&self) -> Option<Ordering> {
        let mut sum = self.rational.to_f64()?;
        let mut scale = sum.abs();
        for (&p, c) in &self.logs {
            let t = c.to_f64()? * (p as f64).ln();
            sum += t;
            scale += t.abs();
        }
        if !sum.is_finite() || !scale.is_finite() || sum.abs() <= 1e-9 * scale {
            return None;
        }
        Some(if sum > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        })
    }

    fn enclosure(&self, terms: usize) -> (Rational, Rational) {
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (&p, c) in &self.logs {
            let (l, h) = ln_prime_bounds(p, terms);
            if c.is_positive() {
                lo += c * l;
                hi += c * h;
            } else {
                lo += c * h;
                hi += c * l;
            }
        }
        (lo, hi)
    }
}

impl From<Rational> for Real {
    fn from(rational: Rational) -> Self {
        Real {
            rational,
            logs: BTreeMap::new(),
        }
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        let mut logs = self.logs.clone();
        for (p, c) in &rhs.logs {
            *logs.entry(*p).or_insert_with(Rational::zero) += c;
        }
        logs.retain(|_, c| !c.is_zero());
        Real {
            rational: &self.rational + &rhs.rational,
            logs,
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            rational: -&self.rational,
            logs: self.logs.iter().map(|(p, c)| (*p, -c)).collect(),
        }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        self + &(-rhs)
    }
}

impl Mul<&Rational> for &Real {
    type Output = Real;
    fn mul(self, k: &Rational) -> Real {
        if k.is_zero() {
            return Real::zero();
        }
        Real {
            rational: &self.rational * k,
            logs: self.logs.iter().map(|(p, c)| (*p, c * k)).collect(),
        }
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.logs == other.logs {
            return self.rational.cmp(&other.rational);
        }
        (self - other).signum()
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.rational.is_zero() || self.logs.is_empty() {
            out.push_str(&format_rational(&self.rational));
        }
        for (p, c) in &self.logs {
            let (sign, mag) = if c.is_negative() {
                ('-', -c)
            } else {
                ('+', c.clone())
            };
            if !out.is_empty() || sign == '-' {
                out.push(sign);
            }
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('*');
            }
            out.push_str(&format!("ln({p})"));
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Real {
    type Err = NumError;

    /// Sums of terms `r`, `ln(r)` and `r*ln(s)` joined by `+`/`-`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(NumError::Malformed(s.to_string()));
        }
        let mut acc = Real::zero();
        let mut term = String::new();
        let mut depth = 0usize;
        let mut terms = Vec::new();
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                '+' | '-' if depth == 0 && i > 0 && !term.is_empty() => {
                    terms.push(std::mem::take(&mut term));
                }
                _ => {}
            }
            term.push(ch);
        }
        terms.push(term);
        for raw in terms {
            let (neg, body) = match raw.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, raw.strip_prefix('+').unwrap_or(&raw)),
            };
            let value = parse_term(body).map_err(|_| NumError::Malformed(s.to_string()))?;
            acc = if neg { &acc - &value } else { &acc + &value };
        }
        Ok(acc)
    }
}

fn parse_term(body: &str) -> Result<Real, NumError> {
    if let Some(pos) = body.find("ln(") {
        let coeff = match &body[..pos] {
            "" => Rational::one(),
            c => parse_rational(c.strip_suffix('*').unwrap_or(c))?,
        };
        let arg = body[pos + 3..]
            .strip_suffix(')')
            .ok_or_else(|| NumError::Malformed(body.to_string()))?;
        let ln = Real::ln(&parse_rational(arg)?)?;
        Ok(&ln * &coeff)
    } else {
        Ok(Real::from(parse_rational(body)?))
    }
}

const FACTOR_LIMIT: u64 = 1_000_000_000_000;

fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>, NumError> {
    let mut m = n
        .to_u64()
        .filter(|m| *m <= FACTOR_LIMIT)
        .ok_or_else(|| NumError::LogTooLarge(n.to_string()))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

/// Bounds for `atanh(t) = Σ t^(2k+1)/(2k+1)` with `0 ≤ t < 1`.
fn atanh_bounds(t: &Rational, terms: usize) -> (Rational, Rational) {
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = Rational::zero();
    for k in 0..terms {
        sum += &power / int(2 * k as i64 + 1);
        power = &power * &t2;
    }
    let tail = &power / (int(2 * terms as i64 + 1) * (Rational::one() - &t2));
    let hi = &sum + tail;
    (sum, hi)
}

/// `ln p = m·ln 2 + 2·atanh((r-1)/(r+1))` with `p = 2^m·r`, `1 ≤ r < 2`.
fn ln_prime_bounds(p: u64, terms: usize) -> (Rational, Rational) {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), (Rational, Rational)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&(p, terms)) {
        return hit.clone();
    }
    let bounds = compute_ln_prime_bounds(p, terms);
    cache
        .lock()
        .expect("cache lock")
        .insert((p, terms), bounds.clone());
    bounds
}

fn compute_ln_prime_bounds(p: u64, terms: usize) -> (Rational, Rational) {
    let (l2lo, l2hi) = atanh_bounds(&rat(1, 3), terms);
    let (l2lo, l2hi) = (l2lo * int(2), l2hi * int(2));
    let m = 63 - p.leading_zeros() as i64;
    let r = Rational::new(BigInt::from(p), BigInt::from(1u64 << m));
    let t = (&r - Rational::one()) / (&r + Rational::one());
    let (alo, ahi) = atanh_bounds(&t, terms);
    let mm = int(m);
    (&mm * l2lo + alo * int(2), &mm * l2hi + ahi * int(2))
}

/// A point of `[0, ∞]`, ordered numerically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Real),
    Infinite,
}

impl Extended {
    pub fn zero() -> Self {
        Extended::Finite(Real::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        Extended::Finite(Real::from(r))
    }

    pub fn sum(&self, other: &Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }

    /// Truncated difference `max(self - other, 0)`, with `∞ ⊖ x = ∞` for finite `x`
    /// and `x ⊖ ∞ = 0`.
    pub fn monus(&self, other: &Self) -> Self {
        match (self, other) {
            (_, Extended::Infinite) => Extended::zero(),
            (Extended::Infinite, _) => Extended::Infinite,
            (Extended::Finite(a), Extended::Finite(b)) => {
                let d = a - b;
                if d.signum() == Ordering::Greater {
                    Extended::Finite(d)
                } else {
                    Extended::zero()
                }
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Extended::Infinite => true,
            Extended::Finite(r) => r.signum() != Ordering::Less,
        }
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
            (Extended::Infinite, _) => Ordering::Greater,
            (_, Extended::Infinite) => Ordering::Less,
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Infinite => f.write_str("inf"),
            Extended::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Extended {
    type Err = NumError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Extended::Infinite),
            t => Ok(Extended::Finite(t.parse()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_sign_agrees_with_refinement() {
        let l = |n, d| Real::ln(&rat(n, d)).unwrap();
        let mut checked = 0;
        for a in 1..12 {
            for b in 1..12 {
                for k in -6..7 {
                    // ln(a/b) + k/5, including cancellations such as ln 4 - 2 ln 2.
                    let x = &(&l(a, b) + &Real::from(rat(k, 5))) - &(&l(2, 1) * &rat(k, 3));
                    if !x.is_rational() {
                        assert_eq!(
                            x.float_signum().unwrap_or_else(|| x.refined_signum()),
                            x.refined_signum()
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.7").unwrap(), rat(7, 10));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(4)), "4");
    }

    #[test]
    fn logs_are_canonical() {
        let a = Real::ln(&rat(1, 4)).unwrap();
        let b = Real::ln(&rat(1, 2)).unwrap();
        assert_eq!(a, &b + &b);
        assert_eq!(Real::ln(&int(1)).unwrap(), Real::zero());
        assert!(Real::ln(&int(0)).is_err());
    }

    #[test]
    fn orders_mixed_values() {
        let ln2 = Real::ln(&int(2)).unwrap();
        // 0.693 < ln 2 < 0.694
        assert!(Real::from(rat(693, 1000)) < ln2);
        assert!(ln2 < Real::from(rat(694, 1000)));
        let ln3 = Real::ln(&int(3)).unwrap();
        assert!(ln2 < ln3);
        // 3 ln 2 = ln 8 < ln 9 = 2 ln 3
        assert!(&ln2 * &int(3) < &ln3 * &int(2));
        let ln97 = Real::ln(&int(97)).unwrap();
        assert!(Real::from(rat(4574, 1000)) < ln97 && ln97 < Real::from(rat(4575, 1000)));
    }

    #[test]
    fn real_round_trips_through_text() {
        for s in ["3/2", "ln(2)", "1/2+2*ln(3)-ln(2)", "-ln(5)", "0"] {
            let r: Real = s.parse().unwrap();
            let back: Real = r.to_string().parse().unwrap();
            assert_eq!(r, back, "{s}");
        }
        let r: Real = "ln(1/4)".parse().unwrap();
        assert_eq!(r.to_string(), "-2*ln(2)");
    }

    #[test]
    fn extended_arithmetic() {
        let three = Extended::from_rational(int(3));
        let five = Extended::from_rational(int(5));
        assert_eq!(five.monus(&three), Extended::from_rational(int(2)));
        assert_eq!(three.monus(&five), Extended::zero());
        assert_eq!(three.sum(&Extended::Infinite), Extended::Infinite);
        assert_eq!(Extended::Infinite.monus(&three), Extended::Infinite);
        assert!(five < Extended::Infinite);
    }
}
