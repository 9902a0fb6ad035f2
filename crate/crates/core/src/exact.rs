//! Exact arithmetic helpers: arbitrary-precision rationals, binomials, and
//! elements of a real quadratic field `Q(sqrt(u))`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SwfError};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `C(n, r)` as a big integer; zero when `r < 0` or `r > n`.
pub fn binomial(n: i64, r: i64) -> BigInt {
    if r < 0 || n < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_u64(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Ratio of two counts as an exact rational.
pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `"num/den"` rendering, always with an explicit denominator.
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| SwfError::Parse(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(SwfError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rat_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod serde_rational_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&rat_to_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| parse_rational(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod serde_bigint {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Primes tried when pulling square factors out of a radicand.
const TRIAL_DIVISION_BOUND: u32 = 2000;

/// Writes `n = c^2 * u` where `u` has no square factor among primes below
/// the trial bound and is not itself a perfect square (unless `u = 1`).
pub fn split_square(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rest = n.clone();
    let mut c = BigUint::one();
    let mut u = BigUint::one();
    let mut p = 2u32;
    while p < TRIAL_DIVISION_BOUND && BigUint::from(p) <= rest {
        let bp = BigUint::from(p);
        let mut odd = false;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            if odd {
                c *= p;
            }
            odd = !odd;
        }
        if odd {
            u *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        c *= r;
    } else {
        u *= rest;
    }
    (c, u)
}

/// `sqrt(q)` for a non-negative rational as `t * sqrt(u)` with `t` rational
/// and `u` a positive integer.
pub fn rational_sqrt(q: &Rational) -> Result<(Rational, BigInt)> {
    if q.is_negative() {
        return Err(SwfError::OutOfRange(format!(
            "square root of negative rational {}",
            rat_to_string(q)
        )));
    }
    if q.is_zero() {
        return Ok((Rational::zero(), BigInt::one()));
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let (c, u) = split_square(&(num * den));
    let t = Rational::new(
        BigInt::from_biguint(Sign::Plus, c),
        BigInt::from_biguint(Sign::Plus, den.clone()),
    );
    Ok((t, BigInt::from_biguint(Sign::Plus, u)))
}

/// An element `a + b*sqrt(u)` of `Q(sqrt(u))`, `u >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub rational: Rational,
    pub coeff: Rational,
    pub radicand: BigInt,
}

impl QuadraticSurd {
    pub fn from_rational(r: Rational) -> Self {
        QuadraticSurd { rational: r, coeff: Rational::zero(), radicand: BigInt::one() }
    }

    pub fn new(rational: Rational, coeff: Rational, radicand: BigInt) -> Self {
        QuadraticSurd { rational, coeff, radicand }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && (self.coeff.is_zero() || self.radicand.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero() || self.radicand.is_one()
    }

    /// Collapses `b*sqrt(1)` into the rational part.
    fn normalized(mut self) -> Self {
        if self.radicand.is_one() && !self.coeff.is_zero() {
            self.rational += &self.coeff;
            self.coeff = Rational::zero();
        }
        self
    }

    fn common_radicand(&self, other: &Self) -> BigInt {
        if self.coeff.is_zero() {
            other.radicand.clone()
        } else if other.coeff.is_zero() || self.radicand == other.radicand {
            self.radicand.clone()
        } else {
            panic!("mixing surds with radicands {} and {}", self.radicand, other.radicand)
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadraticSurd {
            rational: &self.rational * r,
            coeff: &self.coeff * r,
            radicand: self.radicand.clone(),
        }
    }

    /// Sign of the real number this element denotes.
    pub fn signum(&self) -> Ordering {
        let a = &self.rational;
        let b = &self.coeff;
        if b.is_zero() || self.radicand.is_zero() {
            return a.cmp(&Rational::zero());
        }
        let zero = Rational::zero();
        let u = Rational::from_integer(self.radicand.clone());
        match (a.cmp(&zero), b.cmp(&zero)) {
            (Ordering::Equal, s) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (Ordering::Greater, _) => (a * a).cmp(&(b * b * u)),
            (Ordering::Less, _) => (b * b * u).cmp(&(a * a)),
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        (self.clone() - QuadraticSurd::from_rational(r.clone())).signum()
    }

    pub fn to_f64(&self) -> f64 {
        let u = self.radicand.to_f64().unwrap_or(f64::NAN);
        rat_to_f64(&self.rational) + rat_to_f64(&self.coeff) * u.sqrt()
    }
}

impl Add for QuadraticSurd {
    type Output = QuadraticSurd;
    fn add(self, o: QuadraticSurd) -> QuadraticSurd {
        let radicand = self.common_radicand(&o);
        QuadraticSurd { rational: self.rational + o.rational, coeff: self.coeff + o.coeff, radicand }
            .normalized()
    }
}

impl Sub for QuadraticSurd {
    type Output = QuadraticSurd;
    fn sub(self, o: QuadraticSurd) -> QuadraticSurd {
        self + (-o)
    }
}

impl Neg for QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        QuadraticSurd { rational: -self.rational, coeff: -self.coeff, radicand: self.radicand }
    }
}

impl Mul for QuadraticSurd {
    type Output = QuadraticSurd;
    fn mul(self, o: QuadraticSurd) -> QuadraticSurd {
        let radicand = self.common_radicand(&o);
        let u = Rational::from_integer(radicand.clone());
        let rational = &self.rational * &o.rational + &self.coeff * &o.coeff * u;
        let coeff = &self.rational * &o.coeff + &self.coeff * &o.rational;
        QuadraticSurd { rational, coeff, radicand }.normalized()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            let v = self.clone().normalized();
            write!(f, "{}", rat_to_string(&v.rational))
        } else {
            let sign = if self.coeff.is_negative() { '-' } else { '+' };
            write!(
                f,
                "{} {sign} {}*sqrt({})",
                rat_to_string(&self.rational),
                rat_to_string(&self.coeff.abs()),
                self.radicand
            )
        }
    }
}

/// True iff `x >= c / sqrt(m)` for rational `x`, `c >= 0` and integer `m > 0`,
/// decided by comparing squares.
pub fn at_least_over_sqrt(x: &Rational, c: &Rational, m: u64) -> bool {
    if x.is_negative() {
        return c.is_zero() && x.is_zero();
    }
    x * x * int(m as i64) >= c * c
}

/// Rational wrapper that serializes as `"num/den"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exact(#[serde(with = "serde_rational")] pub Rational);

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

/// Solves `a x = b` by Gauss-Jordan elimination. `None` if `a` is singular.
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(binomial_u64(12, 4), 495);
    }

    #[test]
    fn rational_strings_roundtrip() {
        let r = rat(-6, 4);
        assert_eq!(rat_to_string(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn square_splitting() {
        let (c, u) = split_square(&BigUint::from(72u32));
        assert_eq!((c, u), (BigUint::from(6u32), BigUint::from(2u32)));
        let (c, u) = split_square(&BigUint::from(256u32));
        assert_eq!((c, u), (BigUint::from(16u32), BigUint::one()));
        // large prime squared survives trial division
        let p = BigUint::from(1_000_003u64);
        let (c, u) = split_square(&(&p * &p * 3u32));
        assert_eq!((c, u), (p, BigUint::from(3u32)));
    }

    #[test]
    fn surd_sign_and_product() {
        // sqrt(2) - 1 > 0, 1 - sqrt(2) < 0, 3/2 - sqrt(2) > 0
        let s2 = |a: i64, b: i64| QuadraticSurd::new(int(a), int(b), BigInt::from(2));
        assert_eq!(s2(-1, 1).signum(), Ordering::Greater);
        assert_eq!(s2(1, -1).signum(), Ordering::Less);
        let x = QuadraticSurd::new(rat(3, 2), int(-1), BigInt::from(2));
        assert_eq!(x.signum(), Ordering::Greater);
        // (1 + sqrt 2)(1 - sqrt 2) = -1
        let p = s2(1, 1) * s2(1, -1);
        assert!(p.is_rational());
        assert_eq!(p.rational, int(-1));
    }

    #[test]
    fn sqrt_of_rationals() {
        let (t, u) = rational_sqrt(&rat(9, 4)).unwrap();
        assert_eq!((t, u), (rat(3, 2), BigInt::one()));
        let (t, u) = rational_sqrt(&rat(1, 2)).unwrap();
        assert_eq!((t, u), (rat(1, 2), BigInt::from(2)));
        assert!(rational_sqrt(&rat(-1, 2)).is_err());
    }

    #[test]
    fn threshold_over_sqrt() {
        // 0.9623 <= 5/(3 sqrt 3) ~ 0.96225 ?
        assert!(at_least_over_sqrt(&int(1), &rat(5, 3), 3));
        assert!(!at_least_over_sqrt(&rat(96, 100), &rat(5, 3), 3));
        assert!(at_least_over_sqrt(&rat(9623, 10000), &rat(5, 3), 3));
    }

    #[test]
    fn linear_solve() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve_linear(a, vec![int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let singular = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve_linear(singular, vec![int(1), int(1)]).is_none());
    }
}
