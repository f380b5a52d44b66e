//! Exact quadratic irrationals `(p + q√d)/s` and the real quadratic field
//! ℚ(√d) they live in. Every comparison reduces to integer arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{floor_q, isqrt, Q};

/// Sign of `a + b√d` for integers `a`, `b` and a non-square `d > 1`.
fn sign_int(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    match (a.cmp(&zero), b.cmp(&zero)) {
        (Ordering::Equal, sb) => sb,
        (sa, Ordering::Equal) => sa,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        // Opposite signs: the larger magnitude wins. |a| = |b|√d is impossible.
        (Ordering::Greater, Ordering::Less) => (a * a).cmp(&(b * b * d)),
        (Ordering::Less, Ordering::Greater) => (b * b * d).cmp(&(a * a)),
    }
}

/// Writes `n = k² · m` with `m` squarefree; returns `(k, m)`.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut m = n.clone();
    let mut f = BigInt::from(2);
    while &f * &f <= m {
        let f2 = &f * &f;
        while (&m % &f2).is_zero() {
            m /= &f2;
            k *= &f;
        }
        f += 1;
    }
    (k, m)
}

/// An element `rat + irr·√d` of ℚ(√d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadNumber {
    pub rat: Q,
    pub irr: Q,
    pub d: BigInt,
}

impl QuadNumber {
    pub fn rational(x: Q, d: &BigInt) -> Self {
        QuadNumber { rat: x, irr: Q::zero(), d: d.clone() }
    }

    pub fn signum(&self) -> Ordering {
        let den = self.rat.denom() * self.irr.denom();
        let a = self.rat.numer() * (&den / self.rat.denom());
        let b = self.irr.numer() * (&den / self.irr.denom());
        sign_int(&a, &b, &self.d)
    }

    pub fn sub(&self, other: &QuadNumber) -> QuadNumber {
        debug_assert_eq!(self.d, other.d);
        QuadNumber { rat: &self.rat - &other.rat, irr: &self.irr - &other.irr, d: self.d.clone() }
    }

    pub fn sub_q(&self, x: &Q) -> QuadNumber {
        QuadNumber { rat: &self.rat - x, irr: self.irr.clone(), d: self.d.clone() }
    }

    pub fn scale(&self, c: &Q) -> QuadNumber {
        QuadNumber { rat: &self.rat * c, irr: &self.irr * c, d: self.d.clone() }
    }

    pub fn abs(&self) -> QuadNumber {
        if self.signum() == Ordering::Less {
            self.scale(&-Q::one())
        } else {
            self.clone()
        }
    }

    pub fn cmp_q(&self, x: &Q) -> Ordering {
        self.sub_q(x).signum()
    }

    /// `floor(self)` using an integer square root.
    pub fn floor(&self) -> BigInt {
        if self.irr.is_zero() {
            return floor_q(&self.rat);
        }
        // self = (A + B√d)/D with D > 0.
        let den = self.rat.denom().lcm(self.irr.denom());
        let a = self.rat.numer() * (&den / self.rat.denom());
        let b = self.irr.numer() * (&den / self.irr.denom());
        let root = isqrt(&(&b * &b * &self.d));
        // B√d is irrational, so floor(B√d) is root or -root - 1.
        let floor_b = if b.is_positive() { root } else { -root - 1 };
        (a + floor_b).div_floor(&den)
    }

    /// A rational `t` with `self·9/10 < t ≤ self`; requires `self > 0`.
    pub fn rational_below(&self) -> Q {
        assert_eq!(self.signum(), Ordering::Greater, "rational_below needs a positive number");
        let ten = BigInt::from(10);
        let mut den = BigInt::one();
        loop {
            let t = self.scale(&Q::from_integer(den.clone())).floor();
            if t >= ten {
                return Q::new(t, den);
            }
            den *= &ten;
        }
    }
}

impl PartialOrd for QuadNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum()
    }
}

/// `(p + q√d)/s` with `q ≠ 0`, `s > 0`, `d > 1` squarefree and
/// `gcd(p, q, s) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIrrational {
    p: BigInt,
    q: BigInt,
    s: BigInt,
    d: BigInt,
}

impl QuadIrrational {
    /// Normalizes the square part of `d` into `q` and the common factor of
    /// `(p, q, s)` away.
    pub fn new(p: BigInt, q: BigInt, s: BigInt, d: BigInt) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        if d < BigInt::from(2) {
            return Err(Error::Domain(format!("radicand {d} must exceed 1")));
        }
        let (k, m) = square_part(&d);
        if m.is_one() {
            return Err(Error::Domain(format!("sqrt({d}) is rational")));
        }
        if q.is_zero() {
            return Err(Error::Domain("coefficient of the square root is zero".into()));
        }
        let (mut p, mut q, mut s) = (p, q * k, s);
        if s.is_negative() {
            p = -p;
            q = -q;
            s = -s;
        }
        let g = p.gcd(&q).gcd(&s);
        Ok(QuadIrrational { p: p / &g, q: q / &g, s: s / &g, d: m })
    }

    pub fn sqrt(d: i64) -> Result<Self> {
        Self::new(BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::from(d))
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn s(&self) -> &BigInt {
        &self.s
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn to_quad(&self) -> QuadNumber {
        QuadNumber {
            rat: Q::new(self.p.clone(), self.s.clone()),
            irr: Q::new(self.q.clone(), self.s.clone()),
            d: self.d.clone(),
        }
    }

    /// Sign of `self − x`. Never `Equal`.
    pub fn cmp_q(&self, x: &Q) -> Ordering {
        // (p + q√d)/s − n/m = (pm − sn + qm√d)/(sm) with s, m > 0.
        let (n, m) = (x.numer(), x.denom());
        let a = &self.p * m - &self.s * n;
        let b = &self.q * m;
        sign_int(&a, &b, &self.d)
    }

    pub fn gt_q(&self, x: &Q) -> bool {
        self.cmp_q(x) == Ordering::Greater
    }

    pub fn lt_q(&self, x: &Q) -> bool {
        self.cmp_q(x) == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.gt_q(&Q::zero())
    }

    /// Order of the fraction `num/den` (with `den > 0`) relative to `self`.
    pub fn cmp_fraction(&self, num: i64, den: i64) -> Ordering {
        debug_assert!(den > 0);
        self.cmp_q(&Q::new(num.into(), den.into())).reverse()
    }

    pub fn floor(&self) -> BigInt {
        self.to_quad().floor()
    }

    /// Rationals `lo < self < hi` with `hi − lo = 1/den`.
    pub fn bracket(&self, den: &BigInt) -> (Q, Q) {
        let lo = self.to_quad().scale(&Q::from_integer(den.clone())).floor();
        let hi = &lo + 1;
        (Q::new(lo, den.clone()), Q::new(hi, den.clone()))
    }

    /// A bracket `lo < self < hi` of width at most `width`.
    pub fn bracket_within(&self, width: &Q) -> (Q, Q) {
        assert!(width.is_positive());
        let den = (Q::one() / width).ceil().to_integer();
        self.bracket(&den)
    }

    /// Parses `sqrt:d`, `sqrt(d)`, or `(p ± q*sqrt(d))/s` and its
    /// abbreviations such as `(1+sqrt(5))/2` and `sqrt(7)/2`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("not a quadratic irrational ({why}): {text:?}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(d) = s.strip_prefix("sqrt:") {
            let d: BigInt = d.parse().map_err(|_| bad("radicand"))?;
            return Self::new(BigInt::zero(), BigInt::one(), BigInt::one(), d);
        }
        let (numer, denom) = match s.rfind('/') {
            Some(i) if !s[i + 1..].contains(')') => (&s[..i], Some(&s[i + 1..])),
            _ => (s.as_str(), None),
        };
        let denom: BigInt = match denom {
            Some(t) => t.parse().map_err(|_| bad("denominator"))?,
            None => BigInt::one(),
        };
        let numer = match numer.strip_prefix('(') {
            Some(rest) => rest.strip_suffix(')').ok_or_else(|| bad("unbalanced parentheses"))?,
            None => numer,
        };
        let mut p = BigInt::zero();
        let mut surd: Option<(BigInt, BigInt)> = None;
        for term in split_signed_terms(numer) {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(bad("empty term"));
            }
            let value_sign = if neg { -BigInt::one() } else { BigInt::one() };
            if let Some(i) = body.find("sqrt(") {
                let coeff = match &body[..i] {
                    "" => BigInt::one(),
                    c => c
                        .strip_suffix('*')
                        .ok_or_else(|| bad("coefficient"))?
                        .parse()
                        .map_err(|_| bad("coefficient"))?,
                };
                let d: BigInt = body[i + 5..]
                    .strip_suffix(')')
                    .ok_or_else(|| bad("radicand"))?
                    .parse()
                    .map_err(|_| bad("radicand"))?;
                if surd.is_some() {
                    return Err(bad("more than one square root"));
                }
                surd = Some((value_sign * coeff, d));
            } else {
                let v: BigInt = body.parse().map_err(|_| bad("integer term"))?;
                p += value_sign * v;
            }
        }
        let (q, d) = surd.ok_or_else(|| bad("no square root"))?;
        Self::new(p, q, denom, d)
    }
}

/// Splits `a+b-c` into `["a", "+b", "-c"]`, ignoring signs inside parentheses.
fn split_signed_terms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > start && !s[..i].ends_with('*') => {
                out.push(&s[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for QuadIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = match (self.q.is_one(), (-&self.q).is_one()) {
            (true, _) => format!("sqrt({})", self.d),
            (_, true) => format!("-sqrt({})", self.d),
            _ => format!("{}*sqrt({})", self.q, self.d),
        };
        let numer = match (self.p.is_zero(), self.q.is_negative()) {
            (true, _) => surd,
            (false, true) => format!("{}{}", self.p, surd),
            (false, false) => format!("{}+{}", self.p, surd),
        };
        let numer = if self.s.is_one() || self.p.is_zero() { numer } else { format!("({numer})") };
        if self.s.is_one() {
            write!(f, "{numer}")
        } else {
            write!(f, "{numer}/{}", self.s)
        }
    }
}

impl std::str::FromStr for QuadIrrational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for QuadIrrational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadIrrational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn parsing_forms() {
        let r2 = QuadIrrational::sqrt(2).unwrap();
        assert_eq!(QuadIrrational::parse("sqrt:2").unwrap(), r2);
        assert_eq!(QuadIrrational::parse("sqrt(2)").unwrap(), r2);
        assert_eq!(QuadIrrational::parse("(0+1*sqrt(2))/1").unwrap(), r2);
        let phi = QuadIrrational::parse("(1+sqrt(5))/2").unwrap();
        assert_eq!((phi.p(), phi.q(), phi.s(), phi.d()), (&big(1), &big(1), &big(2), &big(5)));
        let h = QuadIrrational::parse("sqrt(7)/2").unwrap();
        assert_eq!((h.p(), h.q(), h.s()), (&big(0), &big(1), &big(2)));
        let m = QuadIrrational::parse("(3 - 2*sqrt(2))/5").unwrap();
        assert_eq!((m.p(), m.q()), (&big(3), &big(-2)));
        assert_eq!(QuadIrrational::parse("-sqrt(3)+1").unwrap().to_string(), "1-sqrt(3)");
    }

    #[test]
    fn normalization() {
        // √8 = 2√2, and (2 + 4√2)/6 = (1 + 2√2)/3.
        let r = QuadIrrational::parse("(2+2*sqrt(8))/6").unwrap();
        assert_eq!(r.to_string(), "(1+2*sqrt(2))/3");
        assert!(QuadIrrational::sqrt(9).is_err());
        assert!(QuadIrrational::sqrt(1).is_err());
        assert!(QuadIrrational::parse("(1+0*sqrt(2))/1").is_err());
        assert!(QuadIrrational::parse("1.41").is_err());
        assert!(QuadIrrational::parse("sqrt(2)/0").is_err());
    }

    #[test]
    fn display_round_trips() {
        for t in ["sqrt(2)", "(1+sqrt(5))/2", "sqrt(7)/2", "(3-2*sqrt(2))/5", "-sqrt(3)", "3*sqrt(2)"] {
            let r = QuadIrrational::parse(t).unwrap();
            assert_eq!(QuadIrrational::parse(&r.to_string()).unwrap(), r);
        }
    }

    #[test]
    fn comparisons() {
        let r2 = QuadIrrational::sqrt(2).unwrap();
        assert!(r2.gt_q(&frac(7, 5)));
        assert!(r2.lt_q(&frac(17, 12)));
        assert!(r2.gt_q(&frac(24, 17)));
        assert_eq!(r2.cmp_fraction(17, 12), Ordering::Greater);
        let phi = QuadIrrational::parse("(1+sqrt(5))/2").unwrap();
        assert!(phi.gt_q(&frac(8, 5)) && phi.lt_q(&frac(13, 8)));
        let neg = QuadIrrational::parse("(1-sqrt(5))/2").unwrap();
        assert!(neg.lt_q(&frac(-3, 5)) && neg.gt_q(&frac(-5, 8)));
    }

    #[test]
    fn floors_and_brackets() {
        assert_eq!(QuadIrrational::sqrt(2).unwrap().floor(), big(1));
        assert_eq!(QuadIrrational::parse("-sqrt(2)").unwrap().floor(), big(-2));
        assert_eq!(QuadIrrational::parse("(1+sqrt(5))/2").unwrap().floor(), big(1));
        assert_eq!(QuadIrrational::parse("(7-sqrt(5))/3").unwrap().floor(), big(1));
        let r2 = QuadIrrational::sqrt(2).unwrap();
        let (lo, hi) = r2.bracket(&big(1000));
        assert_eq!((lo.clone(), hi.clone()), (frac(1414, 1000), frac(1415, 1000)));
        let (lo, hi) = r2.bracket_within(&frac(1, 30));
        assert!(r2.gt_q(&lo) && r2.lt_q(&hi) && &hi - &lo <= frac(1, 30));
    }

    #[test]
    fn field_arithmetic() {
        let r2 = QuadIrrational::sqrt(2).unwrap().to_quad();
        let dist = r2.sub_q(&frac(7, 5)).abs();
        assert_eq!(dist.signum(), Ordering::Greater);
        let t = dist.rational_below();
        assert!(dist.cmp_q(&t) != Ordering::Less);
        assert!(dist.scale(&frac(9, 10)).cmp_q(&t) == Ordering::Less);
        let far = r2.sub_q(&q(3)).abs();
        assert!(far > dist);
        assert_eq!(QuadNumber::rational(q(2), &r2.d).floor(), big(2));
    }
}
