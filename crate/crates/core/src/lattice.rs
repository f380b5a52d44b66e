//! Arithmetic on K₀ ≅ ℤⁿ: the Euler form, its quadratic form χ, the
//! radical pair h0, h∞, the index (slope) ι and total dimension μ.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};

/// An element of K₀; serialized as a JSON integer array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(pub Vec<i64>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, c: i64) -> Self {
        DimVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, rhs: &DimVector) -> DimVector {
        assert_eq!(self.len(), rhs.len());
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DimVector {
    type Output = DimVector;
    fn sub(self, rhs: &DimVector) -> DimVector {
        assert_eq!(self.len(), rhs.len());
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &DimVector {
    type Output = DimVector;
    fn neg(self) -> DimVector {
        self.scale(-1)
    }
}

/// A point of ℚ ∪ {∞}. Finite values are kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slope {
    Finite(Q),
    Infinity,
}

impl Slope {
    /// `num / den`, with `den = 0` mapping to ∞ when `num > 0`.
    pub fn from_parts(num: i64, den: i64) -> Result<Slope> {
        Self::from_big(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Slope> {
        match (num.is_zero(), den.is_zero()) {
            (true, true) => Err(Error::UndefinedSlope),
            (false, true) if num.is_positive() => Ok(Slope::Infinity),
            (false, true) => Err(Error::Domain("negative numerator over zero denominator".into())),
            _ => Ok(Slope::Finite(Q::new(num, den))),
        }
    }

    /// `num / den` for rationals, with the same conventions as [`Slope::from_big`].
    pub fn from_ratio(num: &Q, den: &Q) -> Result<Slope> {
        let l = num.denom().lcm(den.denom());
        Self::from_big(num.numer() * (&l / num.denom()), den.numer() * (&l / den.denom()))
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Slope::Finite(q) => Some(q),
            Slope::Infinity => None,
        }
    }

    pub fn parse(s: &str) -> Result<Slope> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Slope::Infinity),
            other => Ok(Slope::Finite(parse_q(other)?)),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
            (Slope::Finite(_), Slope::Infinity) => Ordering::Less,
            (Slope::Infinity, Slope::Finite(_)) => Ordering::Greater,
            (Slope::Infinity, Slope::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => write!(f, "{}", format_q(q)),
            Slope::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Slope::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// The canonical radical pair and their pairing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadicalBasis {
    pub h0: DimVector,
    pub hinf: DimVector,
    pub pairing: i64,
}

/// K₀ of a tubular algebra together with its Euler form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Lattice {
    euler: Vec<Vec<i64>>,
    radical: RadicalBasis,
}

impl K0Lattice {
    /// Requires χ(h0) = χ(h∞) = 0, ⟨h0, h∞⟩ > 0 and ⟨h∞, h0⟩ = −⟨h0, h∞⟩.
    pub fn new(euler: Vec<Vec<i64>>, h0: DimVector, hinf: DimVector) -> Result<Self> {
        let n = euler.len();
        if euler.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("Euler matrix must be square".into()));
        }
        for v in [&h0, &hinf] {
            if v.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: v.len() });
            }
        }
        let lat = Self::new_unchecked(euler, h0, hinf);
        let (h0, hinf) = (lat.h0(), lat.hinf());
        let chi0 = lat.quadratic(h0)?;
        let chi_inf = lat.quadratic(hinf)?;
        if chi0 != 0 || chi_inf != 0 {
            return Err(Error::DataInconsistency(format!(
                "radical vectors are not radical: chi(h0) = {chi0}, chi(hinf) = {chi_inf}"
            )));
        }
        let p = lat.radical.pairing;
        if p <= 0 {
            return Err(Error::DataInconsistency(format!("<h0, hinf> = {p} is not positive")));
        }
        if lat.bilinear(hinf, h0)? != -p {
            return Err(Error::DataInconsistency("<hinf, h0> != -<h0, hinf>".into()));
        }
        Ok(lat)
    }

    /// Skips the radical checks; used while validating suspect data.
    pub fn new_unchecked(euler: Vec<Vec<i64>>, h0: DimVector, hinf: DimVector) -> Self {
        let pairing = bilinear_raw(&euler, &h0.0, &hinf.0);
        K0Lattice { euler, radical: RadicalBasis { h0, hinf, pairing } }
    }

    pub fn rank(&self) -> usize {
        self.euler.len()
    }

    pub fn euler_matrix(&self) -> &[Vec<i64>] {
        &self.euler
    }

    pub fn radical(&self) -> &RadicalBasis {
        &self.radical
    }

    pub fn h0(&self) -> &DimVector {
        &self.radical.h0
    }

    pub fn hinf(&self) -> &DimVector {
        &self.radical.hinf
    }

    /// ⟨h0, h∞⟩.
    pub fn pairing(&self) -> i64 {
        self.radical.pairing
    }

    fn check_len(&self, x: &DimVector) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::LengthMismatch { expected: self.rank(), got: x.len() });
        }
        Ok(())
    }

    /// ⟨x, y⟩ = xᵀ E y.
    pub fn bilinear(&self, x: &DimVector, y: &DimVector) -> Result<i64> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(bilinear_raw(&self.euler, &x.0, &y.0))
    }

    /// χ(x) = ⟨x, x⟩.
    pub fn quadratic(&self, x: &DimVector) -> Result<i64> {
        self.bilinear(x, x)
    }

    /// ι(x) = −⟨h0, x⟩ / ⟨h∞, x⟩, evaluated as ⟨h0, x⟩ / −⟨h∞, x⟩ so that a
    /// vanishing denominator with ⟨h0, x⟩ > 0 (e.g. h∞ itself) reads as ∞.
    pub fn slope(&self, x: &DimVector) -> Result<Slope> {
        let num = self.bilinear(self.h0(), x)?;
        let den = -self.bilinear(self.hinf(), x)?;
        Slope::from_parts(num, den)
    }

    /// μ(x) = Σ xᵢ, the total dimension.
    pub fn mu(&self, x: &DimVector) -> i64 {
        x.0.iter().sum()
    }

    /// a·h0 + b·h∞.
    pub fn combine(&self, a: i64, b: i64) -> DimVector {
        &self.h0().scale(a) + &self.hinf().scale(b)
    }

    /// μ(a·h0 + b·h∞) without forming the vector.
    pub fn mu_radical(&self, a: i64, b: i64) -> i64 {
        a * self.mu(self.h0()) + b * self.mu(self.hinf())
    }

    /// Writes a radical vector as a·h0 + b·h∞ using its last two coordinates:
    /// `a = x[n-1] − x[n]`, `b = x[n]`.
    pub fn radical_decompose(&self, x: &DimVector) -> Result<(i64, i64)> {
        let chi = self.quadratic(x)?;
        if chi != 0 {
            return Err(Error::Precondition(format!("chi(x) = {chi}, expected 0")));
        }
        let (a, b) = self.last_coordinate_split(x)?;
        if self.combine(a, b) != *x {
            return Err(Error::DataInconsistency(format!("radical vector {:?} is not {a}·h0 + {b}·hinf", x.0)));
        }
        Ok((a, b))
    }

    pub(crate) fn last_coordinate_split(&self, x: &DimVector) -> Result<(i64, i64)> {
        let n = self.rank();
        if n < 2 {
            return Err(Error::Unsupported("need at least two vertices".into()));
        }
        Ok((x.0[n - 2] - x.0[n - 1], x.0[n - 1]))
    }
}

fn bilinear_raw(e: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            s += xi * e[i][j] * yj;
        }
    }
    s
}
