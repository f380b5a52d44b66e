//! The exceptional set Ω = {x : χ(x) = 1, x[n-1] = x[n] = 0}, its coordinate
//! bound, and the decomposition of χ = 1 vectors as a·h0 + b·h∞ + y, y ∈ Ω.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{euler_data, AlgebraSpec, SquareSumForm, SquareTerm};
use crate::error::{Error, Result};
use crate::lattice::{DimVector, K0Lattice};
use crate::linalg::Matrix;
use crate::rational::{floor_q, floor_sqrt_q, format_q, Q};

/// Where the sum-of-squares decomposition used for the bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// The algebra's printed sum-of-squares form.
    PrintedForm,
    /// An LDLᵀ factorization of the restricted Euler form.
    Factorization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateBound {
    /// `|x_i| ≤ bound` for every coordinate of every element of Ω.
    pub bound: i64,
    pub coordinate_bounds: Vec<i64>,
    /// Bound on `|L_t(x)|` for each square term, restricted to Ω's support.
    pub term_bounds: Vec<String>,
    pub source: BoundSource,
}

/// Bounds the coordinates of Ω from the sum-of-squares shape of χ.
///
/// On Ω every square `w·L(x)²` is at most 1. Each `L` takes values in
/// `(1/D)ℤ` where `D` is the common denominator of its coefficients, so
/// `|L(x)| ≤ floor(sqrt(D²/w))/D`. When the restricted linear forms have full
/// rank, inverting a maximal independent subset bounds every coordinate.
pub fn coordinate_bound(spec: &AlgebraSpec) -> Result<CoordinateBound> {
    let n = spec.vertex_count;
    if n < 3 {
        return Err(Error::Unsupported("Omega needs at least three vertices".into()));
    }
    let m = n - 2;
    let (form, source) = match spec.invariants.as_ref().and_then(|i| i.chi.clone()) {
        Some(chi) => (chi, BoundSource::PrintedForm),
        None => (ldl_form(&euler_data(spec)?.euler_matrix, m)?, BoundSource::Factorization),
    };
    bound_from_form(&form, n, source)
}

fn bound_from_form(form: &SquareSumForm, n: usize, source: BoundSource) -> Result<CoordinateBound> {
    let m = n - 2;
    let mut rows = Vec::new();
    let mut limits = Vec::new();
    for t in &form.terms {
        if t.coeffs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: t.coeffs.len() });
        }
        if !t.weight.is_positive() {
            return Err(Error::Unsupported("square terms must carry positive weights".into()));
        }
        let restricted: Vec<Q> = t.coeffs[..m].to_vec();
        let den = restricted.iter().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let d = Q::from_integer(den);
        let limit = Q::from_integer(floor_sqrt_q(&(&d * &d / &t.weight))) / d;
        rows.push(restricted);
        limits.push(limit);
    }

    // Greedily pick an invertible m x m subsystem.
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<Q>> = chosen.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if Matrix::from_rows(trial).rank() == chosen.len() + 1 {
            chosen.push(i);
        }
        if chosen.len() == m {
            break;
        }
    }
    if chosen.len() < m {
        return Err(Error::Unsupported("square terms do not determine every coordinate".into()));
    }
    let sub = Matrix::from_rows(chosen.iter().map(|&j| rows[j].clone()).collect());
    let inv = sub.inverse().expect("chosen rows are independent");
    let mut coordinate_bounds = Vec::with_capacity(m);
    for i in 0..m {
        let total: Q = chosen.iter().enumerate().map(|(k, &t)| inv[(i, k)].abs() * &limits[t]).sum();
        coordinate_bounds
            .push(floor_q(&total).to_i64().ok_or_else(|| Error::Unsupported("coordinate bound overflows".into()))?);
    }
    let bound = coordinate_bounds.iter().copied().max().unwrap_or(0);
    Ok(CoordinateBound { bound, coordinate_bounds, term_bounds: limits.iter().map(format_q).collect(), source })
}

/// χ restricted to the first `m` coordinates as Σ d_k (Σ_i L_ik x_i)².
fn ldl_form(euler: &[Vec<i64>], m: usize) -> Result<SquareSumForm> {
    let n = euler.len();
    let mut s = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            s[(i, j)] = Q::new((euler[i][j] + euler[j][i]).into(), 2.into());
        }
    }
    let mut l = Matrix::identity(m);
    let mut d = vec![Q::zero(); m];
    for j in 0..m {
        let mut dj = s[(j, j)].clone();
        for k in 0..j {
            dj -= &l[(j, k)] * &l[(j, k)] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::Unsupported("restricted quadratic form is not positive definite".into()));
        }
        for i in j + 1..m {
            let mut v = s[(i, j)].clone();
            for k in 0..j {
                v -= &l[(i, k)] * &l[(j, k)] * &d[k];
            }
            l[(i, j)] = v / &dj;
        }
        d[j] = dj;
    }
    let terms = (0..m)
        .map(|k| {
            let mut coeffs: Vec<Q> = (0..m).map(|i| l[(i, k)].clone()).collect();
            coeffs.resize(n, Q::zero());
            SquareTerm { weight: d[k].clone(), coeffs }
        })
        .collect();
    Ok(SquareSumForm { terms })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaSet {
    pub bound: i64,
    pub count: usize,
    /// Lexicographically sorted.
    pub elements: Vec<DimVector>,
}

impl OmegaSet {
    pub fn contains(&self, x: &DimVector) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Writes `x` with χ(x) = 1 as `a·h0 + b·h∞ + y` with `y ∈ Ω`.
    pub fn unit_decompose(&self, lat: &K0Lattice, x: &DimVector) -> Result<(i64, i64, DimVector)> {
        let chi = lat.quadratic(x)?;
        if chi != 1 {
            return Err(Error::Precondition(format!("chi(x) = {chi}, expected 1")));
        }
        let (a, b) = lat.last_coordinate_split(x)?;
        let y = x - &lat.combine(a, b);
        if !self.contains(&y) {
            return Err(Error::DataInconsistency(format!("remainder {:?} is not in Omega", y.0)));
        }
        Ok((a, b, y))
    }
}

/// Exhaustive lexicographic scan of `[-b, b]^(n-2) × {0} × {0}`.
pub fn enumerate_omega(spec: &AlgebraSpec) -> Result<OmegaSet> {
    let bound = coordinate_bound(spec)?.bound;
    let lat = spec.lattice()?;
    Ok(enumerate_omega_in_box(&lat, bound))
}

pub fn enumerate_omega_in_box(lat: &K0Lattice, bound: i64) -> OmegaSet {
    let n = lat.rank();
    let m = n - 2;
    let mut elements = Vec::new();
    let mut x = vec![-bound; m];
    x.resize(n, 0);
    'scan: loop {
        let v = DimVector(x.clone());
        if lat.quadratic(&v).expect("length matches") == 1 {
            elements.push(v);
        }
        // Odometer increment with the last free coordinate fastest.
        let mut i = m;
        loop {
            if i == 0 {
                break 'scan;
            }
            i -= 1;
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = -bound;
        }
    }
    OmegaSet { bound, count: elements.len(), elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_c4;
    use crate::rational::q;

    fn spec() -> AlgebraSpec {
        build_c4(q(3)).unwrap()
    }

    #[test]
    fn printed_bound_matches_hand_derivation() {
        let b = coordinate_bound(&spec()).unwrap();
        assert_eq!(b.source, BoundSource::PrintedForm);
        // |x1 - x2| ≤ 1, |x4| ≤ 1 and the two half-integer terms ≤ 1.
        assert_eq!(b.term_bounds, vec!["1", "1", "1", "1"]);
        assert_eq!(b.coordinate_bounds[3], 1);
        assert_eq!(b.bound, 3);
    }

    #[test]
    fn factorized_bound_also_covers_omega() {
        let s = spec();
        let lat = s.lattice().unwrap();
        let form = ldl_form(lat.euler_matrix(), 4).unwrap();
        // The factorization reproduces χ on the restricted coordinates.
        for x in [[1, 0, 0, 0, 0, 0], [1, 1, 1, 0, 0, 0], [2, -1, 3, 1, 0, 0]] {
            assert_eq!(form.eval(&x), q(lat.quadratic(&DimVector(x.to_vec())).unwrap()));
        }
        let b = bound_from_form(&form, 6, BoundSource::Factorization).unwrap();
        let omega = enumerate_omega(&s).unwrap();
        assert!(omega.elements.iter().all(|y| y.0.iter().all(|c| c.abs() <= b.bound)));
    }

    #[test]
    fn omega_basics() {
        let s = spec();
        let omega = enumerate_omega(&s).unwrap();
        for i in 0..4 {
            let e = DimVector::unit(6, i);
            assert!(omega.contains(&e));
            assert!(omega.contains(&-&e));
        }
        assert!(omega.elements.iter().all(|x| omega.contains(&-x)));
        assert!(omega.elements.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unit_decompositions() {
        let s = spec();
        let lat = s.lattice().unwrap();
        let omega = enumerate_omega(&s).unwrap();
        let e1 = DimVector::unit(6, 0);
        assert_eq!(omega.unit_decompose(&lat, &e1).unwrap(), (0, 0, e1.clone()));
        let e6 = DimVector::unit(6, 5);
        assert_eq!(omega.unit_decompose(&lat, &e6).unwrap(), (-1, 1, DimVector(vec![1, 1, 1, 0, 0, 0])));
        let x = &lat.combine(1, 1) + &e1;
        assert_eq!(omega.unit_decompose(&lat, &x).unwrap(), (1, 1, e1));
        assert!(matches!(omega.unit_decompose(&lat, lat.h0()), Err(Error::Precondition(_))));
    }
}
