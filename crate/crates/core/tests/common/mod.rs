//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubular::algebra::{build_c4, AlgebraSpec, PathAlgebra};
use tubular::lattice::K0Lattice;
use tubular::omega::{enumerate_omega, OmegaSet};
use tubular::pp::{random_formula, PpFormula};
use tubular::rational::q;
use tubular::rep::{random_quotient, Representation};

pub struct C4 {
    pub spec: AlgebraSpec,
    pub alg: PathAlgebra,
    pub lat: K0Lattice,
    pub omega: OmegaSet,
}

pub fn c4() -> &'static C4 {
    static C: OnceLock<C4> = OnceLock::new();
    C.get_or_init(|| {
        let spec = build_c4(q(2)).unwrap();
        let alg = PathAlgebra::new(&spec).unwrap();
        let lat = spec.lattice().unwrap();
        let omega = enumerate_omega(&spec).unwrap();
        C4 { spec, alg, lat, omega }
    })
}

/// Arrows of C(4, λ) as 0-based (src, tgt); both relations run 6 ⇝ 1 and 6 ⇝ 2.
pub const ARROWS: [(usize, usize); 6] = [(5, 3), (3, 2), (5, 4), (4, 2), (2, 0), (2, 1)];
pub const RELATIONS: [(usize, usize); 2] = [(5, 0), (5, 1)];
pub const H0: [i64; 6] = [1, 1, 2, 1, 1, 0];
pub const HINF: [i64; 6] = [0, 0, 1, 1, 1, 1];

/// ⟨x, y⟩ = Σ xᵢyᵢ − Σ_{arrows i→j} xᵢyⱼ + Σ_{relations i⇝j} xᵢyⱼ.
pub fn euler(x: &[i64], y: &[i64]) -> i64 {
    let diag: i64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let arrows: i64 = ARROWS.iter().map(|&(i, j)| x[i] * y[j]).sum();
    let relations: i64 = RELATIONS.iter().map(|&(i, j)| x[i] * y[j]).sum();
    diag - arrows + relations
}

/// 4χ(x) from the sum-of-squares display.
pub fn four_chi(x: &[i64]) -> i64 {
    let s1 = x[0] - x[1];
    let s2 = 2 * x[2] - x[0] - x[1] - x[3] - x[4];
    let s3 = x[3] - x[4];
    let s4 = x[0] + x[1] - x[3] - x[4] + 2 * x[5];
    2 * s1 * s1 + s2 * s2 + 2 * s3 * s3 + s4 * s4
}

pub fn radical(a: i64, b: i64, y: &[i64]) -> Vec<i64> {
    (0..6).map(|i| a * H0[i] + b * HINF[i] + y[i]).collect()
}

/// Printed closed form of the slope: numerator and denominator.
pub fn printed_slope(x: &[i64]) -> (i64, i64) {
    (x[3] + x[4] - x[0] - x[1], x[2] - x[5])
}

pub fn mu(x: &[i64]) -> i64 {
    x.iter().sum()
}

/// `(p + q√d)/s` with `s > 0` and `d` not a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Irr {
    pub p: i128,
    pub q: i128,
    pub s: i128,
    pub d: i128,
}

pub const SQRT2: Irr = Irr { p: 0, q: 1, s: 1, d: 2 };
pub const SQRT3: Irr = Irr { p: 0, q: 1, s: 1, d: 3 };
pub const GOLDEN: Irr = Irr { p: 1, q: 1, s: 2, d: 5 };
pub const SQRT7_HALF: Irr = Irr { p: 0, q: 1, s: 2, d: 7 };

impl Irr {
    pub fn wire(&self) -> String {
        format!("({}+{}*sqrt({}))/{}", self.p, self.q, self.d, self.s)
    }

    /// `self + num/den`.
    pub fn shift(&self, num: i128, den: i128) -> Irr {
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        Irr { p: self.p * den + num * self.s, q: self.q * den, s: self.s * den, d: self.d }
    }

    /// ⌊r·a⌋ for `a ≥ 0`, assuming `q > 0`.
    pub fn floor_times(&self, a: i64) -> i64 {
        let a = i128::from(a);
        let t = (self.q * self.q * a * a * self.d).isqrt();
        (self.p * a + t).div_euclid(self.s) as i64
    }

    /// Order of `num/den` relative to `self`, by integer arithmetic only.
    pub fn cmp_frac(&self, num: i128, den: i128) -> Ordering {
        assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        // num/den − (p + q√d)/s has the sign of u − v√d.
        let u = num * self.s - den * self.p;
        let v = den * self.q;
        sign_of_difference(u, v, self.d)
    }
}

/// Sign of `u − v√d` for nonsquare `d > 0`.
fn sign_of_difference(u: i128, v: i128, d: i128) -> Ordering {
    match (u.cmp(&0), v.cmp(&0)) {
        (_, Ordering::Equal) => u.cmp(&0),
        (Ordering::Equal, _) => 0.cmp(&v),
        (Ordering::Greater, Ordering::Less) => Ordering::Greater,
        (Ordering::Less, Ordering::Greater) => Ordering::Less,
        (Ordering::Greater, Ordering::Greater) => (u * u).cmp(&(v * v * d)),
        (Ordering::Less, Ordering::Less) => (v * v * d).cmp(&(u * u)),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Projectives, simples, random quotients of projective sums and direct
/// sums of two earlier fixtures.
pub fn fixtures(count: usize, seed: u64) -> Vec<Representation> {
    let c = c4();
    let mut out: Vec<Representation> = Vec::new();
    for i in 0..6 {
        out.push(Representation::projective(&c.alg, i).unwrap());
        out.push(Representation::simple(&c.spec, i).unwrap());
    }
    let mut r = rng(seed);
    while out.len() < count {
        if out.len().is_multiple_of(2) {
            out.push(random_quotient(&c.alg, &mut r, 3, 2).unwrap());
        } else {
            let (i, j) = (r.gen_range(0..out.len()), r.gen_range(0..out.len()));
            out.push(out[i].direct_sum(&out[j]));
        }
    }
    out.truncate(count);
    out
}

/// Random formulas, every third one replaced by a divisibility or
/// annihilator condition for a nontrivial path.
pub fn formulas(count: usize, seed: u64) -> Vec<PpFormula> {
    let alg = &c4().alg;
    let paths: Vec<_> = alg.basis().iter().filter(|p| !p.is_trivial()).cloned().collect();
    let mut r = rng(seed);
    (0..count)
        .map(|i| match i % 6 {
            2 => PpFormula::divisible_by(&paths[r.gen_range(0..paths.len())]),
            5 => PpFormula::annihilated_by(&paths[r.gen_range(0..paths.len())]),
            _ => random_formula(alg, &mut r, 2, 2).unwrap(),
        })
        .collect()
}

/// A random formula whose free variable has type `v`.
pub fn formula_at(v: usize, r: &mut impl rand::Rng) -> PpFormula {
    loop {
        let f = random_formula(&c4().alg, r, 2, 2).unwrap();
        if f.types[0] == v {
            return f;
        }
    }
}

pub const MU_H0: i64 = 6;
pub const MU_HINF: i64 = 4;

/// Whether `b/a` lies strictly between `lo_b/lo_a` and `r`.
pub fn strictly_between(lo: (i64, i64), a: i64, b: i64, r: &Irr) -> bool {
    a > 0
        && i128::from(b) * i128::from(lo.0) > i128::from(lo.1) * i128::from(a)
        && r.cmp_frac(b.into(), a.into()).is_lt()
}

/// Every pair `(a′, b′) ≥ 0` with `μ ≤ budget` and slope strictly between
/// `b/a` and `r`.
pub fn competitors(a: i64, b: i64, r: &Irr, budget: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a2 in 1..=budget / MU_H0 {
        for b2 in 0..=(budget - a2 * MU_H0) / MU_HINF {
            if strictly_between((a, b), a2, b2, r) {
                out.push((a2, b2));
            }
        }
    }
    out
}

/// Rechecks a claimed gap vector `(a, b)` for `(r, ε = en/ed, k)` from scratch.
pub fn gap_holds(a: i64, b: i64, r: &Irr, en: i128, ed: i128, k: i64) -> Result<(), String> {
    if a < 1 || b < 0 {
        return Err(format!("({a}, {b}) is not a positive pair"));
    }
    if !r.cmp_frac(b.into(), a.into()).is_lt() {
        return Err(format!("{b}/{a} is not below r"));
    }
    if !r.shift(-en, ed).cmp_frac(b.into(), a.into()).is_gt() {
        return Err(format!("{b}/{a} is not above r - epsilon"));
    }
    let budget = a * MU_H0 + b * MU_HINF + k;
    let found = competitors(a, b, r, budget);
    if !found.is_empty() {
        return Err(format!("competitors {found:?} within budget {budget}"));
    }
    Ok(())
}

/// Checks the δ guarantee on `count` random `(a, b, y)` near the ray of
/// slope r, using the printed slope formula. δ and ε are `dn/dd`, `en/ed`.
pub fn probe_delta<R: rand::Rng>(
    rng: &mut R,
    omega: &[Vec<i64>],
    r: &Irr,
    (dn, dd): (i128, i128),
    (en, ed): (i128, i128),
    count: usize,
) -> Result<usize, String> {
    let (lo, hi) = (r.shift(-dn, dd), r.shift(dn, dd));
    let (elo, ehi) = (r.shift(-en, ed), r.shift(en, ed));
    let mut hits = 0;
    for _ in 0..count {
        let y = &omega[rng.gen_range(0..omega.len())];
        let a: i64 = rng.gen_range(0..=400);
        // Mostly b near r·a, sometimes anywhere in a wide range.
        let b =
            if rng.gen_bool(0.8) { r.floor_times(a) + rng.gen_range(-3..=3) } else { rng.gen_range(0..=3 * a + 10) };
        if b < 0 {
            continue;
        }
        let x = radical(a, b, y);
        let (num, den) = printed_slope(&x);
        if den == 0 {
            continue;
        }
        let in_delta = lo.cmp_frac(num.into(), den.into()).is_gt() && hi.cmp_frac(num.into(), den.into()).is_lt();
        if !in_delta {
            continue;
        }
        hits += 1;
        let ok = a > 0 && elo.cmp_frac(b.into(), a.into()).is_gt() && ehi.cmp_frac(b.into(), a.into()).is_lt();
        if !ok {
            return Err(format!("a = {a}, b = {b}, y = {y:?}: slope {num}/{den} within delta but b/a outside epsilon"));
        }
    }
    Ok(hits)
}
