//! Slope-window searches around a quadratic irrational cut `r`: finite
//! strips of perturbed slopes, δ-selection, the certified gap vector, and the
//! dimension estimates for quasisimples of inhomogeneous tubes.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irrational::{QuadIrrational, QuadNumber};
use crate::lattice::{DimVector, K0Lattice, Slope};
use crate::omega::OmegaSet;
use crate::rational::{ceil_q, floor_q, q, serde_q, Q};

/// Stern–Brocot steps allowed before a search reports exhaustion.
pub const MAX_DESCENT_STEPS: u64 = 10_000_000;
/// Largest certificate witness list a gap search will emit.
pub const MAX_WITNESSES: usize = 5_000_000;
/// Window halvings allowed in [`tube_parameters`].
pub const MAX_WINDOW_HALVINGS: u32 = 64;

fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::BudgetExhausted(format!("{what} does not fit in 64 bits")))
}

fn check_window(r: &QuadIrrational, epsilon: &Q) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !r.gt_q(epsilon) {
        return Err(Error::Domain(format!("epsilon {epsilon} must be smaller than r = {r}")));
    }
    Ok(())
}

/// `b/a` as a slope; `a = 0` reads as ∞.
pub fn pair_slope(a: i64, b: i64) -> Result<Slope> {
    Slope::from_parts(b, a)
}

/// `lo < b/a < r`, exact; `a ≥ 1`.
fn strictly_between(lo: &Q, a: i64, b: i64, r: &QuadIrrational) -> bool {
    let s = Q::new(b.into(), a.into());
    &s > lo && r.gt_q(&s)
}

/// γ₁ = ⟨h0, y⟩/⟨h0, h∞⟩ and γ₂ = −⟨h∞, y⟩/⟨h0, h∞⟩, so that
/// ι(a·h0 + b·h∞ + y) = (b + γ₁)/(a + γ₂).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbedSlopeParams {
    #[serde(with = "serde_q")]
    pub gamma1: Q,
    #[serde(with = "serde_q")]
    pub gamma2: Q,
    pub y: DimVector,
}

impl PerturbedSlopeParams {
    pub fn new(lat: &K0Lattice, y: &DimVector) -> Result<Self> {
        let pairing = q(lat.pairing());
        Ok(PerturbedSlopeParams {
            gamma1: q(lat.bilinear(lat.h0(), y)?) / &pairing,
            gamma2: -q(lat.bilinear(lat.hinf(), y)?) / &pairing,
            y: y.clone(),
        })
    }

    pub fn from_gammas(gamma1: Q, gamma2: Q) -> Self {
        PerturbedSlopeParams { gamma1, gamma2, y: DimVector(Vec::new()) }
    }

    /// `(b + γ₁)/(a + γ₂)`.
    pub fn slope(&self, a: i64, b: i64) -> Result<Slope> {
        Slope::from_ratio(&(q(b) + &self.gamma1), &(q(a) + &self.gamma2))
    }

    /// The perturbed slope when it is a finite rational.
    pub fn finite_slope(&self, a: i64, b: i64) -> Option<Q> {
        match self.slope(a, b) {
            Ok(Slope::Finite(s)) => Some(s),
            _ => None,
        }
    }
}

/// Result of a finite-strip scan with the bound on `a` that makes it complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripScan {
    pub a_bound: i64,
    pub pairs: Vec<(i64, i64)>,
}

fn check_strip(r1: &Q, r2: &Q) -> Result<()> {
    if !r1.is_positive() || r1 >= r2 {
        return Err(Error::Domain(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
    }
    Ok(())
}

/// `(b + γ₁)/(a + γ₂) ≥ bound`, with a positive numerator over zero read as ∞.
fn perturbed_at_least(g: &PerturbedSlopeParams, a: i64, b: i64, bound: &Q) -> bool {
    let num = q(b) + &g.gamma1;
    let den = q(a) + &g.gamma2;
    match den.cmp(&Q::zero()) {
        Ordering::Greater => num >= bound * den,
        Ordering::Equal => num.is_positive(),
        Ordering::Less => num <= bound * den,
    }
}

/// `0 < (b + γ₁)/(a + γ₂) ≤ bound`.
fn perturbed_positive_at_most(g: &PerturbedSlopeParams, a: i64, b: i64, bound: &Q) -> bool {
    let num = q(b) + &g.gamma1;
    let den = q(a) + &g.gamma2;
    match den.cmp(&Q::zero()) {
        Ordering::Greater => num.is_positive() && num <= bound * den,
        Ordering::Equal => false,
        Ordering::Less => num.is_negative() && num >= bound * den,
    }
}

/// All `(a, b)` with `a ≥ 1`, `b ≥ 0`, `b/a ≤ r1` and
/// `(b + γ₁)/(a + γ₂) ≥ r2`.
///
/// When `a + γ₂ > 0` the two inequalities give `b ≤ r1·a` and
/// `b ≥ r2·a + r2·γ₂ − γ₁`, hence `a ≤ (γ₁ − r2·γ₂)/(r2 − r1)`; otherwise
/// `a ≤ −γ₂`.
pub fn strip_pairs_below(r1: &Q, r2: &Q, gamma1: &Q, gamma2: &Q) -> Result<StripScan> {
    check_strip(r1, r2)?;
    let g = PerturbedSlopeParams::from_gammas(gamma1.clone(), gamma2.clone());
    let bound = floor_q(&((gamma1 - r2 * gamma2) / (r2 - r1))).max(floor_q(&-gamma2)).max(BigInt::zero());
    let a_bound = to_i64(&bound, "strip bound")?;
    let mut pairs = Vec::new();
    for a in 1..=a_bound {
        let den = q(a) + gamma2;
        let b_hi = to_i64(&floor_q(&(r1 * q(a))), "strip entry")?;
        let b_lo = if den.is_positive() { to_i64(&ceil_q(&(r2 * &den - gamma1)), "strip entry")?.max(0) } else { 0 };
        for b in b_lo..=b_hi {
            if perturbed_at_least(&g, a, b, r2) {
                pairs.push((a, b));
            }
        }
    }
    Ok(StripScan { a_bound, pairs })
}

/// All `(a, b)` with `a ≥ 1`, `b ≥ 0`, `b/a ≥ r2` and
/// `0 < (b + γ₁)/(a + γ₂) ≤ r1`.
///
/// When `a + γ₂ > 0` this forces `r2·a ≤ b ≤ r1·(a + γ₂) − γ₁`, hence
/// `a ≤ (r1·γ₂ − γ₁)/(r2 − r1)`; otherwise `a < −γ₂` and `b < −γ₁`.
pub fn strip_pairs_above(r1: &Q, r2: &Q, gamma1: &Q, gamma2: &Q) -> Result<StripScan> {
    check_strip(r1, r2)?;
    let g = PerturbedSlopeParams::from_gammas(gamma1.clone(), gamma2.clone());
    let bound = floor_q(&((r1 * gamma2 - gamma1) / (r2 - r1))).max(floor_q(&-gamma2)).max(BigInt::zero());
    let a_bound = to_i64(&bound, "strip bound")?;
    let mut pairs = Vec::new();
    for a in 1..=a_bound {
        let den = q(a) + gamma2;
        let b_lo = to_i64(&ceil_q(&(r2 * q(a))), "strip entry")?.max(0);
        let b_hi = if den.is_positive() { floor_q(&(r1 * &den - gamma1)) } else { floor_q(&-gamma1) };
        let b_hi = to_i64(&b_hi, "strip entry")?;
        for b in b_lo..=b_hi {
            if perturbed_positive_at_most(&g, a, b, r1) {
                pairs.push((a, b));
            }
        }
    }
    Ok(StripScan { a_bound, pairs })
}

/// A triple `(a, b, y)` whose perturbed slope lies in `(r − ε′, r + ε′)`
/// while `b/a` lies outside `(r − ε, r + ε)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaException {
    pub a: i64,
    pub b: i64,
    pub y: DimVector,
    #[serde(with = "serde_q")]
    pub perturbed_slope: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSelection {
    pub r: QuadIrrational,
    #[serde(with = "serde_q")]
    pub epsilon: Q,
    #[serde(with = "serde_q")]
    pub epsilon_prime: Q,
    #[serde(with = "serde_q")]
    pub delta: Q,
    /// Largest `a` scanned over all strips and all `y ∈ Ω`.
    pub a_bound: i64,
    pub exceptions: Vec<DeltaException>,
}

/// Chooses δ ∈ (0, ε) such that for all `a, b ≥ 0` and `y ∈ Ω`,
/// ι(a·h0 + b·h∞ + y) ∈ (r − δ, r + δ) implies b/a ∈ (r − ε, r + ε).
///
/// With ε′ = ε/2 every counterexample to the weaker statement for ε′ lies in
/// one of two finite strips; δ is ε′ or half the smallest distance from r of
/// a counterexample's perturbed slope, whichever is smaller. Pairs with
/// `a = 0` count as lying outside the window.
pub fn delta_for(lat: &K0Lattice, omega: &OmegaSet, r: &QuadIrrational, epsilon: &Q) -> Result<DeltaSelection> {
    check_window(r, epsilon)?;
    let eps_p = epsilon / q(2);
    // A bracket narrower than ε − ε′ puts rational strip ends between the
    // real window ends.
    let (lo, hi) = r.bracket_within(&((epsilon - &eps_p) / q(2)));
    let (l1, l2) = (&hi - epsilon, &lo - &eps_p);
    let (u1, u2) = (&hi + &eps_p, &lo + epsilon);
    let in_inner = |s: &Q| r.lt_q(&(s + &eps_p)) && r.gt_q(&(s - &eps_p));
    let in_outer = |a: i64, b: i64| {
        a > 0 && {
            let s = Q::new(b.into(), a.into());
            r.lt_q(&(&s + epsilon)) && r.gt_q(&(&s - epsilon))
        }
    };

    let mut exceptions = Vec::new();
    let mut a_bound = 0;
    for y in &omega.elements {
        let g = PerturbedSlopeParams::new(lat, y)?;
        let below = strip_pairs_below(&l1, &l2, &g.gamma1, &g.gamma2)?;
        let above = strip_pairs_above(&u1, &u2, &g.gamma1, &g.gamma2)?;
        a_bound = a_bound.max(below.a_bound).max(above.a_bound);
        let mut candidates: BTreeSet<(i64, i64)> = below.pairs.into_iter().chain(above.pairs).collect();
        // a = 0: the perturbed slope is (b + γ₁)/γ₂, positive and below u1.
        if !g.gamma2.is_zero() {
            let b_max = floor_q(&(&u1 * &g.gamma2 - &g.gamma1)).max(floor_q(&-&g.gamma1));
            for b in 0..=to_i64(&b_max, "strip entry")?.max(-1) {
                candidates.insert((0, b));
            }
        }
        for (a, b) in candidates {
            if let Some(s) = g.finite_slope(a, b) {
                if in_inner(&s) && !in_outer(a, b) {
                    exceptions.push(DeltaException { a, b, y: y.clone(), perturbed_slope: s });
                }
            }
        }
    }
    let min_dist = exceptions.iter().map(|e| distance_to(r, &e.perturbed_slope)).min();
    let delta = match min_dist {
        Some(m) => m.scale(&Q::new(1.into(), 2.into())).rational_below().min(eps_p.clone()),
        None => eps_p.clone(),
    };
    Ok(DeltaSelection { r: r.clone(), epsilon: epsilon.clone(), epsilon_prime: eps_p, delta, a_bound, exceptions })
}

/// One pair `(a, b)` in a gap certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a: i64,
    pub b: i64,
    pub mu: i64,
    pub slope: Slope,
}

/// A claimed gap vector x = a·h0 + b·h∞ together with every radical vector
/// whose total dimension is within the budget μ(x) + k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub r: QuadIrrational,
    #[serde(with = "serde_q")]
    pub epsilon: Q,
    pub k: i64,
    /// `[μ(h0), μ(h∞)]`.
    pub mu_weights: [i64; 2],
    pub a: i64,
    pub b: i64,
    pub slope: Slope,
    pub mu: i64,
    pub competitor_scan_budget: i64,
    /// Simplest fraction strictly between b/a and r, with its μ.
    pub nearest_competitor: Witness,
    pub witnesses: Vec<Witness>,
}

/// Walks the Stern–Brocot tree toward `r > 0`, yielding each node that
/// lies below `r` as `(a, b)` for the fraction b/a.
struct LowerNodes<'a> {
    r: &'a QuadIrrational,
    lo: (i64, i64),
    hi: (i64, i64),
    steps: u64,
}

impl<'a> LowerNodes<'a> {
    fn new(r: &'a QuadIrrational) -> Self {
        LowerNodes { r, lo: (1, 0), hi: (0, 1), steps: 0 }
    }

    fn next(&mut self) -> Result<(i64, i64)> {
        loop {
            self.steps += 1;
            if self.steps > MAX_DESCENT_STEPS {
                return Err(Error::BudgetExhausted(format!("Stern-Brocot descent exceeded {MAX_DESCENT_STEPS} steps")));
            }
            let overflow = || Error::BudgetExhausted("Stern-Brocot node does not fit in 64 bits".into());
            let m = (
                self.lo.0.checked_add(self.hi.0).ok_or_else(overflow)?,
                self.lo.1.checked_add(self.hi.1).ok_or_else(overflow)?,
            );
            if self.r.cmp_fraction(m.1, m.0) == Ordering::Less {
                self.lo = m;
                return Ok(m);
            }
            self.hi = m;
        }
    }
}

fn mu_of(w: [i64; 2], a: i64, b: i64) -> Result<i64> {
    a.checked_mul(w[0])
        .and_then(|x| b.checked_mul(w[1]).and_then(|y| x.checked_add(y)))
        .ok_or_else(|| Error::BudgetExhausted("total dimension does not fit in 64 bits".into()))
}

fn mu_weights(lat: &K0Lattice) -> Result<[i64; 2]> {
    let w = [lat.mu(lat.h0()), lat.mu(lat.hinf())];
    if w[0] <= 0 || w[1] <= 0 {
        return Err(Error::Unsupported("radical vectors must have positive total dimension".into()));
    }
    Ok(w)
}

/// All `(a, b) ≠ (0, 0)` with `a, b ≥ 0` and `μ(a·h0 + b·h∞) ≤ budget`,
/// ordered by `a` then `b`.
pub fn witnesses_within(w: [i64; 2], budget: i64) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    if budget < 0 {
        return Ok(out);
    }
    for a in 0..=budget / w[0] {
        for b in 0..=(budget - a * w[0]) / w[1] {
            if a == 0 && b == 0 {
                continue;
            }
            if out.len() >= MAX_WITNESSES {
                return Err(Error::BudgetExhausted(format!("more than {MAX_WITNESSES} witnesses")));
            }
            out.push(Witness { a, b, mu: a * w[0] + b * w[1], slope: pair_slope(a, b)? });
        }
    }
    Ok(out)
}

/// Finds x = a·h0 + b·h∞ with r − ε < b/a < r such that every radical
/// vector of slope strictly between b/a and r has μ > μ(x) + k.
///
/// Only Stern–Brocot nodes on the path to r can qualify: any other fraction
/// f below r sits strictly between two consecutive lower path nodes, which
/// are Farey neighbours, so the later one is a competitor of smaller μ. The
/// simplest fraction in (L, r) for a lower path node L is the next lower
/// path node. The first path node that passes has the least μ.
pub fn gap_vector(lat: &K0Lattice, r: &QuadIrrational, epsilon: &Q, k: i64) -> Result<GapCertificate> {
    check_window(r, epsilon)?;
    if k < 0 {
        return Err(Error::Domain(format!("k must be nonnegative, got {k}")));
    }
    let w = mu_weights(lat)?;
    let floor = r.to_quad().sub_q(epsilon);
    let mut nodes = LowerNodes::new(r);
    let mut current = nodes.next()?;
    loop {
        let next = nodes.next()?;
        let (a, b) = current;
        let in_window = floor.cmp_q(&Q::new(b.into(), a.into())) == Ordering::Less;
        if in_window {
            let mu = mu_of(w, a, b)?;
            let budget = mu.checked_add(k).ok_or_else(|| Error::BudgetExhausted("budget overflow".into()))?;
            let next_mu = mu_of(w, next.0, next.1)?;
            if next_mu > budget {
                return Ok(GapCertificate {
                    r: r.clone(),
                    epsilon: epsilon.clone(),
                    k,
                    mu_weights: w,
                    a,
                    b,
                    slope: pair_slope(a, b)?,
                    mu,
                    competitor_scan_budget: budget,
                    nearest_competitor: Witness {
                        a: next.0,
                        b: next.1,
                        mu: next_mu,
                        slope: pair_slope(next.0, next.1)?,
                    },
                    witnesses: witnesses_within(w, budget)?,
                });
            }
        }
        current = next;
    }
}

/// Rechecks a gap certificate from scratch: the window, every μ and slope,
/// completeness of the witness list, and the empty strip (b/a, r).
pub fn verify_gap_certificate(lat: &K0Lattice, cert: &GapCertificate) -> Result<()> {
    let reject = |why: String| Err(Error::CertificateRejected(why));
    let w = mu_weights(lat)?;
    if cert.mu_weights != w {
        return reject(format!("mu weights {:?} do not match the algebra's {:?}", cert.mu_weights, w));
    }
    if check_window(&cert.r, &cert.epsilon).is_err() || cert.k < 0 {
        return reject("query out of range".into());
    }
    let (a, b) = (cert.a, cert.b);
    if a < 1 || b < 0 {
        return reject(format!("({a}, {b}) is not a positive radical pair"));
    }
    let x = Q::new(b.into(), a.into());
    if !(cert.r.gt_q(&x) && cert.r.lt_q(&(&x + &cert.epsilon))) {
        return reject(format!("slope {b}/{a} is not in (r - epsilon, r)"));
    }
    if cert.slope != Slope::Finite(x.clone()) {
        return reject(format!("recorded slope {} differs from {b}/{a}", cert.slope));
    }
    let mu = mu_of(w, a, b)?;
    if cert.mu != mu || cert.competitor_scan_budget != mu + cert.k {
        return reject("total dimension or budget is wrong".into());
    }
    let mut seen = BTreeSet::new();
    for wt in &cert.witnesses {
        if wt.a < 0 || wt.b < 0 || (wt.a, wt.b) == (0, 0) || !seen.insert((wt.a, wt.b)) {
            return reject(format!("witness ({}, {}) is invalid or repeated", wt.a, wt.b));
        }
        if wt.mu != mu_of(w, wt.a, wt.b)? || wt.mu > cert.competitor_scan_budget {
            return reject(format!("witness ({}, {}) has wrong or excessive mu", wt.a, wt.b));
        }
        if wt.slope != pair_slope(wt.a, wt.b)? {
            return reject(format!("witness ({}, {}) records slope {}", wt.a, wt.b, wt.slope));
        }
        if wt.a > 0 && strictly_between(&x, wt.a, wt.b, &cert.r) {
            return reject(format!("witness ({}, {}) has slope strictly between {b}/{a} and r", wt.a, wt.b));
        }
    }
    // Completeness: count every pair within budget independently.
    let mut expected = 0usize;
    for a2 in 0..=cert.competitor_scan_budget / w[0] {
        expected += ((cert.competitor_scan_budget - a2 * w[0]) / w[1] + 1) as usize;
    }
    if seen.len() != expected - 1 {
        return reject(format!("witness list has {} entries, expected {}", seen.len(), expected - 1));
    }
    let c = &cert.nearest_competitor;
    if c.a < 1
        || !strictly_between(&x, c.a, c.b, &cert.r)
        || c.mu != mu_of(w, c.a, c.b)?
        || c.mu <= cert.competitor_scan_budget
    {
        return reject("nearest competitor is not a strip element beyond the budget".into());
    }
    if c.slope != pair_slope(c.a, c.b)? {
        return reject("nearest competitor slope is wrong".into());
    }
    Ok(())
}

/// The constant p of the quasisimple dimension estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PBound {
    pub p: i64,
    /// Exact maximum before rounding up.
    #[serde(with = "serde_q")]
    pub max_value: Q,
    pub argmax: DimVector,
}

/// `|(μ(⟨h∞,y⟩·h0 − ⟨h0,y⟩·h∞) + μ(y)) / ⟨h0,h∞⟩|` for one `y`.
pub fn p_term(lat: &K0Lattice, y: &DimVector) -> Result<Q> {
    let hy = lat.bilinear(lat.hinf(), y)?;
    let oy = lat.bilinear(lat.h0(), y)?;
    let num = hy * lat.mu(lat.h0()) - oy * lat.mu(lat.hinf()) + lat.mu(y);
    Ok(Q::new(num.abs().into(), lat.pairing().into()))
}

/// p = ⌈max_{y ∈ Ω} p_term(y)⌉.
pub fn p_bound(lat: &K0Lattice, omega: &OmegaSet) -> Result<PBound> {
    let mut best = (Q::zero(), DimVector::zero(lat.rank()));
    for y in &omega.elements {
        let t = p_term(lat, y)?;
        if t > best.0 {
            best = (t, y.clone());
        }
    }
    Ok(PBound { p: to_i64(&ceil_q(&best.0), "p")?, max_value: best.0, argmax: best.1 })
}

/// `n_ρ · max_{y ∈ Ω} |⟨h∞, y⟩|`; the slope numerator must exceed it.
pub fn b_threshold(lat: &K0Lattice, omega: &OmegaSet, n_rho: i64) -> Result<i64> {
    let mut m = 0;
    for y in &omega.elements {
        m = m.max(lat.bilinear(lat.hinf(), y)?.abs());
    }
    Ok(n_rho * m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasisimpleBounds {
    pub a: i64,
    pub b: i64,
    pub n_rho: i64,
    pub p: i64,
    pub threshold: i64,
    /// μ(a·h0 + b·h∞)/⟨h0, h∞⟩.
    #[serde(with = "serde_q")]
    pub center: Q,
    #[serde(with = "serde_q")]
    pub lower: Q,
    /// `[center − p, center + p]`, present when n_ρ = ⟨h0, h∞⟩.
    pub band: Option<[String; 2]>,
}

/// Bounds on dim(E) for a quasisimple E in a tube of rank n_ρ and slope b/a.
pub fn quasisimple_bounds(
    lat: &K0Lattice,
    omega: &OmegaSet,
    p: i64,
    a: i64,
    b: i64,
    n_rho: i64,
) -> Result<QuasisimpleBounds> {
    if a < 1 || b < 1 {
        return Err(Error::Precondition(format!("slope {b}/{a} must have positive a and b")));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::Precondition(format!("a = {a} and b = {b} are not coprime")));
    }
    if n_rho < 1 || n_rho > lat.pairing() {
        return Err(Error::Domain(format!("tube rank {n_rho} must lie in 1..={}", lat.pairing())));
    }
    let threshold = b_threshold(lat, omega, n_rho)?;
    if b <= threshold {
        return Err(Error::Precondition(format!("b = {b} does not exceed n_rho * max|<hinf, y>| = {threshold}")));
    }
    let center = Q::new(lat.mu_radical(a, b).into(), lat.pairing().into());
    let lower = &center - q(p);
    let band = (n_rho == lat.pairing())
        .then(|| [crate::rational::format_q(&(&center - q(p))), crate::rational::format_q(&(&center + q(p)))]);
    Ok(QuasisimpleBounds { a, b, n_rho, p, threshold, center, lower, band })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeParams {
    pub a: i64,
    pub b: i64,
    pub slope: Slope,
    pub rank: i64,
    pub k_used: i64,
    pub p: i64,
    pub d: i64,
    #[serde(with = "serde_q")]
    pub lower_bound: Q,
    /// Window actually searched; ε halved until b clears the threshold.
    #[serde(with = "serde_q")]
    pub epsilon_used: Q,
    pub threshold: i64,
    pub certificate: GapCertificate,
}

/// Numeric parameters of a rank-⟨h0, h∞⟩ tube with slope in (r − ε, r)
/// whose quasisimples are at least `d` smaller than any indecomposable of
/// slope between theirs and r.
pub fn tube_parameters(
    lat: &K0Lattice,
    omega: &OmegaSet,
    r: &QuadIrrational,
    epsilon: &Q,
    d: i64,
) -> Result<TubeParams> {
    check_window(r, epsilon)?;
    if d < 1 {
        return Err(Error::Domain(format!("d must be positive, got {d}")));
    }
    let rank = lat.pairing();
    let p = p_bound(lat, omega)?.p;
    // Smallest k ≥ 1 with k/rank − 2p ≥ d.
    let k = (rank * (d + 2 * p)).max(1);
    let threshold = b_threshold(lat, omega, rank)?;
    let mut eps = epsilon.clone();
    for _ in 0..=MAX_WINDOW_HALVINGS {
        let cert = gap_vector(lat, r, &eps, k)?;
        if cert.b > threshold {
            let bounds = quasisimple_bounds(lat, omega, p, cert.a, cert.b, rank)?;
            return Ok(TubeParams {
                a: cert.a,
                b: cert.b,
                slope: cert.slope.clone(),
                rank,
                k_used: k,
                p,
                d,
                lower_bound: bounds.lower,
                epsilon_used: eps,
                threshold,
                certificate: cert,
            });
        }
        eps /= q(2);
    }
    Err(Error::BudgetExhausted(format!("no slope numerator above {threshold} after {MAX_WINDOW_HALVINGS} halvings")))
}

/// `|r − s|` as an element of ℚ(√d).
pub fn distance_to(r: &QuadIrrational, s: &Q) -> QuadNumber {
    r.to_quad().sub_q(s).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_c4;
    use crate::omega::enumerate_omega;
    use crate::rational::frac;

    #[test]
    fn strip_examples() {
        let z = Q::zero();
        assert!(strip_pairs_below(&frac(13, 10), &frac(7, 5), &z, &z).unwrap().pairs.is_empty());
        assert!(strip_pairs_above(&frac(7, 5), &frac(3, 2), &z, &z).unwrap().pairs.is_empty());
        let below = strip_pairs_below(&frac(13, 10), &frac(7, 5), &q(2), &z).unwrap();
        assert_eq!(below.a_bound, 20);
        assert!(!below.pairs.is_empty());
        let above = strip_pairs_above(&frac(7, 5), &frac(3, 2), &q(-2), &z).unwrap();
        assert_eq!(above.a_bound, 20);
        assert!(!above.pairs.is_empty());
        assert!(strip_pairs_below(&frac(3, 2), &frac(3, 2), &z, &z).is_err());
    }

    #[test]
    fn gap_for_sqrt2() {
        let lat = build_c4(q(2)).unwrap().lattice().unwrap();
        let r = QuadIrrational::sqrt(2).unwrap();
        let c = gap_vector(&lat, &r, &frac(1, 10), 50).unwrap();
        assert_eq!((c.a, c.b, c.mu), (5, 7, 58));
        assert_eq!((c.nearest_competitor.a, c.nearest_competitor.b), (17, 24));
        verify_gap_certificate(&lat, &c).unwrap();
    }

    #[test]
    fn quasisimple_example() {
        let s = build_c4(q(2)).unwrap();
        let lat = s.lattice().unwrap();
        let omega = enumerate_omega(&s).unwrap();
        let p = p_bound(&lat, &omega).unwrap().p;
        let t = b_threshold(&lat, &omega, 2).unwrap();
        let err = quasisimple_bounds(&lat, &omega, p, 1, t, 2);
        assert!(matches!(err, Err(Error::Precondition(_))));
        let b = t + 1;
        let a = if b % 2 == 0 { b - 1 } else { b - 2 };
        let qb = quasisimple_bounds(&lat, &omega, p, a, b, 2).unwrap();
        assert_eq!(qb.lower, Q::new((6 * a + 4 * b).into(), 2.into()) - q(p));
        assert!(qb.band.is_some());
        assert!(quasisimple_bounds(&lat, &omega, p, a, b, 1).unwrap().band.is_none());
    }
}
