//! Finite-dimensional path algebras with relations.
//!
//! An [`AlgebraSpec`] is a quiver, a list of relations (formal combinations of
//! parallel paths whose coefficients may involve the parameter λ) and
//! optionally the printed invariants the data is expected to reproduce. From
//! it we derive a normal-form path basis by rewriting, the Cartan matrix and
//! the Euler bilinear form.
//!
//! Paths are stored in traversal order: `arrows[0]` is applied first. The
//! *written* order used in file formats and display is the algebraic one,
//! `beta·a12·a11`, where the rightmost arrow is applied first.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DimVector, K0Lattice, Slope};
use crate::linalg::Matrix;
use crate::rational::{format_q, frac, parse_q, q, Q};

/// Irreducible paths longer than this are taken as evidence that the algebra
/// is infinite-dimensional.
pub const MAX_PATH_LENGTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

/// A path in the quiver, in traversal order. Trivial paths have no arrows and
/// `src == tgt`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub src: usize,
    pub tgt: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { src: v, tgt: v, arrows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// A scalar of the form `constant + lambda_factor·λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coeff {
    pub constant: Q,
    pub lambda_factor: Q,
}

impl Coeff {
    pub fn constant(c: Q) -> Self {
        Coeff { constant: c, lambda_factor: Q::zero() }
    }

    pub fn lambda(f: Q) -> Self {
        Coeff { constant: Q::zero(), lambda_factor: f }
    }

    pub fn uses_lambda(&self) -> bool {
        !self.lambda_factor.is_zero()
    }

    pub fn eval(&self, lambda: Option<&Q>) -> Result<Q> {
        if !self.uses_lambda() {
            return Ok(self.constant.clone());
        }
        let l = lambda.ok_or_else(|| Error::InvalidSpec("coefficient uses lambda but none is set".into()))?;
        Ok(&self.constant + &self.lambda_factor * l)
    }

    /// Parses `"q"`, `"lambda"`, `"-lambda"`, `"q*lambda"` and sums of those.
    pub fn parse(s: &str) -> Result<Self> {
        let src = s.replace(' ', "");
        if src.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        let mut out = Coeff::constant(Q::zero());
        let mut start = 0;
        let bytes = src.as_bytes();
        let mut pieces = Vec::new();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'*' && bytes[i - 1] != b'/' {
                pieces.push(&src[start..i]);
                start = i;
            }
        }
        pieces.push(&src[start..]);
        for piece in pieces {
            let piece = piece.strip_prefix('+').unwrap_or(piece);
            if let Some(head) = piece.strip_suffix("lambda") {
                let factor = match head.strip_suffix('*').unwrap_or(head) {
                    "" => Q::one(),
                    "-" => -Q::one(),
                    num => parse_q(num)?,
                };
                out.lambda_factor += factor;
            } else {
                out.constant += parse_q(piece)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lam = if self.lambda_factor.is_one() {
            "lambda".to_string()
        } else if self.lambda_factor == -Q::one() {
            "-lambda".to_string()
        } else {
            format!("{}*lambda", format_q(&self.lambda_factor))
        };
        match (self.constant.is_zero(), self.lambda_factor.is_zero()) {
            (_, true) => write!(f, "{}", format_q(&self.constant)),
            (true, false) => write!(f, "{lam}"),
            (false, false) if lam.starts_with('-') => write!(f, "{}{lam}", format_q(&self.constant)),
            (false, false) => write!(f, "{}+{lam}", format_q(&self.constant)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTerm {
    pub coeff: Coeff,
    pub path: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub terms: Vec<RelationTerm>,
}

impl Relation {
    pub fn src(&self) -> usize {
        self.terms[0].path.src
    }

    pub fn tgt(&self) -> usize {
        self.terms[0].path.tgt
    }
}

/// One weighted square `weight · (Σ coeffs_i x_i)²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareTerm {
    #[serde(with = "crate::rational::serde_q")]
    pub weight: Q,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub coeffs: Vec<Q>,
}

/// A quadratic form written as a sum of weighted squares of linear forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareSumForm {
    pub terms: Vec<SquareTerm>,
}

impl SquareSumForm {
    pub fn eval(&self, x: &[i64]) -> Q {
        self.terms
            .iter()
            .map(|t| {
                let lin: Q = t.coeffs.iter().zip(x).map(|(c, &xi)| c * q(xi)).sum();
                &t.weight * &lin * &lin
            })
            .sum()
    }
}

/// Slope of a dimension vector as a ratio of two integer linear forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeFormula {
    pub numerator: Vec<i64>,
    pub denominator: Vec<i64>,
}

impl SlopeFormula {
    pub fn eval(&self, x: &[i64]) -> Result<Slope> {
        let dot = |c: &[i64]| c.iter().zip(x).map(|(a, b)| a * b).sum::<i64>();
        Slope::from_parts(dot(&self.numerator), dot(&self.denominator))
    }
}

/// Invariants the algebra data is expected to reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub h0: Vec<i64>,
    pub hinf: Vec<i64>,
    pub pairing: Option<i64>,
    pub chi: Option<SquareSumForm>,
    pub slope: Option<SlopeFormula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub name: String,
    pub vertex_count: usize,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
    pub lambda: Option<Q>,
    pub invariants: Option<Invariants>,
}

impl AlgebraSpec {
    /// Checks the structural invariants: arrow endpoints in range, λ outside
    /// {0, 1}, every relation a nonempty combination of composable paths with
    /// a common source and target.
    pub fn new(
        name: impl Into<String>,
        vertex_count: usize,
        arrows: Vec<Arrow>,
        relations: Vec<Relation>,
        lambda: Option<Q>,
        invariants: Option<Invariants>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidSpec("vertex_count must be positive".into()));
        }
        if let Some(l) = &lambda {
            if l.is_zero() || l.is_one() {
                return Err(Error::Domain(format!("lambda must avoid 0 and 1, got {}", format_q(l))));
            }
        }
        for a in &arrows {
            if a.src >= vertex_count || a.tgt >= vertex_count {
                return Err(Error::InvalidSpec(format!("arrow {} has an endpoint out of range", a.label)));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for a in &arrows {
            if !seen.insert(a.label.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate arrow label {}", a.label)));
            }
        }
        for rel in &relations {
            let Some(first) = rel.terms.first() else {
                return Err(Error::InvalidSpec(format!("relation {} has no terms", rel.name)));
            };
            for t in &rel.terms {
                if t.path.src != first.path.src || t.path.tgt != first.path.tgt {
                    return Err(Error::InvalidSpec(format!(
                        "relation {} mixes paths with different endpoints",
                        rel.name
                    )));
                }
                check_composable(&arrows, &t.path)
                    .map_err(|e| Error::InvalidSpec(format!("relation {}: {e}", rel.name)))?;
                if t.coeff.uses_lambda() && lambda.is_none() {
                    return Err(Error::InvalidSpec(format!("relation {} uses lambda but none is set", rel.name)));
                }
            }
        }
        if let Some(inv) = &invariants {
            for v in [&inv.h0, &inv.hinf] {
                if v.len() != vertex_count {
                    return Err(Error::LengthMismatch { expected: vertex_count, got: v.len() });
                }
            }
        }
        Ok(AlgebraSpec { name: name.into(), vertex_count, arrows, relations, lambda, invariants })
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    /// Builds a path from labels in written order (`["beta", "a12", "a11"]`).
    /// An empty list is not a path; use [`Path::trivial`].
    pub fn path_from_written(&self, labels: &[&str]) -> Result<Path> {
        path_from_written(&self.arrows, labels)
    }

    pub fn written(&self, path: &Path) -> String {
        written_path(&self.arrows, path)
    }

    pub fn arrows_from(&self, v: usize) -> impl Iterator<Item = (usize, &Arrow)> {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.src == v)
    }

    /// Relation coefficients with λ substituted; like terms merged.
    pub fn evaluated_relation(&self, idx: usize) -> Result<Vec<(Q, Path)>> {
        let mut acc: BTreeMap<Path, Q> = BTreeMap::new();
        for t in &self.relations[idx].terms {
            *acc.entry(t.path.clone()).or_insert_with(Q::zero) += t.coeff.eval(self.lambda.as_ref())?;
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (c, p)).collect())
    }

    pub fn lattice(&self) -> Result<K0Lattice> {
        let inv = self
            .invariants
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("algebra {} carries no radical vectors h0, hinf", self.name)))?;
        let euler = euler_data(self)?;
        K0Lattice::new(euler.euler_matrix, DimVector(inv.h0.clone()), DimVector(inv.hinf.clone()))
    }
}

fn check_composable(arrows: &[Arrow], path: &Path) -> std::result::Result<(), String> {
    let mut at = path.src;
    for &a in &path.arrows {
        let arrow = arrows.get(a).ok_or_else(|| format!("unknown arrow index {a}"))?;
        if arrow.src != at {
            return Err(format!("arrow {} does not start where the path is", arrow.label));
        }
        at = arrow.tgt;
    }
    if at != path.tgt {
        return Err("path target does not match".into());
    }
    Ok(())
}

fn path_from_written(arrows: &[Arrow], labels: &[&str]) -> Result<Path> {
    if labels.is_empty() {
        return Err(Error::InvalidSpec("empty path needs an explicit vertex".into()));
    }
    let mut idx = Vec::with_capacity(labels.len());
    for l in labels.iter().rev() {
        let i = arrows
            .iter()
            .position(|a| a.label == *l)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown arrow label {l}")))?;
        idx.push(i);
    }
    let path = Path { src: arrows[idx[0]].src, tgt: arrows[*idx.last().unwrap()].tgt, arrows: idx };
    check_composable(arrows, &path).map_err(|e| Error::InvalidSpec(format!("{}: {e}", labels.join("·"))))?;
    Ok(path)
}

fn written_path(arrows: &[Arrow], path: &Path) -> String {
    if path.is_trivial() {
        return format!("e{}", path.src + 1);
    }
    path.arrows.iter().rev().map(|&a| arrows[a].label.as_str()).collect::<Vec<_>>().join("·")
}

/// The tubular algebra C(4, λ): six vertices, arrows
/// `a11: 6→4, a12: 4→3, a21: 6→5, a22: 5→3, beta: 3→1, gamma: 3→2`, and
/// relations `beta(a12 a11 - a22 a21) = 0`, `gamma(a12 a11 - λ a22 a21) = 0`.
pub fn build_c4(lambda: Q) -> Result<AlgebraSpec> {
    if lambda.is_zero() || lambda.is_one() {
        return Err(Error::Domain(format!("lambda must avoid 0 and 1, got {}", format_q(&lambda))));
    }
    let arrow = |label: &str, src: usize, tgt: usize| Arrow { label: label.into(), src: src - 1, tgt: tgt - 1 };
    let arrows = vec![
        arrow("a11", 6, 4),
        arrow("a12", 4, 3),
        arrow("a21", 6, 5),
        arrow("a22", 5, 3),
        arrow("beta", 3, 1),
        arrow("gamma", 3, 2),
    ];
    let p = |labels: &[&str]| path_from_written(&arrows, labels);
    let relations = vec![
        Relation {
            name: "beta(a12·a11 - a22·a21)".into(),
            terms: vec![
                RelationTerm { coeff: Coeff::constant(q(1)), path: p(&["beta", "a12", "a11"])? },
                RelationTerm { coeff: Coeff::constant(q(-1)), path: p(&["beta", "a22", "a21"])? },
            ],
        },
        Relation {
            name: "gamma(a12·a11 - lambda·a22·a21)".into(),
            terms: vec![
                RelationTerm { coeff: Coeff::constant(q(1)), path: p(&["gamma", "a12", "a11"])? },
                RelationTerm { coeff: Coeff::lambda(q(-1)), path: p(&["gamma", "a22", "a21"])? },
            ],
        },
    ];
    let spec = AlgebraSpec::new("C(4,lambda)", 6, arrows, relations, Some(lambda), Some(c4_invariants()))?;
    validate_spec(&spec).into_result()?;
    Ok(spec)
}

/// h0, h∞, ⟨h0, h∞⟩, χ as a sum of squares and the closed-form slope for C(4, λ).
pub fn c4_invariants() -> Invariants {
    let half = frac(1, 2);
    let nh = frac(-1, 2);
    let z = Q::zero;
    let chi = SquareSumForm {
        terms: vec![
            SquareTerm { weight: half.clone(), coeffs: vec![q(1), q(-1), z(), z(), z(), z()] },
            SquareTerm { weight: q(1), coeffs: vec![nh.clone(), nh.clone(), q(1), nh.clone(), nh.clone(), z()] },
            SquareTerm { weight: half.clone(), coeffs: vec![z(), z(), z(), q(1), q(-1), z()] },
            SquareTerm { weight: q(1), coeffs: vec![half.clone(), half, z(), nh.clone(), nh, q(1)] },
        ],
    };
    Invariants {
        h0: vec![1, 1, 2, 1, 1, 0],
        hinf: vec![0, 0, 1, 1, 1, 1],
        pairing: Some(2),
        chi: Some(chi),
        slope: Some(SlopeFormula { numerator: vec![-1, -1, 0, 1, 1, 0], denominator: vec![0, 0, 1, 0, 0, -1] }),
    }
}

/// An element of the path algebra: a finite combination of paths.
pub type PathElement = BTreeMap<Path, Q>;

#[derive(Debug, Clone)]
struct Rule {
    lead: Vec<usize>,
    /// `lead = Σ c · mid`, with `mid` in traversal order.
    replacement: Vec<(Q, Vec<usize>)>,
}

/// Normal-form monomials grouped by endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathBasis {
    /// `paths[src][tgt]`, ordered by length then arrow indices.
    pub paths: Vec<Vec<Vec<Path>>>,
    pub total_dimension: usize,
}

impl PathBasis {
    pub fn between(&self, src: usize, tgt: usize) -> &[Path] {
        &self.paths[src][tgt]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Path> {
        self.paths.iter().flatten().flatten()
    }
}

/// The path algebra with its rewriting system and derived basis.
#[derive(Debug, Clone)]
pub struct PathAlgebra {
    spec: AlgebraSpec,
    rules: Vec<Rule>,
    basis: PathBasis,
    index: HashMap<Path, usize>,
}

/// `a > b` in the monomial order: longer paths first, then lexicographic in
/// traversal order with earlier-declared arrows ranking higher.
fn monomial_greater(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return a.len() > b.len();
    }
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Derives the normal-form path basis. Fails on a non-confluent rewriting
/// system or an infinite basis.
pub fn derive_path_basis(spec: &AlgebraSpec) -> Result<PathBasis> {
    Ok(PathAlgebra::new(spec)?.basis)
}

impl PathAlgebra {
    pub fn new(spec: &AlgebraSpec) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, rel) in spec.relations.iter().enumerate() {
            let terms = spec.evaluated_relation(i)?;
            let Some(lead_pos) = (0..terms.len()).reduce(|best, j| {
                if monomial_greater(&terms[j].1.arrows, &terms[best].1.arrows) {
                    j
                } else {
                    best
                }
            }) else {
                // The relation collapses to zero and imposes nothing.
                continue;
            };
            let (lc, lead) = &terms[lead_pos];
            if lead.is_trivial() {
                return Err(Error::InvalidSpec(format!("relation {} has a trivial leading path", rel.name)));
            }
            let inv = -lc.recip();
            let replacement = terms
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != lead_pos)
                .map(|(_, (c, p))| (c * &inv, p.arrows.clone()))
                .collect();
            rules.push(Rule { lead: lead.arrows.clone(), replacement });
        }
        let mut alg = PathAlgebra {
            spec: spec.clone(),
            rules,
            basis: PathBasis { paths: Vec::new(), total_dimension: 0 },
            index: HashMap::new(),
        };
        alg.check_confluence()?;
        alg.enumerate_basis()?;
        Ok(alg)
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn basis(&self) -> &PathBasis {
        &self.basis
    }

    /// Position of a normal-form path within `basis.between(src, tgt)`.
    pub fn basis_index(&self, path: &Path) -> Option<usize> {
        self.index.get(path).copied()
    }

    fn find_lead(&self, arrows: &[usize]) -> Option<(usize, usize)> {
        for pos in 0..arrows.len() {
            for (r, rule) in self.rules.iter().enumerate() {
                if arrows[pos..].starts_with(&rule.lead) {
                    return Some((r, pos));
                }
            }
        }
        None
    }

    fn rewrite_at(&self, rule: usize, pos: usize, coeff: &Q, path: &Path, out: &mut Vec<(Q, Path)>) {
        let r = &self.rules[rule];
        let prefix = &path.arrows[..pos];
        let suffix = &path.arrows[pos + r.lead.len()..];
        for (c, mid) in &r.replacement {
            let mut arrows = prefix.to_vec();
            arrows.extend_from_slice(mid);
            arrows.extend_from_slice(suffix);
            out.push((coeff * c, Path { src: path.src, tgt: path.tgt, arrows }));
        }
    }

    fn reduce_terms(&self, mut stack: Vec<(Q, Path)>) -> PathElement {
        let mut out = PathElement::new();
        while let Some((c, p)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            match self.find_lead(&p.arrows) {
                None => *out.entry(p).or_insert_with(Q::zero) += c,
                Some((rule, pos)) => self.rewrite_at(rule, pos, &c, &p, &mut stack),
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn normal_form(&self, elem: &PathElement) -> PathElement {
        self.reduce_terms(elem.iter().map(|(p, c)| (c.clone(), p.clone())).collect())
    }

    pub fn normal_form_path(&self, path: &Path) -> PathElement {
        self.reduce_terms(vec![(Q::one(), path.clone())])
    }

    /// `later · earlier`: first traverse `earlier`, then `later`. Zero if the
    /// paths do not compose.
    pub fn compose(&self, later: &Path, earlier: &Path) -> PathElement {
        if earlier.tgt != later.src {
            return PathElement::new();
        }
        let mut arrows = earlier.arrows.clone();
        arrows.extend_from_slice(&later.arrows);
        self.normal_form_path(&Path { src: earlier.src, tgt: later.tgt, arrows })
    }

    /// Exhaustive overlap and inclusion test on the leading monomials.
    fn check_confluence(&self) -> Result<()> {
        for (i, u) in self.rules.iter().enumerate() {
            for (j, v) in self.rules.iter().enumerate() {
                // u = A·B, v = B·C with B nonempty: resolve the word A·B·C.
                for l in 1..u.lead.len().min(v.lead.len()) {
                    if u.lead[u.lead.len() - l..] == v.lead[..l] {
                        let mut word = u.lead.clone();
                        word.extend_from_slice(&v.lead[l..]);
                        self.resolve_ambiguity(&word, (i, 0), (j, u.lead.len() - l))?;
                    }
                }
                if i != j && v.lead.len() <= u.lead.len() {
                    for p in 0..=u.lead.len() - v.lead.len() {
                        if u.lead[p..p + v.lead.len()] == v.lead[..] {
                            self.resolve_ambiguity(&u.lead, (i, 0), (j, p))?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn resolve_ambiguity(&self, word: &[usize], first: (usize, usize), second: (usize, usize)) -> Result<()> {
        let arrows = &self.spec.arrows;
        let path = Path { src: arrows[word[0]].src, tgt: arrows[*word.last().unwrap()].tgt, arrows: word.to_vec() };
        let mut left = Vec::new();
        self.rewrite_at(first.0, first.1, &Q::one(), &path, &mut left);
        let mut right = Vec::new();
        self.rewrite_at(second.0, second.1, &Q::one(), &path, &mut right);
        if self.reduce_terms(left) != self.reduce_terms(right) {
            return Err(Error::NonConfluent { path: self.spec.written(&path) });
        }
        Ok(())
    }

    fn enumerate_basis(&mut self) -> Result<()> {
        let n = self.spec.vertex_count;
        let mut paths = vec![vec![Vec::new(); n]; n];
        let mut queue: VecDeque<Path> = (0..n).map(Path::trivial).collect();
        while let Some(p) = queue.pop_front() {
            for (a, arrow) in self.spec.arrows_from(p.tgt) {
                let mut arrows = p.arrows.clone();
                arrows.push(a);
                let reducible = self.rules.iter().any(|r| arrows.ends_with(&r.lead));
                if reducible {
                    continue;
                }
                if arrows.len() > MAX_PATH_LENGTH {
                    return Err(Error::InfiniteDimension(format!("irreducible paths exceed length {MAX_PATH_LENGTH}")));
                }
                queue.push_back(Path { src: p.src, tgt: arrow.tgt, arrows });
            }
            paths[p.src][p.tgt].push(p);
        }
        let mut total = 0;
        for row in paths.iter_mut() {
            for list in row.iter_mut() {
                list.sort_by(|a, b| (a.len(), &a.arrows).cmp(&(b.len(), &b.arrows)));
                for (i, p) in list.iter().enumerate() {
                    self.index.insert(p.clone(), i);
                }
                total += list.len();
            }
        }
        self.basis = PathBasis { paths, total_dimension: total };
        Ok(())
    }

    /// `cartan[i][j]` = number of normal-form paths from `j` to `i`.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let n = self.spec.vertex_count;
        (0..n).map(|i| (0..n).map(|j| self.basis.between(j, i).len() as i64).collect()).collect()
    }
}

/// Cartan matrix and Euler form, the latter confirmed by two routes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerData {
    pub cartan: Vec<Vec<i64>>,
    /// `⟨x, y⟩ = xᵀ · euler_matrix · y`.
    pub euler_matrix: Vec<Vec<i64>>,
}

/// Euler matrix through the Cartan matrix: `E = (Cᵀ)⁻¹`.
pub fn euler_via_cartan(cartan: &[Vec<i64>]) -> Result<Vec<Vec<Q>>> {
    let n = cartan.len();
    let c = Matrix::from_rows(cartan.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect());
    let inv = c.transpose().inverse().ok_or_else(|| Error::DataInconsistency("Cartan matrix is singular".into()))?;
    Ok((0..n).map(|i| inv.row(i).to_vec()).collect())
}

/// Euler matrix for global dimension at most 2:
/// `δ_ij − #arrows(i→j) + #relations(i⇝j)`.
pub fn euler_direct(spec: &AlgebraSpec) -> Vec<Vec<i64>> {
    let n = spec.vertex_count;
    let mut e = vec![vec![0i64; n]; n];
    for (i, row) in e.iter_mut().enumerate() {
        row[i] = 1;
    }
    for a in &spec.arrows {
        e[a.src][a.tgt] -= 1;
    }
    for r in &spec.relations {
        e[r.src()][r.tgt()] += 1;
    }
    e
}

pub fn euler_data(spec: &AlgebraSpec) -> Result<EulerData> {
    let alg = PathAlgebra::new(spec)?;
    euler_data_for(&alg)
}

pub fn euler_data_for(alg: &PathAlgebra) -> Result<EulerData> {
    let cartan = alg.cartan();
    let via_cartan = euler_via_cartan(&cartan)?;
    let direct = euler_direct(alg.spec());
    for (i, (a, b)) in via_cartan.iter().zip(&direct).enumerate() {
        for (j, (x, y)) in a.iter().zip(b).enumerate() {
            if *x != q(*y) {
                return Err(Error::RouteDisagreement { row: i, col: j, cartan: format_q(x), direct: y.to_string() });
            }
        }
    }
    Ok(EulerData { cartan, euler_matrix: direct })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub algebra: String,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.passed)
    }

    pub fn into_result(self) -> Result<()> {
        match self.checks.into_iter().find(|c| !c.passed) {
            None => Ok(()),
            Some(c) => Err(Error::Validation { check: c.name, detail: c.detail }),
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(ValidationCheck { name: name.into(), passed, detail: detail.into() });
    }
}

/// Number of random vectors used by the randomized checks.
pub const VALIDATION_SAMPLES: usize = 1000;

/// Runs every check the data admits and reports each one by name.
pub fn validate_spec(spec: &AlgebraSpec) -> ValidationReport {
    let mut report = ValidationReport { algebra: spec.name.clone(), checks: Vec::new() };
    let alg = match PathAlgebra::new(spec) {
        Ok(a) => {
            report.push("path_basis", true, format!("total dimension {}", a.basis().total_dimension));
            a
        }
        Err(e) => {
            report.push("path_basis", false, e.to_string());
            return report;
        }
    };
    let euler = match euler_data_for(&alg) {
        Ok(e) => {
            report.push("euler_routes", true, "Cartan and direct routes agree");
            e
        }
        Err(e) => {
            report.push("euler_routes", false, e.to_string());
            // Fall back to the direct form so the remaining checks still run.
            EulerData { cartan: alg.cartan(), euler_matrix: euler_direct(spec) }
        }
    };
    let Some(inv) = &spec.invariants else {
        return report;
    };
    let lat = K0Lattice::new_unchecked(euler.euler_matrix, DimVector(inv.h0.clone()), DimVector(inv.hinf.clone()));
    let h0 = lat.h0().clone();
    let hinf = lat.hinf().clone();
    let chi_h0 = lat.quadratic(&h0).expect("lengths checked at construction");
    let chi_hinf = lat.quadratic(&hinf).expect("lengths checked at construction");
    report.push("chi_h0", chi_h0 == 0, format!("chi(h0) = {chi_h0}"));
    report.push("chi_hinf", chi_hinf == 0, format!("chi(hinf) = {chi_hinf}"));
    let pairing = lat.bilinear(&h0, &hinf).expect("lengths checked");
    let reverse = lat.bilinear(&hinf, &h0).expect("lengths checked");
    let pairing_ok = pairing > 0 && inv.pairing.is_none_or(|p| p == pairing);
    report.push(
        "pairing",
        pairing_ok,
        format!("<h0, hinf> = {pairing}, expected {}", inv.pairing.map_or("> 0".into(), |p| p.to_string())),
    );
    report.push("antisymmetry", reverse == -pairing, format!("<hinf, h0> = {reverse}"));

    let n = spec.vertex_count;
    let mut rng = ChaCha8Rng::seed_from_u64(0x007a_b1e5);
    let samples: Vec<Vec<i64>> =
        (0..VALIDATION_SAMPLES).map(|_| (0..n).map(|_| rng.gen_range(-10..=10)).collect()).collect();

    if let Some(chi) = &inv.chi {
        // Agreement on all e_i and e_i + e_j pins down a quadratic form.
        let mut spanning: Vec<Vec<i64>> = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut v = vec![0; n];
                v[i] += 1;
                v[j] += 1;
                spanning.push(v);
            }
        }
        let mismatch = spanning
            .iter()
            .chain(&samples)
            .find(|x| q(lat.quadratic(&DimVector((*x).clone())).unwrap()) != chi.eval(x));
        report.push(
            "printed_chi",
            mismatch.is_none(),
            match mismatch {
                None => "derived form equals the printed sum of squares".to_string(),
                Some(x) => format!("forms differ at {x:?}"),
            },
        );
    }
    if let Some(formula) = &inv.slope {
        let mismatch = samples.iter().find(|x| {
            let derived = lat.slope(&DimVector((*x).clone())).ok();
            let printed = formula.eval(x).ok();
            derived != printed
        });
        report.push(
            "slope_formula",
            mismatch.is_none(),
            match mismatch {
                None => "index agrees with the closed-form slope".to_string(),
                Some(x) => format!("slopes differ at {x:?}"),
            },
        );
    }
    report
}

// --- JSON file format ---------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowFile {
    pub label: String,
    /// 1-based vertex number.
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermFile {
    pub coeff: String,
    /// Arrow labels in written order; empty is not allowed.
    pub path: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: usize,
    pub arrows: Vec<ArrowFile>,
    pub relations: Vec<Vec<TermFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinf: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<SquareSumForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_formula: Option<SlopeFormula>,
}

impl AlgebraSpec {
    pub fn from_file(file: &AlgebraFile) -> Result<Self> {
        let arrows: Vec<Arrow> = file
            .arrows
            .iter()
            .map(|a| {
                if a.src == 0 || a.tgt == 0 {
                    return Err(Error::InvalidSpec(format!("arrow {}: vertices are numbered from 1", a.label)));
                }
                Ok(Arrow { label: a.label.clone(), src: a.src - 1, tgt: a.tgt - 1 })
            })
            .collect::<Result<_>>()?;
        let relations = file
            .relations
            .iter()
            .enumerate()
            .map(|(k, terms)| {
                let terms = terms
                    .iter()
                    .map(|t| {
                        let labels: Vec<&str> = t.path.iter().map(String::as_str).collect();
                        Ok(RelationTerm { coeff: Coeff::parse(&t.coeff)?, path: path_from_written(&arrows, &labels)? })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Relation { name: format!("relation {}", k + 1), terms })
            })
            .collect::<Result<Vec<_>>>()?;
        let lambda = file.lambda.as_deref().map(parse_q).transpose()?;
        let invariants = match (&file.h0, &file.hinf) {
            (Some(h0), Some(hinf)) => Some(Invariants {
                h0: h0.clone(),
                hinf: hinf.clone(),
                pairing: file.pairing,
                chi: file.chi.clone(),
                slope: file.slope_formula.clone(),
            }),
            (None, None) => None,
            _ => return Err(Error::InvalidSpec("h0 and hinf must be given together".into())),
        };
        let name = file.name.clone().unwrap_or_else(|| "user algebra".into());
        AlgebraSpec::new(name, file.vertices, arrows, relations, lambda, invariants)
    }

    pub fn to_file(&self) -> AlgebraFile {
        let inv = self.invariants.as_ref();
        AlgebraFile {
            name: Some(self.name.clone()),
            vertices: self.vertex_count,
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowFile { label: a.label.clone(), src: a.src + 1, tgt: a.tgt + 1 })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| {
                    r.terms
                        .iter()
                        .map(|t| TermFile {
                            coeff: t.coeff.to_string(),
                            path: t.path.arrows.iter().rev().map(|&a| self.arrows[a].label.clone()).collect(),
                        })
                        .collect()
                })
                .collect(),
            lambda: self.lambda.as_ref().map(format_q),
            h0: inv.map(|i| i.h0.clone()),
            hinf: inv.map(|i| i.hinf.clone()),
            pairing: inv.and_then(|i| i.pairing),
            chi: inv.and_then(|i| i.chi.clone()),
            slope_formula: inv.and_then(|i| i.slope.clone()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("algebra file serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> AlgebraSpec {
        build_c4(q(2)).unwrap()
    }

    #[test]
    fn c4_shape() {
        let spec = c4();
        assert_eq!(spec.vertex_count, 6);
        assert_eq!(spec.arrows.len(), 6);
        assert_eq!(spec.relations.len(), 2);
    }

    #[test]
    fn lambda_domain() {
        assert!(matches!(build_c4(q(0)), Err(Error::Domain(_))));
        assert!(matches!(build_c4(q(1)), Err(Error::Domain(_))));
        assert!(build_c4(q(-1)).is_ok());
        assert!(build_c4(frac(1, 3)).is_ok());
    }

    #[test]
    fn trivial_algebra_basis() {
        let spec = AlgebraSpec::new("k", 1, vec![], vec![], None, None).unwrap();
        let b = derive_path_basis(&spec).unwrap();
        assert_eq!(b.total_dimension, 1);
        assert_eq!(b.between(0, 0), &[Path::trivial(0)]);
    }

    #[test]
    fn loop_is_infinite() {
        let spec =
            AlgebraSpec::new("loop", 1, vec![Arrow { label: "x".into(), src: 0, tgt: 0 }], vec![], None, None).unwrap();
        assert!(matches!(derive_path_basis(&spec), Err(Error::InfiniteDimension(_))));
    }

    #[test]
    fn nilpotent_loop_is_finite() {
        let arrows = vec![Arrow { label: "x".into(), src: 0, tgt: 0 }];
        let xx = path_from_written(&arrows, &["x", "x"]).unwrap();
        let rel = Relation { name: "x^2".into(), terms: vec![RelationTerm { coeff: Coeff::constant(q(1)), path: xx }] };
        let spec = AlgebraSpec::new("k[x]/x^2", 1, arrows, vec![rel], None, None).unwrap();
        assert_eq!(derive_path_basis(&spec).unwrap().total_dimension, 2);
    }

    #[test]
    fn c4_basis_and_cartan() {
        let alg = PathAlgebra::new(&c4()).unwrap();
        let cartan = alg.cartan();
        // Column 6 is dim P_6 = (1, 1, 2, 1, 1, 1).
        let col6: Vec<i64> = (0..6).map(|i| cartan[i][5]).collect();
        assert_eq!(col6, vec![1, 1, 2, 1, 1, 1]);
        let sum: i64 = cartan.iter().flatten().sum();
        assert_eq!(sum as usize, alg.basis().total_dimension);
        assert_eq!(alg.basis().total_dimension, 20);
    }

    #[test]
    fn c4_rewrites_leading_terms() {
        let spec = c4();
        let alg = PathAlgebra::new(&spec).unwrap();
        let lead = spec.path_from_written(&["gamma", "a12", "a11"]).unwrap();
        let nf = alg.normal_form_path(&lead);
        let other = spec.path_from_written(&["gamma", "a22", "a21"]).unwrap();
        assert_eq!(nf.len(), 1);
        assert_eq!(nf[&other], q(2));
    }

    #[test]
    fn euler_routes_agree_on_c4() {
        let e = euler_data(&c4()).unwrap();
        let h0 = [1, 1, 2, 1, 1, 0];
        let hinf = [0, 0, 1, 1, 1, 1];
        let form = |x: &[i64], y: &[i64]| -> i64 {
            (0..6).map(|i| (0..6).map(|j| x[i] * e.euler_matrix[i][j] * y[j]).sum::<i64>()).sum()
        };
        assert_eq!(form(&h0, &hinf), 2);
        assert_eq!(form(&hinf, &h0), -2);
    }

    #[test]
    fn non_confluent_system_is_reported() {
        // a·a = b and a·a = c·? cannot both hold: two relations with one leading path.
        let arrows = vec![
            Arrow { label: "x".into(), src: 0, tgt: 1 },
            Arrow { label: "y".into(), src: 1, tgt: 2 },
            Arrow { label: "u".into(), src: 0, tgt: 1 },
            Arrow { label: "v".into(), src: 1, tgt: 2 },
            Arrow { label: "w".into(), src: 1, tgt: 2 },
        ];
        let p = |l: &[&str]| path_from_written(&arrows, l).unwrap();
        let r1 = Relation {
            name: "r1".into(),
            terms: vec![
                RelationTerm { coeff: Coeff::constant(q(1)), path: p(&["y", "x"]) },
                RelationTerm { coeff: Coeff::constant(q(-1)), path: p(&["v", "u"]) },
            ],
        };
        let r2 = Relation {
            name: "r2".into(),
            terms: vec![
                RelationTerm { coeff: Coeff::constant(q(1)), path: p(&["y", "x"]) },
                RelationTerm { coeff: Coeff::constant(q(-1)), path: p(&["w", "u"]) },
            ],
        };
        let spec = AlgebraSpec::new("bad", 3, arrows, vec![r1, r2], None, None).unwrap();
        match derive_path_basis(&spec) {
            Err(Error::NonConfluent { path }) => assert_eq!(path, "y·x"),
            other => panic!("expected non-confluence, got {other:?}"),
        }
    }

    #[test]
    fn coeff_parsing() {
        assert_eq!(Coeff::parse("-lambda").unwrap(), Coeff::lambda(q(-1)));
        assert_eq!(Coeff::parse("3/2*lambda").unwrap(), Coeff::lambda(frac(3, 2)));
        let c = Coeff::parse("1-2*lambda").unwrap();
        assert_eq!(c, Coeff { constant: q(1), lambda_factor: q(-2) });
        assert_eq!(c.to_string(), "1-2*lambda");
        assert_eq!(Coeff::parse(&Coeff::lambda(frac(-1, 3)).to_string()).unwrap(), Coeff::lambda(frac(-1, 3)));
        assert!(Coeff::parse("0.5").is_err());
    }

    #[test]
    fn json_roundtrip_preserves_spec() {
        let spec = c4();
        let back = AlgebraSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.arrows, spec.arrows);
        assert_eq!(back.invariants, spec.invariants);
        assert!(validate_spec(&back).passed());
    }

    #[test]
    fn alternate_chi_display_misses_h0() {
        // The variant with x3 + x4 inside the second square does not vanish on h0.
        let mut inv = c4_invariants();
        let nh = frac(-1, 2);
        inv.chi.as_mut().unwrap().terms[1].coeffs = vec![nh.clone(), nh.clone(), frac(1, 2), nh, Q::zero(), Q::zero()];
        let chi = inv.chi.unwrap();
        assert_ne!(chi.eval(&[1, 1, 2, 1, 1, 0]), Q::zero());
        assert_eq!(c4_invariants().chi.unwrap().eval(&[1, 1, 2, 1, 1, 0]), Q::zero());
    }
}
