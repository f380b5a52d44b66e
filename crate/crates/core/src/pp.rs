//! Pp formulas `∃w̄ H(v̄, w̄)ᵀ = 0` over a path algebra, their solution
//! subspaces in explicit representations, the lattice operations, free
//! realisations and pointed pushouts.
//!
//! Every variable carries a vertex type: a variable of type `i` ranges over
//! `M_i = e_i·M`. Entry `H[row][col]` is a combination of paths from the
//! column's type to the row's type, which is inferred from those paths.

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Coeff, Path, PathAlgebra, PathElement};
use crate::error::{Error, Result};
use crate::linalg::{span_basis, span_dim, subspace_le, Matrix};
use crate::rational::{q, Q};
use crate::rep::{hom_basis, hom_sending, Representation};

/// A linear combination of paths sharing source and target.
pub type Combination = Vec<(Q, Path)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpFormula {
    /// Free variables are the first `free` columns.
    pub free: usize,
    pub bound: usize,
    /// Vertex type of each column.
    pub types: Vec<usize>,
    /// `rows × (free + bound)` entries.
    pub h: Vec<Vec<Combination>>,
    /// Target vertex of each row; `None` for a row with no terms.
    pub row_types: Vec<Option<usize>>,
}

impl PpFormula {
    /// Checks endpoint consistency and infers row types.
    pub fn new(spec: &AlgebraSpec, free: usize, types: Vec<usize>, h: Vec<Vec<Combination>>) -> Result<Self> {
        let cols = types.len();
        if free == 0 || free > cols {
            return Err(Error::Shape(format!("{free} free variables among {cols} columns")));
        }
        if let Some(&t) = types.iter().find(|&&t| t >= spec.vertex_count) {
            return Err(Error::TypeMismatch(format!("column type {} is not a vertex", t + 1)));
        }
        let mut row_types = Vec::with_capacity(h.len());
        for (r, row) in h.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {} has {} entries, expected {cols}", r + 1, row.len())));
            }
            let mut rt = None;
            for (c, comb) in row.iter().enumerate() {
                for (_, p) in comb {
                    if p.src != types[c] {
                        return Err(Error::TypeMismatch(format!(
                            "entry ({}, {}) starts at vertex {}, column type is {}",
                            r + 1,
                            c + 1,
                            p.src + 1,
                            types[c] + 1
                        )));
                    }
                    match rt {
                        None => rt = Some(p.tgt),
                        Some(t) if t != p.tgt => {
                            return Err(Error::TypeMismatch(format!("row {} mixes target vertices", r + 1)));
                        }
                        _ => {}
                    }
                }
            }
            row_types.push(rt);
        }
        Ok(PpFormula { free, bound: cols - free, types, h, row_types })
    }

    pub fn columns(&self) -> usize {
        self.types.len()
    }

    pub fn free_types(&self) -> &[usize] {
        &self.types[..self.free]
    }

    /// `v = v`: no constraint on a variable of type `v`.
    pub fn tautology(v: usize) -> Self {
        PpFormula { free: 1, bound: 0, types: vec![v], h: Vec::new(), row_types: Vec::new() }
    }

    /// `v = 0`.
    pub fn zero(v: usize) -> Self {
        PpFormula {
            free: 1,
            bound: 0,
            types: vec![v],
            h: vec![vec![vec![(q(1), Path::trivial(v))]]],
            row_types: vec![Some(v)],
        }
    }

    /// `∃w (v = p·w)`.
    pub fn divisible_by(p: &Path) -> Self {
        PpFormula {
            free: 1,
            bound: 1,
            types: vec![p.tgt, p.src],
            h: vec![vec![vec![(q(1), Path::trivial(p.tgt))], vec![(q(-1), p.clone())]]],
            row_types: vec![Some(p.tgt)],
        }
    }

    /// `p·v = 0`.
    pub fn annihilated_by(p: &Path) -> Self {
        PpFormula {
            free: 1,
            bound: 0,
            types: vec![p.src],
            h: vec![vec![vec![(q(1), p.clone())]]],
            row_types: vec![Some(p.tgt)],
        }
    }

    /// Matrix of the block system `H` acting on `⊕_c M_{type c}`.
    fn system(&self, m: &Representation) -> Matrix {
        let col_off: Vec<usize> = self
            .types
            .iter()
            .scan(0, |acc, &t| {
                let o = *acc;
                *acc += m.dims[t];
                Some(o)
            })
            .collect();
        let width: usize = self.types.iter().map(|&t| m.dims[t]).sum();
        let height: usize = self.row_types.iter().map(|rt| rt.map_or(0, |t| m.dims[t])).sum();
        let mut sys = Matrix::zeros(height, width);
        let mut r0 = 0;
        for (row, rt) in self.h.iter().zip(&self.row_types) {
            let Some(t) = *rt else { continue };
            for (c, comb) in row.iter().enumerate() {
                if comb.is_empty() {
                    continue;
                }
                let block = m.element_matrix(self.types[c], t, comb);
                sys.set_block(r0, col_off[c], &block);
            }
            r0 += m.dims[t];
        }
        sys
    }

    /// Dimension of the space the free variables range over.
    pub fn free_dim(&self, m: &Representation) -> usize {
        self.free_types().iter().map(|&t| m.dims[t]).sum()
    }

    /// Basis of φ(M) ⊆ ⊕_{c < free} M_{type c}.
    pub fn solution_space(&self, spec: &AlgebraSpec, m: &Representation) -> Result<Vec<Vec<Q>>> {
        crate::rep::validate(spec, m)?;
        let width: usize = self.types.iter().map(|&t| m.dims[t]).sum();
        let fd = self.free_dim(m);
        let sys = self.system(m);
        let kernel: Vec<Vec<Q>> =
            if sys.rows() == 0 { (0..width).map(|i| unit(width, i)).collect() } else { sys.kernel() };
        let projected: Vec<Vec<Q>> = kernel.into_iter().map(|v| v[..fd].to_vec()).collect();
        Ok(span_basis(fd, &projected))
    }

    fn check_compatible(&self, other: &PpFormula) -> Result<()> {
        if self.free != other.free {
            return Err(Error::Shape(format!("free variable counts differ: {} vs {}", self.free, other.free)));
        }
        if self.free_types() != other.free_types() {
            return Err(Error::TypeMismatch("free variables have different vertex types".into()));
        }
        Ok(())
    }

    /// Copies `self`'s rows into a wider formula, sending column `c` to `map[c]`.
    fn embed_rows(&self, map: &[usize], cols: usize, h: &mut Vec<Vec<Combination>>, rt: &mut Vec<Option<usize>>) {
        for (row, t) in self.h.iter().zip(&self.row_types) {
            let mut new = vec![Vec::new(); cols];
            for (c, comb) in row.iter().enumerate() {
                new[map[c]] = comb.clone();
            }
            h.push(new);
            rt.push(*t);
        }
    }

    /// φ ∧ ψ: both systems on shared free variables.
    pub fn meet(&self, other: &PpFormula) -> Result<PpFormula> {
        self.check_compatible(other)?;
        let f = self.free;
        let mut types = self.types.clone();
        types.extend_from_slice(&other.types[f..]);
        let cols = types.len();
        let map_a: Vec<usize> = (0..self.columns()).collect();
        let map_b: Vec<usize> = (0..other.columns()).map(|c| if c < f { c } else { c - f + self.columns() }).collect();
        let (mut h, mut rt) = (Vec::new(), Vec::new());
        self.embed_rows(&map_a, cols, &mut h, &mut rt);
        other.embed_rows(&map_b, cols, &mut h, &mut rt);
        Ok(PpFormula { free: f, bound: cols - f, types, h, row_types: rt })
    }

    /// φ + ψ: `∃v′ v″ (v = v′ + v″ ∧ φ(v′) ∧ ψ(v″))`.
    pub fn plus(&self, other: &PpFormula) -> Result<PpFormula> {
        self.check_compatible(other)?;
        let f = self.free;
        // Columns: v, then φ's columns (v′ first), then ψ's columns (v″ first).
        let mut types = self.types[..f].to_vec();
        types.extend_from_slice(&self.types);
        types.extend_from_slice(&other.types);
        let cols = types.len();
        let map_a: Vec<usize> = (0..self.columns()).map(|c| f + c).collect();
        let map_b: Vec<usize> = (0..other.columns()).map(|c| f + self.columns() + c).collect();
        let (mut h, mut rt) = (Vec::new(), Vec::new());
        for c in 0..f {
            let t = types[c];
            let mut row = vec![Vec::new(); cols];
            row[c] = vec![(q(1), Path::trivial(t))];
            row[f + c] = vec![(q(-1), Path::trivial(t))];
            row[f + self.columns() + c] = vec![(q(-1), Path::trivial(t))];
            h.push(row);
            rt.push(Some(t));
        }
        self.embed_rows(&map_a, cols, &mut h, &mut rt);
        other.embed_rows(&map_b, cols, &mut h, &mut rt);
        Ok(PpFormula { free: f, bound: cols - f, types, h, row_types: rt })
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = q(1);
    v
}

/// A module with a marked element of `module_vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModule {
    pub module: Representation,
    pub vertex: usize,
    /// Coordinates in `module.dims[vertex]`.
    pub point: Vec<Q>,
}

impl PointedModule {
    /// The point as an element of the whole module.
    pub fn flat_point(&self) -> Vec<Q> {
        self.module.embed(self.vertex, &self.point)
    }
}

/// The finitely presented module with one generator `x_c` of type
/// `type(c)` per column and one relation `Σ_c H[r][c]·x_c` per row, pointed
/// at `x_0`.
pub fn free_realisation(alg: &PathAlgebra, phi: &PpFormula) -> Result<PointedModule> {
    if phi.free != 1 {
        return Err(Error::Unsupported("free realisations are built for one free variable".into()));
    }
    let spec = alg.spec();
    let parts: Vec<Representation> =
        phi.types.iter().map(|&t| Representation::projective(alg, t)).collect::<Result<_>>()?;
    let sum = Representation::direct_sum_all(spec, parts.iter());
    // Offset of summand c inside the direct sum at each vertex.
    let n = spec.vertex_count;
    let mut offsets = vec![vec![0; n]; parts.len()];
    let mut acc = vec![0; n];
    for (c, p) in parts.iter().enumerate() {
        offsets[c].clone_from(&acc);
        acc.iter_mut().zip(&p.dims).for_each(|(a, d)| *a += d);
    }
    let mut gens = Vec::new();
    for (row, rt) in phi.h.iter().zip(&phi.row_types) {
        let Some(t) = *rt else { continue };
        let mut x = vec![Q::zero(); sum.dims[t]];
        for (c, comb) in row.iter().enumerate() {
            let mut elem = PathElement::new();
            for (k, p) in comb {
                *elem.entry(p.clone()).or_insert_with(Q::zero) += k;
            }
            for (p, k) in alg.normal_form(&elem) {
                let i = alg.basis_index(&p).expect("normal forms are basis paths");
                x[offsets[c][t] + i] += k;
            }
        }
        gens.push((t, x));
    }
    let sub = sum.generated_submodule(spec, &gens);
    let (module, proj) = sum.quotient(spec, &sub);
    let v = phi.types[0];
    let mut generator = vec![Q::zero(); sum.dims[v]];
    let i = alg.basis_index(&Path::trivial(v)).expect("trivial path is a basis path");
    generator[offsets[0][v] + i] = q(1);
    let point = proj[v].mul_vec(&generator);
    Ok(PointedModule { module, vertex: v, point })
}

/// `M / A·m`.
pub fn coker_of_point(spec: &AlgebraSpec, pm: &PointedModule) -> Representation {
    let sub = pm.module.generated_submodule(spec, &[(pm.vertex, pm.point.clone())]);
    pm.module.quotient(spec, &sub).0
}

/// Pushout of `A → M` and `A → M′` along the two points:
/// `(M ⊕ M′)/A·(m, −m′)`, pointed at the common image.
pub fn pushout_pointed(spec: &AlgebraSpec, a: &PointedModule, b: &PointedModule) -> Result<PointedModule> {
    if a.vertex != b.vertex {
        return Err(Error::TypeMismatch(format!("points at vertices {} and {}", a.vertex + 1, b.vertex + 1)));
    }
    let v = a.vertex;
    let sum = a.module.direct_sum(&b.module);
    let mut diff = a.point.clone();
    diff.extend(b.point.iter().map(|x| -x));
    let sub = sum.generated_submodule(spec, &[(v, diff)]);
    let (module, proj) = sum.quotient(spec, &sub);
    let mut first = a.point.clone();
    first.extend(vec![Q::zero(); b.point.len()]);
    let point = proj[v].mul_vec(&first);
    Ok(PointedModule { module, vertex: v, point })
}

/// `(M ⊕ M′, (m, m′))`.
pub fn sum_pointed(a: &PointedModule, b: &PointedModule) -> Result<PointedModule> {
    if a.vertex != b.vertex {
        return Err(Error::TypeMismatch(format!("points at vertices {} and {}", a.vertex + 1, b.vertex + 1)));
    }
    let mut point = a.point.clone();
    point.extend_from_slice(&b.point);
    Ok(PointedModule { module: a.module.direct_sum(&b.module), vertex: a.vertex, point })
}

/// Basis of `{f(m) : f ∈ Hom(M, N)} ⊆ N_v`.
pub fn pointed_image(spec: &AlgebraSpec, pm: &PointedModule, n: &Representation) -> Result<Vec<Vec<Q>>> {
    let images: Vec<Vec<Q>> =
        hom_basis(spec, &pm.module, n)?.iter().map(|f| f.maps[pm.vertex].mul_vec(&pm.point)).collect();
    Ok(span_basis(n.dims[pm.vertex], &images))
}

/// Whether some `f : M → N` sends the point to `y ∈ N_v`.
pub fn point_reaches(spec: &AlgebraSpec, pm: &PointedModule, n: &Representation, y: &[Q]) -> Result<bool> {
    let target = n.embed(pm.vertex, y);
    Ok(hom_sending(spec, &pm.module, &pm.flat_point(), n, &target)?.is_some())
}

/// A pp-pair φ/ψ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpPair {
    pub phi: PpFormula,
    pub psi: PpFormula,
}

/// `ψ(M) < φ(M)`; fails if `ψ(M) ⊄ φ(M)`.
pub fn pair_open_on(spec: &AlgebraSpec, pair: &PpPair, m: &Representation) -> Result<bool> {
    pair.phi.check_compatible(&pair.psi)?;
    let phi = pair.phi.solution_space(spec, m)?;
    let psi = pair.psi.solution_space(spec, m)?;
    let dim = pair.phi.free_dim(m);
    if !subspace_le(dim, &psi, &phi) {
        return Err(Error::ContractViolation("psi(M) is not contained in phi(M)".into()));
    }
    Ok(span_dim(dim, &phi) > span_dim(dim, &psi))
}

/// A random formula with one free variable, up to `max_bound` existential
/// variables and up to `max_rows` equations. Every equation has at least one
/// entry, each a small multiple of a basis path, and usually involves the
/// free variable.
pub fn random_formula<R: Rng>(alg: &PathAlgebra, rng: &mut R, max_bound: usize, max_rows: usize) -> Result<PpFormula> {
    let spec = alg.spec();
    let n = spec.vertex_count;
    let cols = 1 + rng.gen_range(0..=max_bound);
    let types: Vec<usize> = (0..cols).map(|_| rng.gen_range(0..n)).collect();
    let mut h = Vec::new();
    for _ in 0..rng.gen_range(1..=max_rows.max(1)) {
        // Anchor the row at a column, usually the free one, and pick a target
        // it reaches. A row whose only entry is a trivial path just forces a
        // variable to vanish, so such rows get a second entry when possible.
        let anchor = if rng.gen_bool(0.8) { 0 } else { rng.gen_range(0..cols) };
        let reachable: Vec<usize> = (0..n).filter(|&t| !alg.basis().between(types[anchor], t).is_empty()).collect();
        let t = reachable[rng.gen_range(0..reachable.len())];
        let others: Vec<usize> =
            (0..cols).filter(|&c| c != anchor && !alg.basis().between(types[c], t).is_empty()).collect();
        let mut used: Vec<bool> =
            (0..cols).map(|c| c == anchor || (others.contains(&c) && rng.gen_bool(0.6))).collect();
        if t == types[anchor] && !others.is_empty() && !others.iter().any(|&c| used[c]) {
            used[others[rng.gen_range(0..others.len())]] = true;
        }
        let row: Vec<Combination> = (0..cols)
            .map(|c| {
                if !used[c] {
                    return Vec::new();
                }
                let paths = alg.basis().between(types[c], t);
                let p = paths[rng.gen_range(0..paths.len())].clone();
                vec![(q([-2, -1, 1, 2][rng.gen_range(0..4)]), p)]
            })
            .collect();
        h.push(row);
    }
    PpFormula::new(spec, 1, types, h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpTermFile {
    pub coeff: String,
    /// Arrow labels in written order; empty means the trivial path at the
    /// column's vertex.
    #[serde(default)]
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpEntryFile {
    /// 1-based.
    pub row: usize,
    pub col: usize,
    pub terms: Vec<PpTermFile>,
}

/// Wire form: `{free, bound, entries: [{row, col, terms}], types}` with
/// 1-based rows, columns and vertex types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpFormulaFile {
    pub free: usize,
    pub bound: usize,
    #[serde(default)]
    pub entries: Vec<PpEntryFile>,
    pub types: Vec<usize>,
}

impl PpFormula {
    pub fn from_file(spec: &AlgebraSpec, file: &PpFormulaFile) -> Result<Self> {
        let cols = file.free + file.bound;
        if file.types.len() != cols {
            return Err(Error::Shape(format!("{} column types for {cols} columns", file.types.len())));
        }
        if file.types.contains(&0) {
            return Err(Error::Parse("vertex types are numbered from 1".into()));
        }
        let types: Vec<usize> = file.types.iter().map(|t| t - 1).collect();
        let rows = file.entries.iter().map(|e| e.row).max().unwrap_or(0);
        let mut h = vec![vec![Vec::new(); cols]; rows];
        for e in &file.entries {
            if e.row == 0 || e.col == 0 || e.col > cols {
                return Err(Error::Shape(format!("entry ({}, {}) is out of range", e.row, e.col)));
            }
            let c = e.col - 1;
            for t in &e.terms {
                let coeff = Coeff::parse(&t.coeff)?.eval(spec.lambda.as_ref())?;
                let path = if t.path.is_empty() {
                    Path::trivial(types.get(c).copied().unwrap_or(0))
                } else {
                    let labels: Vec<&str> = t.path.iter().map(String::as_str).collect();
                    spec.path_from_written(&labels)?
                };
                h[e.row - 1][c].push((coeff, path));
            }
        }
        PpFormula::new(spec, file.free, types, h)
    }

    pub fn to_file(&self, spec: &AlgebraSpec) -> PpFormulaFile {
        let mut entries = Vec::new();
        for (r, row) in self.h.iter().enumerate() {
            for (c, comb) in row.iter().enumerate() {
                if comb.is_empty() {
                    continue;
                }
                let terms = comb
                    .iter()
                    .map(|(k, p)| PpTermFile {
                        coeff: crate::rational::format_q(k),
                        path: p.arrows.iter().rev().map(|&a| spec.arrows[a].label.clone()).collect(),
                    })
                    .collect();
                entries.push(PpEntryFile { row: r + 1, col: c + 1, terms });
            }
        }
        PpFormulaFile { free: self.free, bound: self.bound, entries, types: self.types.iter().map(|t| t + 1).collect() }
    }

    pub fn from_json(spec: &AlgebraSpec, s: &str) -> Result<Self> {
        let file: PpFormulaFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(spec, &file)
    }

    pub fn to_json(&self, spec: &AlgebraSpec) -> String {
        serde_json::to_string(&self.to_file(spec)).expect("formula serializes")
    }
}
