//! Finite-dimensional representations of a quiver with relations over ℚ:
//! validation, projectives and simples, Hom spaces as intertwiner kernels,
//! and Ext groups through a projective presentation.
//!
//! Convention: an element at vertex `i` is pushed along an arrow `i → j` by
//! that arrow's `dims[j] × dims[i]` matrix, so a path acts by the product of
//! its arrow matrices with the first arrow rightmost.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Path, PathAlgebra, PathElement};
use crate::error::{Error, Result};
use crate::lattice::{DimVector, K0Lattice, Slope};
use crate::linalg::{quotient_map, span_basis, Matrix};
use crate::rational::{format_q, parse_q, q, Q};

/// Per-vertex subspaces, each given by a list of basis vectors.
pub type VertexSubspaces = Vec<Vec<Vec<Q>>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub dims: Vec<usize>,
    /// One matrix per arrow, in the spec's arrow order.
    pub maps: Vec<Matrix>,
}

/// A family of vertex maps `f_i : M_i → N_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub maps: Vec<Matrix>,
}

impl Representation {
    pub fn zero(spec: &AlgebraSpec) -> Self {
        Self::zero_maps(spec, vec![0; spec.vertex_count])
    }

    pub fn simple(spec: &AlgebraSpec, i: usize) -> Result<Self> {
        check_vertex(spec, i)?;
        let mut dims = vec![0; spec.vertex_count];
        dims[i] = 1;
        Ok(Self::zero_maps(spec, dims))
    }

    /// Representation with the given dimensions and all arrow maps zero.
    pub fn zero_maps(spec: &AlgebraSpec, dims: Vec<usize>) -> Self {
        let maps = spec.arrows.iter().map(|a| Matrix::zeros(dims[a.tgt], dims[a.src])).collect();
        Representation { dims, maps }
    }

    /// P_i = A·e_i on the normal-form paths starting at `i`; arrows act by
    /// composing on the left.
    pub fn projective(alg: &PathAlgebra, i: usize) -> Result<Self> {
        let spec = alg.spec();
        check_vertex(spec, i)?;
        let basis = alg.basis();
        let dims: Vec<usize> = (0..spec.vertex_count).map(|j| basis.between(i, j).len()).collect();
        let mut rep = Self::zero_maps(spec, dims);
        for (a, arrow) in spec.arrows.iter().enumerate() {
            let step = Path { src: arrow.src, tgt: arrow.tgt, arrows: vec![a] };
            for (col, p) in basis.between(i, arrow.src).iter().enumerate() {
                for (res, c) in alg.compose(&step, p) {
                    let row = alg.basis_index(&res).expect("normal forms are basis paths");
                    rep.maps[a][(row, col)] = c;
                }
            }
        }
        Ok(rep)
    }

    pub fn dim_vector(&self) -> DimVector {
        DimVector(self.dims.iter().map(|&d| d as i64).collect())
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Start of each vertex block in the flattened element space.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dims.len());
        let mut acc = 0;
        for &d in &self.dims {
            out.push(acc);
            acc += d;
        }
        out
    }

    /// The matrix by which `path` acts, `dims[tgt] × dims[src]`.
    pub fn path_matrix(&self, path: &Path) -> Matrix {
        let mut m = Matrix::identity(self.dims[path.src]);
        for &a in &path.arrows {
            m = self.maps[a].mul(&m);
        }
        m
    }

    /// Matrix of an algebra element whose paths all run `src → tgt`.
    pub fn element_matrix(&self, src: usize, tgt: usize, elem: &[(Q, Path)]) -> Matrix {
        let mut m = Matrix::zeros(self.dims[tgt], self.dims[src]);
        for (c, p) in elem {
            debug_assert!(p.src == src && p.tgt == tgt);
            m.add_scaled(c, &self.path_matrix(p));
        }
        m
    }

    pub fn direct_sum(&self, other: &Representation) -> Representation {
        Representation {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            maps: self.maps.iter().zip(&other.maps).map(|(a, b)| a.block_diag(b)).collect(),
        }
    }

    pub fn direct_sum_all<'a>(
        spec: &AlgebraSpec,
        reps: impl IntoIterator<Item = &'a Representation>,
    ) -> Representation {
        reps.into_iter().fold(Self::zero(spec), |acc, r| acc.direct_sum(r))
    }

    /// The component of a flattened element at vertex `v`.
    pub fn component(&self, element: &[Q], v: usize) -> Vec<Q> {
        let off = self.offsets()[v];
        element[off..off + self.dims[v]].to_vec()
    }

    /// Embeds a vector of `M_v` into the flattened element space.
    pub fn embed(&self, v: usize, local: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.total_dim()];
        let off = self.offsets()[v];
        out[off..off + local.len()].clone_from_slice(local);
        out
    }

    /// Submodule generated by vertex-local vectors: closes the spans under
    /// every arrow.
    pub fn generated_submodule(&self, spec: &AlgebraSpec, gens: &[(usize, Vec<Q>)]) -> VertexSubspaces {
        let n = self.dims.len();
        let mut spans: VertexSubspaces = vec![Vec::new(); n];
        let mut pending: Vec<(usize, Vec<Q>)> = gens.to_vec();
        while let Some((v, x)) = pending.pop() {
            let before = spans[v].len();
            let mut with = spans[v].clone();
            with.push(x.clone());
            let basis = span_basis(self.dims[v], &with);
            if basis.len() == before {
                continue;
            }
            spans[v] = basis;
            for (a, arrow) in spec.arrows_from(v) {
                pending.push((arrow.tgt, self.maps[a].mul_vec(&x)));
            }
        }
        spans
    }

    /// Restriction to a submodule given by arrow-stable vertex subspaces,
    /// written in the given bases.
    pub fn restrict(&self, spec: &AlgebraSpec, sub: &VertexSubspaces) -> Result<Representation> {
        let dims: Vec<usize> = sub.iter().map(Vec::len).collect();
        let mut maps = Vec::with_capacity(spec.arrows.len());
        for (a, arrow) in spec.arrows.iter().enumerate() {
            let (s, t) = (arrow.src, arrow.tgt);
            let target = Matrix::from_columns(self.dims[t], &sub[t]);
            let mut m = Matrix::zeros(dims[t], dims[s]);
            for (col, v) in sub[s].iter().enumerate() {
                let image = self.maps[a].mul_vec(v);
                let coords = target.solve(&image).ok_or_else(|| {
                    Error::Precondition(format!("subspaces are not stable under arrow {}", arrow.label))
                })?;
                for (row, c) in coords.into_iter().enumerate() {
                    m[(row, col)] = c;
                }
            }
            maps.push(m);
        }
        Ok(Representation { dims, maps })
    }

    /// `M / sub` together with the per-vertex projections.
    pub fn quotient(&self, spec: &AlgebraSpec, sub: &VertexSubspaces) -> (Representation, Vec<Matrix>) {
        let qm: Vec<_> = (0..self.dims.len()).map(|v| quotient_map(self.dims[v], &sub[v])).collect();
        let dims: Vec<usize> = qm.iter().map(|x| x.project.rows()).collect();
        let maps = spec
            .arrows
            .iter()
            .enumerate()
            .map(|(a, arrow)| qm[arrow.tgt].project.mul(&self.maps[a]).mul(&qm[arrow.src].lift))
            .collect();
        (Representation { dims, maps }, qm.into_iter().map(|x| x.project).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
}

fn check_vertex(spec: &AlgebraSpec, i: usize) -> Result<()> {
    if i >= spec.vertex_count {
        return Err(Error::Domain(format!("vertex {} out of range 1..={}", i + 1, spec.vertex_count)));
    }
    Ok(())
}

/// Checks matrix shapes and that every relation acts as zero.
pub fn validate(spec: &AlgebraSpec, rep: &Representation) -> Result<()> {
    if rep.dims.len() != spec.vertex_count {
        return Err(Error::Shape(format!("{} vertex dimensions for {} vertices", rep.dims.len(), spec.vertex_count)));
    }
    if rep.maps.len() != spec.arrows.len() {
        return Err(Error::Shape(format!("{} arrow matrices for {} arrows", rep.maps.len(), spec.arrows.len())));
    }
    for (m, arrow) in rep.maps.iter().zip(&spec.arrows) {
        let want = (rep.dims[arrow.tgt], rep.dims[arrow.src]);
        if m.shape() != want {
            return Err(Error::Shape(format!("arrow {} has shape {:?}, expected {:?}", arrow.label, m.shape(), want)));
        }
    }
    for (i, rel) in spec.relations.iter().enumerate() {
        let terms = spec.evaluated_relation(i)?;
        if rep.element_matrix(rel.src(), rel.tgt(), &terms).is_zero() {
            continue;
        }
        return Err(Error::RelationViolation { relation: rel.name.clone() });
    }
    Ok(())
}

pub fn module_slope(lat: &K0Lattice, rep: &Representation) -> Result<Slope> {
    lat.slope(&rep.dim_vector())
}

/// Column layout of the unknowns `f_v` (row-major) in the intertwiner system.
struct HomLayout {
    offsets: Vec<usize>,
    vars: usize,
}

impl HomLayout {
    fn new(m: &Representation, n: &Representation) -> Self {
        let mut offsets = Vec::with_capacity(m.dims.len());
        let mut vars = 0;
        for (dm, dn) in m.dims.iter().zip(&n.dims) {
            offsets.push(vars);
            vars += dm * dn;
        }
        HomLayout { offsets, vars }
    }

    fn var(&self, n: &Representation, m: &Representation, v: usize, row: usize, col: usize) -> usize {
        debug_assert!(row < n.dims[v] && col < m.dims[v]);
        self.offsets[v] + row * m.dims[v] + col
    }

    fn unpack(&self, m: &Representation, n: &Representation, x: &[Q]) -> Morphism {
        let maps = (0..m.dims.len())
            .map(|v| {
                let mut f = Matrix::zeros(n.dims[v], m.dims[v]);
                for r in 0..n.dims[v] {
                    for c in 0..m.dims[v] {
                        f[(r, c)] = x[self.var(n, m, v, r, c)].clone();
                    }
                }
                f
            })
            .collect();
        Morphism { maps }
    }
}

/// Rows of `f_t·A_α − B_α·f_s = 0` for every arrow α : s → t.
fn intertwiner_rows(spec: &AlgebraSpec, m: &Representation, n: &Representation, lay: &HomLayout) -> Vec<Vec<Q>> {
    let mut rows = Vec::new();
    for (a, arrow) in spec.arrows.iter().enumerate() {
        let (s, t) = (arrow.src, arrow.tgt);
        let (ma, na) = (&m.maps[a], &n.maps[a]);
        for r in 0..n.dims[t] {
            for c in 0..m.dims[s] {
                let mut row = vec![Q::zero(); lay.vars];
                for k in 0..m.dims[t] {
                    if !ma[(k, c)].is_zero() {
                        row[lay.var(n, m, t, r, k)] += &ma[(k, c)];
                    }
                }
                for k in 0..n.dims[s] {
                    if !na[(r, k)].is_zero() {
                        row[lay.var(n, m, s, k, c)] -= &na[(r, k)];
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

fn check_pair(spec: &AlgebraSpec, m: &Representation, n: &Representation) -> Result<()> {
    validate(spec, m)?;
    validate(spec, n)
}

/// A basis of Hom(M, N).
pub fn hom_basis(spec: &AlgebraSpec, m: &Representation, n: &Representation) -> Result<Vec<Morphism>> {
    check_pair(spec, m, n)?;
    let lay = HomLayout::new(m, n);
    let rows = intertwiner_rows(spec, m, n, &lay);
    let kernel = if rows.is_empty() {
        (0..lay.vars).map(|i| unit(lay.vars, i)).collect()
    } else {
        Matrix::from_rows_sized(rows.len(), lay.vars, rows).kernel()
    };
    Ok(kernel.iter().map(|x| lay.unpack(m, n, x)).collect())
}

pub fn hom_dim(spec: &AlgebraSpec, m: &Representation, n: &Representation) -> Result<usize> {
    check_pair(spec, m, n)?;
    let lay = HomLayout::new(m, n);
    let rows = intertwiner_rows(spec, m, n, &lay);
    if rows.is_empty() {
        return Ok(lay.vars);
    }
    Ok(lay.vars - Matrix::from_rows_sized(rows.len(), lay.vars, rows).rank())
}

/// Some morphism `f : M → N` with `f(m) = n` for flattened elements, if any.
pub fn hom_sending(
    spec: &AlgebraSpec,
    m: &Representation,
    x: &[Q],
    n: &Representation,
    y: &[Q],
) -> Result<Option<Morphism>> {
    check_pair(spec, m, n)?;
    if x.len() != m.total_dim() || y.len() != n.total_dim() {
        return Err(Error::Shape("element length does not match its module".into()));
    }
    let lay = HomLayout::new(m, n);
    let mut rows = intertwiner_rows(spec, m, n, &lay);
    let mut rhs = vec![Q::zero(); rows.len()];
    let (mo, no) = (m.offsets(), n.offsets());
    for v in 0..m.dims.len() {
        for r in 0..n.dims[v] {
            let mut row = vec![Q::zero(); lay.vars];
            for c in 0..m.dims[v] {
                row[lay.var(n, m, v, r, c)] = x[mo[v] + c].clone();
            }
            rows.push(row);
            rhs.push(y[no[v] + r].clone());
        }
    }
    if rows.is_empty() {
        return Ok(Some(lay.unpack(m, n, &vec![Q::zero(); lay.vars])));
    }
    let sys = Matrix::from_rows_sized(rows.len(), lay.vars, rows);
    Ok(sys.solve(&rhs).map(|sol| lay.unpack(m, n, &sol)))
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

impl Morphism {
    /// Applies the morphism to a flattened element of its source.
    pub fn apply(&self, m: &Representation, n: &Representation, x: &[Q]) -> Vec<Q> {
        let mut out = Vec::with_capacity(n.total_dim());
        for v in 0..m.dims.len() {
            out.extend(self.maps[v].mul_vec(&m.component(x, v)));
        }
        out
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Morphism) -> Morphism {
        Morphism { maps: self.maps.iter().zip(&first.maps).map(|(g, f)| g.mul(f)).collect() }
    }

    pub fn is_morphism(&self, spec: &AlgebraSpec, m: &Representation, n: &Representation) -> bool {
        spec.arrows
            .iter()
            .enumerate()
            .all(|(a, arr)| self.maps[arr.tgt].mul(&m.maps[a]) == n.maps[a].mul(&self.maps[arr.src]))
    }
}

/// The projective cover-like presentation 0 → K → P0 → M → 0 with
/// P0 = ⊕ P_i^{dim M_i}, each generator of P_i sent to a basis vector of M_i.
pub struct Presentation {
    pub p0: Representation,
    pub syzygy: Representation,
    /// Multiplicity of P_i in P0.
    pub multiplicities: Vec<usize>,
}

pub fn presentation(alg: &PathAlgebra, m: &Representation) -> Result<Presentation> {
    let spec = alg.spec();
    validate(spec, m)?;
    let n = spec.vertex_count;
    let projectives: Vec<Representation> = (0..n).map(|i| Representation::projective(alg, i)).collect::<Result<_>>()?;
    let mut summands = Vec::new();
    for i in 0..n {
        for k in 0..m.dims[i] {
            summands.push((i, k));
        }
    }
    let p0 = Representation::direct_sum_all(spec, summands.iter().map(|(i, _)| &projectives[*i]));
    // π_v : P0_v → M_v sends the basis path p of the summand (i, k) to p·e_k.
    let mut pi: Vec<Matrix> = (0..n).map(|v| Matrix::zeros(m.dims[v], p0.dims[v])).collect();
    let mut col_offsets = vec![0usize; n];
    for (i, k) in &summands {
        for (v, pi_v) in pi.iter_mut().enumerate() {
            for (c, path) in alg.basis().between(*i, v).iter().enumerate() {
                let image = m.path_matrix(path).column(*k);
                for (r, x) in image.into_iter().enumerate() {
                    pi_v[(r, col_offsets[v] + c)] = x;
                }
            }
            col_offsets[v] += alg.basis().between(*i, v).len();
        }
    }
    let kernel: VertexSubspaces = pi.iter().map(Matrix::kernel).collect();
    let syzygy = p0.restrict(spec, &kernel)?;
    Ok(Presentation { p0, syzygy, multiplicities: m.dims.clone() })
}

/// dim Ext¹(M, N) from 0 → Hom(M,N) → Hom(P0,N) → Hom(K,N) → Ext¹(M,N) → 0.
pub fn ext_dim(alg: &PathAlgebra, m: &Representation, n: &Representation) -> Result<usize> {
    let spec = alg.spec();
    let pres = presentation(alg, m)?;
    let hom_k = hom_dim(spec, &pres.syzygy, n)?;
    let hom_p0: usize = (0..spec.vertex_count).map(|i| m.dims[i] * n.dims[i]).sum();
    let hom_m = hom_dim(spec, m, n)?;
    Ok(hom_k + hom_m - hom_p0)
}

/// dim Ext²(M, N) = dim Ext¹(K, N) for the syzygy K.
pub fn ext2_dim(alg: &PathAlgebra, m: &Representation, n: &Representation) -> Result<usize> {
    let pres = presentation(alg, m)?;
    ext_dim(alg, &pres.syzygy, n)
}

/// Whether M has projective dimension at most 1, i.e. its syzygy is
/// projective: K ≅ ⊕ P_i^{t_i} with t_i = dim Hom(K, S_i) exactly when the
/// dimensions agree.
pub fn has_pd_at_most_one(alg: &PathAlgebra, m: &Representation) -> Result<bool> {
    let spec = alg.spec();
    let k = presentation(alg, m)?.syzygy;
    let mut covered = 0;
    for i in 0..spec.vertex_count {
        let top = hom_dim(spec, &k, &Representation::simple(spec, i)?)?;
        covered += top * alg.basis().paths[i].iter().map(Vec::len).sum::<usize>();
    }
    Ok(covered == k.total_dim())
}

/// A random quotient of `P_{i1} ⊕ … ⊕ P_{im}` by the submodule generated by
/// a few random vertex-local elements with small integer entries.
pub fn random_quotient<R: Rng>(
    alg: &PathAlgebra,
    rng: &mut R,
    max_summands: usize,
    max_relations: usize,
) -> Result<Representation> {
    let spec = alg.spec();
    let n = spec.vertex_count;
    let projectives: Vec<Representation> = (0..n).map(|i| Representation::projective(alg, i)).collect::<Result<_>>()?;
    // Larger projectives are drawn more often so quotients stay interesting.
    let pick = WeightedIndex::new(projectives.iter().map(Representation::total_dim))
        .map_err(|e| Error::Unsupported(format!("no projective to sample: {e}")))?;
    let count = rng.gen_range(1..=max_summands.max(1));
    let parts: Vec<&Representation> = (0..count).map(|_| &projectives[pick.sample(rng)]).collect();
    let p = Representation::direct_sum_all(spec, parts);
    // Sparse generators: one or two nonzero coordinates each.
    let mut gens = Vec::new();
    for _ in 0..rng.gen_range(0..=max_relations) {
        let v = rng.gen_range(0..n);
        if p.dims[v] == 0 {
            continue;
        }
        let mut x = vec![Q::zero(); p.dims[v]];
        for _ in 0..rng.gen_range(1..=2) {
            x[rng.gen_range(0..p.dims[v])] = q([-2, -1, 1, 2][rng.gen_range(0..4)]);
        }
        gens.push((v, x));
    }
    let sub = p.generated_submodule(spec, &gens);
    Ok(p.quotient(spec, &sub).0)
}

/// Wire form: `{dims: [...], arrows: {label: [[ "p/q", ... ], ...]}}`.
/// Arrows that are omitted act as zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub arrows: BTreeMap<String, Vec<Vec<String>>>,
}

impl Representation {
    pub fn from_file(spec: &AlgebraSpec, file: &RepresentationFile) -> Result<Self> {
        if file.dims.len() != spec.vertex_count {
            return Err(Error::Shape(format!("{} dimensions for {} vertices", file.dims.len(), spec.vertex_count)));
        }
        for label in file.arrows.keys() {
            if spec.arrow_index(label).is_none() {
                return Err(Error::Parse(format!("unknown arrow {label:?}")));
            }
        }
        let mut rep = Self::zero_maps(spec, file.dims.clone());
        for (a, arrow) in spec.arrows.iter().enumerate() {
            let Some(rows) = file.arrows.get(&arrow.label) else { continue };
            let (r, c) = (file.dims[arrow.tgt], file.dims[arrow.src]);
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(Error::Shape(format!("arrow {} must be {r}x{c}", arrow.label)));
            }
            for (i, row) in rows.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    rep.maps[a][(i, j)] = parse_q(x)?;
                }
            }
        }
        validate(spec, &rep)?;
        Ok(rep)
    }

    pub fn to_file(&self, spec: &AlgebraSpec) -> RepresentationFile {
        let arrows = spec
            .arrows
            .iter()
            .zip(&self.maps)
            .map(|(arrow, m)| {
                (arrow.label.clone(), m.to_rows().iter().map(|r| r.iter().map(format_q).collect()).collect())
            })
            .collect();
        RepresentationFile { dims: self.dims.clone(), arrows }
    }

    pub fn from_json(spec: &AlgebraSpec, s: &str) -> Result<Self> {
        let file: RepresentationFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(spec, &file)
    }

    pub fn to_json(&self, spec: &AlgebraSpec) -> String {
        serde_json::to_string(&self.to_file(spec)).expect("representation serializes")
    }
}

/// Applies an algebra element to a vertex-local vector.
pub fn act(rep: &Representation, elem: &PathElement, src: usize, x: &[Q]) -> Vec<Q> {
    let tgt = elem.keys().next().map_or(src, |p| p.tgt);
    let mut out = vec![Q::zero(); rep.dims[tgt]];
    for (p, c) in elem {
        for (o, y) in out.iter_mut().zip(rep.path_matrix(p).mul_vec(x)) {
            *o += c * y;
        }
    }
    out
}
