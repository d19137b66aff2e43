//! Lie-algebraic input: structure constants over a `(h | m₁ | m₂)` basis and
//! an inner product on `m`, with audits of every algebraic precondition.
//!
//! Basis indices are global: `0..dim_h` span `h`, the next `dim_m1` span
//! `m₁`, the last `dim_m2` span `m₂`. Vectors in `m` use local indices
//! `0..n` where `n = dim_m1 + dim_m2`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::check::{Check, MaxTracker, Witness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("structure triple ({i}, {j}, {k}) out of range for a {dim}-dimensional algebra")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error("structure triple ({i}, {j}, {k}) has a non-finite value")]
    NonFinite { i: usize, j: usize, k: usize },
    #[error("expected a vector of length {m} (m) or {g} (g), got {got}")]
    DimensionMismatch { m: usize, g: usize, got: usize },
    #[error("gram matrix must be {expected}x{expected}, got {rows}x{cols}")]
    GramShape { expected: usize, rows: usize, cols: usize },
    #[error("gram matrix has a non-finite entry at ({0}, {1})")]
    GramNonFinite(usize, usize),
    #[error("inner product and Lie data disagree on the split: ({0}, {1}) vs ({2}, {3})")]
    SplitMismatch(usize, usize, usize, usize),
}

/// Block sizes of the basis ordering `(h | m₁ | m₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub h: usize,
    pub m1: usize,
    pub m2: usize,
}

impl Dims {
    pub fn new(h: usize, m1: usize, m2: usize) -> Self {
        Self { h, m1, m2 }
    }

    /// Dimension of `m`.
    pub fn n(&self) -> usize {
        self.m1 + self.m2
    }

    /// Dimension of `g`.
    pub fn total(&self) -> usize {
        self.h + self.m1 + self.m2
    }

    pub fn part_of(&self, global: usize) -> Part {
        if global < self.h {
            Part::H
        } else if global < self.h + self.m1 {
            Part::M1
        } else {
            Part::M2
        }
    }

    /// Global index range of a block.
    pub fn range(&self, part: Part) -> std::ops::Range<usize> {
        match part {
            Part::H => 0..self.h,
            Part::M => self.h..self.total(),
            Part::M1 => self.h..self.h + self.m1,
            Part::M2 => self.h + self.m1..self.total(),
        }
    }
}

/// A block of the reductive decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    H,
    M,
    M1,
    M2,
}

impl Part {
    fn contains(self, other: Part) -> bool {
        self == other || (self == Part::M && matches!(other, Part::M1 | Part::M2))
    }
}

/// Structure constants `c_{ij}^k` of `[e_i, e_j] = c_{ij}^k e_k`.
///
/// The triples exactly as supplied are kept for the antisymmetry audit and
/// for export; evaluation goes through a canonical `i < j` table.
#[derive(Debug, Clone, PartialEq)]
pub struct LieData {
    dims: Dims,
    raw: Vec<(usize, usize, usize, f64)>,
    canonical: BTreeMap<(usize, usize, usize), f64>,
}

impl LieData {
    pub fn new(dims: Dims, triples: &[(usize, usize, usize, f64)]) -> Result<Self, LieError> {
        let dim = dims.total();
        let mut sums: BTreeMap<(usize, usize, usize), (f64, usize)> = BTreeMap::new();
        for &(i, j, k, value) in triples {
            if i >= dim || j >= dim || k >= dim {
                return Err(LieError::IndexOutOfRange { i, j, k, dim });
            }
            if !value.is_finite() {
                return Err(LieError::NonFinite { i, j, k });
            }
            if i == j {
                continue;
            }
            let (key, signed) = if i < j { ((i, j, k), value) } else { ((j, i, k), -value) };
            let entry = sums.entry(key).or_insert((0.0, 0));
            entry.0 += signed;
            entry.1 += 1;
        }
        let canonical = sums
            .into_iter()
            .map(|(key, (sum, count))| (key, sum / count as f64))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        Ok(Self { dims, raw: triples.to_vec(), canonical })
    }

    /// The abelian algebra with the given blocks.
    pub fn abelian(dims: Dims) -> Self {
        Self { dims, raw: Vec::new(), canonical: BTreeMap::new() }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn raw_triples(&self) -> &[(usize, usize, usize, f64)] {
        &self.raw
    }

    /// Canonical `i < j` triples with nonzero value, sorted.
    pub fn canonical_triples(&self) -> Vec<(usize, usize, usize, f64)> {
        self.canonical.iter().map(|(&(i, j, k), &c)| (i, j, k, c)).collect()
    }

    /// `c_{ij}^k` read from the canonical table.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> f64 {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.canonical.get(&(i, j, k)).copied().unwrap_or(0.0),
            Ordering::Greater => -self.canonical.get(&(j, i, k)).copied().unwrap_or(0.0),
            Ordering::Equal => 0.0,
        }
    }

    /// Lifts an `m`-vector into `g` coordinates; `g`-vectors pass through.
    pub fn to_g(&self, v: &DVector<f64>) -> Result<DVector<f64>, LieError> {
        let (n, g) = (self.dims.n(), self.dims.total());
        if v.len() == g {
            Ok(v.clone())
        } else if v.len() == n {
            let mut out = DVector::zeros(g);
            out.rows_mut(self.dims.h, n).copy_from(v);
            Ok(out)
        } else {
            Err(LieError::DimensionMismatch { m: n, g, got: v.len() })
        }
    }

    /// `[u, v]` over the full basis. Each argument may be an `m`- or `g`-vector.
    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>, LieError> {
        let u = self.to_g(u)?;
        let v = self.to_g(v)?;
        let mut out = DVector::zeros(self.dims.total());
        for (&(i, j, k), &c) in &self.canonical {
            out[k] += c * (u[i] * v[j] - u[j] * v[i]);
        }
        Ok(out)
    }

    /// `[u, v]_m` as an `m`-vector.
    pub fn bracket_m(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>, LieError> {
        Ok(self.m_coords(&self.bracket(u, v)?))
    }

    /// `m`-coordinates of a `g`-vector.
    pub fn m_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        v.rows(self.dims.h, self.dims.n()).into_owned()
    }

    /// Coordinate projection onto a block, returned in the input's own
    /// coordinates (a `g`-vector stays a `g`-vector, an `m`-vector an `m`-vector).
    pub fn project(&self, v: &DVector<f64>, part: Part) -> Result<DVector<f64>, LieError> {
        let (n, g) = (self.dims.n(), self.dims.total());
        let offset = if v.len() == g {
            0
        } else if v.len() == n {
            self.dims.h
        } else {
            return Err(LieError::DimensionMismatch { m: n, g, got: v.len() });
        };
        let mut out = v.clone();
        for (local, x) in out.iter_mut().enumerate() {
            if !part.contains(self.dims.part_of(local + offset)) {
                *x = 0.0;
            }
        }
        Ok(out)
    }

    /// Matrix of `ad(e_z)` restricted to `m` and projected to `m`:
    /// column `j` holds `[e_z, e_{m,j}]_m`.
    pub fn ad_m(&self, z: usize) -> DMatrix<f64> {
        let d = self.dims;
        let n = d.n();
        DMatrix::from_fn(n, n, |row, col| self.coefficient(z, d.h + col, d.h + row))
    }

    /// `ad_m(x)|_m` for an arbitrary `m`-vector `x`.
    pub fn ad_m_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let h = self.dims.h;
        let n = self.dims.n();
        let mut out = DMatrix::zeros(n, n);
        for (a, &xa) in x.iter().enumerate() {
            if xa != 0.0 {
                out += self.ad_m(h + a) * xa;
            }
        }
        out
    }

    /// Max |c_{ij}^k + c_{ji}^k| over the supplied triples.
    fn antisymmetry_check(&self, tol: f64) -> Check {
        let mut contributions: BTreeMap<(usize, usize, usize), Vec<f64>> = BTreeMap::new();
        let mut tracker = MaxTracker::new();
        for &(i, j, k, value) in &self.raw {
            if i == j {
                tracker.observe(value.abs(), || Witness::Indices(vec![i, j, k]));
                continue;
            }
            let (key, signed) = if i < j { ((i, j, k), value) } else { ((j, i, k), -value) };
            contributions.entry(key).or_default().push(signed);
        }
        for ((i, j, k), values) in contributions {
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            let min = values.iter().cloned().fold(f64::MAX, f64::min);
            tracker.observe(max - min, || Witness::Indices(vec![i, j, k]));
        }
        tracker.into_check("antisymmetry", tol)
    }

    /// Max component of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    fn jacobi_check(&self, tol: f64) -> Check {
        let d = self.dims.total();
        let c = |i, j, k| self.coefficient(i, j, k);
        let mut tracker = MaxTracker::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let mut worst: f64 = 0.0;
                    for m in 0..d {
                        let mut s = 0.0;
                        for l in 0..d {
                            s += c(i, j, l) * c(l, k, m) + c(j, k, l) * c(l, i, m) + c(k, i, l) * c(l, j, m);
                        }
                        worst = worst.max(s.abs());
                    }
                    tracker.observe(worst, || Witness::Indices(vec![i, j, k]));
                }
            }
        }
        tracker.into_check("jacobi", tol)
    }

    /// Max |c_{ij}^k| over `i ∈ from_a`, `j ∈ from_b`, `k ∈ target`.
    fn block_leak(&self, name: &str, a: Part, b: Part, target: Part, tol: f64) -> Check {
        let mut tracker = MaxTracker::new();
        for i in self.dims.range(a) {
            for j in self.dims.range(b) {
                for k in self.dims.range(target) {
                    let c = self.coefficient(i, j, k);
                    tracker.observe(c.abs(), || Witness::Indices(vec![i, j, k]));
                }
            }
        }
        tracker.into_check(name, tol)
    }

    /// Algebraic checks that involve no inner product.
    pub fn audit_structure(&self, tol: f64) -> Vec<Check> {
        vec![
            self.antisymmetry_check(tol),
            self.jacobi_check(tol),
            self.block_leak("h-subalgebra", Part::H, Part::H, Part::M, tol),
            self.block_leak("reductive [h,m] in m", Part::H, Part::M, Part::H, tol),
            self.block_leak("split invariance [h,m1] in m1", Part::H, Part::M1, Part::M2, tol),
            self.block_leak("split invariance [h,m2] in m2", Part::H, Part::M2, Part::M1, tol),
        ]
    }
}

/// Symmetric bilinear form on `m` given by its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
    n1: usize,
    n2: usize,
}

impl InnerProduct {
    /// Only shape and finiteness are enforced here; definiteness, symmetry
    /// and block-orthogonality are reported by [`audit`].
    pub fn new(gram: DMatrix<f64>, n1: usize, n2: usize) -> Result<Self, LieError> {
        let n = n1 + n2;
        if gram.nrows() != n || gram.ncols() != n {
            return Err(LieError::GramShape { expected: n, rows: gram.nrows(), cols: gram.ncols() });
        }
        for i in 0..n {
            for j in 0..n {
                if !gram[(i, j)].is_finite() {
                    return Err(LieError::GramNonFinite(i, j));
                }
            }
        }
        Ok(Self { gram, n1, n2 })
    }

    pub fn identity(n1: usize, n2: usize) -> Self {
        let n = n1 + n2;
        Self { gram: DMatrix::identity(n, n), n1, n2 }
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn dim(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn dot(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.gram * v)[(0, 0)]
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.dot(u, u).max(0.0).sqrt()
    }

    /// `(y₁, y₂)` as zero-padded `m`-vectors.
    pub fn split(&self, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let mut y1 = y.clone();
        let mut y2 = y.clone();
        y1.rows_mut(self.n1, self.n2).fill(0.0);
        y2.rows_mut(0, self.n1).fill(0.0);
        (y1, y2)
    }

    /// The Gram matrix with the `m₂` (block = 1) or `m₁` (block = 2) rows and
    /// columns zeroed, so that `⟨u_i, v_i⟩ = uᵀ·G_i·v`.
    pub fn block_gram(&self, block: u8) -> DMatrix<f64> {
        let mut g = self.gram.clone();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let in1 = i < self.n1 && j < self.n1;
                let in2 = i >= self.n1 && j >= self.n1;
                let keep = if block == 1 { in1 } else { in2 };
                if !keep {
                    g[(i, j)] = 0.0;
                }
            }
        }
        g
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (&self.gram + self.gram.transpose()) * 0.5;
        sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn audit_self(&self, tol: f64) -> Vec<Check> {
        let n = self.dim();
        let mut sym = MaxTracker::new();
        let mut orth = MaxTracker::new();
        for i in 0..n {
            for j in 0..n {
                sym.observe((self.gram[(i, j)] - self.gram[(j, i)]).abs(), || Witness::Indices(vec![i, j]));
                if i < self.n1 && j >= self.n1 {
                    orth.observe(self.gram[(i, j)].abs(), || Witness::Indices(vec![i, j]));
                }
            }
        }
        let min_eig = if n == 0 { f64::INFINITY } else { self.min_eigenvalue() };
        // Reported as a residual: how far the spectrum is from being positive.
        let pd = Check::new("gram positive definite", if min_eig > 0.0 { 0.0 } else { -min_eig + f64::MIN_POSITIVE }, 0.0, 1);
        vec![sym.into_check("gram symmetric", tol), pd, orth.into_check("gram block-orthogonal", tol)]
    }
}

/// Lie data together with the inner product on `m`: everything except the
/// norm family.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductiveData {
    pub lie: LieData,
    pub ip: InnerProduct,
}

impl ReductiveData {
    pub fn new(lie: LieData, ip: InnerProduct) -> Result<Self, LieError> {
        let d = lie.dims();
        if d.m1 != ip.n1() || d.m2 != ip.n2() {
            return Err(LieError::SplitMismatch(d.m1, d.m2, ip.n1(), ip.n2()));
        }
        Ok(Self { lie, ip })
    }

    pub fn dims(&self) -> Dims {
        self.lie.dims()
    }

    /// Max |⟨[z,x]_m, y⟩ + ⟨x, [z,y]_m⟩| over basis `z` in the given block and
    /// basis `x, y ∈ m`: skewness of `ad_m(z)|_m` with respect to `gram`.
    pub fn skewness(&self, block: Part, gram: &DMatrix<f64>, name: &str, tol: f64) -> Check {
        let mut tracker = MaxTracker::new();
        for z in self.dims().range(block) {
            let a = self.lie.ad_m(z);
            let s = a.transpose() * gram + gram * &a;
            let (idx, worst) = max_abs_entry(&s);
            tracker.observe(worst, || Witness::Indices(vec![z, idx.0, idx.1]));
        }
        tracker.into_check(name, tol)
    }
}

/// Audits every structural invariant of the Lie data and the inner product.
/// Never aborts: failures are reported as failed checks.
pub fn audit(data: &LieData, ip: &InnerProduct, tol: f64) -> Vec<Check> {
    let mut checks = data.audit_structure(tol);
    checks.extend(ip.audit_self(tol));
    let d = data.dims();
    if d.m1 != ip.n1() || d.m2 != ip.n2() {
        checks.push(Check::new("split dimensions agree", f64::INFINITY, tol, 1));
        return checks;
    }
    let rd = ReductiveData { lie: data.clone(), ip: ip.clone() };
    checks.push(rd.skewness(Part::H, ip.gram(), "Ad(H)-invariance of gram", tol));
    checks
}

pub(crate) fn max_abs_entry(m: &DMatrix<f64>) -> ((usize, usize), f64) {
    let mut best = ((0, 0), 0.0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)].abs();
            if v > best.1 || v.is_nan() {
                best = ((i, j), v);
            }
        }
    }
    best
}
