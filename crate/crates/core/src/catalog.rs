//! Deterministic fixtures with exact integer structure constants.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::homogeneous::{HomogeneousSpace, SpaceError};
use crate::lie_core::{audit, Dims, InnerProduct, LieData, LieError, Part, ReductiveData};
use crate::norms::NormFamily;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("factor {factor} is not naturally reductive (skew defect {residual:e})")]
    NotNaturallyReductive { factor: usize, residual: f64 },
    #[error("factor {factor} fails the algebraic audit: {check}")]
    AuditFailed { factor: usize, check: String },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Named fixtures available to the CLI and the tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    EuclideanDiagSo2,
    Abelian,
    S3xS3,
    Su2Negative,
    Su2SplitBiInvariant,
}

impl Fixture {
    pub const ALL: [Fixture; 5] =
        [Fixture::EuclideanDiagSo2, Fixture::Abelian, Fixture::S3xS3, Fixture::Su2Negative, Fixture::Su2SplitBiInvariant];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::EuclideanDiagSo2 => "euclidean-diag-so2",
            Fixture::Abelian => "abelian",
            Fixture::S3xS3 => "s3xs3",
            Fixture::Su2Negative => "su2-negative",
            Fixture::Su2SplitBiInvariant => "su2-split-bi-invariant",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn data(self) -> ReductiveData {
        match self {
            Fixture::EuclideanDiagSo2 => euclidean_diag_so2(),
            Fixture::Abelian => abelian(2, 2),
            Fixture::S3xS3 => s3xs3(),
            Fixture::Su2Negative => su2_negative(),
            Fixture::Su2SplitBiInvariant => su2_split_bi_invariant(),
        }
    }

    /// Whether the fixture is naturally reductive for nonlinear families.
    pub fn naturally_reductive(self) -> bool {
        matches!(self, Fixture::EuclideanDiagSo2 | Fixture::Abelian | Fixture::S3xS3)
    }

    pub fn space(self, family: NormFamily) -> Result<HomogeneousSpace, SpaceError> {
        HomogeneousSpace::new(self.data(), family)
    }
}

/// `R^{n1} ⊕ R^{n2}` with trivial isotropy.
pub fn abelian(n1: usize, n2: usize) -> ReductiveData {
    ReductiveData::new(LieData::abelian(Dims::new(0, n1, n2)), InnerProduct::identity(n1, n2)).expect("consistent dims")
}

/// Two Euclidean planes acted on by one diagonal rotation:
/// `g = so(2) + R² + R²`, `[J, t₁] = t₂`, `[J, t₂] = -t₁` in each plane.
pub fn euclidean_diag_so2() -> ReductiveData {
    let triples = [(0, 1, 2, 1.0), (0, 2, 1, -1.0), (0, 3, 4, 1.0), (0, 4, 3, -1.0)];
    let lie = LieData::new(Dims::new(1, 2, 2), &triples).expect("valid triples");
    ReductiveData::new(lie, InnerProduct::identity(2, 2)).expect("consistent dims")
}

/// su(2) triples `[e_a,e_b] = e_c` (cyclic) on the given global indices.
fn su2_triples(a: usize, b: usize, c: usize) -> [(usize, usize, usize, f64); 3] {
    [(a, b, c, 1.0), (b, c, a, 1.0), (c, a, b, 1.0)]
}

/// su(2) with `h = 0` and the identity Gram as a single-block Riemannian
/// factor: the round 3-sphere.
pub fn su2_factor() -> ReductiveData {
    let lie = LieData::new(Dims::new(0, 3, 0), &su2_triples(0, 1, 2)).expect("valid triples");
    ReductiveData::new(lie, InnerProduct::identity(3, 0)).expect("consistent dims")
}

fn su2_split(gram_diag: [f64; 3]) -> ReductiveData {
    let lie = LieData::new(Dims::new(0, 2, 1), &su2_triples(0, 1, 2)).expect("valid triples");
    let gram = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&gram_diag));
    ReductiveData::new(lie, InnerProduct::new(gram, 2, 1).expect("3x3 gram")).expect("consistent dims")
}

/// Negative control: su(2), `h = 0`, `m₁ = span(e₁,e₂)`, `m₂ = span(e₃)`
/// with Gram `diag(1, 2, 1)`. Fails `[m₁,m₂] ⊆ h` and, because the Gram is
/// not bi-invariant on `m₁`, also the vanishing-S condition.
pub fn su2_negative() -> ReductiveData {
    su2_split([1.0, 2.0, 1.0])
}

/// The same split with the bi-invariant Gram. Not naturally reductive for
/// nonlinear `L`, yet its S-curvature vanishes identically.
pub fn su2_split_bi_invariant() -> ReductiveData {
    su2_split([1.0, 1.0, 1.0])
}

/// Direct sum of two Riemannian factors: `h = h₁ ⊕ h₂`, `m₁` from the
/// first factor, `m₂` from the second, block Gram. Each factor's `m` may be
/// given split or unsplit; both blocks are merged. Factors must pass the
/// algebraic audit and be naturally reductive.
pub fn f_product_data(first: &ReductiveData, second: &ReductiveData) -> Result<ReductiveData, CatalogError> {
    for (factor, data) in [(1, first), (2, second)] {
        let tol = 1e-9;
        if let Some(failed) = audit(&data.lie, &data.ip, tol).into_iter().find(|c| !c.passed) {
            return Err(CatalogError::AuditFailed { factor, check: failed.name });
        }
        let skew = data.skewness(Part::M, data.ip.gram(), "factor skew", tol);
        if !skew.passed {
            return Err(CatalogError::NotNaturallyReductive { factor, residual: skew.residual });
        }
    }
    let (da, db) = (first.dims(), second.dims());
    let (na, nb) = (da.n(), db.n());
    let h = da.h + db.h;
    let map_a = |i: usize| if i < da.h { i } else { h + (i - da.h) };
    let map_b = |i: usize| if i < db.h { da.h + i } else { h + na + (i - db.h) };
    let mut triples = Vec::new();
    for (i, j, k, c) in first.lie.canonical_triples() {
        triples.push((map_a(i), map_a(j), map_a(k), c));
    }
    for (i, j, k, c) in second.lie.canonical_triples() {
        triples.push((map_b(i), map_b(j), map_b(k), c));
    }
    let lie = LieData::new(Dims::new(h, na, nb), &triples)?;
    let mut gram = DMatrix::zeros(na + nb, na + nb);
    gram.view_mut((0, 0), (na, na)).copy_from(first.ip.gram());
    gram.view_mut((na, na), (nb, nb)).copy_from(second.ip.gram());
    Ok(ReductiveData::new(lie, InnerProduct::new(gram, na, nb)?)?)
}

/// f-product metric `sqrt(L(α₁², α₂²))` on the product of two Riemannian factors.
pub fn f_product(first: &ReductiveData, second: &ReductiveData, family: NormFamily) -> Result<HomogeneousSpace, CatalogError> {
    Ok(HomogeneousSpace::new(f_product_data(first, second)?, family)?)
}

/// `S³ × S³` as the f-product of two bi-invariant su(2) factors.
pub fn s3xs3() -> ReductiveData {
    f_product_data(&su2_factor(), &su2_factor()).expect("bi-invariant factors")
}
