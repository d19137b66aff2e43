//! A homogeneous (α₁,α₂) space at the origin: spray vector field, three
//! independent natural-reductiveness tests, S- and E-curvature.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::check::{Check, MaxTracker, Tolerances, Witness};
use crate::lie_core::{max_abs_entry, Dims, InnerProduct, LieData, LieError, Part, ReductiveData};
use crate::norms::{MinkowskiNorm, NormError, NormFamily};
use crate::oracle;
use crate::sampling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("fundamental tensor is singular at y = {0:?}; the norm is not admissible there")]
    SingularSpray(Vec<f64>),
    #[error("finite-difference step underflows at |y| = {0:e}")]
    StepUnderflow(f64),
}

/// Lie data, inner product and norm family: a homogeneous (α₁,α₂) metric
/// on `G/H` seen at the origin.
#[derive(Debug, Clone)]
pub struct HomogeneousSpace {
    data: ReductiveData,
    norm: MinkowskiNorm,
    nonlinear: bool,
}

/// Verdicts of the finite structural certificate for natural reductiveness.
#[derive(Debug, Clone, PartialEq)]
pub struct NrStructuralReport {
    /// Whether `L` is nonlinear; only then do the block conditions apply.
    pub nonlinear: bool,
    pub conditions: Vec<Check>,
    pub naturally_reductive: bool,
}

/// Sampled and structural witnesses of the S/E equivalences.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub weakly_isotropic_s: bool,
    pub vanishing_s: bool,
    pub isotropic_e: bool,
    pub vanishing_e: bool,
    /// The algebraic vanishing-S certificate.
    pub structural: bool,
    pub checks: Vec<Check>,
}

impl EquivalenceReport {
    pub fn verdicts(&self) -> [bool; 4] {
        [self.weakly_isotropic_s, self.vanishing_s, self.isotropic_e, self.vanishing_e]
    }

    /// All four sampled verdicts and the structural certificate agree.
    pub fn consistent(&self) -> bool {
        self.verdicts().iter().all(|&v| v == self.structural)
    }
}

impl HomogeneousSpace {
    pub fn new(data: ReductiveData, family: NormFamily) -> Result<Self, SpaceError> {
        let nonlinear = family.nonlinearity_check();
        let norm = MinkowskiNorm::new(family, data.ip.clone())?;
        Ok(Self { data, norm, nonlinear })
    }

    pub fn data(&self) -> &ReductiveData {
        &self.data
    }

    pub fn lie(&self) -> &LieData {
        &self.data.lie
    }

    pub fn ip(&self) -> &InnerProduct {
        &self.data.ip
    }

    pub fn norm(&self) -> &MinkowskiNorm {
        &self.norm
    }

    pub fn family(&self) -> &NormFamily {
        self.norm.family()
    }

    pub fn dims(&self) -> Dims {
        self.data.dims()
    }

    pub fn n(&self) -> usize {
        self.dims().n()
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub fn basis(&self, i: usize) -> DVector<f64> {
        let mut e = DVector::zeros(self.n());
        e[i] = 1.0;
        e
    }

    /// `⟨·,·⟩`-unit directions in `m`, seeded and low-discrepancy.
    pub fn unit_directions(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        sampling::sphere_directions(self.n(), count, seed)
            .into_iter()
            .map(|z| self.norm.from_euclidean(&z))
            .collect()
    }

    /// Gram matrix of `F` when `L` is linear: `L₁·G₁ + L₂·G₂`.
    fn linear_gram(&self) -> DMatrix<f64> {
        let j = self.family().jet(0.5, 0.5);
        self.ip().block_gram(1) * j.l1 + self.ip().block_gram(2) * j.l2
    }

    /// `η(y)` solving `g_y(η, u) = g_y(y, [u, y]_m)` for all `u ∈ m`.
    pub fn spray_vector(&self, y: &DVector<f64>) -> Result<DVector<f64>, SpaceError> {
        let g = self.norm.fundamental_tensor(y)?.g_matrix;
        // Column i of -ad_m(y) is [e_i, y]_m.
        let a = -self.lie().ad_m_of(y);
        let rhs = a.transpose() * (&g * y);
        let chol = Cholesky::new(g).ok_or_else(|| SpaceError::SingularSpray(y.iter().cloned().collect()))?;
        Ok(chol.solve(&rhs))
    }

    /// Max over `z` in `z_block` of the skew defect of `ad_m(z)` restricted
    /// to `target × target`.
    fn block_skew(&self, name: &str, z_block: Part, target: Part, tol: f64) -> Check {
        let d = self.dims();
        let gram = self.ip().gram();
        let local = |p: Part| {
            let r = d.range(p);
            (r.start - d.h, r.len())
        };
        let (off, len) = local(target);
        let g = gram.view((off, off), (len, len));
        let mut tracker = MaxTracker::new();
        for z in d.range(z_block) {
            let a = self.lie().ad_m(z);
            let a = a.view((off, off), (len, len));
            let s = a.transpose() * g + g * a;
            let ((r, c), worst) = max_abs_entry(&s);
            tracker.observe(worst, || Witness::Indices(vec![z, d.h + off + r, d.h + off + c]));
        }
        tracker.into_check(name, tol)
    }

    fn coefficient_leak(&self, name: &str, pairs: &[(Part, Part, Part)], tol: f64) -> Check {
        let d = self.dims();
        let mut tracker = MaxTracker::new();
        for &(a, b, target) in pairs {
            for i in d.range(a) {
                for j in d.range(b) {
                    for k in d.range(target) {
                        let c = self.lie().coefficient(i, j, k);
                        tracker.observe(c.abs(), || Witness::Indices(vec![i, j, k]));
                    }
                }
            }
        }
        tracker.into_check(name, tol)
    }

    /// Finite certificate for natural reductiveness.
    ///
    /// For nonlinear `L` the verdict requires the three block conditions
    /// `[mᵢ,mᵢ] ⊆ h+mᵢ`, `[m₁,m₂] ⊆ h`, skewness of `ad(x)|_{mᵢ}` for
    /// `x ∈ mᵢ`, and skewness of `ad_m(x)|_m` for the underlying inner
    /// product. For linear `L` the metric is Riemannian and only the
    /// skewness with respect to its own Gram matrix is required.
    pub fn nr_structural_check(&self, tol: f64) -> NrStructuralReport {
        let cond1 = self.coefficient_leak(
            "(1) [mi,mi] in h+mi",
            &[(Part::M1, Part::M1, Part::M2), (Part::M2, Part::M2, Part::M1)],
            tol,
        );
        let cond2 = self.coefficient_leak("(2) [m1,m2] in h", &[(Part::M1, Part::M2, Part::M)], tol);
        let c3a = self.block_skew("(3) m1", Part::M1, Part::M1, tol);
        let c3b = self.block_skew("(3) m2", Part::M2, Part::M2, tol);
        let cond3 = if c3b.residual > c3a.residual || c3b.residual.is_nan() { c3b } else { c3a };
        let cond3 = Check { name: "(3) <yi,[yi,mi]_mi> = 0".into(), ..cond3 };
        let alpha = self.data.skewness(Part::M, self.ip().gram(), "alpha naturally reductive", tol);
        let mut conditions = vec![cond1, cond2, cond3, alpha];
        let naturally_reductive = if self.nonlinear {
            conditions.iter().all(|c| c.passed)
        } else {
            let own = self.data.skewness(Part::M, &self.linear_gram(), "F naturally reductive (linear L)", tol);
            let passed = own.passed;
            conditions.push(own);
            passed
        };
        NrStructuralReport { nonlinear: self.nonlinear, conditions, naturally_reductive }
    }

    /// Residual matrix of `g_y([w,u]_m,v) + g_y([w,v]_m,u) + 2C_y([w,y]_m,u,v)`
    /// over basis `u, v`, maximized over basis `w`.
    pub fn latifi_residual(&self, y: &DVector<f64>) -> Result<(f64, usize), SpaceError> {
        let g = self.norm.fundamental_tensor(y)?.g_matrix;
        let h = self.dims().h;
        let mut worst = (0.0, 0);
        for w in 0..self.n() {
            let a = self.lie().ad_m(h + w);
            let wy = &a * y;
            let r = a.transpose() * &g + &g * &a + self.norm.cartan_matrix(y, &wy)? * 2.0;
            let (_, v) = max_abs_entry(&r);
            if v > worst.0 || v.is_nan() {
                worst = (v, w);
            }
        }
        Ok(worst)
    }

    /// Sampled Killing-type criterion on the unit indicatrix.
    pub fn nr_latifi_check(&self, samples: usize, seed: u64, tol: f64) -> Check {
        let ys: Vec<DVector<f64>> = self
            .unit_directions(samples, seed)
            .into_iter()
            .map(|y| {
                let f = self.norm.f_value(&y);
                y / f
            })
            .collect();
        let residuals: Vec<f64> = ys
            .par_iter()
            .map(|y| self.latifi_residual(y).map(|r| r.0).unwrap_or(f64::INFINITY))
            .collect();
        max_over(&ys, &residuals, "latifi", tol)
    }

    /// Sampled `max |η(y)|` on the unit indicatrix.
    pub fn nr_spray_check(&self, samples: usize, seed: u64, tol: f64) -> Check {
        let ys: Vec<DVector<f64>> = self
            .unit_directions(samples, seed)
            .into_iter()
            .map(|y| {
                let f = self.norm.f_value(&y);
                y / f
            })
            .collect();
        let residuals: Vec<f64> = ys
            .par_iter()
            .map(|y| self.spray_vector(y).map(|eta| self.ip().norm(&eta)).unwrap_or(f64::INFINITY))
            .collect();
        max_over(&ys, &residuals, "spray", tol)
    }

    /// `S(o, y) = I_y(η(y))`.
    pub fn s_curvature(&self, y: &DVector<f64>) -> Result<f64, SpaceError> {
        let eta = self.spray_vector(y)?;
        Ok(self.norm.mean_cartan(y, &eta)?)
    }

    /// Polarized residuals of `⟨[y₁,m₂]_m, y₁⟩ = 0` and `⟨y₂,[y₂,m₁]_m⟩ = 0`,
    /// with the resulting vanishing-S verdict. A linear `L` has no Cartan
    /// tensor, so its S-curvature vanishes regardless.
    pub fn s_vanishing_structural(&self, tol: f64) -> (bool, Vec<Check>) {
        let a = self.block_skew("<[y1,m2]_m, y1> = 0", Part::M2, Part::M1, tol);
        let b = self.block_skew("<y2, [y2,m1]_m> = 0", Part::M1, Part::M2, tol);
        let verdict = !self.nonlinear || (a.passed && b.passed);
        (verdict, vec![a, b])
    }

    /// `E = ½ ∂²S/∂y∂y` by central differences of the algebraic S.
    pub fn e_curvature(&self, y: &DVector<f64>) -> Result<DMatrix<f64>, SpaceError> {
        let scale = y.norm();
        if scale.is_nan() || scale <= 1e-30 {
            return Err(SpaceError::StepUnderflow(scale));
        }
        self.s_curvature(y)?;
        let step = f64::EPSILON.powf(0.25) * scale;
        let f = |z: &DVector<f64>| self.s_curvature(z).unwrap_or(f64::NAN);
        Ok(oracle::central_hessian(&f, y, step) * 0.5)
    }

    /// `max |S|` over `count` nonzero samples in each of `m₁` and `m₂`.
    pub fn s_on_blocks(&self, count: usize, seed: u64, tol: f64) -> Check {
        let (n1, n2) = (self.ip().n1(), self.ip().n2());
        let mut ys = Vec::with_capacity(2 * count);
        for z in sampling::sphere_directions(n1, count, seed) {
            let mut y = DVector::zeros(self.n());
            y.rows_mut(0, n1).copy_from(&z);
            ys.push(y);
        }
        for z in sampling::sphere_directions(n2, count, seed ^ 0x9e37_79b9) {
            let mut y = DVector::zeros(self.n());
            y.rows_mut(n1, n2).copy_from(&z);
            ys.push(y);
        }
        let residuals: Vec<f64> =
            ys.par_iter().map(|y| self.s_curvature(y).map(f64::abs).unwrap_or(f64::INFINITY)).collect();
        max_over(&ys, &residuals, "S on m1 and m2", tol)
    }

    /// Sampled S and E verdicts next to the algebraic certificate. Weak
    /// isotropy of S and isotropy of E are not estimated separately; for
    /// these metrics they coincide with the vanishing verdicts.
    pub fn equivalence_audit(&self, samples: usize, seed: u64, tol: &Tolerances) -> EquivalenceReport {
        let ys = self.unit_directions(samples, seed);
        let s_vals: Vec<f64> =
            ys.par_iter().map(|y| self.s_curvature(y).map(f64::abs).unwrap_or(f64::INFINITY)).collect();
        let e_vals: Vec<f64> =
            ys.par_iter().map(|y| self.e_curvature(y).map(|e| e.amax()).unwrap_or(f64::INFINITY)).collect();
        let s_check = max_over(&ys, &s_vals, "sampled |S|", tol.s_vanish);
        let e_check = max_over(&ys, &e_vals, "sampled |E|", tol.e_vanish);
        let (structural, mut checks) = self.s_vanishing_structural(tol.structure);
        let vanishing_s = s_check.passed;
        let vanishing_e = e_check.passed;
        checks.insert(0, e_check);
        checks.insert(0, s_check);
        EquivalenceReport {
            weakly_isotropic_s: vanishing_s,
            vanishing_s,
            isotropic_e: vanishing_e,
            vanishing_e,
            structural,
            checks,
        }
    }
}

fn max_over(ys: &[DVector<f64>], residuals: &[f64], name: &str, tol: f64) -> Check {
    let mut tracker = MaxTracker::new();
    for (y, &r) in ys.iter().zip(residuals) {
        tracker.observe(r, || Witness::Vector(y.iter().cloned().collect()));
    }
    tracker.into_check(name, tol)
}
