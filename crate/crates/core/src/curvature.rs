//! Riemann and flag curvature of naturally reductive (α₁,α₂) metrics.
//!
//! Every flag is computed twice: through the closed form in `φ`, `M`, `N`,
//! `Q`, and through `g_y(R_y(x), x) / (g_y(y,y)g_y(x,x) - g_y(x,y)²)` with
//! the L-form fundamental tensor. The φ-form tensor and its contractions
//! are compared against the L-form on the way.

use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::check::Check;
use crate::homogeneous::{HomogeneousSpace, NrStructuralReport};
use crate::lie_core::{InnerProduct, LieError, Part};
use crate::norms::{NormError, PhiJet};
use crate::sampling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("space is not naturally reductive; failed: {}", .0.join(", "))]
    NotNaturallyReductive(Vec<String>),
    #[error("flag vectors are linearly dependent")]
    DependentFlag,
    #[error("flag is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// A `⟨·,·⟩`-orthonormal pair `(y, x)` spanning the flag plane.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagTriple {
    pub y: DVector<f64>,
    pub x: DVector<f64>,
}

impl FlagTriple {
    /// Largest deviation from `⟨y,y⟩ = ⟨x,x⟩ = 1`, `⟨y,x⟩ = 0`.
    pub fn orthonormality_defect(&self, ip: &InnerProduct) -> f64 {
        let a = (ip.dot(&self.y, &self.y) - 1.0).abs();
        let b = (ip.dot(&self.x, &self.x) - 1.0).abs();
        let c = ip.dot(&self.y, &self.x).abs();
        a.max(b).max(c)
    }
}

/// Gram–Schmidt in `⟨·,·⟩`. The plane and the direction of `y` are kept.
pub fn orthonormalize_flag(ip: &InnerProduct, y_raw: &DVector<f64>, v_raw: &DVector<f64>) -> Result<FlagTriple, CurvatureError> {
    let ny = ip.norm(y_raw);
    let nv = ip.norm(v_raw);
    if ny.is_nan() || nv.is_nan() || ny <= 0.0 || nv <= 0.0 {
        return Err(CurvatureError::DependentFlag);
    }
    let y = y_raw / ny;
    let mut w = v_raw - &y * ip.dot(v_raw, &y);
    // second pass restores orthogonality lost to cancellation
    w -= &y * ip.dot(&w, &y);
    let nw = ip.norm(&w);
    if nw <= 1e-12 * nv {
        return Err(CurvatureError::DependentFlag);
    }
    Ok(FlagTriple { y, x: w / nw })
}

/// Both curvature paths for one flag.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagCurvatureResult {
    pub flag: FlagTriple,
    /// `|y₂|`; the closed form divides by it.
    pub y2_norm: f64,
    /// Closed form; `None` on the near-singular stratum.
    pub k_closed: Option<f64>,
    pub k_generic: f64,
    pub discrepancy: Option<f64>,
    pub near_singular: bool,
    /// Largest gap between the φ-form contractions (and their reduced closed
    /// forms) and the L-form tensor.
    pub g_form_discrepancy: Option<f64>,
    /// `|⟨[R_y(x)]₂, y₂⟩|`.
    pub r2_y2_residual: f64,
    pub m: f64,
    pub n: f64,
    pub q: f64,
}

/// A space certified naturally reductive, unlocking the curvature formulas.
#[derive(Debug, Clone, Copy)]
pub struct NaturallyReductive<'a> {
    space: &'a HomogeneousSpace,
}

impl<'a> NaturallyReductive<'a> {
    /// Certifies with the structural check. Both the underlying inner
    /// product and `F` itself must be naturally reductive, since the
    /// curvature formula uses the connection they share.
    pub fn certify(space: &'a HomogeneousSpace, tol: f64) -> Result<Self, CurvatureError> {
        let NrStructuralReport { conditions, naturally_reductive, .. } = space.nr_structural_check(tol);
        let alpha_ok = conditions.iter().any(|c| c.name.starts_with("alpha") && c.passed);
        if !naturally_reductive || !alpha_ok {
            let failed = conditions.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            return Err(CurvatureError::NotNaturallyReductive(failed));
        }
        Ok(Self { space })
    }

    pub fn space(&self) -> &'a HomogeneousSpace {
        self.space
    }

    /// `R_y(x) = -[[x,y]_h, y] - ¼[[x,y]_m, y]_m`.
    pub fn riemann_nr(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>, CurvatureError> {
        let lie = self.space.lie();
        let xy = lie.bracket(x, y)?;
        let xy_h = lie.project(&xy, Part::H)?;
        let xy_m = lie.m_coords(&xy);
        let rot = lie.bracket_m(&xy_h, y)?;
        let quarter = lie.bracket_m(&xy_m, y)?;
        Ok(-rot - quarter * 0.25)
    }

    /// `(M, N, Q)` for an orthonormal flag, from brackets alone.
    fn mnq(&self, flag: &FlagTriple) -> Result<(f64, f64, f64), CurvatureError> {
        let (lie, ip) = (self.space.lie(), self.space.ip());
        let (x, y) = (&flag.x, &flag.y);
        let (_, x2) = ip.split(x);
        let (_, y2) = ip.split(y);
        let ny2 = ip.norm(&y2);
        let c = ip.dot(&x2, &y2);
        let m = ip.dot(&x2, &x2) / ny2 - c * c / ny2.powi(3) - ny2;
        let xy = lie.bracket(x, y)?;
        let xy_m = lie.m_coords(&xy);
        let xy_h = lie.project(&xy, Part::H)?;
        let n = 0.25 * ip.dot(&xy_m, &xy_m) + ip.dot(&lie.bracket_m(&xy_h, x)?, y);
        let x2y = lie.bracket_m(&x2, y)?;
        let q = 0.25 * ip.dot(&x2y, &xy_m) + ip.dot(&lie.bracket_m(&xy_h, &x2)?, y);
        Ok((m, n, q))
    }

    /// Flag curvature `K(o, y, span{y, x})` along both paths. The flag must
    /// be orthonormal; use [`orthonormalize_flag`] for raw input.
    pub fn flag_curvature_nr(&self, flag: &FlagTriple, eps_sing: f64) -> Result<FlagCurvatureResult, CurvatureError> {
        let ip = self.space.ip();
        let norm = self.space.norm();
        let defect = flag.orthonormality_defect(ip);
        if defect.is_nan() || defect > 1e-10 {
            return Err(CurvatureError::NotOrthonormal(defect));
        }
        let (x, y) = (&flag.x, &flag.y);
        let r = self.riemann_nr(x, y)?;
        let (_, y2) = ip.split(y);
        let (_, r2) = ip.split(&r);
        let y2_norm = ip.norm(&y2);
        let r2_y2_residual = ip.dot(&r2, &y2).abs();

        let g = norm.fundamental_tensor(y)?.g_matrix;
        let form = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &g * v)[(0, 0)];
        let (gyy, gxx, gxy, grx) = (form(y, y), form(x, x), form(x, y), form(&r, x));
        let k_generic = grx / (gyy * gxx - gxy * gxy);

        let near_singular = y2_norm < eps_sing;
        let (m, n, q) = if y2_norm > 0.0 { self.mnq(flag)? } else { (f64::NAN, f64::NAN, f64::NAN) };
        if near_singular {
            return Ok(FlagCurvatureResult {
                flag: flag.clone(),
                y2_norm,
                k_closed: None,
                k_generic,
                discrepancy: None,
                near_singular,
                g_form_discrepancy: None,
                r2_y2_residual,
                m,
                n,
                q,
            });
        }

        let PhiJet { phi, d1, d2 } = self.space.family().phi_jet(y2_norm);
        let c = ip.dot(&ip.split(x).1, &y2);

        // φ-form tensor and its reduced closed forms against the L-form.
        let phi_yy = norm.fundamental_tensor_phi(y, y, y)?;
        let phi_xx = norm.fundamental_tensor_phi(y, x, x)?;
        let phi_xy = norm.fundamental_tensor_phi(y, x, y)?;
        let phi_rx = norm.fundamental_tensor_phi(y, &r, x)?;
        let closed_yy = phi * phi;
        let closed_xy = phi * d1 * c / y2_norm;
        let closed_xx = phi * phi + phi * d1 * m + (d1 * d1 + phi * d2) * c * c / (y2_norm * y2_norm);
        let g_form_discrepancy = [
            (phi_yy, gyy),
            (phi_xx, gxx),
            (phi_xy, gxy),
            (phi_rx, grx),
            (closed_yy, gyy),
            (closed_xy, gxy),
            (closed_xx, gxx),
        ]
        .iter()
        .map(|&(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

        let numerator = (phi * phi - y2_norm * phi * d1) * n + phi * d1 * q / y2_norm;
        let denominator = phi.powi(3) * (phi + d1 * m + c * c / (y2_norm * y2_norm) * d2);
        let k_closed = numerator / denominator;
        Ok(FlagCurvatureResult {
            flag: flag.clone(),
            y2_norm,
            k_closed: Some(k_closed),
            k_generic,
            discrepancy: Some((k_closed - k_generic).abs()),
            near_singular,
            g_form_discrepancy: Some(g_form_discrepancy),
            r2_y2_residual,
            m,
            n,
            q,
        })
    }

    /// Curvature of `count` seeded random flags in parallel; output order
    /// follows the flag order.
    pub fn sweep(&self, count: usize, seed: u64, min_y2: f64, eps_sing: f64) -> Result<Vec<FlagCurvatureResult>, CurvatureError> {
        let flags = random_flags(self.space, count, seed, min_y2);
        flags.par_iter().map(|f| self.flag_curvature_nr(f, eps_sing)).collect()
    }
}

/// Seeded random orthonormal flags with `|y₂| > min_y2`.
pub fn random_flags(space: &HomogeneousSpace, count: usize, seed: u64, min_y2: f64) -> Vec<FlagTriple> {
    let n = space.n();
    let ip = space.ip();
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 1000 * (count + 1), "cannot sample flags with |y2| > {min_y2}");
        let y = space.norm().from_euclidean(&sampling::gaussian(&mut rng, n));
        let v = space.norm().from_euclidean(&sampling::gaussian(&mut rng, n));
        let Ok(flag) = orthonormalize_flag(ip, &y, &v) else { continue };
        if ip.norm(&ip.split(&flag.y).1) > min_y2 {
            out.push(flag);
        }
    }
    out
}

/// Summary checks over a batch of flag results.
pub fn sweep_checks(results: &[FlagCurvatureResult], xcheck: f64) -> Vec<Check> {
    let mut cross = crate::check::MaxTracker::new();
    let mut forms = crate::check::MaxTracker::new();
    let mut r2 = crate::check::MaxTracker::new();
    for res in results {
        let witness = || crate::check::Witness::Vector(res.flag.y.iter().chain(res.flag.x.iter()).cloned().collect());
        if let Some(d) = res.discrepancy {
            cross.observe(d / (1.0 + res.k_generic.abs()), witness);
        }
        if let Some(d) = res.g_form_discrepancy {
            forms.observe(d, witness);
        }
        r2.observe(res.r2_y2_residual, witness);
    }
    vec![
        cross.into_check("k_closed vs k_generic (relative)", xcheck),
        forms.into_check("phi-form vs L-form tensor", 1e-10),
        r2.into_check("<[R_y(x)]_2, y_2> = 0", 1e-10),
    ]
}
