//! (α₁,α₂) Minkowski norms `F(y) = sqrt(L(|y₁|², |y₂|²))` and their
//! fundamental, Cartan and mean Cartan tensors.
//!
//! The L-form is the canonical representation: it stays regular on both
//! strata `y₁ = 0` and `y₂ = 0`. The φ-form `F(y) = |y|·φ(|y₂|/|y|)` is kept
//! as an independent evaluation route for the fundamental tensor.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use thiserror::Error;

use crate::check::{Check, MaxTracker, Witness};
use crate::lie_core::InnerProduct;
use crate::sampling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("the zero vector has no fundamental tensor")]
    ZeroVector,
    #[error("expected an m-vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the phi-form needs |y2| > 0; use the L-form on the m1 stratum")]
    SingularStratum,
    #[error("gram matrix is not positive definite")]
    GramNotPositiveDefinite,
    #[error("an (alpha1, alpha2) norm needs both blocks nonempty, got ({0}, {1})")]
    EmptyBlock(usize, usize),
    #[error("unknown norm family `{0}`")]
    UnknownFamily(String),
    #[error("bad parameters for family `{family}`: {reason}")]
    BadParams { family: String, reason: String },
    #[error("fundamental tensor is not positive definite at y = {0:?}")]
    NotPositiveDefinite(Vec<f64>),
}

/// `L(u, v)` and its partial derivatives through order three.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LJet {
    pub l: f64,
    pub l1: f64,
    pub l2: f64,
    pub l11: f64,
    pub l12: f64,
    pub l22: f64,
    pub l111: f64,
    pub l112: f64,
    pub l122: f64,
    pub l222: f64,
}

/// `φ(s)`, `φ′(s)`, `φ″(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiJet {
    pub phi: f64,
    pub d1: f64,
    pub d2: f64,
}

/// The function `L` defining an (α₁,α₂) norm.
#[derive(Debug, Clone, PartialEq)]
pub enum NormFamily {
    /// `L = w₁·u + w₂·v`.
    Riemannian { w1: f64, w2: f64 },
    /// `L = sqrt(u² + c·uv + v²)`.
    QuarticMean { c: f64 },
    /// `φ(s) = (1 + k·s^{2p})^{1/(2p)}`, i.e. `L = ((u+v)^p + k·v^p)^{1/p}`.
    PhiPower { k: f64, p: u32 },
    /// `L = (u+v)·h(v/(u+v))` with `h` interpolated through equally spaced
    /// samples on `[0, 1]`; derivatives by nested central differences.
    UserTable { samples: Vec<f64> },
}

impl NormFamily {
    pub const NAMES: [&'static str; 4] = ["riemannian", "quartic-mean", "phi-power", "user-table"];

    pub fn from_name(name: &str, params: &[f64]) -> Result<Self, NormError> {
        let bad = |reason: &str| NormError::BadParams { family: name.to_string(), reason: reason.to_string() };
        let family = match name {
            "riemannian" => match params {
                [] => NormFamily::Riemannian { w1: 1.0, w2: 1.0 },
                [w1, w2] => NormFamily::Riemannian { w1: *w1, w2: *w2 },
                _ => return Err(bad("expected [] or [w1, w2]")),
            },
            "quartic-mean" => match params {
                [c] => NormFamily::QuarticMean { c: *c },
                _ => return Err(bad("expected [c]")),
            },
            "phi-power" => match params {
                [k, p] if p.fract() == 0.0 && *p >= 1.0 && *p <= 64.0 => NormFamily::PhiPower { k: *k, p: *p as u32 },
                _ => return Err(bad("expected [k, p] with integer 1 <= p <= 64")),
            },
            "user-table" => {
                if params.len() < 2 {
                    return Err(bad("expected at least two samples"));
                }
                NormFamily::UserTable { samples: params.to_vec() }
            }
            other => return Err(NormError::UnknownFamily(other.to_string())),
        };
        if family.params().iter().any(|p| !p.is_finite()) {
            return Err(bad("parameters must be finite"));
        }
        Ok(family)
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormFamily::Riemannian { .. } => "riemannian",
            NormFamily::QuarticMean { .. } => "quartic-mean",
            NormFamily::PhiPower { .. } => "phi-power",
            NormFamily::UserTable { .. } => "user-table",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            NormFamily::Riemannian { w1, w2 } => vec![*w1, *w2],
            NormFamily::QuarticMean { c } => vec![*c],
            NormFamily::PhiPower { k, p } => vec![*k, *p as f64],
            NormFamily::UserTable { samples } => samples.clone(),
        }
    }

    /// Value of `L(u, v)`.
    pub fn value(&self, u: f64, v: f64) -> f64 {
        match self {
            NormFamily::Riemannian { w1, w2 } => w1 * u + w2 * v,
            NormFamily::QuarticMean { c } => (u * u + c * u * v + v * v).sqrt(),
            NormFamily::PhiPower { k, p } => {
                let p = *p as i32;
                ((u + v).powi(p) + k * v.powi(p)).powf(1.0 / p as f64)
            }
            NormFamily::UserTable { samples } => {
                let s = u + v;
                if s == 0.0 {
                    0.0
                } else {
                    s * barycentric(samples, v / s)
                }
            }
        }
    }

    /// `L` and its partials through order three at `(u, v)`.
    pub fn jet(&self, u: f64, v: f64) -> LJet {
        match self {
            NormFamily::Riemannian { w1, w2 } => LJet { l: w1 * u + w2 * v, l1: *w1, l2: *w2, ..LJet::default() },
            NormFamily::QuarticMean { c } => {
                let q = PolyJet {
                    q: u * u + c * u * v + v * v,
                    q1: 2.0 * u + c * v,
                    q2: c * u + 2.0 * v,
                    q11: 2.0,
                    q12: *c,
                    q22: 2.0,
                    ..PolyJet::default()
                };
                q.root(0.5)
            }
            NormFamily::PhiPower { k, p } => {
                let p = *p;
                let s = u + v;
                let q = PolyJet {
                    q: s.powi(p as i32) + k * v.powi(p as i32),
                    q1: falling(s, p, 1),
                    q2: falling(s, p, 1) + k * falling(v, p, 1),
                    q11: falling(s, p, 2),
                    q12: falling(s, p, 2),
                    q22: falling(s, p, 2) + k * falling(v, p, 2),
                    q111: falling(s, p, 3),
                    q112: falling(s, p, 3),
                    q122: falling(s, p, 3),
                    q222: falling(s, p, 3) + k * falling(v, p, 3),
                };
                q.root(1.0 / p as f64)
            }
            NormFamily::UserTable { .. } => numeric_jet(|a, b| self.value(a, b), u, v),
        }
    }

    /// `φ(s)` with `φ² = L(1 - s², s²)`. Analytic for `phi-power`; derived
    /// from the L-jet by the chain rule otherwise.
    pub fn phi_jet(&self, s: f64) -> PhiJet {
        match self {
            NormFamily::PhiPower { k, p } => {
                let two_p = 2.0 * *p as f64;
                let e = 1.0 / two_p;
                let w = 1.0 + k * s.powf(two_p);
                let w1 = two_p * k * s.powf(two_p - 1.0);
                let w2 = two_p * (two_p - 1.0) * k * s.powf(two_p - 2.0);
                PhiJet {
                    phi: w.powf(e),
                    d1: e * w.powf(e - 1.0) * w1,
                    d2: e * ((e - 1.0) * w.powf(e - 2.0) * w1 * w1 + w.powf(e - 1.0) * w2),
                }
            }
            _ => phi_from_l(&self.jet(1.0 - s * s, s * s), s),
        }
    }

    /// True iff `L₁` and `L₂` are not proportional, sampled at several rays.
    /// A linear `L` gives a Riemannian metric.
    pub fn nonlinearity_check(&self) -> bool {
        let rays: Vec<(f64, f64)> = [0.05, 0.3, 0.5, 0.7, 0.95]
            .iter()
            .map(|t: &f64| (1.0 - t, *t))
            .collect();
        let grads: Vec<(f64, f64)> = rays
            .iter()
            .map(|&(u, v)| {
                let j = self.jet(u, v);
                (j.l1, j.l2)
            })
            .collect();
        let scale = grads.iter().map(|(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max).max(1e-300);
        let tol = match self {
            NormFamily::UserTable { .. } => 1e-6,
            _ => 1e-12,
        };
        for i in 0..grads.len() {
            for j in i + 1..grads.len() {
                let det = grads[i].0 * grads[j].1 - grads[i].1 * grads[j].0;
                if det.abs() > tol * scale * scale {
                    return true;
                }
            }
        }
        false
    }

    /// Short stable identifier of family and parameters.
    pub fn fingerprint(&self) -> String {
        let params: Vec<String> = self.params().iter().map(|p| format!("{p:?}")).collect();
        format!("{}[{}]", self.name(), params.join(","))
    }
}

/// Derivatives of a polynomial `Q(u, v)` through order three.
#[derive(Debug, Clone, Copy, Default)]
struct PolyJet {
    q: f64,
    q1: f64,
    q2: f64,
    q11: f64,
    q12: f64,
    q22: f64,
    q111: f64,
    q112: f64,
    q122: f64,
    q222: f64,
}

impl PolyJet {
    /// Jet of `Q^r` by Faà di Bruno.
    fn root(&self, r: f64) -> LJet {
        let f0 = self.q.powf(r);
        let f1 = r * self.q.powf(r - 1.0);
        let f2 = r * (r - 1.0) * self.q.powf(r - 2.0);
        let f3 = r * (r - 1.0) * (r - 2.0) * self.q.powf(r - 3.0);
        let d = [self.q1, self.q2];
        let dd = [[self.q11, self.q12], [self.q12, self.q22]];
        let ddd = |i: usize, j: usize, k: usize| match i + j + k {
            0 => self.q111,
            1 => self.q112,
            2 => self.q122,
            _ => self.q222,
        };
        let second = |i: usize, j: usize| f2 * d[i] * d[j] + f1 * dd[i][j];
        let third = |i: usize, j: usize, k: usize| {
            f3 * d[i] * d[j] * d[k] + f2 * (dd[i][j] * d[k] + dd[i][k] * d[j] + dd[j][k] * d[i]) + f1 * ddd(i, j, k)
        };
        LJet {
            l: f0,
            l1: f1 * d[0],
            l2: f1 * d[1],
            l11: second(0, 0),
            l12: second(0, 1),
            l22: second(1, 1),
            l111: third(0, 0, 0),
            l112: third(0, 0, 1),
            l122: third(0, 1, 1),
            l222: third(1, 1, 1),
        }
    }
}

/// `d^order/dx^order x^p`, zero when `order > p`.
fn falling(x: f64, p: u32, order: u32) -> f64 {
    if order > p {
        return 0.0;
    }
    let coeff: f64 = (0..order).map(|i| (p - i) as f64).product();
    coeff * x.powi((p - order) as i32)
}

/// Barycentric Lagrange interpolation through equally spaced nodes on [0, 1].
fn barycentric(samples: &[f64], t: f64) -> f64 {
    let n = samples.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut binom = 1.0;
    for (k, &fk) in samples.iter().enumerate() {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        let node = k as f64 / n as f64;
        let diff = t - node;
        if diff == 0.0 {
            return fk;
        }
        let w = if k % 2 == 0 { binom } else { -binom } / diff;
        num += w * fk;
        den += w;
    }
    num / den
}

/// Jet of a 1-homogeneous `L` by nested central differences. The step grows
/// with the derivative order; third derivatives carry roughly 1e-5 relative error.
fn numeric_jet(l: impl Fn(f64, f64) -> f64, u: f64, v: f64) -> LJet {
    let scale = (u + v).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let h1 = eps.powf(1.0 / 3.0) * scale;
    let h2 = eps.powf(1.0 / 4.0) * scale;
    let h3 = eps.powf(1.0 / 5.0) * scale;
    let d1u = |f: &dyn Fn(f64, f64) -> f64, a: f64, b: f64, h: f64| (f(a + h, b) - f(a - h, b)) / (2.0 * h);
    let d1v = |f: &dyn Fn(f64, f64) -> f64, a: f64, b: f64, h: f64| (f(a, b + h) - f(a, b - h)) / (2.0 * h);
    let f0 = l(u, v);
    let l11 = (l(u + h2, v) - 2.0 * f0 + l(u - h2, v)) / (h2 * h2);
    let l22 = (l(u, v + h2) - 2.0 * f0 + l(u, v - h2)) / (h2 * h2);
    let l12 = (l(u + h2, v + h2) - l(u + h2, v - h2) - l(u - h2, v + h2) + l(u - h2, v - h2)) / (4.0 * h2 * h2);
    let second_uu = |a: f64, b: f64| (l(a + h3, b) - 2.0 * l(a, b) + l(a - h3, b)) / (h3 * h3);
    let second_vv = |a: f64, b: f64| (l(a, b + h3) - 2.0 * l(a, b) + l(a, b - h3)) / (h3 * h3);
    LJet {
        l: f0,
        l1: d1u(&l, u, v, h1),
        l2: d1v(&l, u, v, h1),
        l11,
        l12,
        l22,
        l111: (l(u + 2.0 * h3, v) - 2.0 * l(u + h3, v) + 2.0 * l(u - h3, v) - l(u - 2.0 * h3, v)) / (2.0 * h3 * h3 * h3),
        l112: d1v(&second_uu, u, v, h3),
        l122: d1u(&second_vv, u, v, h3),
        l222: (l(u, v + 2.0 * h3) - 2.0 * l(u, v + h3) + 2.0 * l(u, v - h3) - l(u, v - 2.0 * h3)) / (2.0 * h3 * h3 * h3),
    }
}

/// φ, φ′, φ″ at `s` from the jet of `L` at `(1 - s², s²)`.
pub fn phi_from_l(jet: &LJet, s: f64) -> PhiJet {
    let psi = jet.l;
    let psi1 = 2.0 * s * (jet.l2 - jet.l1);
    let psi2 = 2.0 * (jet.l2 - jet.l1) + 4.0 * s * s * (jet.l11 - 2.0 * jet.l12 + jet.l22);
    let phi = psi.sqrt();
    let d1 = psi1 / (2.0 * phi);
    let d2 = (psi2 - 2.0 * d1 * d1) / (2.0 * phi);
    PhiJet { phi, d1, d2 }
}

/// Fundamental tensor at a base vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSample {
    pub y: DVector<f64>,
    pub g_matrix: DMatrix<f64>,
    pub f_value: f64,
}

/// Per-`y` quantities shared by the tensor formulas.
struct Frame {
    jet: LJet,
    /// Covector `⟨y₁, ·⟩`.
    p: DVector<f64>,
    /// Covector `⟨y₂, ·⟩`.
    q: DVector<f64>,
}

/// An (α₁,α₂) norm on `m`: a family `L` plus the inner product and split.
#[derive(Debug, Clone)]
pub struct MinkowskiNorm {
    family: NormFamily,
    ip: InnerProduct,
    g1: DMatrix<f64>,
    g2: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl MinkowskiNorm {
    pub fn new(family: NormFamily, ip: InnerProduct) -> Result<Self, NormError> {
        if ip.n1() == 0 || ip.n2() == 0 {
            return Err(NormError::EmptyBlock(ip.n1(), ip.n2()));
        }
        let sym = (ip.gram() + ip.gram().transpose()) * 0.5;
        let chol = Cholesky::new(sym).ok_or(NormError::GramNotPositiveDefinite)?;
        Ok(Self { g1: ip.block_gram(1), g2: ip.block_gram(2), family, ip, chol })
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn dim(&self) -> usize {
        self.ip.dim()
    }

    /// Lower Cholesky factor of the Gram matrix.
    pub fn gram_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    fn check_len(&self, y: &DVector<f64>) -> Result<(), NormError> {
        if y.len() != self.dim() {
            return Err(NormError::DimensionMismatch { expected: self.dim(), got: y.len() });
        }
        Ok(())
    }

    /// `(|y₁|², |y₂|²)`.
    pub fn squared_split(&self, y: &DVector<f64>) -> (f64, f64) {
        let u = (y.transpose() * &self.g1 * y)[(0, 0)].max(0.0);
        let v = (y.transpose() * &self.g2 * y)[(0, 0)].max(0.0);
        (u, v)
    }

    pub fn f_value(&self, y: &DVector<f64>) -> f64 {
        let (u, v) = self.squared_split(y);
        if u == 0.0 && v == 0.0 {
            return 0.0;
        }
        self.family.value(u, v).max(0.0).sqrt()
    }

    fn frame(&self, y: &DVector<f64>) -> Result<Frame, NormError> {
        self.check_len(y)?;
        let (u, v) = self.squared_split(y);
        if u == 0.0 && v == 0.0 {
            return Err(NormError::ZeroVector);
        }
        Ok(Frame { jet: self.family.jet(u, v), p: &self.g1 * y, q: &self.g2 * y })
    }

    /// Matrix of `g_y` from the L-form.
    pub fn fundamental_tensor(&self, y: &DVector<f64>) -> Result<TensorSample, NormError> {
        let fr = self.frame(y)?;
        let j = &fr.jet;
        let (p, q) = (&fr.p, &fr.q);
        let g = &self.g1 * j.l1
            + &self.g2 * j.l2
            + p * p.transpose() * (2.0 * j.l11)
            + q * q.transpose() * (2.0 * j.l22)
            + (p * q.transpose() + q * p.transpose()) * (2.0 * j.l12);
        Ok(TensorSample { y: y.clone(), g_matrix: g, f_value: j.l.max(0.0).sqrt() })
    }

    /// `g_y(u, v)` evaluated term by term without assembling a matrix.
    pub fn g_bilinear(&self, y: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64, NormError> {
        let fr = self.frame(y)?;
        self.check_len(u)?;
        self.check_len(v)?;
        let j = &fr.jet;
        let (au, av) = (fr.p.dot(u), fr.p.dot(v));
        let (bu, bv) = (fr.q.dot(u), fr.q.dot(v));
        let uv1 = (u.transpose() * &self.g1 * v)[(0, 0)];
        let uv2 = (u.transpose() * &self.g2 * v)[(0, 0)];
        Ok(j.l1 * uv1 + j.l2 * uv2 + 2.0 * j.l11 * au * av + 2.0 * j.l22 * bu * bv + 2.0 * j.l12 * (au * bv + bu * av))
    }

    /// `g_y(u, v)` through the φ-form expansion of `½ ∂²/∂s∂t F²(y + su + tv)`.
    pub fn fundamental_tensor_phi(&self, y: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64, NormError> {
        self.check_len(y)?;
        self.check_len(u)?;
        self.check_len(v)?;
        let ip = &self.ip;
        let ny = ip.norm(y);
        if ny == 0.0 {
            return Err(NormError::ZeroVector);
        }
        let (_, y2) = ip.split(y);
        let (_, u2) = ip.split(u);
        let (_, v2) = ip.split(v);
        let ny2 = ip.norm(&y2);
        if ny2 == 0.0 {
            return Err(NormError::SingularStratum);
        }
        let s = ny2 / ny;
        let PhiJet { phi, d1, d2 } = self.family.phi_jet(s);
        let (yu, yv, uv) = (ip.dot(y, u), ip.dot(y, v), ip.dot(u, v));
        let (y2u2, y2v2, u2v2) = (ip.dot(&y2, &u2), ip.dot(&y2, &v2), ip.dot(&u2, &v2));
        let first = y2u2 * yv / (ny * ny2) + y2v2 * yu / (ny * ny2) - ny2 * yu * yv / ny.powi(3) + u2v2 * ny / ny2
            - uv * ny2 / ny
            - ny * y2u2 * y2v2 / ny2.powi(3);
        let du = y2u2 / ny2 - yu * ny2 / (ny * ny);
        let dv = y2v2 / ny2 - yv * ny2 / (ny * ny);
        Ok(uv * phi * phi + phi * d1 * first + (d1 * d1 + phi * d2) * du * dv)
    }

    /// The symmetric matrix `C_y(u, ·, ·)`.
    pub fn cartan_matrix(&self, y: &DVector<f64>, u: &DVector<f64>) -> Result<DMatrix<f64>, NormError> {
        let fr = self.frame(y)?;
        self.check_len(u)?;
        let j = &fr.jet;
        let (p, q) = (&fr.p, &fr.q);
        let (au, bu) = (p.dot(u), q.dot(u));
        let g1u = &self.g1 * u;
        let g2u = &self.g2 * u;
        let sym = |a: &DVector<f64>, b: &DVector<f64>| a * b.transpose() + b * a.transpose();
        let pp = p * p.transpose();
        let qq = q * q.transpose();
        let pq = sym(p, q);
        let c = (&self.g1 * au + sym(p, &g1u)) * j.l11
            + (&self.g1 * bu + sym(q, &g1u) + &self.g2 * au + sym(p, &g2u)) * j.l12
            + (&self.g2 * bu + sym(q, &g2u)) * j.l22
            + &pp * (2.0 * j.l111 * au)
            + (&pq * au + &pp * bu) * (2.0 * j.l112)
            + (&pq * bu + &qq * au) * (2.0 * j.l122)
            + &qq * (2.0 * j.l222 * bu);
        Ok(c)
    }

    /// `C_y(u, v, w) = ¼ ∂³/∂r∂s∂t F²(y + ru + sv + tw)`.
    pub fn cartan_tensor(&self, y: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64, NormError> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok((v.transpose() * self.cartan_matrix(y, u)? * w)[(0, 0)])
    }

    /// `I_y(u) = g^{jk} C_y(u, e_j, e_k)`.
    pub fn mean_cartan(&self, y: &DVector<f64>, u: &DVector<f64>) -> Result<f64, NormError> {
        let g = self.fundamental_tensor(y)?.g_matrix;
        let chol = Cholesky::new(g).ok_or_else(|| NormError::NotPositiveDefinite(y.iter().cloned().collect()))?;
        let c = self.cartan_matrix(y, u)?;
        Ok(chol.solve(&c).trace())
    }

    /// Pulls a Euclidean unit vector back to the gram-unit sphere.
    pub fn from_euclidean(&self, z: &DVector<f64>) -> DVector<f64> {
        self.chol.l().transpose().solve_upper_triangular(z).expect("gram factor is invertible")
    }

    /// Sampled admissibility audit: pointwise positivity, Euler identity,
    /// homogeneity and strong convexity on `grid²` directions.
    pub fn admissibility_audit(&self, grid: usize, tol: f64) -> Vec<Check> {
        let mut positivity = MaxTracker::new();
        let mut euler = MaxTracker::new();
        let mut homog = MaxTracker::new();
        // Rays through the (u, v) quadrant, endpoints included.
        let rays = grid.max(2);
        for r in 0..=rays {
            let theta = std::f64::consts::FRAC_PI_2 * r as f64 / rays as f64;
            let (a, b) = (theta.cos(), theta.sin());
            let (u, v) = (a * a, b * b);
            let j = self.family.jet(u, v);
            let worst = [j.l1, j.l2, j.l1 + 2.0 * u * j.l11, j.l2 + 2.0 * v * j.l22]
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            positivity.observe(self_margin(worst, 0.0), || Witness::Vector(vec![u, v]));
            euler.observe((u * j.l1 + v * j.l2 - j.l).abs(), || Witness::Vector(vec![u, v]));
            for lambda in [0.5, 2.0, 7.0] {
                let diff = (self.family.value(lambda * u, lambda * v) - lambda * j.l).abs() / lambda;
                homog.observe(diff, || Witness::Vector(vec![u, v, lambda]));
            }
        }
        let euler_tol = match self.family {
            NormFamily::UserTable { .. } => 1e-6,
            _ => 1e-10,
        };
        let mut convex = MaxTracker::new();
        let l_inv = self.chol.l().try_inverse().expect("gram factor is invertible");
        for z in sampling::sphere_directions(self.dim(), grid * grid, 0x5eed) {
            let y = self.from_euclidean(&z);
            let min_eig = match self.fundamental_tensor(&y) {
                Ok(t) => {
                    // Eigenvalues of g_y relative to the gram.
                    let rel = &l_inv * t.g_matrix * l_inv.transpose();
                    let rel = (&rel + rel.transpose()) * 0.5;
                    rel.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
                }
                Err(_) => f64::NEG_INFINITY,
            };
            convex.observe(self_margin(min_eig, tol), || Witness::Vector(y.iter().cloned().collect()));
        }
        vec![
            positivity.into_check("L1, L2, L1+2uL11, L2+2vL22 positive", 0.0),
            euler.into_check("Euler identity", euler_tol),
            homog.into_check("positive 1-homogeneity", euler_tol),
            convex.into_check("strong convexity", 0.0),
        ]
    }
}

/// Zero when `min_eig > floor`, positive shortfall otherwise.
fn self_margin(min_eig: f64, floor: f64) -> f64 {
    if min_eig > floor {
        0.0
    } else if min_eig.is_finite() {
        floor - min_eig + f64::MIN_POSITIVE
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn norm(family: NormFamily, n1: usize, n2: usize) -> MinkowskiNorm {
        MinkowskiNorm::new(family, InnerProduct::identity(n1, n2)).unwrap()
    }

    fn vecf(v: &[f64]) -> DVector<f64> {
        DVector::from_vec(v.to_vec())
    }

    #[test]
    fn riemannian_f_is_gram_norm() {
        let n = norm(NormFamily::Riemannian { w1: 1.0, w2: 1.0 }, 2, 1);
        let y = vecf(&[3.0, 0.0, 4.0]);
        assert_eq!(n.f_value(&y), 5.0);
        assert_eq!(n.f_value(&DVector::zeros(3)), 0.0);
    }

    #[test]
    fn quartic_mean_value() {
        let n = norm(NormFamily::QuarticMean { c: 1.0 }, 1, 1);
        let f = n.f_value(&vecf(&[1.0, 1.0]));
        assert!((f - 3f64.powf(0.25)).abs() < 1e-15);
        // homogeneity sampling
        assert!((n.f_value(&vecf(&[2.0, 2.0])) - 2.0 * f).abs() < 1e-14);
    }

    #[test]
    fn riemannian_tensor_is_gram() {
        let gram = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 3.0]);
        let n = MinkowskiNorm::new(NormFamily::Riemannian { w1: 1.0, w2: 1.0 }, InnerProduct::new(gram.clone(), 2, 1).unwrap()).unwrap();
        let t = n.fundamental_tensor(&vecf(&[0.3, -1.0, 0.7])).unwrap();
        assert!((t.g_matrix - gram).amax() < 1e-15);
    }

    #[test]
    fn adapted_basis_coefficients() {
        // y = a e1 + b e_n in dims (2, 2)
        let fam = NormFamily::QuarticMean { c: 1.0 };
        let n = norm(fam.clone(), 2, 2);
        let (a, b) = (0.8, -0.6);
        let g = n.fundamental_tensor(&vecf(&[a, 0.0, 0.0, b])).unwrap().g_matrix;
        let j = fam.jet(a * a, b * b);
        assert!((g[(0, 0)] - (j.l1 + 2.0 * a * a * j.l11)).abs() < 1e-15);
        assert!((g[(0, 3)] - 2.0 * a * b * j.l12).abs() < 1e-15);
        assert!((g[(3, 3)] - (j.l2 + 2.0 * b * b * j.l22)).abs() < 1e-15);
        assert!((g[(1, 1)] - j.l1).abs() < 1e-15);
        assert!((g[(2, 2)] - j.l2).abs() < 1e-15);
        for (r, c) in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)] {
            assert_eq!(g[(r, c)], 0.0);
        }
    }

    #[test]
    fn zero_vector_is_domain_error() {
        let n = norm(NormFamily::QuarticMean { c: 1.0 }, 1, 1);
        assert_eq!(n.fundamental_tensor(&DVector::zeros(2)).unwrap_err(), NormError::ZeroVector);
        assert!(n.mean_cartan(&DVector::zeros(2), &vecf(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn phi_form_needs_m2_component() {
        let n = norm(NormFamily::QuarticMean { c: 1.0 }, 1, 1);
        let y = vecf(&[1.0, 0.0]);
        assert_eq!(n.fundamental_tensor_phi(&y, &y, &y).unwrap_err(), NormError::SingularStratum);
    }

    #[test]
    fn phi_identically_one_gives_inner_product() {
        let n = norm(NormFamily::Riemannian { w1: 1.0, w2: 1.0 }, 2, 2);
        let y = vecf(&[0.2, 0.4, -0.3, 0.9]);
        let u = vecf(&[1.0, 2.0, 3.0, 4.0]);
        let v = vecf(&[-1.0, 0.5, 0.0, 2.0]);
        let phi = n.fundamental_tensor_phi(&y, &u, &v).unwrap();
        assert!((phi - u.dot(&v)).abs() < 1e-13);
    }

    #[test]
    fn phi_power_analytic_matches_chain_rule() {
        let fam = NormFamily::PhiPower { k: 0.7, p: 2 };
        for s in [0.1, 0.35, 0.6, 0.9, 1.0] {
            let a = fam.phi_jet(s);
            let b = phi_from_l(&fam.jet(1.0 - s * s, s * s), s);
            assert!((a.phi - b.phi).abs() < 1e-13, "phi at {s}");
            assert!((a.d1 - b.d1).abs() < 1e-12, "phi' at {s}");
            assert!((a.d2 - b.d2).abs() < 1e-11, "phi'' at {s}");
        }
    }

    #[test]
    fn nonlinearity() {
        assert!(!NormFamily::Riemannian { w1: 1.0, w2: 1.0 }.nonlinearity_check());
        assert!(!NormFamily::Riemannian { w1: 2.0, w2: 3.0 }.nonlinearity_check());
        assert!(NormFamily::QuarticMean { c: 1.0 }.nonlinearity_check());
        assert!(NormFamily::PhiPower { k: 0.5, p: 2 }.nonlinearity_check());
        assert!(!NormFamily::PhiPower { k: 0.5, p: 1 }.nonlinearity_check());
        // c = 2 collapses to L = u + v
        assert!(!NormFamily::QuarticMean { c: 2.0 }.nonlinearity_check());
        assert!(!NormFamily::UserTable { samples: vec![1.0, 1.0, 1.0] }.nonlinearity_check());
        assert!(NormFamily::UserTable { samples: vec![1.0, 0.8, 1.0] }.nonlinearity_check());
    }

    #[test]
    fn quartic_mean_l1_ratio_varies() {
        // L1/L2 at two rays differ for c = 1.
        let f = NormFamily::QuarticMean { c: 1.0 };
        let a = f.jet(0.9, 0.1);
        let b = f.jet(0.2, 0.8);
        assert!((a.l1 / a.l2 - b.l1 / b.l2).abs() > 0.1);
    }

    #[test]
    fn user_table_reproduces_polynomial_family() {
        // h(t) = L(1 - t, t) for L = sqrt(u^2 + v^2) is not polynomial, so use
        // an L whose h is quadratic: L = u + v - 0.4 uv/(u+v), h(t) = 1 - 0.4 t(1-t).
        let samples: Vec<f64> = (0..5).map(|k| {
            let t = k as f64 / 4.0;
            1.0 - 0.4 * t * (1.0 - t)
        }).collect();
        let fam = NormFamily::UserTable { samples };
        let exact = |u: f64, v: f64| u + v - 0.4 * u * v / (u + v);
        let (u, v) = (0.6, 0.3);
        assert!((fam.value(u, v) - exact(u, v)).abs() < 1e-14);
        let j = fam.jet(u, v);
        // L1 = 1 - 0.4 v²/(u+v)²
        let s = u + v;
        assert!((j.l1 - (1.0 - 0.4 * v * v / (s * s))).abs() < 1e-8);
        // L11 = 0.8 v²/(u+v)³
        assert!((j.l11 - 0.8 * v * v / s.powi(3)).abs() < 1e-6);
        assert!((j.l111 + 2.4 * v * v / s.powi(4)).abs() < 1e-3);
    }

    #[test]
    fn from_name_round_trip() {
        for f in [
            NormFamily::Riemannian { w1: 2.0, w2: 3.0 },
            NormFamily::QuarticMean { c: 1.5 },
            NormFamily::PhiPower { k: 0.3, p: 3 },
            NormFamily::UserTable { samples: vec![1.0, 0.9, 1.1] },
        ] {
            assert_eq!(NormFamily::from_name(f.name(), &f.params()).unwrap(), f);
        }
        assert!(matches!(NormFamily::from_name("randers", &[]), Err(NormError::UnknownFamily(_))));
        assert!(NormFamily::from_name("phi-power", &[0.3, 2.5]).is_err());
    }

    #[test]
    fn admissibility_of_builtins() {
        for fam in [NormFamily::QuarticMean { c: 1.0 }, NormFamily::PhiPower { k: 0.5, p: 2 }] {
            let n = norm(fam, 2, 2);
            let checks = n.admissibility_audit(8, 1e-12);
            assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        }
        // c = -3 makes L complex near the diagonal; must be flagged.
        let bad = norm(NormFamily::QuarticMean { c: -3.0 }, 1, 1);
        assert!(bad.admissibility_audit(8, 1e-12).iter().any(|c| !c.passed));
    }

    #[test]
    fn empty_block_rejected() {
        let e = MinkowskiNorm::new(NormFamily::QuarticMean { c: 1.0 }, InnerProduct::identity(2, 0)).unwrap_err();
        assert_eq!(e, NormError::EmptyBlock(2, 0));
    }
}
