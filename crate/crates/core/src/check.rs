//! Residual-based check records shared by every audit in the crate.

use std::fmt;

/// Where the worst residual of a check was observed.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Basis indices, e.g. a structure-constant triple.
    Indices(Vec<usize>),
    /// A sampled vector in `m`.
    Vector(Vec<f64>),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Indices(ix) => {
                let parts: Vec<String> = ix.iter().map(|i| i.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            Witness::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// One named residual check with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
    pub witness: Option<Witness>,
}

impl Check {
    /// Passes iff `residual <= tolerance`; a NaN residual always fails.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            samples,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Option<Witness>) -> Self {
        self.witness = witness;
        self
    }
}

/// Running maximum of a residual together with the argument that produced it.
#[derive(Debug, Clone)]
pub(crate) struct MaxTracker {
    pub value: f64,
    pub witness: Option<Witness>,
    pub count: usize,
}

impl MaxTracker {
    pub fn new() -> Self {
        Self { value: 0.0, witness: None, count: 0 }
    }

    pub fn observe(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        self.count += 1;
        // NaN must dominate so that broken inputs never pass silently.
        if value.is_nan() && !self.value.is_nan() || value > self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    pub fn into_check(self, name: impl Into<String>, tolerance: f64) -> Check {
        let samples = self.count;
        Check::new(name, self.value, tolerance, samples).with_witness(self.witness)
    }
}

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Structural identities over exact structure constants.
    pub structure: f64,
    /// Sampled natural-reductiveness residuals on the unit indicatrix.
    pub nr: f64,
    /// Agreement between two computation paths of the same quantity.
    pub xcheck: f64,
    /// Sampled |S| threshold for the vanishing verdict.
    pub s_vanish: f64,
    /// Sampled max-entry threshold for the vanishing-E verdict.
    pub e_vanish: f64,
    /// Below this |y₂| the closed flag-curvature form is skipped.
    pub eps_sing: f64,
    /// Minimum eigenvalue accepted by the convexity audit.
    pub convexity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structure: 1e-9,
            nr: 1e-8,
            xcheck: 1e-8,
            s_vanish: 1e-9,
            e_vanish: 1e-6,
            eps_sing: 1e-3,
            convexity: 1e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        let c = Check::new("x", f64::NAN, 1.0, 1);
        assert!(!c.passed);
        let mut t = MaxTracker::new();
        t.observe(0.5, || Witness::Indices(vec![0]));
        t.observe(f64::NAN, || Witness::Indices(vec![1]));
        t.observe(2.0, || Witness::Indices(vec![2]));
        assert!(t.value.is_nan());
        assert_eq!(t.witness, Some(Witness::Indices(vec![1])));
    }
}
