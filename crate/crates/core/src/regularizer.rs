//! Regularizers on the simplex, their convex conjugates and choice maps.
//!
//! Two kinds ship: the negative Gibbs entropy (choice map = softmax) and the
//! quadratic penalty (choice map = Euclidean projection onto the simplex).
//! New kinds go into [`RegularizerKind`] together with the five match arms
//! below; nothing else in the crate dispatches on the kind.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::SIMPLEX_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegularizerKind {
    /// `h(x) = Σ x log x`
    Entropic,
    /// `h(x) = ½ Σ x²`
    Euclidean,
}

impl RegularizerKind {
    pub fn name(self) -> &'static str {
        match self {
            RegularizerKind::Entropic => "entropic",
            RegularizerKind::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for RegularizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegularizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropic" => Ok(RegularizerKind::Entropic),
            "euclidean" => Ok(RegularizerKind::Euclidean),
            other => Err(Error::InvalidArgument(format!(
                "unknown regularizer `{other}` (expected `entropic` or `euclidean`)"
            ))),
        }
    }
}

/// Norm in which a strong convexity modulus is stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongConvexity {
    pub modulus: f64,
    pub norm: Norm,
}

/// A regularizer on the simplex of dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regularizer {
    kind: RegularizerKind,
    n: usize,
}

impl Regularizer {
    pub fn new(kind: RegularizerKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "regularizer needs at least 2 actions, got {n}"
            )));
        }
        Ok(Regularizer { kind, n })
    }

    pub fn entropic(n: usize) -> Result<Self> {
        Self::new(RegularizerKind::Entropic, n)
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(RegularizerKind::Euclidean, n)
    }

    pub fn kind(&self) -> RegularizerKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Penalty `h(x)` for `x` on the simplex.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let s: f64 = x.iter().sum();
        if x.iter().any(|v| !v.is_finite() || *v < -SIMPLEX_TOL) || (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Domain("point is not on the simplex".into()));
        }
        Ok(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: &[f64]) -> f64 {
        match self.kind {
            RegularizerKind::Entropic => x
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| v * v.ln())
                .sum(),
            RegularizerKind::Euclidean => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        }
    }

    /// Choice map `Q(y) = argmax_x {⟨y, x⟩ − h(x)}`.
    pub fn choice(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_scores(y)?;
        let mut out = vec![0.0; self.n];
        self.choice_into(y, &mut out);
        Ok(out)
    }

    /// Unchecked kernel of [`Regularizer::choice`].
    pub(crate) fn choice_into(&self, y: &[f64], out: &mut [f64]) {
        match self.kind {
            RegularizerKind::Entropic => softmax_into(y, out),
            RegularizerKind::Euclidean => project_simplex_into(y, out),
        }
    }

    /// Convex conjugate `h*(y) = max_x {⟨y, x⟩ − h(x)}`.
    pub fn conjugate(&self, y: &[f64]) -> Result<f64> {
        self.check_scores(y)?;
        Ok(self.conjugate_unchecked(y))
    }

    pub(crate) fn conjugate_unchecked(&self, y: &[f64]) -> f64 {
        match self.kind {
            RegularizerKind::Entropic => log_sum_exp(y),
            RegularizerKind::Euclidean => {
                let mut x = vec![0.0; self.n];
                project_simplex_into(y, &mut x);
                crate::game::dot(y, &x) - self.value_unchecked(&x)
            }
        }
    }

    /// `Ω = max h − min h` over the simplex.
    pub fn omega(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            RegularizerKind::Entropic => n.ln(),
            RegularizerKind::Euclidean => 0.5 - 0.5 / n,
        }
    }

    /// `max h` over the simplex (attained at the vertices for both kinds).
    pub fn max_value(&self) -> f64 {
        match self.kind {
            RegularizerKind::Entropic => 0.0,
            RegularizerKind::Euclidean => 0.5,
        }
    }

    /// Strong convexity modulus: 1 in L2 for the quadratic penalty, 1 in L1
    /// for the entropy (Pinsker).
    pub fn strong_convexity(&self) -> StrongConvexity {
        match self.kind {
            RegularizerKind::Entropic => StrongConvexity { modulus: 1.0, norm: Norm::L1 },
            RegularizerKind::Euclidean => StrongConvexity { modulus: 1.0, norm: Norm::L2 },
        }
    }

    /// A score vector `y` with `Q(y) = x` and `y` at the last coordinate equal to
    /// zero: `log(x / x_last)` for the entropy, `x − x_last` for the quadratic
    /// penalty. The entropic pre-image needs a strictly interior `x`.
    pub fn preimage(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.value(x)?;
        let last = x[self.n - 1];
        match self.kind {
            RegularizerKind::Entropic => {
                if x.iter().any(|&v| v <= 0.0) {
                    return Err(Error::Domain(
                        "entropic pre-image needs a strictly interior strategy (log 0 is undefined)".into(),
                    ));
                }
                Ok(x.iter().map(|&v| (v / last).ln()).collect())
            }
            RegularizerKind::Euclidean => Ok(x.iter().map(|&v| v - last).collect()),
        }
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::Shape(format!("expected {} entries, got {}", self.n, v.len())));
        }
        Ok(())
    }

    fn check_scores(&self, y: &[f64]) -> Result<()> {
        self.check_len(y)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("score vector has non-finite entries".into()));
        }
        Ok(())
    }
}

fn softmax_into(y: &[f64], out: &mut [f64]) {
    let m = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (o, &v) in out.iter_mut().zip(y) {
        *o = (v - m).exp();
        s += *o;
    }
    for o in out.iter_mut() {
        *o /= s;
    }
}

pub(crate) fn log_sum_exp(y: &[f64]) -> f64 {
    let m = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + y.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

/// Euclidean projection onto the simplex by sorting and thresholding.
fn project_simplex_into(y: &[f64], out: &mut [f64]) {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for (o, &v) in out.iter_mut().zip(y) {
        *o = (v - theta).max(0.0);
    }
}
