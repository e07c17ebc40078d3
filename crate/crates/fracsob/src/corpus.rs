//! Closed-form test functions and the versioned corpus manifest.
//!
//! Each [`ClosedForm`] can be evaluated on real grids in dimension 1 or
//! 2 (radial extension for the even kinds, coordinate sum for the
//! ramp), and — where an analytic continuation exists — at complex
//! points for strip diagnostics. Known singularities off the real axis
//! are recorded as a list of imaginary ordinates so strip samplers can
//! short-circuit instead of stumbling into a pole.
//!
//! The shipped corpus is fixed and versioned: reports that name a
//! member id together with the corpus version are reproducible.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Imaginary ordinates are enumerated up to this bound; no strip used
/// anywhere in the crate is wider.
pub const POLE_ORDINATE_CAP: f64 = 16.0;

/// The function families the corpus draws from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CorpusKind {
    /// `exp(-a |x|^2)`, `a > 0`.
    Gaussian { a: f64 },
    /// Compactly supported bump `exp(-1 / (1 - |x - c|^2 / r^2))` for
    /// `|x - c| < r`, zero outside. In 2D the center is `(c, c)`.
    Bump { c: f64, r: f64 },
    /// `1 / (1 + |x|^2)`.
    Lorentzian,
    /// `1 / cosh(|x|)`.
    Sech,
    /// `(1 + |x|^2)^(-k)`, integer `k >= 1`; decays like `|x|^(-2k)`.
    PolynomialDecay { k: u32 },
    /// Sum of coordinates; unbounded, used as a non-member probe.
    LinearRamp,
    /// Constant `c`.
    Constant { c: f64 },
}

/// A named closed form with its analytic metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    id: String,
    #[serde(flatten)]
    kind: CorpusKind,
    /// Imaginary ordinates `y` where the continuation `z -> f(z)` is
    /// singular on the line `Im z = y` (within [`POLE_ORDINATE_CAP`]).
    pole_ordinates: Vec<f64>,
    /// Whether a complex evaluator exists off the real axis. The bump
    /// is smooth but not analytic, so strip diagnostics must reject it.
    analytic: bool,
}

impl ClosedForm {
    pub fn new(id: impl Into<String>, kind: CorpusKind) -> Result<Self> {
        match &kind {
            CorpusKind::Gaussian { a } if !(*a > 0.0) => {
                return Err(Error::InvalidParams { reason: format!("gaussian width a = {a} must be positive") })
            }
            CorpusKind::Bump { r, .. } if !(*r > 0.0) => {
                return Err(Error::InvalidParams { reason: format!("bump radius r = {r} must be positive") })
            }
            CorpusKind::PolynomialDecay { k } if *k == 0 => {
                return Err(Error::InvalidParams { reason: "polynomial_decay needs k >= 1".into() })
            }
            _ => {}
        }
        let pole_ordinates = canonical_pole_ordinates(&kind);
        let analytic = !matches!(kind, CorpusKind::Bump { .. });
        Ok(ClosedForm { id: id.into(), kind, pole_ordinates, analytic })
    }

    pub fn gaussian(a: f64) -> Result<Self> {
        ClosedForm::new(format!("gaussian(a={a})"), CorpusKind::Gaussian { a })
    }

    pub fn bump(c: f64, r: f64) -> Result<Self> {
        ClosedForm::new(format!("bump(c={c},r={r})"), CorpusKind::Bump { c, r })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &CorpusKind {
        &self.kind
    }

    pub fn pole_ordinates(&self) -> &[f64] {
        &self.pole_ordinates
    }

    /// True when the closed form continues analytically off the real
    /// axis (away from the listed pole ordinates).
    pub fn analytic(&self) -> bool {
        self.analytic
    }

    /// Even symmetry under `x -> -x` (used by symmetry checks).
    pub fn is_even(&self) -> bool {
        match self.kind {
            CorpusKind::Gaussian { .. }
            | CorpusKind::Lorentzian
            | CorpusKind::Sech
            | CorpusKind::PolynomialDecay { .. }
            | CorpusKind::Constant { .. } => true,
            CorpusKind::Bump { c, .. } => c == 0.0,
            CorpusKind::LinearRamp => false,
        }
    }

    /// Real-axis value at a 1D or 2D point. All corpus functions are
    /// real-valued on the real axis.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        let rsq = || x.iter().map(|v| v * v).sum::<f64>();
        match self.kind {
            CorpusKind::Gaussian { a } => (-a * rsq()).exp(),
            CorpusKind::Bump { c, r } => {
                let dsq: f64 = x.iter().map(|v| (v - c) * (v - c)).sum();
                let t = dsq / (r * r);
                if t < 1.0 {
                    (-1.0 / (1.0 - t)).exp()
                } else {
                    0.0
                }
            }
            CorpusKind::Lorentzian => 1.0 / (1.0 + rsq()),
            CorpusKind::Sech => 1.0 / rsq().sqrt().cosh(),
            CorpusKind::PolynomialDecay { k } => (1.0 + rsq()).powi(-(k as i32)),
            CorpusKind::LinearRamp => x.iter().sum(),
            CorpusKind::Constant { c } => c,
        }
    }

    /// Value of the analytic continuation at a complex point (1D).
    /// Near a pole the value is allowed to be non-finite; callers
    /// sampling strips keep a standoff from the listed ordinates.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        match self.kind {
            CorpusKind::Gaussian { a } => Ok((-a * z * z).exp()),
            CorpusKind::Bump { .. } => {
                if z.im == 0.0 {
                    Ok(Complex64::new(self.eval_real(&[z.re]), 0.0))
                } else {
                    Err(Error::NotAnalytic { id: self.id.clone() })
                }
            }
            CorpusKind::Lorentzian => Ok(Complex64::new(1.0, 0.0) / (1.0 + z * z)),
            CorpusKind::Sech => Ok(Complex64::new(1.0, 0.0) / z.cosh()),
            CorpusKind::PolynomialDecay { k } => Ok(Complex64::new(1.0, 0.0) / (1.0 + z * z).powu(k)),
            CorpusKind::LinearRamp => Ok(z),
            CorpusKind::Constant { c } => Ok(Complex64::new(c, 0.0)),
        }
    }

    /// 1D real-axis derivative of order `0..=4`. Exact formulas where
    /// the family has a convenient closed form, high-order central
    /// differences with Richardson extrapolation otherwise. The
    /// difference path is accurate to roughly 1e-8 absolute, which is
    /// ample for supremum diagnostics.
    pub fn derivative(&self, order: u32, x: f64) -> Result<f64> {
        const MAX_ORDER: u32 = 4;
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
        }
        Ok(match self.kind {
            CorpusKind::Gaussian { a } => {
                let coeffs = gaussian_derivative_poly(a, order);
                let poly: f64 = coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
                poly * (-a * x * x).exp()
            }
            CorpusKind::Constant { c } => {
                if order == 0 {
                    c
                } else {
                    0.0
                }
            }
            CorpusKind::LinearRamp => match order {
                0 => x,
                1 => 1.0,
                _ => 0.0,
            },
            _ => {
                if order == 0 {
                    self.eval_real(&[x])
                } else {
                    fd_derivative(&|t| self.eval_real(&[t]), order, x)
                }
            }
        })
    }
}

/// Coefficients of the polynomial `q_m` in `d^m/dx^m exp(-a x^2) =
/// q_m(x) exp(-a x^2)`, via `q_{m+1} = q_m' - 2 a x q_m`.
fn gaussian_derivative_poly(a: f64, order: u32) -> Vec<f64> {
    let mut q = vec![1.0f64];
    for _ in 0..order {
        // q' contributes j*c to power j-1; -2 a x q contributes -2a*c
        // to power j+1.
        let mut next = vec![0.0; q.len() + 1];
        for (j, &c) in q.iter().enumerate() {
            if j >= 1 {
                next[j - 1] += j as f64 * c;
            }
            next[j + 1] += -2.0 * a * c;
        }
        q = next;
    }
    q
}

/// Central finite difference of order `1..=4` with one Richardson step.
fn fd_derivative(f: &dyn Fn(f64) -> f64, order: u32, x: f64) -> f64 {
    let base = match order {
        1 | 2 => 0.02,
        _ => 0.08,
    } * (1.0 + x.abs() / 8.0);
    let stencil = |h: f64| -> f64 {
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
            _ => {
                (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                    / (h * h * h * h)
            }
        }
    };
    // Both stencils are O(h^2); eliminating the leading term leaves O(h^4).
    (4.0 * stencil(base / 2.0) - stencil(base)) / 3.0
}

fn canonical_pole_ordinates(kind: &CorpusKind) -> Vec<f64> {
    match kind {
        // Simple poles of 1/(1+z^2) and branch-free poles of its powers.
        CorpusKind::Lorentzian | CorpusKind::PolynomialDecay { .. } => vec![1.0, -1.0],
        // cosh vanishes on the imaginary axis at odd multiples of pi/2.
        CorpusKind::Sech => {
            let mut out = Vec::new();
            let mut k = 0u32;
            loop {
                let y = (2 * k + 1) as f64 * std::f64::consts::FRAC_PI_2;
                if y > POLE_ORDINATE_CAP {
                    break;
                }
                out.push(y);
                out.push(-y);
                k += 1;
            }
            out
        }
        _ => Vec::new(),
    }
}

/// The fixed corpus: a manifest version plus the member list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub version: String,
    pub members: Vec<ClosedForm>,
}

impl CorpusManifest {
    pub fn from_json(json: &str) -> Result<Self> {
        let manifest: CorpusManifest =
            serde_json::from_str(json).map_err(|e| Error::Corpus { reason: e.to_string() })?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Consistency of the stored metadata against the constructors:
    /// unique ids, pole lists and analyticity flags matching the kind.
    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.members.iter().enumerate() {
            if self.members[..i].iter().any(|other| other.id == m.id) {
                return Err(Error::Corpus { reason: format!("duplicate id '{}'", m.id) });
            }
            let rebuilt = ClosedForm::new(m.id.clone(), m.kind.clone())?;
            if rebuilt.analytic != m.analytic {
                return Err(Error::Corpus {
                    reason: format!("member '{}' has wrong analyticity flag", m.id),
                });
            }
            if rebuilt.pole_ordinates.len() != m.pole_ordinates.len()
                || rebuilt
                    .pole_ordinates
                    .iter()
                    .zip(&m.pole_ordinates)
                    .any(|(a, b)| (a - b).abs() > 1e-12)
            {
                return Err(Error::Corpus {
                    reason: format!("member '{}' has a stale pole list", m.id),
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&ClosedForm> {
        self.members.iter().find(|m| m.id == id).ok_or_else(|| Error::Corpus {
            reason: format!(
                "unknown member '{id}' (known: {})",
                self.members.iter().map(|m| m.id.as_str()).collect::<Vec<_>>().join(", ")
            ),
        })
    }

    pub fn ids(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.id.as_str()).collect()
    }
}

static BUILTIN: OnceLock<CorpusManifest> = OnceLock::new();

/// The corpus shipped with the crate (`corpus/corpus_v1.json`).
pub fn builtin_corpus() -> &'static CorpusManifest {
    BUILTIN.get_or_init(|| {
        CorpusManifest::from_json(include_str!("../corpus/corpus_v1.json"))
            .expect("built-in corpus manifest is valid")
    })
}
