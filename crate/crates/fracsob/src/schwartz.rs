//! Rapid-descent diagnostics for the closed-form corpus: polynomially
//! weighted derivative seminorms on the real line, weighted suprema on
//! complex strips, class-membership verdicts built from them, and the
//! boundary-vanishing test for analytic continuations.
//!
//! Divergence is a verdict, not an error: these spaces are defined by
//! finiteness conditions, so "not finite" is a first-class result. A
//! supremum is ruled divergent when its witness sits at the truncation
//! boundary and the value still grows more than 1% per doubling of the
//! truncation — growth that refinement does not quench.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::ClosedForm;
use crate::error::{Error, Result};
use crate::reduce::argmax_first;
use crate::report::NormValue;
use num_complex::Complex64;

/// Relative growth per truncation doubling above which a
/// boundary-witnessed supremum is ruled divergent.
pub const GROWTH_THRESHOLD: f64 = 1.01;

/// A boundary difference below this counts as vanished.
pub const VANISH_TOL: f64 = 1e-8;

/// Witness positions beyond this fraction of the truncation radius
/// count as "at the boundary".
const BOUNDARY_FRACTION: f64 = 0.9;

/// Samples per truncation level in the real-line scans.
const SCAN_SAMPLES: usize = 4097;

/// Weighted derivative supremum `sup (1 + |x|^beta) |D^i f(x)|` over
/// `[-trunc, trunc]`, monitored at three nested truncations
/// (`trunc/4`, `trunc/2`, `trunc`). Divergent when the witness sits at
/// the boundary and the value grows more than 1% per doubling.
///
/// `beta = 0` means an unweighted supremum (weight 1, not 2): the zero
/// order of the polynomial weight switches the weight off rather than
/// evaluating `1 + |x|^0` literally.
///
/// Derivative orders above 4 are rejected by the corpus evaluator.
pub fn eta_seminorm(f: &ClosedForm, beta: u32, order: u32, trunc: f64) -> Result<NormValue> {
    if !(trunc > 0.0) || !trunc.is_finite() {
        return Err(Error::InvalidParams { reason: format!("truncation {trunc} must be positive") });
    }
    let weight = |x: f64| if beta == 0 { 1.0 } else { 1.0 + x.abs().powi(beta as i32) };
    let mut sups = [0.0f64; 3];
    let mut witness_abs = [0.0f64; 3];
    for (level, sup) in sups.iter_mut().enumerate() {
        let radius = trunc / (1 << (2 - level)) as f64;
        let step = 2.0 * radius / (SCAN_SAMPLES - 1) as f64;
        let values = (0..SCAN_SAMPLES)
            .map(|j| {
                let x = -radius + j as f64 * step;
                Ok(weight(x) * f.derivative(order, x)?.abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let (idx, best) = argmax_first(&values).expect("scan is nonempty");
        *sup = best;
        witness_abs[level] = (-radius + idx as f64 * step).abs();
    }
    let at_boundary = witness_abs[2] >= BOUNDARY_FRACTION * trunc;
    if at_boundary && sups[1] > 0.0 && sups[2] > GROWTH_THRESHOLD * sups[1] {
        return Ok(NormValue::Divergent { growth_per_doubling: sups[2] / sups[1] });
    }
    Ok(NormValue::Finite(sups[2]))
}

/// Full table of [`eta_seminorm`] values for `beta = 0..=max_beta`,
/// `order = 0..=max_order`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeminormLattice {
    pub id: String,
    pub max_beta: u32,
    pub max_order: u32,
    pub trunc: f64,
    /// `table[beta][order]`.
    pub table: Vec<Vec<NormValue>>,
}

impl SeminormLattice {
    pub fn compute(f: &ClosedForm, max_beta: u32, max_order: u32, trunc: f64) -> Result<Self> {
        let table = (0..=max_beta)
            .into_par_iter()
            .map(|beta| {
                (0..=max_order).map(|order| eta_seminorm(f, beta, order, trunc)).collect()
            })
            .collect::<Result<Vec<Vec<NormValue>>>>()?;
        Ok(SeminormLattice {
            id: f.id().to_string(),
            max_beta,
            max_order,
            trunc,
            table,
        })
    }

    pub fn get(&self, beta: u32, order: u32) -> &NormValue {
        &self.table[beta as usize][order as usize]
    }

    /// True when no entry diverged.
    pub fn all_finite(&self) -> bool {
        self.table.iter().flatten().all(|v| !v.is_divergent())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice serializes")
    }
}

/// Sampling plan for [`strip_norm`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StripSpec {
    /// Ordinate count per half-strip; lines at `±(p - delta) k / lines`.
    pub lines: usize,
    /// Real-axis extent `[-extent, extent]`.
    pub extent: f64,
    pub samples_per_line: usize,
}

impl Default for StripSpec {
    fn default() -> Self {
        StripSpec { lines: 64, extent: 32.0, samples_per_line: 2049 }
    }
}

impl StripSpec {
    fn validate(&self) -> Result<()> {
        if self.lines == 0 || self.samples_per_line < 2 || !(self.extent > 0.0) {
            return Err(Error::InvalidParams {
                reason: "strip spec needs lines >= 1, samples >= 2, extent > 0".into(),
            });
        }
        Ok(())
    }
}

/// Outcome of a strip supremum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripVerdict {
    Finite(f64),
    /// A pole ordinate lies strictly inside the strip.
    PoleInside { ordinate: f64 },
    /// Boundary-witnessed growth across truncation doublings.
    Unbounded { growth_per_doubling: f64 },
    /// The function is not analytic off the real axis.
    NotEntire,
}

impl StripVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, StripVerdict::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            StripVerdict::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

/// Weighted supremum over a complex strip, with the sampling that
/// produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StripReport {
    pub p: u32,
    /// Nominal half-width of the open strip (equals `p`).
    pub half_width: f64,
    /// Distance kept from the strip boundary: `1e-3 * p`.
    pub standoff: f64,
    pub verdict: StripVerdict,
    /// `(Re, Im)` of the supremum witness, when one was sampled.
    pub witness: Option<(f64, f64)>,
    /// The witness lies on an outermost sampled line, so the supremum
    /// over the open strip is likely attained at its boundary.
    pub witness_on_outermost_line: bool,
    pub lines_sampled: usize,
    pub extent: f64,
}

/// Supremum of `(1 + |z|^p) |f(z)|` over the open strip `|Im z| < p`,
/// sampled from inside on lines `Im z = ±(p - delta) k / M` with
/// standoff `delta = 1e-3 p`.
///
/// Short-circuits to a divergence verdict when a pole ordinate lies
/// strictly inside the strip; otherwise the boundary-growth rule of
/// the module applies along the real direction.
pub fn strip_norm(f: &ClosedForm, p: u32, spec: &StripSpec) -> Result<StripReport> {
    if p < 1 {
        return Err(Error::InvalidParams { reason: "strip order p must be >= 1".into() });
    }
    spec.validate()?;
    let standoff = 1e-3 * p as f64;
    let base = StripReport {
        p,
        half_width: p as f64,
        standoff,
        verdict: StripVerdict::NotEntire,
        witness: None,
        witness_on_outermost_line: false,
        lines_sampled: 0,
        extent: spec.extent,
    };
    if !f.analytic() {
        return Ok(base);
    }
    if let Some(&ordinate) = f
        .pole_ordinates()
        .iter()
        .find(|o| o.abs() < p as f64)
    {
        return Ok(StripReport { verdict: StripVerdict::PoleInside { ordinate }, ..base });
    }

    // Ordinates in a fixed order: 0, then +/- pairs outward.
    let reach = p as f64 - standoff;
    let mut ordinates = vec![0.0f64];
    for k in 1..=spec.lines {
        let y = reach * k as f64 / spec.lines as f64;
        ordinates.push(y);
        ordinates.push(-y);
    }
    let samples = spec.samples_per_line;
    let step = 2.0 * spec.extent / (samples - 1) as f64;
    let values = (0..ordinates.len() * samples)
        .into_par_iter()
        .map(|flat| {
            let y = ordinates[flat / samples];
            let x = -spec.extent + (flat % samples) as f64 * step;
            let z = Complex64::new(x, y);
            Ok((1.0 + z.norm().powi(p as i32)) * f.eval_complex(z)?.norm())
        })
        .collect::<Result<Vec<f64>>>()?;

    let (idx, sup) = argmax_first(&values).expect("strip scan is nonempty");
    let witness_x = -spec.extent + (idx % samples) as f64 * step;
    let witness_y = ordinates[idx / samples];

    // Nested real-axis truncations from the same samples.
    let mut sups = [0.0f64; 3];
    for (level, s) in sups.iter_mut().enumerate() {
        let radius = spec.extent / (1 << (2 - level)) as f64;
        *s = values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let x = -spec.extent + (i % samples) as f64 * step;
                x.abs() <= radius * (1.0 + 1e-12)
            })
            .map(|(_, &v)| v)
            .fold(0.0f64, f64::max);
    }
    let at_boundary = witness_x.abs() >= BOUNDARY_FRACTION * spec.extent;
    let verdict = if at_boundary && sups[1] > 0.0 && sups[2] > GROWTH_THRESHOLD * sups[1] {
        StripVerdict::Unbounded { growth_per_doubling: sups[2] / sups[1] }
    } else {
        StripVerdict::Finite(sup)
    };
    Ok(StripReport {
        verdict,
        witness: Some((witness_x, witness_y)),
        witness_on_outermost_line: witness_y.abs() >= reach * (1.0 - 1e-12) && witness_y != 0.0,
        lines_sampled: ordinates.len(),
        ..base
    })
}

/// Overall membership outcome across tested strip orders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipVerdict {
    MemberUpTo(u32),
    ExcludedAt(u32),
}

/// Per-order strip verdicts with the overall call.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassMembershipReport {
    pub id: String,
    pub max_p: u32,
    pub strips: Vec<StripReport>,
    pub overall: MembershipVerdict,
}

impl ClassMembershipReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("membership report serializes")
    }
}

/// Strip finiteness for every order `p = 1..=max_p` (`max_p` capped at
/// 4). Membership in the class requires finiteness for every order, so
/// the overall verdict is "member up to the tested order" at best.
pub fn class_membership_report(f: &ClosedForm, max_p: u32) -> Result<ClassMembershipReport> {
    const MAX_P: u32 = 4;
    if max_p == 0 || max_p > MAX_P {
        return Err(Error::OrderTooHigh { order: max_p, max: MAX_P });
    }
    let spec = StripSpec::default();
    let mut strips = Vec::with_capacity(max_p as usize);
    let mut overall = MembershipVerdict::MemberUpTo(max_p);
    for p in 1..=max_p {
        let report = strip_norm(f, p, &spec)?;
        if !report.verdict.is_finite() && overall == MembershipVerdict::MemberUpTo(max_p) {
            overall = MembershipVerdict::ExcludedAt(p);
        }
        strips.push(report);
    }
    Ok(ClassMembershipReport { id: f.id().to_string(), max_p, strips, overall })
}

/// One row of a [`VanishingReport`]: the largest boundary difference
/// seen at ordinate `y`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VanishingRow {
    pub y: f64,
    pub max_diff: f64,
}

/// Outcome of the boundary-vanishing sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VanishingReport {
    pub rows: Vec<VanishingRow>,
    pub vanishes: bool,
}

/// Sweep `max_x |f(x + iy) - f(x - iy)|` over the interval for each
/// `y` in a decreasing positive sequence; the verdict is "vanishes"
/// when the final row drops below `1e-8`.
pub fn vanishing_check_with(
    eval: impl Fn(Complex64) -> Result<Complex64> + Sync,
    interval: (f64, f64),
    y_sweep: &[f64],
) -> Result<VanishingReport> {
    let (lo, hi) = interval;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams { reason: format!("bad interval [{lo}, {hi}]") });
    }
    if y_sweep.is_empty()
        || y_sweep.iter().any(|&y| !(y > 0.0))
        || y_sweep.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParams {
            reason: "y sweep must be positive and strictly decreasing".into(),
        });
    }
    let step = (hi - lo) / (SCAN_SAMPLES - 1) as f64;
    let mut rows = Vec::with_capacity(y_sweep.len());
    for &y in y_sweep {
        let diffs = (0..SCAN_SAMPLES)
            .into_par_iter()
            .map(|j| {
                let x = lo + j as f64 * step;
                let above = eval(Complex64::new(x, y))?;
                let below = eval(Complex64::new(x, -y))?;
                Ok((above - below).norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(VanishingRow { y, max_diff: diffs.iter().copied().fold(0.0f64, f64::max) });
    }
    let vanishes = rows.last().is_some_and(|r| r.max_diff < VANISH_TOL);
    Ok(VanishingReport { rows, vanishes })
}

/// [`vanishing_check_with`] for a corpus member.
pub fn vanishing_check(
    f: &ClosedForm,
    interval: (f64, f64),
    y_sweep: &[f64],
) -> Result<VanishingReport> {
    vanishing_check_with(|z| f.eval_complex(z), interval, y_sweep)
}
