//! Axis-aligned uniform grids in one or two dimensions, and the box
//! domains they discretize.
//!
//! A [`Grid`] owns per-axis origin/count with a single spacing `h`
//! shared by all axes; nodes are addressed row-major. A [`DomainSpec`]
//! is a closed box used to select evaluation windows and to carry the
//! diameter into inequality checks that are only valid on small domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Comparison slack for deciding whether a point or bound lands on a
/// grid node, measured in cells.
const ALIGN_TOL: f64 = 1e-9;

/// One grid axis: nodes at `origin + i * spacing`, `i = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub origin: f64,
    pub count: usize,
}

/// Uniform grid in dimension 1 or 2 with one spacing for all axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
    spacing: f64,
}

impl Grid {
    pub fn new(axes: Vec<Axis>, spacing: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid {
                reason: format!("dimension {} not supported (1 or 2)", axes.len()),
            });
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidGrid { reason: format!("spacing {spacing} must be positive") });
        }
        for ax in &axes {
            if ax.count == 0 {
                return Err(Error::InvalidGrid { reason: "axis with zero nodes".into() });
            }
            if !ax.origin.is_finite() {
                return Err(Error::InvalidGrid { reason: format!("origin {} not finite", ax.origin) });
            }
        }
        Ok(Grid { axes, spacing })
    }

    /// 1D grid on `[lo, lo + (count-1) h]`.
    pub fn line(lo: f64, spacing: f64, count: usize) -> Result<Self> {
        Grid::new(vec![Axis { origin: lo, count }], spacing)
    }

    /// Grid covering `domain` with spacing `h`, nodes anchored at the
    /// lower corner. When the box width is an integer multiple of `h`
    /// (the usual dyadic case) the upper boundary is a node.
    pub fn from_domain(domain: &DomainSpec, h: f64) -> Result<Self> {
        let axes = domain
            .bounds
            .iter()
            .map(|&(lo, hi)| {
                let cells = ((hi - lo) / h + ALIGN_TOL).floor() as usize;
                Axis { origin: lo, count: cells + 1 }
            })
            .collect();
        Grid::new(axes, h)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false // count >= 1 per axis is enforced at construction
    }

    /// Volume of one cell, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    /// Row-major node coordinates. The returned buffer has `dim()`
    /// entries; a fixed-size array keeps the hot paths allocation-free.
    pub fn node(&self, index: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        match self.axes.len() {
            1 => out[0] = self.axes[0].origin + index as f64 * self.spacing,
            _ => {
                let n1 = self.axes[1].count;
                let (i0, i1) = (index / n1, index % n1);
                out[0] = self.axes[0].origin + i0 as f64 * self.spacing;
                out[1] = self.axes[1].origin + i1 as f64 * self.spacing;
            }
        }
        out
    }

    /// Closed box spanned by the outermost nodes.
    pub fn extent(&self) -> DomainSpec {
        DomainSpec::new(
            self.axes
                .iter()
                .map(|a| (a.origin, a.origin + (a.count - 1) as f64 * self.spacing))
                .collect(),
        )
        .expect("grid extent is a valid box")
    }

    /// Per-axis index windows of the nodes lying inside `domain`.
    /// Errors if `domain` reaches outside the grid extent or if any
    /// axis window is empty.
    pub fn window(&self, domain: &DomainSpec) -> Result<Vec<(usize, usize)>> {
        if domain.bounds.len() != self.dim() {
            return Err(Error::GridMismatch {
                reason: format!(
                    "domain dimension {} vs grid dimension {}",
                    domain.bounds.len(),
                    self.dim()
                ),
            });
        }
        let ext = self.extent();
        let tol = ALIGN_TOL * self.spacing;
        for (&(dlo, dhi), &(glo, ghi)) in domain.bounds.iter().zip(&ext.bounds) {
            if dlo < glo - tol || dhi > ghi + tol {
                return Err(Error::DomainNotCovered {
                    requested: domain.bounds.clone(),
                    available: ext.bounds.clone(),
                });
            }
        }
        let mut windows = Vec::with_capacity(self.dim());
        for (ax, &(dlo, dhi)) in self.axes.iter().zip(&domain.bounds) {
            let lo = ((dlo - ax.origin) / self.spacing - ALIGN_TOL).ceil().max(0.0) as usize;
            let hi_f = ((dhi - ax.origin) / self.spacing + ALIGN_TOL).floor();
            if hi_f < lo as f64 {
                return Err(Error::EmptyRestriction);
            }
            let hi = (hi_f as usize).min(ax.count - 1);
            if lo > hi {
                return Err(Error::EmptyRestriction);
            }
            windows.push((lo, hi));
        }
        Ok(windows)
    }

    /// Every-other-node coarsening (spacing doubles, origins fixed).
    /// Used for two-level error estimates.
    pub fn coarsen(&self) -> Grid {
        let axes = self
            .axes
            .iter()
            .map(|a| Axis { origin: a.origin, count: a.count.div_ceil(2) })
            .collect();
        Grid { axes, spacing: 2.0 * self.spacing }
    }

    /// Row-major index on `self` of the coarse node `coarse_index` of
    /// `self.coarsen()`.
    pub fn coarse_to_fine(&self, coarse_index: usize) -> usize {
        match self.axes.len() {
            1 => 2 * coarse_index,
            _ => {
                let n1c = self.axes[1].count.div_ceil(2);
                let (i0, i1) = (coarse_index / n1c, coarse_index % n1c);
                (2 * i0) * self.axes[1].count + 2 * i1
            }
        }
    }
}

/// Closed axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    bounds: Vec<(f64, f64)>,
}

impl DomainSpec {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 2 {
            return Err(Error::InvalidParams {
                reason: format!("domain dimension {} not supported (1 or 2)", bounds.len()),
            });
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParams { reason: format!("bad interval [{lo}, {hi}]") });
            }
        }
        Ok(DomainSpec { bounds })
    }

    /// `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        DomainSpec::new(vec![(lo, hi)])
    }

    /// `[-r, r]^n`.
    pub fn symmetric(r: f64, n: usize) -> Result<Self> {
        DomainSpec::new(vec![(-r, r); n])
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        self.bounds.iter().map(|&(lo, hi)| (hi - lo) * (hi - lo)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        point.len() == self.bounds.len()
            && point
                .iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| x >= lo - tol && x <= hi + tol)
    }
}
