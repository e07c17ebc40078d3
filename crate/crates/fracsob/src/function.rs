//! Grid samples of a function, with an optional link back to the
//! closed form they came from.

use num_complex::Complex64;

use crate::corpus::ClosedForm;
use crate::error::{Error, Result};
use crate::grid::{DomainSpec, Grid};

/// Complex samples on a [`Grid`]. When the samples were produced from a
/// corpus member the closed form rides along, so downstream code can
/// use exact derivatives or re-sample at other resolutions.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
    source: Option<ClosedForm>,
}

impl SampledFunction {
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                reason: format!("{} values for a grid of {} nodes", values.len(), grid.len()),
            });
        }
        Ok(SampledFunction { grid, values, source: None })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn source(&self) -> Option<&ClosedForm> {
        self.source.as_ref()
    }

    /// Detach the closed-form link (used when values are transformed in
    /// a way the closed form no longer describes).
    pub fn with_source(mut self, source: Option<ClosedForm>) -> Self {
        self.source = source;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus among nodes within `width_cells` of the grid
    /// boundary (per axis). Used for decay and compact-support checks.
    pub fn max_abs_on_boundary_ring(&self, width_cells: usize) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.values.len() {
            if self.on_boundary_ring(idx, width_cells) {
                worst = worst.max(self.values[idx].norm());
            }
        }
        worst
    }

    /// First node in the boundary ring whose modulus exceeds `tol`,
    /// with its coordinates and modulus.
    pub fn boundary_ring_violation(&self, width_cells: usize, tol: f64) -> Option<(Vec<f64>, f64)> {
        (0..self.values.len())
            .filter(|&idx| self.on_boundary_ring(idx, width_cells))
            .find_map(|idx| {
                let m = self.values[idx].norm();
                (m > tol).then(|| (self.grid.node(idx)[..self.grid.dim()].to_vec(), m))
            })
    }

    fn on_boundary_ring(&self, index: usize, width_cells: usize) -> bool {
        let axes = self.grid.axes();
        match axes.len() {
            1 => {
                let n = axes[0].count;
                index < width_cells || index + width_cells >= n
            }
            _ => {
                let n1 = axes[1].count;
                let (i0, i1) = (index / n1, index % n1);
                let n0 = axes[0].count;
                i0 < width_cells
                    || i0 + width_cells >= n0
                    || i1 < width_cells
                    || i1 + width_cells >= n1
            }
        }
    }

    /// Every-other-node subsample (spacing doubles). Values are copied
    /// bit-exactly from the fine grid; used for two-level error
    /// estimates.
    pub fn coarsen_by_two(&self) -> SampledFunction {
        let grid = self.grid.coarsen();
        let values = (0..grid.len())
            .map(|ci| self.values[self.grid.coarse_to_fine(ci)])
            .collect();
        SampledFunction { grid, values, source: self.source.clone() }
    }

    /// Samples restricted to the nodes inside `domain`. Values are
    /// copied bit-exactly; the sub-grid keeps the parent's lattice.
    pub fn restrict(&self, domain: &DomainSpec) -> Result<SampledFunction> {
        let windows = self.grid.window(domain)?;
        let h = self.grid.spacing();
        let axes = self.grid.axes();
        let new_axes: Vec<_> = windows
            .iter()
            .zip(axes)
            .map(|(&(lo, hi), ax)| crate::grid::Axis {
                origin: ax.origin + lo as f64 * h,
                count: hi - lo + 1,
            })
            .collect();
        let grid = Grid::new(new_axes, h)?;
        let mut values = Vec::with_capacity(grid.len());
        match windows.len() {
            1 => {
                let (lo, hi) = windows[0];
                values.extend_from_slice(&self.values[lo..=hi]);
            }
            _ => {
                let n1 = axes[1].count;
                let (lo0, hi0) = windows[0];
                let (lo1, hi1) = windows[1];
                for i0 in lo0..=hi0 {
                    let row = i0 * n1;
                    values.extend_from_slice(&self.values[row + lo1..=row + hi1]);
                }
            }
        }
        Ok(SampledFunction { grid, values, source: self.source.clone() })
    }
}

/// Evaluate a closed form at every node of `grid`. Fails if any value
/// is non-finite, reporting the offending node.
pub fn sample(f: &ClosedForm, grid: &Grid) -> Result<SampledFunction> {
    let dim = grid.dim();
    let mut values = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let node = grid.node(idx);
        let v = f.eval_real(&node[..dim]);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample {
                point: node[..dim].to_vec(),
                id: f.id().to_string(),
            });
        }
        values.push(Complex64::new(v, 0.0));
    }
    Ok(SampledFunction { grid: grid.clone(), values, source: Some(f.clone()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusKind;

    fn gaussian() -> ClosedForm {
        ClosedForm::gaussian(1.0).unwrap()
    }

    #[test]
    fn sampling_matches_pointwise_evaluation() {
        let g = Grid::line(-2.0, 0.5, 9).unwrap();
        let u = sample(&gaussian(), &g).unwrap();
        for idx in 0..g.len() {
            let x = g.node(idx)[0];
            assert_eq!(u.values()[idx].re, (-x * x).exp());
            assert_eq!(u.values()[idx].im, 0.0);
        }
        assert!(u.source().is_some());
    }

    #[test]
    fn restrict_to_full_extent_is_identity() {
        let g = Grid::line(-2.0, 0.25, 17).unwrap();
        let u = sample(&gaussian(), &g).unwrap();
        let r = u.restrict(&g.extent()).unwrap();
        assert_eq!(u, r);
    }

    #[test]
    fn restrict_commutes_with_sampling() {
        let d = DomainSpec::new(vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let g = Grid::from_domain(&d, 0.25).unwrap();
        let u = sample(&gaussian(), &g).unwrap();
        let sub = DomainSpec::new(vec![(-0.5, 0.75), (0.0, 1.0)]).unwrap();
        let a = u.restrict(&sub).unwrap();
        let b = sample(&gaussian(), &Grid::from_domain(&sub, 0.25).unwrap()).unwrap();
        assert_eq!(a.grid(), b.grid());
        // Bit-exact agreement between restrict-then-nothing and resample.
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
        }
    }

    #[test]
    fn restrict_outside_extent_fails() {
        let g = Grid::line(0.0, 0.5, 5).unwrap();
        let u = sample(&gaussian(), &g).unwrap();
        assert!(matches!(
            u.restrict(&DomainSpec::interval(3.0, 4.0).unwrap()),
            Err(Error::DomainNotCovered { .. })
        ));
    }

    #[test]
    fn boundary_ring_sees_the_outermost_cells() {
        let g = Grid::line(0.0, 1.0, 6).unwrap();
        let mut u = sample(&ClosedForm::new("c", CorpusKind::Constant { c: 0.0 }).unwrap(), &g).unwrap();
        u.values_mut()[1] = Complex64::new(0.5, 0.0);
        assert_eq!(u.max_abs_on_boundary_ring(1), 0.0);
        assert_eq!(u.max_abs_on_boundary_ring(2), 0.5);
        let (point, value) = u.boundary_ring_violation(2, 0.0).unwrap();
        assert_eq!(point, vec![1.0]);
        assert_eq!(value, 0.5);
    }

    #[test]
    fn ring_in_two_dimensions_wraps_all_four_sides() {
        let d = DomainSpec::new(vec![(0.0, 4.0), (0.0, 4.0)]).unwrap();
        let g = Grid::from_domain(&d, 1.0).unwrap();
        let bump = ClosedForm::bump(2.0, 1.5).unwrap(); // centered at (2,2)
        let u = sample(&bump, &g).unwrap();
        // Support radius 1.5 around (2,2) leaves the width-1 ring at zero.
        assert_eq!(u.max_abs_on_boundary_ring(1), 0.0);
        assert!(u.max_abs_on_boundary_ring(2) > 0.0);
    }

    #[test]
    fn value_length_must_match_grid() {
        let g = Grid::line(0.0, 1.0, 4).unwrap();
        assert!(SampledFunction::from_values(g, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn coarsening_keeps_every_other_sample() {
        let g = Grid::line(-1.0, 0.25, 9).unwrap();
        let u = sample(&gaussian(), &g).unwrap();
        let c = u.coarsen_by_two();
        assert_eq!(c.grid().len(), 5);
        assert_eq!(c.grid().spacing(), 0.5);
        for ci in 0..c.grid().len() {
            assert_eq!(c.values()[ci], u.values()[2 * ci]);
        }
    }
}
