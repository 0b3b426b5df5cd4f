use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the computational box relates to the physical domain Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Ω = (0, a₁) × … embedded in a larger periodic box; fields vanish on
    /// the collar outside Ω.
    ExteriorDirichlet,
    /// One-dimensional interval with homogeneous Neumann conditions,
    /// discretized on cell centers in the cosine eigenbasis.
    Neumann1d,
    /// Plain periodic box, Ω equal to the box.
    Periodic,
}

impl BoundaryMode {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryMode::ExteriorDirichlet => "exterior-dirichlet",
            BoundaryMode::Neumann1d => "neumann-1d",
            BoundaryMode::Periodic => "periodic",
        }
    }
}

/// Uniform grid over the computational box together with the fractional
/// order of the operator that lives on it.
///
/// Layout is row-major with axis order (x₁, …, x_d). Grid point `j` on axis
/// `i` sits at `j·h_i` (periodic and exterior modes) or `(j + ½)·h` on the
/// Neumann interval.
#[derive(Debug, Clone)]
pub struct Domain {
    d: usize,
    s: f64,
    omega_extent: Vec<f64>,
    pad_factor: f64,
    n: Vec<usize>,
    mode: BoundaryMode,
    box_extent: Vec<f64>,
    spacing: Vec<f64>,
    interior: Arc<[bool]>,
}

impl Domain {
    pub fn new(
        d: usize,
        s: f64,
        omega_extent: Vec<f64>,
        pad_factor: f64,
        n: Vec<usize>,
        mode: BoundaryMode,
    ) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidDomain(format!(
                "dimension must be 1, 2 or 3, got {d}"
            )));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NonPositiveOrder(s));
        }
        if omega_extent.len() != d || n.len() != d {
            return Err(Error::InvalidDomain(format!(
                "expected {d} extents and {d} resolutions, got {} and {}",
                omega_extent.len(),
                n.len()
            )));
        }
        if let Some(a) = omega_extent.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidDomain(format!("extent {a} is not positive")));
        }
        if let Some(k) = n.iter().find(|&&k| k < 2 || k % 2 != 0) {
            return Err(Error::InvalidDomain(format!(
                "grid points per axis must be even and >= 2, got {k}"
            )));
        }
        if !(pad_factor >= 1.0) || !pad_factor.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "pad factor must be >= 1, got {pad_factor}"
            )));
        }
        match mode {
            BoundaryMode::ExteriorDirichlet => {
                if pad_factor <= 1.0 {
                    return Err(Error::InvalidDomain(
                        "exterior-dirichlet mode needs pad factor > 1 for a nonempty collar".into(),
                    ));
                }
            }
            BoundaryMode::Neumann1d => {
                if d != 1 || s != 1.0 {
                    return Err(Error::InvalidDomain(format!(
                        "neumann-1d mode requires d = 1 and s = 1, got d = {d}, s = {s}"
                    )));
                }
                if pad_factor != 1.0 {
                    return Err(Error::InvalidDomain(
                        "neumann-1d mode has no padding (pad factor must be 1)".into(),
                    ));
                }
            }
            BoundaryMode::Periodic => {
                if pad_factor != 1.0 {
                    return Err(Error::InvalidDomain(
                        "periodic mode has no padding (pad factor must be 1)".into(),
                    ));
                }
            }
        }

        let box_extent: Vec<f64> = omega_extent.iter().map(|a| a * pad_factor).collect();
        let spacing: Vec<f64> = box_extent
            .iter()
            .zip(&n)
            .map(|(l, &k)| l / k as f64)
            .collect();

        let mut domain = Domain {
            d,
            s,
            omega_extent,
            pad_factor,
            n,
            mode,
            box_extent,
            spacing,
            interior: Arc::from(Vec::new()),
        };
        let interior: Vec<bool> = (0..domain.num_points())
            .map(|p| domain.point_in_omega(p))
            .collect();
        if !interior.iter().any(|&b| b) {
            return Err(Error::InvalidDomain(
                "no grid point falls strictly inside the domain".into(),
            ));
        }
        domain.interior = Arc::from(interior);
        Ok(domain)
    }

    /// Periodic box `[0, L₁) × …` with no exterior.
    pub fn periodic(s: f64, box_extent: Vec<f64>, n: Vec<usize>) -> Result<Self> {
        let d = box_extent.len();
        Domain::new(d, s, box_extent, 1.0, n, BoundaryMode::Periodic)
    }

    /// Ω = (0, a₁) × … inside a periodic box `pad_factor` times larger.
    pub fn exterior(s: f64, omega_extent: Vec<f64>, pad_factor: f64, n: Vec<usize>) -> Result<Self> {
        let d = omega_extent.len();
        Domain::new(d, s, omega_extent, pad_factor, n, BoundaryMode::ExteriorDirichlet)
    }

    /// Neumann interval (0, length) with `n` cells and s = 1.
    pub fn neumann_1d(length: f64, n: usize) -> Result<Self> {
        Domain::new(1, 1.0, vec![length], 1.0, vec![n], BoundaryMode::Neumann1d)
    }

    /// Same grid with a different fractional order.
    pub fn with_order(&self, s: f64) -> Result<Self> {
        Domain::new(
            self.d,
            s,
            self.omega_extent.clone(),
            self.pad_factor,
            self.n.clone(),
            self.mode,
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn omega_extent(&self) -> &[f64] {
        &self.omega_extent
    }

    pub fn pad_factor(&self) -> f64 {
        self.pad_factor
    }

    pub fn resolution(&self) -> &[usize] {
        &self.n
    }

    pub fn box_extent(&self) -> &[f64] {
        &self.box_extent
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn num_points(&self) -> usize {
        self.n.iter().product()
    }

    /// Volume element of the rectangle rule.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Lebesgue measure of Ω.
    pub fn omega_measure(&self) -> f64 {
        self.omega_extent.iter().product()
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn is_interior(&self, point: usize) -> bool {
        self.interior[point]
    }

    /// Multi-index of a flat point index.
    pub fn multi_index(&self, point: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = point;
        for axis in (0..self.d).rev() {
            idx[axis] = rem % self.n[axis];
            rem /= self.n[axis];
        }
        idx
    }

    /// Physical coordinates of a grid point (unused axes are zero).
    pub fn coords(&self, point: usize) -> [f64; 3] {
        let idx = self.multi_index(point);
        let offset = if self.mode == BoundaryMode::Neumann1d { 0.5 } else { 0.0 };
        let mut x = [0.0; 3];
        for axis in 0..self.d {
            x[axis] = (idx[axis] as f64 + offset) * self.spacing[axis];
        }
        x
    }

    fn point_in_omega(&self, point: usize) -> bool {
        match self.mode {
            BoundaryMode::Periodic | BoundaryMode::Neumann1d => true,
            BoundaryMode::ExteriorDirichlet => {
                let x = self.coords(point);
                (0..self.d).all(|axis| {
                    let guard = 1e-9 * self.spacing[axis];
                    x[axis] > guard && x[axis] < self.omega_extent[axis] - guard
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_interior_count() {
        let dom = Domain::exterior(1.0, vec![1.0], 2.0, vec![16]).unwrap();
        assert_eq!(dom.spacing(), &[0.125]);
        // x = 0.125 .. 0.875 strictly inside (0, 1)
        let inside = dom.interior_mask().iter().filter(|&&b| b).count();
        assert_eq!(inside, 7);
        assert!(!dom.is_interior(0));
        assert!(!dom.is_interior(8));
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(matches!(
            Domain::exterior(-1.0, vec![1.0], 2.0, vec![16]),
            Err(Error::NonPositiveOrder(_))
        ));
        assert!(Domain::exterior(1.0, vec![1.0], 1.0, vec![16]).is_err());
        assert!(Domain::exterior(1.0, vec![1.0], 2.0, vec![15]).is_err());
        assert!(Domain::new(1, 0.5, vec![1.0], 1.0, vec![16], BoundaryMode::Neumann1d).is_err());
        assert!(Domain::new(2, 1.0, vec![1.0, 1.0], 1.0, vec![8, 8], BoundaryMode::Neumann1d).is_err());
        assert!(Domain::periodic(1.0, vec![1.0; 4], vec![4; 4]).is_err());
    }

    #[test]
    fn row_major_multi_index() {
        let dom = Domain::periodic(1.0, vec![1.0, 2.0], vec![4, 8]).unwrap();
        assert_eq!(dom.multi_index(9), [1, 1, 0]);
        let x = dom.coords(9);
        assert_eq!(x[0], 0.25);
        assert_eq!(x[1], 0.25);
    }

    #[test]
    fn neumann_grid_is_cell_centered() {
        let dom = Domain::neumann_1d(1.0, 4).unwrap();
        assert_eq!(dom.coords(0)[0], 0.125);
        assert_eq!(dom.coords(3)[0], 0.875);
        assert_eq!(dom.cell_volume() * 4.0, 1.0);
    }
}
