use serde::{Deserialize, Serialize};

use super::domain::{BoundaryMode, Domain};
use crate::error::{Error, Result};

/// Grid of `m`-component real vectors, components interleaved last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    shape: Vec<usize>,
    m: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(domain: &Domain, m: usize) -> Self {
        assert!(m >= 1, "codomain dimension must be positive");
        Field {
            shape: domain.resolution().to_vec(),
            m,
            values: vec![0.0; domain.num_points() * m],
        }
    }

    pub fn constant(domain: &Domain, value: &[f64]) -> Self {
        let m = value.len();
        let mut f = Field::zeros(domain, m);
        for chunk in f.values.chunks_exact_mut(m) {
            chunk.copy_from_slice(value);
        }
        f
    }

    /// Samples `g(x, out)` at every grid point.
    pub fn from_fn<G>(domain: &Domain, m: usize, g: G) -> Self
    where
        G: Fn(&[f64], &mut [f64]),
    {
        let mut f = Field::zeros(domain, m);
        let d = domain.dim();
        for (p, out) in f.values.chunks_exact_mut(m).enumerate() {
            let x = domain.coords(p);
            g(&x[..d], out);
        }
        f
    }

    pub fn from_values(domain: &Domain, m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || values.len() != domain.num_points() * m {
            return Err(Error::GridMismatch {
                expected: domain.resolution().to_vec(),
                expected_m: m,
                found: vec![values.len()],
                found_m: m,
            });
        }
        Ok(Field {
            shape: domain.resolution().to_vec(),
            m,
            values,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn num_points(&self) -> usize {
        self.values.len() / self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn point(&self, p: usize) -> &[f64] {
        &self.values[p * self.m..(p + 1) * self.m]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.m)
    }

    pub fn check_on(&self, domain: &Domain) -> Result<()> {
        if self.shape != domain.resolution() {
            return Err(Error::GridMismatch {
                expected: domain.resolution().to_vec(),
                expected_m: self.m,
                found: self.shape.clone(),
                found_m: self.m,
            });
        }
        Ok(())
    }

    pub fn check_same(&self, other: &Field) -> Result<()> {
        if self.shape != other.shape || self.m != other.m {
            return Err(Error::GridMismatch {
                expected: self.shape.clone(),
                expected_m: self.m,
                found: other.shape.clone(),
                found_m: other.m,
            });
        }
        Ok(())
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &Field) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.values {
            *a *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Field {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    pub fn difference(&self, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.axpy(-1.0, other);
        Ok(out)
    }

    /// Largest Euclidean norm over grid points.
    pub fn max_norm(&self) -> f64 {
        self.points()
            .map(|y| y.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest absolute value at grid points outside Ω.
    pub fn exterior_max(&self, domain: &Domain) -> f64 {
        self.points()
            .zip(domain.interior_mask())
            .filter(|(_, &inside)| !inside)
            .flat_map(|(y, _)| y.iter().map(|c| c.abs()))
            .fold(0.0, f64::max)
    }
}

/// Rectangle-rule L² inner product over the computational grid.
pub fn inner(domain: &Domain, f: &Field, g: &Field) -> Result<f64> {
    f.check_on(domain)?;
    f.check_same(g)?;
    let sum: f64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum();
    Ok(sum * domain.cell_volume())
}

/// √(Σ|f|² · Πh). Fields in H̃ˢ(Ω) vanish on the collar, so this is the
/// L²(Ω) norm.
pub fn l2_norm(domain: &Domain, f: &Field) -> Result<f64> {
    f.check_on(domain)?;
    let sum: f64 = f.values.iter().map(|a| a * a).sum();
    Ok((sum * domain.cell_volume()).sqrt())
}

/// Zeroes every grid value outside Ω.
pub fn mask_exterior(domain: &Domain, f: &Field) -> Result<Field> {
    let mut out = f.clone();
    mask_exterior_in_place(domain, &mut out)?;
    Ok(out)
}

pub fn mask_exterior_in_place(domain: &Domain, f: &mut Field) -> Result<()> {
    if domain.mode() != BoundaryMode::ExteriorDirichlet {
        return Err(Error::WrongMode {
            required: BoundaryMode::ExteriorDirichlet.name(),
            actual: domain.mode().name(),
        });
    }
    f.check_on(domain)?;
    let m = f.m;
    for (chunk, &inside) in f.values.chunks_exact_mut(m).zip(domain.interior_mask()) {
        if !inside {
            chunk.fill(0.0);
        }
    }
    Ok(())
}
