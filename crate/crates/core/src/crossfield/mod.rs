//! Cross fields read from the representation field: sampling, singularities,
//! separatrix directions and index bookkeeping.

mod index;
mod singularity;

use num_complex::Complex;

pub use index::{
    boundary_sector_rotation, even_split_sector_index, poincare_hopf_check, sector_index, singular_sector_rotation, PoincareHopf,
};
pub use singularity::{
    boundary_separatrix_directions, detect_singularities, face_windings, locate_zero_in_face,
    separatrix_directions, separatrix_directions_from, BoundarySingularityInfo, Singularity,
};

use crate::gl::RepresentationField;
use crate::mesh::{wrap_positive, Point2, TriMesh};
use crate::{Error, Real, Result};

/// The four directions of the cross at a point, ascending in `[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossSample<T> {
    pub location: Point2<T>,
    pub directions: [T; 4],
}

/// Four directions from a representation value `u = e^{4 i theta}`.
pub fn cross_directions<T: Real>(u: Complex<T>) -> [T; 4] {
    let base = wrap_positive(u.arg() / T::lit(4.0));
    let q = T::FRAC_PI_2();
    let mut d = [T::zero(); 4];
    for (k, slot) in d.iter_mut().enumerate() {
        *slot = wrap_positive(base + q * T::from_usize_lossy(k));
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    d
}

/// Representation field with cached face windings, ready for sampling.
#[derive(Clone, Debug)]
pub struct CrossField<'m, T> {
    field: RepresentationField<'m, T>,
    windings: Vec<i32>,
}

impl<'m, T: Real> CrossField<'m, T> {
    pub fn new(field: RepresentationField<'m, T>) -> Self {
        let windings = face_windings(&field);
        Self { field, windings }
    }

    pub fn field(&self) -> &RepresentationField<'m, T> {
        &self.field
    }

    pub fn mesh(&self) -> &'m TriMesh<T> {
        self.field.mesh()
    }

    pub fn windings(&self) -> &[i32] {
        &self.windings
    }

    /// Linearly interpolated representation value, or `None` outside the mesh.
    pub fn interpolate(&self, p: Point2<T>) -> Option<(usize, Complex<T>)> {
        let loc = self.mesh().locate(p)?;
        let t = self.mesh().triangles()[loc.triangle];
        let mut z = Complex::new(T::zero(), T::zero());
        for k in 0..3 {
            z += self.field.value(t[k]) * loc.bary[k];
        }
        Some((loc.triangle, z))
    }

    /// Cross directions at `p`. Fails outside the mesh, inside faces that carry
    /// winding and where the interpolant vanishes.
    pub fn sample_cross(&self, p: Point2<T>) -> Result<CrossSample<T>> {
        let (f, z) = self.interpolate(p).ok_or(Error::OutsideMesh)?;
        if self.windings[f] != 0 || z.norm() < T::lit(1e-12) {
            return Err(Error::NearSingularity);
        }
        Ok(CrossSample { location: p, directions: cross_directions(z) })
    }

    /// Unit cross direction at `p` closest to `reference`.
    pub fn branch_towards(&self, p: Point2<T>, reference: Point2<T>) -> Result<(Point2<T>, T)> {
        let s = self.sample_cross(p)?;
        let mut best = (Point2::polar(s.directions[0]), -T::infinity());
        for &a in &s.directions {
            let d = Point2::polar(a);
            let c = d.dot(reference);
            if c > best.1 {
                best = (d, c);
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn directions_of_constant_field() {
        let d = cross_directions(Complex::new(0.0f64, 1.0));
        for (k, a) in d.iter().enumerate() {
            assert!((a - (PI / 8.0 + k as f64 * PI / 2.0)).abs() < 1e-12);
        }
        let d = cross_directions(Complex::new(1.0f64, 0.0));
        assert!(d[0].abs() < 1e-12 && (d[1] - PI / 2.0).abs() < 1e-12);
    }
}
