//! Ginzburg-Landau minimization of the representation field: MBO iterations,
//! canonical harmonic maps for prescribed singularities, the energy and a
//! direct gradient-descent minimizer for comparison.

mod canonical;
mod direct;
mod mbo;

use num_complex::Complex;

pub use canonical::{canonical_harmonic_map, CanonicalOptions, PrescribedSingularity, SingularityConfig};
pub use direct::{direct_minimize_gl, gl_gradient, DirectParams, DirectResult};
pub use mbo::{harmonic_initialization, mbo_minimize, IterationRecord, MboParams, MboResult};

use crate::fem::FemSystem;
use crate::mesh::{BoundaryCondition, TriMesh};
use crate::{Error, Real, Result};

/// Nodal values of `u = e^{4 i theta}` on a mesh.
#[derive(Clone, Debug)]
pub struct RepresentationField<'m, T> {
    mesh: &'m TriMesh<T>,
    values: Vec<Complex<T>>,
}

impl<'m, T: Real> RepresentationField<'m, T> {
    pub fn new(mesh: &'m TriMesh<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::Dimension { expected: mesh.num_vertices(), got: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("field has non-finite values".into()));
        }
        Ok(Self { mesh, values })
    }

    pub fn mesh(&self) -> &'m TriMesh<T> {
        self.mesh
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn value(&self, v: usize) -> Complex<T> {
        self.values[v]
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Largest deviation of `|u|` from 1.
    pub fn max_modulus_defect(&self) -> T {
        self.values.iter().map(|z| (z.norm() - T::one()).abs()).fold(T::zero(), T::max)
    }
}

/// Outcome of pointwise normalization.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Normalized<T> {
    pub values: Vec<Complex<T>>,
    /// Nodes whose value was too small to normalize and received a fixed nudge.
    pub perturbed: Vec<usize>,
}

/// Projects every value onto the unit circle. Values of modulus below `1e-14`
/// are first nudged by `1e-12` in a direction that depends only on the node id.
pub fn normalize_field<T: Real>(u: &[Complex<T>]) -> Normalized<T> {
    let tiny = T::lit(1e-14);
    let nudge = T::lit(1e-12);
    let golden = T::lit(2.399_963_229_728_653);
    let mut perturbed = Vec::new();
    let values = u
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let mut z = z;
            if z.norm() < tiny {
                perturbed.push(i);
                z += Complex::from_polar(nudge, golden * T::from_usize_lossy(i));
            }
            z / z.norm()
        })
        .collect();
    Normalized { values, perturbed }
}

/// Energy split into the Dirichlet term and the potential term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlEnergy<T> {
    pub dirichlet: T,
    pub penalty: T,
}

impl<T: Real> GlEnergy<T> {
    pub fn total(&self) -> T {
        self.dirichlet + self.penalty
    }
}

/// `1/2 u^H K u + 1/(4 eps^2) sum_i m_i (|u_i|^2 - 1)^2`.
pub fn gl_energy<T: Real>(fem: &FemSystem<T>, u: &[Complex<T>], eps: T) -> Result<GlEnergy<T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if u.len() != fem.mass.len() {
        return Err(Error::Dimension { expected: fem.mass.len(), got: u.len() });
    }
    Ok(GlEnergy { dirichlet: dirichlet_energy(fem, u), penalty: penalty_energy(fem, u, eps) })
}

pub fn dirichlet_energy<T: Real>(fem: &FemSystem<T>, u: &[Complex<T>]) -> T {
    let re: Vec<T> = u.iter().map(|z| z.re).collect();
    let im: Vec<T> = u.iter().map(|z| z.im).collect();
    (fem.stiffness.quadratic_form(&re) + fem.stiffness.quadratic_form(&im)) * T::lit(0.5)
}

fn penalty_energy<T: Real>(fem: &FemSystem<T>, u: &[Complex<T>], eps: T) -> T {
    let c = T::one() / (T::lit(4.0) * eps * eps);
    u.iter().zip(&fem.mass).map(|(z, m)| {
        let d = z.norm_sqr() - T::one();
        *m * d * d
    }).sum::<T>() * c
}

/// Default penalty width: twice the mean edge length.
pub fn default_eps<T: Real>(mesh: &TriMesh<T>) -> T {
    mesh.mean_edge_length() * T::lit(2.0)
}

/// Checks that the boundary entries of `u` agree with the boundary condition.
pub(crate) fn check_boundary<T: Real>(mesh: &TriMesh<T>, bc: &BoundaryCondition<T>, u: &[Complex<T>]) -> Result<()> {
    if u.len() != mesh.num_vertices() {
        return Err(Error::Dimension { expected: mesh.num_vertices(), got: u.len() });
    }
    for (v, g) in bc.values().iter().enumerate() {
        if let Some(g) = g {
            if (u[v] - g).norm() > T::lit(1e-6) {
                return Err(Error::InvalidParameter(format!("initial field disagrees with boundary data at vertex {v}")));
            }
        }
    }
    Ok(())
}
