use log::{debug, info};
use num_complex::Complex;

use super::{check_boundary, dirichlet_energy, normalize_field, RepresentationField};
use crate::fem::{estimate_lambda1, DiffusionOperator, DirichletSolver, FemSystem};
use crate::mesh::{BoundaryCondition, TriMesh};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MboParams<T> {
    /// The time step is `tau_scale / lambda_1`.
    pub tau_scale: T,
    /// Stop once the update norm is at most `2 n delta` (n interior nodes).
    pub delta: T,
    pub max_iter: usize,
}

impl<T: Real> Default for MboParams<T> {
    fn default() -> Self {
        Self { tau_scale: T::one(), delta: T::lit(1e-4), max_iter: 10_000 }
    }
}

impl<T: Real> MboParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_scale > T::zero()) || !self.tau_scale.is_finite() {
            return Err(Error::InvalidParameter(format!("tau scale must be positive, got {}", self.tau_scale)));
        }
        if !(self.delta > T::zero()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub change: T,
    pub dirichlet: T,
}

#[derive(Clone, Debug)]
pub struct MboResult<'m, T> {
    pub field: RepresentationField<'m, T>,
    pub iterations: usize,
    pub converged: bool,
    pub tau: T,
    pub lambda1: T,
    pub threshold: T,
    pub trace: Vec<IterationRecord<T>>,
    /// Nodes that needed a nudge during normalization, over all iterations.
    pub perturbed: Vec<usize>,
}

/// Normalized harmonic extension of the boundary data.
pub fn harmonic_initialization<T: Real>(
    solver: &DirichletSolver<T>,
    bc: &BoundaryCondition<T>,
) -> Vec<Complex<T>> {
    let mut u = normalize_field(&solver.solve(&bc.dense())).values;
    for (v, g) in bc.values().iter().enumerate() {
        if let Some(g) = g {
            u[v] = *g;
        }
    }
    u
}

/// Alternates backward Euler diffusion with pointwise normalization until the
/// update is small. Non-convergence is reported through `converged`, with the
/// last iterate returned.
pub fn mbo_minimize<'m, T: Real>(
    mesh: &'m TriMesh<T>,
    fem: &FemSystem<T>,
    bc: &BoundaryCondition<T>,
    params: &MboParams<T>,
    init: Vec<Complex<T>>,
) -> Result<MboResult<'m, T>> {
    params.validate()?;
    check_boundary(mesh, bc, &init)?;
    if init.iter().any(|z| (z.norm() - T::one()).abs() > T::lit(1e-6)) {
        return Err(Error::InvalidParameter("initial field must have unit modulus".into()));
    }
    let solver = DirichletSolver::new(mesh, fem)?;
    let lambda1 = estimate_lambda1(&solver)?;
    let tau = params.tau_scale / lambda1;
    let op = DiffusionOperator::new(mesh, fem, tau)?;
    let n = op.split().len();
    let threshold = T::lit(2.0) * T::from_usize_lossy(n) * params.delta;
    info!("MBO: lambda1 = {lambda1}, tau = {tau}, threshold = {threshold}");

    let mut u = init;
    let mut trace = Vec::new();
    let mut perturbed = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=params.max_iter {
        let v = op.step(&u, bc);
        let mut next = normalize_field(&v);
        for (i, g) in bc.values().iter().enumerate() {
            if let Some(g) = g {
                next.values[i] = *g;
            }
        }
        perturbed.extend(next.perturbed.iter().copied());
        let change = u
            .iter()
            .zip(&next.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<T>()
            .sqrt();
        u = next.values;
        let dirichlet = dirichlet_energy(fem, &u);
        debug!("MBO iteration {it}: change {change}, dirichlet {dirichlet}");
        trace.push(IterationRecord { iteration: it, change, dirichlet });
        iterations = it;
        if change <= threshold {
            converged = true;
            break;
        }
    }
    perturbed.sort_unstable();
    perturbed.dedup();
    Ok(MboResult {
        field: RepresentationField::new(mesh, u)?,
        iterations,
        converged,
        tau,
        lambda1,
        threshold,
        trace,
        perturbed,
    })
}
