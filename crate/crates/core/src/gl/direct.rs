use std::collections::VecDeque;

use log::{debug, warn};
use num_complex::Complex;

use super::{check_boundary, gl_energy, normalize_field, RepresentationField};
use crate::fem::{estimate_lambda1, CsrMatrix, Cholesky, DirichletSolver, FemSystem, NodeSplit};
use crate::mesh::{BoundaryCondition, TriMesh};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectParams<T> {
    /// Stop once the update norm is at most `2 n delta` (n interior nodes).
    pub delta: T,
    pub max_iter: usize,
    /// Sufficient decrease constant of the backtracking line search.
    pub armijo: T,
    /// Number of stored curvature pairs; 0 gives preconditioned steepest descent.
    pub memory: usize,
    /// The preconditioner is `M + (tau_scale / lambda_1) K` on interior nodes.
    pub tau_scale: T,
}

impl<T: Real> Default for DirectParams<T> {
    fn default() -> Self {
        Self { delta: T::lit(1e-8), max_iter: 20_000, armijo: T::lit(1e-4), memory: 8, tau_scale: T::one() }
    }
}

#[derive(Clone, Debug)]
pub struct DirectResult<'m, T> {
    /// Minimizer projected to unit modulus.
    pub field: RepresentationField<'m, T>,
    /// Minimizer as computed (not unit modulus).
    pub raw: Vec<Complex<T>>,
    pub iterations: usize,
    pub converged: bool,
    pub line_search_failed: bool,
    /// Total energy after each accepted step, starting with the initial value.
    pub energy_trace: Vec<T>,
}

/// Gradient of the energy with respect to the real and imaginary parts of
/// each node value; boundary entries are zero.
pub fn gl_gradient<T: Real>(mesh: &TriMesh<T>, fem: &FemSystem<T>, u: &[Complex<T>], eps: T) -> Vec<Complex<T>> {
    let re: Vec<T> = u.iter().map(|z| z.re).collect();
    let im: Vec<T> = u.iter().map(|z| z.im).collect();
    let kr = fem.stiffness.mul_vec(&re);
    let ki = fem.stiffness.mul_vec(&im);
    let c = T::one() / (eps * eps);
    (0..u.len())
        .map(|v| {
            if mesh.is_boundary(v) {
                return Complex::new(T::zero(), T::zero());
            }
            let s = c * fem.mass[v] * (u[v].norm_sqr() - T::one());
            Complex::new(kr[v] + s * u[v].re, ki[v] + s * u[v].im)
        })
        .collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Minimizes the Ginzburg-Landau energy directly with a preconditioned
/// limited-memory quasi-Newton method and Armijo backtracking.
pub fn direct_minimize_gl<'m, T: Real>(
    mesh: &'m TriMesh<T>,
    fem: &FemSystem<T>,
    bc: &BoundaryCondition<T>,
    eps: T,
    init: Vec<Complex<T>>,
    params: &DirectParams<T>,
) -> Result<DirectResult<'m, T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    check_boundary(mesh, bc, &init)?;
    let split = NodeSplit::new(mesh);
    let ni = split.len();
    let solver = DirichletSolver::new(mesh, fem)?;
    let tau = params.tau_scale / estimate_lambda1(&solver)?;
    let precond = Cholesky::factor(&CsrMatrix::diagonal(ni, &solver.m_ii).add_scaled(tau, &solver.k_ii))?;

    // Unknowns: interior real parts followed by interior imaginary parts.
    let pack = |g: &[Complex<T>]| -> Vec<T> {
        split.interior.iter().map(|&v| g[v].re).chain(split.interior.iter().map(|&v| g[v].im)).collect()
    };
    let apply_precond = |g: &[T]| -> Vec<T> {
        let mut out = precond.solve(&g[..ni]);
        out.extend(precond.solve(&g[ni..]));
        out
    };
    let energy = |u: &[Complex<T>]| gl_energy(fem, u, eps).map(|e| e.total());
    let moved = |u: &[Complex<T>], d: &[T], a: T| -> Vec<Complex<T>> {
        let mut w = u.to_vec();
        for (i, &v) in split.interior.iter().enumerate() {
            w[v] += Complex::new(a * d[i], a * d[ni + i]);
        }
        w
    };

    let threshold = T::lit(2.0) * T::from_usize_lossy(ni) * params.delta;
    let mut u = init;
    let mut e = energy(&u)?;
    let mut g = pack(&gl_gradient(mesh, fem, &u, eps));
    let mut history: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::new();
    let mut trace = vec![e];
    let mut converged = false;
    let mut failed = false;
    let mut iterations = 0;
    for it in 1..=params.max_iter {
        // Two-loop recursion with the preconditioner as initial inverse Hessian.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = *rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * *yi;
            }
            alphas.push(a);
        }
        let mut r = apply_precond(&q);
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = *rho * dot(y, &r);
            for (ri, si) in r.iter_mut().zip(s) {
                *ri += (a - b) * *si;
            }
        }
        let mut d: Vec<T> = r.into_iter().map(|x| -x).collect();
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            history.clear();
            d = apply_precond(&g).into_iter().map(|x| -x).collect();
            slope = dot(&g, &d);
        }
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let trial = moved(&u, &d, step);
            let et = energy(&trial)?;
            if et <= e + params.armijo * step * slope {
                accepted = Some((trial, et));
                break;
            }
            step *= T::lit(0.5);
        }
        iterations = it;
        let Some((next, en)) = accepted else {
            warn!("line search failed at iteration {it}");
            failed = true;
            break;
        };
        let g_next = pack(&gl_gradient(mesh, fem, &next, eps));
        let s: Vec<T> = d.iter().map(|x| *x * step).collect();
        let y: Vec<T> = g_next.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        if params.memory > 0 && sy > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            history.push_back((s.clone(), y, T::one() / sy));
            if history.len() > params.memory {
                history.pop_front();
            }
        }
        let change = dot(&s, &s).sqrt();
        debug!("direct iteration {it}: energy {en}, change {change}");
        u = next;
        e = en;
        g = g_next;
        trace.push(e);
        if change <= threshold {
            converged = true;
            break;
        }
    }
    let normalized = normalize_field(&u).values;
    Ok(DirectResult {
        field: RepresentationField::new(mesh, normalized)?,
        raw: u,
        iterations,
        converged,
        line_search_failed: failed,
        energy_trace: trace,
    })
}
