//! Linear finite elements: stiffness and lumped mass, Dirichlet solves,
//! backward Euler diffusion and the first Dirichlet eigenvalue.

mod cholesky;
mod sparse;

use num_complex::Complex;

pub use cholesky::{rcm_ordering, Cholesky};
pub use sparse::CsrMatrix;

use crate::mesh::{BoundaryCondition, TriMesh};
use crate::{Error, Real, Result};

/// Stiffness matrix and lumped mass diagonal of a mesh.
#[derive(Clone, Debug)]
pub struct FemSystem<T> {
    pub stiffness: CsrMatrix<T>,
    pub mass: Vec<T>,
}

/// Assembles the P1 stiffness matrix and the lumped mass (a third of the
/// adjacent triangle areas per node).
pub fn assemble<T: Real>(mesh: &TriMesh<T>) -> Result<FemSystem<T>> {
    let n = mesh.num_vertices();
    let mean_area = mesh.area() / T::from_usize_lossy(mesh.num_triangles());
    let mut trip = Vec::with_capacity(9 * mesh.num_triangles());
    let mut mass = vec![T::zero(); n];
    let third = T::one() / T::lit(3.0);
    for (f, t) in mesh.triangles().iter().enumerate() {
        let p = mesh.triangle_points(f);
        let area = mesh.triangle_area(f);
        if !(area > T::lit(1e-14) * mean_area) {
            return Err(Error::DegenerateTriangle(f));
        }
        let two_a = area + area;
        let grad = |i: usize| {
            let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            ((a.y - b.y) / two_a, (b.x - a.x) / two_a)
        };
        let g = [grad(0), grad(1), grad(2)];
        for i in 0..3 {
            mass[t[i]] += area * third;
            for j in 0..3 {
                trip.push((t[i], t[j], area * (g[i].0 * g[j].0 + g[i].1 * g[j].1)));
            }
        }
    }
    Ok(FemSystem { stiffness: CsrMatrix::from_triplets(n, n, trip), mass })
}

/// Values a Dirichlet problem can be solved for: reals or complex numbers.
pub trait NodeValue<T: Real>: Copy {
    const PARTS: usize;
    fn part(&self, k: usize) -> T;
    fn from_parts(parts: &[T]) -> Self;
}

impl<T: Real> NodeValue<T> for T {
    const PARTS: usize = 1;
    fn part(&self, _: usize) -> T {
        *self
    }
    fn from_parts(parts: &[T]) -> Self {
        parts[0]
    }
}

impl<T: Real> NodeValue<T> for Complex<T> {
    const PARTS: usize = 2;
    fn part(&self, k: usize) -> T {
        if k == 0 {
            self.re
        } else {
            self.im
        }
    }
    fn from_parts(parts: &[T]) -> Self {
        Complex::new(parts[0], parts[1])
    }
}

/// Interior / boundary split of the node set.
#[derive(Clone, Debug)]
pub struct NodeSplit {
    pub interior: Vec<usize>,
    pub local: Vec<Option<usize>>,
    pub boundary_cols: Vec<Option<usize>>,
}

impl NodeSplit {
    pub fn new<T: Real>(mesh: &TriMesh<T>) -> Self {
        let interior = mesh.interior_vertices();
        let mut local = vec![None; mesh.num_vertices()];
        for (i, &v) in interior.iter().enumerate() {
            local[v] = Some(i);
        }
        let boundary_cols = (0..mesh.num_vertices())
            .map(|v| if mesh.is_boundary(v) { Some(v) } else { None })
            .collect();
        Self { interior, local, boundary_cols }
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }
}

/// Factored interior stiffness block for Laplace problems with Dirichlet data.
#[derive(Clone, Debug)]
pub struct DirichletSolver<T> {
    pub split: NodeSplit,
    pub k_ii: CsrMatrix<T>,
    pub k_ib: CsrMatrix<T>,
    pub m_ii: Vec<T>,
    factor: Cholesky<T>,
}

impl<T: Real> DirichletSolver<T> {
    pub fn new(mesh: &TriMesh<T>, fem: &FemSystem<T>) -> Result<Self> {
        let split = NodeSplit::new(mesh);
        let n = mesh.num_vertices();
        let ni = split.len();
        let k_ii = fem.stiffness.submatrix(&split.local, &split.local, ni, ni);
        let k_ib = fem.stiffness.submatrix(&split.local, &split.boundary_cols, ni, n);
        let m_ii = split.interior.iter().map(|&v| fem.mass[v]).collect();
        let factor = Cholesky::factor(&k_ii)?;
        Ok(Self { split, k_ii, k_ib, m_ii, factor })
    }

    /// Solves `K_II x = rhs` on interior nodes.
    pub fn solve_interior(&self, rhs: &[T]) -> Vec<T> {
        self.factor.solve(rhs)
    }

    /// Harmonic extension of boundary values given on a full-length vector
    /// (interior entries are ignored).
    pub fn solve<V: NodeValue<T>>(&self, values: &[V]) -> Vec<V> {
        let mut out = values.to_vec();
        let mut parts = vec![Vec::new(); V::PARTS];
        for (k, slot) in parts.iter_mut().enumerate() {
            let g: Vec<T> = values.iter().map(|v| v.part(k)).collect();
            let rhs: Vec<T> = self.k_ib.mul_vec(&g).into_iter().map(|x| -x).collect();
            *slot = self.factor.solve(&rhs);
        }
        for (i, &v) in self.split.interior.iter().enumerate() {
            let p: Vec<T> = parts.iter().map(|x| x[i]).collect();
            out[v] = V::from_parts(&p);
        }
        out
    }
}

/// Harmonic extension of the given boundary values into the interior.
pub fn solve_dirichlet<T: Real, V: NodeValue<T>>(
    mesh: &TriMesh<T>,
    fem: &FemSystem<T>,
    values: &[V],
) -> Result<Vec<V>> {
    if values.len() != mesh.num_vertices() {
        return Err(Error::Dimension { expected: mesh.num_vertices(), got: values.len() });
    }
    Ok(DirichletSolver::new(mesh, fem)?.solve(values))
}

/// Smallest eigenvalue of `K v = lambda M v` on interior nodes by inverse
/// iteration, to a relative residual below `1e-6`.
pub fn estimate_lambda1<T: Real>(solver: &DirichletSolver<T>) -> Result<T> {
    let m = &solver.m_ii;
    let n = m.len();
    let mut v = vec![T::one(); n];
    let tol = T::lit(1e-6).max(T::epsilon() * T::lit(100.0));
    for it in 0..1000 {
        let rhs: Vec<T> = v.iter().zip(m).map(|(a, b)| *a * *b).collect();
        let mut w = solver.factor.solve(&rhs);
        let mnorm = w.iter().zip(m).map(|(a, b)| *a * *a * *b).sum::<T>().sqrt();
        for x in &mut w {
            *x /= mnorm;
        }
        let kw = solver.k_ii.mul_vec(&w);
        let lambda: T = kw.iter().zip(&w).map(|(a, b)| *a * *b).sum();
        let mut r2 = T::zero();
        let mut l2 = T::zero();
        for i in 0..n {
            let lm = lambda * m[i] * w[i];
            r2 += (kw[i] - lm) * (kw[i] - lm);
            l2 += lm * lm;
        }
        v = w;
        if it > 0 && r2.sqrt() < tol * l2.sqrt() {
            return Ok(lambda);
        }
    }
    Err(Error::NotConverged { what: "inverse iteration", iterations: 1000 })
}

/// Backward Euler heat step with the interior factorization reused between calls.
#[derive(Clone, Debug)]
pub struct DiffusionOperator<T> {
    pub tau: T,
    split: NodeSplit,
    m_ii: Vec<T>,
    k_ib: CsrMatrix<T>,
    factor: Cholesky<T>,
}

impl<T: Real> DiffusionOperator<T> {
    pub fn new(mesh: &TriMesh<T>, fem: &FemSystem<T>, tau: T) -> Result<Self> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {tau}")));
        }
        let split = NodeSplit::new(mesh);
        let n = mesh.num_vertices();
        let ni = split.len();
        let k_ii = fem.stiffness.submatrix(&split.local, &split.local, ni, ni);
        let k_ib = fem.stiffness.submatrix(&split.local, &split.boundary_cols, ni, n);
        let m_ii: Vec<T> = split.interior.iter().map(|&v| fem.mass[v]).collect();
        let a = CsrMatrix::diagonal(ni, &m_ii).add_scaled(tau, &k_ii);
        let factor = Cholesky::factor(&a)?;
        Ok(Self { tau, split, m_ii, k_ib, factor })
    }

    pub fn split(&self) -> &NodeSplit {
        &self.split
    }

    /// Solves `(M + tau K) v = M u` on interior nodes with `v = g` on the boundary.
    pub fn step(&self, u: &[Complex<T>], bc: &BoundaryCondition<T>) -> Vec<Complex<T>> {
        let g = bc.dense();
        let mut out = g.clone();
        let mut parts = [Vec::new(), Vec::new()];
        for (k, slot) in parts.iter_mut().enumerate() {
            let gk: Vec<T> = g.iter().map(|z| z.part(k)).collect();
            let coupling = self.k_ib.mul_vec(&gk);
            let rhs: Vec<T> = self
                .split
                .interior
                .iter()
                .enumerate()
                .map(|(i, &v)| self.m_ii[i] * u[v].part(k) - self.tau * coupling[i])
                .collect();
            *slot = self.factor.solve(&rhs);
        }
        for (i, &v) in self.split.interior.iter().enumerate() {
            out[v] = Complex::new(parts[0][i], parts[1][i]);
        }
        out
    }
}

/// One backward Euler diffusion step, factoring from scratch.
pub fn diffuse_step<T: Real>(
    mesh: &TriMesh<T>,
    fem: &FemSystem<T>,
    u: &[Complex<T>],
    tau: T,
    bc: &BoundaryCondition<T>,
) -> Result<Vec<Complex<T>>> {
    if u.len() != mesh.num_vertices() {
        return Err(Error::Dimension { expected: mesh.num_vertices(), got: u.len() });
    }
    Ok(DiffusionOperator::new(mesh, fem, tau)?.step(u, bc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point2;

    fn grid(n: usize) -> TriMesh<f64> {
        let mut v = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                v.push(Point2::new(i as f64 / n as f64, j as f64 / n as f64));
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                t.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                t.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        TriMesh::new(v, t).unwrap()
    }

    #[test]
    fn reference_triangle_stiffness() {
        let v = vec![Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(0., 1.)];
        let fem_err = TriMesh::new(v, vec![[0, 1, 2]]);
        assert!(fem_err.is_err());
        let m = grid(2);
        let fem = assemble(&m).unwrap();
        // Constants lie in the kernel.
        let ones = vec![1.0; m.num_vertices()];
        assert!(fem.stiffness.mul_vec(&ones).iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn lumped_mass_sums_to_area() {
        let m = grid(4);
        let fem = assemble(&m).unwrap();
        assert!((fem.mass.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_functions_are_harmonic() {
        let m = grid(5);
        let fem = assemble(&m).unwrap();
        let exact: Vec<f64> = m.vertices().iter().map(|p| 2.0 * p.x - p.y + 0.5).collect();
        let mut data = exact.clone();
        for v in m.interior_vertices() {
            data[v] = 0.0;
        }
        let sol = solve_dirichlet(&m, &fem, &data).unwrap();
        for (a, b) in sol.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda1_near_continuum_value() {
        let m = grid(24);
        let fem = assemble(&m).unwrap();
        let s = DirichletSolver::new(&m, &fem).unwrap();
        let l = estimate_lambda1(&s).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((l - exact).abs() / exact < 0.02, "{l}");
    }
}
