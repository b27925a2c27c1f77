use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use quadgl::fem::{self, estimate_lambda1, DirichletSolver};
use quadgl::{domains, Mesh};

/// Stiffness assembled from gradients of the barycentric coordinates, which
/// come from inverting `[1 x y]` per triangle.
fn dense_stiffness(m: &Mesh) -> DMatrix<f64> {
    let n = m.num_vertices();
    let mut k = DMatrix::zeros(n, n);
    for t in m.triangles() {
        let p = t.map(|v| m.vertex(v));
        let a = Matrix3::new(1.0, p[0].x, p[0].y, 1.0, p[1].x, p[1].y, 1.0, p[2].x, p[2].y);
        let area = a.determinant().abs() / 2.0;
        let inv = a.try_inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let gi = (inv[(1, i)], inv[(2, i)]);
                let gj = (inv[(1, j)], inv[(2, j)]);
                k[(t[i], t[j])] += area * (gi.0 * gj.0 + gi.1 * gj.1);
            }
        }
    }
    k
}

fn to_dense(a: &fem::CsrMatrix<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.rows(), a.cols());
    for r in 0..a.rows() {
        for (c, v) in a.row(r) {
            d[(r, c)] += v;
        }
    }
    d
}

#[test]
fn stiffness_matches_gradient_assembly() {
    let m = domains::hexagon::<f64>(0.2).unwrap();
    let sys = fem::assemble(&m).unwrap();
    let diff = (to_dense(&sys.stiffness) - dense_stiffness(&m)).abs().max();
    assert!(diff < 1e-12, "max entry difference {diff:e}");
}

#[test]
fn interior_solve_matches_dense_cholesky() {
    let m = domains::l_shape::<f64>(0.2).unwrap();
    let sys = fem::assemble(&m).unwrap();
    let solver = DirichletSolver::new(&m, &sys).unwrap();
    let k = to_dense(&solver.k_ii);
    let n = k.nrows();
    let rhs: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
    let x = solver.solve_interior(&rhs);
    let reference = k.cholesky().unwrap().solve(&DVector::from_vec(rhs));
    let err = (DVector::from_vec(x) - &reference).amax() / reference.amax();
    assert!(err < 1e-10, "relative error {err:e}");
}

#[test]
fn lambda1_matches_dense_eigensolver() {
    let m = domains::disk_264::<f64>().unwrap();
    let sys = fem::assemble(&m).unwrap();
    let solver = DirichletSolver::new(&m, &sys).unwrap();
    // K v = lambda M v with diagonal M becomes symmetric after scaling by M^{-1/2}.
    let k = to_dense(&solver.k_ii);
    let s = DVector::from_iterator(solver.m_ii.len(), solver.m_ii.iter().map(|m| 1.0 / m.sqrt()));
    let scaled = DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| s[i] * k[(i, j)] * s[j]);
    let reference = SymmetricEigen::new(scaled).eigenvalues.min();
    let lambda = estimate_lambda1(&solver).unwrap();
    assert!((lambda - reference).abs() < 1e-5 * reference, "{lambda} vs {reference}");
}
