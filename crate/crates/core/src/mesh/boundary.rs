use num_complex::Complex;

use super::corners::turning_angle;
use super::{wrap_angle, Corner, Point2, TriMesh};
use crate::{Error, Real, Result};

/// Unit boundary values of the representation field, one per boundary vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition<T> {
    values: Vec<Option<Complex<T>>>,
}

impl<T: Real> BoundaryCondition<T> {
    pub fn from_values(values: Vec<Option<Complex<T>>>) -> Self {
        Self { values }
    }

    pub fn get(&self, v: usize) -> Option<Complex<T>> {
        self.values[v]
    }

    pub fn values(&self) -> &[Option<Complex<T>>] {
        &self.values
    }

    /// Dense vector with zeros off the boundary.
    pub fn dense(&self) -> Vec<Complex<T>> {
        self.values.iter().map(|v| v.unwrap_or_else(Complex::default)).collect()
    }
}

/// Outward unit normal of the boundary edge leaving position `i` of loop `l`.
fn outward_normal<T: Real>(mesh: &TriMesh<T>, l: usize, i: usize) -> Result<Point2<T>> {
    let lp = &mesh.boundary_loops()[l];
    let a = lp.vertex_ids[i];
    let b = lp.vertex_ids[(i + 1) % lp.len()];
    let d = mesh.vertex(b) - mesh.vertex(a);
    let len = d.norm();
    if len == T::zero() {
        return Err(Error::ZeroLengthEdge(a));
    }
    Ok(Point2::new(d.y / len, -d.x / len))
}

fn pow4<T: Real>(n: Point2<T>) -> Complex<T> {
    let z = n.to_complex();
    let z2 = z * z;
    z2 * z2
}

/// Fourth power of the normalized sum of the two adjacent outward normals.
pub fn bisector_value<T: Real>(mesh: &TriMesh<T>, v: usize) -> Result<Complex<T>> {
    let pos = mesh.loop_position(v).ok_or(Error::InvalidParameter(format!("vertex {v} is interior")))?;
    let n = mesh.boundary_loops()[pos.loop_index].len();
    let before = outward_normal(mesh, pos.loop_index, (pos.position + n - 1) % n)?;
    let after = outward_normal(mesh, pos.loop_index, pos.position)?;
    let t = wrap_angle(after.angle() - before.angle());
    Ok(pow4(Point2::polar(before.angle() + t * T::lit(0.5))))
}

/// Boundary values g = n^4 on edges. At a vertex the value is the fourth power
/// of the bisector normal, multiplied by `(-1)^k` at corners of index `k/4` so
/// that the jump across the corner is split evenly on both sides.
pub fn assign_boundary_condition<T: Real>(
    mesh: &TriMesh<T>,
    corners: &[Corner<T>],
) -> Result<BoundaryCondition<T>> {
    let mut values = vec![None; mesh.num_vertices()];
    let mut k_of = vec![0i32; mesh.num_vertices()];
    for c in corners {
        k_of[c.vertex_id] = c.quarters();
    }
    for (li, lp) in mesh.boundary_loops().iter().enumerate() {
        let n = lp.len();
        for i in 0..n {
            let v = lp.vertex_ids[i];
            let before = outward_normal(mesh, li, (i + n - 1) % n)?;
            let t = turning_angle(mesh, li, i)?;
            let k = T::from_i32(k_of[v]).unwrap_or_else(T::zero);
            let phase = T::lit(4.0) * before.angle() + T::lit(2.0) * t - T::PI() * k;
            values[v] = Some(Complex::from_polar(T::one(), phase));
        }
    }
    Ok(BoundaryCondition { values })
}

/// Principal value of `arg(b / a)` computed on the canonical edge orientation,
/// so that swapping the arguments gives exactly the negated value.
pub(crate) fn edge_arg<T: Real>(ia: usize, a: Complex<T>, ib: usize, b: Complex<T>) -> T {
    if ia < ib {
        (b * a.conj()).arg()
    } else {
        -(a * b.conj()).arg()
    }
}

/// Winding number of the nodal boundary values around loop `l`, summing
/// principal-value phase increments between consecutive vertices.
pub fn brouwer_degree<T: Real>(bc: &BoundaryCondition<T>, mesh: &TriMesh<T>, l: usize) -> Result<i64> {
    let lp = &mesh.boundary_loops()[l];
    let n = lp.len();
    let mut sum = T::zero();
    for i in 0..n {
        let (a, b) = (lp.vertex_ids[i], lp.vertex_ids[(i + 1) % n]);
        let (ga, gb) = (bc.get(a).expect("boundary value"), bc.get(b).expect("boundary value"));
        let d = edge_arg(a, ga, b, gb);
        if T::PI() - d.abs() < T::lit(1e-6) {
            return Err(Error::AmbiguousWinding(a, b));
        }
        sum += d;
    }
    Ok((sum / T::TAU()).round().to_i64().unwrap_or(0))
}

/// Degree of the boundary data as a smooth curve with jumps at corners: the
/// nodal winding plus the corner indices on that loop.
pub fn smoothed_degree<T: Real>(
    bc: &BoundaryCondition<T>,
    mesh: &TriMesh<T>,
    corners: &[Corner<T>],
    l: usize,
) -> Result<i64> {
    let k: i64 = corners.iter().filter(|c| c.loop_index == l).map(|c| c.quarters() as i64).sum();
    Ok(brouwer_degree(bc, mesh, l)? + k)
}

/// Sum of the nodal windings over all loops; this is what the interior
/// singularity degrees must add up to.
pub fn total_boundary_degree<T: Real>(bc: &BoundaryCondition<T>, mesh: &TriMesh<T>) -> Result<i64> {
    (0..mesh.boundary_loops().len()).map(|l| brouwer_degree(bc, mesh, l)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::detect_corners;

    fn square() -> TriMesh<f64> {
        let p = |x, y| Point2::new(x, y);
        let v = vec![p(0., 0.), p(0.5, 0.), p(1., 0.), p(1., 0.5), p(1., 1.), p(0.5, 1.), p(0., 1.), p(0., 0.5), p(0.5, 0.5)];
        let t = (0..8).map(|i| [i, (i + 1) % 8, 8]).collect();
        TriMesh::new(v, t).unwrap()
    }

    #[test]
    fn square_values() {
        let m = square();
        let c = detect_corners(&m, 0.35).unwrap();
        assert_eq!(c.len(), 4);
        let bc = assign_boundary_condition(&m, &c).unwrap();
        for v in 0..8 {
            let g = bc.get(v).unwrap();
            assert!((g - Complex::new(1.0, 0.0)).norm() < 1e-12, "vertex {v}: {g}");
        }
        assert_eq!(brouwer_degree(&bc, &m, 0).unwrap(), 0);
        assert_eq!(smoothed_degree(&bc, &m, &c, 0).unwrap(), 4);
    }

    #[test]
    fn square_corner_bisector_is_minus_one() {
        let m = square();
        let g = bisector_value(&m, 0).unwrap();
        assert!((g + Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn antisymmetric_edge_arg() {
        let a = Complex::from_polar(1.0f64, 0.3);
        let b = Complex::from_polar(1.0f64, 2.9);
        assert_eq!(edge_arg(1, a, 4, b), -edge_arg(4, b, 1, a));
    }
}
