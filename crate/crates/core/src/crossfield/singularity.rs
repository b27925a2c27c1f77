use log::warn;
use num_complex::Complex;

use crate::gl::RepresentationField;
use crate::mesh::{edge_arg, wrap_positive, Corner, Point2, TriMesh};
use crate::{Error, Real, Result};

/// A detected interior singularity. Neighboring faces with nonzero winding
/// are merged into one singularity whose degree is their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Singularity<T> {
    pub id: usize,
    /// Member face containing the location (or the first member).
    pub face_id: usize,
    pub faces: Vec<usize>,
    pub location: Point2<T>,
    /// Degree of the representation field; the cross field index is a quarter of it.
    pub rep_degree: i32,
    /// Phase offset fitted on the ring around the singularity.
    pub theta0: Option<T>,
    /// Outgoing separatrix angles, ascending in `[0, 2pi)`.
    pub exit_directions: Vec<T>,
    /// True when the zero could not be solved for and the centroid is used.
    pub degenerate_location: bool,
}

/// Winding of the representation field around every face, from principal
/// value phase increments along its edges.
pub fn face_windings<T: Real>(field: &RepresentationField<T>) -> Vec<i32> {
    let mesh = field.mesh();
    mesh.triangles()
        .iter()
        .map(|t| {
            let mut s = T::zero();
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                s += edge_arg(a, field.value(a), b, field.value(b));
            }
            (s / T::TAU()).round().to_i32().unwrap_or(0)
        })
        .collect()
}

/// Zero of the linear interpolant on face `f`, clamped into the face.
/// The flag is set when the interpolant is degenerate and the centroid is returned.
pub fn locate_zero_in_face<T: Real>(field: &RepresentationField<T>, f: usize) -> Result<(Point2<T>, bool)> {
    let mesh = field.mesh();
    let t = mesh.triangles()[f];
    let u = [field.value(t[0]), field.value(t[1]), field.value(t[2])];
    let (a, b) = (u[1] - u[0], u[2] - u[0]);
    let det = a.re * b.im - b.re * a.im;
    let scale = a.norm() * b.norm();
    if !(det.abs() > T::lit(1e-12) * scale) || scale == T::zero() {
        return Ok((mesh.centroid(f), true));
    }
    // a l1 + b l2 = -u0
    let l1 = (-u[0].re * b.im + b.re * u[0].im) / det;
    let l2 = (-a.re * u[0].im + u[0].re * a.im) / det;
    let mut l = [T::one() - l1 - l2, l1, l2];
    for x in &mut l {
        *x = x.max(T::zero());
    }
    let s = l[0] + l[1] + l[2];
    let [p0, p1, p2] = mesh.triangle_points(f);
    Ok((p0 * (l[0] / s) + p1 * (l[1] / s) + p2 * (l[2] / s), false))
}

/// Evenly spaced separatrix angles `(theta0 + 2 pi k) / (4 - d)`.
pub fn separatrix_directions_from<T: Real>(rep_degree: i32, theta0: T) -> Result<Vec<T>> {
    if rep_degree >= 4 {
        return Err(Error::DegenerateDegree(rep_degree));
    }
    let m = 4 - rep_degree;
    let mf = T::from_i32(m).expect("small integer");
    let mut d: Vec<T> = (0..m)
        .map(|k| wrap_positive((theta0 + T::TAU() * T::from_i32(k).expect("small integer")) / mf))
        .collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}

/// Fits the phase offset `theta0` as the circular mean of `u e^{-i d theta}`
/// over a ring of nodes around the singularity.
pub fn fit_theta0<T: Real>(field: &RepresentationField<T>, sing: &Singularity<T>) -> Option<T> {
    let mesh = field.mesh();
    let mut core: Vec<usize> = sing.faces.iter().flat_map(|&f| mesh.triangles()[f]).collect();
    core.sort_unstable();
    core.dedup();
    let hops = mesh.hop_distance(&core);
    let d = T::from_i32(sing.rep_degree)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for ring in [2usize, 3] {
        for v in (0..mesh.num_vertices()).filter(|&v| hops[v] == ring) {
            let w = mesh.vertex(v) - sing.location;
            let th = w.angle();
            acc += field.value(v) * Complex::from_polar(T::one(), -d * th);
        }
    }
    if acc.norm() == T::zero() {
        None
    } else {
        Some(acc.arg())
    }
}

/// Separatrix angles for a detected singularity using the fitted phase offset.
pub fn separatrix_directions<T: Real>(field: &RepresentationField<T>, sing: &Singularity<T>) -> Result<Vec<T>> {
    if sing.rep_degree >= 4 {
        return Err(Error::DegenerateDegree(sing.rep_degree));
    }
    let theta0 = fit_theta0(field, sing).ok_or(Error::DegenerateDegree(sing.rep_degree))?;
    separatrix_directions_from(sing.rep_degree, theta0)
}

/// Finds face windings, merges faces with nonzero winding that share a vertex
/// and returns one singularity per cluster with nonzero total degree.
pub fn detect_singularities<T: Real>(field: &RepresentationField<T>) -> Vec<Singularity<T>> {
    let mesh = field.mesh();
    let w = face_windings(field);
    let marked: Vec<usize> = (0..w.len()).filter(|&f| w[f] != 0).collect();
    let mut parent: Vec<usize> = (0..marked.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let n = p[j];
            p[j] = r;
            j = n;
        }
        r
    }
    let mut owner = vec![usize::MAX; mesh.num_vertices()];
    for (i, &f) in marked.iter().enumerate() {
        for &v in &mesh.triangles()[f] {
            if owner[v] == usize::MAX {
                owner[v] = i;
            } else {
                let (a, b) = (find(&mut parent, owner[v]), find(&mut parent, i));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; marked.len()];
    for i in 0..marked.len() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(marked[i]);
    }

    let mut out = Vec::new();
    for faces in clusters {
        let degree: i32 = faces.iter().map(|&f| w[f]).sum();
        if degree == 0 {
            continue;
        }
        let mut loc = Point2::new(T::zero(), T::zero());
        let mut weight = T::zero();
        let mut degenerate = false;
        for &f in &faces {
            let (p, flag) = locate_zero_in_face(field, f).unwrap_or((mesh.centroid(f), true));
            degenerate |= flag;
            let a = T::from_i32(w[f].abs()).expect("small integer");
            loc += p * a;
            weight += a;
        }
        let location = loc * (T::one() / weight);
        let face_id = mesh
            .locate(location)
            .map(|l| l.triangle)
            .filter(|t| faces.contains(t))
            .unwrap_or(faces[0]);
        if degree.abs() >= 2 {
            warn!("singularity of representation degree {degree} near {:?}", location.to_f64());
        }
        let mut s = Singularity {
            id: out.len(),
            face_id,
            faces,
            location,
            rep_degree: degree,
            theta0: None,
            exit_directions: Vec::new(),
            degenerate_location: degenerate,
        };
        if degree < 4 {
            s.theta0 = fit_theta0(field, &s);
            if let Some(t0) = s.theta0 {
                s.exit_directions = separatrix_directions_from(degree, t0).unwrap_or_default();
            }
        }
        out.push(s);
    }
    out
}

/// Separatrix layout at a boundary corner.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySingularityInfo<T> {
    pub vertex_id: usize,
    pub index_quarters: i32,
    pub interior_angle: T,
    /// Angles from the outgoing boundary edge, `phi_c k / (2 - d)` for `k = 0..=2-d`.
    pub relative: Vec<T>,
    /// The same directions as absolute angles.
    pub absolute: Vec<T>,
}

impl<T: Real> BoundarySingularityInfo<T> {
    pub fn sectors(&self) -> usize {
        self.relative.len() - 1
    }

    /// Absolute angles of the separatrices that enter the interior.
    pub fn interior_directions(&self) -> &[T] {
        &self.absolute[1..self.absolute.len() - 1]
    }
}

/// Boundary-aligned and interior separatrix directions at a corner.
pub fn boundary_separatrix_directions<T: Real>(
    mesh: &TriMesh<T>,
    corner: &Corner<T>,
) -> Result<BoundarySingularityInfo<T>> {
    let d = corner.quarters();
    if d >= 2 {
        return Err(Error::DegenerateDegree(d));
    }
    let pos = mesh.loop_position(corner.vertex_id).ok_or(Error::InvalidParameter("corner off boundary".into()))?;
    let lp = &mesh.boundary_loops()[pos.loop_index];
    let (_, next) = lp.neighbors(pos.position);
    let base = (mesh.vertex(next) - mesh.vertex(corner.vertex_id)).angle();
    let sectors = 2 - d;
    let sf = T::from_i32(sectors).expect("small integer");
    let relative: Vec<T> = (0..=sectors)
        .map(|k| corner.interior_angle * T::from_i32(k).expect("small integer") / sf)
        .collect();
    let absolute = relative.iter().map(|&r| wrap_positive(base + r)).collect();
    Ok(BoundarySingularityInfo {
        vertex_id: corner.vertex_id,
        index_quarters: d,
        interior_angle: corner.interior_angle,
        relative,
        absolute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn direction_formula() {
        let d = separatrix_directions_from(1, 0.0f64).unwrap();
        assert_eq!(d.len(), 3);
        assert!((d[1] - 2.0 * PI / 3.0).abs() < 1e-12 && (d[2] - 4.0 * PI / 3.0).abs() < 1e-12);
        let d = separatrix_directions_from(1, PI).unwrap();
        assert!((d[0] - PI / 3.0).abs() < 1e-12 && (d[1] - PI).abs() < 1e-12);
        let d = separatrix_directions_from(-1, 0.0f64).unwrap();
        assert_eq!(d.len(), 5);
        assert!((d[1] - 2.0 * PI / 5.0).abs() < 1e-12);
        assert_eq!(separatrix_directions_from(-2, 0.3f64).unwrap().len(), 6);
        assert!(separatrix_directions_from(4, 0.0f64).is_err());
        let a = separatrix_directions_from(1, 0.4f64).unwrap();
        let b = separatrix_directions_from(1, 0.4f64 + 2.0 * PI).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
