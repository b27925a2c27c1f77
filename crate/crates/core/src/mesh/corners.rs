use log::warn;

use super::{wrap_angle, TriMesh};
use crate::{Error, Real, Result};

/// A boundary vertex where the boundary turns.
#[derive(Clone, Debug, PartialEq)]
pub struct Corner<T> {
    pub vertex_id: usize,
    pub loop_index: usize,
    /// Angle measured inside the domain, in `(0, 2pi)`.
    pub interior_angle: T,
    /// Automatically chosen index in quarters, clamped to at most 1.
    pub index_quarters: i32,
    pub user_override: Option<i32>,
    /// Set when the automatic index was clamped down to 1.
    pub clamped: bool,
}

impl<T: Real> Corner<T> {
    /// Index in quarters actually used (override wins).
    pub fn quarters(&self) -> i32 {
        self.user_override.unwrap_or(self.index_quarters)
    }
}

/// Turning angle at boundary position `i` of loop `l`; positive for a left turn.
pub(crate) fn turning_angle<T: Real>(mesh: &TriMesh<T>, l: usize, i: usize) -> Result<T> {
    let lp = &mesh.boundary_loops()[l];
    let v = lp.vertex_ids[i];
    let (p, n) = lp.neighbors(i);
    let d1 = mesh.vertex(v) - mesh.vertex(p);
    let d2 = mesh.vertex(n) - mesh.vertex(v);
    if d1.norm() == T::zero() || d2.norm() == T::zero() {
        return Err(Error::ZeroLengthEdge(v));
    }
    Ok(wrap_angle(d2.angle() - d1.angle()))
}

/// Boundary vertices whose interior angle differs from pi by more than `angle_tol`.
pub fn detect_corners<T: Real>(mesh: &TriMesh<T>, angle_tol: T) -> Result<Vec<Corner<T>>> {
    let half_pi = T::FRAC_PI_2();
    let mut out = Vec::new();
    for (li, lp) in mesh.boundary_loops().iter().enumerate() {
        for i in 0..lp.len() {
            let t = turning_angle(mesh, li, i)?;
            if t.abs() <= angle_tol {
                continue;
            }
            let raw = (t / half_pi).round().to_i32().unwrap_or(0);
            let clamped = raw > 1;
            if clamped {
                warn!("corner at vertex {} has index {}/4; clamped to 1/4", lp.vertex_ids[i], raw);
            }
            out.push(Corner {
                vertex_id: lp.vertex_ids[i],
                loop_index: li,
                interior_angle: T::PI() - t,
                index_quarters: raw.min(1),
                user_override: None,
                clamped,
            });
        }
    }
    Ok(out)
}

/// Parses lines of `vertex_id k`; `#` starts a comment.
pub fn parse_corner_overrides(text: &str) -> Result<Vec<(usize, i32)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse_err = |msg: &str| Error::Parse { line: n + 1, msg: msg.to_string() };
        let v = it
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| parse_err("expected vertex id"))?;
        let k = it
            .next()
            .and_then(|s| s.parse::<i32>().ok())
            .ok_or_else(|| parse_err("expected integer index"))?;
        if it.next().is_some() {
            return Err(parse_err("trailing tokens"));
        }
        out.push((v, k));
    }
    Ok(out)
}

/// Applies user indices. Boundary vertices that were not detected become corners.
pub fn apply_corner_overrides<T: Real>(
    mesh: &TriMesh<T>,
    corners: &mut Vec<Corner<T>>,
    overrides: &[(usize, i32)],
) -> Result<()> {
    for &(v, k) in overrides {
        if !(-2..=1).contains(&k) {
            return Err(Error::InvalidOverride(format!("index {k} at vertex {v} is outside -2..=1")));
        }
        if v >= mesh.num_vertices() {
            return Err(Error::InvalidOverride(format!("vertex {v} does not exist")));
        }
        if let Some(c) = corners.iter_mut().find(|c| c.vertex_id == v) {
            c.user_override = Some(k);
            continue;
        }
        let pos = mesh
            .loop_position(v)
            .ok_or_else(|| Error::InvalidOverride(format!("vertex {v} is not on the boundary")))?;
        let t = turning_angle(mesh, pos.loop_index, pos.position)?;
        corners.push(Corner {
            vertex_id: v,
            loop_index: pos.loop_index,
            interior_angle: T::PI() - t,
            index_quarters: 0,
            user_override: Some(k),
            clamped: false,
        });
    }
    corners.sort_by_key(|c| {
        let p = mesh.loop_position(c.vertex_id).expect("corner on boundary");
        (p.loop_index, p.position)
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point2;

    fn l_shape() -> TriMesh<f64> {
        // Unit L: square [0,2]^2 minus [1,2]^2, with one interior vertex.
        let p = |x, y| Point2::new(x, y);
        let v = vec![
            p(0., 0.),
            p(1., 0.),
            p(2., 0.),
            p(2., 1.),
            p(1., 1.),
            p(1., 2.),
            p(0., 2.),
            p(0., 1.),
            p(0.5, 0.5),
        ];
        let t = vec![
            [0, 1, 8],
            [1, 4, 8],
            [1, 2, 3],
            [1, 3, 4],
            [4, 7, 8],
            [4, 5, 6],
            [4, 6, 7],
            [7, 0, 8],
        ];
        TriMesh::new(v, t).unwrap()
    }

    #[test]
    fn l_shape_corners() {
        let m = l_shape();
        let c = detect_corners(&m, 20f64.to_radians()).unwrap();
        let ks: Vec<(usize, i32)> = c.iter().map(|c| (c.vertex_id, c.quarters())).collect();
        assert_eq!(ks, vec![(0, 1), (2, 1), (3, 1), (4, -1), (5, 1), (6, 1)]);
        let reentrant = c.iter().find(|c| c.vertex_id == 4).unwrap();
        assert!((reentrant.interior_angle - 1.5 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn overrides() {
        let m = l_shape();
        let mut c = detect_corners(&m, 20f64.to_radians()).unwrap();
        let o = parse_corner_overrides("# test\n4 0\n1 1 # flat vertex made a corner\n").unwrap();
        apply_corner_overrides(&m, &mut c, &o).unwrap();
        assert_eq!(c.iter().find(|c| c.vertex_id == 4).unwrap().quarters(), 0);
        assert_eq!(c.iter().find(|c| c.vertex_id == 1).unwrap().quarters(), 1);
        assert!(apply_corner_overrides(&m, &mut c, &[(8, 1)]).is_err());
        assert!(apply_corner_overrides(&m, &mut c, &[(0, 2)]).is_err());
        assert!(parse_corner_overrides("3 x").is_err());
    }
}
