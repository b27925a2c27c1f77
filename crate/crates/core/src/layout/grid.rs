use super::validate::classify_face;
use super::{FaceKind, QuadLayout};
use crate::mesh::Point2;
use crate::{Error, Real, Result};

/// Structured `(m + 1) x (n + 1)` grid in a four-sided face.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid<T> {
    pub face: usize,
    pub m: usize,
    pub n: usize,
    /// Row-major, `points[j * (m + 1) + i]` at parameters `(i / m, j / n)`.
    pub points: Vec<Point2<T>>,
    /// Layout nodes at grid corners `(0,0)`, `(m,0)`, `(m,n)`, `(0,n)`.
    pub corners: [usize; 4],
}

impl<T: Real> RegionGrid<T> {
    pub fn point(&self, i: usize, j: usize) -> Point2<T> {
        self.points[j * (self.m + 1) + i]
    }

    /// Smallest cross product of the two cell edges meeting at any cell corner.
    pub fn min_jacobian(&self) -> T {
        let mut min = T::infinity();
        for j in 0..self.n {
            for i in 0..self.m {
                let q = [self.point(i, j), self.point(i + 1, j), self.point(i + 1, j + 1), self.point(i, j + 1)];
                for k in 0..4 {
                    let a = q[(k + 1) % 4] - q[k];
                    let b = q[(k + 3) % 4] - q[k];
                    min = min.min(a.cross(b));
                }
            }
        }
        min
    }

    pub fn positively_oriented(&self) -> bool {
        self.min_jacobian() > T::zero()
    }
}

/// Arc-length parameterized polyline.
struct Side<T> {
    pts: Vec<Point2<T>>,
    cum: Vec<T>,
}

impl<T: Real> Side<T> {
    fn new(pts: Vec<Point2<T>>) -> Self {
        let mut cum = vec![T::zero()];
        for w in pts.windows(2) {
            let l = *cum.last().expect("nonempty") + w[0].dist(w[1]);
            cum.push(l);
        }
        Self { pts, cum }
    }

    fn length(&self) -> T {
        *self.cum.last().expect("nonempty")
    }

    fn at(&self, s: T) -> Point2<T> {
        let target = s.max(T::zero()).min(T::one()) * self.length();
        let k = self.cum.partition_point(|&c| c < target).clamp(1, self.pts.len() - 1);
        let span = self.cum[k] - self.cum[k - 1];
        let t = if span > T::zero() { (target - self.cum[k - 1]) / span } else { T::zero() };
        self.pts[k - 1].lerp(self.pts[k], t)
    }
}

/// The four sides of a quad face, counterclockwise from its first corner.
fn sides<T: Real>(layout: &QuadLayout<T>, face: usize) -> Result<([Side<T>; 4], [usize; 4])> {
    let check = classify_face(layout, face);
    match check.kind {
        FaceKind::Quad => {}
        FaceKind::TJunction => {
            return Err(Error::Layout(format!(
                "face {face} has a T-junction and requires additional irregular nodes"
            )))
        }
        k => return Err(Error::Layout(format!("face {face} is not four-sided ({})", k.name()))),
    }
    let cycle = &layout.faces[face].boundary;
    // A corner at position i sits between half-arcs i and i + 1.
    let at: Vec<usize> = check.corners().map(|c| (c.position + 1) % cycle.len()).collect();
    let corner_nodes: Vec<usize> = check.corners().map(|c| c.node).collect();
    let mut out: Vec<Side<T>> = Vec::with_capacity(4);
    for k in 0..4 {
        let (s, e) = (at[k], at[(k + 1) % 4]);
        let mut pts: Vec<Point2<T>> = Vec::new();
        let mut i = s;
        loop {
            let p = layout.arc_points(cycle[i]);
            if pts.is_empty() {
                pts.extend(p);
            } else {
                pts.extend_from_slice(&p[1..]);
            }
            i = (i + 1) % cycle.len();
            if i == e {
                break;
            }
        }
        out.push(Side::new(pts));
    }
    let arr: [Side<T>; 4] = out.try_into().map_err(|_| Error::Layout("expected four sides".into()))?;
    Ok((arr, [corner_nodes[0], corner_nodes[1], corner_nodes[2], corner_nodes[3]]))
}

/// Cell counts along the two side pairs for a target cell size; opposite
/// sides share a count.
pub fn grid_resolution<T: Real>(layout: &QuadLayout<T>, face: usize, target: T) -> Result<(usize, usize)> {
    if !(target > T::zero()) {
        return Err(Error::InvalidParameter("target cell size must be positive".into()));
    }
    let (s, _) = sides(layout, face)?;
    let count = |a: T, b: T| ((a + b) * T::lit(0.5) / target).round().to_usize().unwrap_or(1).max(1);
    Ok((count(s[0].length(), s[2].length()), count(s[1].length(), s[3].length())))
}

/// Transfinite (Coons) interpolation of the four sides of a quad face.
pub fn map_grid_into_region<T: Real>(layout: &QuadLayout<T>, face: usize, m: usize, n: usize) -> Result<RegionGrid<T>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("grid needs at least one cell per direction".into()));
    }
    let ([bottom, right, top, left], corners) = sides(layout, face)?;
    let c = [bottom.at(T::zero()), right.at(T::zero()), top.at(T::zero()), left.at(T::zero())];
    let mut points = Vec::with_capacity((m + 1) * (n + 1));
    for j in 0..=n {
        let v = T::from_usize_lossy(j) / T::from_usize_lossy(n);
        for i in 0..=m {
            let u = T::from_usize_lossy(i) / T::from_usize_lossy(m);
            let (iu, iv) = (T::one() - u, T::one() - v);
            let edges = bottom.at(u) * iv + top.at(T::one() - u) * v + left.at(T::one() - v) * iu + right.at(v) * u;
            let bilinear = c[0] * (iu * iv) + c[1] * (u * iv) + c[2] * (u * v) + c[3] * (iu * v);
            points.push(edges - bilinear);
        }
    }
    Ok(RegionGrid { face, m, n, points, corners })
}
