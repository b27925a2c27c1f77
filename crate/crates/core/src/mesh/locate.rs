use super::{Point2, TriMesh};
use crate::Real;

/// Triangle and barycentric coordinates of a located point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location<T> {
    pub triangle: usize,
    pub bary: [T; 3],
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug)]
pub struct PointLocator<T> {
    origin: Point2<T>,
    cell: T,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<T: Real> PointLocator<T> {
    pub fn new(mesh: &TriMesh<T>) -> Self {
        let (lo, hi) = mesh.bounding_box();
        let nt = mesh.num_triangles().max(1);
        let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(T::min_positive_value());
        // About two triangles per cell.
        let cell = (area / T::from_usize_lossy(nt) * T::lit(2.0)).sqrt();
        let nx = (((hi.x - lo.x) / cell).to_usize().unwrap_or(0) + 1).min(4096);
        let ny = (((hi.y - lo.y) / cell).to_usize().unwrap_or(0) + 1).min(4096);
        let mut loc = Self { origin: lo, cell, nx, ny, buckets: vec![Vec::new(); nx * ny] };
        for f in 0..mesh.num_triangles() {
            let [a, b, c] = mesh.triangle_points(f);
            let (i0, j0) = loc.cell_of(Point2::new(a.x.min(b.x).min(c.x), a.y.min(b.y).min(c.y)));
            let (i1, j1) = loc.cell_of(Point2::new(a.x.max(b.x).max(c.x), a.y.max(b.y).max(c.y)));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * nx + i].push(f as u32);
                }
            }
        }
        loc
    }

    fn cell_of(&self, p: Point2<T>) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        let clamp = |v: T, n: usize| {
            if v < T::zero() {
                0
            } else {
                v.to_usize().unwrap_or(n - 1).min(n - 1)
            }
        };
        (clamp(fx, self.nx), clamp(fy, self.ny))
    }

    pub fn locate(&self, mesh: &TriMesh<T>, p: Point2<T>) -> Option<Location<T>> {
        if !p.is_finite() {
            return None;
        }
        let (i, j) = self.cell_of(p);
        let tol = T::lit(-1e-10);
        let mut best: Option<(T, Location<T>)> = None;
        for &f in &self.buckets[j * self.nx + i] {
            let f = f as usize;
            let bary = barycentric(mesh.triangle_points(f), p);
            let worst = bary[0].min(bary[1]).min(bary[2]);
            if worst >= T::zero() {
                return Some(Location { triangle: f, bary });
            }
            if worst >= tol && best.as_ref().map_or(true, |(w, _)| worst > *w) {
                best = Some((worst, Location { triangle: f, bary }));
            }
        }
        best.map(|(_, mut l)| {
            for b in &mut l.bary {
                *b = b.max(T::zero());
            }
            let s = l.bary[0] + l.bary[1] + l.bary[2];
            for b in &mut l.bary {
                *b /= s;
            }
            l
        })
    }
}

pub fn barycentric<T: Real>(tri: [Point2<T>; 3], p: Point2<T>) -> [T; 3] {
    let [a, b, c] = tri;
    let det = (b - a).cross(c - a);
    let l1 = (p - a).cross(c - a) / det;
    let l2 = (b - a).cross(p - a) / det;
    [T::one() - l1 - l2, l1, l2]
}
