//! Triangle meshes of planar domains, boundary loops, corners and boundary data.

mod boundary;
mod corners;
mod io;
mod locate;
mod point;

use std::collections::HashMap;
use std::sync::OnceLock;

pub use boundary::{
    assign_boundary_condition, bisector_value, brouwer_degree, smoothed_degree,
    total_boundary_degree, BoundaryCondition,
};
pub(crate) use boundary::edge_arg;
pub use corners::{apply_corner_overrides, detect_corners, parse_corner_overrides, Corner};
pub use io::{parse_obj, parse_off, read_mesh, write_obj, write_off, MeshFormat};
pub use locate::{Location, PointLocator};
pub use point::{
    point_in_polygon, polygon_area, segment_distance, segment_intersection, wrap_angle,
    wrap_positive, Point2,
};

use crate::{Error, Real, Result};

/// A closed boundary polyline with the domain on its left.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLoop {
    pub vertex_ids: Vec<usize>,
    /// True for the outer loop (counterclockwise), false for holes.
    pub is_outer: bool,
}

impl BoundaryLoop {
    pub fn len(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_ids.is_empty()
    }

    /// Predecessor and successor of the vertex at position `i`.
    pub fn neighbors(&self, i: usize) -> (usize, usize) {
        let n = self.len();
        (self.vertex_ids[(i + n - 1) % n], self.vertex_ids[(i + 1) % n])
    }

    /// Ids of the given corners that sit on this loop, in loop order.
    pub fn corner_ids(&self, corners: &[Corner<impl Real>]) -> Vec<usize> {
        self.vertex_ids
            .iter()
            .copied()
            .filter(|v| corners.iter().any(|c| c.vertex_id == *v))
            .collect()
    }
}

/// Where a vertex sits on the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopPosition {
    pub loop_index: usize,
    pub position: usize,
}

/// Consistently oriented, connected, manifold planar triangle mesh.
#[derive(Debug)]
pub struct TriMesh<T> {
    vertices: Vec<Point2<T>>,
    triangles: Vec<[usize; 3]>,
    loops: Vec<BoundaryLoop>,
    loop_position: Vec<Option<LoopPosition>>,
    neighbors: Vec<[Option<usize>; 3]>,
    vertex_triangles: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
    edge_count: usize,
    locator: OnceLock<PointLocator<T>>,
}

impl<T: Real> Clone for TriMesh<T> {
    fn clone(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            loops: self.loops.clone(),
            loop_position: self.loop_position.clone(),
            neighbors: self.neighbors.clone(),
            vertex_triangles: self.vertex_triangles.clone(),
            vertex_neighbors: self.vertex_neighbors.clone(),
            edge_count: self.edge_count,
            locator: OnceLock::new(),
        }
    }
}

impl<T: Real> TriMesh<T> {
    /// Validates the input and builds adjacency. Clockwise triangles are flipped.
    pub fn new(vertices: Vec<Point2<T>>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (i, p) in vertices.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        for (f, t) in triangles.iter_mut().enumerate() {
            for &v in t.iter() {
                if v >= nv {
                    return Err(Error::IndexOutOfRange { face: f, index: v });
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::DegenerateTriangle(f));
            }
            let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            let area2 = (b - a).cross(c - a);
            let scale = (b - a).norm().max((c - a).norm()).max((c - b).norm());
            if !(area2.abs() > T::lit(1e-12) * scale * scale) {
                return Err(Error::DegenerateTriangle(f));
            }
            if area2 < T::zero() {
                t.swap(1, 2);
            }
        }

        let mut vertex_triangles = vec![Vec::new(); nv];
        for (f, t) in triangles.iter().enumerate() {
            for &v in t {
                vertex_triangles[v].push(f);
            }
        }
        if let Some(v) = vertex_triangles.iter().position(|l| l.is_empty()) {
            return Err(Error::IsolatedVertex(v));
        }

        // Undirected edge -> incident (triangle, local edge) pairs.
        let mut edges: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (f, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push((f, k));
            }
        }
        let mut neighbors = vec![[None; 3]; triangles.len()];
        let mut boundary_next: HashMap<usize, usize> = HashMap::new();
        for (&(a, b), inc) in &edges {
            match inc.as_slice() {
                [(f, k)] => {
                    let t = triangles[*f];
                    let (from, to) = (t[*k], t[(*k + 1) % 3]);
                    if boundary_next.insert(from, to).is_some() {
                        return Err(Error::NonManifoldVertex(from));
                    }
                }
                [(f, k), (g, l)] => {
                    let tf = triangles[*f];
                    let tg = triangles[*g];
                    if tf[*k] == tg[*l] {
                        // Same direction in both triangles: orientation cannot be consistent.
                        return Err(Error::NonManifoldEdge(a, b));
                    }
                    neighbors[*f][*k] = Some(*g);
                    neighbors[*g][*l] = Some(*f);
                }
                _ => return Err(Error::NonManifoldEdge(a, b)),
            }
        }
        if boundary_next.is_empty() {
            return Err(Error::NoBoundary);
        }

        // Connectivity through shared edges.
        let mut seen = vec![false; triangles.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(f) = stack.pop() {
            for g in neighbors[f].iter().flatten() {
                if !seen[*g] {
                    seen[*g] = true;
                    count += 1;
                    stack.push(*g);
                }
            }
        }
        if count != triangles.len() {
            return Err(Error::Disconnected);
        }

        // Boundary loops.
        let mut starts: Vec<usize> = boundary_next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited = vec![false; nv];
        let mut loops = Vec::new();
        for s in starts {
            if visited[s] {
                continue;
            }
            let mut ids = Vec::new();
            let mut v = s;
            loop {
                if visited[v] {
                    if v != s {
                        return Err(Error::NonManifoldVertex(v));
                    }
                    break;
                }
                visited[v] = true;
                ids.push(v);
                v = *boundary_next.get(&v).ok_or(Error::NonManifoldVertex(v))?;
            }
            let pts: Vec<_> = ids.iter().map(|&i| vertices[i]).collect();
            let is_outer = polygon_area(&pts) > T::zero();
            loops.push(BoundaryLoop { vertex_ids: ids, is_outer });
        }
        if loops.iter().filter(|l| l.is_outer).count() != 1 {
            return Err(Error::Disconnected);
        }
        loops.sort_by_key(|l| !l.is_outer);

        let mut loop_position = vec![None; nv];
        for (li, l) in loops.iter().enumerate() {
            for (pos, &v) in l.vertex_ids.iter().enumerate() {
                loop_position[v] = Some(LoopPosition { loop_index: li, position: pos });
            }
        }
        if loop_position.iter().all(|p| p.is_some()) {
            return Err(Error::NoInterior);
        }

        let mut vertex_neighbors = vec![Vec::new(); nv];
        for &(a, b) in edges.keys() {
            vertex_neighbors[a].push(b);
            vertex_neighbors[b].push(a);
        }
        for l in &mut vertex_neighbors {
            l.sort_unstable();
        }

        Ok(Self {
            vertices,
            triangles,
            loops,
            loop_position,
            neighbors,
            vertex_triangles,
            vertex_neighbors,
            edge_count: edges.len(),
            locator: OnceLock::new(),
        })
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point2<T> {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn boundary_loops(&self) -> &[BoundaryLoop] {
        &self.loops
    }

    pub fn outer_loop(&self) -> &BoundaryLoop {
        &self.loops[0]
    }

    pub fn num_holes(&self) -> usize {
        self.loops.len() - 1
    }

    /// V - E + F, which equals 1 - holes for a planar domain.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count as i64 + self.triangles.len() as i64
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.loop_position[v].is_some()
    }

    pub fn loop_position(&self, v: usize) -> Option<LoopPosition> {
        self.loop_position[v]
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.is_boundary(v)).collect()
    }

    /// Neighbor across edge `k` (from corner `k` to corner `k+1`).
    pub fn triangle_neighbors(&self, f: usize) -> [Option<usize>; 3] {
        self.neighbors[f]
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    pub fn vertex_neighbors(&self, v: usize) -> &[usize] {
        &self.vertex_neighbors[v]
    }

    pub fn triangle_points(&self, f: usize) -> [Point2<T>; 3] {
        let t = self.triangles[f];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    pub fn triangle_area(&self, f: usize) -> T {
        let [a, b, c] = self.triangle_points(f);
        (b - a).cross(c - a) * T::lit(0.5)
    }

    pub fn centroid(&self, f: usize) -> Point2<T> {
        let [a, b, c] = self.triangle_points(f);
        (a + b + c) * (T::one() / T::lit(3.0))
    }

    pub fn area(&self) -> T {
        (0..self.triangles.len()).map(|f| self.triangle_area(f)).sum()
    }

    /// Iterates each undirected edge once as `(min, max)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertex_neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn mean_edge_length(&self) -> T {
        let mut s = T::zero();
        let mut n = 0usize;
        for (a, b) in self.edges() {
            s += self.vertices[a].dist(self.vertices[b]);
            n += 1;
        }
        s / T::from_usize_lossy(n)
    }

    /// Mean length of the three edges of triangle `f`.
    pub fn local_edge_length(&self, f: usize) -> T {
        let [a, b, c] = self.triangle_points(f);
        (a.dist(b) + b.dist(c) + c.dist(a)) / T::lit(3.0)
    }

    pub fn bounding_box(&self) -> (Point2<T>, Point2<T>) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for p in &self.vertices {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> T {
        let (lo, hi) = self.bounding_box();
        lo.dist(hi)
    }

    /// Polyline of a boundary loop's vertex positions.
    pub fn loop_points(&self, l: usize) -> Vec<Point2<T>> {
        self.loops[l].vertex_ids.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Closest point on the boundary and its loop / edge position.
    pub fn nearest_boundary_point(&self, p: Point2<T>) -> (Point2<T>, usize, usize, T) {
        let mut best = (T::infinity(), self.vertices[self.loops[0].vertex_ids[0]], 0, 0, T::zero());
        for (li, l) in self.loops.iter().enumerate() {
            let n = l.len();
            for i in 0..n {
                let a = self.vertices[l.vertex_ids[i]];
                let b = self.vertices[l.vertex_ids[(i + 1) % n]];
                let (d, t) = segment_distance(p, a, b);
                if d < best.0 {
                    best = (d, a.lerp(b, t), li, i, t);
                }
            }
        }
        (best.1, best.2, best.3, best.4)
    }

    pub fn locator(&self) -> &PointLocator<T> {
        self.locator.get_or_init(|| PointLocator::new(self))
    }

    /// Triangle containing `p` and barycentric coordinates.
    pub fn locate(&self, p: Point2<T>) -> Option<Location<T>> {
        self.locator().locate(self, p)
    }

    /// Vertices within `rings` edge hops of the seed set.
    pub fn rings(&self, seeds: &[usize], rings: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        let mut frontier: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            dist[s] = 0;
        }
        for r in 1..=rings {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &self.vertex_neighbors[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = r;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        (0..self.vertices.len()).filter(|&v| dist[v] <= rings).collect()
    }

    /// Hop distance from the seed set to every vertex.
    pub fn hop_distance(&self, seeds: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        let mut queue = std::collections::VecDeque::new();
        for &s in seeds {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.vertex_neighbors[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Uniform 1-to-4 refinement. Boundary midpoints are placed by `boundary_projection`
    /// when given, otherwise at the chord midpoint.
    pub fn refine_uniform(
        &self,
        boundary_projection: Option<&dyn Fn(Point2<T>) -> Point2<T>>,
    ) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        for (a, b) in self.edges() {
            let mut m = self.vertices[a].lerp(self.vertices[b], T::lit(0.5));
            let on_boundary = self.is_boundary(a)
                && self.is_boundary(b)
                && self.is_boundary_edge(a, b);
            if on_boundary {
                if let Some(f) = boundary_projection {
                    m = f(m);
                }
            }
            mid.insert((a, b), vertices.len());
            vertices.push(m);
        }
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut tris = Vec::with_capacity(self.triangles.len() * 4);
        for t in &self.triangles {
            let m01 = mid[&key(t[0], t[1])];
            let m12 = mid[&key(t[1], t[2])];
            let m20 = mid[&key(t[2], t[0])];
            tris.push([t[0], m01, m20]);
            tris.push([t[1], m12, m01]);
            tris.push([t[2], m20, m12]);
            tris.push([m01, m12, m20]);
        }
        Self::new(vertices, tris)
    }

    pub fn is_boundary_edge(&self, a: usize, b: usize) -> bool {
        match (self.loop_position[a], self.loop_position[b]) {
            (Some(pa), Some(pb)) if pa.loop_index == pb.loop_index => {
                let n = self.loops[pa.loop_index].len();
                (pa.position + 1) % n == pb.position || (pb.position + 1) % n == pa.position
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> TriMesh<f64> {
        let v = vec![
            Point2::new(0., 0.),
            Point2::new(1., 0.),
            Point2::new(1., 1.),
            Point2::new(0., 1.),
            Point2::new(0.5, 0.5),
        ];
        let t = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        TriMesh::new(v, t).unwrap()
    }

    #[test]
    fn basic_topology() {
        let m = square();
        assert_eq!(m.boundary_loops().len(), 1);
        assert_eq!(m.outer_loop().vertex_ids, vec![0, 1, 2, 3]);
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.interior_vertices(), vec![4]);
        assert!(m.is_boundary_edge(0, 1) && !m.is_boundary_edge(0, 2));
    }

    #[test]
    fn flips_clockwise_triangles() {
        let v = vec![
            Point2::new(0., 0.),
            Point2::new(1., 0.),
            Point2::new(1., 1.),
            Point2::new(0., 1.),
            Point2::new(0.5, 0.5),
        ];
        let t = vec![[0, 4, 1], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        let m = TriMesh::new(v, t).unwrap();
        assert!((0..4).all(|f| m.triangle_area(f) > 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let p = |x, y| Point2::<f64>::new(x, y);
        let v = vec![p(0., 0.), p(1., 0.), p(2., 0.)];
        assert!(matches!(TriMesh::new(v, vec![[0, 1, 2]]), Err(Error::DegenerateTriangle(0))));
        let v = vec![p(0., 0.), p(1., 0.), p(0., 1.), p(5., 5.)];
        assert!(matches!(TriMesh::new(v, vec![[0, 1, 2]]), Err(Error::IsolatedVertex(3))));
        let v = vec![p(0., 0.), p(1., 0.), p(0., 1.), p(-1., 0.), p(0., -1.), p(1., 1.)];
        let t = vec![[0, 1, 2], [0, 3, 4], [1, 5, 2]];
        assert!(TriMesh::new(v, t).is_err());
    }

    #[test]
    fn refinement_keeps_topology() {
        let m = square();
        let r = m.refine_uniform(None).unwrap();
        assert_eq!(r.num_triangles(), 16);
        assert_eq!(r.euler_characteristic(), 1);
        assert!((r.area() - 1.0).abs() < 1e-12);
    }
}
