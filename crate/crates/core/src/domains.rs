//! Meshes of the standard test domains.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{PI, TAU};

use spade::{ConstrainedDelaunayTriangulation, Point2 as SPoint, RefinementParameters, Triangulation};

use crate::mesh::{Point2, TriMesh};
use crate::{Error, Real, Result};

fn to_mesh<T: Real>(pts: Vec<[f64; 2]>, tris: Vec<[usize; 3]>) -> Result<TriMesh<T>> {
    TriMesh::new(pts.into_iter().map(|[x, y]| Point2::from_f64(x, y)).collect(), tris)
}

/// Resamples a closed polygon so no edge is longer than `h`. Every input
/// vertex is kept.
pub fn resample_polygon(poly: &[[f64; 2]], h: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let n = (len / h).ceil().max(1.0) as usize;
        for k in 0..n {
            let t = k as f64 / n as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Constrained Delaunay refinement of a polygon with holes. `outer` and
/// `holes` are taken as given (no resampling); interior triangles have area at
/// most that of an equilateral triangle of side `h`.
pub fn triangulate_polygon<T: Real>(outer: &[[f64; 2]], holes: &[Vec<[f64; 2]>], h: f64) -> Result<TriMesh<T>> {
    let mut cdt = ConstrainedDelaunayTriangulation::<SPoint<f64>>::new();
    let fail = |e: spade::InsertionError| Error::InvalidParameter(format!("triangulation failed: {e:?}"));
    for ring in std::iter::once(outer).chain(holes.iter().map(|v| v.as_slice())) {
        cdt.add_constraint_edges(ring.iter().map(|p| SPoint::new(p[0], p[1])), true).map_err(fail)?;
    }
    let params = RefinementParameters::<f64>::new()
        .exclude_outer_faces(true)
        .with_max_allowed_area(3f64.sqrt() / 4.0 * h * h)
        .with_angle_limit(spade::AngleLimit::from_deg(28.0))
        .with_max_additional_vertices(2_000_000);
    let result = cdt.refine(params);
    let excluded: HashSet<_> = result.excluded_faces.into_iter().collect();
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut pts = Vec::new();
    let mut tris = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let mut t = [0usize; 3];
        for (slot, v) in t.iter_mut().zip(face.vertices()) {
            let next = pts.len();
            let id = *index.entry(v.fix().index()).or_insert(next);
            if id == next {
                let p = v.position();
                pts.push([p.x, p.y]);
            }
            *slot = id;
        }
        tris.push(t);
    }
    to_mesh(pts, tris)
}

pub fn polygon_domain<T: Real>(outer: &[[f64; 2]], holes: &[Vec<[f64; 2]>], h: f64) -> Result<TriMesh<T>> {
    let outer = resample_polygon(outer, h);
    let holes: Vec<_> = holes.iter().map(|p| resample_polygon(p, h)).collect();
    triangulate_polygon(&outer, &holes, h)
}

/// Disk built from concentric rings with the given node counts; the first
/// count must be 1 (the center) and the last ring lies on the boundary.
pub fn disk_from_rings<T: Real>(counts: &[usize], radius: f64) -> Result<TriMesh<T>> {
    if counts.first() != Some(&1) || counts.len() < 3 || counts[1..].iter().any(|&c| c < 3) {
        return Err(Error::InvalidParameter("ring counts must start with 1 and have at least 3 nodes per ring".into()));
    }
    let rings = counts.len() - 1;
    let mut pts = vec![[0.0, 0.0]];
    let mut start = vec![0usize];
    let mut angles: Vec<Vec<f64>> = vec![vec![0.0]];
    for (r, &n) in counts.iter().enumerate().skip(1) {
        let rad = radius * r as f64 / rings as f64;
        let offset = if r % 2 == 0 { PI / n as f64 } else { 0.0 };
        start.push(pts.len());
        let mut a = Vec::with_capacity(n);
        for k in 0..n {
            let th = offset + TAU * k as f64 / n as f64;
            a.push(th);
            pts.push([rad * th.cos(), rad * th.sin()]);
        }
        angles.push(a);
    }
    let mut tris = Vec::new();
    for k in 0..counts[1] {
        tris.push([0, start[1] + k, start[1] + (k + 1) % counts[1]]);
    }
    for r in 1..rings {
        let (na, nb) = (counts[r], counts[r + 1]);
        let (sa, sb) = (start[r], start[r + 1]);
        let alpha = |i: usize| angles[r][0] + TAU * i as f64 / na as f64;
        // Outer start: closest outer angle at or before the first inner one.
        let base = angles[r + 1][0];
        let mut beta0 = base;
        while beta0 > alpha(0) {
            beta0 -= TAU / nb as f64;
        }
        let beta = |j: usize| beta0 + TAU * j as f64 / nb as f64;
        let j0 = (((beta0 - base) / (TAU / nb as f64)).round() as i64).rem_euclid(nb as i64) as usize;
        let (mut i, mut j) = (0usize, 0usize);
        while i < na || j < nb {
            let a_i = sa + i % na;
            let b_j = sb + (j0 + j) % nb;
            let advance_inner = j >= nb || (i < na && alpha(i + 1) < beta(j + 1));
            if advance_inner {
                tris.push([a_i, sa + (i + 1) % na, b_j]);
                i += 1;
            } else {
                tris.push([a_i, sb + (j0 + j + 1) % nb, b_j]);
                j += 1;
            }
        }
    }
    to_mesh(pts, tris)
}

/// Disk with `rings` hexagonal rings (`1 + 3 rings (rings + 1)` nodes).
pub fn disk_hex<T: Real>(rings: usize) -> Result<TriMesh<T>> {
    let counts: Vec<usize> = std::iter::once(1).chain((1..=rings).map(|r| 6 * r)).collect();
    disk_from_rings(&counts, 1.0)
}

/// The 264-node unit disk: eight hexagonal rings and a boundary ring of 47.
pub fn disk_264<T: Real>() -> Result<TriMesh<T>> {
    disk_from_rings(&[1, 6, 12, 18, 24, 30, 36, 42, 48, 47], 1.0)
}

pub fn unit_square<T: Real>(h: f64) -> Result<TriMesh<T>> {
    polygon_domain(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], &[], h)
}

/// Structured right-triangle grid on the unit square.
pub fn square_grid<T: Real>(n: usize) -> Result<TriMesh<T>> {
    let mut pts = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            pts.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::new();
    for j in 0..n {
        for i in 0..n {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    to_mesh(pts, tris)
}

/// Upper unit half disk with `arc_nodes` boundary nodes on the arc.
pub fn half_disk<T: Real>(arc_nodes: usize, h: f64) -> Result<TriMesh<T>> {
    let mut outer: Vec<[f64; 2]> = (0..arc_nodes)
        .map(|k| {
            let t = PI * k as f64 / (arc_nodes - 1) as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let chord = resample_polygon(&[[-1.0, 0.0], [1.0, 0.0]], h);
    outer.extend(chord.into_iter().skip(1).take_while(|p| p[0] < 1.0 - 1e-12));
    triangulate_polygon(&outer, &[], h)
}

/// Regular hexagon of circumradius 1.
pub fn hexagon<T: Real>(h: f64) -> Result<TriMesh<T>> {
    let outer: Vec<[f64; 2]> = (0..6).map(|k| {
        let t = TAU * k as f64 / 6.0;
        [t.cos(), t.sin()]
    }).collect();
    polygon_domain(&outer, &[], h)
}

/// `[0,2]^2` minus `[1,2]^2`.
pub fn l_shape<T: Real>(h: f64) -> Result<TriMesh<T>> {
    polygon_domain(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]], &[], h)
}

/// `[0,4] x [0,2]` with two square holes.
pub fn two_hole_square<T: Real>(h: f64) -> Result<TriMesh<T>> {
    let hole = |cx: f64, cy: f64, r: f64| vec![[cx - r, cy - r], [cx - r, cy + r], [cx + r, cy + r], [cx + r, cy - r]];
    polygon_domain(
        &[[0.0, 0.0], [4.0, 0.0], [4.0, 2.0], [0.0, 2.0]],
        &[hole(1.0, 1.0, 0.35), hole(3.0, 1.0, 0.35)],
        h,
    )
}

/// Square `[-1, 1]^2` with a centered square hole of half-width `r`.
pub fn square_annulus<T: Real>(r: f64, h: f64) -> Result<TriMesh<T>> {
    let hole = vec![[-r, -r], [-r, r], [r, r], [r, -r]];
    polygon_domain(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], &[hole], h)
}

/// Rectilinear mushroom: a wide cap on a narrow stem.
pub fn mushroom<T: Real>(h: f64) -> Result<TriMesh<T>> {
    polygon_domain(
        &[
            [-0.5, -1.0],
            [0.5, -1.0],
            [0.5, 1.0],
            [2.0, 1.0],
            [2.0, 2.0],
            [-2.0, 2.0],
            [-2.0, 1.0],
            [-0.5, 1.0],
        ],
        &[],
        h,
    )
}

/// U-shaped block whose two bottom corners are chamfered at 45 degrees.
/// Returns the mesh and the four chamfer vertex ids.
pub fn chamfered_u<T: Real>(h: f64) -> Result<(TriMesh<T>, Vec<usize>)> {
    let c = 0.4;
    let outer = [
        [c, 0.0],
        [3.0 - c, 0.0],
        [3.0, c],
        [3.0, 2.0],
        [2.0, 2.0],
        [2.0, 1.0],
        [1.0, 1.0],
        [1.0, 2.0],
        [0.0, 2.0],
        [0.0, c],
    ];
    let mesh: TriMesh<T> = polygon_domain(&outer, &[], h)?;
    let chamfers = [[c, 0.0], [3.0 - c, 0.0], [3.0, c], [0.0, c]]
        .iter()
        .map(|p| nearest_vertex(&mesh, *p))
        .collect();
    Ok((mesh, chamfers))
}

/// Annulus with inner radius `r0` and outer radius 1.
pub fn annulus<T: Real>(r0: f64, h: f64) -> Result<TriMesh<T>> {
    let circle = |r: f64| {
        let n = ((TAU * r) / h).ceil().max(8.0) as usize;
        (0..n).map(|k| {
            let t = TAU * k as f64 / n as f64;
            [r * t.cos(), r * t.sin()]
        }).collect::<Vec<_>>()
    };
    triangulate_polygon(&circle(1.0), &[circle(r0)], h)
}

pub fn nearest_vertex<T: Real>(mesh: &TriMesh<T>, p: [f64; 2]) -> usize {
    let q = Point2::from_f64(p[0], p[1]);
    (0..mesh.num_vertices())
        .min_by(|&a, &b| {
            mesh.vertex(a).dist(q).partial_cmp(&mesh.vertex(b).dist(q)).unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty mesh")
}

/// Projection onto the unit circle, for refining disk meshes.
pub fn project_to_unit_circle<T: Real>(p: Point2<T>) -> Point2<T> {
    p.normalized()
}
