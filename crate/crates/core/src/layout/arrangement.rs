use std::collections::HashMap;

use log::{debug, info};

use super::validate::classify_face;
use super::{Arc, ArcSource, Face, FaceKind, HalfArc, Node, NodeKind, QuadLayout, TJunctionRecord};
use crate::crossfield::{boundary_separatrix_directions, Singularity};
use crate::mesh::{point_in_polygon, polygon_area, wrap_angle, wrap_positive, Corner, Point2, TriMesh};
use crate::trace::{CurveEnd, PartitionResult, SegmentIndex, SingularRef};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutParams<T> {
    /// Points closer than this are the same node.
    pub tol: T,
    /// Arc length over which arc directions at nodes are measured.
    pub tangent_length: T,
    /// Crossings this close to a singular node shared by both curves are ignored.
    pub singular_guard: T,
}

impl<T: Real> LayoutParams<T> {
    /// Tolerances tied to the tracing step of a quarter mean edge.
    pub fn for_mesh(mesh: &TriMesh<T>) -> Self {
        let step = mesh.mean_edge_length() * T::lit(0.25);
        Self { tol: step * T::lit(1e-3), tangent_length: step * T::lit(2.0), singular_guard: step * T::lit(12.0) }
    }
}

struct Polyline<T> {
    pts: Vec<Point2<T>>,
    closed: bool,
    source: ArcSource,
}

impl<T: Real> Polyline<T> {
    fn segments(&self) -> usize {
        self.pts.len() - 1
    }

    /// Points strictly between positions `a < b`.
    fn between(&self, a: T, b: T) -> impl Iterator<Item = Point2<T>> + '_ {
        let first = a.floor().to_usize().unwrap_or(0) + 1;
        let last = b.ceil().to_usize().unwrap_or(0);
        (first..last.min(self.pts.len())).map(|k| self.pts[k])
    }
}

struct Builder<'a, T> {
    nodes: Vec<Node<T>>,
    splits: Vec<Vec<(T, usize)>>,
    lines: Vec<Polyline<T>>,
    params: &'a LayoutParams<T>,
}

fn priority<T>(k: &NodeKind<T>) -> u8 {
    match k {
        NodeKind::Singularity { .. } | NodeKind::Corner { .. } => 4,
        NodeKind::TJunction => 3,
        NodeKind::BoundaryExit => 2,
        NodeKind::Crossing => 1,
        NodeKind::Anchor => 0,
    }
}

impl<T: Real> Builder<'_, T> {
    fn node(&mut self, p: Point2<T>, kind: NodeKind<T>, exits: Vec<T>) -> usize {
        if let Some(n) = self.nodes.iter_mut().find(|n| n.point.dist(p) <= self.params.tol) {
            if priority(&kind) > priority(&n.kind) {
                n.kind = kind;
                n.exits = exits;
            }
            return n.id;
        }
        let id = self.nodes.len();
        self.nodes.push(Node { id, kind, point: p, exits });
        id
    }

    fn split(&mut self, line: usize, pos: T, node: usize) {
        let l = &self.lines[line];
        let n = T::from_usize_lossy(l.segments());
        let pos = if l.closed && pos >= n { pos - n } else { pos.max(T::zero()).min(n) };
        self.splits[line].push((pos, node));
    }

    fn has_node(&self, line: usize, node: usize) -> bool {
        self.splits[line].iter().any(|&(_, n)| n == node)
    }
}

fn corner_kind<T: Real>(mesh: &TriMesh<T>, c: &Corner<T>) -> (NodeKind<T>, Vec<T>) {
    let exits = boundary_separatrix_directions(mesh, c).map(|i| i.absolute).unwrap_or_default();
    (NodeKind::Corner { vertex: c.vertex_id, quarters: c.quarters(), angle: c.interior_angle }, exits)
}

/// Direction in which half-arc `h` leaves its tail node. Curve arcs at nodes
/// with known separatrix angles take the matching angle.
pub(crate) fn half_tangent<T: Real>(layout: &QuadLayout<T>, h: HalfArc, tangent_length: T) -> T {
    let pts = layout.arc_points(h);
    let node = &layout.nodes[layout.tail(h)];
    let snapped = matches!(layout.arcs[h.arc].source, ArcSource::Curve(_)) && !node.exits.is_empty();
    // Lines snapped onto a singular node bend in its last few steps; read their
    // direction further out.
    let reach = match node.kind {
        NodeKind::Anchor => T::zero(),
        _ if snapped => tangent_length * T::lit(9.0),
        _ => tangent_length,
    };
    let total: T = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
    let reach = reach.min(total * T::lit(0.4));
    let p0 = pts[0];
    let q = pts.iter().skip(1).find(|q| q.dist(p0) >= reach).unwrap_or(&pts[pts.len() - 1]);
    let angle = (*q - p0).angle();
    if !snapped {
        return angle;
    }
    let mut sorted = node.exits.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let spacing = if sorted.len() < 2 {
        T::FRAC_PI_2()
    } else {
        (0..sorted.len())
            .map(|i| wrap_positive(sorted[(i + 1) % sorted.len()] - sorted[i]))
            .fold(T::TAU(), T::min)
    };
    match sorted
        .iter()
        .map(|&e| (e, wrap_angle(e - angle).abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    {
        Some((e, gap)) if gap < spacing * T::lit(0.5) => e,
        _ => angle,
    }
}

/// Planar arrangement of the partition curves and the boundary loops. Nodes
/// sit at curve ends, boundary corners and crossings; faces are traced by
/// always taking the next arc clockwise at each node.
pub fn build_layout<T: Real>(
    mesh: &TriMesh<T>,
    result: &PartitionResult<T>,
    singularities: &[Singularity<T>],
    corners: &[Corner<T>],
    params: &LayoutParams<T>,
) -> Result<QuadLayout<T>> {
    let nc = result.curves.len();
    let mut lines: Vec<Polyline<T>> = result
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| Polyline { pts: c.points.clone(), closed: c.is_closed(), source: ArcSource::Curve(i) })
        .collect();
    for (l, _) in mesh.boundary_loops().iter().enumerate() {
        let mut pts = mesh.loop_points(l);
        pts.push(pts[0]);
        lines.push(Polyline { pts, closed: true, source: ArcSource::Boundary(l) });
    }
    if let Some(i) = lines.iter().position(|l| l.pts.len() < 2) {
        return Err(Error::Layout(format!("curve {i} has fewer than two points")));
    }
    let mut b = Builder { nodes: Vec::new(), splits: vec![Vec::new(); lines.len()], lines, params };

    for c in corners.iter().filter(|c| c.quarters() != 0) {
        let pos = mesh.loop_position(c.vertex_id).ok_or_else(|| Error::Layout("corner off the boundary".into()))?;
        let (kind, exits) = corner_kind(mesh, c);
        let n = b.node(mesh.vertex(c.vertex_id), kind, exits);
        b.split(nc + pos.loop_index, T::from_usize_lossy(pos.position), n);
    }

    // Curve ends.
    let mut end_nodes = vec![(usize::MAX, usize::MAX); nc];
    for (i, c) in result.curves.iter().enumerate() {
        if c.is_closed() {
            continue;
        }
        let last = T::from_usize_lossy(c.points.len() - 1);
        for (end, pos, p) in [(c.start, T::zero(), c.points[0]), (c.end, last, c.points[c.points.len() - 1])] {
            let n = match end {
                CurveEnd::Singular(SingularRef::Interior(id)) => {
                    let s = singularities
                        .iter()
                        .find(|s| s.id == id)
                        .ok_or_else(|| Error::Layout(format!("unknown singularity {id}")))?;
                    b.node(p, NodeKind::Singularity { id, rep_degree: s.rep_degree }, s.exit_directions.clone())
                }
                CurveEnd::Singular(SingularRef::Corner(v)) => match corners.iter().find(|c| c.vertex_id == v) {
                    Some(c) => {
                        let (kind, exits) = corner_kind(mesh, c);
                        let n = b.node(p, kind, exits);
                        let lp = mesh.loop_position(v).expect("corner on boundary");
                        b.split(nc + lp.loop_index, T::from_usize_lossy(lp.position), n);
                        n
                    }
                    None => return Err(Error::Layout(format!("unknown corner {v}"))),
                },
                CurveEnd::Boundary { loop_index, edge, t } => {
                    let n = b.node(p, NodeKind::BoundaryExit, Vec::new());
                    b.split(nc + loop_index, T::from_usize_lossy(edge) + t, n);
                    n
                }
                CurveEnd::TJunction(tj) => {
                    let rec = result
                        .t_junctions
                        .get(tj)
                        .ok_or_else(|| Error::Layout(format!("unknown T-junction {tj}")))?;
                    let n = b.node(p, NodeKind::TJunction, Vec::new());
                    b.split(rec.host_curve, T::from_usize_lossy(rec.host_segment) + rec.host_t, n);
                    n
                }
                CurveEnd::Closed => return Err(Error::Layout(format!("open curve {i} has a closed end"))),
            };
            b.split(i, pos, n);
            if pos == T::zero() {
                end_nodes[i].0 = n;
            } else {
                end_nodes[i].1 = n;
            }
        }
    }

    // Crossings between curves and with the boundary.
    let mut index = SegmentIndex::new(params.tangent_length * T::lit(4.0));
    for (i, l) in b.lines.iter().enumerate() {
        index.insert_polyline(i, &l.pts);
    }
    let refs: Vec<Vec<Point2<T>>> = b.lines.iter().map(|l| l.pts.clone()).collect();
    let slices: Vec<&[Point2<T>]> = refs.iter().map(|v| v.as_slice()).collect();
    for c in 0..nc {
        for s in 0..b.lines[c].segments() {
            let (p, q) = (b.lines[c].pts[s], b.lines[c].pts[s + 1]);
            for hit in index.query(p, q, &slices) {
                let other = hit.curve;
                if other < c || (other == c && hit.segment <= s + 1) {
                    continue;
                }
                if other == c && b.lines[c].closed && s == 0 && hit.segment == b.lines[c].segments() - 1 {
                    continue;
                }
                let shared_singular = b.nodes.iter().any(|n| {
                    matches!(n.kind, NodeKind::Singularity { .. } | NodeKind::Corner { .. })
                        && n.point.dist(hit.point) < params.singular_guard
                        && b.has_node(c, n.id)
                        && b.has_node(other, n.id)
                });
                if shared_singular {
                    continue;
                }
                let n = b.node(hit.point, NodeKind::Crossing, Vec::new());
                b.split(c, T::from_usize_lossy(s) + hit.t_query, n);
                b.split(other, T::from_usize_lossy(hit.segment) + hit.t_host, n);
            }
        }
    }
    for i in 0..b.lines.len() {
        if b.splits[i].is_empty() {
            // Mid-segment, where the polyline is straight.
            let p = b.lines[i].pts[0].lerp(b.lines[i].pts[1], T::lit(0.5));
            let n = b.node(p, NodeKind::Anchor, Vec::new());
            b.split(i, T::lit(0.5), n);
        }
    }

    // Arcs between consecutive nodes along each polyline.
    let mut arcs: Vec<Arc<T>> = Vec::new();
    for i in 0..b.lines.len() {
        let mut sp = std::mem::take(&mut b.splits[i]);
        sp.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
        sp.dedup_by(|x, y| x.1 == y.1 && (x.0 - y.0).abs() < T::lit(1e-9));
        let line = &b.lines[i];
        let n = T::from_usize_lossy(line.segments());
        let mut pieces: Vec<((T, usize), (T, usize))> = sp.windows(2).map(|w| (w[0], w[1])).collect();
        if line.closed {
            pieces.push((sp[sp.len() - 1], (sp[0].0 + n, sp[0].1)));
        }
        for ((pa, na), (pb, nb)) in pieces {
            let mut poly = vec![b.nodes[na].point];
            if pb <= n {
                poly.extend(line.between(pa, pb));
            } else {
                poly.extend(line.between(pa, n));
                poly.push(line.pts[0]);
                poly.extend(line.between(T::zero(), pb - n));
            }
            poly.push(b.nodes[nb].point);
            let mut clean: Vec<Point2<T>> = Vec::with_capacity(poly.len());
            for p in poly {
                if clean.last().map_or(true, |l: &Point2<T>| l.dist(p) > params.tol) {
                    clean.push(p);
                }
            }
            if clean.len() < 2 {
                // Only the closing node: keep a two-point stub so the endpoint lands exactly.
                if na == nb {
                    continue;
                }
                clean.push(b.nodes[nb].point);
            } else {
                *clean.last_mut().expect("nonempty") = b.nodes[nb].point;
            }
            let id = arcs.len();
            arcs.push(Arc { id, src: na, dst: nb, polyline: clean, source: line.source });
        }
    }
    debug!("arrangement: {} nodes, {} arcs", b.nodes.len(), arcs.len());

    let mut layout = QuadLayout {
        nodes: b.nodes,
        arcs,
        faces: Vec::new(),
        t_junctions: Vec::new(),
        exterior_faces: 0,
        components: 0,
        tangent_length: params.tangent_length,
    };

    // Outgoing half-arcs around each node, counterclockwise.
    let mut out: Vec<Vec<(T, HalfArc)>> = vec![Vec::new(); layout.nodes.len()];
    for a in &layout.arcs {
        for forward in [true, false] {
            let h = HalfArc { arc: a.id, forward };
            out[layout.tail(h)].push((wrap_positive(half_tangent(&layout, h, params.tangent_length)), h));
        }
    }
    for o in &mut out {
        o.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    }
    let position: HashMap<HalfArc, (usize, usize)> = out
        .iter()
        .enumerate()
        .flat_map(|(v, o)| o.iter().enumerate().map(move |(k, &(_, h))| (h, (v, k))))
        .collect();
    let next = |h: HalfArc| {
        let (v, k) = position[&h.reversed()];
        let o = &out[v];
        o[(k + o.len() - 1) % o.len()].1
    };

    let mut visited: HashMap<HalfArc, bool> = HashMap::new();
    let mut outer_cycles: Vec<(Vec<HalfArc>, T)> = Vec::new();
    let mut inner_cycles: Vec<Vec<HalfArc>> = Vec::new();
    for a in 0..layout.arcs.len() {
        for forward in [true, false] {
            let start = HalfArc { arc: a, forward };
            if visited.contains_key(&start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut h = start;
            loop {
                if visited.insert(h, true).is_some() {
                    return Err(Error::Layout("face traversal did not close".into()));
                }
                cycle.push(h);
                h = next(h);
                if h == start {
                    break;
                }
            }
            let exterior = cycle
                .iter()
                .any(|h| !h.forward && matches!(layout.arcs[h.arc].source, ArcSource::Boundary(_)));
            if exterior {
                layout.exterior_faces += 1;
                continue;
            }
            if let Some(h) = cycle.iter().find(|h| cycle.contains(&h.reversed())) {
                return Err(Error::Layout(format!("dangling arc {}", h.arc)));
            }
            let area = polygon_area(&layout.cycle_polygon(&cycle));
            if area > T::zero() {
                outer_cycles.push((cycle, area));
            } else {
                inner_cycles.push(cycle);
            }
        }
    }

    let mut faces: Vec<Face> = outer_cycles
        .iter()
        .enumerate()
        .map(|(id, (c, _))| Face { id, boundary: c.clone(), holes: Vec::new(), kind: FaceKind::Other })
        .collect();
    let polys: Vec<Vec<Point2<T>>> = outer_cycles.iter().map(|(c, _)| layout.cycle_polygon(c)).collect();
    for hole in inner_cycles {
        // Just left of the cycle, inside the face it bounds.
        let probe = layout.arc_points(hole[0]);
        let k = probe.len() / 2;
        let (a, c) = if k + 1 < probe.len() { (probe[k], probe[k + 1]) } else { (probe[k - 1], probe[k]) };
        let p = a.lerp(c, T::lit(0.5)) + (c - a).normalized().perp() * (params.tol * T::lit(10.0));
        let host = (0..faces.len())
            .filter(|&f| point_in_polygon(p, &polys[f]))
            .min_by(|&x, &y| outer_cycles[x].1.partial_cmp(&outer_cycles[y].1).unwrap_or(std::cmp::Ordering::Equal))
            .ok_or_else(|| Error::Layout("inner boundary outside every face".into()))?;
        faces[host].holes.push(hole);
    }
    layout.faces = faces;

    // Connected components.
    let mut parent: Vec<usize> = (0..layout.nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for a in &layout.arcs {
        let (x, y) = (find(&mut parent, a.src), find(&mut parent, a.dst));
        parent[x] = y;
    }
    layout.components = (0..layout.nodes.len()).filter(|&v| find(&mut parent, v) == v).count();

    for (tj, rec) in result.t_junctions.iter().enumerate() {
        let node = end_nodes[rec.cut_curve].1;
        let incident = |curve: usize| {
            layout
                .arcs
                .iter()
                .find(|a| a.source == ArcSource::Curve(curve) && (a.src == node || a.dst == node))
                .map(|a| a.id)
        };
        match (incident(rec.cut_curve), incident(rec.host_curve)) {
            (Some(cut_arc), Some(host_arc)) => layout.t_junctions.push(TJunctionRecord { node, cut_arc, host_arc }),
            _ => return Err(Error::Layout(format!("T-junction {tj} is not attached to its curves"))),
        }
    }

    for f in 0..layout.faces.len() {
        layout.faces[f].kind = classify_face(&layout, f).kind;
    }
    info!(
        "layout: {} nodes, {} arcs, {} faces ({} quad, {} annulus, {} T-junction, {} other)",
        layout.nodes.len(),
        layout.arcs.len(),
        layout.faces.len(),
        layout.count(FaceKind::Quad),
        layout.count(FaceKind::Annulus),
        layout.count(FaceKind::TJunction),
        layout.count(FaceKind::Other)
    );
    Ok(layout)
}
