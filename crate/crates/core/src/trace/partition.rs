use log::info;

use super::segindex::SegmentIndex;
use super::separatrices::{SeparatrixSet, SingularRef};
use super::streamline::Termination;
use super::TraceParams;
use crate::mesh::{segment_distance, Point2};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// A separatrix that ends at a singularity, a corner or the boundary.
    Separatrix(usize),
    /// A closed orbit.
    Cycle(usize),
    /// An unresolved separatrix cut where it first meets another curve.
    Truncated(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveEnd<T> {
    Singular(SingularRef),
    Boundary { loop_index: usize, edge: usize, t: T },
    TJunction(usize),
    /// Closed curves have no ends.
    Closed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve<T> {
    pub kind: CurveKind,
    pub points: Vec<Point2<T>>,
    pub start: CurveEnd<T>,
    pub end: CurveEnd<T>,
}

impl<T: Real> Curve<T> {
    pub fn is_closed(&self) -> bool {
        matches!(self.start, CurveEnd::Closed)
    }
}

/// Where a truncated separatrix stops on another curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TJunction<T> {
    pub point: Point2<T>,
    /// Curve that was cut.
    pub cut_curve: usize,
    /// Curve it ends on, with the segment and parameter there.
    pub host_curve: usize,
    pub host_segment: usize,
    pub host_t: T,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PartitionResult<T> {
    pub curves: Vec<Curve<T>>,
    pub t_junctions: Vec<TJunction<T>>,
    /// Number of unresolved separatrices that had to be cut.
    pub unresolved: usize,
}

fn end_of<T: Real>(term: &Termination<T>) -> CurveEnd<T> {
    match term {
        Termination::Singularity(r) => CurveEnd::Singular(*r),
        Termination::BoundaryExit { loop_index, edge, t, .. } => {
            CurveEnd::Boundary { loop_index: *loop_index, edge: *edge, t: *t }
        }
        _ => CurveEnd::Closed,
    }
}

fn nearest_on_polyline<T: Real>(p: Point2<T>, pts: &[Point2<T>]) -> (usize, T, Point2<T>) {
    let n = pts.len();
    let mut best = (T::infinity(), 0, T::zero());
    for i in 0..n {
        let (d, t) = segment_distance(p, pts[i], pts[(i + 1) % n]);
        if d < best.0 {
            best = (d, i, t);
        }
    }
    (best.1, best.2, pts[best.1].lerp(pts[(best.1 + 1) % n], best.2))
}

/// Turns separatrices into cutting curves. Regular separatrices are kept,
/// every closed orbit is added, and each unresolved separatrix is cut where it
/// first meets a curve already present, leaving one T-junction per cut.
pub fn partition<T: Real>(set: &SeparatrixSet<T>, params: &TraceParams<T>) -> Result<PartitionResult<T>> {
    let mut out = PartitionResult { unresolved: set.p.len(), ..Default::default() };
    for &i in &set.s {
        let s = &set.separatrices[i];
        out.curves.push(Curve {
            kind: CurveKind::Separatrix(i),
            points: s.points.clone(),
            start: CurveEnd::Singular(s.origin),
            end: end_of(&s.termination),
        });
    }

    let mut handled = vec![false; set.separatrices.len()];
    for (ci, c) in set.cycles.iter().enumerate() {
        let host = out.curves.len();
        let mut closed = c.points.clone();
        closed.push(c.points[0]);
        out.curves.push(Curve { kind: CurveKind::Cycle(ci), points: closed, start: CurveEnd::Closed, end: CurveEnd::Closed });
        let src = &set.separatrices[c.source];
        let mut pts = src.points[..=c.join].to_vec();
        pts.dedup();
        let tj = out.t_junctions.len();
        out.t_junctions.push(TJunction {
            point: c.points[0],
            cut_curve: out.curves.len(),
            host_curve: host,
            host_segment: 0,
            host_t: T::zero(),
        });
        out.curves.push(Curve {
            kind: CurveKind::Truncated(c.source),
            points: pts,
            start: CurveEnd::Singular(src.origin),
            end: CurveEnd::TJunction(tj),
        });
        handled[c.source] = true;
    }

    let cell = params.step * T::lit(4.0);
    let mut index = SegmentIndex::new(cell);
    for (i, c) in out.curves.iter().enumerate() {
        index.insert_polyline(i, &c.points);
    }
    let tiny = params.step * T::lit(1e-6);
    for &pi in &set.p {
        if handled[pi] {
            continue;
        }
        let rho = &set.separatrices[pi];
        let origin = rho.points[0];
        let refs: Vec<&[Point2<T>]> = out.curves.iter().map(|c| c.points.as_slice()).collect();
        let mut cut = None;
        for s in 0..rho.points.len() - 1 {
            let hits = index.query(rho.points[s], rho.points[s + 1], &refs);
            if let Some(h) = hits.into_iter().find(|h| h.point.dist(origin) > tiny) {
                cut = Some((s, h.point, h.curve, h.segment, h.t_host));
                break;
            }
        }
        let (seg, point, host, host_segment, host_t) = match (cut, rho.cycle, &rho.termination) {
            (Some(c), _, _) => c,
            (None, Some(ci), Termination::LimitCycle { loop_start }) => {
                let host = out
                    .curves
                    .iter()
                    .position(|c| c.kind == CurveKind::Cycle(ci))
                    .expect("cycle curve present");
                let (hs, ht, q) = nearest_on_polyline(rho.points[*loop_start], &out.curves[host].points);
                (*loop_start, q, host, hs, ht)
            }
            _ => {
                return Err(Error::Partition(format!(
                    "unresolved separatrix {pi} never meets another curve"
                )))
            }
        };
        let mut pts = rho.points[..=seg].to_vec();
        pts.push(point);
        pts.dedup();
        let tj = out.t_junctions.len();
        let cut_curve = out.curves.len();
        out.t_junctions.push(TJunction { point, cut_curve, host_curve: host, host_segment, host_t });
        index.insert_polyline(cut_curve, &pts);
        out.curves.push(Curve {
            kind: CurveKind::Truncated(pi),
            points: pts,
            start: CurveEnd::Singular(rho.origin),
            end: CurveEnd::TJunction(tj),
        });
    }
    info!("partition: {} curves, {} T-junctions", out.curves.len(), out.t_junctions.len());
    Ok(out)
}
