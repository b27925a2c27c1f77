use std::collections::HashMap;

use crate::mesh::{segment_intersection, Point2};
use crate::Real;

/// Uniform grid over polyline segments, keyed by `(curve, segment)`.
#[derive(Clone, Debug)]
pub struct SegmentIndex<T> {
    cell: T,
    cells: HashMap<(i64, i64), Vec<(usize, usize)>>,
}

/// A crossing between a query segment and an indexed one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit<T> {
    pub curve: usize,
    pub segment: usize,
    /// Parameter along the query segment.
    pub t_query: T,
    /// Parameter along the indexed segment.
    pub t_host: T,
    pub point: Point2<T>,
}

impl<T: Real> SegmentIndex<T> {
    pub fn new(cell: T) -> Self {
        Self { cell, cells: HashMap::new() }
    }

    fn key(&self, p: Point2<T>) -> (i64, i64) {
        ((p.x / self.cell).floor().to_i64().unwrap_or(0), (p.y / self.cell).floor().to_i64().unwrap_or(0))
    }

    fn cover(&self, a: Point2<T>, b: Point2<T>) -> impl Iterator<Item = (i64, i64)> {
        let (i0, j0) = self.key(Point2::new(a.x.min(b.x), a.y.min(b.y)));
        let (i1, j1) = self.key(Point2::new(a.x.max(b.x), a.y.max(b.y)));
        (j0..=j1).flat_map(move |j| (i0..=i1).map(move |i| (i, j)))
    }

    pub fn insert_polyline(&mut self, curve: usize, pts: &[Point2<T>]) {
        for s in 0..pts.len().saturating_sub(1) {
            let keys: Vec<_> = self.cover(pts[s], pts[s + 1]).collect();
            for k in keys {
                self.cells.entry(k).or_default().push((curve, s));
            }
        }
    }

    /// All crossings of segment `ab` with indexed segments, sorted along `ab`.
    pub fn query(&self, a: Point2<T>, b: Point2<T>, curves: &[&[Point2<T>]]) -> Vec<Hit<T>> {
        let mut seen: Vec<(usize, usize)> = Vec::new();
        let mut hits = Vec::new();
        for k in self.cover(a, b) {
            if let Some(list) = self.cells.get(&k) {
                for &(c, s) in list {
                    if seen.contains(&(c, s)) {
                        continue;
                    }
                    seen.push((c, s));
                    let pts = curves[c];
                    if let Some((tq, th)) = segment_intersection(a, b, pts[s], pts[s + 1]) {
                        hits.push(Hit { curve: c, segment: s, t_query: tq, t_host: th, point: a.lerp(b, tq) });
                    }
                }
            }
        }
        hits.sort_by(|x, y| x.t_query.partial_cmp(&y.t_query).unwrap_or(std::cmp::Ordering::Equal));
        hits
    }
}
