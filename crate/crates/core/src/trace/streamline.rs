use std::collections::HashMap;

use num_complex::Complex;

use super::separatrices::{SingularRef, SnapTarget};
use super::TraceParams;
use crate::crossfield::{cross_directions, CrossField};
use crate::mesh::{segment_distance, segment_intersection, Point2};
use crate::{Error, Real, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Termination<T> {
    /// Snapped onto an interior singularity or a boundary corner.
    Singularity(SingularRef),
    /// Left the domain through boundary edge `edge` of loop `loop_index` at parameter `t`.
    BoundaryExit { point: Point2<T>, loop_index: usize, edge: usize, t: T },
    /// Cut at a crossing with another curve.
    HitCurve { curve: usize, segment: usize, t: T },
    /// Came back onto itself: points from `loop_start` on form a closed orbit.
    LimitCycle { loop_start: usize },
    MaxLength,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Streamline<T> {
    pub points: Vec<Point2<T>>,
    pub termination: Termination<T>,
    pub length: T,
    /// Largest angle between consecutive step directions.
    pub max_turn: T,
}

enum Probe<T> {
    Dir(Point2<T>),
    Outside,
    /// Entered a face owned by the given target.
    Singular(usize),
}

struct Sampler<'a, 'm, T> {
    cf: &'a CrossField<'m, T>,
    face_owner: HashMap<usize, usize>,
}

impl<T: Real> Sampler<'_, '_, T> {
    fn probe(&self, p: Point2<T>, reference: Point2<T>) -> Probe<T> {
        let Some((f, z)) = self.cf.interpolate(p) else {
            return Probe::Outside;
        };
        if let Some(&t) = self.face_owner.get(&f) {
            return Probe::Singular(t);
        }
        let z = if z.norm() < T::lit(1e-12) { Complex::new(T::one(), T::zero()) } else { z };
        let mut best = (Point2::polar(T::zero()), -T::infinity());
        for a in cross_directions(z) {
            let d = Point2::polar(a);
            let c = d.dot(reference);
            if c > best.1 {
                best = (d, c);
            }
        }
        Probe::Dir(best.0)
    }
}

/// First crossing of segment `ab` with the domain boundary.
fn boundary_crossing<T: Real>(cf: &CrossField<T>, a: Point2<T>, b: Point2<T>) -> Option<(Point2<T>, usize, usize, T, T)> {
    let mesh = cf.mesh();
    let mut best: Option<(Point2<T>, usize, usize, T, T)> = None;
    for (li, lp) in mesh.boundary_loops().iter().enumerate() {
        let n = lp.len();
        for e in 0..n {
            let p = mesh.vertex(lp.vertex_ids[e]);
            let q = mesh.vertex(lp.vertex_ids[(e + 1) % n]);
            if let Some((ta, tb)) = segment_intersection(a, b, p, q) {
                if best.as_ref().map_or(true, |x| ta < x.4) {
                    best = Some((p.lerp(q, tb), li, e, tb, ta));
                }
            }
        }
    }
    best
}

/// One classical Runge-Kutta step of length `h`. `slope(q, r)` returns the
/// unit field direction at `q` on the branch closest to `r`; the first stage
/// uses `d` as reference and later stages use the previous slope.
pub fn rk4_step<T: Real>(
    slope: &mut dyn FnMut(Point2<T>, Point2<T>) -> Option<Point2<T>>,
    p: Point2<T>,
    d: Point2<T>,
    h: T,
) -> Option<Point2<T>> {
    let half = h * T::lit(0.5);
    let k1 = slope(p, d)?;
    let k2 = slope(p + k1 * half, k1)?;
    let k3 = slope(p + k2 * half, k2)?;
    let k4 = slope(p + k3 * h, k3)?;
    Some(p + (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (h / T::lit(6.0)))
}

/// Integrates the cross field with RK4 from `start`, following the branch
/// closest to `dir0`, until a snap target, the boundary, a closed orbit or the
/// length cap. The target at index `origin` is ignored for the first
/// `3 x radius` of arc length.
pub fn trace_streamline<T: Real>(
    cf: &CrossField<T>,
    start: Point2<T>,
    dir0: Point2<T>,
    params: &TraceParams<T>,
    targets: &[SnapTarget<T>],
    origin: Option<usize>,
) -> Result<Streamline<T>> {
    params.validate()?;
    let mut face_owner = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        for &f in &t.faces {
            face_owner.insert(f, i);
        }
    }
    let sampler = Sampler { cf, face_owner };
    let h = params.step;

    // Branch choice at the seed must be clear-cut.
    let (_, z0) = cf.interpolate(start).ok_or(Error::OutsideMesh)?;
    let mut dots: Vec<T> = cross_directions(z0).iter().map(|&a| Point2::polar(a).dot(dir0)).collect();
    dots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    if dots[0] - dots[1] < T::lit(1e-6) {
        return Err(Error::AmbiguousBranch);
    }

    let mut points = vec![start];
    let mut dirs: Vec<Point2<T>> = Vec::new();
    let mut arc = vec![T::zero()];
    let mut p = start;
    let mut d = dir0;
    let mut max_turn = T::zero();
    let mut hash: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |q: Point2<T>| ((q.x / h).floor().to_i64().unwrap_or(0), (q.y / h).floor().to_i64().unwrap_or(0));

    let origin_guard = |i: usize, s: T| origin == Some(i) && s < targets[i].radius * T::lit(3.0);
    let snap_on = |a: Point2<T>, b: Point2<T>, s: T| -> Option<usize> {
        let mut best: Option<(T, usize)> = None;
        for (i, t) in targets.iter().enumerate() {
            if origin_guard(i, s) {
                continue;
            }
            let (dist, _) = segment_distance(t.location, a, b);
            if dist < t.radius && best.map_or(true, |(bd, _)| dist < bd) {
                best = Some((dist, i));
            }
        }
        best.map(|(_, i)| i)
    };
    let finish = |mut points: Vec<Point2<T>>, termination, length, max_turn| {
        points.dedup();
        Ok(Streamline { points, termination, length, max_turn })
    };

    loop {
        let s = *arc.last().expect("arc");
        if s > params.max_length {
            return finish(points, Termination::MaxLength, s, max_turn);
        }
        // RK4 with branch matching at every stage.
        let stage = |q: Point2<T>, r: Point2<T>| sampler.probe(q, r);
        let k1 = match stage(p, d) {
            Probe::Dir(k) => k,
            Probe::Singular(i) if !origin_guard(i, s) => {
                points.push(targets[i].location);
                let len = s + p.dist(targets[i].location);
                return finish(points, Termination::Singularity(targets[i].kind), len, max_turn);
            }
            Probe::Singular(_) => d,
            Probe::Outside => d,
        };
        let mut outside = false;
        let mut singular: Option<usize> = None;
        let mut eval = |q: Point2<T>, r: Point2<T>| {
            Some(match stage(q, r) {
                Probe::Dir(k) => k,
                Probe::Outside => {
                    outside = true;
                    r
                }
                Probe::Singular(i) => {
                    if !origin_guard(i, s) {
                        singular = Some(i);
                    }
                    r
                }
            })
        };
        let mut next = rk4_step(&mut eval, p, k1, h).expect("fallback slopes");
        if cf.mesh().locate(next).is_none() {
            outside = true;
        }

        if let Some(i) = snap_on(p, next, s) {
            points.push(targets[i].location);
            let len = s + p.dist(targets[i].location);
            return finish(points, Termination::Singularity(targets[i].kind), len, max_turn);
        }
        if let Some(i) = singular {
            points.push(targets[i].location);
            let len = s + p.dist(targets[i].location);
            return finish(points, Termination::Singularity(targets[i].kind), len, max_turn);
        }
        if outside {
            let probe_end = if cf.mesh().locate(next).is_none() { next } else { p + k1 * (h * T::lit(1.5)) };
            let hit = boundary_crossing(cf, p, probe_end).or_else(|| boundary_crossing(cf, p, p + k1 * (h * T::lit(3.0))));
            match hit {
                Some((q, li, e, t, _)) => {
                    if let Some(i) = snap_on(p, q, s) {
                        points.push(targets[i].location);
                        let len = s + p.dist(targets[i].location);
                        return finish(points, Termination::Singularity(targets[i].kind), len, max_turn);
                    }
                    points.push(q);
                    let len = s + p.dist(q);
                    return finish(points, Termination::BoundaryExit { point: q, loop_index: li, edge: e, t }, len, max_turn);
                }
                None => {
                    // Stage points left the domain but the step did not cross
                    // the boundary (curved boundary); fall back to Euler.
                    next = p + k1 * h;
                    if cf.mesh().locate(next).is_none() {
                        let (q, li, e, t) = cf.mesh().nearest_boundary_point(p);
                        points.push(q);
                        let len = s + p.dist(q);
                        return finish(points, Termination::BoundaryExit { point: q, loop_index: li, edge: e, t }, len, max_turn);
                    }
                }
            }
        }

        let step_dir = (next - p).normalized();
        if let Some(last) = dirs.last() {
            let turn = last.dot(step_dir).max(-T::one()).min(T::one()).acos();
            max_turn = max_turn.max(turn);
        }
        let len = s + p.dist(next);
        dirs.push(step_dir);
        points.push(next);
        arc.push(len);
        let idx = points.len() - 1;

        // Closed orbit: back within one step of an earlier point, heading the same way.
        let (ki, kj) = key(next);
        let mut found: Option<usize> = None;
        for dj in -1..=1 {
            for di in -1..=1 {
                if let Some(list) = hash.get(&(ki + di, kj + dj)) {
                    for &j in list {
                        if len - arc[j] < params.min_cycle_length || points[j].dist(next) >= h {
                            continue;
                        }
                        let dj_dir = dirs[j - 1];
                        if dj_dir.dot(step_dir) < params.cycle_angle.cos() {
                            continue;
                        }
                        if found.map_or(true, |f| j > f) {
                            found = Some(j);
                        }
                    }
                }
            }
        }
        if let Some(j) = found {
            return finish(points, Termination::LimitCycle { loop_start: j }, len, max_turn);
        }
        hash.entry((ki, kj)).or_default().push(idx);
        p = next;
        d = step_dir;
    }
}
