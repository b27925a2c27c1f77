use std::collections::{HashMap, HashSet};

use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::streamline::{trace_streamline, Termination};
use super::TraceParams;
use crate::crossfield::{boundary_separatrix_directions, CrossField, Singularity};
use crate::mesh::{segment_distance, wrap_angle, Corner, Point2};
use crate::{Real, Result};

/// An interior singularity (by id) or a boundary corner (by vertex id).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SingularRef {
    Interior(usize),
    Corner(usize),
}

/// A point that streamlines snap onto when they pass within `radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapTarget<T> {
    pub kind: SingularRef,
    pub location: Point2<T>,
    pub radius: T,
    /// Faces with winding that belong to this target.
    pub faces: Vec<usize>,
    /// Outgoing separatrix angles.
    pub exits: Vec<T>,
    /// Angle between neighboring separatrices.
    pub spacing: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Separatrix<T> {
    pub origin: SingularRef,
    pub exit_index: usize,
    pub exit_angle: T,
    /// Starts at the origin's location.
    pub points: Vec<Point2<T>>,
    pub termination: Termination<T>,
    pub length: T,
    pub max_turn: T,
    /// Closed orbit this separatrix runs into, if any.
    pub cycle: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitCycle<T> {
    /// Closed polyline without the repeated end point.
    pub points: Vec<Point2<T>>,
    /// Separatrix that revealed the cycle.
    pub source: usize,
    /// Index into the source's points where the loop begins.
    pub join: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeparatrixSet<T> {
    pub separatrices: Vec<Separatrix<T>>,
    /// Indices of separatrices ending at a singularity, a corner or the boundary.
    pub s: Vec<usize>,
    /// Indices of separatrices ending on a closed orbit or at the length cap.
    pub p: Vec<usize>,
    pub cycles: Vec<LimitCycle<T>>,
    pub targets: Vec<SnapTarget<T>>,
}

/// Snap targets: every detected singularity, and corners of index at most 0.
pub fn singular_targets<T: Real>(
    cf: &CrossField<T>,
    singularities: &[Singularity<T>],
    corners: &[Corner<T>],
    params: &TraceParams<T>,
) -> Result<Vec<SnapTarget<T>>> {
    let mesh = cf.mesh();
    let mut out = Vec::new();
    for s in singularities {
        let local = s.faces.iter().map(|&f| mesh.local_edge_length(f)).sum::<T>() / T::from_usize_lossy(s.faces.len());
        let spread = s
            .faces
            .iter()
            .flat_map(|&f| mesh.triangle_points(f))
            .map(|p| p.dist(s.location))
            .fold(T::zero(), T::max);
        out.push(SnapTarget {
            kind: SingularRef::Interior(s.id),
            location: s.location,
            radius: (local * params.snap_factor).max(spread * T::lit(1.1)),
            faces: s.faces.clone(),
            exits: s.exit_directions.clone(),
            spacing: T::TAU() / T::from_i32((4 - s.rep_degree).max(1)).expect("small integer"),
        });
    }
    for c in corners.iter().filter(|c| c.quarters() <= 0) {
        let pos = mesh.loop_position(c.vertex_id).expect("corner on boundary");
        let (a, b) = mesh.boundary_loops()[pos.loop_index].neighbors(pos.position);
        let v = mesh.vertex(c.vertex_id);
        let local = (v.dist(mesh.vertex(a)) + v.dist(mesh.vertex(b))) * T::lit(0.5);
        let info = boundary_separatrix_directions(mesh, c)?;
        out.push(SnapTarget {
            kind: SingularRef::Corner(c.vertex_id),
            location: v,
            radius: local * params.snap_factor,
            faces: Vec::new(),
            exits: info.interior_directions().to_vec(),
            spacing: c.interior_angle / T::from_usize_lossy(info.sectors()),
        });
    }
    Ok(out)
}

fn polyline_distance<T: Real>(p: Point2<T>, pts: &[Point2<T>], closed: bool) -> T {
    let n = pts.len();
    let segs = if closed { n } else { n.saturating_sub(1) };
    (0..segs)
        .map(|i| segment_distance(p, pts[i], pts[(i + 1) % n]).0)
        .fold(T::infinity(), T::min)
}

fn angular_gap<T: Real>(a: T, b: T) -> T {
    wrap_angle(a - b).abs()
}

/// Traces every separatrix once. A separatrix that arrives at a singularity
/// or corner consumes the matching exit there, so the reverse trace is skipped.
pub fn trace_separatrices<T: Real>(
    cf: &CrossField<T>,
    singularities: &[Singularity<T>],
    corners: &[Corner<T>],
    params: &TraceParams<T>,
) -> Result<SeparatrixSet<T>> {
    let mesh = cf.mesh();
    let targets = singular_targets(cf, singularities, corners, params)?;
    let mut consumed: HashSet<(usize, usize)> = HashSet::new();
    // Separatrix traced out of each seeded exit.
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    let mut superseded = vec![];
    let mut set = SeparatrixSet { targets: targets.clone(), ..Default::default() };

    // Interior corners emit only if their index is negative.
    let seeds: Vec<(usize, usize, T)> = targets
        .iter()
        .enumerate()
        .filter(|(_, t)| match t.kind {
            SingularRef::Interior(_) => true,
            SingularRef::Corner(v) => corners.iter().any(|c| c.vertex_id == v && c.quarters() < 0),
        })
        .flat_map(|(i, t)| t.exits.iter().enumerate().map(move |(k, &a)| (i, k, a)))
        .collect();

    for (ti, k, angle) in seeds {
        if consumed.contains(&(ti, k)) {
            continue;
        }
        consumed.insert((ti, k));
        owner.insert((ti, k), set.separatrices.len());
        let target = &targets[ti];
        let dir = Point2::polar(angle);
        let mut r = target.radius;
        let mut seed = target.location + dir * r;
        let mut tries = 0;
        while mesh.locate(seed).is_none() && tries < 3 {
            r *= T::lit(0.5);
            seed = target.location + dir * r;
            tries += 1;
        }
        let (points, termination, length, max_turn) = if mesh.locate(seed).is_none() {
            // Exit leaves the domain right away.
            let (q, li, e, t) = mesh.nearest_boundary_point(seed);
            (vec![target.location, q], Termination::BoundaryExit { point: q, loop_index: li, edge: e, t }, target.location.dist(q), T::zero())
        } else {
            let line = trace_streamline(cf, seed, dir, params, &targets, Some(ti))?;
            let mut pts = vec![target.location];
            pts.extend(line.points);
            (pts, line.termination, line.length + r, line.max_turn)
        };
        // The streamline indices are shifted by the prepended origin.
        let termination = match termination {
            Termination::LimitCycle { loop_start } => Termination::LimitCycle { loop_start: loop_start + 1 },
            other => other,
        };

        if let Termination::Singularity(kind) = &termination {
            if let Some(tj) = targets.iter().position(|t| t.kind == *kind) {
                // Approach direction, read off well outside the snap radius.
                let loc = targets[tj].location;
                let far = targets[tj].radius * T::lit(3.0);
                let before = points[..points.len() - 1]
                    .iter()
                    .rev()
                    .find(|q| q.dist(loc) >= far)
                    .unwrap_or(&points[points.len() - 2]);
                let arrival = (*before - loc).angle();
                let spacing = targets[tj].spacing;
                let best = targets[tj]
                    .exits
                    .iter()
                    .enumerate()
                    .filter(|(kk, _)| !consumed.contains(&(tj, *kk)))
                    .map(|(kk, &a)| (kk, angular_gap(a, arrival)))
                    .filter(|(_, g)| *g <= spacing * T::lit(0.5))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
                match best {
                    Some((kk, _)) => {
                        consumed.insert((tj, kk));
                    }
                    None => {
                        // The exit was traced already but that line missed us; the
                        // connecting line replaces it.
                        let missed = targets[tj]
                            .exits
                            .iter()
                            .enumerate()
                            .filter_map(|(kk, &a)| owner.get(&(tj, kk)).map(|&o| (o, angular_gap(a, arrival))))
                            .filter(|&(o, g)| {
                                g <= spacing * T::lit(0.5)
                                    && set.separatrices[o].cycle.is_none()
                                    && set.separatrices[o].termination != Termination::Singularity(target.kind)
                            })
                            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
                        if let Some((o, _)) = missed {
                            debug!("separatrix {o} superseded by a connecting line from {:?}", target.kind);
                            superseded.push(o);
                        }
                    }
                }
            }
        }

        let index = set.separatrices.len();
        let mut cycle = None;
        if let Termination::LimitCycle { loop_start } = termination {
            let loop_pts: Vec<Point2<T>> = points[loop_start..points.len() - 1].to_vec();
            let step = (loop_pts.len() / 24).max(1);
            let same = set.cycles.iter().position(|c| {
                loop_pts
                    .iter()
                    .step_by(step)
                    .all(|&q| polyline_distance(q, &c.points, true) < params.step * T::lit(3.0))
            });
            cycle = Some(match same {
                Some(c) => c,
                None => {
                    set.cycles.push(LimitCycle { points: loop_pts, source: index, join: loop_start });
                    set.cycles.len() - 1
                }
            });
        }
        debug!("separatrix {index} from {:?}: {:?}", target.kind, termination);
        let in_p = matches!(termination, Termination::LimitCycle { .. } | Termination::MaxLength);
        set.separatrices.push(Separatrix {
            origin: target.kind,
            exit_index: k,
            exit_angle: angle,
            points,
            termination,
            length,
            max_turn,
            cycle,
        });
        if in_p {
            set.p.push(index);
        } else {
            set.s.push(index);
        }
    }
    if !superseded.is_empty() {
        drop_separatrices(&mut set, &superseded);
    }
    info!(
        "traced {} separatrices: {} regular, {} unresolved, {} closed orbits",
        set.separatrices.len(),
        set.s.len(),
        set.p.len(),
        set.cycles.len()
    );
    Ok(set)
}

/// Removes separatrices and renumbers the classification and cycle sources.
fn drop_separatrices<T: Real>(set: &mut SeparatrixSet<T>, dropped: &[usize]) {
    let mut remap = vec![None; set.separatrices.len()];
    let mut kept = Vec::new();
    for (i, s) in std::mem::take(&mut set.separatrices).into_iter().enumerate() {
        if !dropped.contains(&i) {
            remap[i] = Some(kept.len());
            kept.push(s);
        }
    }
    set.separatrices = kept;
    set.s = set.s.iter().filter_map(|&i| remap[i]).collect();
    set.p = set.p.iter().filter_map(|&i| remap[i]).collect();
    for c in &mut set.cycles {
        c.source = remap[c.source].expect("cycle sources are never dropped");
    }
}
