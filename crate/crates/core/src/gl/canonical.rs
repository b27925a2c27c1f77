use log::warn;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::RepresentationField;
use crate::fem::{DirichletSolver, FemSystem};
use crate::mesh::{brouwer_degree, point_in_polygon, BoundaryCondition, Point2, TriMesh};
use crate::{Error, Real, Result};

/// Prescribed interior singularity: a location and a degree (in units of 1/4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrescribedSingularity<T> {
    pub location: Point2<T>,
    pub degree: i32,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SingularityConfig<T> {
    pub singularities: Vec<PrescribedSingularity<T>>,
}

#[derive(Serialize, Deserialize)]
struct JsonSingularity {
    x: f64,
    y: f64,
    degree: i32,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonConfig {
    Wrapped { singularities: Vec<JsonSingularity> },
    Bare(Vec<JsonSingularity>),
}

impl<T: Real> SingularityConfig<T> {
    pub fn new(singularities: Vec<(Point2<T>, i32)>) -> Self {
        Self {
            singularities: singularities
                .into_iter()
                .map(|(location, degree)| PrescribedSingularity { location, degree })
                .collect(),
        }
    }

    pub fn total_degree(&self) -> i64 {
        self.singularities.iter().map(|s| s.degree as i64).sum()
    }

    /// Accepts `{"singularities": [{"x", "y", "degree"}]}` or the bare array.
    pub fn from_json(text: &str) -> Result<Self> {
        let list = match serde_json::from_str::<JsonConfig>(text)? {
            JsonConfig::Wrapped { singularities } | JsonConfig::Bare(singularities) => singularities,
        };
        Ok(Self {
            singularities: list
                .into_iter()
                .map(|s| PrescribedSingularity { location: Point2::from_f64(s.x, s.y), degree: s.degree })
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let list: Vec<JsonSingularity> = self
            .singularities
            .iter()
            .map(|s| JsonSingularity { x: s.location.x.as_f64(), y: s.location.y.as_f64(), degree: s.degree })
            .collect();
        Ok(serde_json::to_string_pretty(&serde_json::json!({ "singularities": list }))?)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CanonicalOptions<T> {
    /// Loop position at which the boundary phase is unwrapped.
    pub unwrap_start: usize,
    /// A point inside each hole, in loop order; found automatically when absent.
    pub hole_points: Option<Vec<Point2<T>>>,
    /// Extra full turns added to each hole's phase lift. Nonzero values twist
    /// the field between the hole and the outer boundary.
    pub hole_turns: Option<Vec<i64>>,
}

fn hole_point<T: Real>(mesh: &TriMesh<T>, l: usize) -> Point2<T> {
    let pts = mesh.loop_points(l);
    let n = T::from_usize_lossy(pts.len());
    let c = pts.iter().fold(Point2::new(T::zero(), T::zero()), |a, p| a + *p) * (T::one() / n);
    if point_in_polygon(c, &pts) {
        return c;
    }
    // Step off the longest edge to the side away from the domain.
    let (i, _) = (0..pts.len())
        .map(|i| (i, pts[i].dist(pts[(i + 1) % pts.len()])))
        .fold((0, T::zero()), |best, x| if x.1 > best.1 { x } else { best });
    let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
    let d = b - a;
    a.lerp(b, T::lit(0.5)) - d.perp() * T::lit(1e-3)
}

/// Unit-modulus factor `prod ((z - a) / |z - a|)^d` at `z`.
fn singular_factor<T: Real>(z: Point2<T>, centers: &[(Point2<T>, i64)], scale: T) -> Complex<T> {
    let mut f = Complex::new(T::one(), T::zero());
    for &(a, d) in centers {
        let w = z - a;
        let r = w.norm();
        if r <= T::lit(1e-12) * scale {
            continue;
        }
        let unit = Complex::new(w.x / r, w.y / r);
        f *= if d >= 0 { unit.powi(d as i32) } else { unit.conj().powi((-d) as i32) };
    }
    f
}

/// Harmonic map with the prescribed singularities that matches the boundary
/// data: `e^{i phi}` times the product of singular factors, where `phi` is the
/// harmonic extension of the unwrapped boundary phase left over after dividing
/// the data by the singular factors. Holes get an extra factor centered inside
/// them so that every loop closes up.
pub fn canonical_harmonic_map<'m, T: Real>(
    mesh: &'m TriMesh<T>,
    fem: &FemSystem<T>,
    bc: &BoundaryCondition<T>,
    config: &SingularityConfig<T>,
    options: &CanonicalOptions<T>,
) -> Result<RepresentationField<'m, T>> {
    let scale = mesh.diameter();
    let sep = T::lit(1e-9) * scale.max(T::one());
    for (i, s) in config.singularities.iter().enumerate() {
        if mesh.locate(s.location).is_none() {
            return Err(Error::InvalidConfig(format!("singularity {i} lies outside the domain")));
        }
        let (nearest, _, _, _) = mesh.nearest_boundary_point(s.location);
        if nearest.dist(s.location) <= sep {
            return Err(Error::InvalidConfig(format!("singularity {i} lies on the boundary")));
        }
        for (j, o) in config.singularities.iter().enumerate().skip(i + 1) {
            if o.location.dist(s.location) <= sep {
                return Err(Error::InvalidConfig(format!("singularities {i} and {j} coincide")));
            }
        }
        if s.degree == 0 {
            warn!("singularity {i} has degree 0");
        }
        if mesh.vertices().iter().any(|v| v.dist(s.location) <= T::lit(1e-12) * scale) {
            warn!("singularity {i} sits on a mesh vertex; its value there is arbitrary");
        }
    }

    let loops = mesh.boundary_loops();
    let degrees: Vec<i64> = (0..loops.len()).map(|l| brouwer_degree(bc, mesh, l)).collect::<Result<_>>()?;
    let boundary_total: i64 = degrees.iter().sum();
    if config.total_degree() != boundary_total {
        return Err(Error::DegreeMismatch { config: config.total_degree(), boundary: boundary_total });
    }

    let mut centers: Vec<(Point2<T>, i64)> =
        config.singularities.iter().map(|s| (s.location, s.degree as i64)).collect();
    for l in 1..loops.len() {
        let b = match &options.hole_points {
            Some(p) => *p.get(l - 1).ok_or_else(|| Error::InvalidConfig("missing hole point".into()))?,
            None => hole_point(mesh, l),
        };
        if !point_in_polygon(b, &mesh.loop_points(l)) {
            return Err(Error::InvalidConfig(format!("hole point {} is not inside its hole", l - 1)));
        }
        centers.push((b, -degrees[l]));
    }

    // Unwrap the residual phase around each loop.
    let mut phase = vec![T::zero(); mesh.num_vertices()];
    let mut loop_means = Vec::with_capacity(loops.len());
    for (l, lp) in loops.iter().enumerate() {
        let n = lp.len();
        let residual = |k: usize| {
            let v = lp.vertex_ids[k % n];
            let g = bc.get(v).expect("boundary value");
            g * singular_factor(mesh.vertex(v), &centers, scale).conj()
        };
        let s0 = options.unwrap_start % n;
        let mut acc = residual(s0).arg();
        let mut sum = acc;
        phase[lp.vertex_ids[s0]] = acc;
        let mut prev = residual(s0);
        for k in 1..=n {
            let cur = residual(s0 + k);
            acc += (cur * prev.conj()).arg();
            prev = cur;
            if k < n {
                phase[lp.vertex_ids[(s0 + k) % n]] = acc;
                sum += acc;
            }
        }
        let closure = acc - phase[lp.vertex_ids[s0]];
        if closure.abs() > T::lit(1e-6) {
            return Err(Error::InvalidConfig(format!(
                "boundary phase does not close on loop {l} (winding {:.3}); the mesh may be too coarse",
                closure / T::TAU()
            )));
        }
        loop_means.push(sum / T::from_usize_lossy(n));
    }
    // Lift each hole's phase so that its mean is within pi of the outer mean.
    for (l, lp) in loops.iter().enumerate().skip(1) {
        let extra = options.hole_turns.as_ref().and_then(|t| t.get(l - 1)).copied().unwrap_or(0);
        let turns = ((loop_means[0] - loop_means[l]) / T::TAU()).round() + T::from_i64(extra).expect("small integer");
        let shift = turns * T::TAU();
        for &v in &lp.vertex_ids {
            phase[v] += shift;
        }
    }

    let solver = DirichletSolver::new(mesh, fem)?;
    let phi = solver.solve(&phase);
    let values = (0..mesh.num_vertices())
        .map(|v| match bc.get(v) {
            Some(g) => g,
            None => Complex::from_polar(T::one(), phi[v]) * singular_factor(mesh.vertex(v), &centers, scale),
        })
        .collect();
    RepresentationField::new(mesh, values)
}
