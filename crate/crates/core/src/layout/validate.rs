use std::fmt;

use num_rational::Ratio;

use super::arrangement::half_tangent;
use super::{FaceKind, NodeKind, QuadLayout};
use crate::mesh::wrap_positive;
use crate::Real;

/// Largest accepted deviation of a layout corner from a right angle of the cross field.
pub const ORTHOGONALITY_TOLERANCE_DEG: f64 = 5.0;

/// One node visited along a face boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerCheck<T> {
    pub node: usize,
    /// Position of the incoming half-arc in its cycle.
    pub cycle: usize,
    pub position: usize,
    /// Angle swept inside the face between the two arcs.
    pub sector_angle: T,
    pub index: T,
    /// Nearest multiple of a quarter, in quarters.
    pub quarters: i32,
    /// Angular distance from that multiple, in radians.
    pub deviation: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceCheck<T> {
    pub face: usize,
    pub kind: FaceKind,
    /// Every node along the face's cycles.
    pub visits: Vec<CornerCheck<T>>,
    pub holes: usize,
    pub index_sum: Ratio<i64>,
    pub euler_characteristic: i64,
}

impl<T: Real> FaceCheck<T> {
    /// Visits with index one quarter.
    pub fn corners(&self) -> impl Iterator<Item = &CornerCheck<T>> {
        self.visits.iter().filter(|c| c.quarters == 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonQuadRegion { face: usize, corners: usize, holes: usize },
    SectorIndex { face: usize, node: usize, quarters: i32 },
    NotOrthogonal { face: usize, node: usize, deviation_deg: f64 },
    IndexBudget { face: usize, sum: Ratio<i64>, expected: i64 },
    Euler { value: i64, expected: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonQuadRegion { face, corners, holes } => {
                write!(f, "face {face}: non-quad region ({corners} corners, {holes} inner boundaries)")
            }
            Violation::SectorIndex { face, node, quarters } => {
                write!(f, "face {face}: node {node} has sector index {quarters}/4")
            }
            Violation::NotOrthogonal { face, node, deviation_deg } => {
                write!(f, "face {face}: node {node} is {deviation_deg:.2} degrees off a right angle")
            }
            Violation::IndexBudget { face, sum, expected } => {
                write!(f, "face {face}: corner indices sum to {sum}, expected {expected}")
            }
            Violation::Euler { value, expected } => write!(f, "arrangement Euler characteristic {value}, expected {expected}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub faces: Vec<FaceCheck<T>>,
    pub violations: Vec<Violation>,
}

impl<T: Real> ValidationReport<T> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: FaceKind) -> usize {
        self.faces.iter().filter(|f| f.kind == kind).count()
    }

    /// Fraction of faces that are quads or annuli.
    pub fn quad_or_annulus_fraction(&self) -> f64 {
        if self.faces.is_empty() {
            return 0.0;
        }
        (self.count(FaceKind::Quad) + self.count(FaceKind::Annulus)) as f64 / self.faces.len() as f64
    }

    pub fn max_deviation_deg(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| f.visits.iter())
            .map(|c| c.deviation.as_f64().to_degrees())
            .fold(0.0, f64::max)
    }
}

/// Rotation of the cross field across a sector of angle `angle` at a node.
fn sector_rotation<T: Real>(kind: &NodeKind<T>, angle: T) -> T {
    match *kind {
        NodeKind::Singularity { rep_degree, .. } => T::from_i32(rep_degree).expect("small integer") * angle / T::lit(4.0),
        NodeKind::Corner { quarters, angle: phi, .. } => {
            let k = T::from_i32(quarters).expect("small integer");
            -(T::PI() - phi - T::FRAC_PI_2() * k) * angle / phi
        }
        _ => T::zero(),
    }
}

/// Sector indices at every node around a face, and the face's class.
pub fn classify_face<T: Real>(layout: &QuadLayout<T>, face: usize) -> FaceCheck<T> {
    let f = &layout.faces[face];
    let mut visits = Vec::new();
    let mut t_side = false;
    for (ci, cycle) in f.cycles().enumerate() {
        for i in 0..cycle.len() {
            let (inc, out) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let node = layout.head(inc);
            let a_out = half_tangent(layout, out, layout.tangent_length);
            let a_back = half_tangent(layout, inc.reversed(), layout.tangent_length);
            let mut sector = wrap_positive(a_back - a_out);
            if sector <= T::zero() {
                sector = T::TAU();
            }
            let kind = &layout.nodes[node].kind;
            let index = (T::PI() - sector + sector_rotation(kind, sector)) / T::TAU();
            let quarters = (index * T::lit(4.0)).round().to_i32().unwrap_or(i32::MAX);
            let deviation = (index - T::from_i32(quarters).unwrap_or_else(T::zero) / T::lit(4.0)).abs() * T::TAU();
            if *kind == NodeKind::TJunction && quarters == 0 {
                t_side = true;
            }
            visits.push(CornerCheck { node, cycle: ci, position: i, sector_angle: sector, index, quarters, deviation });
        }
    }
    let holes = f.holes.len();
    let corners = visits.iter().filter(|c| c.quarters == 1).count();
    let clean = visits.iter().all(|c| c.quarters == 0 || c.quarters == 1);
    let kind = match (holes, corners, clean) {
        (0, 4, true) if t_side => FaceKind::TJunction,
        (0, 4, true) => FaceKind::Quad,
        (1, 0, true) => FaceKind::Annulus,
        _ => FaceKind::Other,
    };
    let index_sum = visits.iter().map(|c| Ratio::new(c.quarters as i64, 4)).sum();
    FaceCheck { face, kind, visits, holes, index_sum, euler_characteristic: 1 - holes as i64 }
}

/// Checks every face: the corner count and class, each corner's sector
/// index against a right angle, the per-face index budget, and Euler's
/// formula for the whole arrangement.
pub fn validate_regions<T: Real>(layout: &QuadLayout<T>) -> ValidationReport<T> {
    let tol = T::lit(ORTHOGONALITY_TOLERANCE_DEG.to_radians());
    let mut violations = Vec::new();
    let mut faces = Vec::new();
    for face in 0..layout.faces.len() {
        let check = classify_face(layout, face);
        if check.kind == FaceKind::Other {
            violations.push(Violation::NonQuadRegion { face, corners: check.corners().count(), holes: check.holes });
        }
        for c in &check.visits {
            if c.quarters != 0 && c.quarters != 1 {
                violations.push(Violation::SectorIndex { face, node: c.node, quarters: c.quarters });
            }
            if c.deviation > tol {
                violations.push(Violation::NotOrthogonal { face, node: c.node, deviation_deg: c.deviation.as_f64().to_degrees() });
            }
        }
        if check.index_sum != Ratio::from_integer(check.euler_characteristic) {
            violations.push(Violation::IndexBudget { face, sum: check.index_sum, expected: check.euler_characteristic });
        }
        faces.push(check);
    }
    if !layout.euler_holds() {
        violations.push(Violation::Euler { value: layout.euler_characteristic(), expected: 1 + layout.components as i64 });
    }
    ValidationReport { faces, violations }
}
