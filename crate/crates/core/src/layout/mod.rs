//! Quad layout built from the partition curves and the domain boundary:
//! planar arrangement, per-face validation, structured grids and export.

mod arrangement;
mod export;
mod grid;
mod validate;

pub use arrangement::{build_layout, LayoutParams};
pub use export::{
    export_layout, export_svg, import_layout, layout_from_json, layout_to_json, render_svg, SvgOptions, SvgSingularity,
};
pub use grid::{grid_resolution, map_grid_into_region, RegionGrid};
pub use validate::{classify_face, validate_regions, CornerCheck, FaceCheck, ValidationReport, Violation};

use crate::mesh::Point2;
use crate::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind<T> {
    /// Interior singularity with the degree of the representation field.
    Singularity { id: usize, rep_degree: i32 },
    /// Boundary corner with index `quarters / 4` and interior angle `angle`.
    Corner { vertex: usize, quarters: i32, angle: T },
    BoundaryExit,
    TJunction,
    /// Proper crossing of two curves.
    Crossing,
    /// Marker on a closed curve that meets nothing else.
    Anchor,
}

impl<T> NodeKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Singularity { .. } => "singularity",
            NodeKind::Corner { .. } => "corner",
            NodeKind::BoundaryExit => "boundary_exit",
            NodeKind::TJunction => "t_junction",
            NodeKind::Crossing => "crossing",
            NodeKind::Anchor => "anchor",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node<T> {
    pub id: usize,
    pub kind: NodeKind<T>,
    pub point: Point2<T>,
    /// Separatrix angles at singular nodes; arcs ending there are matched to them.
    pub exits: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcSource {
    /// Piece of partition curve `i`.
    Curve(usize),
    /// Piece of boundary loop `i`.
    Boundary(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arc<T> {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub polyline: Vec<Point2<T>>,
    pub source: ArcSource,
}

/// An arc traversed forward (`src` to `dst`) or backward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfArc {
    pub arc: usize,
    pub forward: bool,
}

impl HalfArc {
    /// `+(arc + 1)` when forward, `-(arc + 1)` when backward.
    pub fn signed(self) -> i64 {
        let k = self.arc as i64 + 1;
        if self.forward {
            k
        } else {
            -k
        }
    }

    pub fn from_signed(s: i64) -> Option<Self> {
        (s != 0).then(|| HalfArc { arc: (s.unsigned_abs() - 1) as usize, forward: s > 0 })
    }

    pub fn reversed(self) -> Self {
        HalfArc { arc: self.arc, forward: !self.forward }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceKind {
    Quad,
    Annulus,
    /// Four-sided region with a T-junction on one of its sides.
    TJunction,
    /// Anything else; always a violation.
    Other,
}

impl FaceKind {
    pub fn name(self) -> &'static str {
        match self {
            FaceKind::Quad => "quad",
            FaceKind::Annulus => "annulus",
            FaceKind::TJunction => "t_junction",
            FaceKind::Other => "other",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "quad" => FaceKind::Quad,
            "annulus" => FaceKind::Annulus,
            "t_junction" => FaceKind::TJunction,
            "other" => FaceKind::Other,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub id: usize,
    /// Counterclockwise outer cycle.
    pub boundary: Vec<HalfArc>,
    /// Clockwise inner cycles.
    pub holes: Vec<Vec<HalfArc>>,
    pub kind: FaceKind,
}

impl Face {
    pub fn cycles(&self) -> impl Iterator<Item = &Vec<HalfArc>> {
        std::iter::once(&self.boundary).chain(self.holes.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TJunctionRecord {
    pub node: usize,
    pub cut_arc: usize,
    pub host_arc: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadLayout<T> {
    pub nodes: Vec<Node<T>>,
    pub arcs: Vec<Arc<T>>,
    pub faces: Vec<Face>,
    pub t_junctions: Vec<TJunctionRecord>,
    /// Faces of the arrangement outside the domain: the unbounded one and hole interiors.
    pub exterior_faces: usize,
    /// Connected components of the arrangement.
    pub components: usize,
    /// Arc length over which arc directions at nodes are measured.
    pub tangent_length: T,
}

impl<T: Real> QuadLayout<T> {
    pub fn arc_points(&self, h: HalfArc) -> Vec<Point2<T>> {
        let mut p = self.arcs[h.arc].polyline.clone();
        if !h.forward {
            p.reverse();
        }
        p
    }

    pub fn tail(&self, h: HalfArc) -> usize {
        let a = &self.arcs[h.arc];
        if h.forward {
            a.src
        } else {
            a.dst
        }
    }

    pub fn head(&self, h: HalfArc) -> usize {
        self.tail(h.reversed())
    }

    /// Closed polygon of a cycle, without the repeated first point.
    pub fn cycle_polygon(&self, cycle: &[HalfArc]) -> Vec<Point2<T>> {
        let mut out = Vec::new();
        for &h in cycle {
            let p = self.arc_points(h);
            out.extend_from_slice(&p[..p.len() - 1]);
        }
        out
    }

    /// Nodes minus arcs plus all faces, including those outside the domain.
    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.arcs.len() as i64 + (self.faces.len() + self.exterior_faces) as i64
    }

    /// Euler's formula for a planar arrangement with `components` pieces.
    pub fn euler_holds(&self) -> bool {
        self.euler_characteristic() == 1 + self.components as i64
    }

    pub fn count(&self, kind: FaceKind) -> usize {
        self.faces.iter().filter(|f| f.kind == kind).count()
    }
}
