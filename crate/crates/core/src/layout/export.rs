use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Arc, ArcSource, Face, FaceKind, HalfArc, Node, NodeKind, QuadLayout, TJunctionRecord};
use crate::mesh::{Point2, TriMesh};
use crate::{Error, Real, Result};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct NodeJson {
    id: usize,
    kind: String,
    x: f64,
    y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    singularity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rep_degree: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quarters: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    exits: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct ArcJson {
    id: usize,
    src: usize,
    dst: usize,
    polyline: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curve: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary_loop: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct FaceJson {
    id: usize,
    arcs: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    holes: Vec<Vec<i64>>,
    kind: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct TJunctionJson {
    node: usize,
    cut_arc: usize,
    host_arc: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct LayoutJson {
    nodes: Vec<NodeJson>,
    arcs: Vec<ArcJson>,
    faces: Vec<FaceJson>,
    t_junctions: Vec<TJunctionJson>,
    exterior_faces: usize,
    components: usize,
    tangent_length: f64,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Layout(msg.into())
}

fn cycle_from(signed: &[i64], arcs: usize) -> Result<Vec<HalfArc>> {
    signed
        .iter()
        .map(|&s| HalfArc::from_signed(s).filter(|h| h.arc < arcs).ok_or_else(|| bad(format!("bad arc reference {s}"))))
        .collect()
}

/// Layout as JSON. Face arcs are signed and one-based: `+(id + 1)` runs an
/// arc forward, `-(id + 1)` backward.
pub fn layout_to_json<T: Real>(layout: &QuadLayout<T>) -> Result<String> {
    let nodes = layout
        .nodes
        .iter()
        .map(|n| {
            let mut j = NodeJson {
                id: n.id,
                kind: n.kind.name().to_string(),
                x: n.point.x.as_f64(),
                y: n.point.y.as_f64(),
                singularity: None,
                rep_degree: None,
                vertex: None,
                quarters: None,
                angle: None,
                exits: n.exits.iter().map(|e| e.as_f64()).collect(),
            };
            match n.kind {
                NodeKind::Singularity { id, rep_degree } => {
                    j.singularity = Some(id);
                    j.rep_degree = Some(rep_degree);
                }
                NodeKind::Corner { vertex, quarters, angle } => {
                    j.vertex = Some(vertex);
                    j.quarters = Some(quarters);
                    j.angle = Some(angle.as_f64());
                }
                _ => {}
            }
            j
        })
        .collect();
    let arcs = layout
        .arcs
        .iter()
        .map(|a| ArcJson {
            id: a.id,
            src: a.src,
            dst: a.dst,
            polyline: a.polyline.iter().map(|p| [p.x.as_f64(), p.y.as_f64()]).collect(),
            curve: match a.source {
                ArcSource::Curve(i) => Some(i),
                _ => None,
            },
            boundary_loop: match a.source {
                ArcSource::Boundary(i) => Some(i),
                _ => None,
            },
        })
        .collect();
    let faces = layout
        .faces
        .iter()
        .map(|f| FaceJson {
            id: f.id,
            arcs: f.boundary.iter().map(|h| h.signed()).collect(),
            holes: f.holes.iter().map(|c| c.iter().map(|h| h.signed()).collect()).collect(),
            kind: f.kind.name().to_string(),
        })
        .collect();
    let t_junctions = layout
        .t_junctions
        .iter()
        .map(|t| TJunctionJson { node: t.node, cut_arc: t.cut_arc, host_arc: t.host_arc })
        .collect();
    let doc = LayoutJson {
        nodes,
        arcs,
        faces,
        t_junctions,
        exterior_faces: layout.exterior_faces,
        components: layout.components,
        tangent_length: layout.tangent_length.as_f64(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn layout_from_json<T: Real>(text: &str) -> Result<QuadLayout<T>> {
    let doc: LayoutJson = serde_json::from_str(text)?;
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (i, n) in doc.nodes.into_iter().enumerate() {
        if n.id != i {
            return Err(bad(format!("node {i} has id {}", n.id)));
        }
        let kind = match n.kind.as_str() {
            "singularity" => NodeKind::Singularity {
                id: n.singularity.ok_or_else(|| bad("singularity node without id"))?,
                rep_degree: n.rep_degree.ok_or_else(|| bad("singularity node without degree"))?,
            },
            "corner" => NodeKind::Corner {
                vertex: n.vertex.ok_or_else(|| bad("corner node without vertex"))?,
                quarters: n.quarters.ok_or_else(|| bad("corner node without index"))?,
                angle: T::lit(n.angle.ok_or_else(|| bad("corner node without angle"))?),
            },
            "boundary_exit" => NodeKind::BoundaryExit,
            "t_junction" => NodeKind::TJunction,
            "crossing" => NodeKind::Crossing,
            "anchor" => NodeKind::Anchor,
            other => return Err(bad(format!("unknown node kind {other}"))),
        };
        nodes.push(Node { id: i, kind, point: Point2::new(T::lit(n.x), T::lit(n.y)), exits: n.exits.into_iter().map(T::lit).collect() });
    }
    let mut arcs = Vec::with_capacity(doc.arcs.len());
    for (i, a) in doc.arcs.into_iter().enumerate() {
        if a.id != i || a.src >= nodes.len() || a.dst >= nodes.len() || a.polyline.len() < 2 {
            return Err(bad(format!("malformed arc {i}")));
        }
        let source = match (a.curve, a.boundary_loop) {
            (Some(c), None) => ArcSource::Curve(c),
            (None, Some(l)) => ArcSource::Boundary(l),
            _ => return Err(bad(format!("arc {i} needs exactly one of curve and boundary_loop"))),
        };
        let polyline = a.polyline.iter().map(|p| Point2::new(T::lit(p[0]), T::lit(p[1]))).collect();
        arcs.push(Arc { id: i, src: a.src, dst: a.dst, polyline, source });
    }
    let mut faces = Vec::with_capacity(doc.faces.len());
    for (i, f) in doc.faces.into_iter().enumerate() {
        faces.push(Face {
            id: i,
            boundary: cycle_from(&f.arcs, arcs.len())?,
            holes: f.holes.iter().map(|c| cycle_from(c, arcs.len())).collect::<Result<_>>()?,
            kind: FaceKind::from_name(&f.kind).ok_or_else(|| bad(format!("unknown face kind {}", f.kind)))?,
        });
    }
    let t_junctions = doc
        .t_junctions
        .into_iter()
        .map(|t| TJunctionRecord { node: t.node, cut_arc: t.cut_arc, host_arc: t.host_arc })
        .collect();
    Ok(QuadLayout {
        nodes,
        arcs,
        faces,
        t_junctions,
        exterior_faces: doc.exterior_faces,
        components: doc.components,
        tangent_length: T::lit(doc.tangent_length),
    })
}

pub fn export_layout<T: Real>(layout: &QuadLayout<T>, path: &Path) -> Result<()> {
    std::fs::write(path, layout_to_json(layout)?)?;
    Ok(())
}

pub fn import_layout<T: Real>(path: &Path) -> Result<QuadLayout<T>> {
    layout_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgSingularity<T> {
    pub location: Point2<T>,
    pub rep_degree: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    pub show_mesh: bool,
    /// Width of the image in pixels; the height follows the aspect ratio.
    pub width_px: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self { show_mesh: false, width_px: 800.0 }
    }
}

fn path_data<T: Real>(pts: &[Point2<T>], close: bool) -> String {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(d, "{}{:.6},{:.6}", if i == 0 { "M" } else { " L" }, p.x.as_f64(), p.y.as_f64());
    }
    if close {
        d.push_str(" Z");
    }
    d
}

/// Deterministic SVG in domain units, y pointing up. Layers from bottom to
/// top: faces, mesh, streamlines, separatrices, layout arcs and nodes,
/// singularities (cyan positive, red negative).
pub fn render_svg<T: Real>(
    mesh: &TriMesh<T>,
    singularities: &[SvgSingularity<T>],
    streamlines: &[Vec<Point2<T>>],
    layout: &QuadLayout<T>,
    options: &SvgOptions,
) -> String {
    let (lo, hi) = mesh.bounding_box();
    let (lo, hi) = ((lo.x.as_f64(), lo.y.as_f64()), (hi.x.as_f64(), hi.y.as_f64()));
    let size = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
    let margin = 0.05 * size;
    let (w, h) = (hi.0 - lo.0 + 2.0 * margin, hi.1 - lo.1 + 2.0 * margin);
    let stroke = 0.003 * size;
    let marker = 0.012 * size;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        options.width_px,
        options.width_px * h / w,
        lo.0 - margin,
        -(hi.1 + margin),
        w,
        h
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-linejoin="round">"#);

    let _ = writeln!(s, r##"<g id="faces" stroke="none">"##);
    for f in &layout.faces {
        let fill = match f.kind {
            FaceKind::Quad => "#eef3fb",
            FaceKind::Annulus => "#eefbf0",
            FaceKind::TJunction => "#fbf6e6",
            FaceKind::Other => "#fbe6e6",
        };
        let mut d = path_data(&layout.cycle_polygon(&f.boundary), true);
        for hole in &f.holes {
            d.push(' ');
            d.push_str(&path_data(&layout.cycle_polygon(hole), true));
        }
        let _ = writeln!(s, r#"<path class="face" data-kind="{}" fill="{fill}" fill-rule="evenodd" d="{d}"/>"#, f.kind.name());
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="mesh" stroke="#c8c8c8" stroke-width="{:.6}">"##, stroke * 0.3);
    if options.show_mesh {
        for t in mesh.triangles() {
            let pts: Vec<Point2<T>> = t.iter().map(|&v| mesh.vertex(v)).collect();
            let _ = writeln!(s, r#"<path d="{}"/>"#, path_data(&pts, true));
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="streamlines" stroke="#9a9a9a" stroke-width="{:.6}">"##, stroke * 0.5);
    for l in streamlines {
        let _ = writeln!(s, r#"<path d="{}"/>"#, path_data(l, false));
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="separatrices" stroke="#1f4fbf" stroke-width="{stroke:.6}">"##);
    for a in &layout.arcs {
        if let ArcSource::Curve(c) = a.source {
            let _ = writeln!(s, r#"<path class="separatrix" data-curve="{c}" d="{}"/>"#, path_data(&a.polyline, false));
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g id="layout" stroke="#000000" stroke-width="{:.6}">"##, stroke * 1.5);
    for a in layout.arcs.iter().filter(|a| matches!(a.source, ArcSource::Boundary(_))) {
        let _ = writeln!(s, r#"<path class="boundary" d="{}"/>"#, path_data(&a.polyline, false));
    }
    for n in &layout.nodes {
        let (x, y) = (n.point.x.as_f64(), n.point.y.as_f64());
        match n.kind {
            NodeKind::Corner { .. } => {
                let _ = writeln!(
                    s,
                    r##"<rect class="corner" x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="#000000" stroke="none"/>"##,
                    x - marker * 0.5,
                    y - marker * 0.5,
                    marker,
                    marker
                );
            }
            NodeKind::TJunction => {
                let _ = writeln!(
                    s,
                    r##"<circle class="t_junction" cx="{x:.6}" cy="{y:.6}" r="{:.6}" fill="#e0a000" stroke="none"/>"##,
                    marker * 0.6
                );
            }
            _ => {}
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g id="singularities" stroke="none">"#);
    for g in singularities {
        let fill = if g.rep_degree > 0 { "#00bcd4" } else { "#e53935" };
        let _ = writeln!(
            s,
            r#"<circle class="singularity" data-degree="{}" cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{fill}"/>"#,
            g.rep_degree,
            g.location.x.as_f64(),
            g.location.y.as_f64(),
            marker
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</g>\n</svg>");
    s
}

pub fn export_svg<T: Real>(
    mesh: &TriMesh<T>,
    singularities: &[SvgSingularity<T>],
    streamlines: &[Vec<Point2<T>>],
    layout: &QuadLayout<T>,
    path: &Path,
    options: &SvgOptions,
) -> Result<()> {
    std::fs::write(path, render_svg(mesh, singularities, streamlines, layout, options))?;
    Ok(())
}
