use std::f64::consts::{FRAC_PI_2, PI, TAU};

use quadgl::layout::*;
use quadgl::mesh::Point2;
use quadgl::trace::{Curve, CurveEnd, CurveKind, PartitionResult};
use quadgl::{domains, mesh, Point};

fn corner(id: usize, p: Point, angle: f64) -> Node<f64> {
    Node { id, kind: NodeKind::Corner { vertex: id, quarters: 1, angle }, point: p, exits: vec![] }
}

fn segment(a: Point, b: Point, pieces: usize) -> Vec<Point> {
    (0..=pieces).map(|k| a.lerp(b, k as f64 / pieces as f64)).collect()
}

/// One face bounded by straight boundary arcs between consecutive nodes,
/// listed counterclockwise.
fn polygon_layout(nodes: Vec<Node<f64>>) -> QuadLayout<f64> {
    let n = nodes.len();
    let arcs: Vec<Arc<f64>> = (0..n)
        .map(|i| Arc {
            id: i,
            src: i,
            dst: (i + 1) % n,
            polyline: segment(nodes[i].point, nodes[(i + 1) % n].point, 8),
            source: ArcSource::Boundary(0),
        })
        .collect();
    let boundary = (0..n).map(|i| HalfArc { arc: i, forward: true }).collect();
    QuadLayout {
        nodes,
        arcs,
        faces: vec![Face { id: 0, boundary, holes: vec![], kind: FaceKind::Other }],
        t_junctions: vec![],
        exterior_faces: 1,
        components: 1,
        tangent_length: 0.01,
    }
}

fn unit_square_layout() -> QuadLayout<f64> {
    let p = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    polygon_layout(p.iter().enumerate().map(|(i, &(x, y))| corner(i, Point::new(x, y), FRAC_PI_2)).collect())
}

#[test]
fn square_boundary_alone_is_one_quad() {
    let m = domains::unit_square::<f64>(0.1).unwrap();
    let corners = mesh::detect_corners(&m, 20f64.to_radians()).unwrap();
    let l = build_layout(&m, &PartitionResult::default(), &[], &corners, &LayoutParams::for_mesh(&m)).unwrap();
    assert_eq!(l.faces.len(), 1);
    let corner_nodes = l.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Corner { .. })).count();
    assert_eq!(corner_nodes, 4);
    assert!(l.euler_holds());
    let r = validate_regions(&l);
    assert!(r.is_valid(), "{:?}", r.violations);
    assert_eq!(r.faces[0].kind, FaceKind::Quad);
    assert_eq!(r.faces[0].corners().count(), 4);
}

#[test]
fn hand_built_square_is_a_valid_quad() {
    let l = unit_square_layout();
    let r = validate_regions(&l);
    assert!(r.is_valid(), "{:?}", r.violations);
    assert_eq!(r.faces[0].kind, FaceKind::Quad);
    assert_eq!(r.faces[0].index_sum, num_rational::Ratio::from_integer(1));
    assert!(r.max_deviation_deg() < 1e-9);
}

#[test]
fn five_orthogonal_corners_is_not_a_quad() {
    // Corners of a regular pentagon, each of index 1/4 for the boundary field.
    let nodes = (0..5)
        .map(|k| corner(k, Point2::polar(FRAC_PI_2 + TAU * k as f64 / 5.0), 3.0 * PI / 5.0))
        .collect();
    let l = polygon_layout(nodes);
    let r = validate_regions(&l);
    assert_eq!(r.faces[0].corners().count(), 5);
    assert!(r.faces[0].visits.iter().all(|c| c.deviation < 1e-9));
    assert!(r
        .violations
        .iter()
        .any(|v| matches!(v, Violation::NonQuadRegion { corners: 5, holes: 0, .. })));
    assert!(r.violations.iter().any(|v| v.to_string().contains("non-quad region")));
}

#[test]
fn skewed_corner_is_not_orthogonal() {
    let mut l = unit_square_layout();
    l.nodes[2].point = Point::new(1.15, 1.0);
    for a in l.arcs.iter_mut() {
        let (p, q) = (l.nodes[a.src].point, l.nodes[a.dst].point);
        a.polyline = segment(p, q, 8);
    }
    let r = validate_regions(&l);
    assert!(r.violations.iter().any(|v| matches!(v, Violation::NotOrthogonal { .. })));
}

#[test]
fn closed_curve_in_annulus_gives_two_annuli() {
    let m = domains::annulus::<f64>(0.3, 0.08).unwrap();
    let mut ring: Vec<Point> = (0..200).map(|k| Point2::polar(TAU * k as f64 / 200.0) * 0.6).collect();
    ring.push(ring[0]);
    let result = PartitionResult {
        curves: vec![Curve { kind: CurveKind::Cycle(0), points: ring, start: CurveEnd::Closed, end: CurveEnd::Closed }],
        ..Default::default()
    };
    let l = build_layout(&m, &result, &[], &[], &LayoutParams::for_mesh(&m)).unwrap();
    assert_eq!(l.faces.len(), 2);
    assert!(l.euler_holds());
    let r = validate_regions(&l);
    assert!(r.is_valid(), "{:?}", r.violations);
    assert_eq!(r.count(FaceKind::Annulus), 2);
    assert!(r.faces.iter().all(|f| f.index_sum == num_rational::Ratio::from_integer(0)));
}

#[test]
fn coons_grid_of_unit_square_is_the_lattice() {
    let l = unit_square_layout();
    let g = map_grid_into_region(&l, 0, 4, 4).unwrap();
    assert_eq!(g.points.len(), 25);
    let mut expected: Vec<(i64, i64)> = (0..5).flat_map(|j| (0..5).map(move |i| (i, j))).collect();
    let mut got: Vec<(i64, i64)> = g
        .points
        .iter()
        .map(|p| {
            let (x, y) = (p.x * 4.0, p.y * 4.0);
            assert!((x - x.round()).abs() < 1e-12 && (y - y.round()).abs() < 1e-12);
            (x.round() as i64, y.round() as i64)
        })
        .collect();
    expected.sort_unstable();
    got.sort_unstable();
    assert_eq!(got, expected);
    assert!(g.positively_oriented());
    assert!((g.min_jacobian() - 1.0 / 16.0).abs() < 1e-12);
    assert_eq!(grid_resolution(&l, 0, 0.25).unwrap(), (4, 4));
}

#[test]
fn coons_grid_of_quarter_annulus_is_positive() {
    let arc = |r: f64, a0: f64, a1: f64| -> Vec<Point> {
        (0..=32).map(|k| Point2::polar(a0 + (a1 - a0) * k as f64 / 32.0) * r).collect()
    };
    let pts = [Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 2.0), Point::new(0.0, 1.0)];
    let nodes: Vec<Node<f64>> = pts.iter().enumerate().map(|(i, &p)| corner(i, p, FRAC_PI_2)).collect();
    let mut l = polygon_layout(nodes);
    l.arcs[1].polyline = arc(2.0, 0.0, FRAC_PI_2);
    l.arcs[3].polyline = arc(1.0, FRAC_PI_2, 0.0);
    let r = validate_regions(&l);
    assert!(r.is_valid(), "{:?}", r.violations);
    let g = map_grid_into_region(&l, 0, 6, 10).unwrap();
    assert!(g.positively_oriented());
    // The face is symmetric about the diagonal, so its center lands on it.
    let c = g.point(3, 5);
    assert!((c.norm() - 1.5).abs() < 1e-9 && (c.angle() - PI / 4.0).abs() < 1e-9);
    let mut got: Vec<usize> = g.corners.to_vec();
    got.sort_unstable();
    assert_eq!(got, vec![0, 1, 2, 3]);
}

fn square_with_t_junction() -> QuadLayout<f64> {
    let mut nodes = vec![
        corner(0, Point::new(0.0, 0.0), FRAC_PI_2),
        Node { id: 1, kind: NodeKind::TJunction, point: Point::new(0.5, 0.0), exits: vec![] },
        corner(2, Point::new(1.0, 0.0), FRAC_PI_2),
        corner(3, Point::new(1.0, 1.0), FRAC_PI_2),
        corner(4, Point::new(0.0, 1.0), FRAC_PI_2),
    ];
    for (i, n) in nodes.iter_mut().enumerate() {
        n.id = i;
    }
    let mut l = polygon_layout(nodes);
    l.faces[0].kind = classify_face(&l, 0).kind;
    l
}

#[test]
fn t_junction_face_is_flagged_and_not_gridded() {
    let l = square_with_t_junction();
    assert_eq!(l.faces[0].kind, FaceKind::TJunction);
    let r = validate_regions(&l);
    assert!(r.is_valid(), "{:?}", r.violations);
    let err = map_grid_into_region(&l, 0, 4, 4).unwrap_err();
    assert!(err.to_string().contains("requires additional irregular nodes"));
}

#[test]
fn non_quad_face_is_not_gridded() {
    let nodes = (0..5)
        .map(|k| corner(k, Point2::polar(FRAC_PI_2 + TAU * k as f64 / 5.0), 3.0 * PI / 5.0))
        .collect();
    let l = polygon_layout(nodes);
    assert!(map_grid_into_region(&l, 0, 4, 4).is_err());
}

#[test]
fn json_round_trip_is_lossless() {
    let m = domains::l_shape::<f64>(0.2).unwrap();
    let corners = mesh::detect_corners(&m, 20f64.to_radians()).unwrap();
    let l = build_layout(&m, &PartitionResult::default(), &[], &corners, &LayoutParams::for_mesh(&m)).unwrap();
    let text = layout_to_json(&l).unwrap();
    let back: QuadLayout<f64> = layout_from_json(&text).unwrap();
    assert_eq!(back, l);
    assert_eq!(layout_to_json(&back).unwrap(), text);

    let l = square_with_t_junction();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("layout.json");
    export_layout(&l, &path).unwrap();
    let back: QuadLayout<f64> = import_layout(&path).unwrap();
    assert_eq!(back, l);
}

#[test]
fn json_uses_signed_one_based_face_arcs() {
    let l = unit_square_layout();
    let v: serde_json::Value = serde_json::from_str(&layout_to_json(&l).unwrap()).unwrap();
    assert_eq!(v["faces"][0]["arcs"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["nodes"][0]["kind"], "corner");
    assert_eq!(v["arcs"][0]["polyline"][0], serde_json::json!([0.0, 0.0]));
    assert!(layout_from_json::<f64>(r#"{"nodes":[],"arcs":[],"faces":[{"id":0,"arcs":[0],"kind":"quad"}],"t_junctions":[],"exterior_faces":1,"components":1,"tangent_length":0.1}"#).is_err());
}

#[test]
fn square_svg_has_four_corner_markers_and_one_face() {
    let m = domains::unit_square::<f64>(0.1).unwrap();
    let corners = mesh::detect_corners(&m, 20f64.to_radians()).unwrap();
    let l = build_layout(&m, &PartitionResult::default(), &[], &corners, &LayoutParams::for_mesh(&m)).unwrap();
    let svg = render_svg(&m, &[], &[], &l, &SvgOptions::default());
    assert_eq!(svg.matches(r#"class="corner""#).count(), 4);
    assert_eq!(svg.matches(r#"class="face""#).count(), 1);
    assert_eq!(svg.matches(r#"class="singularity""#).count(), 0);
    assert_eq!(svg, render_svg(&m, &[], &[], &l, &SvgOptions::default()));

    let sings = [
        SvgSingularity { location: Point::new(0.3, 0.3), rep_degree: 1 },
        SvgSingularity { location: Point::new(0.6, 0.6), rep_degree: -1 },
    ];
    let svg = render_svg(&m, &sings, &[], &l, &SvgOptions { show_mesh: true, ..Default::default() });
    assert!(svg.contains("#00bcd4") && svg.contains("#e53935"));
    assert_eq!(svg.matches("<path d=").count(), m.num_triangles());
}
