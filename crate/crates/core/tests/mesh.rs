use quadgl::mesh::{self, MeshFormat};
use quadgl::{domains, Mesh};

fn same(a: &Mesh, b: &Mesh) {
    assert_eq!(a.triangles(), b.triangles());
    assert_eq!(a.vertices(), b.vertices());
}

#[test]
fn off_and_obj_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = domains::two_hole_square::<f64>(0.2).unwrap();
    let off = dir.path().join("m.off");
    std::fs::write(&off, mesh::write_off(&m)).unwrap();
    same(&m, &mesh::read_mesh(&off, None).unwrap());
    let obj = dir.path().join("m.txt");
    std::fs::write(&obj, mesh::write_obj(&m)).unwrap();
    same(&m, &mesh::read_mesh(&obj, Some(MeshFormat::Obj)).unwrap());
    assert!(mesh::read_mesh::<f64>(&obj, None).is_err());
    assert_eq!(m.boundary_loops().len(), 3);
    assert_eq!(m.euler_characteristic(), -1);
}

fn quarters(m: &Mesh) -> Vec<i32> {
    let mut q: Vec<i32> =
        mesh::detect_corners(m, 20f64.to_radians()).unwrap().iter().map(|c| c.quarters()).collect();
    q.sort_unstable();
    q
}

#[test]
fn corner_indices_of_polygons() {
    assert_eq!(quarters(&domains::unit_square(0.1).unwrap()), vec![1; 4]);
    assert_eq!(quarters(&domains::l_shape(0.1).unwrap()), vec![-1, 1, 1, 1, 1, 1]);
    assert_eq!(quarters(&domains::hexagon(0.1).unwrap()), vec![1; 6]);
    assert!(quarters(&domains::disk_264().unwrap()).is_empty());
    assert_eq!(quarters(&domains::half_disk(40, 0.1).unwrap()), vec![1, 1]);
}

#[test]
fn boundary_degrees() {
    let degree = |m: &Mesh| {
        let corners = mesh::detect_corners(m, 20f64.to_radians()).unwrap();
        let bc = mesh::assign_boundary_condition(m, &corners).unwrap();
        mesh::total_boundary_degree(&bc, m).unwrap()
    };
    assert_eq!(degree(&domains::disk_264().unwrap()), 4);
    assert_eq!(degree(&domains::unit_square(0.1).unwrap()), 0);
    assert_eq!(degree(&domains::hexagon(0.1).unwrap()), -2);
    assert_eq!(degree(&domains::annulus(0.3, 0.1).unwrap()), 0);
}

#[test]
fn corner_overrides_replace_detected_indices() {
    let m = domains::unit_square::<f64>(0.1).unwrap();
    let mut corners = mesh::detect_corners(&m, 20f64.to_radians()).unwrap();
    let v = corners[0].vertex_id;
    let text = format!("# chamfer\n{v} 0\n");
    let ov = mesh::parse_corner_overrides(&text).unwrap();
    mesh::apply_corner_overrides(&m, &mut corners, &ov).unwrap();
    assert_eq!(corners.iter().map(|c| c.quarters()).sum::<i32>(), 3);
    assert!(mesh::apply_corner_overrides(&m, &mut corners, &[(v, 5)]).is_err());
    assert!(mesh::parse_corner_overrides("1 x").is_err());
}
