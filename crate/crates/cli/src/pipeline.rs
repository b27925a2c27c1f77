//! Pipeline stages shared by the subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use num_complex::Complex;
use quadgl::crossfield::{detect_singularities, CrossField, Singularity};
use quadgl::fem::{self, DirichletSolver, FemSystem};
use quadgl::gl::{harmonic_initialization, mbo_minimize, MboParams, MboResult, RepresentationField};
use quadgl::layout::{self, LayoutParams, SvgOptions, SvgSingularity};
use quadgl::mesh::{self, BoundaryCondition, Corner, MeshFormat};
use quadgl::trace::{self, singular_targets, trace_streamline, TraceParams};
use quadgl::{Mesh, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::artifacts::{singularity_report, validation_file, OutDir};
use crate::Failure;

/// Corners whose interior angle is within this of pi are not corners.
pub const CORNER_ANGLE_DEG: f64 = 20.0;

/// Number of background streamlines drawn in SVG output.
const STREAMLINES: usize = 60;

/// Target grid cell size in mean edge lengths.
const GRID_EDGES: f64 = 4.0;

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub format: Option<String>,
    pub tau_scale: f64,
    pub delta: f64,
    pub max_iter: usize,
    pub eps: Option<f64>,
    pub snap_tol: f64,
    pub step: f64,
    pub seed: u64,
    pub corners: Option<PathBuf>,
    pub out: PathBuf,
    pub svg: Option<PathBuf>,
    pub show_mesh: bool,
}

impl Settings {
    pub fn validate(&self) -> Result<(), Failure> {
        let positive = [
            ("tau-scale", self.tau_scale),
            ("delta", self.delta),
            ("snap-tol", self.snap_tol),
            ("step", self.step),
            ("eps", self.eps.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::input(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Failure::input("--max-iter must be at least 1"));
        }
        Ok(())
    }

    pub fn mbo(&self) -> MboParams<f64> {
        MboParams { tau_scale: self.tau_scale, delta: self.delta, max_iter: self.max_iter }
    }

    pub fn trace(&self, mesh: &Mesh) -> TraceParams<f64> {
        TraceParams {
            step: mesh.mean_edge_length() * self.step,
            snap_factor: self.snap_tol,
            ..TraceParams::for_mesh(mesh)
        }
    }

    pub fn eps(&self, mesh: &Mesh) -> f64 {
        self.eps.unwrap_or_else(|| quadgl::gl::default_eps(mesh))
    }
}

/// A mesh with its corners and boundary data.
pub struct Problem {
    pub mesh: Mesh,
    pub corners: Vec<Corner<f64>>,
    pub bc: BoundaryCondition<f64>,
    pub fem: FemSystem<f64>,
}

pub fn load(path: &Path, settings: &Settings) -> Result<Problem, Failure> {
    let format = match settings.format.as_deref() {
        None => None,
        Some("off") => Some(MeshFormat::Off),
        Some("obj") => Some(MeshFormat::Obj),
        Some(f) => return Err(Failure::input(format!("unknown mesh format {f:?}"))),
    };
    let mesh: Mesh = mesh::read_mesh(path, format).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut corners = mesh::detect_corners(&mesh, CORNER_ANGLE_DEG.to_radians()).map_err(Failure::input)?;
    if let Some(p) = &settings.corners {
        let text = std::fs::read_to_string(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
        let ov = mesh::parse_corner_overrides(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
        mesh::apply_corner_overrides(&mesh, &mut corners, &ov).map_err(Failure::input)?;
    }
    let bc = mesh::assign_boundary_condition(&mesh, &corners).map_err(Failure::input)?;
    let fem = fem::assemble(&mesh).map_err(Failure::input)?;
    info!("{}: {} nodes, {} triangles, {} corners", path.display(), mesh.num_vertices(), mesh.num_triangles(), corners.len());
    Ok(Problem { mesh, corners, bc, fem })
}

pub fn harmonic_start(p: &Problem) -> Result<Vec<Complex<f64>>, Failure> {
    let solver = DirichletSolver::new(&p.mesh, &p.fem).map_err(Failure::input)?;
    Ok(harmonic_initialization(&solver, &p.bc))
}

pub fn run_mbo<'m>(p: &'m Problem, settings: &Settings) -> Result<MboResult<'m, f64>, Failure> {
    let init = harmonic_start(p)?;
    mbo_minimize(&p.mesh, &p.fem, &p.bc, &settings.mbo(), init).map_err(Failure::input)
}

/// Streamlines from seeded random points, for the background of a picture.
pub fn background_streamlines(cf: &CrossField<f64>, sings: &[Singularity<f64>], corners: &[Corner<f64>], params: &TraceParams<f64>, seed: u64) -> Vec<Vec<Point>> {
    let mesh = cf.mesh();
    let targets = singular_targets(cf, sings, corners, params).unwrap_or_default();
    let params = TraceParams { max_length: mesh.diameter() * 0.5, ..*params };
    let (lo, hi) = mesh.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..STREAMLINES * 20 {
        if out.len() == STREAMLINES {
            break;
        }
        let p = Point::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        let dir = Point::polar(rng.gen_range(0.0..std::f64::consts::TAU));
        if mesh.locate(p).is_none() {
            continue;
        }
        if let Ok(s) = trace_streamline(cf, p, dir, &params, &targets, None) {
            out.push(s.points);
        }
    }
    out
}

pub fn svg_singularities(sings: &[Singularity<f64>]) -> Vec<SvgSingularity<f64>> {
    sings.iter().map(|s| SvgSingularity { location: s.location, rep_degree: s.rep_degree }).collect()
}

/// Summary of a layout run, for stdout and tests.
pub struct LayoutSummary {
    pub valid: bool,
    pub faces: usize,
    pub t_junctions: usize,
    pub violations: usize,
}

#[derive(Serialize)]
struct GridEntry {
    face: usize,
    m: usize,
    n: usize,
    min_jacobian: f64,
    /// Layout nodes at parameters (0,0), (1,0), (1,1), (0,1).
    corners: [usize; 4],
    /// Row-major, `(m + 1) * (n + 1)` points.
    points: Vec<[f64; 2]>,
}

/// Structured grids of the quad faces.
fn grids(layout: &layout::QuadLayout<f64>, report: &layout::ValidationReport<f64>, cell: f64) -> Result<Vec<GridEntry>, Failure> {
    let mut out = Vec::new();
    for f in report.faces.iter().filter(|f| f.kind == layout::FaceKind::Quad) {
        let (m, n) = layout::grid_resolution(layout, f.face, cell).map_err(Failure::partition)?;
        let g = layout::map_grid_into_region(layout, f.face, m, n).map_err(Failure::partition)?;
        out.push(GridEntry {
            face: g.face,
            m: g.m,
            n: g.n,
            min_jacobian: g.min_jacobian(),
            corners: g.corners,
            points: g.points.iter().map(|p| [p.x, p.y]).collect(),
        });
    }
    Ok(out)
}

/// Traces, partitions and validates, writing `singularities.json`,
/// `layout.json`, `validation.json`, `grids.json` and an SVG. Tracing and layout
/// failures carry exit code 3.
pub fn layout_stage(
    p: &Problem,
    values: Vec<Complex<f64>>,
    settings: &Settings,
    out: &mut OutDir,
) -> Result<LayoutSummary, Failure> {
    let mesh = &p.mesh;
    let field = RepresentationField::new(mesh, values).map_err(Failure::input)?;
    let sings = detect_singularities(&field);
    out.json("singularities.json", &singularity_report(mesh, &sings, &p.corners))?;
    let cf = CrossField::new(field);
    let params = settings.trace(mesh);

    let t = Instant::now();
    let set = trace::trace_separatrices(&cf, &sings, &p.corners, &params).map_err(Failure::partition)?;
    let result = trace::partition(&set, &params).map_err(Failure::partition)?;
    out.time("trace", t.elapsed().as_secs_f64());
    info!("{} separatrices, {} unresolved, {} closed orbits", set.separatrices.len(), set.p.len(), set.cycles.len());

    let t = Instant::now();
    let lp = LayoutParams { tangent_length: params.step * 2.0, ..LayoutParams::for_mesh(mesh) };
    let layout = layout::build_layout(mesh, &result, &sings, &p.corners, &lp).map_err(Failure::partition)?;
    let report = layout::validate_regions(&layout);
    let grids = grids(&layout, &report, GRID_EDGES * mesh.mean_edge_length())?;
    out.time("layout", t.elapsed().as_secs_f64());
    out.json("grids.json", &grids)?;

    out.write("layout.json", &(layout::layout_to_json(&layout).map_err(Failure::partition)? + "\n"))?;
    out.json("validation.json", &validation_file(&report, &layout, set.separatrices.len(), set.p.len(), set.cycles.len()))?;
    let lines = background_streamlines(&cf, &sings, &p.corners, &params, settings.seed);
    let svg = layout::render_svg(
        mesh,
        &svg_singularities(&sings),
        &lines,
        &layout,
        &SvgOptions { show_mesh: settings.show_mesh, ..Default::default() },
    );
    let svg_path = settings.svg.clone().unwrap_or_else(|| out.path("layout.svg"));
    out.write_at(&svg_path, &svg)?;
    for v in &report.violations {
        warn!("{v}");
    }
    Ok(LayoutSummary {
        valid: report.is_valid(),
        faces: layout.faces.len(),
        t_junctions: layout.t_junctions.len(),
        violations: report.violations.len(),
    })
}

/// Picture of a field alone: boundary, singularities and streamlines.
pub fn field_svg(p: &Problem, field: RepresentationField<'_, f64>, sings: &[Singularity<f64>], settings: &Settings) -> Result<String, Failure> {
    let mesh = &p.mesh;
    let layout = layout::build_layout(mesh, &Default::default(), &[], &p.corners, &LayoutParams::for_mesh(mesh))
        .map_err(Failure::input)?;
    let cf = CrossField::new(field);
    let lines = background_streamlines(&cf, sings, &p.corners, &settings.trace(mesh), settings.seed);
    Ok(layout::render_svg(
        mesh,
        &svg_singularities(sings),
        &lines,
        &layout,
        &SvgOptions { show_mesh: settings.show_mesh, ..Default::default() },
    ))
}

/// Optimal pairing of two point sets with equal degrees: exhaustive for
/// small groups, greedy otherwise. Returns the largest paired distance, or
/// `None` when the degree multisets differ.
pub fn pair_singularities(a: &[Singularity<f64>], b: &[Singularity<f64>]) -> Option<f64> {
    let mut degrees: Vec<i32> = a.iter().map(|s| s.rep_degree).collect();
    let mut other: Vec<i32> = b.iter().map(|s| s.rep_degree).collect();
    degrees.sort_unstable();
    other.sort_unstable();
    if degrees != other {
        return None;
    }
    degrees.dedup();
    let mut worst: f64 = 0.0;
    for d in degrees {
        let pa: Vec<Point> = a.iter().filter(|s| s.rep_degree == d).map(|s| s.location).collect();
        let pb: Vec<Point> = b.iter().filter(|s| s.rep_degree == d).map(|s| s.location).collect();
        worst = worst.max(bottleneck(&pa, &pb));
    }
    Some(worst)
}

fn bottleneck(a: &[Point], b: &[Point]) -> f64 {
    if a.len() <= 8 {
        let mut perm: Vec<usize> = (0..b.len()).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |p| {
            let cost = a.iter().zip(p).map(|(x, &j)| x.dist(b[j])).fold(0.0, f64::max);
            best = best.min(cost);
        });
        return if a.is_empty() { 0.0 } else { best };
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = (0..b.len())
            .filter(|&j| !used[j])
            .map(|j| (j, x.dist(b[j])))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal counts");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}
