//! `quadgl`: cross fields, separatrix partitions and quad layouts from the
//! command line.
//!
//! Exit codes: 0 success, 1 input error, 2 non-convergence, 3 partition or
//! layout failure (including a layout that fails validation).

mod artifacts;
mod pipeline;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;
use quadgl::crossfield::detect_singularities;
use quadgl::gl::{
    canonical_harmonic_map, direct_minimize_gl, dirichlet_energy, CanonicalOptions, DirectParams, SingularityConfig,
};
use quadgl::{domains, Mesh};
use serde::Serialize;

use artifacts::{convergence_csv, quarter_fraction, round, singularity_report, FieldFile, OutDir};
use pipeline::{field_svg, layout_stage, load, pair_singularities, run_mbo, Problem, Settings};

/// Paired singularities of the two minimizers may be this many mean edge lengths apart.
const PAIR_TOLERANCE_EDGES: f64 = 5.0;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(e: impl fmt::Display) -> Self {
        Self { code: 1, message: e.to_string() }
    }

    pub fn convergence(e: impl fmt::Display) -> Self {
        Self { code: 2, message: e.to_string() }
    }

    pub fn partition(e: impl fmt::Display) -> Self {
        Self { code: 3, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "quadgl", version, about = "Boundary-aligned cross fields and quad layouts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Mesh format (off or obj); inferred from the extension by default.
    #[arg(long)]
    format: Option<String>,
    /// Diffusion time step in units of 1 / lambda_1.
    #[arg(long, default_value_t = 1.0)]
    tau_scale: f64,
    /// Stop once the update norm is at most 2 n delta.
    #[arg(long, default_value_t = 1e-4)]
    delta: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Ginzburg-Landau parameter; twice the mean edge length by default.
    #[arg(long)]
    eps: Option<f64>,
    /// Snap radius in local edge lengths.
    #[arg(long, default_value_t = 1.5)]
    snap_tol: f64,
    /// Tracing step in mean edge lengths.
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    /// Seed for the background streamlines of pictures.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corner index overrides: lines of `vertex_id k`.
    #[arg(long)]
    corners: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Where to write the SVG (inside the output directory by default).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Draw mesh edges in the SVG.
    #[arg(long)]
    show_mesh: bool,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            format: self.format.clone(),
            tau_scale: self.tau_scale,
            delta: self.delta,
            max_iter: self.max_iter,
            eps: self.eps,
            snap_tol: self.snap_tol,
            step: self.step,
            seed: self.seed,
            corners: self.corners.clone(),
            out: self.out.clone(),
            svg: self.svg.clone(),
            show_mesh: self.show_mesh,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the Ginzburg-Landau energy by diffusion and normalization.
    Field {
        mesh: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Trace separatrices and build the quad layout.
    Partition {
        mesh: PathBuf,
        /// Field written by `field`; computed inline when absent.
        #[arg(long)]
        field: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the harmonic field with prescribed singularities, then partition.
    Prescribe {
        mesh: PathBuf,
        /// JSON list of `{x, y, degree}`.
        config: PathBuf,
        /// Extra phase turns per hole, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hole_turns: Option<Vec<i64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare diffusion-normalization with direct energy descent.
    Compare {
        mesh: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a layout file over its mesh.
    Render {
        mesh: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        /// Field for singularity markers and streamlines.
        #[arg(long)]
        field: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write one of the built-in test domains as an OFF file.
    Domain {
        /// disk, disk264, square, half-disk, hexagon, l-shape, two-hole,
        /// mushroom, chamfered-u or annulus.
        name: String,
        path: PathBuf,
        /// Target edge length.
        #[arg(long)]
        size: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Field { mesh, common } => cmd_field(&mesh, &common.settings()),
        Command::Partition { mesh, field, common } => cmd_partition(&mesh, field.as_deref(), &common.settings()),
        Command::Prescribe { mesh, config, hole_turns, common } => {
            cmd_prescribe(&mesh, &config, hole_turns, &common.settings())
        }
        Command::Compare { mesh, common } => cmd_compare(&mesh, &common.settings()),
        Command::Render { mesh, layout, field, common } => cmd_render(&mesh, &layout, field.as_deref(), &common.settings()),
        Command::Domain { name, path, size } => cmd_domain(&name, &path, size),
    }
}

fn config_json(command: &str, mesh: &std::path::Path, settings: &Settings, extra: serde_json::Value) -> serde_json::Value {
    serde_json::json!({ "command": command, "mesh": mesh.display().to_string(), "settings": settings, "extra": extra })
}

fn cmd_field(path: &std::path::Path, settings: &Settings) -> Result<u8, Failure> {
    settings.validate()?;
    let mut out = OutDir::create(&settings.out)?;
    let t = Instant::now();
    let p = load(path, settings)?;
    out.time("load", t.elapsed().as_secs_f64());
    let t = Instant::now();
    let r = run_mbo(&p, settings)?;
    out.time("mbo", t.elapsed().as_secs_f64());
    out.json("field.json", &FieldFile::new(r.field.values(), "mbo", r.converged, r.iterations))?;
    out.write("convergence.csv", &convergence_csv(&r.trace))?;
    let sings = detect_singularities(&r.field);
    out.json("singularities.json", &singularity_report(&p.mesh, &sings, &p.corners))?;
    if settings.svg.is_some() {
        let svg = field_svg(&p, r.field.clone(), &sings, settings)?;
        out.write_at(settings.svg.as_deref().expect("checked"), &svg)?;
    }
    let code = if r.converged { 0 } else { 2 };
    println!(
        "field: {} iterations, {}, {} singularities [{}]",
        r.iterations,
        if r.converged { "converged" } else { "not converged" },
        sings.len(),
        sings.iter().map(|s| quarter_fraction(s.rep_degree)).collect::<Vec<_>>().join(", ")
    );
    out.finish("field", config_json("field", path, settings, serde_json::Value::Null), code as i32)?;
    Ok(code)
}

fn finish_layout(
    out: OutDir,
    summary: pipeline::LayoutSummary,
    command: &str,
    config: serde_json::Value,
) -> Result<u8, Failure> {
    let code = if summary.valid { 0 } else { 3 };
    println!(
        "{command}: {} faces, {} T-junctions, {} violations",
        summary.faces, summary.t_junctions, summary.violations
    );
    out.finish(command, config, code as i32)?;
    Ok(code)
}

fn cmd_partition(path: &std::path::Path, field: Option<&std::path::Path>, settings: &Settings) -> Result<u8, Failure> {
    settings.validate()?;
    let mut out = OutDir::create(&settings.out)?;
    let p = load(path, settings)?;
    let values = match field {
        Some(f) => FieldFile::read(f, &p.mesh)?,
        None => {
            let t = Instant::now();
            let r = run_mbo(&p, settings)?;
            out.time("mbo", t.elapsed().as_secs_f64());
            if !r.converged {
                return Err(Failure::convergence(format!("field did not converge in {} iterations", r.iterations)));
            }
            out.json("field.json", &FieldFile::new(r.field.values(), "mbo", true, r.iterations))?;
            r.field.into_values()
        }
    };
    let summary = layout_stage(&p, values, settings, &mut out)?;
    let extra = serde_json::json!({ "field": field.map(|f| f.display().to_string()) });
    finish_layout(out, summary, "partition", config_json("partition", path, settings, extra))
}

fn cmd_prescribe(
    path: &std::path::Path,
    config: &std::path::Path,
    hole_turns: Option<Vec<i64>>,
    settings: &Settings,
) -> Result<u8, Failure> {
    settings.validate()?;
    let mut out = OutDir::create(&settings.out)?;
    let p = load(path, settings)?;
    let text = std::fs::read_to_string(config).map_err(|e| Failure::input(format!("{}: {e}", config.display())))?;
    let cfg = SingularityConfig::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", config.display())))?;
    let options = CanonicalOptions { hole_turns: hole_turns.clone(), ..Default::default() };
    let t = Instant::now();
    let field = canonical_harmonic_map(&p.mesh, &p.fem, &p.bc, &cfg, &options).map_err(|e| match e {
        quadgl::Error::DegreeMismatch { config, boundary } => Failure::input(format!(
            "singularity degrees sum to {config}, boundary degree is {boundary}"
        )),
        e => Failure::input(e),
    })?;
    out.time("canonical", t.elapsed().as_secs_f64());
    out.json("field.json", &FieldFile::new(field.values(), "canonical", true, 0))?;
    let summary = layout_stage(&p, field.into_values(), settings, &mut out)?;
    let extra = serde_json::json!({ "config": config.display().to_string(), "hole_turns": hole_turns });
    finish_layout(out, summary, "prescribe", config_json("prescribe", path, settings, extra))
}

#[derive(Serialize)]
struct MethodRow {
    method: &'static str,
    iterations: usize,
    converged: bool,
    dirichlet: f64,
    singularities: Vec<String>,
}

fn multiset(sings: &[quadgl::crossfield::Singularity<f64>]) -> Vec<String> {
    let mut d: Vec<i32> = sings.iter().map(|s| s.rep_degree).collect();
    d.sort_unstable();
    d.into_iter().map(quarter_fraction).collect()
}

fn cmd_compare(path: &std::path::Path, settings: &Settings) -> Result<u8, Failure> {
    settings.validate()?;
    let mut out = OutDir::create(&settings.out)?;
    let p: Problem = load(path, settings)?;
    let mesh: &Mesh = &p.mesh;

    let t = Instant::now();
    let mbo = run_mbo(&p, settings)?;
    let mbo_time = t.elapsed().as_secs_f64();
    out.time("mbo", mbo_time);

    let t = Instant::now();
    let init = pipeline::harmonic_start(&p)?;
    let params = DirectParams { delta: settings.delta, max_iter: settings.max_iter, tau_scale: settings.tau_scale, ..Default::default() };
    let direct = direct_minimize_gl(mesh, &p.fem, &p.bc, settings.eps(mesh), init, &params).map_err(Failure::input)?;
    let direct_time = t.elapsed().as_secs_f64();
    out.time("direct", direct_time);

    let sa = detect_singularities(&mbo.field);
    let sb = detect_singularities(&direct.field);
    let rows = [
        MethodRow {
            method: "mbo",
            iterations: mbo.iterations,
            converged: mbo.converged,
            dirichlet: round(dirichlet_energy(&p.fem, mbo.field.values()), 9),
            singularities: multiset(&sa),
        },
        MethodRow {
            method: "direct",
            iterations: direct.iterations,
            converged: direct.converged,
            dirichlet: round(dirichlet_energy(&p.fem, direct.field.values()), 9),
            singularities: multiset(&sb),
        },
    ];
    let h = mesh.mean_edge_length();
    let paired = pair_singularities(&sa, &sb);
    let matched = paired.is_some_and(|d| d <= PAIR_TOLERANCE_EDGES * h);
    let report = serde_json::json!({
        "nodes": mesh.num_vertices(),
        "mean_edge": round(h, 12),
        "methods": rows,
        "multisets_match": paired.is_some(),
        "max_pair_distance": paired.map(|d| round(d, 9)),
        "max_pair_distance_edges": paired.map(|d| round(d / h, 6)),
        "tolerance_edges": PAIR_TOLERANCE_EDGES,
        "matched": matched,
    });
    out.json("compare.json", &report)?;

    let mut table = format!("{:<8} {:>10} {:>10} {:>14}  singularities\n", "method", "iterations", "time_s", "dirichlet");
    for (r, time) in rows.iter().zip([mbo_time, direct_time]) {
        table.push_str(&format!(
            "{:<8} {:>10} {:>10.3} {:>14.6}  {}\n",
            r.method,
            r.iterations,
            time,
            r.dirichlet,
            r.singularities.join(" ")
        ));
    }
    match paired {
        Some(d) => table.push_str(&format!("max paired distance: {:.4} ({:.2} mean edges)\n", d, d / h)),
        None => table.push_str("singularity multisets differ\n"),
    }
    print!("{table}");
    let code = if !mbo.converged || !direct.converged {
        2
    } else if matched {
        0
    } else {
        3
    };
    out.finish("compare", config_json("compare", path, settings, serde_json::Value::Null), code as i32)?;
    Ok(code)
}

fn cmd_render(
    path: &std::path::Path,
    layout_path: &std::path::Path,
    field: Option<&std::path::Path>,
    settings: &Settings,
) -> Result<u8, Failure> {
    settings.validate()?;
    let p = load(path, settings)?;
    let layout = quadgl::layout::import_layout::<f64>(layout_path)
        .map_err(|e| Failure::input(format!("{}: {e}", layout_path.display())))?;
    let (sings, lines) = match field {
        Some(f) => {
            let values = FieldFile::read(f, &p.mesh)?;
            let rf = quadgl::gl::RepresentationField::new(&p.mesh, values).map_err(Failure::input)?;
            let sings = detect_singularities(&rf);
            let cf = quadgl::crossfield::CrossField::new(rf);
            let lines = pipeline::background_streamlines(&cf, &sings, &p.corners, &settings.trace(&p.mesh), settings.seed);
            (sings, lines)
        }
        None => (Vec::new(), Vec::new()),
    };
    let svg = quadgl::layout::render_svg(
        &p.mesh,
        &pipeline::svg_singularities(&sings),
        &lines,
        &layout,
        &quadgl::layout::SvgOptions { show_mesh: settings.show_mesh, ..Default::default() },
    );
    let mut out = OutDir::create(&settings.out)?;
    let target = settings.svg.clone().unwrap_or_else(|| out.path("layout.svg"));
    out.write_at(&target, &svg)?;
    info!("wrote {}", target.display());
    let extra = serde_json::json!({ "layout": layout_path.display().to_string() });
    out.finish("render", config_json("render", path, settings, extra), 0)?;
    Ok(0)
}

fn cmd_domain(name: &str, path: &std::path::Path, size: Option<f64>) -> Result<u8, Failure> {
    if size.is_some_and(|h| !(h > 0.0 && h.is_finite())) {
        return Err(Failure::input("--size must be positive"));
    }
    let h = |default: f64| size.unwrap_or(default);
    let mut overrides: Vec<usize> = Vec::new();
    let mesh: Mesh = match name {
        "disk" => domains::disk_hex(size.map_or(44, |h| (1.0 / h).round().max(1.0) as usize)),
        "disk264" => domains::disk_264(),
        "square" => domains::unit_square(h(0.05)),
        "half-disk" => {
            let h = h(0.1);
            domains::half_disk(((std::f64::consts::PI / h).round() as usize + 1).max(3), h)
        }
        "hexagon" => domains::hexagon(h(0.05)),
        "l-shape" => domains::l_shape(h(0.08)),
        "two-hole" => domains::two_hole_square(h(0.08)),
        "mushroom" => domains::mushroom(h(0.05)),
        "chamfered-u" => domains::chamfered_u(h(0.04)).map(|(m, c)| {
            overrides = c;
            m
        }),
        "annulus" => domains::annulus(0.3, h(0.04)),
        other => return Err(Failure::input(format!("unknown domain {other:?}"))),
    }
    .map_err(Failure::input)?;
    std::fs::write(path, quadgl::mesh::write_off(&mesh)).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if !overrides.is_empty() {
        // Chamfers are treated as ordinary right-angle corners.
        let text: String = overrides.iter().map(|v| format!("{v} 1\n")).collect();
        let cpath = path.with_extension("corners");
        std::fs::write(&cpath, text).map_err(|e| Failure::input(format!("{}: {e}", cpath.display())))?;
    }
    println!("{name}: {} nodes, {} triangles", mesh.num_vertices(), mesh.num_triangles());
    Ok(0)
}
