//! Files written by the pipeline and the manifest that lists them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use num_rational::Ratio;
use quadgl::crossfield::Singularity;
use quadgl::gl::IterationRecord;
use quadgl::layout::ValidationReport;
use quadgl::Mesh;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Serialize, Deserialize)]
pub struct FieldFile {
    pub nodes: usize,
    /// `[re, im]` per node.
    pub values: Vec<[f64; 2]>,
    pub method: String,
    pub converged: bool,
    pub iterations: usize,
}

impl FieldFile {
    pub fn new(values: &[Complex<f64>], method: &str, converged: bool, iterations: usize) -> Self {
        Self {
            nodes: values.len(),
            values: values.iter().map(|z| [z.re, z.im]).collect(),
            method: method.into(),
            converged,
            iterations,
        }
    }

    pub fn read(path: &Path, mesh: &Mesh) -> Result<Vec<Complex<f64>>, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let f: FieldFile =
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        if f.nodes != mesh.num_vertices() || f.values.len() != f.nodes {
            return Err(Failure::input(format!(
                "{}: field has {} values, mesh has {} nodes",
                path.display(),
                f.values.len(),
                mesh.num_vertices()
            )));
        }
        if f.values.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Failure::input(format!("{}: non-finite field value", path.display())));
        }
        Ok(f.values.iter().map(|v| Complex::new(v[0], v[1])).collect())
    }
}

#[derive(Serialize)]
pub struct SingularityEntry {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub face: usize,
    pub rep_degree: i32,
    /// Cross field index as an exact fraction.
    pub index: String,
    /// Separatrix angles in degrees.
    pub exits: Vec<f64>,
}

#[derive(Serialize)]
pub struct SingularityReport {
    pub count: usize,
    pub total_index: String,
    pub corner_index: String,
    pub euler_characteristic: i64,
    pub poincare_hopf: bool,
    pub singularities: Vec<SingularityEntry>,
}

/// Rounds so that reports do not depend on the last bits of a solve.
pub fn round(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

pub fn singularity_report(
    mesh: &Mesh,
    sings: &[Singularity<f64>],
    corners: &[quadgl::mesh::Corner<f64>],
) -> SingularityReport {
    let ph = quadgl::crossfield::poincare_hopf_check(sings, corners, mesh);
    SingularityReport {
        count: sings.len(),
        total_index: ph.interior.to_string(),
        corner_index: ph.boundary.to_string(),
        euler_characteristic: ph.euler_characteristic,
        poincare_hopf: ph.holds(),
        singularities: sings
            .iter()
            .map(|s| SingularityEntry {
                id: s.id,
                x: round(s.location.x, 9),
                y: round(s.location.y, 9),
                face: s.face_id,
                rep_degree: s.rep_degree,
                index: quarter_fraction(s.rep_degree),
                exits: s.exit_directions.iter().map(|a| round(a.to_degrees(), 6)).collect(),
            })
            .collect(),
    }
}

pub fn quarter_fraction(d: i32) -> String {
    Ratio::new(d as i64, 4).to_string()
}

pub fn convergence_csv(trace: &[IterationRecord<f64>]) -> String {
    let mut s = String::from("iteration,change,dirichlet\n");
    for r in trace {
        s.push_str(&format!("{},{:e},{:e}\n", r.iteration, r.change, r.dirichlet));
    }
    s
}

#[derive(Serialize)]
pub struct FaceEntry {
    pub id: usize,
    pub kind: &'static str,
    pub corners: usize,
    pub holes: usize,
    pub index_sum: String,
}

#[derive(Serialize)]
pub struct ValidationFile {
    pub valid: bool,
    pub faces: usize,
    pub quad: usize,
    pub annulus: usize,
    pub t_junction_faces: usize,
    pub other: usize,
    pub t_junctions: usize,
    pub separatrices: usize,
    pub unresolved: usize,
    pub limit_cycles: usize,
    pub euler_characteristic: i64,
    pub max_deviation_deg: f64,
    pub violations: Vec<String>,
    pub face_checks: Vec<FaceEntry>,
}

pub fn validation_file(
    report: &ValidationReport<f64>,
    layout: &quadgl::layout::QuadLayout<f64>,
    separatrices: usize,
    unresolved: usize,
    limit_cycles: usize,
) -> ValidationFile {
    use quadgl::layout::FaceKind;
    ValidationFile {
        valid: report.is_valid(),
        faces: report.faces.len(),
        quad: report.count(FaceKind::Quad),
        annulus: report.count(FaceKind::Annulus),
        t_junction_faces: report.count(FaceKind::TJunction),
        other: report.count(FaceKind::Other),
        t_junctions: layout.t_junctions.len(),
        separatrices,
        unresolved,
        limit_cycles,
        euler_characteristic: layout.euler_characteristic(),
        max_deviation_deg: round(report.max_deviation_deg(), 6),
        violations: report.violations.iter().map(|v| v.to_string()).collect(),
        face_checks: report
            .faces
            .iter()
            .map(|f| FaceEntry {
                id: f.face,
                kind: f.kind.name(),
                corners: f.corners().count(),
                holes: f.holes,
                index_sum: f.index_sum.to_string(),
            })
            .collect(),
    }
}

/// Output directory plus the record of everything written into it.
pub struct OutDir {
    dir: PathBuf,
    written: BTreeMap<String, String>,
    timings: Vec<(String, f64)>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), written: BTreeMap::new(), timings: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        self.write_at(&self.path(name), contents)
    }

    pub fn write_at(&mut self, path: &Path, contents: &str) -> Result<PathBuf, Failure> {
        fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(contents.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let key = path.strip_prefix(&self.dir).unwrap_or(path).display().to_string();
        self.written.insert(key, hex);
        Ok(path.to_path_buf())
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<PathBuf, Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn time(&mut self, phase: &str, seconds: f64) {
        self.timings.push((phase.into(), seconds));
    }

    /// Writes `manifest.json`: the command and its settings, the tool
    /// version, a SHA-256 of every output, and wall-clock time per phase.
    /// Only the timings vary between identical runs.
    pub fn finish(mut self, command: &str, config: serde_json::Value, exit_code: i32) -> Result<(), Failure> {
        let manifest = serde_json::json!({
            "tool": "quadgl",
            "version": format!("{} ({})", env!("CARGO_PKG_VERSION"), env!("QUADGL_GIT_DESCRIBE")),
            "command": command,
            "config": config,
            "exit_code": exit_code,
            "outputs": self.written,
            "timings_seconds": self.timings.iter().map(|(k, v)| serde_json::json!({ "phase": k, "seconds": v })).collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::input(e.to_string()))?;
        text.push('\n');
        let path = self.path("manifest.json");
        fs::write(&path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        self.written.clear();
        Ok(())
    }
}
