//! Command implementations: solve sweeps, pattern comparison, benchmark.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use emscat::blockio;
use emscat::excitation::PlaneWave;
use emscat::mesh::{io as mesh_io, MeshFormat, SurfaceMesh};
use emscat::mie::MieSolution;
use emscat::postprocess::{
    phi_cut, read_pattern_csv, theta_cut, write_pattern_csv, Direction, FarFieldPattern,
};
use emscat::solver::{
    solve_pmchwt, solve_schur, solve_single_source, Scatterer, Scene, SolveResult, SolverOptions,
};

use crate::config::{ConfigError, CutConfig, RunConfig};
use crate::summary::{to_jsonl, SolveRecord};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mesh(#[from] emscat::mesh::MeshError),
    #[error(transparent)]
    Solve(#[from] emscat::solver::SolveError),
    #[error(transparent)]
    Pattern(#[from] emscat::postprocess::PatternError),
    #[error(transparent)]
    Excitation(#[from] emscat::excitation::ExcitationError),
    #[error(transparent)]
    Mie(#[from] emscat::mie::MieError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn load_scene(cfg: &RunConfig, base: &Path) -> Result<Scene, RunError> {
    let mut scatterers = Vec::new();
    for (i, sc) in cfg.scene.scatterers.iter().enumerate() {
        let path = base.join(&sc.mesh);
        let format = match sc.format.as_deref() {
            Some("msh") => MeshFormat::GmshV2,
            Some("obj") => MeshFormat::Obj,
            Some(other) => return Err(RunError::Other(format!("unknown mesh format {other:?}"))),
            None => MeshFormat::from_extension(&sc.mesh).ok_or_else(|| {
                RunError::Other(format!(
                    "cannot infer mesh format of {:?}; set scatterers[{i}].format",
                    sc.mesh
                ))
            })?,
        };
        let mut mesh: SurfaceMesh = mesh_io::load_mesh(&path, format)?;
        if mesh.orientation_flipped {
            eprintln!(
                "warning: mesh {:?} was inward-oriented; triangles flipped to outward",
                sc.mesh
            );
        }
        mesh.scatterer_id = i;
        scatterers.push(Scatterer::new(mesh, sc.material()));
    }
    Ok(Scene::new(scatterers, cfg.scene.exterior.material())?)
}

fn cut_directions(cut: &CutConfig) -> (Vec<Direction>, String) {
    match (cut.phi_deg, cut.theta_deg) {
        (Some(phi), None) => (phi_cut(phi, cut.step_deg), format!("phi{}", fmt_angle(phi))),
        (None, Some(theta)) => (
            theta_cut(theta, cut.step_deg),
            format!("theta{}", fmt_angle(theta)),
        ),
        _ => unreachable!("validated"),
    }
}

fn fmt_angle(a: f64) -> String {
    if (a - a.round()).abs() < 1e-9 {
        format!("{}", a.round() as i64)
    } else {
        format!("{a}")
    }
}

fn fmt_freq(f: f64) -> String {
    let mhz = f / 1e6;
    if (mhz - mhz.round()).abs() < 1e-9 {
        format!("{}MHz", mhz.round() as i64)
    } else {
        format!("{mhz}MHz")
    }
}

fn default_cuts(cfg: &RunConfig) -> Vec<CutConfig> {
    if cfg.output.cuts.is_empty() {
        vec![CutConfig {
            phi_deg: Some(0.0),
            theta_deg: None,
            step_deg: 1.0,
        }]
    } else {
        cfg.output.cuts.clone()
    }
}

fn run_one_solver(
    name: &str,
    scene: &Scene,
    pw: &PlaneWave,
    opts: &SolverOptions,
) -> Result<SolveResult, RunError> {
    Ok(match name {
        "single_source" => solve_single_source(scene, pw, opts)?,
        "pmchwt" => solve_pmchwt(scene, pw, opts)?,
        "schur" => solve_schur(scene, pw, opts)?,
        other => return Err(RunError::Other(format!("unknown solver {other:?}"))),
    })
}

/// Execute every (frequency, solver) pair; returns a human-readable report.
pub fn run_solve(config_path: &Path, out_override: Option<&Path>) -> Result<String, RunError> {
    let (cfg, base) = RunConfig::load(config_path)?;
    let out_dir = out_override
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| base.join(&cfg.output.dir));
    std::fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;

    let scene = load_scene(&cfg, &base)?;
    let (k_hat, e_hat) = cfg.wave_vectors()?;
    let opts = SolverOptions {
        alpha: cfg.solvers.alpha,
        weight: cfg.solvers.weight,
        quad: cfg.quadrature.quad(),
        retain_admittances: cfg.output.dump_ys,
    };
    let cuts = default_cuts(&cfg);
    let n_total = scene.total_n();

    let mut records: Vec<SolveRecord> = Vec::new();
    let mut report = String::new();
    let _ = writeln!(
        report,
        "scene: {} scatterer(s), N = {n_total}",
        scene.scatterers.len()
    );

    for &f in &cfg.frequencies.frequencies() {
        let pw = PlaneWave::new(k_hat, e_hat, cfg.excitation.amplitude_v_per_m, f)?;
        for solver in &cfg.solvers.run {
            let mut record = SolveRecord {
                solver: solver.clone(),
                frequency_hz: f,
                n_total,
                system_dimension: 0,
                fill_s: 0.0,
                solve_s: 0.0,
                total_s: 0.0,
                peak_matrix_bytes: 0,
                solve_resident_bytes: 0,
                system_bytes: 0,
                condition_system: 0.0,
                condition_blocks: Vec::new(),
                outputs: Vec::new(),
                error: None,
            };
            let outcome: Result<Vec<(String, FarFieldPattern)>, RunError> = (|| {
                let mut patterns = Vec::new();
                if solver == "mie" {
                    let sc = &cfg.scene.scatterers[0];
                    let radius = sc.sphere_radius_m.expect("validated");
                    let epsilon = Complex64::new(1.0, -sc.loss_tangent) * sc.epsilon_r;
                    let t0 = std::time::Instant::now();
                    let mie = MieSolution::new(radius, epsilon, f)?;
                    for cut in &cuts {
                        let (dirs, tag) = cut_directions(cut);
                        patterns.push((tag, mie.far_field(&pw, dirs)?));
                    }
                    record.total_s = t0.elapsed().as_secs_f64();
                } else {
                    let result = run_one_solver(solver, &scene, &pw, &opts)?;
                    record.system_dimension = result.system_dimension;
                    record.fill_s = result.timings.fill_s;
                    record.solve_s = result.timings.solve_s;
                    record.total_s = result.timings.total_s;
                    record.peak_matrix_bytes = result.memory.peak_bytes;
                    record.solve_resident_bytes = result.memory.solve_resident_bytes;
                    record.system_bytes = result.memory.system_bytes;
                    record.condition_system = result.condition_system;
                    record.condition_blocks = result.condition_blocks.clone();
                    for cut in &cuts {
                        let (dirs, tag) = cut_directions(cut);
                        patterns.push((tag, result.far_field(&scene, dirs, &opts.quad)?));
                    }
                    if cfg.output.dump_ys && solver == "single_source" {
                        if let Some(sets) = &result.admittances {
                            for (s, set) in sets.iter().enumerate() {
                                let path = out_dir.join(format!("ys_s{}_f{}.blk", s, fmt_freq(f)));
                                let medium = emscat::medium::MediumParams::new(
                                    &scene.scatterers[s].material,
                                    f,
                                );
                                blockio::write_block(
                                    &path,
                                    &set.y_s.m,
                                    &blockio::BlockHeader::from_medium(set.n(), &medium),
                                )
                                .map_err(|e| RunError::Other(e.to_string()))?;
                            }
                        }
                    }
                }
                Ok(patterns)
            })();

            match outcome {
                Ok(patterns) => {
                    for (tag, pattern) in patterns {
                        let name = format!("{}_f{}_{}.csv", solver, fmt_freq(f), tag);
                        let path = out_dir.join(&name);
                        write_pattern_csv(&path, &pattern)?;
                        record.outputs.push(name);
                    }
                    let _ = writeln!(
                        report,
                        "{:>14} @ {:>9}: dim {:>6}, fill {:8.2}s, solve {:7.2}s, cond {:.2e}, {} file(s)",
                        solver,
                        fmt_freq(f),
                        record.system_dimension,
                        record.fill_s,
                        record.solve_s,
                        record.condition_system,
                        record.outputs.len()
                    );
                }
                Err(e) => {
                    record.error = Some(e.to_string());
                    let _ = writeln!(report, "{:>14} @ {:>9}: FAILED: {e}", solver, fmt_freq(f));
                }
            }
            records.push(record);
        }
        // Persist after every frequency so partial sweeps survive failures.
        let summary_path = out_dir.join("summary.jsonl");
        std::fs::write(&summary_path, to_jsonl(&records)).map_err(io_err(&summary_path))?;
    }
    if cfg.benchmark.enabled {
        let bench = benchmark_report(&records, &scene);
        let path = out_dir.join("benchmark.txt");
        std::fs::write(&path, &bench).map_err(io_err(&path))?;
        report.push_str(&bench);
    }
    let _ = writeln!(report, "outputs in {}", out_dir.display());
    Ok(report)
}

/// Human-readable side-by-side cost table from solve records.
fn benchmark_report(records: &[SolveRecord], scene: &Scene) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "cost comparison ({} scatterer(s), N = {}, {} threads):",
        scene.scatterers.len(),
        scene.total_n(),
        rayon::current_num_threads()
    );
    let _ = writeln!(
        out,
        "  {:>9} {:>14} {:>6} {:>10} {:>10} {:>12} {:>12} {:>12}",
        "freq",
        "solver",
        "dim",
        "fill (s)",
        "solve (s)",
        "system (MB)",
        "resident(MB)",
        "peak (MB)"
    );
    let mb = |b: u64| b as f64 / 1e6;
    for r in records
        .iter()
        .filter(|r| r.error.is_none() && r.solver != "mie")
    {
        let _ = writeln!(
            out,
            "  {:>9} {:>14} {:>6} {:>10.2} {:>10.3} {:>12.2} {:>12.2} {:>12.2}",
            fmt_freq(r.frequency_hz),
            r.solver,
            r.system_dimension,
            r.fill_s,
            r.solve_s,
            mb(r.system_bytes),
            mb(r.solve_resident_bytes),
            mb(r.peak_matrix_bytes),
        );
    }
    let freqs: Vec<f64> = {
        let mut f: Vec<f64> = records.iter().map(|r| r.frequency_hz).collect();
        f.dedup();
        f
    };
    for f in freqs {
        let find = |name: &str| {
            records
                .iter()
                .find(|r| r.frequency_hz == f && r.solver == name && r.error.is_none())
        };
        if let (Some(pm), Some(ss)) = (find("pmchwt"), find("single_source")) {
            let _ = writeln!(
                out,
                "  {}: two-current/single-source ratios: dim {:.0}x, solve {:.2}x, resident-memory {:.2}x, system-memory {:.2}x",
                fmt_freq(f),
                pm.system_dimension as f64 / ss.system_dimension as f64,
                pm.solve_s / ss.solve_s,
                pm.solve_resident_bytes as f64 / ss.solve_resident_bytes as f64,
                pm.system_bytes as f64 / ss.system_bytes as f64,
            );
        }
    }
    let _ = writeln!(out, "{REFERENCE_TABLE}");
    out
}

pub struct PatternDiff {
    pub max: f64,
    pub l2: f64,
}

pub fn run_compare(a: &Path, b: &Path, _tol: f64) -> Result<PatternDiff, RunError> {
    let pa = read_pattern_csv(a)?;
    let pb = read_pattern_csv(b)?;
    if pa.len() != pb.len() {
        return Err(RunError::Other(format!(
            "direction grids differ: {} vs {} samples",
            pa.len(),
            pb.len()
        )));
    }
    for (da, db) in pa.directions.iter().zip(&pb.directions) {
        if (da.theta - db.theta).abs() > 1e-9 || (da.phi - db.phi).abs() > 1e-9 {
            return Err(RunError::Other("direction grids do not match".into()));
        }
    }
    Ok(PatternDiff {
        max: pa.max_difference(&pb)?,
        l2: pa.l2_difference(&pb)?,
    })
}

/// Reference measurements of the 4x4-array experiment on a 2.5 GHz 8-core
/// 16 GB machine (hardware-dependent; shown for orientation only).
pub const REFERENCE_TABLE: &str = "\
reference run (2.5 GHz CPU, 8 cores, 16 GB; 14808 unknowns; not reproducible here):
                      two-current    single-source
  matrix-fill time        467 s           531 s
  solution time          1278 s           168 s
  total time             1745 s           699 s
  memory used           13.08 GB         3.47 GB";

pub fn run_bench(config_path: &Path, out_override: Option<&Path>) -> Result<String, RunError> {
    let (cfg, base) = RunConfig::load(config_path)?;
    let out_dir = out_override
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| base.join(&cfg.output.dir));
    std::fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;

    let scene = load_scene(&cfg, &base)?;
    let (k_hat, e_hat) = cfg.wave_vectors()?;
    let opts = SolverOptions {
        alpha: cfg.solvers.alpha,
        weight: cfg.solvers.weight,
        quad: cfg.quadrature.quad(),
        // Benchmark mode mirrors the lean production path: operators are
        // freed as soon as the formulation allows.
        retain_admittances: false,
    };
    let solvers: Vec<&String> = cfg
        .solvers
        .run
        .iter()
        .filter(|s| s.as_str() != "mie")
        .collect();
    if solvers.is_empty() {
        return Err(RunError::Other(
            "benchmark needs at least one matrix solver".into(),
        ));
    }

    let mut report = String::new();
    let n_total = scene.total_n();
    let _ = writeln!(
        report,
        "benchmark: {} scatterer(s), N = {n_total}, machine: {} threads",
        scene.scatterers.len(),
        rayon::current_num_threads()
    );
    let mut records = Vec::new();
    for &f in &cfg.frequencies.frequencies() {
        let pw = PlaneWave::new(k_hat, e_hat, cfg.excitation.amplitude_v_per_m, f)?;
        let _ = writeln!(report, "frequency {}:", fmt_freq(f));
        let _ = writeln!(
            report,
            "  {:>14} {:>6} {:>10} {:>10} {:>10} {:>12} {:>12} {:>12}",
            "solver",
            "dim",
            "fill (s)",
            "solve (s)",
            "total (s)",
            "system (MB)",
            "resident(MB)",
            "peak (MB)"
        );
        let mut by_solver = Vec::new();
        for solver in &solvers {
            let result = run_one_solver(solver, &scene, &pw, &opts)?;
            let mb = |b: u64| b as f64 / 1e6;
            let _ = writeln!(
                report,
                "  {:>14} {:>6} {:>10.2} {:>10.3} {:>10.2} {:>12.2} {:>12.2} {:>12.2}",
                solver,
                result.system_dimension,
                result.timings.fill_s,
                result.timings.solve_s,
                result.timings.total_s,
                mb(result.memory.system_bytes),
                mb(result.memory.solve_resident_bytes),
                mb(result.memory.peak_bytes),
            );
            records.push(SolveRecord {
                solver: (*solver).clone(),
                frequency_hz: f,
                n_total,
                system_dimension: result.system_dimension,
                fill_s: result.timings.fill_s,
                solve_s: result.timings.solve_s,
                total_s: result.timings.total_s,
                peak_matrix_bytes: result.memory.peak_bytes,
                solve_resident_bytes: result.memory.solve_resident_bytes,
                system_bytes: result.memory.system_bytes,
                condition_system: result.condition_system,
                condition_blocks: result.condition_blocks.clone(),
                outputs: Vec::new(),
                error: None,
            });
            by_solver.push((solver.to_string(), result));
        }
        // Ratio lines when both formulations ran.
        let find = |name: &str| by_solver.iter().find(|(n, _)| n == name).map(|(_, r)| r);
        if let (Some(pm), Some(ss)) = (find("pmchwt"), find("single_source")) {
            let _ = writeln!(
                report,
                "  two-current/single-source ratios: dim {:.0}x, solve {:.2}x, resident-memory {:.2}x, system-memory {:.2}x",
                pm.system_dimension as f64 / ss.system_dimension as f64,
                pm.timings.solve_s / ss.timings.solve_s,
                pm.memory.solve_resident_bytes as f64 / ss.memory.solve_resident_bytes as f64,
                pm.memory.system_bytes as f64 / ss.memory.system_bytes as f64,
            );
        }
    }
    let _ = writeln!(report, "{REFERENCE_TABLE}");

    let bench_json = out_dir.join("benchmark.jsonl");
    std::fs::write(&bench_json, to_jsonl(&records)).map_err(io_err(&bench_json))?;
    let bench_txt = out_dir.join("benchmark.txt");
    std::fs::write(&bench_txt, &report).map_err(io_err(&bench_txt))?;
    Ok(report)
}
