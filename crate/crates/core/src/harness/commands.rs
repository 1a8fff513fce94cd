//! The experiments behind each CLI subcommand.

use super::config::{Command, ConfigError, ExperimentConfig};
use super::nodes::{jittered_nodes, random_nodes, read_node_file, NodeData, NodeError, NodeSource};
use crate::basis::{
    condition_number, gramian, normalized_condition_number, smallest_eigenvalue, Basis, BasisError, Profile,
};
use crate::domain::{BoxDomain, Point};
use crate::dual::{solve_dual_mask, verify_biorthogonality, BiorthReport, DualError, DualSpec, DEFAULT_BIORTH_TOL};
use crate::integration::{basis_weights, integrate, linearity_audit, polynomial_exactness_check};
use crate::linalg::CsrMatrix;
use crate::projector::{DualBasis, DualMode, ProjectorError};
use crate::quadrature;
use crate::reconstruction::{
    assemble_pack, contraction_estimate, default_tau, fixed_point_residual, linear_fit, restore, OperatorPack,
    ReconstructionError, RestoreState,
};
use crate::refinable::{CascadeError, Mask, MaskError};
use crate::sampling::{check_delta_dense, DensityCertificate, PartitionOfUnity, PsiFamily, SamplingError, SamplingSet};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Nodes(#[from] NodeError),
    #[error("density certificate failed: a probe point at {:?} is {:.4} from every node (δ = {})",
        .0.worst_point, .0.worst_distance, .0.delta)]
    Density(Box<DensityCertificate>),
    #[error(transparent)]
    Reconstruction(#[from] ReconstructionError),
    #[error(transparent)]
    Projector(#[from] ProjectorError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// 2 invalid configuration, 3 density failure, 4 divergence, 1 anything else.
    /// A random draw that never reaches the requested covering radius counts as a density failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Nodes(NodeError::BadSource(_)) => 2,
            HarnessError::Density(_) | HarnessError::Nodes(NodeError::Rejected { .. }) => 3,
            HarnessError::Reconstruction(ReconstructionError::Diverged { .. }) => 4,
            _ => 1,
        }
    }
}

/// Summary written as `<command>_report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    /// Full configuration in `key = value` form.
    pub config: String,
    pub seed: u64,
    pub density: Option<DensityCertificate>,
    pub eta_hat: Option<f64>,
    pub iterations: Option<usize>,
    pub final_residual: Option<f64>,
    pub final_error: Option<f64>,
    pub artifacts: Vec<String>,
    pub details: Value,
}

impl RunReport {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            command: cfg.command.to_string(),
            config: cfg.to_text(),
            seed: cfg.seed,
            density: None,
            eta_hat: None,
            iterations: None,
            final_residual: None,
            final_error: None,
            artifacts: Vec::new(),
            details: Value::Null,
        }
    }
}

/// Validates `cfg`, runs its command and writes the report next to the other outputs.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(|source| HarnessError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let mut report = match cfg.command {
        Command::Mask => cmd_mask(cfg)?,
        Command::DualMask => cmd_dualmask(cfg)?,
        Command::Gramian => cmd_gramian(cfg)?,
        Command::Restore => cmd_restore(cfg)?,
        Command::Integrate => cmd_integrate(cfg)?,
        Command::CondTable => cmd_condition_table(cfg)?,
        Command::Decay => cmd_error_decay(cfg)?,
        Command::GpStudy => cmd_gp_study(cfg)?,
    };
    let path = cfg.out.join(format!("{}_report.json", cfg.command));
    report.artifacts.push(path.display().to_string());
    write_text(&path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(report)
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_csv<R: AsRef<[String]>>(path: &Path, header: &[&str], rows: &[R]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.as_ref())?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn artifact(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

pub fn build_mask(cfg: &ExperimentConfig) -> Result<Mask, HarnessError> {
    match &cfg.mask_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(Mask::from_record(text.trim())?)
        }
        None => Ok(Mask::gp(cfg.n, cfg.h)?),
    }
}

pub fn build_basis(cfg: &ExperimentConfig, mask: &Mask, level: u32) -> Result<Basis, HarnessError> {
    let profile = Arc::new(Profile::from_mask(mask, cfg.cascade_level)?);
    Ok(Basis::from_profile(profile, level, &cfg.domain)?)
}

/// The configured dual, with the verification report when a dual mask was tried.
pub fn build_dual(
    cfg: &ExperimentConfig,
    basis: &Basis,
    mask: &Mask,
) -> Result<(DualBasis, Option<BiorthReport>), HarnessError> {
    match (cfg.dual, mask.order_n(), mask.shape_h()) {
        (DualMode::Synthesized, Some(n), Some(h)) => Ok(DualBasis::synthesize(basis, n, h)?),
        _ => Ok((DualBasis::canonical(basis)?, None)),
    }
}

/// Half the support length of one element, the default certificate radius.
pub fn default_delta(basis: &Basis) -> f64 {
    basis
        .axes()
        .iter()
        .map(|ax| {
            let (s0, s1) = ax.profile().support();
            0.5 * (s1 - s0) as f64 / ax.scale()
        })
        .fold(0.0, f64::max)
}

pub fn load_nodes(cfg: &ExperimentConfig, domain: &BoxDomain) -> Result<NodeData, HarnessError> {
    Ok(match &cfg.nodes {
        NodeSource::File(path) => read_node_file(path, domain.dim())?,
        NodeSource::Random { count } => NodeData {
            nodes: random_nodes(domain, *count, cfg.seed, cfg.delta.filter(|_| !cfg.allow_sparse))?,
            values: None,
        },
        NodeSource::Jitter { count } => NodeData {
            nodes: jittered_nodes(domain, *count, cfg.seed),
            values: None,
        },
    })
}

/// Checks density before any iteration; failures stop the run unless overridden.
pub fn certify(cfg: &ExperimentConfig, basis: &Basis, nodes: &[Point]) -> Result<DensityCertificate, HarnessError> {
    let delta = cfg.delta.unwrap_or_else(|| default_delta(basis));
    let cert = check_delta_dense(nodes, basis.domain(), delta, delta / 4.0)?;
    info!(
        "density certificate: δ = {delta}, worst distance {:.4} at {:?}, passed = {}",
        cert.worst_distance, cert.worst_point, cert.passed
    );
    if !cert.passed {
        if cfg.allow_sparse {
            warn!("density certificate failed; continuing because allow_sparse is set");
        } else {
            return Err(HarnessError::Density(Box::new(cert)));
        }
    }
    Ok(cert)
}

/// Basis, dual, ψ family and operator pack for the configured nodes, plus the samples.
pub struct Setup {
    pub basis: Basis,
    pub dual: DualBasis,
    pub dual_report: Option<BiorthReport>,
    pub pack: OperatorPack,
    pub samples: Vec<f64>,
    /// Samples come from `cfg.function` rather than a file.
    pub analytic: bool,
    pub certificate: DensityCertificate,
}

pub fn setup(cfg: &ExperimentConfig, mask: &Mask, level: u32, nodes: Option<NodeData>) -> Result<Setup, HarnessError> {
    let basis = build_basis(cfg, mask, level)?;
    let (dual, dual_report) = build_dual(cfg, &basis, mask)?;
    let (psi, values) = match cfg.psi {
        PsiFamily::Basis { level: fine } => {
            let s_basis = build_basis(cfg, mask, fine)?;
            (PartitionOfUnity::from_basis(&s_basis)?, None)
        }
        family => {
            let data = match nodes {
                Some(d) => d,
                None => load_nodes(cfg, basis.domain())?,
            };
            let (set, values) = SamplingSet::with_values(basis.domain(), data.nodes, data.values)?;
            (PartitionOfUnity::new(family, &set)?, values)
        }
    };
    let certificate = certify(cfg, &basis, psi.set().nodes())?;
    let tau = cfg.tau.unwrap_or_else(|| default_tau(&basis));
    let pack = assemble_pack(&basis, &dual, &psi, tau)?;
    let analytic = values.is_none();
    let samples = values.unwrap_or_else(|| psi.set().nodes().iter().map(|p| cfg.function.eval_point(p)).collect());
    Ok(Setup {
        basis,
        dual,
        dual_report,
        pack,
        samples,
        analytic,
        certificate,
    })
}

fn point_fields(p: &Point, dim: usize) -> Vec<String> {
    p[..dim].iter().map(f64::to_string).collect()
}

fn grid_rows(pack: &OperatorPack, values: &[f64]) -> Vec<Vec<String>> {
    let dim = pack.basis.dim();
    pack.grid
        .iter()
        .zip(values)
        .map(|(p, v)| {
            let mut row = point_fields(p, dim);
            row.push(v.to_string());
            row
        })
        .collect()
}

fn grid_header(dim: usize) -> Vec<&'static str> {
    if dim == 1 {
        vec!["x", "value"]
    } else {
        vec!["x", "y", "value"]
    }
}

fn sup_error(cfg: &ExperimentConfig, pack: &OperatorPack, values: &[f64]) -> f64 {
    pack.grid
        .iter()
        .zip(values)
        .map(|(p, v)| (cfg.function.eval_point(p) - v).abs())
        .fold(0.0, f64::max)
}

/// `∫_Ω f` by composite Gauss–Legendre on 64 panels per axis.
pub fn reference_integral(f: impl Fn(&Point) -> f64, domain: &BoxDomain) -> f64 {
    const PANELS: f64 = 64.0;
    const ORDER: usize = 16;
    let (a, b) = domain.axis(0);
    match domain.dim() {
        1 => quadrature::composite(a, b, a, (b - a) / PANELS, ORDER, |x| f(&[x, 0.0])),
        _ => {
            let (c, d) = domain.axis(1);
            quadrature::composite(a, b, a, (b - a) / PANELS, ORDER, |x| {
                quadrature::composite(c, d, c, (d - c) / PANELS, ORDER, |y| f(&[x, y]))
            })
        }
    }
}

/// `‖f − Σ c_k φ_k‖_{L²(Ω)}` by Gauss–Legendre on half-cells.
pub fn l2_distance(basis: &Basis, coeffs: &[f64], f: impl Fn(&Point) -> f64) -> f64 {
    const ORDER: usize = 10;
    let sq = |p: &Point| (f(p) - basis.expansion(coeffs, p)).powi(2);
    let panel = |axis: usize| 0.5 / basis.axis(axis).scale();
    let (a, b) = basis.domain().axis(0);
    let total = match basis.dim() {
        1 => quadrature::composite(a, b, a, panel(0), ORDER, |x| sq(&[x, 0.0])),
        _ => {
            let (c, d) = basis.domain().axis(1);
            quadrature::composite(a, b, a, panel(0), ORDER, |x| {
                quadrature::composite(c, d, c, panel(1), ORDER, |y| sq(&[x, y]))
            })
        }
    };
    total.sqrt()
}

fn dual_kind(dual: &DualBasis) -> &'static str {
    if dual.is_dense() {
        "canonical"
    } else {
        "compact"
    }
}

pub fn cmd_mask(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let mask = build_mask(cfg)?;
    let mut report = RunReport::new(cfg);
    let path = artifact(cfg, "mask.txt");
    write_text(&path, &(mask.to_record() + "\n"))?;
    report.artifacts.push(path.display().to_string());
    report.details = json!({
        "coefficients": mask.coeffs(),
        "exact": mask.exact().map(|c| c.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
        "offset": mask.offset(),
        "support": mask.support(),
        "bspline_degree": mask.bspline_degree(),
        "palindromic": mask.is_palindromic(),
    });
    Ok(report)
}

pub fn cmd_dualmask(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let primal = Mask::gp(cfg.n, cfg.h)?;
    let default = DualSpec::default_for(cfg.n, cfg.h)?;
    let spec = DualSpec::new(
        cfg.n,
        cfg.h,
        cfg.dual_factor.unwrap_or(default.dual_factor),
        cfg.dual_degree.unwrap_or(default.degree),
    )?;
    let solution = solve_dual_mask(&spec, &[])?;
    let verification = verify_biorthogonality(&primal, &solution.mask, cfg.cascade_level, DEFAULT_BIORTH_TOL);
    let mut report = RunReport::new(cfg);
    let path = artifact(cfg, "dualmask.txt");
    write_text(&path, &(solution.mask.to_record() + "\n"))?;
    report.artifacts.push(path.display().to_string());
    report.details = json!({
        "dual_factor": spec.dual_factor,
        "degree": spec.degree,
        "conditions": spec.condition_count(),
        "r_tilde": solution.r_tilde.coeffs().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "mask": solution.mask.exact().map(|c| c.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
        "mask_offset": solution.mask.offset(),
        "minimum_norm": solution.minimum_norm,
        "verification": verification,
    });
    Ok(report)
}

pub fn cmd_gramian(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let mask = build_mask(cfg)?;
    let basis = build_basis(cfg, &mask, cfg.level)?;
    let g = gramian(&basis)?;
    let mut report = RunReport::new(cfg);
    let path = artifact(cfg, "gramian.txt");
    write_text(&path, &CsrMatrix::from_dense(&g.matrix).to_text(false))?;
    report.artifacts.push(path.display().to_string());
    report.details = json!({
        "size": g.size(),
        "kappa": condition_number(&g)?,
        "kappa_normalized": normalized_condition_number(&g)?,
        "lambda_min": smallest_eigenvalue(&g)?,
        "quadrature": g.quadrature,
    });
    Ok(report)
}

fn history_rows(state: &RestoreState) -> Vec<Vec<String>> {
    state
        .residuals
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), r.to_string()])
        .collect()
}

pub fn cmd_restore(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let mask = build_mask(cfg)?;
    let s = setup(cfg, &mask, cfg.level, None)?;
    let mut report = RunReport::new(cfg);
    report.density = Some(s.certificate.clone());
    let (fc, state) = restore(&s.pack, &s.samples, cfg.n_max, cfg.tol)?;
    let grid = artifact(cfg, "grid.csv");
    write_csv(&grid, &grid_header(s.basis.dim()), &grid_rows(&s.pack, &fc))?;
    let history = artifact(cfg, "history.csv");
    write_csv(&history, &["iter", "sup_residual"], &history_rows(&state))?;
    report.artifacts.extend([grid.display().to_string(), history.display().to_string()]);
    report.eta_hat = contraction_estimate(&state).ok();
    report.iterations = Some(state.iterations);
    report.final_residual = Some(state.final_residual());
    report.final_error = s.analytic.then(|| sup_error(cfg, &s.pack, &fc));
    report.details = json!({
        "stop": state.stop,
        "dual": dual_kind(&s.dual),
        "dual_report": s.dual_report,
        "dimension": s.basis.len(),
        "nodes": s.pack.node_count(),
        "bandwidths": s.pack.bandwidths(),
        "flops": state.flops,
        "fixed_point_residual": fixed_point_residual(&s.pack, &state.f_s, &s.samples),
    });
    Ok(report)
}

pub fn cmd_integrate(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let mask = build_mask(cfg)?;
    let s = setup(cfg, &mask, cfg.level, None)?;
    let weights = basis_weights(&s.basis);
    let mut report = RunReport::new(cfg);
    report.density = Some(s.certificate.clone());
    let (value, trace) = integrate(&s.pack, &weights, &s.samples, cfg.n_max, cfg.tol)?;
    let reference = cfg
        .reference
        .or_else(|| s.analytic.then(|| reference_integral(|p| cfg.function.eval_point(p), s.basis.domain())));
    let trace = match reference {
        Some(r) => trace.with_reference(r),
        None => trace,
    };
    let rows: Vec<Vec<String>> = trace
        .estimates
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let err = trace.errors.as_ref().map_or(String::new(), |v| v[i].to_string());
            vec![i.to_string(), e.to_string(), err]
        })
        .collect();
    let path = artifact(cfg, "trace.csv");
    write_csv(&path, &["iter", "estimate", "abs_error"], &rows)?;
    report.artifacts.push(path.display().to_string());
    let checkpoints: Vec<Value> = cfg
        .checkpoints
        .iter()
        .filter(|&&c| c < trace.estimates.len())
        .map(|&c| {
            json!({
                "iter": c,
                "estimate": trace.estimates[c],
                "abs_error": trace.errors.as_ref().map(|e| e[c]),
            })
        })
        .collect();
    let moments = polynomial_exactness_check(&s.pack, &weights, cfg.moments, cfg.n_max, cfg.tol)?;
    let linearity = linearity_audit(&s.pack, &weights, 10, trace.iterations().min(200), cfg.seed)?;
    report.iterations = Some(trace.iterations());
    report.final_error = trace.errors.as_ref().and_then(|e| e.last().copied());
    report.details = json!({
        "value": value,
        "reference": reference,
        "checkpoints": checkpoints,
        "moments": moments,
        "linearity_violation": linearity,
        "dual": dual_kind(&s.dual),
    });
    Ok(report)
}

/// One row of the condition table.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionRow {
    pub h: f64,
    pub kappa: f64,
    pub kappa_raw: f64,
    pub lambda_min: f64,
}

/// `κ₂` of the diagonally scaled Gramian for each `h`, at `level` on `domain`.
pub fn condition_table(
    n: u32,
    h_list: &[f64],
    level: u32,
    domain: &BoxDomain,
    cascade_level: u32,
) -> Result<Vec<ConditionRow>, HarnessError> {
    h_list
        .par_iter()
        .map(|&h| {
            let mask = Mask::gp(n, h)?;
            let profile = Arc::new(Profile::from_mask(&mask, cascade_level)?);
            let basis = Basis::from_profile(profile, level, domain)?;
            let g = gramian(&basis)?;
            Ok(ConditionRow {
                h,
                kappa: normalized_condition_number(&g)?,
                kappa_raw: condition_number(&g)?,
                lambda_min: smallest_eigenvalue(&g)?,
            })
        })
        .collect()
}

pub fn cmd_condition_table(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let rows = condition_table(cfg.n, &cfg.h_list, cfg.level, &cfg.domain, cfg.cascade_level)?;
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.h.total_cmp(&b.h));
    let decreasing = sorted.windows(2).all(|w| w[1].kappa < w[0].kappa);
    if !decreasing {
        warn!("κ₂ is not strictly decreasing in h");
    }
    let path = artifact(cfg, "condtable.csv");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.h.to_string(), r.kappa.to_string(), r.kappa_raw.to_string(), r.lambda_min.to_string()])
        .collect();
    write_csv(&path, &["h", "kappa", "kappa_raw", "lambda_min"], &csv_rows)?;
    let mut report = RunReport::new(cfg);
    report.artifacts.push(path.display().to_string());
    report.details = json!({ "rows": rows, "strictly_decreasing": decreasing });
    Ok(report)
}

/// Per-level outcome of the error-decay study.
#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub level: u32,
    pub l2_error: Option<f64>,
    pub iterations: Option<usize>,
    pub failure: Option<String>,
}

/// `‖f − f_j^(∞)‖₂` for each level, from two jittered nodes per cell, and the fitted
/// `log₂` slope over the converged levels.
pub fn error_decay(cfg: &ExperimentConfig) -> Result<(Vec<DecayRow>, Option<f64>), HarnessError> {
    let mask = build_mask(cfg)?;
    let rows: Vec<DecayRow> = cfg
        .j_list
        .par_iter()
        .map(|&j| {
            let attempt = || -> Result<(f64, usize), HarnessError> {
                let basis = build_basis(cfg, &mask, j)?;
                let cells = basis.axis(0).cells() as usize;
                let per_axis = 2 * cells;
                let count = per_axis.pow(basis.dim() as u32);
                let nodes = jittered_nodes(basis.domain(), count, cfg.seed);
                let mut local = cfg.clone();
                local.delta = Some(cfg.delta.unwrap_or(1.0 / basis.axis(0).scale()));
                let s = setup(&local, &mask, j, Some(NodeData { nodes, values: None }))?;
                let (_, state) = restore(&s.pack, &s.samples, cfg.n_max, cfg.tol)?;
                let err = l2_distance(&s.basis, &state.coeffs, |p| cfg.function.eval_point(p));
                Ok((err, state.iterations))
            };
            match attempt() {
                Ok((e, it)) => DecayRow {
                    level: j,
                    l2_error: Some(e),
                    iterations: Some(it),
                    failure: None,
                },
                Err(e) => DecayRow {
                    level: j,
                    l2_error: None,
                    iterations: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.l2_error.filter(|e| *e > 0.0).map(|e| (r.level as f64, e.log2())))
        .unzip();
    let slope = (xs.len() >= 2).then(|| linear_fit(&xs, &ys).0);
    Ok((rows, slope))
}

pub fn cmd_error_decay(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let (rows, slope) = error_decay(cfg)?;
    let path = artifact(cfg, "decay.csv");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.level.to_string(),
                r.l2_error.map_or(String::new(), |e| e.to_string()),
                r.iterations.map_or(String::new(), |i| i.to_string()),
            ]
        })
        .collect();
    write_csv(&path, &["j", "l2_error", "iterations"], &csv_rows)?;
    let mut report = RunReport::new(cfg);
    report.artifacts.push(path.display().to_string());
    report.details = json!({ "rows": rows, "slope": slope });
    Ok(report)
}

/// Per-`h` outcome of the GP study.
#[derive(Debug, Clone, Serialize)]
pub struct GpRow {
    pub h: f64,
    pub iterations: Option<usize>,
    pub eta_hat: Option<f64>,
    pub final_error: Option<f64>,
    pub dual: Option<String>,
    pub failure: Option<String>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

/// Identical reconstructions in `V_j^{(n,h)}` for each `h`, on one node set.
pub fn gp_study(cfg: &ExperimentConfig) -> Result<Vec<GpRow>, HarnessError> {
    let nodes = load_nodes(cfg, &cfg.domain)?;
    let rows = cfg
        .h_list
        .par_iter()
        .map(|&h| {
            let attempt = || -> Result<GpRow, HarnessError> {
                let mask = Mask::gp(cfg.n, h)?;
                let s = setup(cfg, &mask, cfg.level, Some(nodes.clone()))?;
                let (fc, state) = restore(&s.pack, &s.samples, cfg.n_max, cfg.tol)?;
                Ok(GpRow {
                    h,
                    iterations: Some(state.iterations),
                    eta_hat: contraction_estimate(&state).ok(),
                    final_error: s.analytic.then(|| sup_error(cfg, &s.pack, &fc)),
                    dual: Some(dual_kind(&s.dual).to_string()),
                    failure: None,
                    residuals: state.residuals,
                })
            };
            attempt().unwrap_or_else(|e| GpRow {
                h,
                iterations: None,
                eta_hat: None,
                final_error: None,
                dual: None,
                failure: Some(e.to_string()),
                residuals: Vec::new(),
            })
        })
        .collect();
    Ok(rows)
}

pub fn cmd_gp_study(cfg: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let rows = gp_study(cfg)?;
    let mut report = RunReport::new(cfg);
    let path = artifact(cfg, "gpstudy.csv");
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.h.to_string(),
                r.iterations.map_or(String::new(), |i| i.to_string()),
                opt(r.eta_hat),
                opt(r.final_error),
            ]
        })
        .collect();
    write_csv(&path, &["h", "iterations", "eta_hat", "final_error"], &csv_rows)?;
    report.artifacts.push(path.display().to_string());
    for r in &rows {
        if r.residuals.is_empty() {
            continue;
        }
        let p = artifact(cfg, &format!("history_h{}.csv", r.h));
        let hist: Vec<Vec<String>> = r
            .residuals
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), v.to_string()])
            .collect();
        write_csv(&p, &["iter", "sup_residual"], &hist)?;
        report.artifacts.push(p.display().to_string());
    }
    report.details = json!({ "rows": rows });
    Ok(report)
}
