//! Batch front end. Every subcommand builds a [`Report`] (a JSON document
//! plus a flat table for CSV output) and a pass/fail verdict.
//!
//! Exit codes: `0` pass, `1` check failure, `2` usage, configuration or
//! resource-cap error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arch::{omega_report, phi_multiplicity, ConeModel};
use crate::bridge::{check_diagram, BridgeConfig};
use crate::config::{load_l_factors, SchottkyConfig};
use crate::error::{Error, Result};
use crate::schottky::{limit_set_sample, Alphabet, SchottkyGroup};
use crate::subshift::{enumerate_periodic, k_rank_report, periodic_count_formula, periodic_point_count, rank_f, rank_formula};
use crate::triples::{
    ck_relations_check, koopman_stabilization, log_ratio_spread, phi_multiplicity_source, phi_sigma2_commutator_norm,
    rho_cohomology, rho_stabilization, s_i_koopman, s_i_literal, shipped_test_functions, summability_profile,
    DiracTilde, TruncatedOperator,
};
use crate::zeta::factorization_report;
use crate::{Caps, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// Normalized Koopman isometry `S_i`, level n -> n + 1.
    SKoopman,
    /// Literal `S_i` on level-n functions (exact).
    SLiteral,
    /// `rho(f)` on level-n functions for a shipped test function.
    Rho,
    /// `D~` on level-n functions (exact).
    DiracTilde,
    /// `Phi` on the archimedean window.
    Phi,
    /// `sigma_2(m)` for `m = [[2, 3], [1, 2]]` on the tower-complete part.
    Sigma2,
    Omega,
    FInfinity,
    Lefschetz,
}

#[derive(Debug, Parser)]
#[command(name = "schottky-triples", version, about = "Spectral triples and regularized determinants for Schottky groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 2)]
    pub genus: usize,
    #[arg(long, global = true)]
    pub min_level: Option<usize>,
    #[arg(long, global = true)]
    pub max_level: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p_min: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p_max: Option<i64>,
    /// Comma-separated real sample points; an empty string means none.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub samples: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// TOML file with genus, base point and generator matrices.
    #[arg(long, global = true)]
    pub schottky_config: Option<PathBuf>,
    /// TOML override of the archimedean factor table.
    #[arg(long, global = true)]
    pub l_factors: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, env = "SCHOTTKY_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Filtration ranks against the closed formula.
    Ranks,
    /// Regularized determinant against Gamma factors.
    ZetaCheck,
    /// Commutative square relating the archimedean and dynamical pieces.
    DiagramCheck,
    /// Cuntz-Krieger relations of the normalized isometries.
    CkCheck,
    /// Attracting fixed points of words up to `--max-level` letters.
    LimitSet,
    /// Graded model dump, `Phi` multiplicities, duality identities,
    /// summability.
    Spectrum,
    /// Commutator norms with the Dirac operators across levels.
    Commutators,
    /// Periodic orbits of period `--max-level`.
    Orbits,
    /// Writes one truncated operator.
    ExportOperator {
        #[arg(long, value_enum)]
        operator: OperatorKind,
        /// 1-based generator index or shipped test function index.
        #[arg(long, default_value_t = 1)]
        index: usize,
    },
    /// Prints the built-in genus-2 Schottky configuration as TOML.
    DefaultConfig,
}

/// Fully resolved job parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobConfig {
    pub command: Command,
    pub genus: usize,
    pub min_level: usize,
    pub max_level: usize,
    pub p_min: i64,
    pub p_max: i64,
    pub samples: Vec<f64>,
    pub tolerance: f64,
    pub schottky_config: Option<PathBuf>,
    pub l_factors: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
    pub caps: Caps,
}

fn parse_samples(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::Config(format!("sample {s:?}: {e}"))))
        .collect()
}

impl JobConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        use Command::*;
        let (levels, window, tol) = match &cli.command {
            Ranks => ((0, 3), (0, 0), 0.0),
            ZetaCheck => ((0, 0), (0, 0), 1e-8),
            DiagramCheck => ((0, 0), (-4, 0), 0.0),
            CkCheck => ((1, 3), (0, 0), 0.0),
            LimitSet => ((1, 4), (0, 0), 0.0),
            Spectrum => ((0, 0), (-3, 4), 0.0),
            Commutators => ((3, 6), (-2, 3), 1e-6),
            Orbits => ((3, 3), (0, 0), 0.0),
            ExportOperator { .. } => ((1, 1), (-2, 3), 0.0),
            DefaultConfig => ((0, 0), (0, 0), 0.0),
        };
        let samples = match &cli.samples {
            Some(s) => parse_samples(s)?,
            None => vec![2.5, 3.7, 5.25],
        };
        let tolerance = cli.tolerance.unwrap_or(tol);
        if cli.tolerance.is_some() && !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {tolerance}")));
        }
        let p_min = cli.p_min.unwrap_or(window.0);
        let p_max = cli.p_max.unwrap_or(window.1);
        if p_min > p_max {
            return Err(Error::InvalidWindow { p_min, p_max });
        }
        if cli.workers == Some(0) {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        let table_like = matches!(cli.command, LimitSet | Orbits | ExportOperator { .. });
        Ok(Self {
            command: cli.command.clone(),
            genus: cli.genus,
            min_level: cli.min_level.unwrap_or(levels.0),
            max_level: cli.max_level.unwrap_or(levels.1),
            p_min,
            p_max,
            samples,
            tolerance,
            schottky_config: cli.schottky_config.clone(),
            l_factors: cli.l_factors.clone(),
            out: cli.out.clone(),
            format: cli.format.unwrap_or(if table_like { Format::Csv } else { Format::Json }),
            workers: cli.workers,
            caps: Caps::from_env()?,
        })
    }

    fn levels(&self) -> Vec<usize> {
        (self.min_level..=self.max_level).collect()
    }

    /// The configured group, or the built-in one for genus 2.
    pub fn group(&self) -> Result<SchottkyGroup<f64>> {
        match &self.schottky_config {
            Some(path) => {
                let cfg = SchottkyConfig::load(path)?;
                if cfg.genus != self.genus {
                    return Err(Error::Config(format!("--genus {} but the config has genus {}", self.genus, cfg.genus)));
                }
                cfg.to_group()
            }
            None if self.genus == 2 => SchottkyConfig::default_genus2().to_group(),
            None => Err(Error::Config(format!("no built-in group for genus {}; pass --schottky-config", self.genus))),
        }
    }
}

/// Output of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub passed: bool,
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    fn new(passed: bool, json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self { passed, json, header: header.iter().map(|s| s.to_string()).collect(), rows }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&fix_precision(self.json.clone()))
                    .map_err(|e| Error::Config(format!("json: {e}")))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
            }
        }
    }
}

/// Fixed 12-significant-digit rendering of a float.
pub fn fx(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

fn fix_precision(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            fx(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(fix_precision).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, fix_precision(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Config(format!("json: {e}")))
}

/// Runs a parsed command line inside a worker pool of the requested size
/// and writes the report. Returns whether the checks passed.
pub fn run(cli: &Cli) -> Result<bool> {
    let job = JobConfig::from_cli(cli)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = job.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let report = pool.install(|| execute(&job))?;
    let bytes = match job.command {
        Command::DefaultConfig => SchottkyConfig::default_genus2().to_toml()?.into_bytes(),
        _ => report.render(job.format)?,
    };
    match &job.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| Error::Config(format!("stdout: {e}")))?,
    }
    Ok(report.passed)
}

pub fn execute(job: &JobConfig) -> Result<Report> {
    match &job.command {
        Command::Ranks => cmd_ranks(job),
        Command::ZetaCheck => cmd_zeta_check(job),
        Command::DiagramCheck => cmd_diagram_check(job),
        Command::CkCheck => cmd_ck_check(job),
        Command::LimitSet => cmd_limit_set(job),
        Command::Spectrum => cmd_spectrum(job),
        Command::Commutators => cmd_commutators(job),
        Command::Orbits => cmd_orbits(job),
        Command::ExportOperator { operator, index } => cmd_export_operator(job, *operator, *index),
        Command::DefaultConfig => {
            let cfg = SchottkyConfig::default_genus2();
            Ok(Report::new(true, to_json(&cfg)?, &["toml"], vec![vec![cfg.to_toml()?]]))
        }
    }
}

#[derive(Serialize)]
struct RankRow {
    g: usize,
    n: usize,
    rank_formula: u128,
    rank_computed: usize,
    stabilization_m: usize,
    matches: bool,
}

pub fn cmd_ranks(job: &JobConfig) -> Result<Report> {
    let al = Alphabet::new(job.genus)?;
    let rows = job
        .levels()
        .into_iter()
        .map(|n| {
            let r = rank_f::<Rational>(&al, n, &job.caps)?;
            let formula = rank_formula(job.genus, n);
            Ok(RankRow {
                g: job.genus,
                n,
                rank_formula: formula,
                rank_computed: r.rank,
                stabilization_m: r.stabilization_m,
                matches: r.rank as u128 == formula,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // the homology filtration has no settled closed form: reference only
    let reference = job
        .levels()
        .into_iter()
        .filter(|&n| n <= 3)
        .map(|n| k_rank_report::<Rational>(&al, n, &job.caps))
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r.matches);
    let table = rows
        .iter()
        .map(|r| vec![r.g.to_string(), r.n.to_string(), r.rank_formula.to_string(), r.rank_computed.to_string(), r.stabilization_m.to_string()])
        .collect();
    let json = json!({
        "command": "ranks",
        "genus": job.genus,
        "passed": passed,
        "rows": to_json(&rows)?,
        "homology_filtration": { "reference_only": true, "rows": to_json(&reference)? },
    });
    Ok(Report::new(passed, json, &["g", "n", "rank_formula", "rank_computed", "stabilization_m"], table))
}

pub fn cmd_zeta_check(job: &JobConfig) -> Result<Report> {
    let table = job.l_factors.as_deref().map(load_l_factors).transpose()?;
    let samples: Vec<Complex<f64>> = job.samples.iter().map(|&s| Complex::new(s, 0.0)).collect();
    let report = factorization_report(job.genus, &samples, table)?;
    let passed = report.passes(job.tolerance);
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                fx(r.s.re),
                fx(r.lhs.re),
                fx(r.lhs.im),
                fx(r.rhs_model.re),
                fx(r.rhs_model.im),
                fx(r.rhs_table.re),
                fx(r.ratio_to_table.re),
                fx(r.ratio_to_table.im),
                fx(r.abs_err),
                fx(r.rel_err),
                fx(r.fd_rel_err),
            ]
        })
        .collect();
    let json = json!({
        "command": "zeta-check",
        "tolerance": job.tolerance,
        "passed": passed,
        "gate": "relative error between the determinant and the Gamma product implied by the same multiplicities",
        "ratio_to_factor_table": "reference_only",
        "report": to_json(&report)?,
    });
    Ok(Report::new(
        passed,
        json,
        &["s", "lhs_re", "lhs_im", "rhs_model_re", "rhs_model_im", "rhs_table_re", "ratio_re", "ratio_im", "abs_err", "rel_err", "fd_rel_err"],
        rows,
    ))
}

pub fn cmd_diagram_check(job: &JobConfig) -> Result<Report> {
    let cfg = BridgeConfig::new(job.genus, job.p_min, job.p_max)?;
    let report = check_diagram::<Rational>(&cfg)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.p.to_string(),
                r.k.to_string(),
                r.via_u.2.join(";"),
                r.via_delta.2.join(";"),
                r.commutes.to_string(),
                r.u_equivariant.to_string(),
                r.u_tilde_equivariant.to_string(),
                r.d_anti_equivariant.to_string(),
                r.pairing.clone(),
            ]
        })
        .collect();
    let json = json!({ "command": "diagram-check", "passed": report.all_pass, "report": to_json(&report)? });
    Ok(Report::new(
        report.all_pass,
        json,
        &["p", "k", "d_of_u", "u_tilde_of_delta", "commutes", "u_equivariant", "u_tilde_equivariant", "d_anti_equivariant", "pairing"],
        rows,
    ))
}

pub fn cmd_ck_check(job: &JobConfig) -> Result<Report> {
    let levels: Vec<isize> = job.levels().into_iter().map(|n| n as isize).collect();
    let report = ck_relations_check::<Rational>(job.genus, &levels, &job.caps)?;
    let rows = report
        .rows
        .iter()
        .map(|r| vec![r.level.to_string(), fx(r.sum_residual), fx(r.ck_residual), r.initial_projections.to_string(), r.exact.to_string()])
        .collect();
    let json = json!({ "command": "ck-check", "passed": report.all_pass, "report": to_json(&report)? });
    Ok(Report::new(report.all_pass, json, &["level", "sum_residual", "ck_residual", "initial_projections", "exact"], rows))
}

pub fn cmd_limit_set(job: &JobConfig) -> Result<Report> {
    let group = job.group()?;
    let pts = limit_set_sample(&group, job.max_level, &job.caps)?;
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| match p.point.to_affine().filter(|_| !p.point.is_infinity()) {
            Some(z) => vec![fx(z.re), fx(z.im), "0".into(), p.word_length().to_string()],
            None => vec![String::new(), String::new(), "1".into(), p.word_length().to_string()],
        })
        .collect();
    let points: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "re": r[0], "im": r[1], "is_infinity": r[2] == "1", "word_length": r[3].parse::<usize>().unwrap_or(0) }))
        .collect();
    let json = json!({ "command": "limit-set", "depth": job.max_level, "count": rows.len(), "points": points });
    Ok(Report::new(true, json, &["re", "im", "is_infinity", "word_length"], rows))
}

const SIGMA_TEST_MATRIX: [[f64; 2]; 2] = [[2.0, 3.0], [1.0, 2.0]];

pub fn cmd_spectrum(job: &JobConfig) -> Result<Report> {
    let g = job.genus;
    Alphabet::new(g)?;
    let model = ConeModel::new(g, job.p_min, job.p_max)?;
    let spectrum = model.phi_spectrum();
    // an eigenvalue receives pieces with p in {lambda, lambda + 1}
    let multiplicity_rows: Vec<Value> = spectrum
        .iter()
        .filter(|(&l, _)| l >= job.p_min && l < job.p_max)
        .map(|(&l, &m)| json!({ "lambda": l, "in_window": m, "piece_table": phi_multiplicity(g, l), "matches": m == phi_multiplicity(g, l) }))
        .collect();
    let multiplicities_match = multiplicity_rows.iter().all(|r| r["matches"] == json!(true));
    let max_multiplicity = spectrum.values().copied().max().unwrap_or(0);

    let omega = omega_report::<Rational>(g, job.p_min, job.p_max)?;
    let omega_ok = omega.omega_squared_is_id && omega.block_identity && omega.anticommutator_is_q_omega && omega.omega_commutes_with_sigma2;

    let windows: Vec<(i64, i64)> = (1..=4).map(|k| (-k, k + 1)).collect();
    let norms = windows
        .par_iter()
        .map(|&(lo, hi)| phi_sigma2_commutator_norm(g, lo, hi, &SIGMA_TEST_MATRIX))
        .collect::<Result<Vec<_>>>()?;
    let norms_constant = norms.windows(2).all(|w| w[0] == w[1]);

    let mult = phi_multiplicity_source(g);
    let bound = (2 * g + 3) as u64;
    let converging = summability_profile(&mult, bound, 1.5, &[1_000, 10_000, 100_000, 100_001])?;
    let harmonic = summability_profile(&mult, bound, 1.0, &[1_000, 10_000, 100_000])?;

    let passed = multiplicities_match && omega_ok && norms_constant;
    let dump = model.dump();
    let rows = dump
        .iter()
        .map(|p| vec![p.q.to_string(), p.p.to_string(), p.source.to_string(), p.dim.to_string(), p.phi.to_string(), p.twist.to_string(), p.j.to_string(), p.side.to_string()])
        .collect();
    let json = json!({
        "command": "spectrum",
        "genus": g,
        "window": [job.p_min, job.p_max],
        "passed": passed,
        "pieces": to_json(&dump)?,
        "phi_multiplicities": multiplicity_rows,
        "max_multiplicity": max_multiplicity,
        "omega": to_json(&omega)?,
        "phi_sigma2_commutator": { "m": SIGMA_TEST_MATRIX, "windows": windows, "norms": norms, "window_independent": norms_constant },
        "summability": {
            "z_1_5": to_json(&converging)?,
            "z_1": to_json(&harmonic)?,
            "z_1_log_ratio_spread": log_ratio_spread(&harmonic),
        },
    });
    Ok(Report::new(passed, json, &["q", "p", "source", "dim", "phi", "twist", "j", "side"], rows))
}

pub fn cmd_commutators(job: &JobConfig) -> Result<Report> {
    let al = Alphabet::new(job.genus)?;
    let levels = job.levels();
    let mut stab = koopman_stabilization(&al, &levels, &job.caps)?;
    stab.extend(rho_stabilization(&job.group()?, &levels, &job.caps)?);
    let passed = stab.iter().all(|r| r.max_relative_change < job.tolerance);
    let mut rows = Vec::new();
    for s in &stab {
        for (i, n) in s.levels.iter().enumerate() {
            rows.push(vec![s.operator.clone(), n.to_string(), fx(s.block_norms[i]), fx(s.window_norms[i])]);
        }
    }
    let json = json!({ "command": "commutators", "tolerance": job.tolerance, "passed": passed, "rows": to_json(&stab)? });
    Ok(Report::new(passed, json, &["operator", "level", "block_norm", "window_norm"], rows))
}

pub fn cmd_orbits(job: &JobConfig) -> Result<Report> {
    let al = Alphabet::new(job.genus)?;
    let n = job.max_level;
    let orbits = enumerate_periodic(&al, n, &job.caps)?;
    let points = periodic_point_count(&orbits);
    let formula = periodic_count_formula(job.genus, n);
    let passed = points as i128 == formula;
    let rows: Vec<Vec<String>> = orbits
        .iter()
        .map(|o| vec![o.cyclic_word().display(&al), o.primitive_period().to_string(), o.traversal().to_string()])
        .collect();
    let json = json!({
        "command": "orbits",
        "period": n,
        "orbit_count": orbits.len(),
        "periodic_points": points,
        "trace_formula": formula,
        "passed": passed,
        "orbits": rows.iter().map(|r| json!({ "cyclic_word": r[0], "primitive_period": r[1].parse::<usize>().unwrap_or(0), "traversal": r[2].parse::<usize>().unwrap_or(0) })).collect::<Vec<_>>(),
    });
    Ok(Report::new(passed, json, &["cyclic_word", "primitive_period", "traversal"], rows))
}

fn operator_report<F: crate::scalar::Field>(op: &TruncatedOperator<F>) -> Result<Report> {
    let mut header = vec![format!("{} [{} -> {}]", op.name, op.domain, op.codomain)];
    header.extend(op.col_labels.iter().cloned());
    let entries = op.entry_strings();
    let rows = op.row_labels.iter().zip(&entries).map(|(l, r)| std::iter::once(l.clone()).chain(r.iter().cloned()).collect()).collect();
    let json = json!({
        "name": op.name,
        "domain": op.domain,
        "codomain": op.codomain,
        "exact": op.is_exact(),
        "col_labels": op.col_labels,
        "row_labels": op.row_labels,
        "entries": entries,
    });
    Ok(Report { passed: true, json, header, rows })
}

fn arch_operator(job: &JobConfig, kind: OperatorKind) -> Result<TruncatedOperator<Rational>> {
    let model = ConeModel::new(job.genus, job.p_min, job.p_max)?;
    let (name, basis) = match kind {
        OperatorKind::Phi => ("Phi", model.full_basis()),
        OperatorKind::FInfinity => ("F_inf", model.full_basis()),
        OperatorKind::Omega => ("omega", model.omega_closed_basis()),
        OperatorKind::Sigma2 => ("sigma_2([[2,3],[1,2]])", model.sigma_stable_basis()),
        _ => ("l", model.sigma_stable_basis()),
    };
    let q = |v: i64| <Rational as crate::scalar::Field>::from_int(v);
    let matrix = match kind {
        OperatorKind::Phi => model.phi_matrix(&basis)?,
        OperatorKind::FInfinity => model.f_infinity_matrix(&basis)?,
        OperatorKind::Omega => model.omega_matrix(&basis)?,
        OperatorKind::Sigma2 => model.sigma2_matrix(&basis, &[[q(2), q(3)], [q(1), q(2)]])?,
        _ => model.lefschetz_matrix(&basis)?,
    };
    let all = model.basis_labels();
    let labels: Vec<String> = basis.iter().map(|&i| all[i].clone()).collect();
    let window = format!("window [{}, {}]", job.p_min, job.p_max);
    TruncatedOperator::new(name, window.clone(), window, labels.clone(), labels, matrix)
}

pub fn cmd_export_operator(job: &JobConfig, kind: OperatorKind, index: usize) -> Result<Report> {
    let al = Alphabet::new(job.genus)?;
    let n = job.max_level;
    match kind {
        OperatorKind::SKoopman => operator_report(&s_i_koopman(&al, index, n, &job.caps)?),
        OperatorKind::SLiteral => operator_report(&s_i_literal::<Rational>(&al, index, n, &job.caps)?),
        OperatorKind::Rho => {
            let fns = shipped_test_functions();
            let (name, f) = *fns.get(index.wrapping_sub(1)).ok_or_else(|| Error::Config(format!("test function index {index} out of 1..={}", fns.len())))?;
            let mut op = rho_cohomology(&f, &job.group()?, n, &job.caps)?;
            op.name = format!("rho({name})");
            operator_report(&op)
        }
        OperatorKind::DiracTilde => {
            let d = DiracTilde::new(al, n, &job.caps)?;
            let labels: Vec<String> = (0..d.dim()).map(|i| crate::schottky::ReducedWord::new(&al, al.word_at(n + 1, i)).map(|w| w.display(&al))).collect::<Result<_>>()?;
            let dom = format!("level {n} cylinders");
            operator_report(&TruncatedOperator::new("D~", dom.clone(), dom, labels.clone(), labels, d.matrix::<Rational>())?)
        }
        _ => operator_report(&arch_operator(job, kind)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(args: &[&str]) -> JobConfig {
        let mut full = vec!["schottky-triples"];
        full.extend_from_slice(args);
        JobConfig::from_cli(&Cli::try_parse_from(full).unwrap()).unwrap()
    }

    #[test]
    fn ranks_small() {
        let r = execute(&job(&["ranks", "--max-level", "2"])).unwrap();
        assert!(r.passed);
        let pairs: Vec<(String, String)> = r.rows.iter().map(|x| (x[2].clone(), x[3].clone())).collect();
        assert_eq!(pairs, vec![("4".into(), "4".into()), ("9".into(), "9".into()), ("25".into(), "25".into())]);
        let empty = execute(&job(&["ranks", "--min-level", "3", "--max-level", "2"])).unwrap();
        assert!(empty.passed && empty.rows.is_empty());
        assert!(matches!(execute(&job(&["ranks", "--genus", "1"])), Err(Error::InvalidGenus(_))));
    }

    #[test]
    fn zeta_and_poles() {
        let r = execute(&job(&["zeta-check", "--samples", "2.5,3.7"])).unwrap();
        assert!(r.passed);
        assert_eq!(r.rows.len(), 2);
        assert!(matches!(execute(&job(&["zeta-check", "--samples", "1"])), Err(Error::Pole(_))));
        let e = execute(&job(&["zeta-check", "--samples", ""])).unwrap();
        assert!(e.passed && e.rows.is_empty());
    }

    #[test]
    fn bad_options() {
        let cli = Cli::try_parse_from(["x", "zeta-check", "--tolerance", "-1"]).unwrap();
        assert!(JobConfig::from_cli(&cli).is_err());
        let cli = Cli::try_parse_from(["x", "spectrum", "--p-min", "3", "--p-max", "1"]).unwrap();
        assert!(JobConfig::from_cli(&cli).is_err());
        assert!(Cli::try_parse_from(["x", "ranks", "--format", "xml"]).is_err());
        assert!(matches!(execute(&job(&["limit-set", "--genus", "3"])), Err(Error::Config(_))));
    }

    #[test]
    fn precision_is_fixed() {
        let v = fix_precision(json!({ "a": [0.1 + 0.2, 1u32], "b": 1.0 / 3.0 }));
        assert_eq!(v["a"][0], json!(0.3));
        assert_eq!(v["a"][1], json!(1));
        assert_eq!(v["b"], json!(0.333333333333));
    }
}
