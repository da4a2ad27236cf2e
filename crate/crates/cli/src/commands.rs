use std::path::Path;

use serde::Serialize;

use cvlbi::estimate::{crb_experiment, EstimateResult};
use cvlbi::fisher::{fisher_analytic, fisher_limit_closed_form, fisher_monte_carlo, MonteCarloFisher};
use cvlbi::gaussian::CovarianceMatrix;
use cvlbi::interferometer::{full_output_covariance, reduced_covariance, Abbreviations};
use cvlbi::output::{csv_number, curves_to_csv, to_json_string};
use cvlbi::schemes::{cumulative_curves, log_grid, ordering_report, BoundMode, OrderingReport, SchemeCurve};
use cvlbi::states::{astronomical_covariance, tmsv_covariance_closed, tmsv_covariance_exponential};
use cvlbi::{FisherMatrix, InterferometerConfig, Limit};

use crate::settings::FileValues;
use crate::{CliError, Common, CompareArgs, EstimateArgs, FisherArgs, Format, Physics, StateArgs};

const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_N_BAR: f64 = 1.0;
const DEFAULT_SAMPLES: usize = 1_000_000;
const DEFAULT_SHOTS: usize = 10_000;
const DEFAULT_REPLICATIONS: usize = 100;
const DEFAULT_EPS_MIN: f64 = 1e-4;
const DEFAULT_EPS_MAX: f64 = 1.0;
const DEFAULT_EPS_POINTS: usize = 200;

fn interferometer(file: &FileValues, p: &Physics) -> Result<InterferometerConfig, CliError> {
    Ok(InterferometerConfig::from_params(
        file.or(p.epsilon, "epsilon", DEFAULT_EPSILON)?,
        file.or(p.g1, "g1", 0.0)?,
        file.or(p.g2, "g2", 0.0)?,
        file.or(p.n_bar, "n_bar", DEFAULT_N_BAR)?,
        file.or(p.theta, "theta", 0.0)?,
    )?)
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    to_json_string(value).map_err(|e| CliError::Numerical(format!("cannot encode JSON: {e}")))
}

fn write_to(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

struct Sink {
    format: Format,
    output: Option<std::path::PathBuf>,
}

impl Sink {
    fn new(file: &FileValues, common: &Common) -> Result<Self, CliError> {
        Ok(Self {
            format: file.or(common.format, "format", Format::Json)?,
            output: file.pick(common.output.clone(), "output")?,
        })
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => write_to(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Long-format `quantity,row,col,value` table for matrix-valued results.
#[derive(Default)]
struct Table(Vec<[String; 4]>);

impl Table {
    fn covariance(&mut self, name: &str, v: &CovarianceMatrix) {
        let labels = v.ordering().labels();
        for (i, r) in labels.iter().enumerate() {
            for (j, c) in labels.iter().enumerate() {
                self.0.push([name.into(), r.to_string(), c.to_string(), csv_number(v.entries()[(i, j)])]);
            }
        }
    }

    fn coherence_matrix(&mut self, name: &str, m: [[f64; 2]; 2]) {
        for (i, r) in ["g1", "g2"].iter().enumerate() {
            for (j, c) in ["g1", "g2"].iter().enumerate() {
                self.0.push([name.into(), (*r).into(), (*c).into(), csv_number(m[i][j])]);
            }
        }
    }

    fn coherence_vector(&mut self, name: &str, v: [f64; 2]) {
        for (i, r) in ["g1", "g2"].iter().enumerate() {
            self.0.push([name.into(), (*r).into(), String::new(), csv_number(v[i])]);
        }
    }

    fn scalar(&mut self, name: &str, x: f64) {
        self.0.push([name.into(), String::new(), String::new(), csv_number(x)]);
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("quantity,row,col,value\n");
        for row in &self.0 {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn to_array(f: &FisherMatrix) -> [[f64; 2]; 2] {
    let e = f.entries();
    [[e[(0, 0)], e[(0, 1)]], [e[(1, 0)], e[(1, 1)]]]
}

#[derive(Serialize)]
struct Physicality {
    v_rho: f64,
    v_sigma: f64,
    v_f: f64,
}

#[derive(Serialize)]
struct StateReport {
    config: InterferometerConfig,
    abbreviations: Abbreviations,
    v_rho: CovarianceMatrix,
    v_sigma: CovarianceMatrix,
    v_f: CovarianceMatrix,
    v_r: CovarianceMatrix,
    v_r_closed_form: CovarianceMatrix,
    /// Largest gap between the pipeline and the closed-form measured covariance.
    pipeline_gap: f64,
    /// Largest gap between the closed-form and exponential squeezed-vacuum covariances.
    tmsv_construction_gap: f64,
    /// Minimum eigenvalue of `V + i Omega` for each full state.
    min_symplectic_eigenvalue: Physicality,
}

pub fn state(args: StateArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let sink = Sink::new(&file, &args.common)?;
    let cfg = interferometer(&file, &args.physics)?;
    let v_rho = astronomical_covariance(&cfg.source);
    let v_sigma = tmsv_covariance_closed(&cfg.resource);
    let v_sigma_exp = tmsv_covariance_exponential(&cfg.resource)?;
    let v_f = full_output_covariance(&cfg)?;
    let reduced = reduced_covariance(&cfg)?;
    let report = StateReport {
        config: cfg,
        abbreviations: reduced.abbreviations,
        min_symplectic_eigenvalue: Physicality {
            v_rho: v_rho.physicality()?.min_eigenvalue,
            v_sigma: v_sigma.physicality()?.min_eigenvalue,
            v_f: v_f.physicality()?.min_eigenvalue,
        },
        tmsv_construction_gap: (v_sigma.entries() - v_sigma_exp.entries()).amax(),
        pipeline_gap: reduced.max_deviation,
        v_rho,
        v_sigma,
        v_f,
        v_r: reduced.v_r,
        v_r_closed_form: reduced.closed_form,
    };
    let text = match sink.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = Table::default();
            let ab = report.abbreviations;
            for (name, x) in [("a", ab.a), ("b", ab.b), ("c", ab.c), ("d", ab.d), ("e", ab.e), ("f", ab.f)] {
                t.scalar(name, x);
            }
            t.covariance("v_rho", &report.v_rho);
            t.covariance("v_sigma", &report.v_sigma);
            t.covariance("v_f", &report.v_f);
            t.covariance("v_r", &report.v_r);
            t.scalar("pipeline_gap", report.pipeline_gap);
            t.scalar("tmsv_construction_gap", report.tmsv_construction_gap);
            t.to_csv()
        }
    };
    sink.emit(&text)
}

#[derive(Serialize)]
struct LimitComparison {
    fisher: FisherMatrix,
    /// Frobenius norm of `analytic - limit` relative to the limit.
    relative_gap: f64,
}

#[derive(Serialize)]
struct Limits {
    vacuum: LimitComparison,
    infinite_squeezing: LimitComparison,
}

#[derive(Serialize)]
struct FisherReport {
    config: InterferometerConfig,
    analytic: FisherMatrix,
    eigenvalues: [f64; 2],
    limits: Limits,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarloFisher>,
}

pub fn fisher(args: FisherArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let sink = Sink::new(&file, &args.common)?;
    let cfg = interferometer(&file, &args.physics)?;
    let monte_carlo = if file.switch(args.mc, "mc")? {
        let samples = file.or(args.samples, "samples", DEFAULT_SAMPLES)?;
        let seed = file.or(args.seed, "seed", 0)?;
        Some(fisher_monte_carlo(&cfg, samples, seed)?)
    } else {
        None
    };
    let analytic = fisher_analytic(&cfg)?;
    let (eps, g1, g2) = (cfg.source.epsilon(), cfg.source.g1(), cfg.source.g2());
    let compare = |which| -> Result<LimitComparison, CliError> {
        let fisher = fisher_limit_closed_form(eps, g1, g2, which)?;
        let relative_gap = (analytic.entries() - fisher.entries()).norm() / fisher.entries().norm();
        Ok(LimitComparison { fisher, relative_gap })
    };
    let report = FisherReport {
        config: cfg,
        analytic,
        eigenvalues: analytic.eigenvalues(),
        limits: Limits {
            vacuum: compare(Limit::Vacuum)?,
            infinite_squeezing: compare(Limit::InfiniteSqueezing)?,
        },
        monte_carlo,
    };
    let text = match sink.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = Table::default();
            t.coherence_matrix("analytic", to_array(&report.analytic));
            t.scalar("analytic_trace_norm", report.analytic.trace_norm());
            for (name, l) in [("vacuum", &report.limits.vacuum), ("infinite_squeezing", &report.limits.infinite_squeezing)] {
                t.coherence_matrix(name, to_array(&l.fisher));
                t.scalar(&format!("{name}_trace_norm"), l.fisher.trace_norm());
                t.scalar(&format!("{name}_relative_gap"), l.relative_gap);
            }
            if let Some(mc) = &report.monte_carlo {
                t.coherence_matrix("monte_carlo", to_array(&mc.estimate));
                t.coherence_matrix("monte_carlo_std_error", mc.std_error);
                t.coherence_vector("mean_score", mc.mean_score);
                t.coherence_vector("mean_score_std_error", mc.mean_score_std_error);
            }
            t.to_csv()
        }
    };
    sink.emit(&text)
}

#[derive(Serialize)]
struct CompareReport {
    delta_nu: f64,
    mode: BoundMode,
    curves: Vec<SchemeCurve>,
    ordering: OrderingReport,
}

pub fn compare(args: CompareArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let sink = Sink::new(&file, &args.common)?;
    let grid = log_grid(
        file.or(args.eps_min, "eps_min", DEFAULT_EPS_MIN)?,
        file.or(args.eps_max, "eps_max", DEFAULT_EPS_MAX)?,
        file.or(args.eps_points, "eps_points", DEFAULT_EPS_POINTS)?,
    )?;
    let delta_nu = file.or(args.delta_nu, "delta_nu", 1.0)?;
    let mode = if file.switch(args.exact, "exact")? {
        let cfg = interferometer(&file, &args.physics)?;
        BoundMode::Exact {
            g1: cfg.source.g1(),
            g2: cfg.source.g2(),
        }
    } else {
        BoundMode::LowestOrder
    };
    let curves = cumulative_curves(&grid, delta_nu, mode)?;
    let ordering = ordering_report(&grid)?;
    if let Some(path) = file.pick(args.report.clone(), "report")? {
        write_to(&path, &json(&ordering)?)?;
    }
    let text = match sink.format {
        Format::Csv => curves_to_csv(&curves),
        Format::Json => json(&CompareReport {
            delta_nu,
            mode,
            curves,
            ordering,
        })?,
    };
    sink.emit(&text)
}

pub fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let file = FileValues::load(args.common.config.as_deref())?;
    let sink = Sink::new(&file, &args.common)?;
    let cfg = interferometer(&file, &args.physics)?;
    let shots = file.or(args.shots, "shots", DEFAULT_SHOTS)?;
    let replications = file.or(args.replications, "replications", DEFAULT_REPLICATIONS)?;
    let seed = file.or(args.seed, "seed", 0)?;
    let result: EstimateResult = crb_experiment(&cfg, shots, replications, seed)?;
    let text = match sink.format {
        Format::Json => json(&result)?,
        Format::Csv => {
            let mut t = Table::default();
            t.coherence_vector("g_hat_mean", result.g_hat_mean);
            t.coherence_matrix("cov_hat", result.cov_hat);
            t.coherence_matrix("crb", result.crb);
            t.scalar("trace_ratio", result.trace_ratio);
            t.scalar("excess_min_eigenvalue", result.excess_min_eigenvalue);
            t.scalar("statistical_slack", result.statistical_slack);
            t.scalar("boundary_hits", result.boundary_hits as f64);
            t.to_csv()
        }
    };
    sink.emit(&text)
}
