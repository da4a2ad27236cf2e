//! Maximum-likelihood estimation of `(g1, g2)` from simulated homodyne
//! records, and comparison of the estimator spread with the Cramér–Rao bound.
//!
//! `epsilon`, `n_bar` and `theta` are treated as known. The log-likelihood of a
//! zero-mean Gaussian record depends on the data only through the shot count
//! and the scatter matrix `sum x x^T`, so records are reduced to
//! [`SufficientStats`] before optimization.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{dv_dg, fisher_analytic, fisher_from_covariance, outcome_cholesky};
use crate::interferometer::{reduced_closed_form, reduced_covariance, InterferometerConfig};
use crate::par::{chunk_bounds, chunk_count, chunk_rng, Execution, CHUNK_SAMPLES};
use crate::states::check_coherence;

/// Iteration cap of the optimizer.
pub const MAX_ITERATIONS: usize = 500;
/// Convergence threshold on the per-shot (projected) gradient norm.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Fewest replications accepted by [`crb_experiment`].
pub const MIN_REPLICATIONS: usize = 30;
/// Accepted range of `trace(cov_hat) / trace(crb)` once `shots >= 1e4`.
pub const EFFICIENCY_WINDOW: (f64, f64) = (0.8, 1.5);
pub const EFFICIENCY_MIN_SHOTS: usize = 10_000;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Homodyne outcomes, one row `(x_A1, p_A2, x_B1, p_B2)` per shot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    outcomes: Vec<[f64; 4]>,
    seed: u64,
    config: InterferometerConfig,
}

impl MeasurementRecord {
    pub fn new(outcomes: Vec<[f64; 4]>, seed: u64, config: InterferometerConfig) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::invalid("shots", "a record needs at least one shot"));
        }
        if outcomes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            outcomes,
            seed,
            config,
        })
    }

    pub fn outcomes(&self) -> &[[f64; 4]] {
        &self.outcomes
    }

    pub fn shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &InterferometerConfig {
        &self.config
    }

    /// Scatter matrix accumulated in the same chunking as [`sample_statistics`],
    /// so both routes agree bit for bit.
    pub fn statistics(&self) -> SufficientStats {
        let scatter = self
            .outcomes
            .chunks(CHUNK_SAMPLES)
            .map(|rows| {
                rows.iter().fold(Matrix4::zeros(), |acc, r| {
                    let x = Vector4::from_column_slice(r);
                    acc + x * x.transpose()
                })
            })
            .fold(Matrix4::zeros(), |acc, m| acc + m);
        SufficientStats {
            shots: self.shots(),
            scatter,
            config: self.config,
        }
    }
}

/// Shot count and scatter matrix of a record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    pub shots: usize,
    pub scatter: Matrix4<f64>,
    pub config: InterferometerConfig,
}

impl SufficientStats {
    /// Empirical covariance `scatter / shots`.
    pub fn covariance(&self) -> Matrix4<f64> {
        self.scatter / self.shots as f64
    }
}

struct OutcomeSampler {
    chol_l: Matrix4<f64>,
}

impl OutcomeSampler {
    fn new(cfg: &InterferometerConfig) -> Result<Self> {
        let v = reduced_covariance(cfg)?.matrix();
        Ok(Self {
            chol_l: outcome_cholesky(&v)?.unpack(),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Vector4<f64> {
        let z = Vector4::from_fn(|_, _| rng.sample(StandardNormal));
        self.chol_l * z
    }
}

fn check_shots(shots: usize) -> Result<()> {
    if shots == 0 {
        return Err(Error::invalid("shots", "shots must be >= 1"));
    }
    Ok(())
}

/// Draws `shots` i.i.d. outcomes from the measured covariance.
pub fn sample_records(cfg: &InterferometerConfig, shots: usize, seed: u64) -> Result<MeasurementRecord> {
    sample_records_with(cfg, shots, seed, Execution::default())
}

pub fn sample_records_with(
    cfg: &InterferometerConfig,
    shots: usize,
    seed: u64,
    exec: Execution,
) -> Result<MeasurementRecord> {
    check_shots(shots)?;
    let sampler = OutcomeSampler::new(cfg)?;
    let bounds: Vec<_> = chunk_bounds(shots).collect();
    let chunks = exec.map(chunk_count(shots), |k| {
        let (lo, hi) = bounds[k];
        let mut rng = chunk_rng(seed, k);
        (lo..hi)
            .map(|_| {
                let x = sampler.draw(&mut rng);
                [x[0], x[1], x[2], x[3]]
            })
            .collect::<Vec<_>>()
    });
    MeasurementRecord::new(chunks.concat(), seed, *cfg)
}

/// Same draws as [`sample_records`], reduced to sufficient statistics
/// without storing the outcomes.
pub fn sample_statistics(cfg: &InterferometerConfig, shots: usize, seed: u64) -> Result<SufficientStats> {
    sample_statistics_with(cfg, shots, seed, Execution::default())
}

pub fn sample_statistics_with(
    cfg: &InterferometerConfig,
    shots: usize,
    seed: u64,
    exec: Execution,
) -> Result<SufficientStats> {
    check_shots(shots)?;
    let sampler = OutcomeSampler::new(cfg)?;
    let bounds: Vec<_> = chunk_bounds(shots).collect();
    let partial = exec.map(chunk_count(shots), |k| {
        let (lo, hi) = bounds[k];
        let mut rng = chunk_rng(seed, k);
        (lo..hi).fold(Matrix4::zeros(), |acc, _| {
            let x = sampler.draw(&mut rng);
            acc + x * x.transpose()
        })
    });
    let scatter = partial.iter().fold(Matrix4::zeros(), |acc, m| acc + m);
    Ok(SufficientStats {
        shots,
        scatter,
        config: *cfg,
    })
}

/// Log-likelihood of `stats` as a function of the coherence.
struct Likelihood<'a> {
    stats: &'a SufficientStats,
    dv: [Matrix4<f64>; 2],
}

struct Evaluation {
    /// Mean negative log-likelihood per shot (without the `2 ln 2pi` constant).
    objective: f64,
    gradient: Vector2<f64>,
}

impl<'a> Likelihood<'a> {
    fn new(stats: &'a SufficientStats) -> Self {
        Self {
            stats,
            dv: dv_dg(stats.config.source.epsilon()),
        }
    }

    fn covariance(&self, g: &Vector2<f64>) -> Result<Matrix4<f64>> {
        let cfg = self.stats.config.with_coherence(g[0], g[1])?;
        Ok(reduced_closed_form(&cfg.abbreviations()))
    }

    fn evaluate(&self, g: &Vector2<f64>) -> Result<Evaluation> {
        let v = self.covariance(g)?;
        let chol = outcome_cholesky(&v)?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let empirical = self.stats.covariance();
        let vinv_s = chol.solve(&empirical);
        let objective = 0.5 * (vinv_s.trace() + log_det);
        let grad = |i: usize| {
            let w = chol.solve(&self.dv[i]);
            // d objective / d g_i = (tr(V^-1 D) - tr(V^-1 D V^-1 S)) / 2
            0.5 * (w.trace() - (w * vinv_s).trace())
        };
        Ok(Evaluation {
            objective,
            gradient: Vector2::new(grad(0), grad(1)),
        })
    }

    fn log_likelihood(&self, g: &Vector2<f64>) -> Result<f64> {
        let m = self.stats.shots as f64;
        Ok(-m * (self.evaluate(g)?.objective + 2.0 * LN_2PI))
    }
}

/// Sum over shots of the outcome log-density at coherence `(g1, g2)`.
pub fn log_likelihood(record: &MeasurementRecord, g1: f64, g2: f64) -> Result<f64> {
    log_likelihood_stats(&record.statistics(), g1, g2)
}

pub fn log_likelihood_stats(stats: &SufficientStats, g1: f64, g2: f64) -> Result<f64> {
    check_coherence(g1, g2)?;
    Likelihood::new(stats).log_likelihood(&Vector2::new(g1, g2))
}

/// Gradient of [`log_likelihood`] with respect to `(g1, g2)`.
pub fn log_likelihood_gradient(stats: &SufficientStats, g1: f64, g2: f64) -> Result<[f64; 2]> {
    check_coherence(g1, g2)?;
    let m = stats.shots as f64;
    let grad = Likelihood::new(stats).evaluate(&Vector2::new(g1, g2))?.gradient;
    Ok([-m * grad[0], -m * grad[1]])
}

/// Maximum-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub g1: f64,
    pub g2: f64,
    pub log_likelihood: f64,
    /// Per-shot projected gradient norm at the solution.
    pub gradient_norm: f64,
    pub iterations: usize,
    /// The maximizer lies on `|g| = 1`.
    pub on_boundary: bool,
}

fn project(g: Vector2<f64>) -> Vector2<f64> {
    let r = g.norm();
    if r > 1.0 {
        g / r
    } else {
        g
    }
}

fn at_boundary(g: &Vector2<f64>) -> bool {
    g.norm() >= 1.0 - 1e-12
}

/// Gradient with the component that would push outside the disk removed.
fn projected_gradient(g: &Vector2<f64>, grad: &Vector2<f64>) -> Vector2<f64> {
    if at_boundary(g) {
        let n = g / g.norm();
        let radial = grad.dot(&n);
        // Descent is -grad; it exits the disk when radial < 0.
        if radial < 0.0 {
            return grad - n * radial;
        }
    }
    *grad
}

struct Minimum {
    g: Vector2<f64>,
    objective: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
}

fn minimize(lik: &Likelihood<'_>, start: Vector2<f64>) -> Result<Minimum> {
    let mut g = project(start);
    let mut eval = lik.evaluate(&g)?;
    let initial_h = |g: &Vector2<f64>| -> Matrix2<f64> {
        lik.covariance(g)
            .and_then(|v| fisher_from_covariance(&v, &lik.dv))
            .ok()
            .and_then(|f| f.inverse().ok())
            .filter(|h| h.iter().all(|x| x.is_finite()) && h.trace() > 0.0)
            .unwrap_or_else(Matrix2::identity)
    };
    let mut h = initial_h(&g);
    // secant curvature along the circle, kept while the constraint stays active
    let mut arc: Option<(f64, f64)> = None;

    for it in 0..MAX_ITERATIONS {
        let pg = projected_gradient(&g, &eval.gradient);
        if pg.norm() <= GRADIENT_TOLERANCE {
            return Ok(Minimum {
                g,
                objective: eval.objective,
                gradient_norm: pg.norm(),
                iterations: it,
                converged: true,
            });
        }

        if at_boundary(&g) && pg != eval.gradient {
            // active constraint: minimize over the angle
            let phi = g[1].atan2(g[0]);
            let n = Vector2::new(phi.cos(), phi.sin());
            let t = Vector2::new(-n[1], n[0]);
            let slope = eval.gradient.dot(&t);
            let curvature = match arc {
                Some((prev_phi, prev_slope)) if phi != prev_phi => {
                    let moved = (phi - prev_phi + PI).rem_euclid(TAU) - PI;
                    let k = (slope - prev_slope) / moved;
                    if k > 0.0 { Some(k) } else { None }
                }
                _ => None,
            }
            .unwrap_or_else(|| {
                let k = 1.0 / t.dot(&(h * t)) - eval.gradient.dot(&n);
                if k.is_finite() && k > 0.0 { k } else { 1.0 }
            });
            let full = (-slope / curvature).clamp(-1.0, 1.0);
            let slack = 4.0 * f64::EPSILON * eval.objective.abs().max(1.0);
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let delta = full * step;
                let trial = Vector2::new((phi + delta).cos(), (phi + delta).sin());
                if let Ok(e) = lik.evaluate(&trial) {
                    if e.objective <= eval.objective + 1e-4 * slope * delta + slack {
                        accepted = Some((trial, e));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((next, next_eval)) = accepted else {
                return Ok(Minimum {
                    g,
                    objective: eval.objective,
                    gradient_norm: pg.norm(),
                    iterations: it,
                    converged: false,
                });
            };
            arc = Some((phi, slope));
            g = next;
            eval = next_eval;
            continue;
        }
        arc = None;

        let mut dir = -(h * eval.gradient);
        if dir.dot(&eval.gradient) >= 0.0 {
            h = initial_h(&g);
            dir = -(h * pg);
        }

        let slack = 4.0 * f64::EPSILON * eval.objective.abs().max(1.0);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = project(g + dir * step);
            if let Ok(e) = lik.evaluate(&trial) {
                let decrease = eval.gradient.dot(&(trial - g));
                if e.objective <= eval.objective + 1e-4 * decrease + slack {
                    accepted = Some((trial, e));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((next, next_eval)) = accepted else {
            return Ok(Minimum {
                g,
                objective: eval.objective,
                gradient_norm: pg.norm(),
                iterations: it,
                converged: false,
            });
        };

        let s = next - g;
        let y = next_eval.gradient - eval.gradient;
        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() && sy > 0.0 {
            let rho = 1.0 / sy;
            let i = Matrix2::identity();
            h = (i - s * y.transpose() * rho) * h * (i - y * s.transpose() * rho)
                + s * s.transpose() * rho;
        }
        g = next;
        eval = next_eval;
    }
    let pg = projected_gradient(&g, &eval.gradient);
    Ok(Minimum {
        g,
        objective: eval.objective,
        gradient_norm: pg.norm(),
        iterations: MAX_ITERATIONS,
        converged: pg.norm() <= GRADIENT_TOLERANCE,
    })
}

/// Moment estimate of `g` from the empirical covariance.
fn moment_initializer(stats: &SufficientStats) -> Vector2<f64> {
    let c = stats.covariance();
    let eps = stats.config.source.epsilon();
    project(Vector2::new(
        (c[(0, 2)] + c[(1, 3)]) / eps,
        (c[(0, 3)] - c[(1, 2)]) / eps,
    ))
}

/// Maximum-likelihood estimate of `(g1, g2)` over the closed unit disk.
pub fn mle(record: &MeasurementRecord) -> Result<MleFit> {
    mle_stats(&record.statistics())
}

/// Projected quasi-Newton (BFGS) ascent of the log-likelihood, started from
/// `g = 0` and from the moment estimate; the better solution wins.
pub fn mle_stats(stats: &SufficientStats) -> Result<MleFit> {
    check_shots(stats.shots)?;
    let lik = Likelihood::new(stats);
    let starts = [Vector2::zeros(), moment_initializer(stats)];
    let mut best: Option<Minimum> = None;
    for s in starts {
        let m = minimize(&lik, s)?;
        let better = match &best {
            None => true,
            Some(b) => (m.converged && !b.converged) || (m.converged == b.converged && m.objective < b.objective),
        };
        if better {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");
    if !best.converged {
        return Err(Error::NonConvergence {
            iterations: best.iterations,
            best: (best.g[0], best.g[1]),
        });
    }
    Ok(MleFit {
        g1: best.g[0],
        g2: best.g[1],
        log_likelihood: lik.log_likelihood(&best.g)?,
        gradient_norm: best.gradient_norm,
        iterations: best.iterations,
        on_boundary: at_boundary(&best.g),
    })
}

/// Seed of replication `index`: one SplitMix64 step applied to
/// `master + (index + 1) * 0x9E3779B97F4A7C15` (wrapping).
pub fn replication_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Outcome of a Cramér–Rao experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub config: InterferometerConfig,
    pub shots: usize,
    pub replications: usize,
    pub g_hat_mean: [f64; 2],
    /// Empirical covariance of the estimates across replications.
    pub cov_hat: [[f64; 2]; 2],
    /// `F^{-1} / shots`.
    pub crb: [[f64; 2]; 2],
    pub trace_ratio: f64,
    pub seed: u64,
    pub estimator: String,
    /// Minimum eigenvalue of `cov_hat - crb`.
    pub excess_min_eigenvalue: f64,
    /// Three times the Frobenius norm of the elementwise standard errors of `cov_hat`.
    pub statistical_slack: f64,
    pub cramer_rao_consistent: bool,
    pub efficiency_window_met: bool,
    pub boundary_hits: usize,
}

fn to_array(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn crb_experiment(
    cfg: &InterferometerConfig,
    shots: usize,
    replications: usize,
    seed: u64,
) -> Result<EstimateResult> {
    crb_experiment_with(cfg, shots, replications, seed, Execution::default())
}

/// Runs [`mle_stats`] on `replications` independent records and compares the
/// spread of the estimates with `F^{-1} / shots`. Results are reduced in
/// replication order, so the output depends only on the arguments.
pub fn crb_experiment_with(
    cfg: &InterferometerConfig,
    shots: usize,
    replications: usize,
    seed: u64,
    exec: Execution,
) -> Result<EstimateResult> {
    if replications < MIN_REPLICATIONS {
        return Err(Error::invalid(
            "replications",
            format!("replications must be >= {MIN_REPLICATIONS}"),
        ));
    }
    check_shots(shots)?;
    let fits = exec.map(replications, |r| {
        let stats = sample_statistics_with(cfg, shots, replication_seed(seed, r), exec)?;
        mle_stats(&stats)
    });
    let fits = fits.into_iter().collect::<Result<Vec<_>>>()?;

    let n = replications as f64;
    let points: Vec<Vector2<f64>> = fits.iter().map(|f| Vector2::new(f.g1, f.g2)).collect();
    let mean = points.iter().fold(Vector2::zeros(), |a, p| a + p) / n;
    let cov = points
        .iter()
        .map(|p| (p - mean) * (p - mean).transpose())
        .fold(Matrix2::zeros(), |a, m| a + m)
        / (n - 1.0);
    let mut se_sq = Matrix2::zeros();
    for p in &points {
        let d = p - mean;
        let dev = d * d.transpose() - cov;
        se_sq += dev.component_mul(&dev);
    }
    let se = (se_sq / (n * (n - 1.0))).map(f64::sqrt);

    let crb = fisher_analytic(cfg)?.inverse()? / shots as f64;
    let trace_ratio = cov.trace() / crb.trace();
    let excess = cov - crb;
    let excess_min_eigenvalue = SymmetricEigen::new(0.5 * (excess + excess.transpose()))
        .eigenvalues
        .min();
    let statistical_slack = 3.0 * se.norm();
    Ok(EstimateResult {
        config: *cfg,
        shots,
        replications,
        g_hat_mean: [mean[0], mean[1]],
        cov_hat: to_array(&cov),
        crb: to_array(&crb),
        trace_ratio,
        seed,
        estimator: "maximum-likelihood".into(),
        excess_min_eigenvalue,
        statistical_slack,
        cramer_rao_consistent: excess_min_eigenvalue >= -statistical_slack,
        efficiency_window_met: trace_ratio >= EFFICIENCY_WINDOW.0 && trace_ratio <= EFFICIENCY_WINDOW.1,
        boundary_hits: fits.iter().filter(|f| f.on_boundary).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::gaussian_log_pdf;

    fn cfg(eps: f64, g1: f64, g2: f64, n: f64, th: f64) -> InterferometerConfig {
        InterferometerConfig::from_params(eps, g1, g2, n, th).unwrap()
    }

    #[test]
    fn empty_record_rejected() {
        let c = cfg(0.1, 0.0, 0.0, 1.0, 0.0);
        assert!(MeasurementRecord::new(vec![], 0, c).is_err());
        assert!(MeasurementRecord::new(vec![[f64::NAN, 0.0, 0.0, 0.0]], 0, c).is_err());
        assert!(sample_records(&c, 0, 0).is_err());
    }

    #[test]
    fn streaming_statistics_match_records() {
        let c = cfg(0.3, 0.2, -0.1, 2.0, 1.0);
        let shots = 2 * CHUNK_SAMPLES + 123;
        let rec = sample_records(&c, shots, 9).unwrap();
        assert_eq!(rec.statistics(), sample_statistics(&c, shots, 9).unwrap());
        let seq = sample_records_with(&c, shots, 9, Execution::Sequential).unwrap();
        assert_eq!(rec, seq);
    }

    #[test]
    fn likelihood_matches_sum_of_log_densities() {
        let c = cfg(0.2, 0.3, 0.1, 1.0, 0.5);
        let rec = sample_records(&c, 500, 4).unwrap();
        for (g1, g2) in [(0.3, 0.1), (0.0, 0.0), (-0.5, 0.5)] {
            let v = reduced_covariance(&c.with_coherence(g1, g2).unwrap()).unwrap().v_r;
            let direct: f64 = rec
                .outcomes()
                .iter()
                .map(|x| gaussian_log_pdf(&v, x).unwrap())
                .sum();
            let fast = log_likelihood(&rec, g1, g2).unwrap();
            assert!((direct - fast).abs() < 1e-9 * direct.abs(), "{direct} {fast}");
        }
        assert!(log_likelihood(&rec, 0.9, 0.9).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = cfg(0.4, 0.1, 0.2, 3.0, 2.0);
        let stats = sample_statistics(&c, 2000, 5).unwrap();
        let (g1, g2, h) = (0.2, -0.3, 1e-6);
        let grad = log_likelihood_gradient(&stats, g1, g2).unwrap();
        let ll = |a, b| log_likelihood_stats(&stats, a, b).unwrap();
        let fd1 = (ll(g1 + h, g2) - ll(g1 - h, g2)) / (2.0 * h);
        let fd2 = (ll(g1, g2 + h) - ll(g1, g2 - h)) / (2.0 * h);
        assert!((grad[0] - fd1).abs() < 1e-5 * fd1.abs().max(1.0));
        assert!((grad[1] - fd2).abs() < 1e-5 * fd2.abs().max(1.0));
    }

    #[test]
    fn mle_is_stationary_in_the_interior() {
        let c = cfg(0.2, 0.3, 0.1, 5.0, 0.0);
        let rec = sample_records(&c, 20_000, 1).unwrap();
        let fit = mle(&rec).unwrap();
        assert!(!fit.on_boundary);
        let grad = log_likelihood_gradient(&rec.statistics(), fit.g1, fit.g2).unwrap();
        let per_shot = (grad[0].hypot(grad[1])) / rec.shots() as f64;
        assert!(per_shot <= GRADIENT_TOLERANCE);
        assert!(fit.log_likelihood >= log_likelihood(&rec, 0.3, 0.1).unwrap());
    }

    #[test]
    fn boundary_truth_stays_in_disk() {
        for seed in 0..20 {
            let c = cfg(0.3, 1.0, 0.0, 1.0, 0.0);
            let stats = sample_statistics(&c, 3000, seed).unwrap();
            let fit = mle_stats(&stats).unwrap();
            assert!(fit.g1.hypot(fit.g2) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn single_shot_records_fit() {
        let c = cfg(0.1, 0.0, 0.0, 1.0, 0.0);
        for seed in 0..50 {
            let stats = sample_statistics(&c, 1, seed).unwrap();
            let fit = mle_stats(&stats).unwrap();
            assert!(fit.g1.hypot(fit.g2) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn replication_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|r| replication_seed(0, r)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(replication_seed(0, 0), replication_seed(1, 0));
    }

    #[test]
    fn too_few_replications_rejected() {
        let c = cfg(0.1, 0.0, 0.0, 1.0, 0.0);
        let err = crb_experiment(&c, 100, 10, 0).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("replications"));
    }

    #[test]
    fn crb_halves_when_shots_double() {
        let c = cfg(0.1, 0.0, 0.0, 1.0, 0.0);
        let a = crb_experiment(&c, 1000, 30, 3).unwrap();
        let b = crb_experiment(&c, 2000, 30, 3).unwrap();
        let (ta, tb) = (a.crb[0][0] + a.crb[1][1], b.crb[0][0] + b.crb[1][1]);
        assert!((ta / tb - 2.0).abs() < 1e-12);
    }
}
