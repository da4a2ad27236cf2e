//! Fisher information of the homodyne outcome distribution with respect to
//! the mutual coherence `(g1, g2)`.
//!
//! Three routes are provided: the zero-mean Gaussian identity
//! `F_ij = tr(V^{-1} dV_i V^{-1} dV_j) / 2` ([`fisher_analytic`]), a Monte
//! Carlo average of outer products of the score ([`fisher_monte_carlo`]), and
//! the closed-form vacuum / infinite-squeezing limits
//! ([`fisher_limit_closed_form`]).

use nalgebra::{Cholesky, Matrix2, Matrix4, SymmetricEigen, Vector4, U4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::MAX_CONDITION;
use crate::interferometer::{reduced_covariance, InterferometerConfig};
use crate::par::{chunk_bounds, chunk_count, chunk_rng, Execution};
use crate::states::SourceParams;

/// Smallest sample count accepted by the Monte Carlo estimator.
pub const MIN_MC_SAMPLES: usize = 1000;

/// Symmetric 2x2 Fisher matrix over `(g1, g2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FisherRepr", into = "FisherRepr")]
pub struct FisherMatrix {
    entries: Matrix2<f64>,
}

impl FisherMatrix {
    pub fn new(entries: Matrix2<f64>) -> Result<Self> {
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = (entries[(0, 1)] - entries[(1, 0)]).abs();
        if asym > 1e-12 * entries.amax().max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric { max_asymmetry: asym });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &Matrix2<f64> {
        &self.entries
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = SymmetricEigen::new(self.entries).eigenvalues;
        [e[0].min(e[1]), e[0].max(e[1])]
    }

    /// Sum of absolute eigenvalues; equals the sum of singular values for a
    /// symmetric matrix and the trace when positive semidefinite.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|e| e.abs()).sum()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues()[0] >= -1e-9
    }

    /// Cumulative information over `shots` independent measurements.
    pub fn cumulative(&self, shots: f64) -> Self {
        Self {
            entries: self.entries * shots,
        }
    }

    /// `F^{-1}`, the single-shot Cramér–Rao bound.
    pub fn inverse(&self) -> Result<Matrix2<f64>> {
        self.entries.try_inverse().ok_or(Error::Singular {
            condition: f64::INFINITY,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct FisherRepr {
    entries: [[f64; 2]; 2],
    trace_norm: f64,
}

impl From<FisherMatrix> for FisherRepr {
    fn from(f: FisherMatrix) -> Self {
        let e = f.entries;
        Self {
            entries: [[e[(0, 0)], e[(0, 1)]], [e[(1, 0)], e[(1, 1)]]],
            trace_norm: f.trace_norm(),
        }
    }
}

impl TryFrom<FisherRepr> for FisherMatrix {
    type Error = Error;

    fn try_from(r: FisherRepr) -> Result<Self> {
        let e = r.entries;
        FisherMatrix::new(Matrix2::new(e[0][0], e[0][1], e[1][0], e[1][1]))
    }
}

/// Derivatives of the measured covariance with respect to `g1` and `g2`.
///
/// `dV/dg1` has `eps/2` at `(x_A1, x_B1)` and `(p_A2, p_B2)`; `dV/dg2` has
/// `+eps/2` at `(x_A1, p_B2)` and `-eps/2` at `(p_A2, x_B1)`. Neither depends
/// on `g`, `n_bar` or `theta`.
pub fn dv_dg(epsilon: f64) -> [Matrix4<f64>; 2] {
    let h = 0.5 * epsilon;
    let mut d1 = Matrix4::zeros();
    d1[(0, 2)] = h;
    d1[(2, 0)] = h;
    d1[(1, 3)] = h;
    d1[(3, 1)] = h;
    let mut d2 = Matrix4::zeros();
    d2[(0, 3)] = h;
    d2[(3, 0)] = h;
    d2[(1, 2)] = -h;
    d2[(2, 1)] = -h;
    [d1, d2]
}

/// Cholesky factor of an outcome covariance, rejecting ill-conditioned input.
pub(crate) fn outcome_cholesky(v: &Matrix4<f64>) -> Result<Cholesky<f64, U4>> {
    let eig = v.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    Cholesky::new(*v).ok_or(Error::Singular { condition })
}

/// Per-shot Fisher matrix for an outcome covariance `v` and derivatives `dv`.
pub(crate) fn fisher_from_covariance(v: &Matrix4<f64>, dv: &[Matrix4<f64>; 2]) -> Result<FisherMatrix> {
    let chol = outcome_cholesky(v)?;
    let w = [chol.solve(&dv[0]), chol.solve(&dv[1])];
    let f = |i: usize, j: usize| 0.5 * (w[i] * w[j]).trace();
    let off = 0.5 * (f(0, 1) + f(1, 0));
    FisherMatrix::new(Matrix2::new(f(0, 0), off, off, f(1, 1)))
}

/// Fisher matrix from the Gaussian trace identity.
pub fn fisher_analytic(cfg: &InterferometerConfig) -> Result<FisherMatrix> {
    let v = reduced_covariance(cfg)?.matrix();
    fisher_from_covariance(&v, &dv_dg(cfg.source.epsilon()))
}

/// Gradient of `ln P(x)` with respect to `(g1, g2)` at one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub d_g1: f64,
    pub d_g2: f64,
}

/// Precomputed pieces of the score
/// `d ln P / d g_i = -tr(V^{-1} dV_i) / 2 + x^T V^{-1} dV_i V^{-1} x / 2`.
#[derive(Debug, Clone)]
pub struct ScoreModel {
    chol_l: Matrix4<f64>,
    weights: [Matrix4<f64>; 2],
    traces: [f64; 2],
}

impl ScoreModel {
    pub fn new(cfg: &InterferometerConfig) -> Result<Self> {
        let v = reduced_covariance(cfg)?.matrix();
        Self::from_covariance(&v, &dv_dg(cfg.source.epsilon()))
    }

    pub(crate) fn from_covariance(v: &Matrix4<f64>, dv: &[Matrix4<f64>; 2]) -> Result<Self> {
        let chol = outcome_cholesky(v)?;
        let inv = chol.inverse();
        let weights = [inv * dv[0] * inv, inv * dv[1] * inv];
        let traces = [(inv * dv[0]).trace(), (inv * dv[1]).trace()];
        Ok(Self {
            chol_l: chol.unpack(),
            weights,
            traces,
        })
    }

    pub fn score(&self, x: &Vector4<f64>) -> ScoreVector {
        let s = |i: usize| 0.5 * (x.dot(&(self.weights[i] * x)) - self.traces[i]);
        ScoreVector {
            d_g1: s(0),
            d_g2: s(1),
        }
    }

    /// One outcome drawn from the model's Gaussian.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vector4<f64> {
        let z = Vector4::from_fn(|_, _| rng.sample(StandardNormal));
        self.chol_l * z
    }
}

/// Monte Carlo Fisher estimate with elementwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloFisher {
    pub estimate: FisherMatrix,
    pub std_error: [[f64; 2]; 2],
    pub mean_score: [f64; 2],
    pub mean_score_std_error: [f64; 2],
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct ScoreMoments {
    n: f64,
    s: [f64; 2],
    s_sq: [f64; 2],
    // (s1 s1, s1 s2, s2 s2) and their squares
    y: [f64; 3],
    y_sq: [f64; 3],
}

impl ScoreMoments {
    fn push(&mut self, sc: ScoreVector) {
        let s = [sc.d_g1, sc.d_g2];
        let y = [s[0] * s[0], s[0] * s[1], s[1] * s[1]];
        self.n += 1.0;
        for (i, v) in s.into_iter().enumerate() {
            self.s[i] += v;
            self.s_sq[i] += v * v;
        }
        for (k, v) in y.into_iter().enumerate() {
            self.y[k] += v;
            self.y_sq[k] += v * v;
        }
    }

    fn merge(mut self, o: &Self) -> Self {
        self.n += o.n;
        for i in 0..2 {
            self.s[i] += o.s[i];
            self.s_sq[i] += o.s_sq[i];
        }
        for k in 0..3 {
            self.y[k] += o.y[k];
            self.y_sq[k] += o.y_sq[k];
        }
        self
    }
}

fn mean_and_se(sum: f64, sum_sq: f64, n: f64) -> (f64, f64) {
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of `E[score score^T]` under the default execution policy.
pub fn fisher_monte_carlo(
    cfg: &InterferometerConfig,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloFisher> {
    fisher_monte_carlo_with(cfg, samples, seed, Execution::default())
}

/// As [`fisher_monte_carlo`] with an explicit execution policy. The result
/// depends only on `(cfg, samples, seed)`; see [`crate::par::CHUNK_SAMPLES`].
pub fn fisher_monte_carlo_with(
    cfg: &InterferometerConfig,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloFisher> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!("samples must be >= {MIN_MC_SAMPLES}"),
        ));
    }
    let model = ScoreModel::new(cfg)?;
    let bounds: Vec<_> = chunk_bounds(samples).collect();
    let partial = exec.map(chunk_count(samples), |k| {
        let (lo, hi) = bounds[k];
        let mut rng = chunk_rng(seed, k);
        let mut acc = ScoreMoments::default();
        for _ in lo..hi {
            acc.push(model.score(&model.sample(&mut rng)));
        }
        acc
    });
    let m = partial
        .iter()
        .fold(ScoreMoments::default(), |acc, p| acc.merge(p));

    let n = m.n;
    let stat = |k: usize| mean_and_se(m.y[k], m.y_sq[k], n);
    let ((f11, e11), (f12, e12), (f22, e22)) = (stat(0), stat(1), stat(2));
    let (s1, se1) = mean_and_se(m.s[0], m.s_sq[0], n);
    let (s2, se2) = mean_and_se(m.s[1], m.s_sq[1], n);
    Ok(MonteCarloFisher {
        estimate: FisherMatrix::new(Matrix2::new(f11, f12, f12, f22))?,
        std_error: [[e11, e12], [e12, e22]],
        mean_score: [s1, s2],
        mean_score_std_error: [se1, se2],
        samples,
        seed,
    })
}

/// Which end of the squeezing range a closed-form limit describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    /// `n_bar -> 0`: the source mixed with vacuum.
    Vacuum,
    /// `n_bar -> infinity`.
    InfiniteSqueezing,
}

/// Closed-form Fisher matrix in the vacuum or infinite-squeezing limit.
pub fn fisher_limit_closed_form(eps: f64, g1: f64, g2: f64, which: Limit) -> Result<FisherMatrix> {
    SourceParams::new(eps, g1, g2)?;
    let gg = g1 * g1 + g2 * g2;
    let e2 = eps * eps;
    let (lead, prefactor) = match which {
        Limit::Vacuum => {
            let lead = 4.0 + 4.0 * eps;
            let p = 2f64.sqrt() * eps / (lead - (gg - 1.0) * e2);
            (lead, p * p)
        }
        Limit::InfiniteSqueezing => {
            let lead = 1.0 + 2.0 * eps;
            let p = eps / (lead - (gg - 1.0) * e2);
            (lead, p * p)
        }
    };
    let d1 = lead + (1.0 + g1 * g1 - g2 * g2) * e2;
    let d2 = lead + (1.0 - g1 * g1 + g2 * g2) * e2;
    let off = 2.0 * g1 * g2 * e2;
    FisherMatrix::new(Matrix2::new(d1, off, off, d2) * prefactor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::reduced_closed_form;

    fn cfg(eps: f64, g1: f64, g2: f64, n: f64, th: f64) -> InterferometerConfig {
        InterferometerConfig::from_params(eps, g1, g2, n, th).unwrap()
    }

    #[test]
    fn derivative_patterns() {
        let [d1, d2] = dv_dg(0.1);
        for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            assert_eq!(d1[(i, j)], 0.05);
        }
        assert_eq!(d1.iter().filter(|x| **x != 0.0).count(), 4);
        for (i, j) in [(0, 3), (3, 0)] {
            assert_eq!(d2[(i, j)], 0.05);
        }
        for (i, j) in [(1, 2), (2, 1)] {
            assert_eq!(d2[(i, j)], -0.05);
        }
        assert_eq!(d2.iter().filter(|x| **x != 0.0).count(), 4);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for &(eps, g1, g2, n, th) in &[(0.1, 0.2, -0.3, 1.0, 0.4), (0.7, -0.5, 0.5, 3.0, 5.0)] {
            let v = |a: f64, b: f64| reduced_closed_form(&cfg(eps, a, b, n, th).abbreviations());
            let fd1 = (v(g1 + h, g2) - v(g1 - h, g2)) / (2.0 * h);
            let fd2 = (v(g1, g2 + h) - v(g1, g2 - h)) / (2.0 * h);
            let [d1, d2] = dv_dg(eps);
            assert!((fd1 - d1).amax() <= 1e-8);
            assert!((fd2 - d2).amax() <= 1e-8);
        }
    }

    #[test]
    fn analytic_vacuum_example() {
        let f = fisher_analytic(&cfg(0.1, 0.0, 0.0, 0.0, 0.0)).unwrap();
        let want = 0.02 / 4.41;
        assert!((f.entries()[(0, 0)] - want).abs() < 1e-15);
        assert!((f.entries()[(1, 1)] - want).abs() < 1e-15);
        assert!(f.entries()[(0, 1)].abs() < 1e-18);
        assert!((want - 0.0045351).abs() < 1e-7);
    }

    #[test]
    fn analytic_large_squeezing_example() {
        let f = fisher_analytic(&cfg(0.1, 0.0, 0.0, 1e8, 0.0)).unwrap();
        let want = 0.01 / 1.21;
        for i in 0..2 {
            assert!(((f.entries()[(i, i)] - want) / want).abs() < 1e-3);
        }
    }

    #[test]
    fn vacuum_limit_off_diagonal_sign() {
        for (g1, g2) in [(0.3, 0.4), (-0.3, 0.4), (0.3, -0.4), (-0.3, -0.4)] {
            let f = fisher_analytic(&cfg(0.2, g1, g2, 1e-9, 0.0)).unwrap();
            assert_eq!(f.entries()[(0, 1)].signum(), (g1 * g2).signum());
            let lim = fisher_limit_closed_form(0.2, g1, g2, Limit::Vacuum).unwrap();
            assert_eq!(lim.entries()[(0, 1)].signum(), (g1 * g2).signum());
        }
    }

    #[test]
    fn limit_formula_values() {
        let f = fisher_limit_closed_form(0.1, 0.0, 0.0, Limit::Vacuum).unwrap();
        assert!((f.entries()[(0, 0)] - 0.02 / 4.41).abs() < 1e-16);
        let f = fisher_limit_closed_form(0.1, 0.0, 0.0, Limit::InfiniteSqueezing).unwrap();
        assert!((f.entries()[(0, 0)] - 0.01 / 1.21).abs() < 1e-16);
        assert!(fisher_limit_closed_form(0.0, 0.0, 0.0, Limit::Vacuum).is_err());
        assert!(fisher_limit_closed_form(0.1, 1.0, 1.0, Limit::Vacuum).is_err());
    }

    #[test]
    fn small_epsilon_traces() {
        let eps = 1e-3;
        for (g1, g2) in [(0.0, 0.0), (0.3, 0.4), (0.9, 0.0)] {
            let f0 = fisher_limit_closed_form(eps, g1, g2, Limit::Vacuum).unwrap();
            let finf = fisher_limit_closed_form(eps, g1, g2, Limit::InfiniteSqueezing).unwrap();
            assert!((f0.trace_norm() / (eps * eps) - 1.0).abs() < 0.05);
            assert!((finf.trace_norm() / (2.0 * eps * eps) - 1.0).abs() < 0.05);
        }
        // the diagonal ratio tends to 2 as eps shrinks
        let ratio = |eps: f64| {
            let f0 = fisher_limit_closed_form(eps, 0.3, 0.4, Limit::Vacuum).unwrap();
            let fi = fisher_limit_closed_form(eps, 0.3, 0.4, Limit::InfiniteSqueezing).unwrap();
            fi.entries()[(0, 0)] / f0.entries()[(0, 0)]
        };
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5].iter().map(|&e| (ratio(e) - 2.0).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[3] < 1e-4);
    }

    #[test]
    fn small_epsilon_off_diagonals_are_fourth_order() {
        // off-diagonal / eps^4 tends to g1 g2 / 4 (vacuum) and 2 g1 g2 (infinite squeezing)
        let (g1, g2) = (0.3, 0.4);
        for (which, coeff) in [(Limit::Vacuum, g1 * g2 / 4.0), (Limit::InfiniteSqueezing, 2.0 * g1 * g2)] {
            for eps in [1e-4, 1e-3] {
                let off = fisher_limit_closed_form(eps, g1, g2, which).unwrap().entries()[(0, 1)];
                assert!((off / eps.powi(4) / coeff - 1.0).abs() < 5.0 * eps, "{which:?} {eps}");
            }
            // the diagonal depends on g only from eps^4 on
            let shift = |eps: f64| {
                let at = |a, b| fisher_limit_closed_form(eps, a, b, which).unwrap().entries()[(0, 0)];
                (at(g1, g2) - at(0.0, 0.0)) / eps.powi(4)
            };
            let (s3, s2) = (shift(1e-3), shift(1e-2));
            assert!(s3.abs() < 1.0 && (s3 / s2 - 1.0).abs() < 0.05, "{which:?}: {s3} {s2}");
        }
    }

    #[test]
    fn trace_norm_is_trace_for_psd_and_abs_sum_otherwise() {
        let f = FisherMatrix::new(Matrix2::new(2.0, 0.5, 0.5, 1.0)).unwrap();
        assert!((f.trace_norm() - f.trace()).abs() < 1e-15);
        let svd_sum: f64 = f.entries().singular_values().iter().sum();
        assert!((f.trace_norm() - svd_sum).abs() < 1e-14);
        let indefinite = FisherMatrix::new(Matrix2::new(1.0, 0.0, 0.0, -2.0)).unwrap();
        assert!((indefinite.trace_norm() - 3.0).abs() < 1e-15);
        assert!(!indefinite.is_psd());
        assert!(FisherMatrix::new(Matrix2::new(1.0, 0.5, 0.4, 1.0)).is_err());
    }

    #[test]
    fn monte_carlo_rejects_small_sample_counts() {
        let c = cfg(0.1, 0.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            fisher_monte_carlo(&c, 999, 0),
            Err(Error::InvalidParameter { field: "samples", .. })
        ));
    }

    #[test]
    fn monte_carlo_is_deterministic_and_policy_independent() {
        let c = cfg(0.1, 0.3, 0.2, 1.0, 0.0);
        let a = fisher_monte_carlo(&c, 40_000, 7).unwrap();
        let b = fisher_monte_carlo(&c, 40_000, 7).unwrap();
        assert_eq!(a, b);
        let s = fisher_monte_carlo_with(&c, 40_000, 7, Execution::Sequential).unwrap();
        assert_eq!(a, s);
        let other = fisher_monte_carlo(&c, 40_000, 8).unwrap();
        assert_ne!(a.estimate, other.estimate);
    }

    #[test]
    fn serde_round_trip() {
        let f = fisher_analytic(&cfg(0.1, 0.3, 0.2, 1.0, 0.0)).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: FisherMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
