//! Cumulative Fisher information of competing interferometry schemes.
//!
//! Every scheme is credited with `delta_nu` successful measurements per unit
//! time, so the cumulative bound is `delta_nu` times the lowest-order
//! single-shot trace-norm bound:
//!
//! | scheme   | single shot |
//! |----------|-------------|
//! | `CV_INF` | `2 eps^2`   |
//! | `CV_0`   | `eps^2`     |
//! | `DD`     | `eps`       |
//! | `LOCAL`  | `eps^2`     |
//! | `GJC12`  | `eps / 2`   |
//!
//! The `DD`, `LOCAL` and `GJC12` rows are literature constants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{fisher_limit_closed_form, Limit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    /// Homodyne scheme with infinitely squeezed resource.
    #[serde(rename = "CV_INF")]
    CvInf,
    /// Homodyne scheme with vacuum resource.
    #[serde(rename = "CV_0")]
    Cv0,
    /// Direct detection.
    #[serde(rename = "DD")]
    Dd,
    /// Local measurements with classical communication.
    #[serde(rename = "LOCAL")]
    Local,
    /// Single-photon entanglement-assisted scheme.
    #[serde(rename = "GJC12")]
    Gjc12,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::CvInf,
        SchemeId::Cv0,
        SchemeId::Dd,
        SchemeId::Local,
        SchemeId::Gjc12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::CvInf => "CV_INF",
            SchemeId::Cv0 => "CV_0",
            SchemeId::Dd => "DD",
            SchemeId::Local => "LOCAL",
            SchemeId::Gjc12 => "GJC12",
        }
    }

    /// `(coefficient, power)` of the lowest-order bound `k eps^p`.
    fn power_law(self) -> (f64, i32) {
        match self {
            SchemeId::CvInf => (2.0, 2),
            SchemeId::Cv0 => (1.0, 2),
            SchemeId::Dd => (1.0, 1),
            SchemeId::Local => (1.0, 2),
            SchemeId::Gjc12 => (0.5, 1),
        }
    }

    fn is_cv(self) -> bool {
        matches!(self, SchemeId::CvInf | SchemeId::Cv0)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::invalid("scheme", format!("unknown scheme {s:?}")))
    }
}

/// Whether CV bounds use the lowest-order expressions or exact trace norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum BoundMode {
    LowestOrder,
    /// Exact finite-`eps` trace norms of the limit Fisher matrices at `g`.
    Exact { g1: f64, g2: f64 },
}

impl BoundMode {
    pub fn label(&self) -> &'static str {
        match self {
            BoundMode::LowestOrder => "lowest-order",
            BoundMode::Exact { .. } => "exact",
        }
    }
}

/// Successful measurements per unit time; `delta_nu` for every scheme.
pub fn rate_factor(_scheme: SchemeId, delta_nu: f64) -> Result<f64> {
    if !delta_nu.is_finite() || delta_nu <= 0.0 {
        return Err(Error::invalid("delta_nu", "delta_nu must be > 0"));
    }
    Ok(delta_nu)
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid("epsilon", format!("epsilon must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

/// Lowest-order single-shot trace-norm bound.
pub fn single_shot_bound(scheme: SchemeId, eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    let (k, p) = scheme.power_law();
    Ok(k * eps.powi(p))
}

fn single_shot(scheme: SchemeId, eps: f64, mode: BoundMode) -> Result<f64> {
    match mode {
        BoundMode::Exact { g1, g2 } if scheme.is_cv() => {
            check_epsilon(eps)?;
            let limit = if scheme == SchemeId::CvInf {
                Limit::InfiniteSqueezing
            } else {
                Limit::Vacuum
            };
            Ok(fisher_limit_closed_form(eps, g1, g2, limit)?.trace_norm())
        }
        _ => single_shot_bound(scheme, eps),
    }
}

/// One scheme's cumulative bound over an epsilon grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeCurve {
    pub scheme: SchemeId,
    /// `(epsilon, cumulative bound)` in grid order.
    pub points: Vec<(f64, f64)>,
    pub delta_nu: f64,
    pub mode: BoundMode,
}

/// Checks that the grid is strictly increasing within `(0, 1]`.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    for &e in grid {
        check_epsilon(e)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("eps_grid", "epsilon grid must be strictly increasing"));
    }
    Ok(())
}

/// `points` logarithmically spaced values on `[lo, hi]`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || points < 2 {
        return Err(Error::invalid(
            "eps_grid",
            "log grid needs 0 < eps_min < eps_max and at least 2 points",
        ));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (points - 1) as f64;
    let mut g: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
    g[0] = lo;
    g[points - 1] = hi;
    validate_grid(&g)?;
    Ok(g)
}

/// 200 logarithmic points on `[1e-4, 1]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-4, 1.0, 200).expect("valid default grid")
}

/// Cumulative bounds for all five schemes, in [`SchemeId::ALL`] order.
pub fn cumulative_curves(eps_grid: &[f64], delta_nu: f64, mode: BoundMode) -> Result<Vec<SchemeCurve>> {
    validate_grid(eps_grid)?;
    SchemeId::ALL
        .into_iter()
        .map(|scheme| {
            let rate = rate_factor(scheme, delta_nu)?;
            let points = eps_grid
                .iter()
                .map(|&e| Ok((e, rate * single_shot(scheme, e, mode)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SchemeCurve {
                scheme,
                points,
                delta_nu,
                mode,
            })
        })
        .collect()
}

/// Schemes at one epsilon, best first; ties share a tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingPoint {
    pub epsilon: f64,
    pub ranking: Vec<Vec<SchemeId>>,
    /// `DD > GJC12 > CV_INF > CV_0 = LOCAL`.
    pub expected_ordering: bool,
}

/// Epsilon where two lowest-order curves meet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub schemes: [SchemeId; 2],
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub points: Vec<OrderingPoint>,
    /// Analytic crossings inside the grid's range.
    pub crossings: Vec<Crossing>,
    /// Schemes whose lowest-order curves coincide everywhere.
    pub coincident: Vec<[SchemeId; 2]>,
}

/// The ordering claimed for small epsilon.
pub const EXPECTED_ORDERING: [&[SchemeId]; 4] = [
    &[SchemeId::Dd],
    &[SchemeId::Gjc12],
    &[SchemeId::CvInf],
    &[SchemeId::Cv0, SchemeId::Local],
];

fn rank(eps: f64) -> Result<Vec<Vec<SchemeId>>> {
    let mut vals = SchemeId::ALL
        .into_iter()
        .map(|s| Ok((s, single_shot_bound(s, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    vals.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut tiers: Vec<(f64, Vec<SchemeId>)> = Vec::new();
    for (s, v) in vals {
        match tiers.last_mut() {
            Some((tv, members)) if (*tv - v).abs() <= 1e-12 * tv.abs() => members.push(s),
            _ => tiers.push((v, vec![s])),
        }
    }
    Ok(tiers.into_iter().map(|(_, m)| m).collect())
}

fn analytic_crossing(a: SchemeId, b: SchemeId) -> Option<f64> {
    let (ka, pa) = a.power_law();
    let (kb, pb) = b.power_law();
    if pa == pb {
        return None;
    }
    // ka eps^pa = kb eps^pb
    Some((kb / ka).powf(1.0 / f64::from(pa - pb)))
}

/// Per-epsilon ranking with crossings, using the lowest-order bounds.
pub fn ordering_report(eps_grid: &[f64]) -> Result<OrderingReport> {
    validate_grid(eps_grid)?;
    let points = eps_grid
        .iter()
        .map(|&epsilon| {
            let ranking = rank(epsilon)?;
            let expected_ordering = ranking.len() == EXPECTED_ORDERING.len()
                && ranking
                    .iter()
                    .zip(EXPECTED_ORDERING)
                    .all(|(got, want)| got.as_slice() == want);
            Ok(OrderingPoint {
                epsilon,
                ranking,
                expected_ordering,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut crossings = Vec::new();
    let mut coincident = Vec::new();
    if let (Some(&lo), Some(&hi)) = (eps_grid.first(), eps_grid.last()) {
        for (i, &a) in SchemeId::ALL.iter().enumerate() {
            for &b in &SchemeId::ALL[i + 1..] {
                match analytic_crossing(a, b) {
                    Some(e) if e >= lo && e <= hi => crossings.push(Crossing {
                        schemes: [a, b],
                        epsilon: e,
                    }),
                    None if a.power_law() == b.power_law() => coincident.push([a, b]),
                    _ => {}
                }
            }
        }
        crossings.sort_by(|x, y| x.epsilon.total_cmp(&y.epsilon));
    }
    Ok(OrderingReport {
        points,
        crossings,
        coincident,
    })
}

/// Epsilon at which the `CV_INF` and `GJC12` curves cross.
pub fn cv_gjc12_crossover() -> f64 {
    analytic_crossing(SchemeId::CvInf, SchemeId::Gjc12).expect("different powers")
}
