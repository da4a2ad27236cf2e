//! Mixing the source with the squeezed resource on one balanced beam
//! splitter per telescope, then keeping the homodyned quadratures
//! `(x_A1, p_A2, x_B1, p_B2)`.
//!
//! The product state is naturally ordered `(A1, B1, A2, B2)` but the splitters
//! act on `(A1, A2)` and `(B1, B2)`, so the pipeline passes through
//! [`product_to_splitter`] before applying `R ⊕ R`.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian::{CovarianceMatrix, Permutation, QuadLabel, QuadratureOrdering};
use crate::states::{
    astronomical_covariance, tmsv_covariance_closed, SourceParams, TmsvParams, RESOURCE_MODES,
    SOURCE_MODES,
};

/// Mode order of the product state `rho_{A1 B1} ⊗ sigma_{A2 B2}`.
pub const PRODUCT_MODES: [&str; 4] = ["A1", "B1", "A2", "B2"];
/// Mode order in which the two beam splitters act block-diagonally.
pub const SPLITTER_MODES: [&str; 4] = ["A1", "A2", "B1", "B2"];

/// The homodyned quadratures, one `x` and one `p` per telescope.
pub fn measured_labels() -> [QuadLabel; 4] {
    [
        QuadLabel::x("A1"),
        QuadLabel::p("A2"),
        QuadLabel::x("B1"),
        QuadLabel::p("B2"),
    ]
}

/// Permutation `(A1, B1, A2, B2) -> (A1, A2, B1, B2)`.
pub fn product_to_splitter() -> Permutation {
    let from = QuadratureOrdering::modes(&PRODUCT_MODES).expect("static ordering");
    let to = QuadratureOrdering::modes(&SPLITTER_MODES).expect("static ordering");
    Permutation::between(&from, &to).expect("same modes")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub source: SourceParams,
    pub resource: TmsvParams,
}

impl InterferometerConfig {
    pub fn new(source: SourceParams, resource: TmsvParams) -> Self {
        Self { source, resource }
    }

    /// Convenience constructor validating every parameter.
    pub fn from_params(epsilon: f64, g1: f64, g2: f64, n_bar: f64, theta: f64) -> Result<Self> {
        Ok(Self {
            source: SourceParams::new(epsilon, g1, g2)?,
            resource: TmsvParams::new(n_bar, theta)?,
        })
    }

    pub fn abbreviations(&self) -> Abbreviations {
        Abbreviations::new(&self.source, &self.resource)
    }

    pub fn with_coherence(&self, g1: f64, g2: f64) -> Result<Self> {
        Ok(Self {
            source: self.source.with_coherence(g1, g2)?,
            resource: self.resource,
        })
    }
}

/// Shorthands of the measured covariance:
/// `a = eps + 1`, `b = 2n + 1`, `c = eps g1`, `d = 2 cos(theta) sqrt(n(n+1))`,
/// `e = eps g2`, `f = 2 sin(theta) sqrt(n(n+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Abbreviations {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Abbreviations {
    pub fn new(source: &SourceParams, resource: &TmsvParams) -> Self {
        let eps = source.epsilon();
        let k = resource.correlation();
        let (s, c) = resource.theta().sin_cos();
        Self {
            a: eps + 1.0,
            b: 2.0 * resource.n_bar() + 1.0,
            c: eps * source.g1(),
            d: k * c,
            e: eps * source.g2(),
            f: k * s,
        }
    }
}

/// Balanced beam splitter on two modes, ordering `(x1, p1, x2, p2)`.
pub fn beam_splitter_matrix() -> Matrix4<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let r = Matrix4::new(
        h,   0.0, h,   0.0,
        0.0, h,   0.0, h,
        -h,  0.0, h,   0.0,
        0.0, -h,  0.0, h,
    );
    r
}

/// `R ⊕ R`, one splitter per telescope, in the splitter ordering.
pub fn splitter_pair_matrix() -> DMatrix<f64> {
    let r = beam_splitter_matrix();
    let mut m = DMatrix::zeros(8, 8);
    m.view_mut((0, 0), (4, 4)).copy_from(&r);
    m.view_mut((4, 4), (4, 4)).copy_from(&r);
    m
}

/// 8x8 output covariance in ordering `(A1, A2, B1, B2)` via the pipeline:
/// direct sum, permutation, splitter conjugation.
pub fn full_output_covariance(cfg: &InterferometerConfig) -> Result<CovarianceMatrix> {
    let rho = astronomical_covariance(&cfg.source);
    let sigma = tmsv_covariance_closed(&cfg.resource);
    debug_assert_eq!(rho.ordering().mode_names(), SOURCE_MODES);
    debug_assert_eq!(sigma.ordering().mode_names(), RESOURCE_MODES);
    let product = rho.direct_sum(&sigma)?;
    let target = QuadratureOrdering::modes(&SPLITTER_MODES)?;
    product.permute(&target)?.apply_symplectic(&splitter_pair_matrix())
}

/// Closed-form 8x8 output covariance `(1/2)[[V_D, V_12], [V_21, V_D]]`.
pub fn full_output_closed_form(cfg: &InterferometerConfig) -> DMatrix<f64> {
    let Abbreviations { a, b, c, d, e, f } = cfg.abbreviations();
    let (s, m) = (a + b, b - a);
    #[rustfmt::skip]
    let v_d = [
        [s,   0.0, m,   0.0],
        [0.0, s,   0.0, m],
        [m,   0.0, s,   0.0],
        [0.0, m,   0.0, s],
    ];
    #[rustfmt::skip]
    let v_12 = [
        [c + d,  -e + f,    -c + d, e + f],
        [e + f,  c - d,     -e + f, -(c + d)],
        [-c + d, e + f,     c + d,  -e + f],
        [-e + f, -(c + d),  e + f,  c - d],
    ];
    DMatrix::from_fn(8, 8, |i, j| {
        let (bi, bj, ii, jj) = (i / 4, j / 4, i % 4, j % 4);
        0.5 * match (bi, bj) {
            (0, 0) | (1, 1) => v_d[ii][jj],
            (0, 1) => v_12[ii][jj],
            _ => v_12[jj][ii],
        }
    })
}

/// Closed-form measured covariance over `(x_A1, p_A2, x_B1, p_B2)`.
pub fn reduced_closed_form(ab: &Abbreviations) -> Matrix4<f64> {
    let Abbreviations { a, b, c, d, e, f } = *ab;
    let s = a + b;
    #[rustfmt::skip]
    let m = Matrix4::new(
        s,     0.0,    c + d,  e + f,
        0.0,   s,      -e + f, c - d,
        c + d, -e + f, s,      0.0,
        e + f, c - d,  0.0,    s,
    );
    m * 0.5
}

/// Measured covariance from the pipeline together with its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub v_r: CovarianceMatrix,
    pub closed_form: CovarianceMatrix,
    pub abbreviations: Abbreviations,
    /// Largest entrywise gap between the pipeline and the closed form.
    pub max_deviation: f64,
}

impl ReducedState {
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.v_r.entries()[(i, j)])
    }
}

pub fn reduced_covariance(cfg: &InterferometerConfig) -> Result<ReducedState> {
    let v_r = full_output_covariance(cfg)?.reduce(&measured_labels())?;
    let abbreviations = cfg.abbreviations();
    let closed = reduced_closed_form(&abbreviations);
    let closed_form = CovarianceMatrix::new(
        v_r.ordering().clone(),
        DMatrix::from_fn(4, 4, |i, j| closed[(i, j)]),
    )?;
    let max_deviation = (v_r.entries() - closed_form.entries()).amax();
    Ok(ReducedState {
        v_r,
        closed_form,
        abbreviations,
        max_deviation,
    })
}
