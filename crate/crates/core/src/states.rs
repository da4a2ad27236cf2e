//! The two input states: the thermal light collected by the two telescopes
//! and the two-mode squeezed vacuum resource shared between them.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{matrix_exponential, CovarianceMatrix, QuadratureOrdering};

/// Telescope modes carrying the astronomical light.
pub const SOURCE_MODES: [&str; 2] = ["A1", "B1"];
/// Modes of the squeezed resource delivered to telescopes A and B.
pub const RESOURCE_MODES: [&str; 2] = ["A2", "B2"];

/// Slack on `|g| <= 1` absorbing parse round-off.
const COHERENCE_SLACK: f64 = 1e-12;

/// Thermal source: photon flux per coherence time and mutual coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    epsilon: f64,
    g1: f64,
    g2: f64,
}

impl SourceParams {
    pub fn new(epsilon: f64, g1: f64, g2: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::invalid("epsilon", "epsilon must be > 0"));
        }
        check_coherence(g1, g2)?;
        Ok(Self { epsilon, g1, g2 })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    /// Same flux, different coherence.
    pub fn with_coherence(&self, g1: f64, g2: f64) -> Result<Self> {
        Self::new(self.epsilon, g1, g2)
    }
}

pub(crate) fn check_coherence(g1: f64, g2: f64) -> Result<()> {
    if !g1.is_finite() || !g2.is_finite() {
        return Err(Error::invalid("g", "g1 and g2 must be finite"));
    }
    if g1.hypot(g2) > 1.0 + COHERENCE_SLACK {
        return Err(Error::invalid(
            "g",
            format!("|g| ≤ 1 violated (g1 = {g1}, g2 = {g2})"),
        ));
    }
    Ok(())
}

/// Two-mode squeezed vacuum: mean photon number per mode and squeezing phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmsvParams {
    n_bar: f64,
    theta: f64,
}

impl TmsvParams {
    /// `theta` is reduced into `[0, 2 pi)`.
    pub fn new(n_bar: f64, theta: f64) -> Result<Self> {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(Error::invalid("n_bar", "n_bar must be >= 0"));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "theta must be finite"));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self { n_bar, theta })
    }

    /// From squeezing magnitude `r`, using `2 n_bar + 1 = cosh 2r`.
    pub fn from_squeezing(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid("r", "squeezing r must be >= 0"));
        }
        Self::new(r.sinh().powi(2), theta)
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Squeezing magnitude `r = arccosh(2 n_bar + 1) / 2`, evaluated as
    /// `asinh(sqrt(n_bar))` to keep precision near `n_bar = 0`.
    pub fn squeezing(&self) -> f64 {
        self.n_bar.sqrt().asinh()
    }

    /// `2 sqrt(n_bar (n_bar + 1))`, the cross-mode correlation strength.
    pub fn correlation(&self) -> f64 {
        2.0 * (self.n_bar * (self.n_bar + 1.0)).sqrt()
    }
}

/// Covariance of the thermal source in ordering `(x_A1, p_A1, x_B1, p_B1)`.
///
/// Diagonal `epsilon + 1`; cross block `epsilon [[g1, -g2], [g2, g1]]`.
pub fn astronomical_covariance(p: &SourceParams) -> CovarianceMatrix {
    let (e, g1, g2) = (p.epsilon, p.g1, p.g2);
    let d = e + 1.0;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        d,       0.0,     e * g1,  -e * g2,
        0.0,     d,       e * g2,  e * g1,
        e * g1,  e * g2,  d,       0.0,
        -e * g2, e * g1,  0.0,     d,
    ]);
    let ordering = QuadratureOrdering::modes(&SOURCE_MODES).expect("static ordering");
    CovarianceMatrix::new(ordering, m).expect("symmetric by construction")
}

/// `cos(theta) sigma_z + sin(theta) sigma_x`.
pub fn r_zx(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, s], [s, -c]]
}

/// Closed-form TMSV covariance in ordering `(x_A2, p_A2, x_B2, p_B2)`:
/// `[[(2n+1) I, k R_zx], [k R_zx, (2n+1) I]]` with `k = 2 sqrt(n (n + 1))`.
pub fn tmsv_covariance_closed(p: &TmsvParams) -> CovarianceMatrix {
    let diag = 2.0 * p.n_bar + 1.0;
    let k = p.correlation();
    let r = r_zx(p.theta);
    let mut m = DMatrix::from_diagonal_element(4, 4, diag);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, 2 + j)] = k * r[i][j];
            m[(2 + i, j)] = k * r[i][j];
        }
    }
    let ordering = QuadratureOrdering::modes(&RESOURCE_MODES).expect("static ordering");
    CovarianceMatrix::new(ordering, m).expect("symmetric by construction")
}

/// Generator `Omega H` of the two-mode squeezer with magnitude `r` and phase
/// `theta`; its exponential is [`two_mode_squeezer`].
pub fn squeezing_generator(r: f64, theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    let (rc, rs) = (r * c, r * s);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, rc,  rs,
        0.0, 0.0, rs,  -rc,
        rc,  rs,  0.0, 0.0,
        rs,  -rc, 0.0, 0.0,
    ]);
    m
}

/// Closed-form two-mode squeezer symplectic matrix (symmetric).
pub fn two_mode_squeezer(r: f64, theta: f64) -> DMatrix<f64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    let mut m = squeezing_generator(1.0, theta) * sh;
    for i in 0..4 {
        m[(i, i)] = ch;
    }
    m
}

/// TMSV covariance as `S S^T` with `S = exp(Omega H)` computed numerically.
pub fn tmsv_covariance_exponential(p: &TmsvParams) -> Result<CovarianceMatrix> {
    let s = matrix_exponential(&squeezing_generator(p.squeezing(), p.theta))?;
    let vacuum = CovarianceMatrix::vacuum(&RESOURCE_MODES)?;
    vacuum.apply_symplectic(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::symplectic_residual;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn source_validation() {
        assert_eq!(
            SourceParams::new(0.0, 0.0, 0.0).unwrap_err().to_string(),
            "epsilon must be > 0"
        );
        assert!(SourceParams::new(-1.0, 0.0, 0.0).is_err());
        assert!(SourceParams::new(f64::NAN, 0.0, 0.0).is_err());
        assert_eq!(
            SourceParams::new(0.1, 0.9, 0.9).unwrap_err().to_string(),
            "|g| ≤ 1 violated (g1 = 0.9, g2 = 0.9)"
        );
        assert!(SourceParams::new(0.1, 1.0, 0.0).is_ok());
        assert!(SourceParams::new(0.1, 0.6, 0.8 + 5e-13).is_ok());
        assert!(SourceParams::new(0.1, 0.6, 0.8 + 1e-9).is_err());
    }

    #[test]
    fn tmsv_validation_and_theta_reduction() {
        assert!(TmsvParams::new(-0.1, 0.0).is_err());
        let p = TmsvParams::new(1.0, -FRAC_PI_2).unwrap();
        assert!((p.theta() - 1.5 * PI).abs() < 1e-15);
        let p = TmsvParams::new(1.0, 2.0 * TAU + 0.25).unwrap();
        assert!((p.theta() - 0.25).abs() < 1e-14);
        assert!(TmsvParams::new(1.0, TAU).unwrap().theta() < TAU);
    }

    #[test]
    fn squeezing_round_trip() {
        for n in [0.0, 1e-8, 0.3, 1.0, 17.0, 1e6] {
            let p = TmsvParams::new(n, 0.0).unwrap();
            let r = p.squeezing();
            assert!(((2.0 * r).cosh() - (2.0 * n + 1.0)).abs() <= 1e-12 * (2.0 * n + 1.0));
            let back = TmsvParams::from_squeezing(r, 0.0).unwrap().n_bar();
            assert!((back - n).abs() <= 1e-12 * n.max(1e-300), "{n} -> {back}");
        }
    }

    #[test]
    fn astronomical_examples() {
        let v = astronomical_covariance(&SourceParams::new(0.2, 0.0, 0.0).unwrap());
        assert!((v.entries() - DMatrix::identity(4, 4) * 1.2).amax() < 1e-15);

        let tiny = astronomical_covariance(&SourceParams::new(1e-300, 0.5, 0.5).unwrap());
        assert!((tiny.entries() - DMatrix::identity(4, 4)).amax() < 1e-15);

        let v = astronomical_covariance(&SourceParams::new(0.1, 1.0, 0.0).unwrap());
        let cross = v.entries().view((0, 2), (2, 2)).into_owned();
        assert!((cross - DMatrix::identity(2, 2) * 0.1).amax() < 1e-15);
        assert!(v.physicality().unwrap().passed);
    }

    #[test]
    fn tmsv_closed_examples() {
        for theta in [0.0, 1.0, 4.0] {
            let v = tmsv_covariance_closed(&TmsvParams::new(0.0, theta).unwrap());
            assert_eq!(v.entries(), &DMatrix::identity(4, 4));
        }
        let k = 2.0 * 2f64.sqrt();
        let v = tmsv_covariance_closed(&TmsvParams::new(1.0, 0.0).unwrap());
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            3.0, 0.0, k,   0.0,
            0.0, 3.0, 0.0, -k,
            k,   0.0, 3.0, 0.0,
            0.0, -k,  0.0, 3.0,
        ]);
        assert!((v.entries() - want).amax() < 1e-15);

        let v = tmsv_covariance_closed(&TmsvParams::new(1.0, FRAC_PI_2).unwrap());
        let cross = v.entries().view((0, 2), (2, 2)).into_owned();
        let sx = DMatrix::from_row_slice(2, 2, &[0.0, k, k, 0.0]);
        assert!((cross - sx).amax() < 1e-15);
    }

    #[test]
    fn squeezer_is_symplectic_and_exponential_of_generator() {
        for r in [0.0, 0.3, 1.0, 2.0] {
            for k in 0..8 {
                let theta = k as f64 * FRAC_PI_4;
                let s = two_mode_squeezer(r, theta);
                assert!(symplectic_residual(&s) < 1e-12 * (1.0 + s.norm_squared()));
                let e = matrix_exponential(&squeezing_generator(r, theta)).unwrap();
                assert!((e - &s).amax() < 1e-10 * s.amax());
            }
        }
    }

    #[test]
    fn squeezer_on_vacuum_gives_closed_form() {
        let p = TmsvParams::new(1.0, 0.0).unwrap();
        let vac = CovarianceMatrix::vacuum(&RESOURCE_MODES).unwrap();
        let out = vac
            .apply_symplectic(&two_mode_squeezer(p.squeezing(), p.theta()))
            .unwrap();
        assert!((out.entries() - tmsv_covariance_closed(&p).entries()).amax() < 1e-12);
    }

    #[test]
    fn exponential_zero_squeezing_is_vacuum() {
        let v = tmsv_covariance_exponential(&TmsvParams::new(0.0, 2.0).unwrap()).unwrap();
        assert_eq!(v.entries(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn tmsv_is_pure() {
        let v = tmsv_covariance_closed(&TmsvParams::new(1.0, 0.0).unwrap());
        let p = v.physicality().unwrap();
        assert!(p.passed);
        assert!(p.min_eigenvalue >= -1e-9 && p.min_eigenvalue <= 1e-6);
    }
}
