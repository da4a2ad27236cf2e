//! Real matrix exponential by scaling and squaring with a diagonal Padé
//! approximant whose degree (3, 5, 7, 9 or 13) is picked from the 1-norm.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m)` for a real square matrix.
pub fn matrix_exponential(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let norm = one_norm(m);
    let ident = DMatrix::<f64>::identity(n, n);

    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(m, &ident, &PADE_3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_low(m, &ident, &PADE_5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_low(m, &ident, &PADE_7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_low(m, &ident, &PADE_9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scaled = m / 2f64.powi(s);
        let (u, v) = pade_13(&scaled, &ident);
        (u, v, s)
    };

    // r = (v - u)^{-1} (v + u)
    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .ok_or(Error::Singular {
            condition: f64::INFINITY,
        })?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Odd/even parts of a Padé numerator of degree 3, 5, 7 or 9.
fn pade_low(a: &DMatrix<f64>, ident: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let a2 = a * a;
    let mut power = ident.clone();
    let mut u_inner = ident * b[1];
    let mut v = ident * b[0];
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        u_inner += &power * b[2 * k + 1];
        v += &power * b[2 * k];
    }
    (a * u_inner, v)
}

fn pade_13(a: &DMatrix<f64>, ident: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &PADE_13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_high = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (u_high + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + ident * b[1]);
    let v_high = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = v_high + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + ident * b[0];
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn max_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax() / b.amax()
    }

    #[test]
    fn zero_maps_to_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(matrix_exponential(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn non_square_rejected() {
        let m = DMatrix::<f64>::zeros(2, 3);
        assert_eq!(
            matrix_exponential(&m),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
        let mut nan = DMatrix::<f64>::zeros(2, 2);
        nan[(0, 1)] = f64::NAN;
        assert_eq!(matrix_exponential(&nan), Err(Error::NonFinite));
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a: Vec<f64> = (0..6).map(|_| rng.random_range(-8.0..8.0)).collect();
            let e = matrix_exponential(&DMatrix::from_diagonal(&a.clone().into())).unwrap();
            for (i, ai) in a.iter().enumerate() {
                let want = ai.exp();
                assert!(((e[(i, i)] - want) / want).abs() < 1e-12, "{ai}");
            }
            let mut off = e.clone();
            off.fill_diagonal(0.0);
            assert_eq!(off.amax(), 0.0);
        }
    }

    #[test]
    fn every_pade_branch_agrees_with_reference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // norms spanning all five branches plus scaling
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0, 20.0] {
            let m = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0)) * (scale / 5.0);
            let mine = matrix_exponential(&m).unwrap();
            let reference = m.clone().exp();
            assert!(max_rel(&mine, &reference) < 1e-10, "scale {scale}");
        }
    }

    #[test]
    fn rotation_generator() {
        let t = 0.7f64;
        let m = DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]);
        let e = matrix_exponential(&m).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!((e - want).amax() < 1e-15);
    }
}
