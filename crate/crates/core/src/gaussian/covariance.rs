use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ordering::{Permutation, QuadLabel, QuadratureOrdering};
use super::symplectic::{symplectic_form, symplectic_residual, SYMPLECTIC_TOLERANCE};
use crate::error::{Error, Result};

/// Entrywise asymmetry accepted on construction.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Minimum eigenvalue of `V + i Omega` accepted as physical.
pub const PHYSICALITY_THRESHOLD: f64 = -1e-9;

/// Real symmetric covariance matrix indexed by a quadrature ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovarianceRepr", into = "CovarianceRepr")]
pub struct CovarianceMatrix {
    ordering: QuadratureOrdering,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(ordering: QuadratureOrdering, entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() != ordering.len() {
            return Err(Error::DimensionMismatch {
                expected: ordering.len(),
                found: entries.nrows(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let max_asymmetry = (&entries - entries.transpose()).amax();
        if max_asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { max_asymmetry });
        }
        Ok(Self { ordering, entries })
    }

    /// Vacuum (identity) covariance over the given modes.
    pub fn vacuum(modes: &[&str]) -> Result<Self> {
        let ordering = QuadratureOrdering::modes(modes)?;
        let n = ordering.len();
        Self::new(ordering, DMatrix::identity(n, n))
    }

    pub fn ordering(&self) -> &QuadratureOrdering {
        &self.ordering
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry addressed by labels.
    pub fn get(&self, row: &QuadLabel, col: &QuadLabel) -> Option<f64> {
        let i = self.ordering.position(row)?;
        let j = self.ordering.position(col)?;
        Some(self.entries[(i, j)])
    }

    /// Covariance of the product state: block diagonal, orderings concatenated.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let ordering = self.ordering.concat(&other.ordering)?;
        let (n, m) = (self.dim(), other.dim());
        let mut entries = DMatrix::zeros(n + m, n + m);
        entries.view_mut((0, 0), (n, n)).copy_from(&self.entries);
        entries.view_mut((n, n), (m, m)).copy_from(&other.entries);
        Ok(Self { ordering, entries })
    }

    /// Re-indexes the matrix into `target`, which must list the same labels.
    pub fn permute(&self, target: &QuadratureOrdering) -> Result<Self> {
        let perm = Permutation::between(&self.ordering, target)?;
        Ok(Self {
            ordering: target.clone(),
            entries: perm.conjugate(&self.entries),
        })
    }

    /// `S V S^T` for a symplectic `S` acting in this matrix's ordering.
    pub fn apply_symplectic(&self, s: &DMatrix<f64>) -> Result<Self> {
        if self.ordering.is_reduced() {
            return Err(Error::ReducedOrdering);
        }
        if s.nrows() != self.dim() || s.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.nrows().max(s.ncols()),
            });
        }
        let residual = symplectic_residual(s);
        if residual.is_nan() || residual > SYMPLECTIC_TOLERANCE {
            return Err(Error::NotSymplectic { residual });
        }
        let out = s * &self.entries * s.transpose();
        let entries = (&out + out.transpose()) * 0.5;
        Ok(Self {
            ordering: self.ordering.clone(),
            entries,
        })
    }

    /// Principal submatrix over `keep`, in the order given.
    pub fn reduce(&self, keep: &[QuadLabel]) -> Result<Self> {
        let idx = keep
            .iter()
            .map(|l| {
                self.ordering
                    .position(l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let ordering = QuadratureOrdering::reduced(keep.to_vec())?;
        let entries = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])]);
        Ok(Self { ordering, entries })
    }

    pub fn physicality(&self) -> Result<Physicality> {
        check_physicality(self)
    }
}

/// Result of the `V + i Omega >= 0` check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physicality {
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Minimum eigenvalue of the Hermitian matrix `V + i Omega`, with pass/fail at
/// [`PHYSICALITY_THRESHOLD`]. Requires a full ordering.
pub fn check_physicality(v: &CovarianceMatrix) -> Result<Physicality> {
    if v.ordering.is_reduced() {
        return Err(Error::ReducedOrdering);
    }
    let omega = symplectic_form(v.ordering.mode_count());
    let n = v.dim();
    let h = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        Complex64::new(v.entries[(i, j)], omega[(i, j)])
    });
    let min_eigenvalue = h.symmetric_eigenvalues().min();
    Ok(Physicality {
        min_eigenvalue,
        passed: min_eigenvalue >= PHYSICALITY_THRESHOLD,
    })
}

#[derive(Serialize, Deserialize)]
struct CovarianceRepr {
    ordering: Vec<QuadLabel>,
    reduced: bool,
    entries: Vec<Vec<f64>>,
}

impl From<CovarianceMatrix> for CovarianceRepr {
    fn from(v: CovarianceMatrix) -> Self {
        Self {
            reduced: v.ordering.is_reduced(),
            entries: v.entries.row_iter().map(|r| r.iter().copied().collect()).collect(),
            ordering: v.ordering.labels().to_vec(),
        }
    }
}

impl TryFrom<CovarianceRepr> for CovarianceMatrix {
    type Error = Error;

    fn try_from(r: CovarianceRepr) -> Result<Self> {
        let ordering = if r.reduced {
            QuadratureOrdering::reduced(r.ordering)?
        } else {
            QuadratureOrdering::full(r.ordering)?
        };
        let n = r.entries.len();
        if r.entries.iter().any(|row| row.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: 0 });
        }
        let flat: Vec<f64> = r.entries.into_iter().flatten().collect();
        CovarianceMatrix::new(ordering, DMatrix::from_row_slice(n, n, &flat))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_diag(a: f64, b: f64) -> CovarianceMatrix {
        let o = QuadratureOrdering::modes(&["M", "N"]).unwrap();
        let d = nalgebra::DVector::from_vec(vec![a, a, b, b]);
        CovarianceMatrix::new(o, DMatrix::from_diagonal(&d)).unwrap()
    }

    #[test]
    fn vacuum_direct_sum_is_identity() {
        let a = CovarianceMatrix::vacuum(&["A1", "B1"]).unwrap();
        let b = CovarianceMatrix::vacuum(&["A2", "B2"]).unwrap();
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.entries(), &DMatrix::identity(8, 8));
        assert_eq!(s.ordering().mode_names(), vec!["A1", "B1", "A2", "B2"]);
    }

    #[test]
    fn direct_sum_collision_rejected() {
        let a = CovarianceMatrix::vacuum(&["A1", "B1"]).unwrap();
        let b = CovarianceMatrix::vacuum(&["A1", "B2"]).unwrap();
        assert_eq!(a.direct_sum(&b), Err(Error::ModeCollision("A1".into())));
    }

    #[test]
    fn construction_checks() {
        let o = QuadratureOrdering::modes(&["A"]).unwrap();
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(o.clone(), asym),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            CovarianceMatrix::new(o, DMatrix::identity(4, 4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permute_identity_and_swap() {
        let v = block_diag(2.0, 3.0);
        assert_eq!(v.permute(v.ordering()).unwrap(), v);
        let swapped = v
            .permute(&QuadratureOrdering::modes(&["N", "M"]).unwrap())
            .unwrap();
        assert_eq!(swapped.entries(), block_diag(3.0, 2.0).entries());
        assert_eq!(
            swapped.get(&QuadLabel::x("M"), &QuadLabel::x("M")),
            Some(2.0)
        );
    }

    #[test]
    fn permute_rejects_foreign_ordering() {
        let v = block_diag(2.0, 3.0);
        let target = QuadratureOrdering::modes(&["M", "Q"]).unwrap();
        assert_eq!(v.permute(&target), Err(Error::NotAPermutation));
    }

    #[test]
    fn apply_symplectic_rejects_non_symplectic() {
        let v = CovarianceMatrix::vacuum(&["A", "B"]).unwrap();
        let s = DMatrix::<f64>::identity(4, 4) * 1.5;
        match v.apply_symplectic(&s) {
            Err(Error::NotSymplectic { residual }) => assert!(residual > 1.0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            v.apply_symplectic(&DMatrix::identity(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(v.apply_symplectic(&DMatrix::identity(4, 4)).unwrap(), v);
    }

    #[test]
    fn reduce_cases() {
        let v = block_diag(2.0, 3.0);
        let all = v.ordering().labels().to_vec();
        assert_eq!(v.reduce(&all).unwrap().entries(), v.entries());
        let one = v.reduce(&[QuadLabel::p("N")]).unwrap();
        assert_eq!(one.entries(), &DMatrix::from_element(1, 1, 3.0));
        assert!(one.ordering().is_reduced());
        assert_eq!(
            v.reduce(&[QuadLabel::x("Z")]),
            Err(Error::UnknownLabel("x_Z".into()))
        );
    }

    #[test]
    fn physicality_cases() {
        let vac = CovarianceMatrix::vacuum(&["A", "B"]).unwrap();
        let p = check_physicality(&vac).unwrap();
        assert!(p.passed && p.min_eigenvalue.abs() < 1e-12);

        let sub = block_diag(0.5, 0.5);
        let p = check_physicality(&sub).unwrap();
        assert!(!p.passed);
        assert!((p.min_eigenvalue + 0.5).abs() < 1e-12);

        let r = vac.reduce(&[QuadLabel::x("A")]).unwrap();
        assert_eq!(check_physicality(&r), Err(Error::ReducedOrdering));
    }

    #[test]
    fn serde_round_trip() {
        let v = block_diag(2.0, 3.0);
        let s = serde_json::to_string(&v).unwrap();
        let back: CovarianceMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let asym = s.replacen("0.0", "0.5", 1);
        assert!(serde_json::from_str::<CovarianceMatrix>(&asym).is_err());
    }
}
