use nalgebra::DMatrix;

use crate::{Error, Result};

/// Singular values in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of values above `1e-12` times the largest.
    pub fn rank(&self) -> usize {
        let cut = crate::tol::RANK * self.largest();
        self.values.iter().filter(|&&s| s > cut).count()
    }

    /// The spectrum padded with zeros (or truncated) to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.values.clone();
        v.resize(len, 0.0);
        v
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!(
            "{}x{} matrix has NaN or infinite entries",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn singular_values(m: &DMatrix<f64>) -> Result<SingularSpectrum> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(SingularSpectrum { values: Vec::new() });
    }
    // Bidiagonalization works on the short side; wide unfoldings are
    // transposed so the work scales with the row count.
    let svd = if m.nrows() <= m.ncols() {
        m.transpose().svd(false, false)
    } else {
        m.clone().svd(false, false)
    };
    let mut values: Vec<f64> = svd.singular_values.iter().map(|s| s.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularSpectrum { values })
}

/// Sum of singular values (trace norm).
pub fn matrix_kyfan(m: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values(m)?.sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let id = DMatrix::<f64>::identity(2, 2);
        assert_eq!(singular_values(&id).unwrap().values(), &[1.0, 1.0]);

        let d = DMatrix::from_row_slice(2, 2, &[3., 0., 0., 4.]);
        let s = singular_values(&d).unwrap();
        assert!((s.values()[0] - 4.0).abs() < 1e-14 && (s.values()[1] - 3.0).abs() < 1e-14);

        // Gram matrix [[2,1],[1,1]] has eigenvalues (3 ± √5)/2.
        let j = DMatrix::from_row_slice(2, 2, &[1., 1., 0., 1.]);
        let s = singular_values(&j).unwrap();
        let r5 = 5f64.sqrt();
        assert!((s.values()[0] - (r5 + 1.0) / 2.0).abs() < 1e-14);
        assert!((s.values()[1] - (r5 - 1.0) / 2.0).abs() < 1e-14);
        assert!((matrix_kyfan(&j).unwrap() - r5).abs() < 1e-14);

        assert!((matrix_kyfan(&DMatrix::identity(3, 3)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        let m = DMatrix::from_row_slice(1, 2, &[1.0, f64::NAN]);
        assert!(matches!(singular_values(&m), Err(Error::NonFinite(_))));
        let m = DMatrix::from_row_slice(1, 2, &[f64::INFINITY, 0.0]);
        assert!(matches!(matrix_kyfan(&m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn descending_and_rank() {
        let m = DMatrix::from_row_slice(2, 3, &[1., 2., 3., 2., 4., 6.]);
        let s = singular_values(&m).unwrap();
        assert_eq!(s.values().len(), 2);
        assert!(s.values()[0] >= s.values()[1]);
        assert_eq!(s.rank(), 1);
        assert_eq!(s.padded(4).len(), 4);
    }
}
