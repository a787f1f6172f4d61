//! Complex matrices, validated density matrices and partial traces.
//!
//! Composite basis convention: the product ket `|i_0 i_1 … i_{N-1}⟩` (0-based
//! levels) sits at index `Σ_k i_k Π_{l>k} d_l`, so subsystem 0 is the most
//! significant digit. This is the ordering produced by [`kron`].

pub mod zoo;

pub use zoo::{
    duer_be4, ghz, maximally_mixed, noisy, psi_234, reduced_w_noisy, smolin, w_state, werner,
    ZooSpec,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{tol, Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Kronecker product in the composite basis convention.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a>(items: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    items
        .into_iter()
        .fold(ComplexMatrix::identity(1, 1), |acc, m| kron(&acc, m))
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Composite index of the 0-based level tuple `levels` under `dims`.
pub fn composite_index(dims: &[usize], levels: &[usize]) -> usize {
    levels.iter().zip(dims).fold(0, |acc, (&l, &d)| acc * d + l)
}

/// Hermitian, unit-trace, positive semidefinite matrix over subsystems of
/// dimensions `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate `matrix` against the density-matrix invariants. The error
    /// names the first invariant that fails.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::validate(&dims, &matrix)?;
        Ok(Self { dims, matrix })
    }

    pub fn validate(dims: &[usize], matrix: &ComplexMatrix) -> Result<()> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension("no subsystems".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(format!("subsystem dimension {d} < 2")));
        }
        let total: usize = dims.iter().product();
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() != total {
            return Err(Error::InvalidState(format!(
                "matrix size {} does not match product of dims {dims:?} = {total}",
                matrix.nrows()
            )));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("density matrix has non-finite entries".into()));
        }
        let herm = (matrix - matrix.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > tol::EXACT {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |ρ - ρ†| = {herm:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol::EXACT {
            return Err(Error::InvalidState(format!(
                "trace is {:.12} + {:.3e}i, not 1",
                tr.re, tr.im
            )));
        }
        let min = hermitian_eigenvalues(matrix).first().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: minimum eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Pure state `|ψ⟩⟨ψ|` from a state vector, normalized here.
    pub fn from_pure(dims: Vec<usize>, psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::new(dims, &v * v.adjoint())
    }

    /// Product of several density matrices in order.
    pub fn product(parts: &[DensityMatrix]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("empty product".into()));
        }
        let dims = parts.iter().flat_map(|p| p.dims.iter().copied()).collect();
        let matrix = kron_all(parts.iter().map(|p| &p.matrix));
        Self::new(dims, matrix)
    }

    /// Convex combination `Σ w_i ρ_i`; all parts must share `dims`.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut m = ComplexMatrix::zeros(first.size(), first.size());
        for (w, p) in parts {
            if p.dims != first.dims {
                return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", p.dims, first.dims)));
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative mixture weight {w}")));
            }
            m += &p.matrix * Complex64::new(*w, 0.0);
        }
        Self::new(first.dims.clone(), m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - tol::PURE
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        (&self.matrix * op).trace()
    }

    /// Reduced state on the 0-based subsystems in `keep` (ascending, unique).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.parties();
        if keep.is_empty() {
            return Err(Error::InvalidParameter("partial trace must keep a subsystem".into()));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "kept subsystems {keep:?} must be strictly ascending"
            )));
        }
        if let Some(&k) = keep.iter().find(|&&k| k >= n) {
            return Err(Error::OutOfRange(format!("subsystem {k} of {n}")));
        }
        if keep.len() == n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
        let mut strides = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let offsets = |subs: &[usize]| -> Vec<usize> {
            let count: usize = subs.iter().map(|&k| self.dims[k]).product();
            (0..count)
                .map(|mut r| {
                    let mut off = 0;
                    for &k in subs.iter().rev() {
                        off += (r % self.dims[k]) * strides[k];
                        r /= self.dims[k];
                    }
                    off
                })
                .collect()
        };
        let kept = offsets(keep);
        let summed = offsets(&traced);
        let m = kept.len();
        let out = ComplexMatrix::from_fn(m, m, |r, c| {
            summed
                .iter()
                .map(|&t| self.matrix[(kept[r] + t, kept[c] + t)])
                .sum()
        });
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Self::new(dims, out)
    }

    /// `(I ⊗ … ⊗ U ⊗ … ⊗ I) ρ (…)†` with `U` acting on subsystem `k`.
    pub fn apply_local_unitary(&self, k: usize, u: &ComplexMatrix) -> Result<Self> {
        if k >= self.parties() {
            return Err(Error::OutOfRange(format!("subsystem {k} of {}", self.parties())));
        }
        if u.nrows() != self.dims[k] || !u.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "unitary is {}x{} for subsystem of dimension {}",
                u.nrows(),
                u.ncols(),
                self.dims[k]
            )));
        }
        let before: usize = self.dims[..k].iter().product();
        let after: usize = self.dims[k + 1..].iter().product();
        let full = kron(&kron(&identity(before), u), &identity(after));
        let m = &full * &self.matrix * full.adjoint();
        // Hermitize to keep rounding from tripping validation.
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(self.dims.clone(), m)
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}
