//! Dense real tensors, backward-cyclic matricization and the Ky Fan tensor
//! norm.
//!
//! A tensor of order `M` with shape `(I_0, …, I_{M-1})` stores its entries in
//! row-major order, so the last index varies fastest.
//!
//! The mode-`n` unfolding places entry `t[i_0, …, i_{M-1}]` at row `i_n` and
//! at the column obtained by reading the remaining indices in the cyclic order
//! `n+1, n+2, …, M-1, 0, 1, …, n-1` as mixed-radix digits, with `i_{n+1}` the
//! most significant and `i_{n-1}` the least significant. For a 3-way tensor
//! this gives columns `i_1 I_2 + i_2` for mode 0, `i_2 I_0 + i_0` for mode 1
//! and `i_0 I_1 + i_1` for mode 2.

mod kruskal;
mod sign_table;
mod svd;

pub use kruskal::{
    find_orthogonal_kruskal, kruskal_to_tensor, kruskal_unfold, kyfan_via_kruskal,
    verify_complete_orthogonality, KruskalForm,
};
pub use sign_table::{sign_table, SignTable};
pub use svd::{matrix_kyfan, singular_values, SingularSpectrum};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RealTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl RealTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::UnsupportedOrder(0));
        }
        if shape.contains(&0) {
            return Err(Error::ShapeMismatch(format!("zero-length mode in {shape:?}")));
        }
        let count: usize = shape.iter().product();
        if count != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} needs {count} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let count = shape.iter().product();
        Self::new(shape, vec![0.0; count])
    }

    /// Build a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(shape)?;
        let mut idx = vec![0; t.order()];
        for flat in 0..t.data.len() {
            t.unravel_into(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        Ok(t)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn unravel_into(&self, mut flat: usize, idx: &mut [usize]) {
        for (slot, &s) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = flat % s;
            flat /= s;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let k = self.flat_index(idx);
        self.data[k] = value;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Outer product of two tensors: the result has order `M + N` and entries
    /// `t[i…] s[j…]`.
    pub fn outer(&self, other: &Self) -> Self {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        let data = self
            .data
            .iter()
            .flat_map(|&a| other.data.iter().map(move |&b| a * b))
            .collect();
        Self { shape, data }
    }

    /// Permute modes so that output mode `k` is input mode `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let m = self.order();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{m}")));
        }
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut src = vec![0; m];
        Self::from_fn(shape, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            self.get(&src)
        })
    }

    /// Mode order of the mode-`n` unfolding's column digits, most significant
    /// first.
    fn column_modes(order: usize, n: usize) -> impl Iterator<Item = usize> {
        (1..order).map(move |j| (n + j) % order)
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if self.order() < 2 {
            return Err(Error::UnsupportedOrder(self.order()));
        }
        if n >= self.order() {
            return Err(Error::OutOfRange(format!(
                "mode {n} for a tensor of order {}",
                self.order()
            )));
        }
        Ok(())
    }

    /// Backward-cyclic mode-`n` unfolding (0-based mode).
    pub fn unfold(&self, n: usize) -> Result<DMatrix<f64>> {
        self.check_mode(n)?;
        let rows = self.shape[n];
        let cols = self.data.len() / rows;
        let mut out = DMatrix::zeros(rows, cols);
        let mut idx = vec![0; self.order()];
        for (flat, &v) in self.data.iter().enumerate() {
            self.unravel_into(flat, &mut idx);
            let col = Self::column_modes(self.order(), n)
                .fold(0, |acc, m| acc * self.shape[m] + idx[m]);
            out[(idx[n], col)] = v;
        }
        Ok(out)
    }

    /// Inverse of [`RealTensor::unfold`].
    pub fn fold(matrix: &DMatrix<f64>, shape: Vec<usize>, n: usize) -> Result<Self> {
        let mut t = Self::zeros(shape)?;
        t.check_mode(n)?;
        let cols: usize = t.len() / t.shape[n];
        if matrix.nrows() != t.shape[n] || matrix.ncols() != cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix cannot fold into {:?} along mode {n}",
                matrix.nrows(),
                matrix.ncols(),
                t.shape
            )));
        }
        let mut idx = vec![0; t.order()];
        for flat in 0..t.len() {
            t.unravel_into(flat, &mut idx);
            let col = Self::column_modes(t.order(), n).fold(0, |acc, m| acc * t.shape[m] + idx[m]);
            t.data[flat] = matrix[(idx[n], col)];
        }
        Ok(t)
    }

    /// True when every mode has the same length and the entries are
    /// invariant under any index permutation (absolute tolerance 1e-12).
    pub fn is_supersymmetric(&self) -> bool {
        let first = self.shape[0];
        if self.shape.iter().any(|&s| s != first) {
            return false;
        }
        let m = self.order();
        let mut idx = vec![0; m];
        for flat in 0..self.len() {
            self.unravel_into(flat, &mut idx);
            let v = self.data[flat];
            // Adjacent transpositions generate the symmetric group.
            for a in 0..m.saturating_sub(1) {
                idx.swap(a, a + 1);
                let w = self.get(&idx);
                idx.swap(a, a + 1);
                if (v - w).abs() > 1e-12 {
                    return false;
                }
            }
        }
        true
    }
}

/// Unfold `t` along the 0-based mode `n`.
pub fn unfold(t: &RealTensor, n: usize) -> Result<DMatrix<f64>> {
    t.unfold(n)
}

/// Ky Fan norm of a tensor: the largest sum of singular values over all mode
/// unfoldings.
pub fn tensor_kyfan(t: &RealTensor) -> Result<f64> {
    if t.order() < 2 {
        return Err(Error::UnsupportedOrder(t.order()));
    }
    let mut best = 0.0f64;
    for n in 0..t.order() {
        best = best.max(matrix_kyfan(&t.unfold(n)?)?);
    }
    Ok(best)
}

/// Rank-1 tensor `u_0 ∘ u_1 ∘ … ∘ u_{M-1}`.
pub fn outer_product(vectors: &[DVector<f64>]) -> Result<RealTensor> {
    let (first, rest) = vectors
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("outer product of zero vectors".into()))?;
    let mut t = RealTensor::new(vec![first.len()], first.as_slice().to_vec())?;
    for v in rest {
        t = t.outer(&RealTensor::new(vec![v.len()], v.as_slice().to_vec())?);
    }
    Ok(t)
}

pub fn is_supersymmetric(t: &RealTensor) -> bool {
    t.is_supersymmetric()
}
