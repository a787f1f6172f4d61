//! Bloch representation: coherence vectors, correlation tensors and exact
//! reconstruction.
//!
//! With `λ^(k)_α` the generators of subsystem `k`:
//!
//! - `s^(k)_α = (d_k/2) Tr(ρ_k λ_α)`
//! - `t^S_{α_1…α_M} = (Π_{k∈S} d_k / 2^M) Tr(ρ_S λ_{α_1} ⊗ … ⊗ λ_{α_M})`
//! - `ρ = (1/Π d_k)(I + Σ_k s^(k)·λ^(k) + Σ_S t^S·λ^S)`
//!
//! Subsets are ascending lists of 0-based subsystems and tensor modes follow
//! subset order.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::states::{ComplexMatrix, DensityMatrix};
use crate::su_basis::GeneratorBasis;
use crate::tensor::RealTensor;
use crate::{tol, Error, Result};

/// Inball and circumball radii `(r, R)` of the Bloch-vector body for
/// dimension `d`.
pub fn ball_radii(d: usize) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("d = {d} < 2")));
    }
    let d = d as f64;
    Ok(((d / (2.0 * (d - 1.0))).sqrt(), (d * (d - 1.0) / 2.0).sqrt()))
}

/// All ascending `m`-element subsets of `0..n`, in lexicographic order.
pub fn subsets_of_size(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m <= n {
        rec(0, n, m, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

/// Every subset of `0..n` with at least two elements, by size then
/// lexicographically.
pub fn correlation_subsets(n: usize) -> Vec<Vec<usize>> {
    (2..=n).flat_map(|m| subsets_of_size(n, m)).collect()
}

fn check_subset(subset: &[usize], n: usize, min: usize) -> Result<()> {
    if subset.len() < min {
        return Err(Error::InvalidParameter(format!(
            "subset {subset:?} has fewer than {min} subsystems"
        )));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "subset {subset:?} must be strictly ascending"
        )));
    }
    if let Some(&k) = subset.iter().find(|&&k| k >= n) {
        return Err(Error::OutOfRange(format!("subsystem {k} of {n}")));
    }
    Ok(())
}

/// Complete Bloch data of an `N`-partite state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochData {
    dims: Vec<usize>,
    singles: BTreeMap<usize, DVector<f64>>,
    tensors: BTreeMap<Vec<usize>, RealTensor>,
}

impl BlochData {
    /// All components zero: the maximally mixed state.
    pub fn zero(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidDimension(format!("dims {dims:?}")));
        }
        let n = dims.len();
        let singles = (0..n).map(|k| (k, DVector::zeros(dims[k] * dims[k] - 1))).collect();
        let tensors = correlation_subsets(n)
            .into_iter()
            .map(|s| {
                let shape = s.iter().map(|&k| dims[k] * dims[k] - 1).collect();
                (s, RealTensor::zeros(shape).expect("nonempty shape"))
            })
            .collect();
        Ok(Self { dims: dims.to_vec(), singles, tensors })
    }

    /// Assemble from explicit components; every single and every subset of
    /// size at least two must be present with matching shape.
    pub fn new(
        dims: Vec<usize>,
        singles: BTreeMap<usize, DVector<f64>>,
        tensors: BTreeMap<Vec<usize>, RealTensor>,
    ) -> Result<Self> {
        let template = Self::zero(&dims)?;
        if singles.len() != template.singles.len() || tensors.len() != template.tensors.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} singles and {} tensors, got {} and {}",
                template.singles.len(),
                template.tensors.len(),
                singles.len(),
                tensors.len()
            )));
        }
        for (k, v) in &template.singles {
            match singles.get(k) {
                Some(s) if s.len() == v.len() => {}
                _ => return Err(Error::ShapeMismatch(format!("single {k} missing or mis-sized"))),
            }
        }
        for (s, t) in &template.tensors {
            match tensors.get(s) {
                Some(u) if u.shape() == t.shape() => {}
                _ => return Err(Error::ShapeMismatch(format!("tensor {s:?} missing or mis-shaped"))),
            }
        }
        Ok(Self { dims, singles, tensors })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn single(&self, k: usize) -> Option<&DVector<f64>> {
        self.singles.get(&k)
    }

    pub fn singles(&self) -> &BTreeMap<usize, DVector<f64>> {
        &self.singles
    }

    pub fn tensor(&self, subset: &[usize]) -> Option<&RealTensor> {
        self.tensors.get(subset)
    }

    pub fn tensors(&self) -> &BTreeMap<Vec<usize>, RealTensor> {
        &self.tensors
    }

    /// `T^(N)`, or `None` for a single subsystem.
    pub fn full_tensor(&self) -> Option<&RealTensor> {
        let all: Vec<usize> = (0..self.parties()).collect();
        self.tensors.get(&all)
    }

    pub fn single_mut(&mut self, k: usize) -> Option<&mut DVector<f64>> {
        self.singles.get_mut(&k)
    }

    pub fn tensor_mut(&mut self, subset: &[usize]) -> Option<&mut RealTensor> {
        self.tensors.get_mut(subset)
    }

    /// Number of stored components, `2^N - 1`.
    pub fn component_count(&self) -> usize {
        self.singles.len() + self.tensors.len()
    }
}

/// Contract mode `k` of a row-major complex tensor with `g` (`r × shape[k]`).
fn mode_product(data: &[Complex64], shape: &[usize], k: usize, g: &ComplexMatrix) -> Vec<Complex64> {
    let left: usize = shape[..k].iter().product();
    let mid = shape[k];
    let right: usize = shape[k + 1..].iter().product();
    let rows = g.nrows();
    debug_assert_eq!(g.ncols(), mid);
    let mut out = vec![Complex64::new(0.0, 0.0); left * rows * right];
    for l in 0..left {
        for p in 0..mid {
            let src = &data[(l * mid + p) * right..(l * mid + p + 1) * right];
            for a in 0..rows {
                let c = g[(a, p)];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dst = &mut out[(l * rows + a) * right..(l * rows + a + 1) * right];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    out
}

/// Offsets that scatter `ρ[a, b]` into the interleaved pair tensor with
/// mode-`k` index `a_k d_k + b_k`: entry `(a, b)` goes to `row[a] + col[b]`.
fn pair_offsets(dims: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let m = dims.len();
    let mut stride = vec![1usize; m];
    for k in (0..m.saturating_sub(1)).rev() {
        stride[k] = stride[k + 1] * dims[k + 1] * dims[k + 1];
    }
    let total: usize = dims.iter().product();
    let mut row = vec![0; total];
    let mut col = vec![0; total];
    for idx in 0..total {
        let mut rest = idx;
        for k in (0..m).rev() {
            let digit = rest % dims[k];
            rest /= dims[k];
            row[idx] += digit * dims[k] * stride[k];
            col[idx] += digit * stride[k];
        }
    }
    (row, col)
}

fn bases_for(dims: &[usize]) -> Result<Vec<GeneratorBasis>> {
    let mut cache: HashMap<usize, GeneratorBasis> = HashMap::new();
    dims.iter()
        .map(|&d| {
            if let Some(b) = cache.get(&d) {
                return Ok(b.clone());
            }
            let b = GeneratorBasis::new(d)?;
            cache.insert(d, b.clone());
            Ok(b)
        })
        .collect()
}

/// `G[α, a d + b] = λ_α[b, a]`, so contracting against the pair tensor of `ρ`
/// yields `Tr(ρ λ_α)`.
fn trace_matrix(basis: &GeneratorBasis) -> ComplexMatrix {
    let d = basis.dim();
    ComplexMatrix::from_fn(basis.len(), d * d, |alpha, p| basis.get(alpha)[(p % d, p / d)])
}

/// `H[a d + b, α] = λ_α[a, b]` with `α = 0` the identity.
fn synthesis_matrix(basis: &GeneratorBasis) -> ComplexMatrix {
    let d = basis.dim();
    ComplexMatrix::from_fn(d * d, basis.len() + 1, |p, alpha| {
        let (a, b) = (p / d, p % d);
        if alpha == 0 {
            Complex64::new(if a == b { 1.0 } else { 0.0 }, 0.0)
        } else {
            basis.get(alpha - 1)[(a, b)]
        }
    })
}

fn real_part(values: Vec<Complex64>, context: &str) -> Result<Vec<f64>> {
    let worst = values.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if worst > tol::IMAG_RESIDUE {
        return Err(Error::NumericIntegrity(format!(
            "{context}: imaginary residue {worst:.3e} exceeds {:.0e}",
            tol::IMAG_RESIDUE
        )));
    }
    Ok(values.into_iter().map(|z| z.re).collect())
}

/// Full-generator coefficients `(Π d_k / 2^M) Tr(σ λ_{α_1} ⊗ … ⊗ λ_{α_M})`
/// of an operator on all of its subsystems.
fn full_coefficients(rho: &DensityMatrix, bases: &[GeneratorBasis]) -> Result<RealTensor> {
    let dims = rho.dims();
    let (row, col) = pair_offsets(dims);
    let mut shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); shape.iter().product()];
    let m = rho.matrix();
    for a in 0..rho.size() {
        for b in 0..rho.size() {
            data[row[a] + col[b]] = m[(a, b)];
        }
    }
    for (k, basis) in bases.iter().enumerate() {
        data = mode_product(&data, &shape, k, &trace_matrix(basis));
        shape[k] = basis.len();
    }
    let scale = dims.iter().product::<usize>() as f64 / 2f64.powi(dims.len() as i32);
    let values = real_part(data, "Bloch coefficient")?;
    RealTensor::new(shape, values.into_iter().map(|v| v * scale).collect())
}

/// Coherence vector of subsystem `k` (0-based).
pub fn bloch_vector(rho: &DensityMatrix, k: usize) -> Result<DVector<f64>> {
    check_subset(&[k], rho.parties(), 1)?;
    let reduced = rho.partial_trace(&[k])?;
    let bases = bases_for(reduced.dims())?;
    Ok(DVector::from_vec(full_coefficients(&reduced, &bases)?.into_data()))
}

/// Correlation tensor of an ascending subset of at least two subsystems.
pub fn correlation_tensor(rho: &DensityMatrix, subset: &[usize]) -> Result<RealTensor> {
    check_subset(subset, rho.parties(), 2)?;
    let reduced = rho.partial_trace(subset)?;
    let bases = bases_for(reduced.dims())?;
    full_coefficients(&reduced, &bases)
}

/// All coherence vectors and correlation tensors. Subset tensors are computed
/// in parallel from their reduced states.
pub fn decompose(rho: &DensityMatrix) -> Result<BlochData> {
    let n = rho.parties();
    let singles = (0..n)
        .into_par_iter()
        .map(|k| bloch_vector(rho, k).map(|v| (k, v)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let tensors = correlation_subsets(n)
        .into_par_iter()
        .map(|s| correlation_tensor(rho, &s).map(|t| (s, t)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(BlochData { dims: rho.dims().to_vec(), singles, tensors })
}

/// The operator `(1/Π d_k)(I + Σ …)` without density-matrix validation.
pub fn reconstruct_matrix(b: &BlochData) -> Result<ComplexMatrix> {
    let dims = b.dims();
    let n = dims.len();
    let bases = bases_for(dims)?;
    // Extended coefficient tensor over (identity, generators) per mode.
    let mut shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let ext = RealTensor::zeros(shape.clone())?;
    let mut coeff: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); ext.len()];
    coeff[0] = Complex64::new(1.0, 0.0);
    let mut idx = vec![0usize; n];
    for (&k, v) in b.singles() {
        for (alpha, &x) in v.iter().enumerate() {
            idx.iter_mut().for_each(|i| *i = 0);
            idx[k] = alpha + 1;
            coeff[ext.flat_index(&idx)] = Complex64::new(x, 0.0);
        }
    }
    let mut local = Vec::new();
    for (subset, t) in b.tensors() {
        local.resize(t.order(), 0);
        for (flat, &x) in t.data().iter().enumerate() {
            t.unravel_into(flat, &mut local);
            idx.iter_mut().for_each(|i| *i = 0);
            for (&k, &alpha) in subset.iter().zip(&local) {
                idx[k] = alpha + 1;
            }
            coeff[ext.flat_index(&idx)] = Complex64::new(x, 0.0);
        }
    }
    for (k, basis) in bases.iter().enumerate() {
        coeff = mode_product(&coeff, &shape, k, &synthesis_matrix(basis));
        shape[k] = dims[k] * dims[k];
    }
    let total: usize = dims.iter().product();
    let (row, col) = pair_offsets(dims);
    let norm = Complex64::new(1.0 / total as f64, 0.0);
    Ok(DMatrix::from_fn(total, total, |a, c| coeff[row[a] + col[c]] * norm))
}

/// Inverse of [`decompose`]; fails if the data do not describe a state.
pub fn reconstruct(b: &BlochData) -> Result<DensityMatrix> {
    let m = reconstruct_matrix(b)?;
    // Hermitize away rounding before validation.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(b.dims().to_vec(), m)
}

/// Single-subsystem state `(1/d)(I + Σ_α v_α λ_α)` without validation.
pub fn local_operator(basis: &GeneratorBasis, v: &DVector<f64>) -> Result<ComplexMatrix> {
    if v.len() != basis.len() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} for {} generators",
            v.len(),
            basis.len()
        )));
    }
    let d = basis.dim();
    let mut m = ComplexMatrix::identity(d, d);
    for (g, &x) in basis.generators().iter().zip(v.iter()) {
        m += g * Complex64::new(x, 0.0);
    }
    Ok(m * Complex64::new(1.0 / d as f64, 0.0))
}
