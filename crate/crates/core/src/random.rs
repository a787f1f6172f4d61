//! Random states and unitaries for property tests and sampling.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::states::{ComplexMatrix, ComplexVector, DensityMatrix};
use crate::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state vector of length `d`.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

pub fn random_pure_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<DensityMatrix> {
    let d = dims.iter().product();
    DensityMatrix::from_pure(dims.to_vec(), &random_ket(d, rng))
}

/// `G G† / Tr(G G†)` with `G` a `D × rank` Ginibre matrix; `rank = D` gives
/// the Hilbert-Schmidt ensemble.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m * Complex64::new(1.0 / tr, 0.0);
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(dims.to_vec(), m)
}

/// Product of independent pure states.
pub fn random_product_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<DensityMatrix> {
    let parts = dims
        .iter()
        .map(|&d| DensityMatrix::from_pure(vec![d], &random_ket(d, rng)))
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::product(&parts)
}

/// Convex mixture of `terms` random product states with random weights.
pub fn random_separable<R: Rng + ?Sized>(dims: &[usize], terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    let raw: Vec<f64> = (0..terms.max(1)).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let parts = raw
        .iter()
        .map(|w| Ok((w / total, random_product_state(dims, rng)?)))
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::mixture(&parts)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the diagonal phases of `R` divided out.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = u.column_mut(j);
        col *= phase;
    }
    u
}
