//! Generalized Gell-Mann generators of SU(d) and their structure constants.
//!
//! Generators are enumerated in three blocks: for every pair `j < k` in
//! lexicographic order the symmetric `E_jk + E_kj`, then for every pair the
//! antisymmetric `-i(E_jk - E_kj)`, then the diagonal generators
//! `sqrt(2/(l(l+1))) (sum_{m<l} E_mm - l E_ll)` for `l = 1..d-1`. For `d = 2`
//! this yields `(σx, σy, σz)`. For `d = 3` the order differs from the
//! historical Gell-Mann listing; every quantity computed downstream is
//! invariant under that relabeling.
//!
//! All generators are normalized to `Tr(λ_i λ_j) = 2 δ_ij`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Ordered set of the `d² - 1` traceless Hermitian generators of SU(d).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    d: usize,
    generators: Vec<DMatrix<Complex64>>,
}

impl GeneratorBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!(
                "SU(d) basis needs d >= 2, got {d}"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let pairs: Vec<(usize, usize)> = (0..d)
            .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
            .collect();
        let mut generators = Vec::with_capacity(d * d - 1);
        for &(j, k) in &pairs {
            let mut m = DMatrix::from_element(d, d, zero);
            m[(j, k)] = Complex64::new(1.0, 0.0);
            m[(k, j)] = Complex64::new(1.0, 0.0);
            generators.push(m);
        }
        for &(j, k) in &pairs {
            let mut m = DMatrix::from_element(d, d, zero);
            m[(j, k)] = Complex64::new(0.0, -1.0);
            m[(k, j)] = Complex64::new(0.0, 1.0);
            generators.push(m);
        }
        for l in 1..d {
            let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut m = DMatrix::from_element(d, d, zero);
            for i in 0..l {
                m[(i, i)] = Complex64::new(scale, 0.0);
            }
            m[(l, l)] = Complex64::new(-scale * l as f64, 0.0);
            generators.push(m);
        }
        Ok(Self { d, generators })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of generators, `d² - 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[DMatrix<Complex64>] {
        &self.generators
    }

    pub fn get(&self, i: usize) -> &DMatrix<Complex64> {
        &self.generators[i]
    }

    /// Largest deviation from Hermiticity, tracelessness and
    /// `Tr(λ_i λ_j) = 2 δ_ij` over the whole basis.
    pub fn max_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.generators.iter().enumerate() {
            worst = worst.max((a - a.adjoint()).norm());
            worst = worst.max(a.trace().norm());
            for (j, b) in self.generators.iter().enumerate() {
                let target = if i == j { 2.0 } else { 0.0 };
                worst = worst.max(((a * b).trace() - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Build the fixed generator enumeration for dimension `d`.
pub fn build_basis(d: usize) -> Result<GeneratorBasis> {
    GeneratorBasis::new(d)
}

/// Structure constants of the Lie algebra in the basis they were built from:
/// `λ_i λ_j = (2/d) δ_ij I + i f_ijk λ_k + g_ijk λ_k`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    d: usize,
    n: usize,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Totally antisymmetric constant `f_ijk`.
    pub fn f(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f[(i * self.n + j) * self.n + k]
    }

    /// Totally symmetric constant `g_ijk`.
    pub fn g(&self, i: usize, j: usize, k: usize) -> f64 {
        self.g[(i * self.n + j) * self.n + k]
    }

    /// The right-hand side of the product identity for the pair `(i, j)`.
    pub fn product_rhs(&self, basis: &GeneratorBasis, i: usize, j: usize) -> DMatrix<Complex64> {
        let d = self.d;
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        if i == j {
            for a in 0..d {
                out[(a, a)] += Complex64::new(2.0 / d as f64, 0.0);
            }
        }
        for k in 0..self.n {
            let c = Complex64::new(self.g(i, j, k), self.f(i, j, k));
            if c.norm() != 0.0 {
                out += basis.get(k) * c;
            }
        }
        out
    }

    /// `Σ_ij s_i s_j g_ijk` for every `k`.
    pub fn contract_symmetric(&self, s: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += s[i] * s[j] * self.g(i, j, k);
                    }
                }
                acc
            })
            .collect()
    }
}

/// `f_ijk = Im Tr(λ_i λ_j λ_k) / 2`, `g_ijk = Re Tr(λ_i λ_j λ_k) / 2`.
pub fn structure_constants(basis: &GeneratorBasis) -> StructureConstants {
    let n = basis.len();
    let mut f = vec![0.0; n * n * n];
    let mut g = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let ij = basis.get(i) * basis.get(j);
            for k in 0..n {
                let t = (&ij * basis.get(k)).trace() / 2.0;
                f[(i * n + j) * n + k] = t.im;
                g[(i * n + j) * n + k] = t.re;
            }
        }
    }
    StructureConstants {
        d: basis.dim(),
        n,
        f,
        g,
    }
}
