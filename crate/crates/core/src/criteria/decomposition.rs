//! Sufficiency through completely orthogonal decompositions, and the
//! explicit separable mixture they induce.

use nalgebra::DVector;
use num_complex::Complex64;

use super::{Criterion, Decision, Verdict};
use crate::bloch::{ball_radii, decompose, local_operator, BlochData};
use crate::states::{hermitian_eigenvalues, kron_all, ComplexMatrix, DensityMatrix};
use crate::su_basis::GeneratorBasis;
use crate::tensor::{find_orthogonal_kruskal, sign_table, KruskalForm};
use crate::{tol, Error, Result};

/// `sqrt(2(d-1)/d)`, the reciprocal of the inball radius.
fn inball_coefficient(d: usize) -> f64 {
    (2.0 * (d as f64 - 1.0) / d as f64).sqrt()
}

/// One summand of the Prop 2 left-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Component {
    /// Ascending 0-based subsystems; one element for a coherence vector.
    pub subset: Vec<usize>,
    /// `Π_k sqrt(2(d_k-1)/d_k)` over the subset.
    pub coefficient: f64,
    /// Norm of the component: `‖s‖` or the orthogonal weight sum.
    pub norm: f64,
    /// Orthogonal decomposition for tensors; `None` for vectors and for
    /// tensors that have none.
    pub form: Option<KruskalForm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Analysis {
    pub dims: Vec<usize>,
    pub lhs: Option<f64>,
    pub components: Vec<Prop2Component>,
    pub unavailable: Vec<Vec<usize>>,
    pub bloch: BlochData,
}

/// Prop 2 left-hand side together with the decompositions it consumes.
pub fn prop2_analysis(rho: &DensityMatrix) -> Result<Prop2Analysis> {
    let b = decompose(rho)?;
    let dims = rho.dims().to_vec();
    let mut components = Vec::new();
    let mut unavailable = Vec::new();
    for (&k, s) in b.singles() {
        components.push(Prop2Component {
            subset: vec![k],
            coefficient: inball_coefficient(dims[k]),
            norm: s.norm(),
            form: None,
        });
    }
    for (subset, t) in b.tensors() {
        let coefficient = subset.iter().map(|&k| inball_coefficient(dims[k])).product();
        let form = find_orthogonal_kruskal(t);
        let norm = match &form {
            Some(f) => f.weights().iter().sum(),
            None => {
                unavailable.push(subset.clone());
                f64::NAN
            }
        };
        components.push(Prop2Component { subset: subset.clone(), coefficient, norm, form });
    }
    let lhs = unavailable
        .is_empty()
        .then(|| components.iter().map(|c| c.coefficient * c.norm).sum());
    Ok(Prop2Analysis { dims, lhs, components, unavailable, bloch: b })
}

/// `Σ_k c_k ‖s^(k)‖ + Σ_S c_S ‖T^S‖`, or `None` when some tensor lacks a
/// completely orthogonal decomposition.
pub fn prop2_lhs(rho: &DensityMatrix) -> Result<Option<f64>> {
    Ok(prop2_analysis(rho)?.lhs)
}

pub(super) fn prop2_verdict(a: &Prop2Analysis) -> Verdict {
    let bound = 1.0;
    match a.lhs {
        None => Verdict {
            decision: Decision::Inconclusive,
            norm: f64::NAN,
            bound,
            criterion: Criterion::Prop2,
            borderline: false,
            reason: Some(format!(
                "no completely orthogonal decomposition for subsets {:?}",
                a.unavailable
            )),
        },
        Some(lhs) if lhs <= bound + tol::EXACT => Verdict {
            decision: Decision::Separable,
            norm: lhs,
            bound,
            criterion: Criterion::Prop2,
            borderline: (lhs - bound).abs() <= tol::GUARD,
            reason: None,
        },
        Some(lhs) => Verdict {
            decision: Decision::Inconclusive,
            norm: lhs,
            bound,
            criterion: Criterion::Prop2,
            borderline: (lhs - bound).abs() <= tol::GUARD,
            reason: Some(format!("lhs = {lhs} > 1")),
        },
    }
}

/// Separable when the left-hand side exists and is at most 1.
pub fn prop2_check(rho: &DensityMatrix) -> Result<Verdict> {
    require_parties(rho)?;
    Ok(prop2_verdict(&prop2_analysis(rho)?))
}

fn require_parties(rho: &DensityMatrix) -> Result<()> {
    if rho.parties() < 2 {
        return Err(Error::InvalidParameter("Prop 2 needs at least two subsystems".into()));
    }
    Ok(())
}

/// Weighted product of single-subsystem states given by Bloch vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    /// One vector per subsystem; zero means maximally mixed.
    pub factors: Vec<DVector<f64>>,
}

/// `Σ_j w_j ⊗_k ρ_k(v_jk) + identity_weight · I/D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub dims: Vec<usize>,
    pub terms: Vec<ProductTerm>,
    pub identity_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCheck {
    /// Frobenius distance between the assembled mixture and the state.
    pub residual: f64,
    /// `|Σ w + identity_weight - 1|`.
    pub weight_error: f64,
    /// Largest `‖v‖ - r(d)` over factors; nonpositive when all lie in the
    /// inball.
    pub max_radius_excess: f64,
    /// Smallest eigenvalue over all assembled factor states.
    pub min_factor_eigenvalue: f64,
    pub min_weight: f64,
}

impl DecompositionCheck {
    pub fn passes(&self) -> bool {
        self.residual <= 1e-9
            && self.weight_error <= tol::EXACT
            && self.max_radius_excess <= tol::EXACT
            && self.min_factor_eigenvalue >= -tol::PSD
            && self.min_weight >= 0.0
    }
}

impl SeparableDecomposition {
    /// Total weight including the identity term.
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum::<f64>() + self.identity_weight
    }

    /// Number of terms counting the identity term.
    pub fn term_count(&self) -> usize {
        self.terms.len() + 1
    }

    fn bases(&self) -> Result<Vec<GeneratorBasis>> {
        self.dims.iter().map(|&d| GeneratorBasis::new(d)).collect()
    }

    pub fn assemble(&self) -> Result<ComplexMatrix> {
        let bases = self.bases()?;
        let total: usize = self.dims.iter().product();
        let mut m = ComplexMatrix::identity(total, total)
            * Complex64::new(self.identity_weight / total as f64, 0.0);
        for term in &self.terms {
            let locals = term
                .factors
                .iter()
                .zip(&bases)
                .map(|(v, b)| local_operator(b, v))
                .collect::<Result<Vec<_>>>()?;
            m += kron_all(locals.iter()) * Complex64::new(term.weight, 0.0);
        }
        Ok(m)
    }

    pub fn verify(&self, rho: &DensityMatrix) -> Result<DecompositionCheck> {
        if rho.dims() != self.dims.as_slice() {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", rho.dims(), self.dims)));
        }
        let bases = self.bases()?;
        let residual = (self.assemble()? - rho.matrix()).norm();
        let mut max_radius_excess = f64::NEG_INFINITY;
        let mut min_factor_eigenvalue = f64::INFINITY;
        for term in &self.terms {
            for ((v, b), &d) in term.factors.iter().zip(&bases).zip(&self.dims) {
                let (r, _) = ball_radii(d)?;
                max_radius_excess = max_radius_excess.max(v.norm() - r);
                let ev = hermitian_eigenvalues(&local_operator(b, v)?);
                min_factor_eigenvalue = min_factor_eigenvalue.min(ev[0]);
            }
        }
        let min_weight = self
            .terms
            .iter()
            .map(|t| t.weight)
            .fold(self.identity_weight, f64::min);
        Ok(DecompositionCheck {
            residual,
            weight_error: (self.weight_sum() - 1.0).abs(),
            max_radius_excess: if self.terms.is_empty() { 0.0 } else { max_radius_excess },
            min_factor_eigenvalue: if self.terms.is_empty() { 1.0 } else { min_factor_eigenvalue },
            min_weight,
        })
    }
}

/// Explicit separable mixture for a state passing Prop 2.
///
/// Each tensor term `ξ u_1 ∘ … ∘ u_M` on subset `S` becomes `2^(M-1)` product
/// terms with sign rows from the sign table, factors `±r_k u_k` on `S` and
/// maximally mixed elsewhere, each weighted `c_S ξ / 2^(M-1)`. Every nonzero
/// coherence vector contributes one term along its direction. Terms of weight
/// at most `1e-12` are rounding noise and are dropped; the identity term takes
/// the remaining weight.
pub fn build_separable_decomposition(rho: &DensityMatrix) -> Result<SeparableDecomposition> {
    require_parties(rho)?;
    let a = prop2_analysis(rho)?;
    let lhs = match a.lhs {
        None => {
            return Err(Error::Unavailable(format!(
                "no completely orthogonal decomposition for subsets {:?}",
                a.unavailable
            )))
        }
        Some(l) if l > 1.0 + tol::EXACT => {
            return Err(Error::Unavailable(format!("lhs = {l} > 1")));
        }
        Some(l) => l,
    };
    let dims = &a.dims;
    let radius = |d: usize| 1.0 / inball_coefficient(d);
    let zeros = || -> Vec<DVector<f64>> { dims.iter().map(|&d| DVector::zeros(d * d - 1)).collect() };
    let mut terms = Vec::new();
    for c in &a.components {
        match &c.form {
            None => {
                let k = c.subset[0];
                if c.coefficient * c.norm <= tol::RANK {
                    continue;
                }
                let s = a.bloch.single(k).expect("single present");
                let mut factors = zeros();
                factors[k] = s * (radius(dims[k]) / c.norm);
                terms.push(ProductTerm { weight: c.coefficient * c.norm, factors });
            }
            Some(form) => {
                let m = c.subset.len();
                let table = sign_table(m)?;
                let rows = table.rows().len() as f64;
                for (j, &xi) in form.weights().iter().enumerate() {
                    if c.coefficient * xi <= tol::RANK {
                        continue;
                    }
                    for row in table.rows() {
                        let mut factors = zeros();
                        for (mode, &k) in c.subset.iter().enumerate() {
                            factors[k] = form.factor_vector(mode, j)
                                * (f64::from(row[mode]) * radius(dims[k]));
                        }
                        terms.push(ProductTerm { weight: c.coefficient * xi / rows, factors });
                    }
                }
            }
        }
    }
    let used: f64 = terms.iter().map(|t| t.weight).sum();
    debug_assert!((used - lhs).abs() <= 1e-9);
    // At lhs = 1 rounding can push the remainder a few ulps negative.
    let identity_weight = (1.0 - used).max(0.0);
    Ok(SeparableDecomposition { dims: dims.clone(), terms, identity_weight })
}
