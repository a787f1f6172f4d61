//! Separability tests built on correlation-tensor norms.
//!
//! The Ky Fan test is necessary only: a state whose correlation tensor norm
//! exceeds `sqrt(Π_k d_k(d_k-1) / 2^N)` is entangled, and anything else is
//! inconclusive. Sufficient conditions come from completely orthogonal Kruskal
//! decompositions, which also yield an explicit separable mixture.

mod decomposition;
mod threshold;

pub use decomposition::{
    build_separable_decomposition, prop2_analysis, prop2_check, prop2_lhs, DecompositionCheck,
    Prop2Analysis, Prop2Component, ProductTerm, SeparableDecomposition,
};
pub use threshold::{threshold_search, threshold_search_with, ThresholdCriterion, ThresholdMethod};

use std::time::Instant;

use rayon::prelude::*;

use crate::bloch::{correlation_subsets, correlation_tensor, decompose, subsets_of_size};
use crate::states::DensityMatrix;
use crate::tensor::{find_orthogonal_kruskal, outer_product, tensor_kyfan};
use crate::{tol, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Entangled,
    Separable,
    Inconclusive,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Entangled => "entangled",
            Self::Separable => "separable",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// Which test produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Ky Fan norm of the full correlation tensor.
    Theorem1,
    /// Ky Fan norm of a subset correlation tensor.
    Corollary1,
    /// Exact test for qubit states with only the full tensor nonzero.
    Corollary2,
    /// Orthogonal-decomposition sufficiency test.
    Prop2,
}

impl Criterion {
    pub fn id(self) -> &'static str {
        match self {
            Self::Theorem1 => "t1",
            Self::Corollary1 => "c1",
            Self::Corollary2 => "c2",
            Self::Prop2 => "p2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub decision: Decision,
    pub norm: f64,
    pub bound: f64,
    pub criterion: Criterion,
    /// The norm sits inside the guard band around the bound.
    pub borderline: bool,
    pub reason: Option<String>,
}

impl Verdict {
    fn inconclusive(criterion: Criterion, norm: f64, bound: f64, reason: impl Into<String>) -> Self {
        Self {
            decision: Decision::Inconclusive,
            norm,
            bound,
            criterion,
            borderline: false,
            reason: Some(reason.into()),
        }
    }

    /// Necessary-condition verdict: Entangled above the guard band.
    fn necessary(criterion: Criterion, norm: f64, bound: f64) -> Self {
        let borderline = (norm - bound).abs() <= tol::GUARD;
        let decision = if norm > bound + tol::GUARD {
            Decision::Entangled
        } else {
            Decision::Inconclusive
        };
        Self { decision, norm, bound, criterion, borderline, reason: None }
    }

    /// The same comparison with a different guard band. Verdicts that carry a
    /// precondition reason or have no norm are returned unchanged.
    pub fn regraded(&self, guard: f64) -> Verdict {
        if !self.norm.is_finite() || (self.reason.is_some() && self.criterion != Criterion::Prop2) {
            return self.clone();
        }
        let borderline = (self.norm - self.bound).abs() <= guard;
        let decision = match self.criterion {
            Criterion::Theorem1 | Criterion::Corollary1 => {
                if self.norm > self.bound + guard {
                    Decision::Entangled
                } else {
                    Decision::Inconclusive
                }
            }
            Criterion::Corollary2 => {
                if borderline {
                    Decision::Inconclusive
                } else if self.norm < self.bound {
                    Decision::Separable
                } else {
                    Decision::Entangled
                }
            }
            Criterion::Prop2 => {
                if self.norm <= self.bound + guard {
                    Decision::Separable
                } else {
                    Decision::Inconclusive
                }
            }
        };
        let reason = match (self.criterion, decision) {
            (Criterion::Prop2, Decision::Inconclusive) => Some(format!("lhs = {} > 1", self.norm)),
            (Criterion::Prop2, _) => None,
            _ => self.reason.clone(),
        };
        Verdict { decision, borderline, reason, ..self.clone() }
    }

    pub fn is_entangled(&self) -> bool {
        self.decision == Decision::Entangled
    }

    pub fn is_separable(&self) -> bool {
        self.decision == Decision::Separable
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDimension(format!("dims {dims:?}")));
    }
    Ok(())
}

/// `sqrt(Π_k d_k (d_k - 1) / 2^N)`.
pub fn separability_bound(dims: &[usize]) -> Result<f64> {
    check_dims(dims)?;
    Ok(dims
        .iter()
        .map(|&d| (d * (d - 1)) as f64 / 2.0)
        .product::<f64>()
        .sqrt())
}

fn all_subsystems(rho: &DensityMatrix) -> Vec<usize> {
    (0..rho.parties()).collect()
}

fn require_multipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.parties() < 2 {
        return Err(Error::InvalidParameter(
            "correlation tests need at least two subsystems".into(),
        ));
    }
    Ok(())
}

/// Ky Fan test on the full correlation tensor.
pub fn theorem1_check(rho: &DensityMatrix) -> Result<Verdict> {
    require_multipartite(rho)?;
    let t = correlation_tensor(rho, &all_subsystems(rho))?;
    let norm = tensor_kyfan(&t)?;
    Ok(Verdict::necessary(Criterion::Theorem1, norm, separability_bound(rho.dims())?))
}

/// Which subsets a scan covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetSelection {
    /// Only the full set of subsystems.
    Full,
    /// Every subset with at least two subsystems.
    All,
    /// Every pair.
    Pairs,
    /// Every subset of the given size.
    Size(usize),
    /// Explicit 0-based ascending subsets.
    Explicit(Vec<Vec<usize>>),
}

impl SubsetSelection {
    pub fn resolve(&self, parties: usize) -> Result<Vec<Vec<usize>>> {
        let out = match self {
            Self::Full => vec![(0..parties).collect()],
            Self::All => correlation_subsets(parties),
            Self::Pairs => subsets_of_size(parties, 2),
            Self::Size(m) => {
                if *m < 2 || *m > parties {
                    return Err(Error::InvalidParameter(format!(
                        "subset size {m} outside 2..={parties}"
                    )));
                }
                subsets_of_size(parties, *m)
            }
            Self::Explicit(list) => list.clone(),
        };
        if parties < 2 {
            return Err(Error::InvalidParameter("scan needs at least two subsystems".into()));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetRecord {
    pub subset: Vec<usize>,
    pub verdict: Verdict,
}

/// Prop 2 result with per-component detail.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Record {
    pub lhs: Option<f64>,
    /// Subsets whose tensors have no completely orthogonal decomposition.
    pub unavailable: Vec<Vec<usize>>,
    pub verdict: Verdict,
}

/// Which tests [`analyze`] runs beyond the subset scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CriteriaSet {
    pub theorem1: bool,
    pub corollary1: bool,
    pub corollary2: bool,
    pub prop2: bool,
}

impl CriteriaSet {
    pub fn all() -> Self {
        Self { theorem1: true, corollary1: true, corollary2: true, prop2: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub dims: Vec<usize>,
    pub records: Vec<SubsetRecord>,
    pub theorem1: Option<Verdict>,
    pub corollary2: Option<Verdict>,
    pub prop2: Option<Prop2Record>,
    pub elapsed_seconds: f64,
}

impl AnalysisReport {
    /// Any test certified entanglement.
    pub fn entangled(&self) -> bool {
        self.records.iter().any(|r| r.verdict.is_entangled())
            || self.theorem1.as_ref().is_some_and(Verdict::is_entangled)
            || self.corollary2.as_ref().is_some_and(Verdict::is_entangled)
    }

    /// Any test certified separability.
    pub fn separable(&self) -> bool {
        self.corollary2.as_ref().is_some_and(Verdict::is_separable)
            || self.prop2.as_ref().is_some_and(|p| p.verdict.is_separable())
    }
}

fn scan_records(rho: &DensityMatrix, subsets: &[Vec<usize>]) -> Result<Vec<SubsetRecord>> {
    let full = rho.parties();
    subsets
        .par_iter()
        .map(|s| {
            let t = correlation_tensor(rho, s)?;
            let dims: Vec<usize> = s.iter().map(|&k| rho.dims()[k]).collect();
            let criterion = if s.len() == full { Criterion::Theorem1 } else { Criterion::Corollary1 };
            let verdict = Verdict::necessary(criterion, tensor_kyfan(&t)?, separability_bound(&dims)?);
            Ok(SubsetRecord { subset: s.clone(), verdict })
        })
        .collect()
}

/// Ky Fan test on each selected subset tensor against the bound for the
/// subset's dimensions. An Entangled record certifies entanglement of the
/// corresponding reduced state, hence of the state itself.
pub fn subset_scan(rho: &DensityMatrix, selection: &SubsetSelection) -> Result<AnalysisReport> {
    let start = Instant::now();
    let subsets = selection.resolve(rho.parties())?;
    let records = scan_records(rho, &subsets)?;
    Ok(AnalysisReport {
        dims: rho.dims().to_vec(),
        records,
        theorem1: None,
        corollary2: None,
        prop2: None,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Subset scan plus the requested whole-state tests.
pub fn analyze(
    rho: &DensityMatrix,
    selection: &SubsetSelection,
    criteria: CriteriaSet,
) -> Result<AnalysisReport> {
    let start = Instant::now();
    require_multipartite(rho)?;
    let records = if criteria.corollary1 {
        scan_records(rho, &selection.resolve(rho.parties())?)?
    } else {
        Vec::new()
    };
    let theorem1 = criteria.theorem1.then(|| theorem1_check(rho)).transpose()?;
    let corollary2 = criteria.corollary2.then(|| corollary2_check(rho)).transpose()?;
    let prop2 = if criteria.prop2 {
        let a = prop2_analysis(rho)?;
        Some(Prop2Record {
            lhs: a.lhs,
            unavailable: a.unavailable.clone(),
            verdict: decomposition::prop2_verdict(&a),
        })
    } else {
        None
    };
    Ok(AnalysisReport {
        dims: rho.dims().to_vec(),
        records,
        theorem1,
        corollary2,
        prop2,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn require_pure(rho: &DensityMatrix) -> Result<()> {
    if rho.is_pure() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "pure state required, purity is {:.12}",
            rho.purity()
        )))
    }
}

/// A pure state is a full product iff its full tensor is the outer product of
/// its coherence vectors.
pub fn pure_product_check(rho: &DensityMatrix) -> Result<bool> {
    require_pure(rho)?;
    if rho.parties() < 2 {
        return Ok(true);
    }
    let b = decompose(rho)?;
    let singles: Vec<_> = b.singles().values().cloned().collect();
    let outer = outer_product(&singles)?;
    let full = b.full_tensor().expect("at least two subsystems");
    Ok(full.sub(&outer)?.frobenius() <= tol::ACCUMULATED)
}

/// Split a pure state into irreducible blocks of 0-based subsystems.
///
/// A block factors out when its marginal is pure. Candidates are tried by
/// increasing size up to half the remaining subsystems, so each block found
/// is minimal; what remains when no candidate works is one irreducible block.
pub fn factor_pure(rho: &DensityMatrix) -> Result<Vec<Vec<usize>>> {
    require_pure(rho)?;
    let mut residual: Vec<usize> = all_subsystems(rho);
    let mut blocks = Vec::new();
    'outer: while residual.len() > 1 {
        for m in 1..=residual.len() / 2 {
            for pick in subsets_of_size(residual.len(), m) {
                let subset: Vec<usize> = pick.iter().map(|&i| residual[i]).collect();
                let marginal = rho.partial_trace(&subset)?;
                if marginal.purity() >= 1.0 - tol::ACCUMULATED {
                    residual.retain(|k| !subset.contains(k));
                    blocks.push(subset);
                    continue 'outer;
                }
            }
        }
        break;
    }
    blocks.push(residual);
    blocks.sort();
    Ok(blocks)
}

/// Exact test for `N` qubits whose coherence vectors and proper-subset
/// tensors vanish and whose full tensor has a completely orthogonal
/// decomposition: separable iff the Ky Fan norm is at most 1.
pub fn corollary2_check(rho: &DensityMatrix) -> Result<Verdict> {
    require_multipartite(rho)?;
    let bound = 1.0;
    let c = Criterion::Corollary2;
    if rho.dims().iter().any(|&d| d != 2) {
        return Ok(Verdict::inconclusive(c, f64::NAN, bound, "not all subsystems are qubits"));
    }
    let b = decompose(rho)?;
    let full = b.full_tensor().expect("at least two subsystems");
    let norm = tensor_kyfan(full)?;
    if b.singles().values().any(|s| s.norm() > tol::GUARD) {
        return Ok(Verdict::inconclusive(c, norm, bound, "coherence vectors nonzero"));
    }
    let n = rho.parties();
    if b
        .tensors()
        .iter()
        .any(|(s, t)| s.len() < n && t.frobenius() > tol::GUARD)
    {
        let reason = if n == 3 { "pair tensors nonzero" } else { "proper-subset tensors nonzero" };
        return Ok(Verdict::inconclusive(c, norm, bound, reason));
    }
    if find_orthogonal_kruskal(full).is_none() {
        return Ok(Verdict::inconclusive(
            c,
            norm,
            bound,
            "full tensor has no completely orthogonal decomposition",
        ));
    }
    let borderline = (norm - bound).abs() <= tol::GUARD;
    let decision = if borderline {
        Decision::Inconclusive
    } else if norm < bound {
        Decision::Separable
    } else {
        Decision::Entangled
    };
    Ok(Verdict { decision, norm, bound, criterion: c, borderline, reason: None })
}
