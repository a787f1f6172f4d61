//! Locating the mixing parameter at which a verdict flips.

use super::{prop2_check, theorem1_check, Decision, Verdict};
use crate::bloch::correlation_tensor;
use crate::states::{DensityMatrix, ZooSpec};
use crate::tensor::tensor_kyfan;
use crate::{Error, Result};

const TOLERANCE: f64 = 1e-6;
const SCAN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdCriterion {
    /// Smallest `p` above which the full-tensor Ky Fan test reports Entangled.
    Theorem1,
    /// Same for one 0-based subset of subsystems.
    Subset(Vec<usize>),
    /// Largest `p` up to which the Prop 2 test reports Separable.
    Prop2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMethod {
    /// Bisection on `[0, 1]`; assumes a single monotone flip.
    #[default]
    Bisect,
    /// Grid scan with step `1e-3` for the first flip, then bisection inside
    /// that cell. For families whose monotonicity is not known.
    ScanThenBisect,
}

fn subset_verdict(rho: &DensityMatrix, subset: &[usize]) -> Result<Verdict> {
    let t = correlation_tensor(rho, subset)?;
    let dims: Vec<usize> = subset.iter().map(|&k| rho.dims()[k]).collect();
    Ok(Verdict::necessary(
        super::Criterion::Corollary1,
        tensor_kyfan(&t)?,
        super::separability_bound(&dims)?,
    ))
}

/// `true` on the entangled side of the flip.
fn flagged(rho: &DensityMatrix, criterion: &ThresholdCriterion) -> Result<bool> {
    Ok(match criterion {
        ThresholdCriterion::Theorem1 => theorem1_check(rho)?.decision == Decision::Entangled,
        ThresholdCriterion::Subset(s) => subset_verdict(rho, s)?.decision == Decision::Entangled,
        ThresholdCriterion::Prop2 => prop2_check(rho)?.decision != Decision::Separable,
    })
}

fn bisect(mut lo: f64, mut hi: f64, f: &mut impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    while hi - lo > TOLERANCE / 4.0 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Flip point of an arbitrary predicate on `[0, 1]`, `false` below and
/// `true` above, to absolute tolerance `1e-6`.
pub fn threshold_search_with(
    mut f: impl FnMut(f64) -> Result<bool>,
    method: ThresholdMethod,
) -> Result<f64> {
    let at_zero = f(0.0)?;
    if at_zero {
        return Err(Error::NoThreshold("criterion already fires at p = 0".into()));
    }
    match method {
        ThresholdMethod::Bisect => {
            if !f(1.0)? {
                return Err(Error::NoThreshold("criterion never fires on [0, 1]".into()));
            }
            bisect(0.0, 1.0, &mut f)
        }
        ThresholdMethod::ScanThenBisect => {
            let steps = (1.0 / SCAN_STEP).round() as usize;
            let mut prev = 0.0;
            for i in 1..=steps {
                let p = (i as f64 * SCAN_STEP).min(1.0);
                if f(p)? {
                    return bisect(prev, p, &mut f);
                }
                prev = p;
            }
            Err(Error::NoThreshold("criterion never fires on [0, 1]".into()))
        }
    }
}

/// Threshold of `criterion` over the noisy family `family`.
pub fn threshold_search(family: &ZooSpec, criterion: &ThresholdCriterion) -> Result<f64> {
    if family.p().is_none() {
        return Err(Error::InvalidParameter(format!(
            "family {} has no mixing parameter",
            family.family()
        )));
    }
    threshold_search_with(
        |p| {
            let rho = family.with_p(p).expect("noisy family").build()?;
            flagged(&rho, criterion)
        },
        ThresholdMethod::Bisect,
    )
}
