//! Kruskal (CP) forms: weighted sums of rank-1 outer products.

use nalgebra::{DMatrix, DVector};

use super::{outer_product, singular_values, RealTensor};
use crate::{tol, Error, Result};

/// `Σ_w weight_w · u_w^(0) ∘ u_w^(1) ∘ …`, stored as one factor matrix per
/// mode whose columns are the per-term vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct KruskalForm {
    weights: Vec<f64>,
    factors: Vec<DMatrix<f64>>,
    orthogonal: bool,
}

impl KruskalForm {
    pub fn new(weights: Vec<f64>, factors: Vec<DMatrix<f64>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::ShapeMismatch("Kruskal form without modes".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidParameter(format!("Kruskal weight {w} is not a nonnegative real")));
        }
        let rank = weights.len();
        for (m, f) in factors.iter().enumerate() {
            if f.ncols() != rank {
                return Err(Error::ShapeMismatch(format!(
                    "mode {m} has {} factor vectors for {rank} weights",
                    f.ncols()
                )));
            }
            if f.nrows() == 0 {
                return Err(Error::ShapeMismatch(format!("mode {m} has zero length")));
            }
        }
        Ok(Self {
            weights,
            factors,
            orthogonal: false,
        })
    }

    /// Form from per-term vectors: `terms[w][m]` is the mode-`m` factor of
    /// term `w`.
    pub fn from_terms(weights: Vec<f64>, terms: &[Vec<DVector<f64>>], shape: &[usize]) -> Result<Self> {
        if terms.len() != weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} terms for {} weights",
                terms.len(),
                weights.len()
            )));
        }
        let mut factors: Vec<DMatrix<f64>> =
            shape.iter().map(|&i| DMatrix::zeros(i, terms.len())).collect();
        for (w, term) in terms.iter().enumerate() {
            if term.len() != shape.len() {
                return Err(Error::ShapeMismatch(format!("term {w} has {} modes", term.len())));
            }
            for (m, v) in term.iter().enumerate() {
                if v.len() != shape[m] {
                    return Err(Error::ShapeMismatch(format!(
                        "term {w} mode {m}: length {} != {}",
                        v.len(),
                        shape[m]
                    )));
                }
                factors[m].set_column(w, v);
            }
        }
        Self::new(weights, factors)
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.nrows()).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Factor matrix `U^(m)` (one column per term).
    pub fn factor(&self, mode: usize) -> &DMatrix<f64> {
        &self.factors[mode]
    }

    pub fn factor_vector(&self, mode: usize, term: usize) -> DVector<f64> {
        self.factors[mode].column(term).into_owned()
    }

    /// Whether complete orthogonality has been verified.
    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }
}

pub fn kruskal_to_tensor(k: &KruskalForm) -> Result<RealTensor> {
    let mut acc = RealTensor::zeros(k.shape())?;
    for (w, &weight) in k.weights.iter().enumerate() {
        let vectors: Vec<DVector<f64>> = (0..k.order()).map(|m| k.factor_vector(m, w)).collect();
        let term = outer_product(&vectors)?;
        for (a, b) in acc.data_mut().iter_mut().zip(term.data()) {
            *a += weight * b;
        }
    }
    Ok(acc)
}

/// Column-wise Kronecker product `[u_1 ⊗ v_1, …, u_R ⊗ v_R]`.
pub fn khatri_rao(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if u.ncols() != v.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "Khatri-Rao needs equal column counts, got {} and {}",
            u.ncols(),
            v.ncols()
        )));
    }
    let mut out = DMatrix::zeros(u.nrows() * v.nrows(), u.ncols());
    for c in 0..u.ncols() {
        for i in 0..u.nrows() {
            for j in 0..v.nrows() {
                out[(i * v.nrows() + j, c)] = u[(i, c)] * v[(j, c)];
            }
        }
    }
    Ok(out)
}

/// Mode-`k` unfolding computed from the factors as `U^(k) Σ Vᵀ`.
///
/// The columns of `V` are Khatri-Rao chains over the other modes taken in the
/// same cyclic order as [`RealTensor::unfold`] (`k+1, …, M-1, 0, …, k-1`), so
/// the result agrees entrywise with unfolding the assembled tensor.
pub fn kruskal_unfold(k: &KruskalForm, mode: usize) -> Result<DMatrix<f64>> {
    let m = k.order();
    if m < 2 {
        return Err(Error::UnsupportedOrder(m));
    }
    if mode >= m {
        return Err(Error::OutOfRange(format!("mode {mode} for order {m}")));
    }
    let mut chain: Option<DMatrix<f64>> = None;
    for j in 1..m {
        let f = &k.factors[(mode + j) % m];
        chain = Some(match chain {
            None => f.clone(),
            Some(c) => khatri_rao(&c, f)?,
        });
    }
    let v = chain.expect("order >= 2");
    let sigma = DMatrix::from_diagonal(&DVector::from_column_slice(&k.weights));
    Ok(&k.factors[mode] * sigma * v.transpose())
}

/// Check that every mode's factor Gram matrix is the identity (1e-10) and
/// record the result on the form.
pub fn verify_complete_orthogonality(k: &mut KruskalForm) -> bool {
    let r = k.rank();
    let ok = k.factors.iter().all(|f| {
        let gram = f.transpose() * f;
        (gram - DMatrix::<f64>::identity(r, r)).amax() <= tol::EXACT
    });
    k.orthogonal = ok;
    ok
}

/// Completely orthogonal Kruskal decomposition for the two decidable cases.
///
/// Order 2 always succeeds through the singular value decomposition. Higher
/// orders succeed only for exactly diagonal tensors (entries away from
/// `(i, i, …, i)` below `1e-12` relative), with the sign of each diagonal
/// entry carried by its mode-0 factor. The zero tensor yields the empty form.
/// Anything else returns `None`.
pub fn find_orthogonal_kruskal(t: &RealTensor) -> Option<KruskalForm> {
    let mut form = match t.order() {
        0 | 1 => return None,
        2 => svd_form(t)?,
        _ => diagonal_form(t)?,
    };
    verify_complete_orthogonality(&mut form).then_some(form)
}

fn svd_form(t: &RealTensor) -> Option<KruskalForm> {
    let m = t.unfold(0).ok()?;
    let spectrum = singular_values(&m).ok()?;
    let cut = tol::RANK * spectrum.largest();
    let svd = m.clone().svd(true, true);
    let u = svd.u?;
    let v_t = svd.v_t?;
    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut && svd.singular_values[i] > 0.0)
        .collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let weights: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut left = DMatrix::zeros(m.nrows(), order.len());
    let mut right = DMatrix::zeros(m.ncols(), order.len());
    for (c, &i) in order.iter().enumerate() {
        left.set_column(c, &u.column(i));
        right.set_column(c, &v_t.row(i).transpose());
    }
    KruskalForm::new(weights, vec![left, right]).ok()
}

fn diagonal_form(t: &RealTensor) -> Option<KruskalForm> {
    let n = *t.shape().iter().min()?;
    let cut = tol::RANK * t.max_abs().max(1.0);
    let mut idx = vec![0; t.order()];
    for (flat, &v) in t.data().iter().enumerate() {
        t.unravel_into(flat, &mut idx);
        if idx.iter().any(|&i| i != idx[0]) && v.abs() > cut {
            return None;
        }
    }
    let mut weights = Vec::new();
    let mut terms = Vec::new();
    for i in 0..n {
        let v = t.get(&vec![i; t.order()]);
        if v.abs() <= cut {
            continue;
        }
        weights.push(v.abs());
        let term: Vec<DVector<f64>> = (0..t.order())
            .map(|m| {
                let mut e = DVector::zeros(t.shape()[m]);
                e[i] = if m == 0 { v.signum() } else { 1.0 };
                e
            })
            .collect();
        terms.push(term);
    }
    KruskalForm::from_terms(weights, &terms, t.shape()).ok()
}

/// Ky Fan norm from a completely orthogonal decomposition: the weight sum.
pub fn kyfan_via_kruskal(k: &KruskalForm) -> Result<f64> {
    if !k.orthogonal {
        return Err(Error::Precondition(
            "Kruskal form has not been verified completely orthogonal".into(),
        ));
    }
    Ok(k.weights.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{tensor_kyfan, RealTensor};

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn smolin_form() -> KruskalForm {
        let terms: Vec<Vec<DVector<f64>>> = (0..3).map(|i| vec![e(3, i); 4]).collect();
        KruskalForm::from_terms(vec![1.0; 3], &terms, &[3; 4]).unwrap()
    }

    #[test]
    fn single_term_is_outer_product() {
        let u = DVector::from_vec(vec![1., 2.]);
        let v = DVector::from_vec(vec![0.5, -1., 3.]);
        let k = KruskalForm::from_terms(vec![1.0], &[vec![u.clone(), v.clone()]], &[2, 3]).unwrap();
        assert_eq!(kruskal_to_tensor(&k).unwrap(), outer_product(&[u.clone(), v.clone()]).unwrap());
        assert_eq!(kruskal_unfold(&k, 0).unwrap(), &u * v.transpose());
    }

    #[test]
    fn smolin_form_is_diagonal() {
        let t = kruskal_to_tensor(&smolin_form()).unwrap();
        let mut idx = vec![0; 4];
        for (flat, &v) in t.data().iter().enumerate() {
            t.unravel_into(flat, &mut idx);
            let diag = idx.iter().all(|&i| i == idx[0]);
            assert_eq!(v, if diag { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn smolin_form_unfoldings() {
        let k = smolin_form();
        for mode in 0..4 {
            let m = kruskal_unfold(&k, mode).unwrap();
            assert_eq!((m.nrows(), m.ncols()), (3, 27));
            let gram = &m * m.transpose();
            assert!((gram - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        }
    }

    #[test]
    fn orthogonal_pair_frobenius() {
        let s = 0.5f64.sqrt();
        let u = [DVector::from_vec(vec![s, s, 0.]), DVector::from_vec(vec![s, -s, 0.])];
        let v = [e(2, 0), e(2, 1)];
        let w = [DVector::from_vec(vec![0.6, 0.8]), DVector::from_vec(vec![-0.8, 0.6])];
        let (a, b) = (1.7, 0.4);
        let terms = vec![
            vec![u[0].clone(), v[0].clone(), w[0].clone()],
            vec![u[1].clone(), v[1].clone(), w[1].clone()],
        ];
        let mut k = KruskalForm::from_terms(vec![a, b], &terms, &[3, 2, 2]).unwrap();
        let t = kruskal_to_tensor(&k).unwrap();
        assert!((t.frobenius() - (a * a + b * b).sqrt()).abs() < 1e-12);
        assert!(verify_complete_orthogonality(&mut k));
        assert!((kyfan_via_kruskal(&k).unwrap() - tensor_kyfan(&t).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn orthogonality_detection() {
        let mut k = smolin_form();
        assert!(!k.is_orthogonal());
        assert!(kyfan_via_kruskal(&k).is_err());
        assert!(verify_complete_orthogonality(&mut k));
        assert_eq!(kyfan_via_kruskal(&k).unwrap(), 3.0);

        let dup = vec![vec![e(3, 0), e(3, 0)], vec![e(3, 0), e(3, 1)]];
        let mut k = KruskalForm::from_terms(vec![1.0, 1.0], &dup, &[3, 3]).unwrap();
        assert!(!verify_complete_orthogonality(&mut k));
    }

    #[test]
    fn ghz_expansion_not_orthogonal() {
        let x = e(3, 0);
        let y = e(3, 1);
        let terms = vec![
            vec![x.clone(), x.clone(), x.clone()],
            vec![x.clone(), y.clone(), y.clone()],
            vec![y.clone(), x.clone(), y.clone()],
            vec![y.clone(), y.clone(), x.clone()],
        ];
        let mut k = KruskalForm::from_terms(vec![1.0; 4], &terms, &[3; 3]).unwrap();
        assert!(!verify_complete_orthogonality(&mut k));
        let gram = k.factor(0).transpose() * k.factor(0);
        assert_eq!(gram[(0, 1)], 1.0);
    }

    #[test]
    fn find_on_matrix_is_svd() {
        let t = RealTensor::new(vec![2, 3], vec![1., 2., 0., -1., 0.5, 3.]).unwrap();
        let k = find_orthogonal_kruskal(&t).unwrap();
        assert!(k.is_orthogonal());
        let back = kruskal_to_tensor(&k).unwrap();
        assert!(back.sub(&t).unwrap().max_abs() < 1e-12);
        assert!((kyfan_via_kruskal(&k).unwrap() - tensor_kyfan(&t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn find_on_diagonal_and_general_tensors() {
        let t = kruskal_to_tensor(&smolin_form()).unwrap();
        let k = find_orthogonal_kruskal(&t).unwrap();
        assert_eq!(k.weights(), &[1.0, 1.0, 1.0]);
        assert!(k.is_orthogonal());

        let mut signed = RealTensor::zeros(vec![3; 3]).unwrap();
        signed.set(&[2, 2, 2], -0.8);
        let k = find_orthogonal_kruskal(&signed).unwrap();
        assert_eq!(k.weights(), &[0.8]);
        assert!(kruskal_to_tensor(&k).unwrap().sub(&signed).unwrap().max_abs() < 1e-15);

        let mut ghz = RealTensor::zeros(vec![3; 3]).unwrap();
        ghz.set(&[0, 0, 0], 1.0);
        for idx in [[0, 1, 1], [1, 0, 1], [1, 1, 0]] {
            ghz.set(&idx, -1.0);
        }
        assert!(find_orthogonal_kruskal(&ghz).is_none());
        assert!(find_orthogonal_kruskal(&RealTensor::zeros(vec![3, 2, 3]).unwrap()).is_some());
        let uneven = RealTensor::from_fn(vec![3, 2, 3], |i| {
            if i.iter().all(|&x| x == i[0]) { 0.5 + i[0] as f64 } else { 0.0 }
        })
        .unwrap();
        let k = find_orthogonal_kruskal(&uneven).unwrap();
        assert_eq!(k.weights(), &[0.5, 1.5]);
        let mut off = uneven.clone();
        off.set(&[2, 0, 0], 1e-3);
        assert!(find_orthogonal_kruskal(&off).is_none());
    }

    /// Every mode-0 slice `T[i, :, :]` must be rank <= 1 for an axis-aligned
    /// decomposition to exist; GHZ fails on the x and y slices.
    #[test]
    fn ghz_slice_rank_oracle() {
        let mut ghz = RealTensor::zeros(vec![3; 3]).unwrap();
        ghz.set(&[0, 0, 0], 1.0);
        for idx in [[0, 1, 1], [1, 0, 1], [1, 1, 0]] {
            ghz.set(&idx, -1.0);
        }
        for i in 0..2 {
            let slice = DMatrix::from_fn(3, 3, |a, b| ghz.get(&[i, a, b]));
            let s = singular_values(&slice).unwrap();
            assert_eq!(s.rank(), 2);
        }
    }

    #[test]
    fn shape_errors() {
        let bad = KruskalForm::new(vec![1.0], vec![DMatrix::zeros(2, 2)]);
        assert!(matches!(bad, Err(Error::ShapeMismatch(_))));
        let neg = KruskalForm::new(vec![-1.0], vec![DMatrix::zeros(2, 1)]);
        assert!(matches!(neg, Err(Error::InvalidParameter(_))));
        let k = KruskalForm::from_terms(vec![1.0], &[vec![e(2, 0)]], &[2]).unwrap();
        assert_eq!(kruskal_unfold(&k, 0), Err(Error::UnsupportedOrder(1)));
        assert!(khatri_rao(&DMatrix::zeros(2, 2), &DMatrix::zeros(2, 3)).is_err());
    }
}
