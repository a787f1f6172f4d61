#![allow(dead_code)]

//! Randomized invariant suites shared by the property tests and the
//! acceptance run. Each suite is seeded and returns the first violation.

use blochsep::bloch::{correlation_subsets, decompose, reconstruct, BlochData};
use blochsep::criteria::{
    build_separable_decomposition, subset_scan, theorem1_check, Decision, SubsetSelection,
};
use blochsep::random::{random_density, random_pure_state, random_separable, random_unitary};
use blochsep::states::{
    composite_index, ghz, noisy, w_state, werner, ComplexVector, DensityMatrix,
};
use blochsep::tensor::{singular_values, unfold, RealTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Suite = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ROUNDTRIP_PROFILES: [&[usize]; 6] =
    [&[2, 2], &[2, 3], &[2, 2, 2], &[3, 3], &[2, 3, 4], &[2, 2, 2, 2]];

/// Mixed states of full and reduced rank plus a pure state per profile.
fn sample_states(dims: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<DensityMatrix> {
    let d: usize = dims.iter().product();
    (0..count)
        .map(|i| match i % 3 {
            0 => random_density(dims, d, rng).unwrap(),
            1 => random_density(dims, 1 + i % d, rng).unwrap(),
            _ => random_pure_state(dims, rng).unwrap(),
        })
        .collect()
}

/// `‖reconstruct(decompose(ρ)) - ρ‖_F ≤ 1e-10` on every profile.
pub fn bloch_roundtrip(per_profile: usize) -> Suite {
    let mut r = rng(1);
    for dims in ROUNDTRIP_PROFILES {
        for rho in sample_states(dims, per_profile, &mut r) {
            let b = decompose(&rho).map_err(|e| e.to_string())?;
            if b.component_count() != (1 << dims.len()) - 1 {
                return Err(format!("{dims:?}: component count {}", b.component_count()));
            }
            let back = reconstruct(&b).map_err(|e| e.to_string())?;
            let err = (back.matrix() - rho.matrix()).norm();
            if err > 1e-10 {
                return Err(format!("{dims:?}: round-trip error {err:.3e}"));
            }
        }
    }
    Ok(())
}

/// No random separable state is flagged entangled by the full test or by any
/// subset record.
pub fn theorem1_soundness(count: usize) -> Suite {
    let profiles: [&[usize]; 6] = [&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2], &[3, 3, 2], &[2, 3, 2]];
    let mut r = rng(2);
    for i in 0..count {
        let dims = profiles[i % profiles.len()];
        let terms = 1 + r.random_range(0..8);
        let rho = random_separable(dims, terms, &mut r).map_err(|e| e.to_string())?;
        let v = theorem1_check(&rho).map_err(|e| e.to_string())?;
        if v.decision == Decision::Entangled {
            return Err(format!("false Entangled on {dims:?}: norm {} bound {}", v.norm, v.bound));
        }
        let scan = subset_scan(&rho, &SubsetSelection::All).map_err(|e| e.to_string())?;
        if let Some(rec) = scan.records.iter().find(|rec| rec.verdict.norm > rec.verdict.bound + 1e-9) {
            return Err(format!("subset {:?} exceeds its bound on {dims:?}", rec.subset));
        }
    }
    Ok(())
}

fn spectra(b: &BlochData) -> Vec<f64> {
    let mut out: Vec<f64> = b.singles().values().map(|s| s.norm()).collect();
    for t in b.tensors().values() {
        for n in 0..t.order() {
            out.extend_from_slice(singular_values(&unfold(t, n).unwrap()).unwrap().values());
        }
    }
    out
}

/// Random local unitaries leave coherence-vector norms, every unfolding
/// spectrum and the full-tensor verdict unchanged.
pub fn local_unitary_invariance(count: usize) -> Suite {
    let profiles: [&[usize]; 4] = [&[2, 2], &[2, 3], &[2, 2, 2], &[3, 3]];
    let mut r = rng(3);
    for i in 0..count {
        let dims = profiles[i % profiles.len()];
        let rho = sample_states(dims, 1 + i % 3, &mut r).pop().unwrap();
        let mut moved = rho.clone();
        for (k, &d) in dims.iter().enumerate() {
            moved = moved.apply_local_unitary(k, &random_unitary(d, &mut r)).map_err(|e| e.to_string())?;
        }
        let a = spectra(&decompose(&rho).map_err(|e| e.to_string())?);
        let b = spectra(&decompose(&moved).map_err(|e| e.to_string())?);
        if let Some((x, y)) = a.iter().zip(&b).find(|(x, y)| (*x - *y).abs() > 1e-8) {
            return Err(format!("{dims:?}: spectrum value {x} moved to {y}"));
        }
        let va = theorem1_check(&rho).map_err(|e| e.to_string())?;
        let vb = theorem1_check(&moved).map_err(|e| e.to_string())?;
        if va.decision != vb.decision || (va.norm - vb.norm).abs() > 1e-8 {
            return Err(format!("{dims:?}: verdict changed {va:?} -> {vb:?}"));
        }
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Average of `t` over all index permutations.
pub fn symmetrize(t: &RealTensor) -> RealTensor {
    let perms = permutations(t.order());
    let mut acc = RealTensor::zeros(t.shape().to_vec()).unwrap();
    for p in &perms {
        acc = acc.add(&t.permuted(p).unwrap()).unwrap();
    }
    acc.scaled(1.0 / perms.len() as f64)
}

/// Random ket projected on the symmetric subspace of `n` qudits.
fn symmetric_state(n: usize, d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dims = vec![d; n];
    let psi = blochsep::random::random_ket(d.pow(n as u32), rng);
    let mut sym = ComplexVector::zeros(psi.len());
    let mut levels = vec![0; n];
    let perms = permutations(n);
    for idx in 0..psi.len() {
        let mut rest = idx;
        for k in (0..n).rev() {
            levels[k] = rest % d;
            rest /= d;
        }
        for p in &perms {
            let moved: Vec<usize> = p.iter().map(|&k| levels[k]).collect();
            sym[composite_index(&dims, &moved)] += psi[idx];
        }
    }
    DensityMatrix::from_pure(dims, &sym).unwrap()
}

fn check_spectra_equal(t: &RealTensor, label: &str) -> Suite {
    if !t.is_supersymmetric() {
        return Err(format!("{label}: tensor not supersymmetric"));
    }
    let first = singular_values(&unfold(t, 0).unwrap()).unwrap();
    for n in 1..t.order() {
        let s = singular_values(&unfold(t, n).unwrap()).unwrap();
        let len = first.values().len().max(s.values().len());
        let (a, b) = (first.padded(len), s.padded(len));
        if let Some((x, y)) = a.iter().zip(&b).find(|(x, y)| (*x - *y).abs() > 1e-8) {
            return Err(format!("{label}: mode {n} value {y} vs mode 0 value {x}"));
        }
    }
    Ok(())
}

/// Supersymmetric tensors have one singular spectrum across all unfoldings:
/// symmetrized random tensors, symmetric-subspace states and the noisy GHZ
/// and W families.
pub fn supersymmetric_spectra(count: usize) -> Suite {
    let mut r = rng(4);
    for i in 0..count {
        let (order, len) = [(3, 3), (3, 8), (4, 3), (3, 4)][i % 4];
        let raw = RealTensor::from_fn(vec![len; order], |_| r.random_range(-1.0..1.0)).unwrap();
        check_spectra_equal(&symmetrize(&raw), &format!("random order {order}"))?;
        let (n, d) = [(3, 2), (4, 2), (3, 3)][i % 3];
        let rho = symmetric_state(n, d, &mut r);
        let b = decompose(&rho).map_err(|e| e.to_string())?;
        check_spectra_equal(b.full_tensor().unwrap(), &format!("symmetric state {n}x{d}"))?;
    }
    for n in 3..=5 {
        let p = 0.37;
        for rho in [noisy(&ghz(n, 2).unwrap(), p).unwrap(), noisy(&w_state(n).unwrap(), p).unwrap()] {
            let b = decompose(&rho).map_err(|e| e.to_string())?;
            check_spectra_equal(b.full_tensor().unwrap(), &format!("noisy family N={n}"))?;
        }
    }
    Ok(())
}

/// Random Bloch data that Prop 2 accepts: random coherence vectors, random
/// pair tensors (always SVD-decomposable) and diagonal higher tensors, scaled
/// so the left-hand side is `target`.
pub fn random_prop2_state(dims: &[usize], target: f64, rng: &mut ChaCha8Rng) -> DensityMatrix {
    use nalgebra::DVector;
    let mut b = BlochData::zero(dims).unwrap();
    let coef = |d: usize| (2.0 * (d as f64 - 1.0) / d as f64).sqrt();
    let mut lhs = 0.0;
    for (k, &d) in dims.iter().enumerate() {
        if rng.random_bool(0.25) {
            continue;
        }
        let v = DVector::from_fn(d * d - 1, |_, _| rng.random_range(-1.0..1.0));
        lhs += coef(d) * v.norm();
        *b.single_mut(k).unwrap() = v;
    }
    for subset in correlation_subsets(dims.len()) {
        if rng.random_bool(0.3) {
            continue;
        }
        let c: f64 = subset.iter().map(|&k| coef(dims[k])).product();
        let t = b.tensor_mut(&subset).unwrap();
        if subset.len() == 2 {
            for x in t.data_mut() {
                *x = rng.random_range(-1.0..1.0);
            }
            let m = unfold(t, 0).unwrap();
            lhs += c * singular_values(&m).unwrap().sum();
        } else {
            let n = *t.shape().iter().min().unwrap();
            for i in 0..n {
                if rng.random_bool(0.5) {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    t.set(&vec![i; subset.len()], v);
                    lhs += c * v.abs();
                }
            }
        }
    }
    if lhs > 0.0 {
        let s = target / lhs;
        let singles: Vec<usize> = b.singles().keys().copied().collect();
        for k in singles {
            *b.single_mut(k).unwrap() *= s;
        }
        let subsets: Vec<Vec<usize>> = b.tensors().keys().cloned().collect();
        for subset in subsets {
            let t = b.tensor_mut(&subset).unwrap();
            for x in t.data_mut() {
                *x *= s;
            }
        }
    }
    reconstruct(&b).expect("Prop 2 data describe a separable state")
}

/// Every emitted decomposition reproduces its state to `1e-9`, has weights
/// summing to 1 within `1e-10`, and only PSD factor states inside the inball.
pub fn decomposition_reconstruction(count: usize) -> Suite {
    let profiles: [&[usize]; 5] = [&[2, 2], &[2, 3], &[2, 2, 2], &[3, 3], &[2, 3, 2]];
    let mut r = rng(5);
    let mut states: Vec<DensityMatrix> = (0..count)
        .map(|i| {
            let dims = profiles[i % profiles.len()];
            let target = r.random_range(0.0..1.0);
            random_prop2_state(dims, target, &mut r)
        })
        .collect();
    for i in 0..=10 {
        states.push(werner(i as f64 / 30.0).unwrap());
    }
    for rho in &states {
        let d = build_separable_decomposition(rho).map_err(|e| e.to_string())?;
        let check = d.verify(rho).map_err(|e| e.to_string())?;
        if !check.passes() {
            return Err(format!("{:?}: {check:?}", rho.dims()));
        }
    }
    Ok(())
}
