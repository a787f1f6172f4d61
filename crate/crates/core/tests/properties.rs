mod common;

use blochsep::bloch::{
    ball_radii, bloch_vector, correlation_subsets, correlation_tensor, decompose, local_operator,
};
use blochsep::criteria::{
    factor_pure, prop2_check, pure_product_check, subset_scan, theorem1_check, Decision,
    SubsetSelection,
};
use blochsep::random::{random_density, random_ket, random_product_state, random_pure_state};
use blochsep::states::{
    ghz, hermitian_eigenvalues, noisy, psi_234, w_state, DensityMatrix,
};
use blochsep::su_basis::{structure_constants, GeneratorBasis};
use blochsep::tensor::{outer_product, singular_values, tensor_kyfan, RealTensor};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn roundtrip_six_profiles() {
    common::bloch_roundtrip(20).unwrap();
}

#[test]
fn theorem1_sound_on_500_separable_states() {
    common::theorem1_soundness(500).unwrap();
}

#[test]
fn local_unitary_norm_invariance() {
    common::local_unitary_invariance(60).unwrap();
}

#[test]
fn supersymmetric_unfolding_spectra() {
    common::supersymmetric_spectra(24).unwrap();
}

#[test]
fn decompositions_reconstruct() {
    common::decomposition_reconstruction(120).unwrap();
}

#[test]
fn marginal_consistency() {
    let mut r = common::rng(10);
    for dims in [vec![2, 3, 2], vec![2, 2, 2, 2], vec![3, 2, 2]] {
        let d: usize = dims.iter().product();
        let rho = random_density(&dims, d, &mut r).unwrap();
        for s in correlation_subsets(dims.len()) {
            let direct = correlation_tensor(&rho, &s).unwrap();
            let reduced = rho.partial_trace(&s).unwrap();
            let all: Vec<usize> = (0..s.len()).collect();
            let via = correlation_tensor(&reduced, &all).unwrap();
            assert!(direct.sub(&via).unwrap().frobenius() <= 1e-10);
        }
    }
}

#[test]
fn pure_products_are_outer_products() {
    let mut r = common::rng(11);
    for dims in [vec![2, 2, 2], vec![2, 3], vec![3, 2, 2]] {
        let rho = random_product_state(&dims, &mut r).unwrap();
        let b = decompose(&rho).unwrap();
        for (s, t) in b.tensors() {
            let vs: Vec<DVector<f64>> = s.iter().map(|k| b.single(*k).unwrap().clone()).collect();
            assert!(t.sub(&outer_product(&vs).unwrap()).unwrap().frobenius() <= 1e-9);
        }
    }
    let b = decompose(&ghz(3, 2).unwrap()).unwrap();
    let vs: Vec<DVector<f64>> = b.singles().values().cloned().collect();
    let gap = b.full_tensor().unwrap().sub(&outer_product(&vs).unwrap()).unwrap().frobenius();
    assert!(gap >= 1.0);
}

#[test]
fn pure_state_coherence_relations_on_100_states() {
    let mut r = common::rng(12);
    for i in 0..100 {
        let d = 2 + i % 4;
        let rho = DensityMatrix::from_pure(vec![d], &random_ket(d, &mut r)).unwrap();
        let s = bloch_vector(&rho, 0).unwrap();
        let (_, big) = ball_radii(d).unwrap();
        assert!((s.norm() - big).abs() <= 1e-10, "d={d}");
        let g = structure_constants(&GeneratorBasis::new(d).unwrap());
        let lhs = g.contract_symmetric(s.as_slice());
        for (k, v) in lhs.iter().enumerate() {
            assert!((v - (d as f64 - 2.0) * s[k]).abs() <= 1e-9, "d={d} k={k}");
        }
    }
}

#[test]
fn inball_vectors_give_states() {
    let mut r = common::rng(13);
    for d in 2..=4 {
        let basis = GeneratorBasis::new(d).unwrap();
        let (radius, _) = ball_radii(d).unwrap();
        for _ in 0..200 {
            let v = DVector::from_fn(d * d - 1, |_, _| r.random_range(-1.0..1.0));
            let scale = radius * r.random_range(0.0..=1.0) / v.norm();
            let m = local_operator(&basis, &(v * scale)).unwrap();
            assert!(hermitian_eigenvalues(&m)[0] >= -1e-12);
        }
    }
}

#[test]
fn noisy_families_are_affine_in_p() {
    for psi in [ghz(3, 2).unwrap(), w_state(4).unwrap(), psi_234().unwrap(), ghz(3, 3).unwrap()] {
        let base = theorem1_check(&psi).unwrap().norm;
        for p in [0.05, 0.3, 0.61, 0.999] {
            let v = theorem1_check(&noisy(&psi, p).unwrap()).unwrap();
            assert!((v.norm - p * base).abs() <= 1e-10);
        }
    }
}

#[test]
fn prop2_never_contradicts_theorem1() {
    let mut r = common::rng(14);
    let mut states: Vec<DensityMatrix> = (0..80)
        .map(|i| {
            let dims = [vec![2, 2], vec![2, 3], vec![2, 2, 2]][i % 3].clone();
            let d: usize = dims.iter().product();
            random_density(&dims, 1 + i % d, &mut r).unwrap()
        })
        .collect();
    for i in 0..30 {
        let target = r.random_range(0.0..1.0);
        states.push(common::random_prop2_state(&[2, 2, 2], target, &mut r));
        let _ = i;
    }
    for rho in &states {
        if prop2_check(rho).unwrap().decision == Decision::Separable {
            let scan = subset_scan(rho, &SubsetSelection::All).unwrap();
            assert!(scan.records.iter().all(|rec| rec.verdict.decision != Decision::Entangled));
        }
    }
}

#[test]
fn pure_product_chain() {
    let mut r = common::rng(15);
    for i in 0..30 {
        let dims = [vec![2, 2, 2], vec![2, 3], vec![2, 2, 3]][i % 3].clone();
        let rho = if i % 2 == 0 {
            random_product_state(&dims, &mut r).unwrap()
        } else {
            random_pure_state(&dims, &mut r).unwrap()
        };
        let product = pure_product_check(&rho).unwrap();
        let singletons = factor_pure(&rho).unwrap().iter().all(|b| b.len() == 1);
        let b = decompose(&rho).unwrap();
        let norm = tensor_kyfan(b.full_tensor().unwrap()).unwrap();
        let prod_norms: f64 = b.singles().values().map(|s| s.norm()).product();
        let equal = (norm - prod_norms).abs() <= 1e-8;
        assert_eq!(product, singletons, "i={i}");
        assert_eq!(product, equal, "i={i}");
        assert_eq!(product, i % 2 == 0, "i={i}");
    }
}

#[test]
fn singular_value_energy_on_500_matrices() {
    let mut r = common::rng(16);
    for _ in 0..500 {
        let rows = r.random_range(1..=27);
        let cols = r.random_range(1..=81);
        let m = DMatrix::from_fn(rows, cols, |_, _| r.random_range(-2.0..2.0));
        let s = singular_values(&m).unwrap();
        let energy: f64 = s.values().iter().map(|x| x * x).sum();
        let fro = m.norm_squared();
        assert!((energy - fro).abs() <= 1e-10 * fro.max(1.0));
    }
}

fn tensor_strategy() -> impl Strategy<Value = RealTensor> {
    prop::collection::vec(2usize..=4, 2..=4).prop_flat_map(|shape| {
        let n: usize = shape.iter().product();
        prop::collection::vec(-3.0f64..3.0, n)
            .prop_map(move |data| RealTensor::new(shape.clone(), data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kyfan_is_homogeneous(t in tensor_strategy(), a in -5.0f64..5.0) {
        let lhs = tensor_kyfan(&t.scaled(a)).unwrap();
        let rhs = a.abs() * tensor_kyfan(&t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn kyfan_triangle_inequality(t in tensor_strategy(), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let u = RealTensor::from_fn(t.shape().to_vec(), |_| r.random_range(-3.0..3.0)).unwrap();
        let sum = tensor_kyfan(&t.add(&u).unwrap()).unwrap();
        prop_assert!(sum <= tensor_kyfan(&t).unwrap() + tensor_kyfan(&u).unwrap() + 1e-9);
    }

    #[test]
    fn fold_inverts_unfold(t in tensor_strategy()) {
        for n in 0..t.order() {
            let m = t.unfold(n).unwrap();
            prop_assert_eq!(&RealTensor::fold(&m, t.shape().to_vec(), n).unwrap(), &t);
        }
    }

    #[test]
    fn roundtrip_random_qubit_triples(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let rho = random_density(&[2, 2, 2], 8, &mut r).unwrap();
        let back = blochsep::bloch::reconstruct(&decompose(&rho).unwrap()).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).norm() <= 1e-10);
    }

    #[test]
    fn mixing_scales_every_component(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut r = common::rng(seed);
        let psi = random_pure_state(&[2, 3], &mut r).unwrap();
        let a = decompose(&psi).unwrap();
        let b = decompose(&noisy(&psi, p).unwrap()).unwrap();
        for (k, s) in a.singles() {
            prop_assert!((b.single(*k).unwrap() - s * p).norm() <= 1e-10);
        }
        let t = a.tensor(&[0, 1]).unwrap().scaled(p);
        prop_assert!(b.tensor(&[0, 1]).unwrap().sub(&t).unwrap().frobenius() <= 1e-10);
    }
}
