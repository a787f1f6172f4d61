//! Named states and noisy families.
//!
//! Kets written with 1-based labels such as `|112⟩` map to 0-based levels by
//! subtracting one from every digit, so `|112⟩` is levels `(0, 0, 1)`.

use num_complex::Complex64;

use super::{composite_index, identity, kron, ComplexMatrix, ComplexVector, DensityMatrix};
use crate::{Error, Result};

fn basis_ket(dims: &[usize], levels: &[usize]) -> ComplexVector {
    let mut v = ComplexVector::zeros(dims.iter().product());
    v[composite_index(dims, levels)] = Complex64::new(1.0, 0.0);
    v
}

fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mixing parameter p = {p} outside [0, 1]")))
    }
}

pub fn maximally_mixed(dims: &[usize]) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    DensityMatrix::new(dims.to_vec(), identity(d) * real(1.0 / d as f64))
}

fn ghz_vector(parties: usize, levels: usize) -> ComplexVector {
    let dims = vec![levels; parties];
    let mut v = ComplexVector::zeros(dims.iter().product());
    for k in 0..levels {
        v[composite_index(&dims, &vec![k; parties])] = real(1.0 / (levels as f64).sqrt());
    }
    v
}

/// `(1/√d) Σ_k |k k … k⟩` on `parties` subsystems of dimension `levels`.
pub fn ghz(parties: usize, levels: usize) -> Result<DensityMatrix> {
    if parties < 2 || levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "GHZ needs N >= 2 and d >= 2, got N = {parties}, d = {levels}"
        )));
    }
    DensityMatrix::new(vec![levels; parties], projector(&ghz_vector(parties, levels)))
}

fn w_vector(parties: usize) -> ComplexVector {
    let dims = vec![2; parties];
    let mut v = ComplexVector::zeros(1 << parties);
    for k in 0..parties {
        let mut levels = vec![0; parties];
        levels[k] = 1;
        v[composite_index(&dims, &levels)] = real(1.0 / (parties as f64).sqrt());
    }
    v
}

/// `(1/√N) Σ_k |0…1_k…0⟩`.
pub fn w_state(parties: usize) -> Result<DensityMatrix> {
    if parties < 2 {
        return Err(Error::InvalidParameter(format!("W state needs N >= 2, got {parties}")));
    }
    DensityMatrix::new(vec![2; parties], projector(&w_vector(parties)))
}

/// `(1-p)/D · I + p ψ` for a pure `ψ`.
pub fn noisy(psi: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    if !psi.is_pure() {
        return Err(Error::Precondition(format!(
            "noisy() needs a pure state, purity is {:.12}",
            psi.purity()
        )));
    }
    let d = psi.size();
    let m = identity(d) * real((1.0 - p) / d as f64) + psi.matrix() * real(p);
    DensityMatrix::new(psi.dims().to_vec(), m)
}

/// The `N-n` qubit marginal of noisy `W_N` after discarding `n` qubits:
/// `(1-p)/2^(N-n) I + (n/N) p |0…0⟩⟨0…0| + ((N-n)/N) p |W_(N-n)⟩⟨W_(N-n)|`.
pub fn reduced_w_noisy(parties: usize, removed: usize, p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    if removed < 1 || removed >= parties {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= n < N, got N = {parties}, n = {removed}"
        )));
    }
    let m = parties - removed;
    let dim = 1usize << m;
    let dims = vec![2; m];
    let zero = projector(&basis_ket(&dims, &vec![0; m]));
    let w = projector(&w_vector(m));
    let nn = parties as f64;
    let mat = identity(dim) * real((1.0 - p) / dim as f64)
        + zero * real(removed as f64 / nn * p)
        + w * real(m as f64 / nn * p);
    DensityMatrix::new(dims, mat)
}

/// Bell vectors in the order Φ+, Φ−, Ψ+, Ψ−.
fn bell_vectors() -> [ComplexVector; 4] {
    let s = 0.5f64.sqrt();
    let v = |a: f64, b: f64, c: f64, d: f64| {
        ComplexVector::from_vec(vec![real(a), real(b), real(c), real(d)])
    };
    [v(s, 0., 0., s), v(s, 0., 0., -s), v(0., s, s, 0.), v(0., s, -s, 0.)]
}

/// Four-qubit unlockable bound entangled state
/// `(1/4) Σ_i |ψ_i⟩⟨ψ_i|_AB ⊗ |ψ_i⟩⟨ψ_i|_CD` over the four Bell states.
pub fn smolin() -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(16, 16);
    for b in bell_vectors() {
        let p = projector(&b);
        m += kron(&p, &p) * real(0.25);
    }
    DensityMatrix::new(vec![2; 4], m)
}

/// Four-qubit bound entangled state
/// `(1/5)(|GHZ_4⟩⟨GHZ_4| + (1/2) Σ_i (P_i + P̄_i))`, where `P_i` projects on
/// `|1⟩` at party `i` and `|0⟩` elsewhere and `P̄_i` flips every bit.
pub fn duer_be4() -> Result<DensityMatrix> {
    let dims = [2; 4];
    let mut m = projector(&ghz_vector(4, 2));
    for i in 0..4 {
        let mut levels = [0; 4];
        levels[i] = 1;
        let flipped: Vec<usize> = levels.iter().map(|l| 1 - l).collect();
        m += projector(&basis_ket(&dims, &levels)) * real(0.5);
        m += projector(&basis_ket(&dims, &flipped)) * real(0.5);
    }
    DensityMatrix::new(dims.to_vec(), m * real(0.2))
}

/// `(1/2)(|112⟩ + |123⟩ + |214⟩ + |234⟩)` in dimensions (2, 3, 4).
pub fn psi_234() -> Result<DensityMatrix> {
    let dims = [2, 3, 4];
    let mut v = ComplexVector::zeros(24);
    for labels in [[1, 1, 2], [1, 2, 3], [2, 1, 4], [2, 3, 4]] {
        let levels: Vec<usize> = labels.iter().map(|l| l - 1).collect();
        v[composite_index(&dims, &levels)] = real(0.5);
    }
    DensityMatrix::new(dims.to_vec(), projector(&v))
}

/// Two-qubit Werner state `(1-p) I/4 + p |Φ+⟩⟨Φ+|`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    let phi = DensityMatrix::new(vec![2, 2], projector(&bell_vectors()[0]))?;
    noisy(&phi, p)
}

/// Serializable description of a zoo state.
#[derive(Debug, Clone, PartialEq)]
pub enum ZooSpec {
    MaximallyMixed { dims: Vec<usize> },
    Ghz { parties: usize, levels: usize },
    GhzNoisy { parties: usize, levels: usize, p: f64 },
    W { parties: usize },
    WNoisy { parties: usize, p: f64 },
    ReducedWNoisy { parties: usize, removed: usize, p: f64 },
    Smolin,
    DuerBe4,
    Psi234,
    Psi234Noisy { p: f64 },
    Werner { p: f64 },
}

impl ZooSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            Self::MaximallyMixed { dims } => maximally_mixed(dims),
            Self::Ghz { parties, levels } => ghz(*parties, *levels),
            Self::GhzNoisy { parties, levels, p } => noisy(&ghz(*parties, *levels)?, *p),
            Self::W { parties } => w_state(*parties),
            Self::WNoisy { parties, p } => noisy(&w_state(*parties)?, *p),
            Self::ReducedWNoisy { parties, removed, p } => reduced_w_noisy(*parties, *removed, *p),
            Self::Smolin => smolin(),
            Self::DuerBe4 => duer_be4(),
            Self::Psi234 => psi_234(),
            Self::Psi234Noisy { p } => noisy(&psi_234()?, *p),
            Self::Werner { p } => werner(*p),
        }
    }

    /// Canonical family name.
    pub fn family(&self) -> &'static str {
        match self {
            Self::MaximallyMixed { .. } => "mixed",
            Self::Ghz { .. } => "ghz",
            Self::GhzNoisy { .. } => "ghz-noisy",
            Self::W { .. } => "w",
            Self::WNoisy { .. } => "w-noisy",
            Self::ReducedWNoisy { .. } => "reduced-w-noisy",
            Self::Smolin => "smolin",
            Self::DuerBe4 => "duer4",
            Self::Psi234 => "psi-234",
            Self::Psi234Noisy { .. } => "state-234-noisy",
            Self::Werner { .. } => "werner",
        }
    }

    /// The mixing parameter of a noisy family.
    pub fn p(&self) -> Option<f64> {
        match self {
            Self::GhzNoisy { p, .. }
            | Self::WNoisy { p, .. }
            | Self::ReducedWNoisy { p, .. }
            | Self::Psi234Noisy { p }
            | Self::Werner { p } => Some(*p),
            _ => None,
        }
    }

    /// Same family with the mixing parameter replaced; `None` for fixed
    /// states.
    pub fn with_p(&self, p: f64) -> Option<Self> {
        let mut out = self.clone();
        match &mut out {
            Self::GhzNoisy { p: q, .. }
            | Self::WNoisy { p: q, .. }
            | Self::ReducedWNoisy { p: q, .. }
            | Self::Psi234Noisy { p: q }
            | Self::Werner { p: q } => *q = p,
            _ => return None,
        }
        Some(out)
    }
}
