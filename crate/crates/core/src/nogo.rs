//! Classical-mediator no-go check.
//!
//! Three qubits: system 1, the mediating bit, system 3. The bit couples only
//! through `σ_z` and `I`, so `σ_z` on the bit is conserved and, once coherences
//! of the bit are discarded, the two outer qubits stay separable.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{
    identity, max_hermitian_deviation, min_partial_transpose_eigenvalue, negativity,
    partial_trace, pauli_x, pauli_z, Bipartition, CMatrix, DensityMatrix, Propagator, PureState,
};

pub const BLOCK_HERMITIAN_TOL: f64 = 1e-12;
pub const SEPARABILITY_TOL: f64 = 1e-10;
pub const DRIFT_TOL: f64 = 1e-10;
pub const TIME_SAMPLES: usize = 16;
pub const T_MAX: f64 = 10.0;

const BIT: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonianSpec {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl LocalHamiltonianSpec {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let spec = LocalHamiltonianSpec { a, b, c, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn zero() -> Self {
        let z = CMatrix::zeros(2, 2);
        LocalHamiltonianSpec {
            a: z.clone(),
            b: z.clone(),
            c: z.clone(),
            d: z,
        }
    }

    /// GUE blocks, each scaled to unit spectral norm.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut block = || random_unit_hermitian(rng);
        LocalHamiltonianSpec {
            a: block(),
            b: block(),
            c: block(),
            d: block(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for m in [&self.a, &self.b, &self.c, &self.d] {
            if m.shape() != (2, 2) {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: m.nrows().max(m.ncols()),
                });
            }
            let dev = max_hermitian_deviation(m);
            if dev > BLOCK_HERMITIAN_TOL {
                return Err(Error::NotHermitian(dev));
            }
        }
        Ok(())
    }

    /// `H₁₂ = A ⊗ I + B ⊗ σ_z` on (system 1, bit).
    pub fn h12(&self) -> CMatrix {
        self.a.kronecker(&identity(2)) + self.b.kronecker(&pauli_z())
    }

    /// `H₂₃ = I ⊗ C + σ_z ⊗ D` on (bit, system 3).
    pub fn h23(&self) -> CMatrix {
        identity(2).kronecker(&self.c) + pauli_z().kronecker(&self.d)
    }
}

fn random_unit_hermitian<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let x = CMatrix::from_fn(2, 2, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&x + x.adjoint()).scale(0.5);
    let norm = spectral_norm(&h);
    if norm > 0.0 {
        h.unscale(norm)
    } else {
        h
    }
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.singular_values().max()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `H = H₁₂ ⊗ I + I ⊗ H₂₃` on dims `[2, 2, 2]`.
pub fn build_hamiltonian(spec: &LocalHamiltonianSpec) -> Result<CMatrix> {
    spec.validate()?;
    let (left, right) = split_hamiltonian(spec);
    Ok(left + right)
}

/// `(H₁₂ ⊗ I, I ⊗ H₂₃)`.
pub fn split_hamiltonian(spec: &LocalHamiltonianSpec) -> (CMatrix, CMatrix) {
    (
        spec.h12().kronecker(&identity(2)),
        identity(2).kronecker(&spec.h23()),
    )
}

/// `I ⊗ σ_z ⊗ I`.
pub fn bit_observable() -> CMatrix {
    identity(2).kronecker(&pauli_z()).kronecker(&identity(2))
}

/// Norms of `[H₁₂⊗I, I⊗H₂₃]` and `[I⊗σ_z⊗I, H]`.
pub fn commutator_norms(spec: &LocalHamiltonianSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let (left, right) = split_hamiltonian(spec);
    let h = &left + &right;
    Ok((
        spectral_norm(&commutator(&left, &right)),
        spectral_norm(&commutator(&bit_observable(), &h)),
    ))
}

/// `‖e^{−iHt} − e^{−i(H₁₂⊗I)t} e^{−i(I⊗H₂₃)t}‖`.
pub fn factorization_error(spec: &LocalHamiltonianSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    let (left, right) = split_hamiltonian(spec);
    let full = Propagator::new(&(&left + &right))?.unitary(t);
    let product = Propagator::new(&left)?.unitary(t) * Propagator::new(&right)?.unitary(t);
    Ok(spectral_norm(&(full - product)))
}

fn require_product(psi0: &PureState) -> Result<()> {
    if psi0.dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: psi0.len(),
        });
    }
    let rho = psi0.to_density();
    for k in 0..3 {
        let purity = partial_trace(&rho, &[k])?.purity();
        if (purity - 1.0).abs() > 1e-10 {
            return Err(Error::NotProductState {
                subsystem: k,
                purity,
            });
        }
    }
    Ok(())
}

fn evolve_dephase_with(prop: &Propagator, psi0: &PureState, t: f64) -> Result<DensityMatrix> {
    let psi = PureState::from_vector(psi0.dims().to_vec(), prop.apply(psi0.amplitudes(), t))?;
    psi.to_density().dephase(BIT)
}

/// Evolves a fully factorized `ψ₀` under `H` for time `t`, then removes the
/// bit's coherences in the `σ_z` basis.
pub fn evolve_and_dephase(
    spec: &LocalHamiltonianSpec,
    psi0: &PureState,
    t: f64,
) -> Result<DensityMatrix> {
    require_product(psi0)?;
    let prop = Propagator::new(&build_hamiltonian(spec)?)?;
    evolve_dephase_with(&prop, psi0, t)
}

fn bit_z(rho: &DensityMatrix) -> Result<f64> {
    Ok(partial_trace(rho, &[BIT])?.expectation(&pauli_z()).re)
}

/// Worst cases from a single random trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub min_pt_eigenvalue: f64,
    pub bit_drift: f64,
    pub split_commutator: f64,
    pub bit_commutator: f64,
    pub factorization_error: f64,
}

pub fn run_trial(spec: &LocalHamiltonianSpec, psi0: &PureState, times: &[f64]) -> Result<TrialOutcome> {
    require_product(psi0)?;
    let h = build_hamiltonian(spec)?;
    let prop = Propagator::new(&h)?;
    let cut = Bipartition::first();
    let z0 = bit_z(&psi0.to_density())?;
    let mut min_pt = f64::INFINITY;
    let mut drift = 0.0f64;
    for &t in times {
        let rho = evolve_dephase_with(&prop, psi0, t)?;
        let outer = partial_trace(&rho, &[0, 2])?;
        min_pt = min_pt.min(min_partial_transpose_eigenvalue(&outer, &cut)?);
        drift = drift.max((bit_z(&rho)? - z0).abs());
    }
    let (split_commutator, bit_commutator) = commutator_norms(spec)?;
    let t_end = times.iter().copied().fold(0.0, f64::max);
    Ok(TrialOutcome {
        min_pt_eigenvalue: min_pt,
        bit_drift: drift,
        split_commutator,
        bit_commutator,
        factorization_error: factorization_error(spec, t_end)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NogoReport {
    pub trials: usize,
    pub seed: u64,
    pub times_per_trial: usize,
    pub worst_min_pt_eigenvalue: f64,
    pub max_bit_drift: f64,
    pub max_split_commutator: f64,
    pub max_bit_commutator: f64,
    pub max_factorization_error: f64,
    pub separability_violations: usize,
    pub drift_violations: usize,
    pub separable: bool,
}

pub fn time_grid() -> Vec<f64> {
    (0..TIME_SAMPLES)
        .map(|k| T_MAX * k as f64 / (TIME_SAMPLES - 1) as f64)
        .collect()
}

fn random_product<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let q = |rng: &mut R| PureState::random(vec![2], rng).expect("qubit dims are valid");
    let a = q(rng);
    let b = q(rng);
    let c = q(rng);
    crate::quantum::tensor(&crate::quantum::tensor(&a, &b), &c)
}

/// Random specs and product states, one independent RNG stream per trial.
pub fn verify_classical_separability(n_trials: usize, seed: u64) -> Result<NogoReport> {
    if n_trials == 0 {
        return Err(Error::param("n_trials", "must be at least 1"));
    }
    let times = time_grid();
    let outcomes: Vec<TrialOutcome> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let spec = LocalHamiltonianSpec::random(&mut rng);
            let psi0 = random_product(&mut rng);
            run_trial(&spec, &psi0, &times)
        })
        .collect::<Result<_>>()?;

    let fold = |f: fn(&TrialOutcome) -> f64| outcomes.iter().map(f).fold(0.0, f64::max);
    let worst_min_pt = outcomes
        .iter()
        .map(|o| o.min_pt_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let separability_violations = outcomes
        .iter()
        .filter(|o| o.min_pt_eigenvalue < -SEPARABILITY_TOL)
        .count();
    let drift_violations = outcomes.iter().filter(|o| o.bit_drift > DRIFT_TOL).count();
    Ok(NogoReport {
        trials: n_trials,
        seed,
        times_per_trial: times.len(),
        worst_min_pt_eigenvalue: worst_min_pt,
        max_bit_drift: fold(|o| o.bit_drift),
        max_split_commutator: fold(|o| o.split_commutator),
        max_bit_commutator: fold(|o| o.bit_commutator),
        max_factorization_error: fold(|o| o.factorization_error),
        separability_violations,
        drift_violations,
        separable: separability_violations == 0,
    })
}

/// `H = (g/2)(σ_z⊗σ_z⊗I + I⊗σ_x⊗σ_z)`: the bit talks to system 3 through
/// `σ_x`, violating the superselection premise.
pub fn counterexample_hamiltonian(g: f64) -> CMatrix {
    let (x, z, i) = (pauli_x(), pauli_z(), identity(2));
    (z.kronecker(&z).kronecker(&i) + i.kronecker(&x).kronecker(&z)).scale(g / 2.0)
}

/// `|+⟩|+i⟩|+⟩`. With the bit in a `σ_z` eigenstate the outer qubits stay
/// separable under this Hamiltonian, so the bit starts in `(|0⟩ + i|1⟩)/√2`.
pub fn counterexample_initial_state() -> PureState {
    let plus = PureState::new(vec![2], vec![C64::new(1.0, 0.0); 2]).expect("nonzero");
    let plus_i =
        PureState::new(vec![2], vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).expect("nonzero");
    crate::quantum::tensor(&crate::quantum::tensor(&plus, &plus_i), &plus)
}

/// Outer-qubit negativity after coherent evolution with the σ_x-coupled bit.
pub fn quantum_counterexample(g: f64, t: f64) -> Result<f64> {
    let psi0 = counterexample_initial_state();
    let prop = Propagator::new(&counterexample_hamiltonian(g))?;
    let psi = PureState::from_vector(vec![2, 2, 2], prop.apply(psi0.amplitudes(), t))?;
    let outer = partial_trace(&psi.to_density(), &[0, 2])?;
    negativity(&outer, &Bipartition::first())
}

/// As [`quantum_counterexample`] but with the bit dephased after each of
/// `steps` equal slices of `t`.
pub fn zeno_counterexample(g: f64, t: f64, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    let u = Propagator::new(&counterexample_hamiltonian(g))?.unitary(t / steps as f64);
    let mut rho = counterexample_initial_state().to_density();
    for _ in 0..steps {
        rho = rho.conjugate_by(&u).dephase(BIT)?;
    }
    negativity(&partial_trace(&rho, &[0, 2])?, &Bipartition::first())
}
