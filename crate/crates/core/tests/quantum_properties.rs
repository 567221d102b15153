use std::f64::consts::SQRT_2;

use gravlab_core::quantum::{
    chsh_horodecki, chsh_max, is_separable_two_qubit, negativity, pure_negativity, schmidt,
    tensor, Bipartition, DensityMatrix, PureState,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_qubit(rng: &mut ChaCha8Rng) -> PureState {
    PureState::random(vec![2], rng).unwrap()
}

fn random_product(rng: &mut ChaCha8Rng) -> PureState {
    tensor(&random_qubit(rng), &random_qubit(rng))
}

/// Schmidt-rank-2 state `cos a |u1 v1⟩ + sin a |u2 v2⟩` with random local bases.
fn random_entangled(rng: &mut ChaCha8Rng) -> PureState {
    let angle: f64 = rng.random_range(0.1..std::f64::consts::FRAC_PI_4);
    let u = random_qubit(rng);
    let v = random_qubit(rng);
    let perp = |s: &PureState| {
        let a = s.amplitudes();
        PureState::new(vec![2], vec![-a[1].conj(), a[0].conj()]).unwrap()
    };
    let first = tensor(&u, &v);
    let second = tensor(&perp(&u), &perp(&v));
    let amps = first.amplitudes().scale(angle.cos()) + second.amplitudes().scale(angle.sin());
    PureState::from_vector(vec![2, 2], amps).unwrap()
}

#[test]
fn ppt_oracle_accepts_products_and_mixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..500 {
        let prod = random_product(&mut rng).to_density();
        assert!(is_separable_two_qubit(&prod).unwrap());

        let k = rng.random_range(2..6);
        let mut weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let parts: Vec<(f64, DensityMatrix)> = weights
            .iter()
            .map(|&w| (w, random_product(&mut rng).to_density()))
            .collect();
        let mix = DensityMatrix::mixture(&parts).unwrap();
        assert!(is_separable_two_qubit(&mix).unwrap());
        assert!(chsh_horodecki(&mix).unwrap() <= 2.0 + 1e-9);
    }
}

#[test]
fn ppt_oracle_rejects_entangled_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    for _ in 0..500 {
        let psi = random_entangled(&mut rng);
        assert_eq!(schmidt(&psi, &Bipartition::first()).unwrap().rank(1e-9), 2);
        assert!(!is_separable_two_qubit(&psi.to_density()).unwrap());
    }
}

#[test]
fn negativity_zero_iff_schmidt_rank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3000);
    let cut = Bipartition::first();
    for k in 0..400 {
        let psi = if k % 2 == 0 {
            random_product(&mut rng)
        } else {
            random_entangled(&mut rng)
        };
        let product = pure_negativity(&psi, &cut).unwrap() <= 1e-9;
        let rank_one = schmidt(&psi, &cut).unwrap().rank(1e-9) == 1;
        assert_eq!(product, rank_one);
    }
}

#[test]
fn chsh_optimizer_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    for _ in 0..40 {
        let rho = PureState::random(vec![2, 2], &mut rng).unwrap().to_density();
        let opt = chsh_max(&rho).unwrap();
        let oracle = chsh_horodecki(&rho).unwrap();
        assert!((opt - oracle).abs() < 1e-6, "{opt} vs {oracle}");
        assert!(opt <= 2.0 * SQRT_2 + 1e-6);
    }
}

#[test]
fn chsh_classical_bound_on_separable_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    for _ in 0..30 {
        let a = random_product(&mut rng).to_density();
        let b = random_product(&mut rng).to_density();
        let mix = DensityMatrix::mixture(&[(0.3, a), (0.7, b)]).unwrap();
        assert!(is_separable_two_qubit(&mix).unwrap());
        assert!(chsh_max(&mix).unwrap() <= 2.0 + 1e-6);
    }
}

#[test]
fn werner_family_thresholds() {
    // p|Φ+⟩⟨Φ+| + (1−p) I/4 is entangled for p > 1/3 and violates CHSH for p > 1/√2
    let bell = PureState::new(
        vec![2, 2],
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    )
    .unwrap()
    .to_density();
    let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
    let werner = |p: f64| DensityMatrix::mixture(&[(p, bell.clone()), (1.0 - p, mixed.clone())]).unwrap();
    assert!(is_separable_two_qubit(&werner(0.33)).unwrap());
    assert!(!is_separable_two_qubit(&werner(0.34)).unwrap());
    let n = negativity(&werner(0.6), &Bipartition::first()).unwrap();
    assert!((n - (3.0 * 0.6 - 1.0) / 4.0).abs() < 1e-12);
    assert!(chsh_max(&werner(0.70)).unwrap() < 2.0);
    assert!(chsh_max(&werner(0.72)).unwrap() > 2.0);
    assert!((chsh_max(&werner(0.9)).unwrap() - 0.9 * 2.0 * SQRT_2).abs() < 1e-6);
}

fn amplitude_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn global_phase_leaves_witnesses_unchanged(amps in amplitude_strategy(), phi in -6.3f64..6.3) {
        let psi = PureState::new(vec![2, 2], amps.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap();
        let rotated = psi.with_global_phase(phi);
        let cut = Bipartition::first();
        prop_assert!((pure_negativity(&psi, &cut).unwrap() - pure_negativity(&rotated, &cut).unwrap()).abs() < 1e-12);
        let s1 = schmidt(&psi, &cut).unwrap().coefficients;
        let s2 = schmidt(&rotated, &cut).unwrap().coefficients;
        for (a, b) in s1.iter().zip(&s2) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let c1 = chsh_max(&psi.to_density()).unwrap();
        let c2 = chsh_max(&rotated.to_density()).unwrap();
        prop_assert!((c1 - c2).abs() < 1e-9);
        prop_assert!(c1 <= 2.0 * SQRT_2 + 1e-6);
    }

    #[test]
    fn schmidt_squares_sum_to_one(amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6)) {
        prop_assume!(amps.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        let psi = PureState::new(vec![2, 3], amps.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap();
        let s = schmidt(&psi, &Bipartition::first()).unwrap();
        prop_assert!((s.coefficients.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
