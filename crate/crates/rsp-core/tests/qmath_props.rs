//! Distance/entropy inequalities as property tests over seeded random
//! states.

use proptest::prelude::*;
use rsp_core::linalg::CMat;
use rsp_core::qmath::{fidelity, trace_distance, von_neumann_entropy, DensityOperator, PureState};
use rsp_core::sampling::{haar_unitary, Rng};

fn random_density(d: usize, rng: &mut Rng) -> DensityOperator {
    let weights = rng.simplex_uniform(d);
    let u = haar_unitary(d, rng);
    let mut mat = CMat::zeros(d, d);
    for (k, &w) in weights.iter().enumerate() {
        let col: Vec<_> = (0..d).map(|r| u.matrix()[(r, k)]).collect();
        mat.add_assign_scaled(&CMat::outer(&col, &col), w);
    }
    DensityOperator::new(mat.hermitize()).expect("density")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// trace_distance(ρ,σ) ≤ √(1 − fidelity(ρ,σ)) + 1e-9
    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = Rng::with_stream(seed, 1);
        let rho = random_density(d, &mut rng);
        let sigma = random_density(d, &mut rng);
        let t = trace_distance(&rho, &sigma).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!(t <= (1.0 - f).max(0.0).sqrt() + 1e-9, "T={t} F={f}");
        // Pure pairs hit the bound with equality.
        let psi = rng.pure_state(d).density();
        let phi = rng.pure_state(d).density();
        let tp = trace_distance(&psi, &phi).unwrap();
        let fp = fidelity(&psi, &phi).unwrap();
        prop_assert!((tp - (1.0 - fp).max(0.0).sqrt()).abs() <= 1e-9);
    }

    /// |S(ρ) − S(σ)| ≤ −2T·log₂(2T/D) + 1e-6 for T ≤ ½ (the safe doubled
    /// form of the normalized distance).
    #[test]
    fn fannes_doubled_form(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = Rng::with_stream(seed, 2);
        let rho = random_density(d, &mut rng);
        // A nearby state: mix toward another random state.
        let lambda = 0.2 * rng.uniform();
        let other = random_density(d, &mut rng);
        let sigma = DensityOperator::mixture(&[(1.0 - lambda, rho.clone()), (lambda, other)])
            .unwrap();
        let t = trace_distance(&rho, &sigma).unwrap();
        prop_assume!(t > 1e-12 && t <= 0.5);
        let gap = (von_neumann_entropy(&rho) - von_neumann_entropy(&sigma)).abs();
        let bound = -2.0 * t * (2.0 * t / d as f64).log2();
        prop_assert!(gap <= bound + 1e-6, "gap={gap} bound={bound} T={t}");
    }

    /// S(UρU†) = S(ρ) within 1e-9.
    #[test]
    fn entropy_unitary_invariance(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = Rng::with_stream(seed, 3);
        let rho = random_density(d, &mut rng);
        let u = haar_unitary(d, &mut rng);
        let rotated = rho.conjugated(&u);
        prop_assert!(
            (von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() <= 1e-9
        );
    }

    /// F(ψ, Σ p_i ρ_i) = Σ p_i F(ψ, ρ_i) within 1e-9 for pure targets.
    #[test]
    fn fidelity_bilinear_in_mixtures(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = Rng::with_stream(seed, 4);
        let psi = rng.pure_state(d).density();
        let weights = rng.simplex_uniform(3);
        let parts: Vec<(f64, DensityOperator)> =
            weights.iter().map(|&w| (w, random_density(d, &mut rng))).collect();
        let mixed = DensityOperator::mixture(&parts).unwrap();
        let lhs = fidelity(&psi, &mixed).unwrap();
        let rhs: f64 =
            parts.iter().map(|(w, rho)| w * fidelity(&psi, rho).unwrap()).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9, "lhs={lhs} rhs={rhs}");
    }

    /// Strong subadditivity via the mutual-information forms: both are
    /// ≥ −1e-9 on random tripartite classical-quantum states.
    #[test]
    fn mutual_info_nonnegative(seed in any::<u64>()) {
        let mut rng = Rng::with_stream(seed, 5);
        let ens = rsp_core::tradeoff::zero_plus_ensemble();
        let rows = vec![rng.simplex_uniform(3), rng.simplex_uniform(3)];
        let ch = rsp_core::tradeoff::ClassicalChannel::new(rows).unwrap();
        let omega = rsp_core::tradeoff::assemble_omega(&ens, &ch).unwrap();
        prop_assert!(omega.mutual_info(&["A"], &["C"]).unwrap() >= -1e-9);
        prop_assert!(omega.cond_mutual_info(&["A"], &["B"], &["C"]).unwrap() >= -1e-9);
    }
}

#[test]
fn pure_state_json_round_trip_is_exact() {
    let mut rng = Rng::new(9);
    for d in [2usize, 3, 5] {
        let psi = rng.pure_state(d);
        let json = serde_json::to_string(&rsp_core::qmath::StateJson::from_pure(&psi)).unwrap();
        let back: rsp_core::qmath::StateJson = serde_json::from_str(&json).unwrap();
        let psi2 = back.to_pure().unwrap();
        for (a, b) in psi.amplitudes().iter().zip(psi2.amplitudes()) {
            assert_eq!(
                (a.re.to_bits(), a.im.to_bits()),
                (b.re.to_bits(), b.im.to_bits())
            );
        }
    }
}
