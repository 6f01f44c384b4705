//! Protocol-level invariants: no-signaling, message uniformity, resource
//! accounting, covering rates, and the entangled round.

use rsp_core::protocols::{
    entangled_rsp_round, net_only_protocol, ColumnRunner, EntangledParams, Message, PiRunner,
};
use rsp_core::qmath::{max_entangled, PureState};
use rsp_core::randomize::{epsilon_net, weyl_set, Provenance, UnitarySet};
use rsp_core::sampling::Rng;
use rsp_core::stats::{binomial_sigma, chi2_quantile, chi2_uniform};
use rsp_core::tradeoff::BipartiteEnsemble;

/// The no-signaling chain of the causality argument: with the forward
/// message replaced by a uniform guess, the decode-success frequency sits
/// between F̂/K − 4σ and 1/D + 4σ, which is the inequality 1/D ≥ F/K,
/// i.e. K ≥ FD.
#[test]
fn causality_guess_chain() {
    for d in [2usize, 4] {
        let set = weyl_set(d);
        let k = set.len();
        let trials = 20_000usize;
        let mut rng = Rng::with_stream(31, d as u64);
        let mut correct = 0usize;
        let mut fidelity_acc = 0.0;
        for _ in 0..trials {
            let j = rng.below(d);
            let psi = PureState::basis(d, j);
            let runner = PiRunner::new(&psi, &set).expect("runner");
            // Honest protocol fidelity estimate rides along.
            let t = runner.run(&mut rng);
            fidelity_acc += t.fidelity_to_target;
            // No-communication variant: the receiver guesses the message.
            let actual = match runner.sample_message(&mut rng) {
                Message::Value(i) => i,
                Message::Failure => continue,
            };
            let guess = rng.below(k);
            let decode = set.unitaries()[guess].transpose();
            let state = runner.pre_decode(actual).conjugated(&decode);
            let p_correct = state.matrix()[(j, j)].re.clamp(0.0, 1.0);
            if rng.uniform() < p_correct {
                correct += 1;
            }
        }
        let freq = correct as f64 / trials as f64;
        let f_hat = fidelity_acc / trials as f64;
        let upper = 1.0 / d as f64 + 4.0 * binomial_sigma(1.0 / d as f64, trials);
        let lower = f_hat / k as f64 - 4.0 * binomial_sigma(f_hat / k as f64, trials);
        assert!(
            freq <= upper,
            "D={d}: guess success {freq} above 1/D bound {upper}"
        );
        assert!(
            freq >= lower,
            "D={d}: guess success {freq} below F/K bound {lower}"
        );
    }
}

/// Conditional on success, the announced message is uniform over the K
/// outcomes (χ² at the 1% level).
#[test]
fn pi_message_uniformity_chi2() {
    for d in [2usize, 4] {
        let set = weyl_set(d);
        let k = set.len();
        let mut rng = Rng::with_stream(37, d as u64);
        let psi = rng.pure_state(d);
        let runner = PiRunner::new(&psi, &set).expect("runner");
        let trials = 20_000usize;
        let mut counts = vec![0u64; k];
        for _ in 0..trials {
            if let Message::Value(i) = runner.sample_message(&mut rng) {
                counts[i] += 1;
            }
        }
        let stat = chi2_uniform(&counts);
        let crit = chi2_quantile(k - 1, 0.01);
        assert!(
            stat <= crit,
            "D={d}: χ² = {stat:.2} over critical {crit:.2}"
        );
    }
}

/// Resource fields depend on protocol parameters only, never on outcomes.
#[test]
fn resource_accounting_is_outcome_free() {
    let set = weyl_set(2);
    let lifted = UnitarySet::new(2, 0.5, set.unitaries().to_vec(), Provenance::Explicit).unwrap();
    let mut rng = Rng::with_stream(41, 0);
    let psi = rng.pure_state(2);
    let runner = PiRunner::new(&psi, &lifted).expect("runner");
    let column = ColumnRunner::new(&psi, 2, 3).expect("runner");
    let mut seen_failure = false;
    let mut seen_success = false;
    for _ in 0..400 {
        let t = runner.run(&mut rng);
        assert_eq!(t.cbits_sent, 5f64.log2());
        assert_eq!(t.ebits_consumed, 1.0);
        if t.success {
            seen_success = true;
        } else {
            seen_failure = true;
            assert_eq!(t.message, Message::Failure);
        }
        let c = column.run(&mut rng);
        assert_eq!(c.cbits_sent, 3f64.log2());
        assert_eq!(c.ebits_consumed, 3.0);
    }
    assert!(
        seen_success && seen_failure,
        "both branches should occur at ε = 0.5"
    );
}

/// Net-only protocol: zero ebits, the dichotomy cbit budget, and a
/// ≥ 99.9% covering rate at ε′ = 0.06.
#[test]
fn net_protocol_covering_rate() {
    let d = 2usize;
    let eps_prime = 0.06f64;
    let eps_net = (4.0 * eps_prime).sqrt();
    let mut rng = Rng::with_stream(43, 0);
    let net = epsilon_net(d, eps_net, &mut rng, 400_000).unwrap();
    let budget = rsp_core::randomize::net_description_cbits(d, eps_prime);
    let samples = 10_000usize;
    let mut hits = 0usize;
    for _ in 0..samples {
        let psi = rng.pure_state(d);
        let t = net_only_protocol(&psi, &net).unwrap();
        assert_eq!(t.ebits_consumed, 0.0);
        assert!(
            t.cbits_sent <= budget,
            "cbits {} over budget {budget}",
            t.cbits_sent
        );
        if t.success {
            assert!(t.fidelity_to_target >= 1.0 - eps_prime - 1e-12);
            hits += 1;
        }
    }
    let rate = hits as f64 / samples as f64;
    assert!(rate >= 0.999, "covering rate {rate}");
}

/// One entangled round on the two-Bell-state ensemble: the typical
/// subspace is everything, tr π_I = 1, the round prepares exactly, and
/// the ebit counter equals log₂ of the typical dimension.
#[test]
fn entangled_round_two_bell_states() {
    let bell = max_entangled(2).unwrap();
    let mut minus_amp = bell.amplitudes().to_vec();
    minus_amp[3] = -minus_amp[3];
    let minus = PureState::new(minus_amp).unwrap();
    let ens = BipartiteEnsemble::new(vec![0.5, 0.5], vec![bell, minus], 2, 2).unwrap();
    let params = EntangledParams {
        delta: 0.4,
        epsilon: 0.25,
        k_override: Some(64),
        ..Default::default()
    };
    let mut rng = Rng::with_stream(47, 0);
    let mut successes = 0usize;
    let runs = 40usize;
    for run in 0..runs {
        let mut local = rng.split(run as u64);
        let round = entangled_rsp_round(&[0, 1, 0, 1], &ens, &params, &mut local).unwrap();
        // Both members reduce to 1/2, so every sequence is typical.
        assert_eq!(round.typical_dim, 16);
        assert!((round.tr_pi - 1.0).abs() <= 1e-9);
        assert!(round.eps_typ <= 1e-12);
        assert!((round.transcript.ebits_consumed - 4.0).abs() <= 1e-12);
        if round.transcript.success {
            successes += 1;
            assert!(round.transcript.fidelity_to_target >= round.fidelity_bound - 1e-9);
            assert!(round.transcript.fidelity_to_target > 1.0 - 1e-9);
        }
    }
    // Failure probability is ε/(1+ε) = 0.2; forty runs should mostly land.
    assert!(successes >= runs / 2, "only {successes}/{runs} succeeded");
    let _ = rng;
}

/// Two routes to the receiver's pre-decode state agree: the simulator map
/// computes Ū_k ψ U_kᵀ directly, the runner gets it from the POVM via
/// Tr_A[(A_k ⊗ 1)Φ] — their equality is the content of the exactness
/// theorem.
#[test]
fn simulator_matches_actual_pre_decode_states() {
    use rsp_core::protocols::oblivious_simulator;
    let set = weyl_set(3);
    let mut rng = Rng::with_stream(59, 0);
    let psi = rng.pure_state(3);
    let runner = PiRunner::new(&psi, &set).expect("runner");
    let record = oblivious_simulator(&psi, &set);
    assert_eq!(record.len(), 9);
    for (k, entry) in record.iter().enumerate() {
        assert_eq!(entry.message, Message::Value(k));
        assert!((entry.probability - 1.0 / 9.0).abs() < 1e-12);
        let diff = entry.state.max_abs_diff(runner.pre_decode(k).matrix());
        assert!(diff <= 1e-10, "k={k}: {diff:.2e}");
    }
}

/// The fidelity guarantee from the gentle-measurement argument holds on
/// an ensemble with a nontrivial typical subspace.
#[test]
fn entangled_round_fidelity_bound_nontrivial() {
    let bell = max_entangled(2).unwrap();
    let product = PureState::basis(2, 0).tensor(&PureState::basis(2, 0));
    let ens = BipartiteEnsemble::new(vec![0.5, 0.5], vec![bell, product], 2, 2).unwrap();
    let params = EntangledParams {
        delta: 0.6,
        epsilon: 0.25,
        k_override: Some(128),
        ..Default::default()
    };
    let mut rng = Rng::with_stream(53, 0);
    let mut checked = 0usize;
    for run in 0..30 {
        let mut local = rng.split(run);
        match entangled_rsp_round(&[0, 1, 0, 1], &ens, &params, &mut local) {
            Ok(round) => {
                if round.transcript.success {
                    checked += 1;
                    assert!(
                        round.transcript.fidelity_to_target >= round.fidelity_bound - 1e-9,
                        "fidelity {} below bound {}",
                        round.transcript.fidelity_to_target,
                        round.fidelity_bound
                    );
                }
            }
            Err(rsp_core::Error::NotRandomizing(_)) => continue,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    assert!(checked > 0, "no successful rounds to check");
}
