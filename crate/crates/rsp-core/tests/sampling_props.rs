//! Statistical properties of the random sources.

use rsp_core::linalg::C64;
use rsp_core::sampling::{haar_unitary, Rng};
use rsp_core::stats::{binomial_sigma, ks_two_sample_ok};

/// Left invariance of the Haar law: the overlap statistic
/// tr(V U φ U* V* P) is distributed like tr(U φ U* P) for any fixed V
/// (two-sample KS at the 1% level, 10⁴ samples a side).
#[test]
fn haar_left_invariance_ks() {
    let d = 4;
    let p_rank = 2;
    let mut rng = Rng::with_stream(11, 0);
    let v = haar_unitary(d, &mut rng);
    let overlap = |u: &rsp_core::qmath::Unitary, pre: Option<&rsp_core::qmath::Unitary>| {
        // |0⟩ column of (V)U, weight on the first p_rank basis states.
        let col: Vec<C64> = match pre {
            Some(vv) => {
                let ucol: Vec<C64> = (0..d).map(|r| u.matrix()[(r, 0)]).collect();
                vv.matrix().matvec(&ucol)
            }
            None => (0..d).map(|r| u.matrix()[(r, 0)]).collect(),
        };
        col.iter().take(p_rank).map(|c| c.norm_sqr()).sum::<f64>()
    };
    let n = 10_000;
    let mut plain = Vec::with_capacity(n);
    let mut rotated = Vec::with_capacity(n);
    for _ in 0..n {
        let u1 = haar_unitary(d, &mut rng);
        let u2 = haar_unitary(d, &mut rng);
        plain.push(overlap(&u1, None));
        rotated.push(overlap(&u2, Some(&v)));
    }
    assert!(ks_two_sample_ok(&plain, &rotated, 0.01));
}

/// The concentration bound on (1/K) Σ tr(U φ U* P): deviation frequency
/// stays under 2·2^{−Kpε²/6} + 4σ (a reduced-trial edition of the
/// acceptance cell matrix).
#[test]
fn concentration_cells_reduced() {
    let d = 8usize;
    let eps = 0.9f64;
    let trials = 2_000usize;
    for (cell, (p, k)) in [(0usize, (1usize, 16usize)), (1, (4, 16))] {
        let bound = 2.0 * 2f64.powf(-(k as f64) * p as f64 * eps * eps / 6.0);
        let base = Rng::with_stream(13, cell as u64);
        let mut hits = 0usize;
        for t in 0..trials {
            let mut rng = base.split(t as u64);
            let mut acc = 0.0;
            for _ in 0..k {
                let u = haar_unitary(d, &mut rng);
                let col: Vec<C64> = (0..d).map(|r| u.matrix()[(r, 0)]).collect();
                acc += col.iter().take(p).map(|c| c.norm_sqr()).sum::<f64>();
            }
            if (acc / k as f64 - p as f64 / d as f64).abs() >= eps * p as f64 / d as f64 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!(
            freq <= bound + 4.0 * binomial_sigma(bound.min(1.0), trials),
            "cell p={p} K={k}: freq {freq} bound {bound}"
        );
    }
}

/// Identical (seed, stream) pairs reproduce identical draws; distinct
/// streams diverge.
#[test]
fn stream_determinism() {
    let mut a = Rng::with_stream(99, 5);
    let mut b = Rng::with_stream(99, 5);
    let mut c = Rng::with_stream(99, 6);
    let (ua, ub, uc) = (
        haar_unitary(6, &mut a),
        haar_unitary(6, &mut b),
        haar_unitary(6, &mut c),
    );
    assert_eq!(ua.matrix(), ub.matrix());
    assert_ne!(ua.matrix(), uc.matrix());
    // Splitting is independent of how much the parent has produced.
    let parent = Rng::with_stream(99, 5);
    let mut spent = Rng::with_stream(99, 5);
    let _ = haar_unitary(6, &mut spent);
    let u1 = haar_unitary(4, &mut parent.split(3));
    let u2 = haar_unitary(4, &mut spent.split(3));
    assert_eq!(u1.matrix(), u2.matrix());
}
