//! Properties of randomizing sets, ε-nets, and the compression scheme.

use rsp_core::linalg::{vnorm, vsub, CMat};
use rsp_core::qmath::{fidelity, PureState};
use rsp_core::randomize::{
    epsilon_net, net_cardinality_bound, verify_randomizing, weyl_set, Provenance, UnitarySet,
};
use rsp_core::sampling::{haar_unitary, Rng};
use rsp_core::stats::{spearman_against_index, spearman_critical_one_sided_5pct};

/// ‖(1/D²) Σ W ρ W† − 1/D‖₁ ≤ 1e-10 on a 100-state random suite.
#[test]
fn weyl_exactness_trace_norm() {
    for d in [2usize, 3, 4] {
        let set = weyl_set(d);
        let mut rng = Rng::with_stream(17, d as u64);
        for _ in 0..100 {
            let rho = rng.pure_state(d).projector();
            let avg = set.average_map(&rho);
            let diff = avg.sub(&CMat::identity(d).scale_re(1.0 / d as f64));
            assert!(diff.trace_norm_h() <= 1e-10);
        }
    }
}

/// Growing a Haar set shrinks the verifier's deviation in trend: Spearman
/// ρ of (step, dev) over 20 growth steps is negative at the 5% level.
#[test]
fn deviation_shrinks_with_set_size() {
    let d = 2usize;
    let base = Rng::with_stream(19, 0);
    let unitaries: Vec<_> = (0..320)
        .map(|j| haar_unitary(d, &mut base.split(j)))
        .collect();
    let devs: Vec<f64> = (1..=20)
        .map(|step| {
            let k = step * 16;
            let set =
                UnitarySet::new(d, 0.5, unitaries[..k].to_vec(), Provenance::Explicit).unwrap();
            verify_randomizing(&set, 64, 4, &Rng::with_stream(19, 1_000 + step as u64)).dev()
        })
        .collect();
    let rho = spearman_against_index(&devs);
    let crit = spearman_critical_one_sided_5pct(devs.len());
    assert!(rho < -crit, "Spearman ρ = {rho}, critical −{crit}");
}

/// Covering quality of the greedy net at the stated ε, plus the norm
/// chain ‖φ−ψ‖₁ ≤ 2√(1−F) ≤ 2‖|φ⟩−|ψ⟩‖₂ on every covering pair.
#[test]
fn net_covering_and_norm_chain() {
    let d = 2usize;
    let eps = 0.5f64;
    let mut rng = Rng::with_stream(23, 0);
    let net = epsilon_net(d, eps, &mut rng, 400_000).unwrap();
    assert!(net.saturated, "net construction should saturate at D=2");
    assert!((net.len() as f64) <= net_cardinality_bound(d, eps));
    let samples = 10_000;
    let mut covered = 0usize;
    for _ in 0..samples {
        let phi = rng.pure_state(d);
        let (idx, f) = net.best_match(&phi);
        let psi = &net.states[idx];
        // Normalized trace distance between pure states is √(1−F).
        let td = (1.0 - f).max(0.0).sqrt();
        if td <= eps {
            covered += 1;
        }
        // The chain from the net lemma, on unnormalized trace norm.
        let t1 = phi
            .density()
            .matrix()
            .sub(psi.density().matrix())
            .trace_norm_h();
        let vec_dist = vnorm(&vsub(phi.amplitudes(), psi.amplitudes()));
        assert!(t1 <= 2.0 * (1.0 - f).max(0.0).sqrt() + 1e-9);
        assert!((1.0 - f).max(0.0).sqrt() <= vec_dist + 1e-9);
    }
    let rate = covered as f64 / samples as f64;
    assert!(rate >= 0.999, "covering rate {rate}");
}

/// Verifier report shape: heuristic flag always set, threshold = ε/D.
#[test]
fn verifier_report_contract() {
    let set = weyl_set(3);
    let report = verify_randomizing(&set, 16, 2, &Rng::new(3));
    assert!(report.heuristic);
    assert_eq!(report.threshold, 0.0);
    assert!(report.pass);
    let lifted = UnitarySet::new(3, 0.3, set.unitaries().to_vec(), Provenance::Explicit).unwrap();
    let report = verify_randomizing(&lifted, 16, 2, &Rng::new(3));
    assert!((report.threshold - 0.1).abs() < 1e-12);
}

/// The compression scheme keeps fidelity ≥ (1−ε)² for Haar-random states
/// at several (D, ε) pairs.
#[test]
fn qc_scheme_fidelity_floor() {
    use rsp_core::randomize::{qc_compress, qc_decompress, QcCompressionScheme};
    for (d, eps) in [(8usize, 0.25f64), (12, 0.34), (9, 0.34)] {
        let scheme = QcCompressionScheme::new(d, eps).unwrap();
        let mut rng = Rng::with_stream(29, d as u64);
        for _ in 0..40 {
            let psi = rng.pure_state(d);
            let (k, xi) = qc_compress(&scheme, &psi).unwrap();
            let out = qc_decompress(&scheme, k, &xi).unwrap();
            let f = fidelity(&psi.density(), &out).unwrap();
            assert!(
                f >= (1.0 - eps) * (1.0 - eps) - 1e-9,
                "D={d} ε={eps}: F={f}"
            );
        }
    }
}

/// A state concentrated on one kept block reproduces exactly and the
/// malformed-transcript path errors.
#[test]
fn qc_scheme_edges() {
    use rsp_core::randomize::{qc_compress, qc_decompress, QcCompressionScheme};
    let scheme = QcCompressionScheme::new(8, 0.25).unwrap();
    let psi = PureState::basis(8, 7);
    let (k, xi) = qc_compress(&scheme, &psi).unwrap();
    assert_ne!(k, 4, "|7⟩ lives in block 4, which must not be kept");
    let out = qc_decompress(&scheme, k, &xi).unwrap();
    assert!(fidelity(&psi.density(), &out).unwrap() > 1.0 - 1e-12);
    // ξ = |7⟩ leaks fully into block 4's dropped range.
    assert!(qc_decompress(&scheme, 4, &xi).is_err());
}
