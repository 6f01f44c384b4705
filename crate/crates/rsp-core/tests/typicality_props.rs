//! Typicality thresholds and the operator law of large numbers on a
//! non-commuting instance.

use rsp_core::linalg::{CMat, C64};
use rsp_core::qmath::DensityOperator;
use rsp_core::typicality::{cond_typical_projector, operator_lln_check, typical_projector};

fn rotated_qubit(p: f64, theta: f64) -> DensityOperator {
    let (c, s) = (theta.cos(), theta.sin());
    // R(θ) diag(p, 1−p) R(θ)†
    let r = CMat::from_rows(vec![
        vec![C64::new(c, 0.0), C64::new(-s, 0.0)],
        vec![C64::new(s, 0.0), C64::new(c, 0.0)],
    ]);
    let d = CMat::diag(&[p, 1.0 - p]);
    DensityOperator::new(r.mul(&d).mul(&r.dagger())).unwrap()
}

/// Rank sandwich of the typical projector beyond its empirical threshold:
/// (1−ε)·2^{n(S−δ)} ≤ rank ≤ 2^{n(S+δ)}.
#[test]
fn rank_sandwich_past_threshold() {
    let rho = DensityOperator::new(CMat::diag(&[0.75, 0.25])).unwrap();
    let s = 0.8112781244591328;
    let delta = 0.3;
    let mut threshold = None;
    for n in 1..=12usize {
        let proj = typical_projector(&rho, n, delta).unwrap();
        let rank = proj.rank() as f64;
        assert!(rank.log2() <= n as f64 * (s + delta) + 1e-9);
        let eps = 1.0 - proj.weight();
        let lower = (1.0 - eps) * 2f64.powf(n as f64 * (s - delta));
        if threshold.is_none() && rank >= lower && eps <= 0.25 {
            threshold = Some(n);
        }
        if threshold.is_some() {
            assert!(rank >= lower - 1e-9, "lower bound fails at n={n}");
        }
    }
    assert!(threshold.is_some(), "no threshold within n ≤ 12");
}

/// Conditionally typical projectors catch ≥ 1 − ε of W_I past an
/// empirical threshold, reported as the smallest such n.
#[test]
fn cond_typical_probability_threshold() {
    let w = vec![rotated_qubit(0.85, 0.0), rotated_qubit(0.7, 0.5)];
    let mut threshold = None;
    for reps in 1..=5usize {
        let letters: Vec<usize> = [0usize, 1].iter().cycle().take(2 * reps).cloned().collect();
        let proj = cond_typical_projector(&w, &letters, 0.35).unwrap();
        let ops: Vec<&CMat> = letters.iter().map(|&l| w[l].matrix()).collect();
        let weight = proj.trace_with(&ops);
        if threshold.is_none() && weight >= 0.75 {
            threshold = Some(2 * reps);
        }
    }
    assert!(threshold.is_some(), "no threshold within n ≤ 10");
}

/// Operator law of large numbers on a genuinely non-commuting channel:
/// tr(W_I Π^n_{ρ,δ}) climbs toward 1 over n = 2..10.
#[test]
fn lln_non_commuting_trend() {
    let w0 = rotated_qubit(0.9, 0.0);
    let w1 = rotated_qubit(0.7, std::f64::consts::FRAC_PI_4);
    // Confirm non-commutativity.
    let comm = w0
        .matrix()
        .mul(w1.matrix())
        .sub(&w1.matrix().mul(w0.matrix()));
    assert!(comm.max_abs() > 1e-3);
    let report = operator_lln_check(&[w0, w1], &[0, 1], 5, 0.4, 0.2).unwrap();
    assert_eq!(report.points.len(), 5);
    // Frozen from direct evaluation: the trace climbs monotonically and
    // clears 0.8 by n = 10.
    for pair in report.points.windows(2) {
        assert!(
            pair[1].1 >= pair[0].1 - 1e-9,
            "trace dropped: {:?} → {:?}",
            pair[0],
            pair[1]
        );
    }
    let last = report.points.last().unwrap();
    assert!(last.1 >= 0.8, "final trace {} too small", last.1);
    assert!(report.threshold.is_some());
}
