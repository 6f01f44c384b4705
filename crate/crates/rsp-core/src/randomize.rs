//! Randomizing unitary sets and their verification, exact Weyl
//! randomizers, ε-nets of pure states, and the universal quantum–classical
//! state-description scheme with its exponential lower bound.
//!
//! A set {U_k} is ε-randomizing when (1/K) Σ_k U_k φ U_k* lies in the
//! operator interval [(1±ε)/D]·1 for every state φ, equivalently when
//! |(1/K) Σ_k tr(U_k φ U_k* ψ) − 1/D| ≤ ε/D for all pure φ, ψ. Certifying
//! that over all states needs an ε/4D-net of pure states; even at D = 2,
//! ε = 1/2 such a net runs to ~80⁴ members and ~10¹⁵ pair evaluations, so
//! a certified check is out of reach at desk scale and the shipped
//! verifier is an explicitly heuristic one: alternating eigenvector
//! ascent on the bilinear form from random restarts, plus Monte Carlo
//! probe pairs. Construction from Haar samples retries with fresh streams
//! until the verifier passes, a probabilistic acceptance rather than a
//! certificate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vnorm, vsub, CMat, C64, ZERO};
use crate::qmath::{PureState, Unitary};
use crate::sampling::{haar_unitary, Rng};

/// How a unitary set came to be; Haar sets serialize as (seed, stream)
/// rather than raw matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    HaarSampled { seed: u64, stream: u64 },
    Weyl,
    Explicit,
}

/// K unitaries on dimension D with target randomization accuracy ε.
#[derive(Debug, Clone)]
pub struct UnitarySet {
    d: usize,
    epsilon: f64,
    unitaries: Vec<Unitary>,
    provenance: Provenance,
}

impl UnitarySet {
    pub fn new(
        d: usize,
        epsilon: f64,
        unitaries: Vec<Unitary>,
        provenance: Provenance,
    ) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::InvalidParameter("a unitary set needs K ≥ 1".into()));
        }
        if unitaries.iter().any(|u| u.dim() != d) {
            return Err(Error::DimensionMismatch(d, unitaries[0].dim()));
        }
        Ok(UnitarySet {
            d,
            epsilon,
            unitaries,
            provenance,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitaries(&self) -> &[Unitary] {
        &self.unitaries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// (1/K) Σ_k U_k ρ U_k*
    pub fn average_map(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(self.d, self.d);
        let w = 1.0 / self.len() as f64;
        for u in &self.unitaries {
            let m = u.matrix().mul(rho).mul(&u.matrix().dagger());
            out.add_assign_scaled(&m, w);
        }
        out
    }

    pub fn to_json(&self) -> UnitarySetJson {
        let unitaries = match self.provenance {
            Provenance::HaarSampled { .. } | Provenance::Weyl => None,
            Provenance::Explicit => Some(
                self.unitaries
                    .iter()
                    .map(|u| MatrixJson::from_cmat(u.matrix()))
                    .collect(),
            ),
        };
        UnitarySetJson {
            d: self.d,
            epsilon: self.epsilon,
            k: self.len(),
            provenance: self.provenance.clone(),
            unitaries,
        }
    }

    pub fn from_json(json: &UnitarySetJson) -> Result<Self> {
        match &json.provenance {
            Provenance::HaarSampled { seed, stream } => {
                let base = Rng::with_stream(*seed, *stream);
                let unitaries: Vec<Unitary> = (0..json.k)
                    .map(|k| haar_unitary(json.d, &mut base.split(k as u64)))
                    .collect();
                UnitarySet::new(json.d, json.epsilon, unitaries, json.provenance.clone())
            }
            Provenance::Weyl => {
                let set = weyl_set(json.d);
                if set.len() != json.k {
                    return Err(Error::InvalidState(format!(
                        "weyl set of dimension {} has K={}, file says {}",
                        json.d,
                        set.len(),
                        json.k
                    )));
                }
                Ok(set)
            }
            Provenance::Explicit => {
                let mats = json
                    .unitaries
                    .as_ref()
                    .ok_or_else(|| Error::InvalidState("explicit set without matrices".into()))?;
                let unitaries = mats
                    .iter()
                    .map(|m| Unitary::new(m.to_cmat()))
                    .collect::<Result<Vec<_>>>()?;
                UnitarySet::new(json.d, json.epsilon, unitaries, Provenance::Explicit)
            }
        }
    }
}

/// Wire form of a unitary set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitarySetJson {
    pub d: usize,
    pub epsilon: f64,
    pub k: usize,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<MatrixJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        MatrixJson {
            re: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_cmat(&self) -> CMat {
        let rows = self.re.len();
        let cols = if rows == 0 { 0 } else { self.re[0].len() };
        CMat::from_fn(rows, cols, |i, j| C64::new(self.re[i][j], self.im[i][j]))
    }
}

/// K from the existence theorem: ⌈(10/ε)² · D · log₂(20D/ε)⌉.
pub fn randomizing_set_size(d: usize, epsilon: f64) -> usize {
    let e = epsilon;
    ((10.0 / e).powi(2) * d as f64 * (20.0 * d as f64 / e).log2()).ceil() as usize
}

/// Verifier output. `dev_max`/`dev_min` are the largest and smallest found
/// values of (1/K)Σ tr(U_k φ U_k* ψ) − 1/D over pure pairs; the search is
/// an estimate, not a certificate, hence `heuristic`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub dev_max: f64,
    pub dev_min: f64,
    pub threshold: f64,
    pub pass: bool,
    pub heuristic: bool,
}

impl VerifyReport {
    /// max(|dev_max|, |dev_min|): the worst deviation magnitude found.
    pub fn dev(&self) -> f64 {
        self.dev_max.abs().max(self.dev_min.abs())
    }
}

/// Estimate sup and inf of the randomization form by alternating
/// eigenvector ascent from `restarts` random starts plus `probes` Monte
/// Carlo pairs. Pass ⇔ every found deviation is within ε/D.
pub fn verify_randomizing(
    set: &UnitarySet,
    probes: usize,
    restarts: usize,
    rng: &Rng,
) -> VerifyReport {
    let d = set.d();
    let base = 1.0 / d as f64;
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;

    let ascent: Vec<(f64, f64)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut local = rng.split(1_000_000 + r as u64);
            let up = alternating_extremum(set, &mut local, true);
            let down = alternating_extremum(set, &mut local, false);
            (up, down)
        })
        .collect();
    for (up, down) in ascent {
        hi = hi.max(up);
        lo = lo.min(down);
    }

    let probe_vals: Vec<f64> = (0..probes)
        .into_par_iter()
        .map(|p| {
            let mut local = rng.split(2_000_000 + p as u64);
            let phi = local.pure_state(d);
            let psi = local.pure_state(d);
            form_value(set, &phi, &psi)
        })
        .collect();
    for v in probe_vals {
        hi = hi.max(v);
        lo = lo.min(v);
    }

    let threshold = set.epsilon() / d as f64;
    let dev_max = hi - base;
    let dev_min = lo - base;
    VerifyReport {
        dev_max,
        dev_min,
        threshold,
        pass: dev_max.abs().max(dev_min.abs()) <= threshold + 1e-12,
        heuristic: true,
    }
}

/// (1/K) Σ_k |⟨ψ|U_k|φ⟩|²
fn form_value(set: &UnitarySet, phi: &PureState, psi: &PureState) -> f64 {
    let mut acc = 0.0;
    for u in set.unitaries() {
        let v = u.matrix().matvec(phi.amplitudes());
        let ip: C64 = psi
            .amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum();
        acc += ip.norm_sqr();
    }
    acc / set.len() as f64
}

/// Alternate between optimizing ψ for fixed φ (extremal eigenvector of
/// M(φ) = avg U φ U*) and φ for fixed ψ (extremal eigenvector of
/// N(ψ) = avg U* ψ U). Each half-step cannot decrease (increase) the
/// form, so the iteration converges to a local extremum.
fn alternating_extremum(set: &UnitarySet, rng: &mut Rng, maximize: bool) -> f64 {
    let d = set.d();
    let mut phi = rng.pure_state(d);
    let mut value = f64::NAN;
    for _ in 0..40 {
        let m = avg_conjugations(set, &phi, false);
        let psi = extremal_eigvec(&m, maximize);
        let n = avg_conjugations(set, &psi, true);
        let next_phi = extremal_eigvec(&n, maximize);
        let next = form_value(set, &next_phi, &psi);
        phi = next_phi;
        if !value.is_nan() && (next - value).abs() < 1e-13 {
            return next;
        }
        value = next;
    }
    value
}

/// avg_k U_k |χ⟩⟨χ| U_k* (or with U_k* |χ⟩⟨χ| U_k when `adjoint`).
fn avg_conjugations(set: &UnitarySet, chi: &PureState, adjoint: bool) -> CMat {
    let d = set.d();
    let mut out = CMat::zeros(d, d);
    let w = 1.0 / set.len() as f64;
    for u in set.unitaries() {
        let v = if adjoint {
            u.matrix().dagger().matvec(chi.amplitudes())
        } else {
            u.matrix().matvec(chi.amplitudes())
        };
        out.add_assign_scaled(&CMat::outer(&v, &v), w);
    }
    out
}

fn extremal_eigvec(m: &CMat, top: bool) -> PureState {
    let (vals, vecs) = m.eig_h();
    let col = if top { 0 } else { vals.len() - 1 };
    let amp: Vec<C64> = (0..m.rows()).map(|i| vecs[(i, col)]).collect();
    PureState::normalized(amp).expect("eigenvector is nonzero")
}

/// Draw Haar sets of the theorem-mandated size until one passes the
/// heuristic verifier; each attempt uses a fresh stream.
pub fn build_randomizing_set(
    d: usize,
    epsilon: f64,
    rng: &Rng,
    max_retries: usize,
) -> Result<(UnitarySet, VerifyReport)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter("need 0 < ε ≤ 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("need D ≥ 2".into()));
    }
    let k = randomizing_set_size(d, epsilon);
    let mut last_dev = f64::INFINITY;
    for attempt in 0..max_retries.max(1) {
        let attempt_rng = rng.split(attempt as u64);
        let unitaries: Vec<Unitary> = (0..k)
            .into_par_iter()
            .map(|j| haar_unitary(d, &mut attempt_rng.split(j as u64)))
            .collect();
        let provenance = Provenance::HaarSampled {
            seed: attempt_rng.seed(),
            stream: attempt_rng.stream(),
        };
        let set = UnitarySet::new(d, epsilon, unitaries, provenance)?;
        let report = verify_randomizing(&set, 512, 8, &attempt_rng.split(u64::MAX));
        if report.pass {
            return Ok((set, report));
        }
        last_dev = report.dev();
    }
    Err(Error::RetriesExhausted {
        attempts: max_retries.max(1),
        last_dev,
    })
}

/// The D² generalized Pauli (Weyl) unitaries X^a Z^b; an exact randomizer,
/// and the minimum possible number of unitaries for ε = 0.
pub fn weyl_set(d: usize) -> UnitarySet {
    assert!(d >= 1);
    let mut unitaries = Vec::with_capacity(d * d);
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    for a in 0..d {
        for b in 0..d {
            let mut m = CMat::zeros(d, d);
            for j in 0..d {
                let phase = omega * (b * j) as f64;
                m[((j + a) % d, j)] = C64::new(phase.cos(), phase.sin());
            }
            unitaries.push(Unitary::new(m).expect("Weyl operators are unitary"));
        }
    }
    UnitarySet {
        d,
        epsilon: 0.0,
        unitaries,
        provenance: Provenance::Weyl,
    }
}

// ---------------------------------------------------------------------------
// ε-nets
// ---------------------------------------------------------------------------

/// Finite set of pure states with the packing property: pairwise Euclidean
/// (vector) distance ≥ ε/2. Covering is an empirical post-check, not an
/// invariant.
#[derive(Debug, Clone)]
pub struct EpsilonNet {
    pub d: usize,
    pub epsilon: f64,
    pub states: Vec<PureState>,
    /// False when the candidate budget ran out before the packing stopped
    /// growing; reported, not fatal.
    pub saturated: bool,
}

impl EpsilonNet {
    pub fn new(d: usize, epsilon: f64, states: Vec<PureState>, saturated: bool) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter(
                "net needs at least one state".into(),
            ));
        }
        for (i, a) in states.iter().enumerate() {
            if a.dim() != d {
                return Err(Error::DimensionMismatch(d, a.dim()));
            }
            for b in states.iter().skip(i + 1) {
                let dist = vnorm(&vsub(a.amplitudes(), b.amplitudes()));
                if dist < epsilon / 2.0 - 1e-12 {
                    return Err(Error::InvalidState(format!(
                        "packing violated: distance {dist:.3e} < ε/2"
                    )));
                }
            }
        }
        Ok(EpsilonNet {
            d,
            epsilon,
            states,
            saturated,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Best fidelity to ψ over the net and the achieving index.
    pub fn best_match(&self, psi: &PureState) -> (usize, f64) {
        let mut best = (0usize, -1.0f64);
        for (i, s) in self.states.iter().enumerate() {
            let f = s.overlap(psi).norm_sqr();
            if f > best.1 {
                best = (i, f);
            }
        }
        best
    }
}

/// Greedy randomized maximal packing at radius ε/2 in the vector norm.
/// Stops once `SATURATION_STREAK` consecutive candidates were rejected
/// (packing has very likely saturated) or once `max_candidates` have been
/// examined (reported via `saturated = false`).
pub fn epsilon_net(
    d: usize,
    epsilon: f64,
    rng: &mut Rng,
    max_candidates: usize,
) -> Result<EpsilonNet> {
    const SATURATION_STREAK: usize = 2_000;
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::InvalidParameter("need 0 < ε ≤ 2".into()));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("need D ≥ 1".into()));
    }
    let radius = epsilon / 2.0;
    let mut states: Vec<PureState> = Vec::new();
    let mut streak = 0usize;
    let mut saturated = false;
    for _ in 0..max_candidates {
        let cand = rng.pure_state(d);
        let ok = states
            .iter()
            .all(|s| vnorm(&vsub(s.amplitudes(), cand.amplitudes())) >= radius);
        if ok {
            states.push(cand);
            streak = 0;
        } else {
            streak += 1;
            if streak >= SATURATION_STREAK {
                saturated = true;
                break;
            }
        }
    }
    if states.is_empty() {
        states.push(rng.pure_state(d));
    }
    EpsilonNet::new(d, epsilon, states, saturated)
}

/// Cardinality bound (5/ε)^{2D} from the volume argument.
pub fn net_cardinality_bound(d: usize, epsilon: f64) -> f64 {
    (5.0 / epsilon).powi(2 * d as i32)
}

/// Classical cost (4 + log₂ 1/ε)·D of describing any state to fidelity
/// 1−ε with a net and no entanglement at all.
pub fn net_description_cbits(d: usize, epsilon: f64) -> f64 {
    (4.0 + (1.0 / epsilon).log2()) * d as f64
}

// ---------------------------------------------------------------------------
// Universal quantum–classical state description
// ---------------------------------------------------------------------------

/// The subspace scheme behind the constructive description: C^D split into
/// orthogonal blocks H_0, H_1, …, H_K of the computational basis with
/// dim H_0 < dim H_1 = … = dim H_K = ⌊D/K⌋ and K = ⌈1/ε⌉; the sender keeps
/// the complement of one block.
#[derive(Debug, Clone)]
pub struct QcCompressionScheme {
    pub d: usize,
    pub epsilon: f64,
    /// Number of usable blocks, K = ⌈1/ε⌉.
    pub k: usize,
    /// dim H_k for k ≥ 1.
    pub block: usize,
    /// dim H_0 = D mod K; H_0 occupies the leading indices.
    pub remainder: usize,
}

impl QcCompressionScheme {
    pub fn new(d: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter("need 0 < ε < 1".into()));
        }
        let k = (1.0 / epsilon).ceil() as usize;
        if d < k {
            return Err(Error::InvalidParameter(format!(
                "D = {d} too small for K = {k} blocks"
            )));
        }
        let block = d / k;
        let remainder = d % k;
        if remainder >= block {
            return Err(Error::InvalidParameter(format!(
                "dim H_0 = {remainder} would not be smaller than the block size {block}"
            )));
        }
        Ok(QcCompressionScheme {
            d,
            epsilon,
            k,
            block,
            remainder,
        })
    }

    /// Index range of H_k (k = 1..=K).
    fn dropped_range(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.remainder + (k - 1) * self.block;
        start..start + self.block
    }

    /// Projector P_k onto the complement of H_k.
    pub fn kept_projector(&self, k: usize) -> CMat {
        assert!(k >= 1 && k <= self.k);
        let mut m = CMat::identity(self.d);
        for i in self.dropped_range(k) {
            m[(i, i)] = ZERO;
        }
        m
    }

    /// Rank of every P_k, the code-space dimension.
    pub fn kept_rank(&self) -> usize {
        self.d - self.block
    }

    /// Classical transcript size, log₂ K bits.
    pub fn cbits(&self) -> f64 {
        (self.k as f64).log2()
    }
}

/// Pick the block whose complement carries the most weight of ψ (it keeps
/// at least 1−ε since (1/K) Σ_k P_k ≥ (1−ε)·1), project, renormalize.
pub fn qc_compress(scheme: &QcCompressionScheme, psi: &PureState) -> Result<(usize, PureState)> {
    if psi.dim() != scheme.d {
        return Err(Error::DimensionMismatch(scheme.d, psi.dim()));
    }
    let mut best = (0usize, -1.0f64);
    for k in 1..=scheme.k {
        let dropped: f64 = scheme
            .dropped_range(k)
            .map(|i| psi.amplitudes()[i].norm_sqr())
            .sum();
        let kept = 1.0 - dropped;
        if kept > best.1 {
            best = (k, kept);
        }
    }
    let (k, kept) = best;
    if kept < 1.0 - scheme.epsilon - 1e-9 {
        return Err(Error::InvalidState(format!(
            "no block keeps 1−ε of the state (best {kept:.6})"
        )));
    }
    let mut amp = psi.amplitudes().to_vec();
    for i in scheme.dropped_range(k) {
        amp[i] = ZERO;
    }
    Ok((k, PureState::normalized(amp)?))
}

/// Reconstruct the receiver-side state from the transcript (k, ξ). The
/// projected state already lives inside the kept subspace of block k;
/// anything else is a malformed transcript.
pub fn qc_decompress(
    scheme: &QcCompressionScheme,
    k: usize,
    xi: &PureState,
) -> Result<crate::qmath::DensityOperator> {
    if xi.dim() != scheme.d {
        return Err(Error::DimensionMismatch(scheme.d, xi.dim()));
    }
    if k == 0 || k > scheme.k {
        return Err(Error::InvalidParameter(format!(
            "block index {k} out of range"
        )));
    }
    let leak: f64 = scheme
        .dropped_range(k)
        .map(|i| xi.amplitudes()[i].norm_sqr())
        .sum();
    if leak > 1e-9 {
        return Err(Error::InvalidState(format!(
            "transcript state has weight {leak:.3e} inside the dropped block"
        )));
    }
    Ok(xi.density())
}

/// Lower bound on the classical bits of any universal quantum–classical
/// description with code dimension S ≤ qD and average fidelity F (q < F):
/// q(1−q)D/6 − 2 log₂ D + log₂(1 − √((1−F)/(1−q))). May be negative
/// (vacuous) at small D; callers display max(0, ·).
pub fn universal_description_bound(d: usize, code_dim: usize, fidelity: f64) -> Result<f64> {
    if d == 0 || code_dim == 0 {
        return Err(Error::InvalidParameter("dimensions must be ≥ 1".into()));
    }
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::InvalidParameter("need 0 < F ≤ 1".into()));
    }
    let q = code_dim as f64 / d as f64;
    if q >= fidelity {
        return Err(Error::InvalidParameter(format!(
            "bound needs q = S/D < F (got q = {q}, F = {fidelity})"
        )));
    }
    let main = q * (1.0 - q) * d as f64 / 6.0;
    let log_term = (1.0 - ((1.0 - fidelity) / (1.0 - q)).sqrt()).log2();
    Ok(main - 2.0 * (d as f64).log2() + log_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{trace_distance, DensityOperator};
    use approx::assert_abs_diff_eq;

    #[test]
    fn thm1_count_d2() {
        assert_eq!(randomizing_set_size(2, 0.5), 5058);
    }

    #[test]
    fn weyl_is_exact_randomizer() {
        for d in [1usize, 2, 3] {
            let set = weyl_set(d);
            assert_eq!(set.len(), d * d);
            let mut rng = Rng::new(3);
            for _ in 0..20 {
                let rho = rng.pure_state(d).projector();
                let avg = set.average_map(&rho);
                let target = CMat::identity(d).scale_re(1.0 / d as f64);
                assert!(avg.max_abs_diff(&target) < 1e-12);
            }
        }
    }

    #[test]
    fn weyl_d2_passes_verifier() {
        let set = weyl_set(2);
        let report = verify_randomizing(&set, 64, 4, &Rng::new(1));
        assert!(report.pass);
        assert!(report.dev() <= 1e-10, "dev {}", report.dev());
        assert!(report.heuristic);
    }

    #[test]
    fn singleton_identity_fails_with_known_deviation() {
        let set =
            UnitarySet::new(2, 0.5, vec![Unitary::identity(2)], Provenance::Explicit).unwrap();
        let report = verify_randomizing(&set, 128, 4, &Rng::new(2));
        assert!(!report.pass);
        // Worst pair is φ = ψ: deviation 1 − 1/D = 0.5 exactly.
        assert_abs_diff_eq!(report.dev_max, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn build_rejects_bad_epsilon() {
        assert!(build_randomizing_set(2, 0.0, &Rng::new(1), 1).is_err());
        assert!(build_randomizing_set(2, -0.5, &Rng::new(1), 1).is_err());
        assert!(build_randomizing_set(1, 0.5, &Rng::new(1), 1).is_err());
    }

    #[test]
    fn haar_set_json_round_trip_reproduces_members() {
        let rng = Rng::new(77);
        let unitaries: Vec<Unitary> = (0..5).map(|j| haar_unitary(2, &mut rng.split(j))).collect();
        let set = UnitarySet::new(
            2,
            0.5,
            unitaries,
            Provenance::HaarSampled {
                seed: rng.seed(),
                stream: rng.stream(),
            },
        )
        .unwrap();
        let json = serde_json::to_string(&set.to_json()).unwrap();
        let parsed: UnitarySetJson = serde_json::from_str(&json).unwrap();
        let back = UnitarySet::from_json(&parsed).unwrap();
        for (a, b) in set.unitaries().iter().zip(back.unitaries()) {
            assert_eq!(a.matrix(), b.matrix());
        }
    }

    #[test]
    fn net_packing_and_trivial_cover() {
        let mut rng = Rng::new(5);
        let net = epsilon_net(2, 2.0, &mut rng, 10_000).unwrap();
        // Trace distance between pure states never exceeds 1 ≤ ε/2, so any
        // single net point covers everything at ε = 2.
        let psi = rng.pure_state(2);
        let (_, f) = net.best_match(&psi);
        let td = (1.0 - f).sqrt();
        assert!(td <= 1.0 + 1e-12);
        // Cardinality bound from the volume argument.
        assert!((net.len() as f64) <= net_cardinality_bound(2, 2.0));
    }

    #[test]
    fn net_cardinality_bound_d2() {
        assert_abs_diff_eq!(net_cardinality_bound(2, 0.5), 1.0e4, epsilon = 1e-6);
    }

    #[test]
    fn net_rejects_bad_epsilon() {
        let mut rng = Rng::new(1);
        assert!(epsilon_net(2, 0.0, &mut rng, 100).is_err());
        assert!(epsilon_net(2, 2.5, &mut rng, 100).is_err());
    }

    #[test]
    fn qc_scheme_dims_d8() {
        // D=8, ε=1/4 → K=4 blocks of 2, kept rank 6.
        let scheme = QcCompressionScheme::new(8, 0.25).unwrap();
        assert_eq!(scheme.k, 4);
        assert_eq!(scheme.block, 2);
        assert_eq!(scheme.remainder, 0);
        assert_eq!(scheme.kept_rank(), 6);
        assert_abs_diff_eq!(scheme.cbits(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn qc_round_trip_fidelity() {
        let scheme = QcCompressionScheme::new(8, 0.25).unwrap();
        let mut rng = Rng::new(9);
        for _ in 0..50 {
            let psi = rng.pure_state(8);
            let (k, xi) = qc_compress(&scheme, &psi).unwrap();
            let out = qc_decompress(&scheme, k, &xi).unwrap();
            let f = crate::qmath::fidelity(&psi.density(), &out).unwrap();
            assert!(f >= (1.0 - 0.25f64).powi(2) - 1e-9, "fidelity {f}");
        }
        // A state entirely inside a kept subspace reproduces exactly.
        let psi = PureState::basis(8, 0);
        let (k, xi) = qc_compress(&scheme, &psi).unwrap();
        let out = qc_decompress(&scheme, k, &xi).unwrap();
        assert!(trace_distance(&psi.density(), &out).unwrap() < 1e-12);
    }

    #[test]
    fn qc_uniform_superposition_d4() {
        // Uniform superposition, D=4, ε=1/2: best block keeps ≥ 1−ε; with
        // K=2 blocks of 2 the kept weight is exactly 1/2 = 1−ε.
        let scheme = QcCompressionScheme::new(4, 0.5).unwrap();
        let psi = PureState::new(vec![C64::new(0.5, 0.0); 4]).unwrap();
        let (k, _) = qc_compress(&scheme, &psi).unwrap();
        let kept = 1.0
            - scheme
                .dropped_range(k)
                .map(|i| psi.amplitudes()[i].norm_sqr())
                .sum::<f64>();
        assert!(kept >= 1.0 - scheme.epsilon - 1e-12);
        let _ = DensityOperator::maximally_mixed(2);
    }

    #[test]
    fn description_bound_values() {
        // F→1, q=1/2, D=64: 64/24 − 12 ≈ −9.333 (vacuous at small D).
        let b = universal_description_bound(64, 32, 1.0).unwrap();
        assert_abs_diff_eq!(b, 64.0 / 24.0 - 12.0, epsilon = 1e-12);
        assert!(b < 0.0);
        // q ≥ F rejected.
        assert!(universal_description_bound(64, 32, 0.5).is_err());
        assert!(universal_description_bound(64, 48, 0.5).is_err());
        // D=1024, q=1/2, F=0.99: dominated by q(1−q)D/6 ≈ 42.7.
        let big = universal_description_bound(1024, 512, 0.99).unwrap();
        let main = 0.25 * 1024.0 / 6.0;
        assert_abs_diff_eq!(main, 42.666666666666664, epsilon = 1e-12);
        let tail = (1.0f64 - (0.01f64 / 0.5).sqrt()).log2();
        assert_abs_diff_eq!(big, main - 20.0 + tail, epsilon = 1e-12);
    }

    #[test]
    fn net_description_cost_formula() {
        let c = net_description_cbits(2, 0.06);
        assert_abs_diff_eq!(c, (4.0 + (1.0f64 / 0.06).log2()) * 2.0, epsilon = 1e-12);
        assert!(c < 16.2 && c > 16.0);
    }
}
