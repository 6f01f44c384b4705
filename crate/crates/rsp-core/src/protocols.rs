//! End-to-end simulation of the remote-state-preparation protocols with
//! exact cbit/ebit bookkeeping.
//!
//! Conventions shared by every protocol here:
//! - complex conjugation and transposes refer to the computational basis,
//!   the basis defining |Φ_D⟩;
//! - resource counts are pure functions of protocol parameters, never of
//!   outcomes (the deterministic-exact composite additionally carries an
//!   expected-cost field);
//! - a probabilistic-exact transcript with `success == false` always
//!   carries `Message::Failure`.
//!
//! The conditional receiver states use the identity
//! Tr_A[(M ⊗ 1)Φ_D] = Mᵀ/D, which is unit-tested against the generic
//! partial trace.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{vkron, CMat, C64, ONE, ZERO};
use crate::qmath::{fidelity, max_entangled, DensityOperator, LabeledState, PureState, Unitary};
use crate::randomize::UnitarySet;
use crate::sampling::{haar_unitary, Rng};
use crate::tradeoff::BipartiteEnsemble;
use crate::typicality;

/// Classical message of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Message {
    Value(usize),
    Failure,
}

/// Record of one protocol run.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub protocol: String,
    pub input: String,
    pub message: Message,
    pub receiver_output: DensityOperator,
    pub success: bool,
    pub cbits_sent: f64,
    pub ebits_consumed: f64,
    pub fidelity_to_target: f64,
    /// Expected worst-case cbit cost of the deterministic-exact composite
    /// (Π with teleport fallback); absent elsewhere.
    pub expected_cbits: Option<f64>,
}

/// POVM: PSD elements summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMat>,
}

impl Povm {
    pub fn new(elements: Vec<CMat>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter(
                "POVM needs at least one element".into(),
            ));
        }
        let d = elements[0].rows();
        let mut sum = CMat::zeros(d, d);
        for e in &elements {
            if e.rows() != d || !e.is_square() {
                return Err(Error::DimensionMismatch(d, e.rows()));
            }
            if e.min_eig_h() < -1e-10 {
                return Err(Error::InvalidState(format!(
                    "POVM element has negative eigenvalue {:.2e}",
                    e.min_eig_h()
                )));
            }
            sum = sum.add(e);
        }
        if sum.max_abs_diff(&CMat::identity(d)) > 1e-9 {
            return Err(Error::InvalidState(
                "POVM elements do not sum to identity".into(),
            ));
        }
        Ok(Povm { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }
}

/// The measurement of protocol Π for target ψ: A_k = D/(K(1+ε)) U_k ψ̄ U_k*
/// for k < K, with A_failure = 1 − Σ A_k as the last element. Fails with
/// `NotRandomizing` when the set does not randomize well enough for the
/// failure element to be PSD.
pub fn rsp_povm(psi: &PureState, set: &UnitarySet) -> Result<Povm> {
    let d = set.d();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch(d, psi.dim()));
    }
    let k = set.len();
    let coeff = d as f64 / (k as f64 * (1.0 + set.epsilon()));
    let conj = psi.conj();
    let mut elements: Vec<CMat> = set
        .unitaries()
        .par_iter()
        .map(|u| {
            let v = u.matrix().matvec(conj.amplitudes());
            CMat::outer(&v, &v).scale_re(coeff)
        })
        .collect();
    let mut failure = CMat::identity(d);
    for e in &elements {
        failure = failure.sub(e);
    }
    let min = failure.min_eig_h();
    if min < -1e-10 {
        return Err(Error::NotRandomizing(format!(
            "A_failure has eigenvalue {min:.3e}; the set does not ε-randomize ψ̄"
        )));
    }
    elements.push(failure);
    Povm::new(elements)
}

/// Precomputed single-target runner for protocol Π: outcome distribution
/// and conditional receiver states are computed once, runs then just
/// sample.
pub struct PiRunner {
    d: usize,
    k: usize,
    epsilon: f64,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    /// Receiver state conditional on announcement k, before decoding.
    pre_decode: Vec<DensityOperator>,
    /// Receiver state after applying U_kᵀ.
    outputs: Vec<DensityOperator>,
    failure_state: DensityOperator,
    target: PureState,
}

impl PiRunner {
    pub fn new(psi: &PureState, set: &UnitarySet) -> Result<Self> {
        let povm = rsp_povm(psi, set)?;
        let d = set.d();
        let k = set.len();
        // Sender measures on her half of Φ_D, which is 1/D; the conditional
        // receiver state for a rank-one element A is Aᵀ/(D·p).
        let probs: Vec<f64> = povm
            .elements()
            .iter()
            .map(|a| (a.trace().re / d as f64).max(0.0))
            .collect();
        let mut cumulative = Vec::with_capacity(k + 1);
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let states: Vec<(DensityOperator, DensityOperator)> = (0..k)
            .into_par_iter()
            .map(|i| {
                let a = &povm.elements()[i];
                let pre = conditional_receiver_state(a, probs[i], d);
                let decode = set.unitaries()[i].transpose();
                let out = pre.conjugated(&decode);
                (pre, out)
            })
            .collect();
        let (pre_decode, outputs): (Vec<_>, Vec<_>) = states.into_iter().unzip();
        let failure_state = if probs[k] > 1e-12 {
            conditional_receiver_state(&povm.elements()[k], probs[k], d)
        } else {
            DensityOperator::maximally_mixed(d)?
        };
        Ok(PiRunner {
            d,
            k,
            epsilon: set.epsilon(),
            probs,
            cumulative,
            pre_decode,
            outputs,
            failure_state,
            target: psi.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn message_count(&self) -> usize {
        self.k
    }

    /// Outcome probabilities; index K is the failure element.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn output(&self, k: usize) -> &DensityOperator {
        &self.outputs[k]
    }

    pub fn pre_decode(&self, k: usize) -> &DensityOperator {
        &self.pre_decode[k]
    }

    pub fn failure_state(&self) -> &DensityOperator {
        &self.failure_state
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    pub fn sample_message(&self, rng: &mut Rng) -> Message {
        let x = rng.uniform();
        match self.cumulative.iter().position(|&c| x < c) {
            Some(i) if i < self.k => Message::Value(i),
            _ => Message::Failure,
        }
    }

    /// Worst-case cbit count log₂(K+1): the failure symbol is part of the
    /// message alphabet.
    pub fn cbits(&self) -> f64 {
        ((self.k + 1) as f64).log2()
    }

    pub fn ebits(&self) -> f64 {
        (self.d as f64).log2()
    }

    pub fn run(&self, rng: &mut Rng) -> Transcript {
        let message = self.sample_message(rng);
        let target = self.target.density();
        let (output, success) = match message {
            Message::Value(i) => (self.outputs[i].clone(), true),
            Message::Failure => (self.failure_state.clone(), false),
        };
        let fid = fidelity(&target, &output).expect("dims match");
        Transcript {
            protocol: "pi".into(),
            input: format!("pure state on D={}", self.d),
            message,
            receiver_output: output,
            success,
            cbits_sent: self.cbits(),
            ebits_consumed: self.ebits(),
            fidelity_to_target: fid,
            expected_cbits: None,
        }
    }

    /// Deterministic-exact composite: on failure, fall back to
    /// teleportation of the exact target. Worst-case resources cover both
    /// stages; the expected-cost field carries the (1 + 2ε/(1+ε))·log₂ D
    /// accounting.
    pub fn run_deterministic(&self, rng: &mut Rng) -> Transcript {
        let mut t = self.run(rng);
        if !t.success {
            t.receiver_output = self.target.density();
            t.fidelity_to_target = 1.0;
            t.success = true;
        }
        t.protocol = "pi+teleport".into();
        t.cbits_sent = self.cbits() + 2.0 * (self.d as f64).log2();
        t.ebits_consumed = 2.0 * (self.d as f64).log2();
        let eps = self.epsilon;
        t.expected_cbits = Some((1.0 + 2.0 * eps / (1.0 + eps)) * (self.d as f64).log2());
        t
    }
}

/// Aᵀ/(D·p), the receiver state conditional on POVM element A firing on
/// the sender's half of Φ_D.
fn conditional_receiver_state(a: &CMat, p: f64, d: usize) -> DensityOperator {
    let m = a.transpose().scale_re(1.0 / (d as f64 * p));
    DensityOperator::new(m.hermitize()).expect("conditional state")
}

/// One run of protocol Π.
pub fn run_protocol_pi(psi: &PureState, set: &UnitarySet, rng: &mut Rng) -> Result<Transcript> {
    Ok(PiRunner::new(psi, set)?.run(rng))
}

// ---------------------------------------------------------------------------
// Column method
// ---------------------------------------------------------------------------

/// Precomputed column-method runner: the sender measures (ψ̄, 1−ψ̄) on each
/// of K shared Φ_D halves and announces a uniformly random position of
/// outcome 0.
pub struct ColumnRunner {
    d: usize,
    copies: usize,
    p_zero: f64,
    success_state: DensityOperator,
    failure_state: DensityOperator,
    target: PureState,
}

impl ColumnRunner {
    pub fn new(psi: &PureState, d: usize, copies: usize) -> Result<Self> {
        if psi.dim() != d {
            return Err(Error::DimensionMismatch(d, psi.dim()));
        }
        if copies == 0 {
            return Err(Error::InvalidParameter("need K ≥ 1 copies".into()));
        }
        let proj = psi.conj().projector();
        let p_zero = proj.trace().re / d as f64;
        let success_state = conditional_receiver_state(&proj, p_zero, d);
        let complement = CMat::identity(d).sub(&proj);
        let failure_state = if d > 1 {
            conditional_receiver_state(&complement, 1.0 - p_zero, d)
        } else {
            DensityOperator::maximally_mixed(d)?
        };
        Ok(ColumnRunner {
            d,
            copies,
            p_zero,
            success_state,
            failure_state,
            target: psi.clone(),
        })
    }

    /// Per-copy probability of outcome 0, exactly 1/D.
    pub fn p_zero(&self) -> f64 {
        self.p_zero
    }

    pub fn failure_probability(&self) -> f64 {
        (1.0 - self.p_zero).powi(self.copies as i32)
    }

    pub fn cbits(&self) -> f64 {
        (self.copies as f64).log2()
    }

    pub fn ebits(&self) -> f64 {
        self.copies as f64 * (self.d as f64).log2()
    }

    /// Run one round; also reports the per-copy outcome bits for
    /// statistical validation.
    pub fn run_detailed(&self, rng: &mut Rng) -> (Transcript, Vec<bool>) {
        let zeros: Vec<bool> = (0..self.copies)
            .map(|_| rng.uniform() < self.p_zero)
            .collect();
        let zero_positions: Vec<usize> = zeros
            .iter()
            .enumerate()
            .filter(|(_, &z)| z)
            .map(|(i, _)| i)
            .collect();
        let target = self.target.density();
        let t = if zero_positions.is_empty() {
            Transcript {
                protocol: "column".into(),
                input: format!("pure state on D={}", self.d),
                message: Message::Failure,
                receiver_output: self.failure_state.clone(),
                success: false,
                cbits_sent: self.cbits(),
                ebits_consumed: self.ebits(),
                fidelity_to_target: fidelity(&target, &self.failure_state).expect("dims"),
                expected_cbits: None,
            }
        } else {
            let pick = zero_positions[rng.below(zero_positions.len())];
            Transcript {
                protocol: "column".into(),
                input: format!("pure state on D={}", self.d),
                message: Message::Value(pick),
                receiver_output: self.success_state.clone(),
                success: true,
                cbits_sent: self.cbits(),
                ebits_consumed: self.ebits(),
                fidelity_to_target: fidelity(&target, &self.success_state).expect("dims"),
                expected_cbits: None,
            }
        };
        (t, zeros)
    }

    pub fn run(&self, rng: &mut Rng) -> Transcript {
        self.run_detailed(rng).0
    }
}

/// One run of the column method with K copies of Φ_D.
pub fn column_method(
    psi: &PureState,
    d: usize,
    copies: usize,
    rng: &mut Rng,
) -> Result<Transcript> {
    Ok(ColumnRunner::new(psi, d, copies)?.run(rng))
}

// ---------------------------------------------------------------------------
// Teleportation
// ---------------------------------------------------------------------------

/// Outcome of teleporting one named part of a (possibly entangled) state.
pub struct TeleportOutcome {
    pub transcript: Transcript,
    /// Full final state: the teleported part replaced by the receiver's
    /// register, every other part untouched, label and position preserved.
    pub final_state: LabeledState,
}

/// Teleport the part `system` of `input` through a fresh Φ_D: generalized
/// Bell measurement on (system, ancilla), 2·log₂ D cbits, log₂ D ebits,
/// Weyl correction on the receiver register. Mixed inputs are purified
/// first, so entanglement with reference parts is preserved exactly.
pub fn teleport(input: &LabeledState, system: &str, rng: &mut Rng) -> Result<TeleportOutcome> {
    let pos = input
        .parts()
        .iter()
        .position(|(n, _)| n == system)
        .ok_or_else(|| Error::UnknownLabel(system.to_string()))?;
    let d = input.parts()[pos].1;

    // Purify if necessary; the purifier rides along as a reference.
    let (mut parts, mut vector, purified) = state_vector_of(input)?;
    if d * d * vector.len() > 1 << 16 {
        return Err(Error::BudgetExceeded(format!(
            "teleport needs a vector of {} amplitudes",
            d * d * vector.len()
        )));
    }

    // Append ancilla A and receiver B holding Φ_D.
    let phi = max_entangled(d)?;
    vector = vkron(&vector, phi.amplitudes());
    parts.push(("__anc".to_string(), d));
    parts.push(("__recv".to_string(), d));

    let weyl = crate::randomize::weyl_set(d);
    let dims: Vec<usize> = parts.iter().map(|(_, dd)| *dd).collect();
    let sys_pos = pos;
    let anc_pos = parts.len() - 2;

    // Unnormalized post-measurement vectors for each Bell outcome.
    let mut posts: Vec<Vec<C64>> = Vec::with_capacity(d * d);
    let mut probs: Vec<f64> = Vec::with_capacity(d * d);
    for w in weyl.unitaries() {
        let v = bell_project(&vector, &dims, sys_pos, anc_pos, w.matrix());
        let p: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        posts.push(v);
        probs.push(p);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "Bell outcome probabilities sum to {total}"
        )));
    }

    // Sample an outcome and apply the Weyl correction on the receiver.
    let x = rng.uniform();
    let mut acc = 0.0;
    let mut outcome = 0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            outcome = i;
            break;
        }
    }
    let reduced_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != sys_pos && *i != anc_pos)
        .map(|(_, dd)| *dd)
        .collect();
    let mut corrected = apply_on_part(
        &posts[outcome],
        &reduced_dims,
        reduced_dims.len() - 1,
        weyl.unitaries()[outcome].matrix(),
    );
    let norm = probs[outcome].sqrt();
    for c in &mut corrected {
        *c /= norm;
    }

    // Move the receiver register back into the teleported part's slot.
    let last = reduced_dims.len() - 1;
    let mut order: Vec<usize> = Vec::new();
    for i in 0..last {
        if i == sys_pos {
            order.push(last);
        }
        order.push(i);
    }
    if sys_pos == last {
        order.push(last);
    }
    let final_vec = permute_vector(&corrected, &reduced_dims, &order);

    let mut final_parts: Vec<(String, usize)> = input.parts().to_vec();
    if purified {
        final_parts.push(("__purifier".to_string(), input.total_dim()));
    }
    let total_dim: usize = final_parts.iter().map(|(_, dd)| dd).product();
    debug_assert_eq!(total_dim, final_vec.len());
    let full = LabeledState::new(
        final_parts,
        CMat::outer(&final_vec, &final_vec),
        std::iter::empty(),
    )?;
    let keep: Vec<&str> = input.parts().iter().map(|(n, _)| n.as_str()).collect();
    let final_state = full.partial_trace(&keep)?;

    let fid = fidelity(&input.density(), &final_state.density())?;
    let out_b = final_state.partial_trace(&[system])?;
    let transcript = Transcript {
        protocol: "teleport".into(),
        input: format!("part {system} of a state on D={d}"),
        message: Message::Value(outcome),
        receiver_output: out_b.density(),
        success: true,
        cbits_sent: 2.0 * (d as f64).log2(),
        ebits_consumed: (d as f64).log2(),
        fidelity_to_target: fid,
        expected_cbits: None,
    };
    Ok(TeleportOutcome {
        transcript,
        final_state,
    })
}

/// Decompose a labeled state into (parts, state vector, purified?); mixed
/// states get a purifier part appended.
fn state_vector_of(state: &LabeledState) -> Result<(Vec<(String, usize)>, Vec<C64>, bool)> {
    let rho = state.matrix();
    let n = rho.rows();
    let (vals, vecs) = rho.eig_h();
    let rank = vals.iter().filter(|&&l| l > 1e-12).count();
    if rank <= 1 {
        let amp: Vec<C64> = (0..n).map(|i| vecs[(i, 0)]).collect();
        return Ok((state.parts().to_vec(), amp, false));
    }
    let mut amp = vec![ZERO; n * n];
    for (k, &l) in vals.iter().enumerate() {
        if l <= 1e-12 {
            continue;
        }
        let w = l.sqrt();
        for i in 0..n {
            amp[i * n + k] += vecs[(i, k)] * w;
        }
    }
    let mut parts = state.parts().to_vec();
    parts.push(("__purifier".to_string(), n));
    Ok((parts, amp, true))
}

/// ⟨Φ_w|_{s,a} |v⟩: contract parts s and a of `v` against the Bell vector
/// (W ⊗ 1)|Φ_D⟩, returning the vector on the remaining parts in order.
fn bell_project(v: &[C64], dims: &[usize], s_pos: usize, a_pos: usize, w: &CMat) -> Vec<C64> {
    let d = dims[s_pos];
    let strides = vec_strides(dims);
    let rest: Vec<usize> = (0..dims.len())
        .filter(|&i| i != s_pos && i != a_pos)
        .collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
    let rest_total: usize = rest_dims.iter().product();
    let mut out = vec![ZERO; rest_total];
    let scale = 1.0 / (d as f64).sqrt();
    for (r, slot) in out.iter_mut().enumerate() {
        let mut base = 0usize;
        let mut rem = r;
        for (idx, &p) in rest.iter().enumerate().rev() {
            let dd = rest_dims[idx];
            base += (rem % dd) * strides[p];
            rem /= dd;
        }
        let mut acc = ZERO;
        // |Φ_w⟩ components: (s, a) ↦ W[s,a]/√d; conjugated for the bra.
        for s in 0..d {
            for a in 0..d {
                let coeff = w[(s, a)].conj() * scale;
                if coeff == ZERO {
                    continue;
                }
                acc += coeff * v[base + s * strides[s_pos] + a * strides[a_pos]];
            }
        }
        *slot = acc;
    }
    out
}

fn vec_strides(dims: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Apply a matrix to one tensor factor of a state vector.
fn apply_on_part(v: &[C64], dims: &[usize], pos: usize, m: &CMat) -> Vec<C64> {
    let strides = vec_strides(dims);
    let d = dims[pos];
    let mut out = vec![ZERO; v.len()];
    let block = strides[pos];
    let outer = v.len() / (d * block);
    for o in 0..outer {
        let obase = o * d * block;
        for inner in 0..block {
            for i in 0..d {
                let mut acc = ZERO;
                for j in 0..d {
                    let mij = m[(i, j)];
                    if mij == ZERO {
                        continue;
                    }
                    acc += mij * v[obase + j * block + inner];
                }
                out[obase + i * block + inner] = acc;
            }
        }
    }
    out
}

/// Reorder tensor factors of a state vector: `order[new_slot] = old_slot`.
fn permute_vector(v: &[C64], dims: &[usize], order: &[usize]) -> Vec<C64> {
    let old_strides = vec_strides(dims);
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let new_strides = vec_strides(&new_dims);
    let mut out = vec![ZERO; v.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut old = 0usize;
        for (s, &o) in order.iter().enumerate() {
            let digit = (idx / new_strides[s]) % new_dims[s];
            old += digit * old_strides[o];
        }
        *slot = v[old];
    }
    out
}

// ---------------------------------------------------------------------------
// Net-only protocol
// ---------------------------------------------------------------------------

/// Entanglement-free protocol: send the index of the best net point. The
/// net parameter √(4ε′) targets fidelity 1−ε′; a covering miss is reported
/// through `success = false` and counts against the empirical covering
/// rate.
pub fn net_only_protocol(
    psi: &PureState,
    net: &crate::randomize::EpsilonNet,
) -> Result<Transcript> {
    if psi.dim() != net.d {
        return Err(Error::DimensionMismatch(net.d, psi.dim()));
    }
    let (index, fid) = net.best_match(psi);
    let eps_prime = net.epsilon * net.epsilon / 4.0;
    Ok(Transcript {
        protocol: "net".into(),
        input: format!("pure state on D={}", net.d),
        message: Message::Value(index),
        receiver_output: net.states[index].density(),
        success: fid >= 1.0 - eps_prime - 1e-12,
        cbits_sent: (net.len() as f64).log2(),
        ebits_consumed: 0.0,
        fidelity_to_target: fid,
        expected_cbits: None,
    })
}

// ---------------------------------------------------------------------------
// Approximate obliviousness
// ---------------------------------------------------------------------------

/// One branch of a simulated receiver record: a classical message with its
/// probability and the receiver's pre-decode state.
#[derive(Debug, Clone)]
pub struct RecordEntry {
    pub probability: f64,
    pub message: Message,
    pub state: CMat,
}

/// The simulating map for protocol Π:
/// ψ ↦ Σ_k (1/K)|k⟩⟨k| ⊗ Ū_k ψ U_kᵀ.
pub fn oblivious_simulator(psi: &PureState, set: &UnitarySet) -> Vec<RecordEntry> {
    let k = set.len();
    set.unitaries()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let v = u.matrix().conj().matvec(psi.amplitudes());
            RecordEntry {
                probability: 1.0 / k as f64,
                message: Message::Value(i),
                state: CMat::outer(&v, &v),
            }
        })
        .collect()
}

/// Trace-distance gap between the Π simulator and the actual receiver
/// record with failure-resampling (on failure the sender announces a
/// uniformly random good message, making the protocol approximately
/// oblivious with parameters (ε, ε)). Exact when K ≤ `budget`, otherwise a
/// uniformly subsampled estimate over `budget` messages.
pub fn pi_obliviousness_gap(
    psi: &PureState,
    set: &UnitarySet,
    budget: usize,
    rng: &mut Rng,
) -> Result<f64> {
    let runner = PiRunner::new(psi, set)?;
    let k = set.len();
    let eps = set.epsilon();
    if eps == 0.0 {
        return Ok(0.0);
    }
    let fail_weight = eps / (1.0 + eps);
    let fail_mat = runner.failure_state().matrix().clone();
    let indices: Vec<usize> = if k <= budget {
        (0..k).collect()
    } else {
        (0..budget).map(|_| rng.below(k)).collect()
    };
    let mean: f64 = indices
        .par_iter()
        .map(|&i| 0.5 * fail_mat.sub(runner.pre_decode(i).matrix()).trace_norm_h())
        .sum::<f64>()
        / indices.len() as f64;
    Ok(fail_weight * mean)
}

/// Column-method record gap against its simulator (failure branch:
/// maximally mixed copies with the exact failure probability; success
/// branch k: ψ in slot k, maximally mixed elsewhere). Exact enumeration
/// over all outcome patterns; needs D^K within budget.
pub fn column_obliviousness_gap(psi: &PureState, d: usize, copies: usize) -> Result<f64> {
    if psi.dim() != d {
        return Err(Error::DimensionMismatch(d, psi.dim()));
    }
    let dim = d
        .checked_pow(copies as u32)
        .filter(|&x| x <= 512)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("column record needs D^K = {d}^{copies} dims"))
        })?;
    let q0 = 1.0 / d as f64;
    let sigma0 = psi.projector();
    let sigma1 = CMat::identity(d)
        .sub(&sigma0)
        .scale_re(1.0 / (d as f64 - 1.0).max(1.0));
    let mixed = CMat::identity(d).scale_re(q0);

    // Actual record: enumerate outcome patterns; the sender picks a zero
    // position uniformly.
    let mut actual_msg: Vec<CMat> = (0..copies).map(|_| CMat::zeros(dim, dim)).collect();
    let mut actual_fail = CMat::zeros(dim, dim);
    for pattern in 0..(1usize << copies) {
        let bits: Vec<bool> = (0..copies).map(|i| pattern >> i & 1 == 1).collect();
        let p: f64 = bits
            .iter()
            .map(|&one| if one { 1.0 - q0 } else { q0 })
            .product();
        let mut joint = CMat::identity(1);
        for &one in &bits {
            joint = joint.kron(if one { &sigma1 } else { &sigma0 });
        }
        let zeros: Vec<usize> = bits
            .iter()
            .enumerate()
            .filter(|(_, &one)| !one)
            .map(|(i, _)| i)
            .collect();
        if zeros.is_empty() {
            actual_fail.add_assign_scaled(&joint, p);
        } else {
            let w = p / zeros.len() as f64;
            for &m in &zeros {
                actual_msg[m].add_assign_scaled(&joint, w);
            }
        }
    }

    // Simulator record.
    let p_fail = (1.0 - q0).powi(copies as i32);
    let mut sim_fail = CMat::identity(1);
    for _ in 0..copies {
        sim_fail = sim_fail.kron(&mixed);
    }
    let sim_fail = sim_fail.scale_re(p_fail);
    let mut gap = 0.5 * actual_fail.sub(&sim_fail).trace_norm_h();
    for m in 0..copies {
        let mut sim = CMat::identity(1);
        for i in 0..copies {
            sim = sim.kron(if i == m { &sigma0 } else { &mixed });
        }
        let sim = sim.scale_re((1.0 - p_fail) / copies as f64);
        gap += 0.5 * actual_msg[m].sub(&sim).trace_norm_h();
    }
    Ok(gap)
}

/// The error parameter the column method is designed for: ε = 2^{−K/D},
/// the smallest ε with log K ≥ log D + log log(1/ε); the failure
/// probability (1−1/D)^K never exceeds it.
pub fn column_epsilon(d: usize, copies: usize) -> f64 {
    2f64.powf(-(copies as f64) / d as f64)
}

// ---------------------------------------------------------------------------
// Entangled-state preparation (single round)
// ---------------------------------------------------------------------------

/// Everything one round of the entangled-ensemble protocol produced,
/// besides the transcript itself.
pub struct EntangledRound {
    pub transcript: Transcript,
    /// Dimension of the typical subspace the round ran on.
    pub typical_dim: usize,
    /// tr π_I, at least 1 − 2ε_typ.
    pub tr_pi: f64,
    /// Larger of the typicality shortfalls 1 − tr(φΠ(I)) and 1 − tr(φΠ).
    pub eps_typ: f64,
    /// Fidelity guarantee from the gentle-measurement argument.
    pub fidelity_bound: f64,
    /// Number of unitaries actually used.
    pub k_used: usize,
}

/// Parameters of [`entangled_rsp_round`]. The default unitary count is the
/// union-bound formula K = ⌈(1 + n log₂ m + log₂ D) · 2/((1−2ε)ε²) ·
/// 2^{n(χ+2δ)}⌉; the union bound over a whole type class is much looser
/// than one instance needs, so callers may override K.
#[derive(Debug, Clone)]
pub struct EntangledParams {
    pub delta: f64,
    pub epsilon: f64,
    pub k_override: Option<usize>,
    pub dim_budget: usize,
    pub k_budget: usize,
}

impl Default for EntangledParams {
    fn default() -> Self {
        EntangledParams {
            delta: 0.3,
            epsilon: 0.25,
            k_override: None,
            dim_budget: 4096,
            k_budget: 1 << 16,
        }
    }
}

/// One round of the entangled-ensemble protocol on input string `letters`:
/// build the typical projector of the average state and the conditionally
/// typical projector of φ_I, cut φ_I down to π_I, randomize its transpose
/// on the typical subspace, measure non-destructively on Φ there via the
/// square-root (Lüders) instrument, and undo the announced unitary.
/// Conditional on success the parties share a purification of
/// π_I / tr π_I, which the sender turns into a high-fidelity copy of φ_I
/// with her Uhlmann unitary; the reported fidelity is that optimum,
/// F(π_I/tr π_I, φ_I^B).
pub fn entangled_rsp_round(
    letters: &[usize],
    ensemble: &BipartiteEnsemble,
    params: &EntangledParams,
    rng: &mut Rng,
) -> Result<EntangledRound> {
    let n = letters.len();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "need a nonempty input string".into(),
        ));
    }
    let m = ensemble.len();
    for &l in letters {
        if l >= m {
            return Err(Error::InvalidParameter(format!("letter {l} out of range")));
        }
    }
    let db = ensemble.d_b();
    let full_dim = (db as f64).powi(n as i32);
    if full_dim > params.dim_budget as f64 {
        return Err(Error::BudgetExceeded(format!(
            "d_B^n = {full_dim} exceeds budget {}",
            params.dim_budget
        )));
    }

    // Type check: abort on atypical inputs.
    let q = typicality::TypeVector::of(letters, m);
    let l1: f64 = (0..m)
        .map(|i| (ensemble.probs()[i] - q.frequency(i)).abs())
        .sum();
    if l1 > params.delta + 1e-12 {
        return Err(Error::Abort(format!(
            "input type is {l1:.4} away from p in ℓ₁, over δ = {}",
            params.delta
        )));
    }

    // Per-letter receiver states and their eigensystems.
    let w: Vec<DensityOperator> = (0..m).map(|i| ensemble.receiver_state(i)).collect();
    let eig_w: Vec<(Vec<f64>, CMat)> = w.iter().map(|s| s.matrix().eig_h()).collect();
    let rho = DensityOperator::mixture(
        &(0..m)
            .map(|i| (q.frequency(i), w[i].clone()))
            .collect::<Vec<_>>(),
    )?;
    let (mu, u_rho) = rho.matrix().eig_h();
    let s_rho = crate::qmath::entropy_bits(&mu);
    let h_cond: f64 = (0..m)
        .map(|i| q.frequency(i) * crate::qmath::entropy_bits(&eig_w[i].0))
        .sum();
    let chi = s_rho - h_cond;

    // Typical sequences of ρ^{⊗n} and conditionally typical sequences of
    // φ_I, by exact eigenvalue products.
    let typical = typicality::windowed_sequences(&vec![mu.clone(); n], s_rho, params.delta);
    let d_typ = typical.len();
    if d_typ == 0 {
        return Err(Error::InvalidState(
            "typical subspace is empty; raise δ".into(),
        ));
    }
    let site_vals: Vec<Vec<f64>> = letters.iter().map(|&l| eig_w[l].0.clone()).collect();
    let ctyp = typicality::windowed_sequences(&site_vals, h_cond, params.delta);
    if ctyp.is_empty() {
        return Err(Error::InvalidState(
            "conditionally typical set is empty; raise δ".into(),
        ));
    }

    // Typicality shortfalls ε_typ.
    let mut tr_phi_ctyp = 0.0;
    for t in &ctyp {
        let mut prod = 1.0;
        for (k, &tk) in t.iter().enumerate() {
            prod *= site_vals[k][tk];
        }
        tr_phi_ctyp += prod;
    }
    // ⟨e_a| W_{I_k} |e_a⟩ per site and ρ-eigenvector.
    let diag_overlap: Vec<Vec<f64>> = letters
        .iter()
        .map(|&l| {
            (0..db)
                .map(|a| {
                    let col: Vec<C64> = (0..db).map(|r| u_rho[(r, a)]).collect();
                    let wv = w[l].matrix().matvec(&col);
                    crate::linalg::vdot(&col, &wv).re
                })
                .collect()
        })
        .collect();
    let mut tr_phi_typ = 0.0;
    for a in &typical {
        let mut prod = 1.0;
        for (k, &ak) in a.iter().enumerate() {
            prod *= diag_overlap[k][ak];
        }
        tr_phi_typ += prod;
    }
    let eps_typ = (1.0 - tr_phi_ctyp).max(1.0 - tr_phi_typ).max(0.0);

    // π_I in typical-subspace coordinates via the Gram factor
    // A[a,t] = ⟨e_a|f_t⟩ √μ_t.
    let overlaps: Vec<CMat> = letters
        .iter()
        .map(|&l| u_rho.dagger().mul(&eig_w[l].1))
        .collect();
    let gram = |seq_a: &[usize], seq_t: &[usize]| -> C64 {
        let mut prod = ONE;
        for k in 0..n {
            prod *= overlaps[k][(seq_a[k], seq_t[k])];
        }
        prod
    };
    let mut a_mat = CMat::zeros(d_typ, ctyp.len());
    for (ai, a) in typical.iter().enumerate() {
        for (ti, t) in ctyp.iter().enumerate() {
            let mut weight = 1.0;
            for (k, &tk) in t.iter().enumerate() {
                weight *= site_vals[k][tk];
            }
            a_mat[(ai, ti)] = gram(a, t) * weight.max(0.0).sqrt();
        }
    }
    let pi = a_mat.mul(&a_mat.dagger());
    let tr_pi = pi.trace().re;
    if tr_pi < 1e-9 {
        return Err(Error::InvalidState("π_I has vanishing trace".into()));
    }

    // The unitary family for this type class.
    let k_used = match params.k_override {
        Some(k) => k.max(1),
        None => {
            if params.epsilon >= 0.5 {
                return Err(Error::InvalidParameter(
                    "the default unitary-count formula needs ε < 1/2".into(),
                ));
            }
            let bits = 1.0 + n as f64 * (m as f64).log2() + (d_typ as f64).log2();
            let count = bits * 2.0 / ((1.0 - 2.0 * params.epsilon) * params.epsilon.powi(2))
                * 2f64.powf(n as f64 * (chi + 2.0 * params.delta));
            if count > params.k_budget as f64 {
                return Err(Error::BudgetExceeded(format!(
                    "formula asks for K ≈ {count:.3e} unitaries; pass k_override"
                )));
            }
            count.ceil() as usize
        }
    };
    let unitaries: Vec<Unitary> = {
        let base = rng.split(0xEB17);
        (0..k_used)
            .into_par_iter()
            .map(|j| haar_unitary(d_typ, &mut base.split(j as u64)))
            .collect()
    };

    // POVM on the typical subspace: A_k = D/(K(1+ε) tr π) U_k πᵀ U_k*.
    let coeff = d_typ as f64 / (k_used as f64 * (1.0 + params.epsilon) * tr_pi);
    let pi_t = pi.transpose();
    let a_ops: Vec<CMat> = unitaries
        .par_iter()
        .map(|u| {
            u.matrix()
                .mul(&pi_t)
                .mul(&u.matrix().dagger())
                .scale_re(coeff)
        })
        .collect();
    let mut failure = CMat::identity(d_typ);
    for a in &a_ops {
        failure = failure.sub(a);
    }
    let min_eig = failure.min_eig_h();
    if min_eig < -1e-9 {
        return Err(Error::NotRandomizing(format!(
            "sampled family leaves A_failure with eigenvalue {min_eig:.3e}; raise K"
        )));
    }

    // Outcome distribution on the maximally entangled state of the typical
    // subspace; each A_k fires with probability tr(A_k)/D.
    let probs: Vec<f64> = a_ops
        .iter()
        .map(|a| (a.trace().re / d_typ as f64).max(0.0))
        .collect();
    let x = rng.uniform();
    let mut acc = 0.0;
    let mut outcome = None;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            outcome = Some(i);
            break;
        }
    }

    // Resource accounting: announcing the type costs log₂(#types) cbits.
    let type_cbits = (typicality::type_count(n, m) as f64).log2();
    let cbits = ((k_used + 1) as f64).log2() + type_cbits;
    let ebits = (d_typ as f64).log2();
    let pi_norm = DensityOperator::new(pi.scale_re(1.0 / tr_pi).hermitize())?;

    // φ_I compressed to the typical subspace; the Uhlmann optimum over the
    // sender's purifying unitaries is F(π/tr π, φ_I^B), and φ_I's weight
    // outside the subspace scales the compressed normalization back.
    let full = db.pow(n as u32);
    let mut b_full = CMat::zeros(d_typ, full);
    enumerate_sequences(db, n, |t| {
        let mut weight = 1.0;
        for (k, &tk) in t.iter().enumerate() {
            weight *= site_vals[k][tk];
        }
        if weight <= 0.0 {
            return;
        }
        let col = t.iter().fold(0usize, |acc2, &tk| acc2 * db + tk);
        let root = weight.sqrt();
        for (ai, a) in typical.iter().enumerate() {
            b_full[(ai, col)] = gram(a, t) * root;
        }
    });
    let phi_tt = b_full.mul(&b_full.dagger());
    let renorm = phi_tt.trace().re;
    let fid = if renorm > 1e-12 {
        let sigma_tt = DensityOperator::new(phi_tt.scale_re(1.0 / renorm).hermitize())?;
        fidelity(&pi_norm, &sigma_tt)? * renorm
    } else {
        0.0
    };
    let fidelity_bound = 1.0 - (8.0 * (2.0 * eps_typ)).sqrt() - (2.0 * eps_typ + 1e-9);

    let (message, success) = match outcome {
        Some(i) => (Message::Value(i), true),
        None => (Message::Failure, false),
    };
    let transcript = Transcript {
        protocol: "entangled".into(),
        input: format!("letters {letters:?} on ensemble of {m}"),
        message,
        receiver_output: pi_norm,
        success,
        cbits_sent: cbits,
        ebits_consumed: ebits,
        fidelity_to_target: if success { fid } else { 0.0 },
        expected_cbits: None,
    };
    Ok(EntangledRound {
        transcript,
        typical_dim: d_typ,
        tr_pi,
        eps_typ,
        fidelity_bound,
        k_used,
    })
}

fn enumerate_sequences(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; len];
    loop {
        f(&seq);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            seq[k] += 1;
            if seq[k] < base {
                break;
            }
            seq[k] = 0;
        }
    }
}
