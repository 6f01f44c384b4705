//! Entropic trade-off curves: evaluation of the rate/value functionals
//! over auxiliary classical channels, their minimization at fixed cbit
//! rate, a brute-force grid oracle, additivity and worst-case-ensemble
//! sweeps, and the causality bound.
//!
//! The state behind every quantity is
//! ω = Σ_i p_i |i⟩⟨i|^A ⊗ ψ_i^B ⊗ Σ_j p(j|i)|j⟩⟨j|^C
//! (with an extra sender register A and classical X in the bipartite
//! case). Because A/X and C are classical, every entropic quantity
//! reduces to Shannon terms plus average entropies of the conditional
//! receiver states σ_j; the fast evaluator computes those directly and is
//! cross-checked against the generic multipartite route in tests:
//!   qct:        R = S(A:C) = I(A;C),    value = S(A:B|C) = Σ_j q_j S(σ_j)
//!   rsp:        R = S(A:BC) = I + val,  value = S(A:B|C)
//!   entangled:  R = S(X:BC) = I + Σ_j q_j S(σ_j^B) − Σ_i p_i S(φ_i^B),
//!               value = S(B|C) = Σ_j q_j S(σ_j^B)

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::qmath::{entropy_bits, shannon_entropy, DensityOperator, LabeledState, PureState};
use crate::sampling::Rng;

/// Weighted pure states on one system.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        validate_distribution(&probs, states.len())?;
        let d = states.first().map(|s| s.dim()).unwrap_or(0);
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(d, 0));
        }
        Ok(Ensemble { probs, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    /// Average state Σ p_i ψ_i.
    pub fn average_state(&self) -> DensityOperator {
        let parts: Vec<(f64, DensityOperator)> = self
            .probs
            .iter()
            .zip(&self.states)
            .map(|(&p, s)| (p, s.density()))
            .collect();
        DensityOperator::mixture(&parts).expect("valid mixture")
    }

    /// With the same states but different weights.
    pub fn reweighted(&self, probs: Vec<f64>) -> Result<Ensemble> {
        Ensemble::new(probs, self.states.clone())
    }
}

/// Weighted pure states on A⊗B with an explicit cut.
#[derive(Debug, Clone)]
pub struct BipartiteEnsemble {
    probs: Vec<f64>,
    states: Vec<PureState>,
    d_a: usize,
    d_b: usize,
}

impl BipartiteEnsemble {
    pub fn new(probs: Vec<f64>, states: Vec<PureState>, d_a: usize, d_b: usize) -> Result<Self> {
        validate_distribution(&probs, states.len())?;
        if states.iter().any(|s| s.dim() != d_a * d_b) {
            return Err(Error::DimensionMismatch(d_a * d_b, states[0].dim()));
        }
        Ok(BipartiteEnsemble {
            probs,
            states,
            d_a,
            d_b,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    /// φ_i^B = Tr_A φ_i.
    pub fn receiver_state(&self, i: usize) -> DensityOperator {
        let labeled = LabeledState::new(
            vec![("A".into(), self.d_a), ("B".into(), self.d_b)],
            self.states[i].projector(),
            std::iter::empty(),
        )
        .expect("member state is valid");
        labeled
            .partial_trace(&["B"])
            .expect("labels exist")
            .density()
    }
}

fn validate_distribution(probs: &[f64], expected: usize) -> Result<()> {
    if probs.is_empty() || probs.len() != expected {
        return Err(Error::InvalidParameter(
            "probs and states must align".into(),
        ));
    }
    if probs.iter().any(|&p| p < -1e-12) {
        return Err(Error::InvalidParameter("negative probability".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// Stochastic matrix p(j|i): rows indexed by ensemble members.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    rows: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidParameter(
                "channel needs rows and columns".into(),
            ));
        }
        let cols = rows[0].len();
        for row in &rows {
            if row.len() != cols {
                return Err(Error::InvalidParameter("ragged channel rows".into()));
            }
            if row.iter().any(|&x| x < -1e-12) {
                return Err(Error::InvalidParameter("negative channel entry".into()));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "channel row sums to {total}"
                )));
            }
        }
        Ok(ClassicalChannel { rows })
    }

    /// |J| = 1: everything maps to one symbol.
    pub fn trivial(inputs: usize) -> Self {
        ClassicalChannel {
            rows: vec![vec![1.0]; inputs],
        }
    }

    /// j = i on `cols` ≥ inputs symbols.
    pub fn identity(inputs: usize, cols: usize) -> Self {
        assert!(cols >= inputs);
        let rows = (0..inputs)
            .map(|i| {
                let mut row = vec![0.0; cols];
                row[i] = 1.0;
                row
            })
            .collect();
        ClassicalChannel { rows }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    /// Post-process the output by another channel: p'(j'|i) = Σ_j T(j'|j)p(j|i).
    pub fn compose(&self, post: &ClassicalChannel) -> Result<ClassicalChannel> {
        if post.inputs() != self.outputs() {
            return Err(Error::DimensionMismatch(self.outputs(), post.inputs()));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..post.outputs())
                    .map(|j2| (0..post.inputs()).map(|j| row[j] * post.get(j, j2)).sum())
                    .collect()
            })
            .collect();
        ClassicalChannel::new(rows)
    }

    /// p((j,j')|(i,i')) = p₁(j|i)·p₂(j'|i'), the product-channel witness of
    /// the additivity relation.
    pub fn tensor(&self, other: &ClassicalChannel) -> ClassicalChannel {
        let mut rows = Vec::with_capacity(self.inputs() * other.inputs());
        for r1 in &self.rows {
            for r2 in &other.rows {
                let mut row = Vec::with_capacity(r1.len() * r2.len());
                for &a in r1 {
                    for &b in r2 {
                        row.push(a * b);
                    }
                }
                rows.push(row);
            }
        }
        ClassicalChannel { rows }
    }

    /// FNV-1a over the entry bit patterns, for curve-file sidecars.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut mix = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x100000001b3);
        };
        mix(self.inputs() as u64);
        mix(self.outputs() as u64);
        for row in &self.rows {
            for &x in row {
                mix(x.to_bits());
            }
        }
        h
    }
}

/// Which curve a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Quantum–classical trade-off Q*(R).
    QStar,
    /// Remote-state-preparation trade-off E*(R).
    EStar,
    /// Entangled-ensemble trade-off (minimum of S(B|C)).
    EntangledN,
}

/// One solved point of a trade-off curve.
#[derive(Debug, Clone)]
pub struct TradeoffPoint {
    pub r: f64,
    pub value: f64,
    pub channel: ClassicalChannel,
    pub kind: CurveKind,
}

// ---------------------------------------------------------------------------
// Assembled states and the generic evaluation route
// ---------------------------------------------------------------------------

/// ω = Σ_i p_i |i⟩⟨i|^A ⊗ ψ_i^B ⊗ Σ_j p(j|i)|j⟩⟨j|^C with A and C
/// classical.
pub fn assemble_omega(ensemble: &Ensemble, channel: &ClassicalChannel) -> Result<LabeledState> {
    if channel.inputs() != ensemble.len() {
        return Err(Error::DimensionMismatch(ensemble.len(), channel.inputs()));
    }
    let m = ensemble.len();
    let d = ensemble.dim();
    let jn = channel.outputs();
    let total = m * d * jn;
    let mut mat = CMat::zeros(total, total);
    for i in 0..m {
        let proj = ensemble.states()[i].projector();
        for j in 0..jn {
            let w = ensemble.probs()[i] * channel.get(i, j);
            if w <= 0.0 {
                continue;
            }
            for b1 in 0..d {
                for b2 in 0..d {
                    let row = (i * d + b1) * jn + j;
                    let col = (i * d + b2) * jn + j;
                    mat[(row, col)] += proj[(b1, b2)] * w;
                }
            }
        }
    }
    LabeledState::new(
        vec![("A".into(), m), ("B".into(), d), ("C".into(), jn)],
        mat,
        ["A".to_string(), "C".to_string()],
    )
}

/// The 4-partite ω for bipartite ensembles: classical X, the member state
/// on A⊗B, and classical C.
pub fn assemble_omega_bipartite(
    ensemble: &BipartiteEnsemble,
    channel: &ClassicalChannel,
) -> Result<LabeledState> {
    if channel.inputs() != ensemble.len() {
        return Err(Error::DimensionMismatch(ensemble.len(), channel.inputs()));
    }
    let m = ensemble.len();
    let dab = ensemble.d_a() * ensemble.d_b();
    let jn = channel.outputs();
    let total = m * dab * jn;
    let mut mat = CMat::zeros(total, total);
    for i in 0..m {
        let proj = ensemble.states()[i].projector();
        for j in 0..jn {
            let w = ensemble.probs()[i] * channel.get(i, j);
            if w <= 0.0 {
                continue;
            }
            for b1 in 0..dab {
                for b2 in 0..dab {
                    let row = (i * dab + b1) * jn + j;
                    let col = (i * dab + b2) * jn + j;
                    mat[(row, col)] += proj[(b1, b2)] * w;
                }
            }
        }
    }
    let state = LabeledState::new(
        vec![("X".into(), m), ("AB".into(), dab), ("C".into(), jn)],
        mat,
        ["X".to_string(), "C".to_string()],
    )?;
    // Re-label AB into its two factors.
    split_ab(state, ensemble.d_a(), ensemble.d_b())
}

fn split_ab(state: LabeledState, d_a: usize, d_b: usize) -> Result<LabeledState> {
    let parts: Vec<(String, usize)> = state
        .parts()
        .iter()
        .flat_map(|(n, d)| {
            if n == "AB" {
                vec![("A".to_string(), d_a), ("B".to_string(), d_b)]
            } else {
                vec![(n.clone(), *d)]
            }
        })
        .collect();
    LabeledState::new(
        parts,
        state.matrix().clone(),
        state.classical_labels().iter().cloned(),
    )
}

/// (R, Q) of the quantum–classical trade-off at one channel, via the
/// generic multipartite route.
pub fn eval_qct_point(ensemble: &Ensemble, channel: &ClassicalChannel) -> Result<(f64, f64)> {
    let omega = assemble_omega(ensemble, channel)?;
    let r = omega.mutual_info(&["A"], &["C"])?;
    let q = omega.cond_mutual_info(&["A"], &["B"], &["C"])?;
    Ok((r.max(0.0), q.max(0.0)))
}

/// (R, E) of the r.s.p. trade-off at one channel: R = S(A:BC),
/// E = S(A:B|C).
pub fn eval_rsp_point(ensemble: &Ensemble, channel: &ClassicalChannel) -> Result<(f64, f64)> {
    let omega = assemble_omega(ensemble, channel)?;
    let r = omega.mutual_info(&["A"], &["B", "C"])?;
    let e = omega.cond_mutual_info(&["A"], &["B"], &["C"])?;
    Ok((r.max(0.0), e.max(0.0)))
}

/// (R, E) of the entangled-ensemble trade-off: R = S(X:BC), E = S(B|C).
pub fn eval_entangled_point(
    ensemble: &BipartiteEnsemble,
    channel: &ClassicalChannel,
) -> Result<(f64, f64)> {
    let omega = assemble_omega_bipartite(ensemble, channel)?;
    let r = omega.mutual_info(&["X"], &["B", "C"])?;
    let e = omega.cond_entropy(&["B"], &["C"])?;
    Ok((r.max(0.0), e.max(0.0)))
}

/// The curve transformer behind E*(R + Q*(R)) ≤ Q*(R): a q.c.t. point
/// (R, Q) becomes the r.s.p. point (R + Q, Q).
pub fn qct_to_rsp_point(r: f64, q: f64) -> (f64, f64) {
    (r + q, q)
}

// ---------------------------------------------------------------------------
// Fast evaluator
// ---------------------------------------------------------------------------

/// Closed-form evaluator for one ensemble and curve kind; the solver and
/// oracle call this thousands of times per point.
pub struct CurveEval {
    kind: CurveKind,
    probs: Vec<f64>,
    /// ψ_i (or φ_i^B) as matrices.
    site_mats: Vec<CMat>,
    /// S(φ_i^B); zero for pure ensembles.
    site_entropies: Vec<f64>,
    d: usize,
}

impl CurveEval {
    pub fn for_ensemble(ensemble: &Ensemble, kind: CurveKind) -> Result<Self> {
        if kind == CurveKind::EntangledN {
            return Err(Error::InvalidParameter(
                "entangled curve needs a bipartite ensemble".into(),
            ));
        }
        Ok(CurveEval {
            kind,
            probs: ensemble.probs().to_vec(),
            site_mats: ensemble.states().iter().map(|s| s.projector()).collect(),
            site_entropies: vec![0.0; ensemble.len()],
            d: ensemble.dim(),
        })
    }

    pub fn for_bipartite(ensemble: &BipartiteEnsemble) -> Result<Self> {
        let mats: Vec<CMat> = (0..ensemble.len())
            .map(|i| ensemble.receiver_state(i).matrix().clone())
            .collect();
        let entropies: Vec<f64> = mats.iter().map(matrix_entropy).collect();
        Ok(CurveEval {
            kind: CurveKind::EntangledN,
            probs: ensemble.probs().to_vec(),
            site_mats: mats,
            site_entropies: entropies,
            d: ensemble.d_b(),
        })
    }

    pub fn members(&self) -> usize {
        self.probs.len()
    }

    /// (rate, value) at one channel.
    pub fn eval(&self, channel: &ClassicalChannel) -> (f64, f64) {
        let m = self.members();
        let jn = channel.outputs();
        let mut qj = vec![0.0f64; jn];
        for i in 0..m {
            for j in 0..jn {
                qj[j] += self.probs[i] * channel.get(i, j);
            }
        }
        // I(A;C) = H(qj) − Σ_i p_i H(row_i).
        let mut info = shannon_entropy(&qj);
        for i in 0..m {
            info -= self.probs[i] * shannon_entropy(&channel.rows()[i]);
        }
        let info = info.max(0.0);
        // Σ_j q_j S(σ_j).
        let mut avg_cond = 0.0;
        for j in 0..jn {
            if qj[j] <= 1e-15 {
                continue;
            }
            let mut sigma = CMat::zeros(self.d, self.d);
            for i in 0..m {
                let w = self.probs[i] * channel.get(i, j) / qj[j];
                if w > 0.0 {
                    sigma.add_assign_scaled(&self.site_mats[i], w);
                }
            }
            avg_cond += qj[j] * matrix_entropy(&sigma);
        }
        match self.kind {
            CurveKind::QStar => (info, avg_cond.max(0.0)),
            CurveKind::EStar => ((info + avg_cond).max(0.0), avg_cond.max(0.0)),
            CurveKind::EntangledN => {
                let floor: f64 = self
                    .probs
                    .iter()
                    .zip(&self.site_entropies)
                    .map(|(p, s)| p * s)
                    .sum();
                ((info + avg_cond - floor).max(0.0), avg_cond.max(0.0))
            }
        }
    }

    /// Rate of the trivial channel, the smallest rate any channel attains:
    /// 0 (qct), S(B) (rsp), χ (entangled).
    pub fn min_rate(&self) -> f64 {
        self.eval(&ClassicalChannel::trivial(self.members())).0
    }
}

/// Entropy (bits) of a Hermitian PSD matrix; closed form at d = 2.
fn matrix_entropy(m: &CMat) -> f64 {
    if m.rows() == 2 {
        let tr = (m[(0, 0)] + m[(1, 1)]).re;
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        return entropy_bits(&[(tr + disc) / 2.0, (tr - disc) / 2.0]);
    }
    entropy_bits(&m.eigvals_h())
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

/// Multi-start projected local search on the penalized Lagrangian
/// value + μ·max(0, rate − R)², with a Lagrangian boundary polish and a
/// grid-refinement finisher.
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub starts: usize,
    /// Step of the coarse seeding grid over each channel row.
    pub coarse_step: f64,
    /// Penalty schedule for the rate constraint.
    pub penalties: Vec<f64>,
    /// Stop once the pattern-search step shrinks below this.
    pub min_step: f64,
    /// Rate slack accepted when declaring a candidate feasible.
    pub feasibility_tol: f64,
    /// Resolution of the grid-refinement finisher: every grid channel at
    /// this step is evaluated and the best feasible ones are descended
    /// from, so the solver's search space contains the brute-force grid.
    pub finisher_step: f64,
    /// Skip the finisher when the grid would exceed this many channels.
    pub finisher_budget: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            starts: 16,
            coarse_step: 0.5,
            penalties: vec![30.0, 1000.0, 1e6],
            min_step: 1e-5,
            feasibility_tol: 1e-6,
            finisher_step: 0.05,
            finisher_budget: 2_000_000,
        }
    }
}

/// Cap on the number of coarse-grid seed channels; beyond it the solver
/// falls back to Dirichlet starts only.
const GRID_SEED_BUDGET: usize = 1024;

/// Minimize the curve value at cbit rate ≤ `r`. Returns a `+∞` sentinel
/// point when `r` is below the least rate any channel can reach.
pub fn solve_curve_with(
    eval: &CurveEval,
    r: f64,
    params: &SolverParams,
    rng: &Rng,
) -> TradeoffPoint {
    let m = eval.members();
    let cols = m + 1;
    let kind = eval.kind;
    if r < eval.min_rate() - params.feasibility_tol {
        return TradeoffPoint {
            r,
            value: f64::INFINITY,
            channel: ClassicalChannel::trivial(m),
            kind,
        };
    }

    // Starting channels: canonical, Dirichlet-random, and a coarse grid.
    let mut starts: Vec<ClassicalChannel> = vec![
        ClassicalChannel::trivial(m),
        ClassicalChannel::identity(m, cols),
    ];
    for s in 0..params.starts {
        let mut local = rng.split(7_000 + s as u64);
        let rows = (0..m).map(|_| local.simplex_uniform(cols)).collect();
        starts.push(ClassicalChannel::new(rows).expect("simplex rows"));
    }
    let grid_rows = simplex_grid(cols, params.coarse_step);
    if (grid_rows.len() as f64).powi(m as i32) <= GRID_SEED_BUDGET as f64 {
        let mut index = vec![0usize; m];
        'outer: loop {
            let rows: Vec<Vec<f64>> = index.iter().map(|&i| grid_rows[i].clone()).collect();
            starts.push(ClassicalChannel { rows });
            let mut slot = 0;
            loop {
                if slot == m {
                    break 'outer;
                }
                index[slot] += 1;
                if index[slot] < grid_rows.len() {
                    break;
                }
                index[slot] = 0;
                slot += 1;
            }
        }
    }

    // Grid-refinement finisher seeds: scan the full grid at the finisher
    // resolution and keep the best feasible channels for refinement.
    let fine_rows = simplex_grid(cols, params.finisher_step);
    if (fine_rows.len() as f64).powi(m as i32) <= params.finisher_budget as f64 {
        let mut scored: Vec<(f64, ClassicalChannel)> = Vec::new();
        let mut index = vec![0usize; m];
        'scan: loop {
            let rows: Vec<Vec<f64>> = index.iter().map(|&i| fine_rows[i].clone()).collect();
            let channel = ClassicalChannel { rows };
            let (rate, value) = eval.eval(&channel);
            if rate <= r + 1e-9 {
                scored.push((value, channel));
            }
            let mut slot = 0;
            loop {
                if slot == m {
                    break 'scan;
                }
                index[slot] += 1;
                if index[slot] < fine_rows.len() {
                    break;
                }
                index[slot] = 0;
                slot += 1;
            }
        }
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        starts.extend(scored.into_iter().take(4).map(|(_, ch)| ch));
    }

    // Stage one: penalty descent plus feasible polish from every start;
    // stage two: Lagrangian boundary polish on the leading candidates.
    let mut funnel: Vec<(f64, f64, ClassicalChannel)> = starts
        .par_iter()
        .map(|start| descend(eval, start.clone(), r, params))
        .collect();
    funnel.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let polished: Vec<(f64, f64, ClassicalChannel)> = funnel
        .iter()
        .take(6)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(_, _, ch)| lagrangian_polish(eval, ch.clone(), r, params))
        .collect();
    let best = funnel
        .into_iter()
        .chain(polished)
        .filter(|(rate, _, _)| *rate <= r + params.feasibility_tol)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    match best {
        Some((_, value, channel)) => TradeoffPoint {
            r,
            value: value.max(0.0),
            channel,
            kind,
        },
        None => TradeoffPoint {
            r,
            value: f64::INFINITY,
            channel: ClassicalChannel::trivial(m),
            kind,
        },
    }
}

/// Convenience front-end building the evaluator from a pure-state
/// ensemble.
pub fn solve_curve(
    ensemble: &Ensemble,
    r: f64,
    kind: CurveKind,
    params: &SolverParams,
    rng: &Rng,
) -> Result<TradeoffPoint> {
    let eval = CurveEval::for_ensemble(ensemble, kind)?;
    Ok(solve_curve_with(&eval, r, params, rng))
}

pub fn solve_curve_bipartite(
    ensemble: &BipartiteEnsemble,
    r: f64,
    params: &SolverParams,
    rng: &Rng,
) -> Result<TradeoffPoint> {
    let eval = CurveEval::for_bipartite(ensemble)?;
    Ok(solve_curve_with(&eval, r, params, rng))
}

/// Pattern search over simplex-preserving mass moves, with the penalty
/// schedule and a final feasible polish.
fn descend(
    eval: &CurveEval,
    start: ClassicalChannel,
    r: f64,
    params: &SolverParams,
) -> (f64, f64, ClassicalChannel) {
    // A feasible start is itself a candidate; refinement must never lose
    // to its own seed.
    let (seed_rate, seed_value) = eval.eval(&start);
    let seed = start.clone();
    let mut current = start;
    for &mu in &params.penalties {
        let objective = |ch: &ClassicalChannel| {
            let (rate, value) = eval.eval(ch);
            value + mu * (rate - r).max(0.0).powi(2)
        };
        current = pattern_search(current, &objective, params.min_step);
    }
    let feasible_objective = |ch: &ClassicalChannel| {
        let (rate, value) = eval.eval(ch);
        if rate <= r + params.feasibility_tol {
            value
        } else {
            f64::INFINITY
        }
    };
    current = pattern_search(current, &feasible_objective, params.min_step);
    let (rate, value) = eval.eval(&current);
    if seed_rate <= r + 1e-9 && seed_value < value {
        return (seed_rate, seed_value, seed);
    }
    (rate, value, current)
}

/// Lagrangian boundary polish: the constrained optimum sits where the
/// unconstrained minimizer of value + λ·rate exhausts the rate budget, so
/// bisect λ, warm-starting each inner search from the previous one.
fn lagrangian_polish(
    eval: &CurveEval,
    start: ClassicalChannel,
    r: f64,
    params: &SolverParams,
) -> (f64, f64, ClassicalChannel) {
    let (mut best_rate, mut best_value) = eval.eval(&start);
    let mut best = start.clone();
    let mut current = start;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..40 {
        let obj = |ch: &ClassicalChannel| {
            let (rate, value) = eval.eval(ch);
            value + hi * rate
        };
        current = pattern_search(current, &obj, params.min_step);
        if eval.eval(&current).0 <= r {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..48 {
        let lambda = 0.5 * (lo + hi);
        let obj = |ch: &ClassicalChannel| {
            let (rate, value) = eval.eval(ch);
            value + lambda * rate
        };
        current = pattern_search(current, &obj, params.min_step);
        let (rate, value) = eval.eval(&current);
        if rate <= r + params.feasibility_tol {
            if value < best_value {
                best_value = value;
                best_rate = rate;
                best = current.clone();
            }
            hi = lambda;
        } else {
            lo = lambda;
        }
    }
    (best_rate, best_value, best)
}

fn pattern_search(
    mut current: ClassicalChannel,
    objective: &dyn Fn(&ClassicalChannel) -> f64,
    min_step: f64,
) -> ClassicalChannel {
    let m = current.inputs();
    let cols = current.outputs();
    let mut best = objective(&current);
    let mut step = 0.25f64;
    while step >= min_step {
        let mut improved = false;
        for i in 0..m {
            for from in 0..cols {
                for to in 0..cols {
                    if to == from {
                        continue;
                    }
                    // Walk a working move repeatedly: mass moves commute,
                    // so a productive direction is followed at one eval per
                    // step instead of a full sweep.
                    while current.rows[i][from] >= step {
                        current.rows[i][from] -= step;
                        current.rows[i][to] += step;
                        let v = objective(&current);
                        if v < best - 1e-14 {
                            best = v;
                            improved = true;
                        } else {
                            current.rows[i][from] += step;
                            current.rows[i][to] -= step;
                            break;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    current
}

/// All points of the probability simplex on `cols` coordinates with grid
/// resolution `step` (1/step must be close to an integer).
fn simplex_grid(cols: usize, step: f64) -> Vec<Vec<f64>> {
    let g = (1.0 / step).round() as usize;
    let mut out = Vec::new();
    let mut counts = vec![0usize; cols];
    fn recurse(
        slot: usize,
        left: usize,
        counts: &mut Vec<usize>,
        g: usize,
        out: &mut Vec<Vec<f64>>,
    ) {
        if slot + 1 == counts.len() {
            counts[slot] = left;
            out.push(counts.iter().map(|&c| c as f64 / g as f64).collect());
            return;
        }
        for c in 0..=left {
            counts[slot] = c;
            recurse(slot + 1, left - c, counts, g, out);
        }
    }
    recurse(0, g, &mut counts, g, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Exhaustive minimum over the channel grid with the given step; an upper
/// bound on the true curve that tightens as the step shrinks. The
/// `budget` caps the number of grid channels.
pub fn brute_force_oracle(eval: &CurveEval, r: f64, grid_step: f64, budget: usize) -> Result<f64> {
    Ok(oracle_sweep(eval, &[r], grid_step, budget)?[0])
}

/// One pass over the grid serving many R thresholds at once.
pub fn oracle_sweep(
    eval: &CurveEval,
    rs: &[f64],
    grid_step: f64,
    budget: usize,
) -> Result<Vec<f64>> {
    let m = eval.members();
    let cols = m + 1;
    let rows = simplex_grid(cols, grid_step);
    let total = (rows.len() as f64).powi(m as i32);
    if total > budget as f64 {
        return Err(Error::BudgetExceeded(format!(
            "{total:.3e} grid channels exceed the budget {budget}"
        )));
    }
    let mut sorted: Vec<(usize, f64)> = rs.iter().cloned().enumerate().collect();
    sorted.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let thresholds: Vec<f64> = sorted.iter().map(|&(_, r)| r).collect();

    // Parallelize over the first row; each worker scans the remaining
    // row combinations and keeps per-threshold minima.
    let minima = (0..rows.len())
        .into_par_iter()
        .map(|first| {
            let mut mins = vec![f64::INFINITY; thresholds.len()];
            let mut index = vec![0usize; m - 1];
            let mut channel = ClassicalChannel {
                rows: std::iter::once(rows[first].clone())
                    .chain((0..m - 1).map(|_| rows[0].clone()))
                    .collect(),
            };
            loop {
                for (slot, &i) in index.iter().enumerate() {
                    channel.rows[slot + 1] = rows[i].clone();
                }
                let (rate, value) = eval.eval(&channel);
                // The first feasible threshold and everything above it.
                let pos = thresholds.partition_point(|&t| t < rate - 1e-9);
                if pos < mins.len() && value < mins[pos] {
                    mins[pos] = value;
                }
                if m == 1 {
                    break;
                }
                let mut slot = 0;
                loop {
                    if slot == m - 1 {
                        return mins;
                    }
                    index[slot] += 1;
                    if index[slot] < rows.len() {
                        break;
                    }
                    index[slot] = 0;
                    slot += 1;
                }
            }
            mins
        })
        .reduce(
            || vec![f64::INFINITY; thresholds.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.min(y);
                }
                a
            },
        );

    // Prefix-minimize: feasible at threshold t means feasible at every
    // larger t.
    let mut running = f64::INFINITY;
    let mut by_sorted = Vec::with_capacity(thresholds.len());
    for &v in &minima {
        running = running.min(v);
        by_sorted.push(running.max(0.0));
    }
    let mut out = vec![f64::INFINITY; rs.len()];
    for (slot, &(orig, _)) in sorted.iter().enumerate() {
        out[orig] = if minima.iter().take(slot + 1).all(|v| v.is_infinite()) {
            f64::INFINITY
        } else {
            by_sorted[slot]
        };
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Additivity, AVS, endpoints, causality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AdditivityReport {
    /// Solver value on the product ensemble at rate R (an upper estimate
    /// of the true minimum, solver tolerance applies).
    pub lhs: f64,
    /// min over splits R₁+R₂ = R of N(ℰ₁,R₁) + N(ℰ₂,R₂).
    pub rhs: f64,
    /// Rate and value of the explicit product channel p₁ ⊗ p₂ of the
    /// split optimizers.
    pub product_rate: f64,
    pub product_value: f64,
    /// The constructive ≤ direction: the product channel is feasible at R
    /// (within the split solves' declared rate slack) and its value
    /// reproduces the split sum exactly, certifying N(ℰ₁⊗ℰ₂, R) ≤ RHS
    /// without solver slack on the value side.
    pub certificate_ok: bool,
    /// |LHS − RHS|, bounded by solver tolerance when the relation holds.
    pub equality_gap: f64,
}

/// Check the additivity relation N(ℰ₁⊗ℰ₂, R) = min over splits, using
/// `splits` split points and the solver on both sides. The trivial
/// direction is certified by evaluating the product channel exactly.
pub fn additivity_check(
    ens1: &Ensemble,
    ens2: &Ensemble,
    r: f64,
    kind: CurveKind,
    splits: usize,
    params: &SolverParams,
    rng: &Rng,
) -> Result<AdditivityReport> {
    if ens1.len() * ens2.len() > 9 {
        return Err(Error::BudgetExceeded(
            "product ensemble beyond m₁·m₂ ≤ 9".into(),
        ));
    }
    let eval1 = CurveEval::for_ensemble(ens1, kind)?;
    let eval2 = CurveEval::for_ensemble(ens2, kind)?;
    let lo1 = eval1.min_rate();
    let lo2 = eval2.min_rate();
    if r < lo1 + lo2 - 1e-9 {
        return Err(Error::InvalidParameter("R below both minimum rates".into()));
    }
    let mut rhs = f64::INFINITY;
    let mut witness: Option<(ClassicalChannel, ClassicalChannel)> = None;
    for s in 0..=splits {
        let r1 = lo1 + (r - lo1 - lo2) * s as f64 / splits as f64;
        let r2 = r - r1;
        let p1 = solve_curve_with(&eval1, r1, params, &rng.split(100 + s as u64));
        let p2 = solve_curve_with(&eval2, r2, params, &rng.split(200 + s as u64));
        let total = p1.value + p2.value;
        if total < rhs {
            rhs = total;
            witness = Some((p1.channel, p2.channel));
        }
    }
    let (ch1, ch2) = witness.ok_or_else(|| Error::InvalidState("no feasible split".into()))?;

    let product = product_ensemble(ens1, ens2)?;
    let eval_prod = CurveEval::for_ensemble(&product, kind)?;
    let product_channel = ch1.tensor(&ch2);
    let (product_rate, product_value) = eval_prod.eval(&product_channel);

    // The product side has m₁m₂(m₁m₂+1) coordinates; a lighter search is
    // enough since the certificate above carries the exact direction.
    let prod_params = SolverParams {
        starts: params.starts.min(8),
        min_step: params.min_step.max(1e-4),
        ..params.clone()
    };
    let lhs = solve_curve_with(&eval_prod, r, &prod_params, &rng.split(999)).value;
    Ok(AdditivityReport {
        lhs,
        rhs,
        product_rate,
        product_value,
        certificate_ok: product_rate <= r + 2.0 * params.feasibility_tol
            && (product_value - rhs).abs() <= 1e-9,
        equality_gap: (lhs - rhs).abs(),
    })
}

/// ℰ₁ ⊗ ℰ₂: all pairwise tensor products with product weights.
pub fn product_ensemble(ens1: &Ensemble, ens2: &Ensemble) -> Result<Ensemble> {
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for (p1, s1) in ens1.probs().iter().zip(ens1.states()) {
        for (p2, s2) in ens2.probs().iter().zip(ens2.states()) {
            probs.push(p1 * p2);
            states.push(s1.tensor(s2));
        }
    }
    Ensemble::new(probs, states)
}

/// Worst-case curve over the convex hull of the given distributions (all
/// over the same state list): sup over a weight grid of the solved value.
pub struct AvsResult {
    pub value: f64,
    pub weights: Vec<f64>,
}

pub fn avs_curve(
    ensembles: &[Ensemble],
    weight_step: f64,
    r: f64,
    kind: CurveKind,
    params: &SolverParams,
    rng: &Rng,
) -> Result<AvsResult> {
    if ensembles.is_empty() {
        return Err(Error::InvalidParameter("need at least one ensemble".into()));
    }
    let states = ensembles[0].states();
    for e in ensembles {
        if e.len() != states.len() {
            return Err(Error::InvalidParameter(
                "AVS members must share the state list".into(),
            ));
        }
        for (a, b) in e.states().iter().zip(states) {
            if a.overlap(b).norm_sqr() < 1.0 - 1e-9 {
                return Err(Error::InvalidParameter(
                    "AVS members must share the state list".into(),
                ));
            }
        }
    }
    let mut best = AvsResult {
        value: f64::NEG_INFINITY,
        weights: vec![],
    };
    for (idx, w) in simplex_grid(ensembles.len(), weight_step)
        .into_iter()
        .enumerate()
    {
        let mut probs = vec![0.0; states.len()];
        for (k, ens) in ensembles.iter().enumerate() {
            for (i, &p) in ens.probs().iter().enumerate() {
                probs[i] += w[k] * p;
            }
        }
        let mixed = ensembles[0].reweighted(probs)?;
        let point = solve_curve(&mixed, r, kind, params, &rng.split(3_000 + idx as u64))?;
        if point.value > best.value {
            best = AvsResult {
                value: point.value,
                weights: w,
            };
        }
    }
    Ok(best)
}

/// The four corner quantities of the entangled trade-off curve.
#[derive(Debug, Clone, Copy)]
pub struct EntangledEndpoints {
    /// χ({p_i, φ_i^B}), where the curve starts.
    pub r_start: f64,
    /// S(Σ p_i φ_i^B), the value at the start.
    pub e_start: f64,
    /// Σ p_i S(φ_i^B), the floor the curve never crosses.
    pub e_floor: f64,
    /// H(p), the rate at which the floor is reached.
    pub r_floor: f64,
}

pub fn entangled_endpoints(ensemble: &BipartiteEnsemble) -> EntangledEndpoints {
    let receiver: Vec<DensityOperator> = (0..ensemble.len())
        .map(|i| ensemble.receiver_state(i))
        .collect();
    let avg = DensityOperator::mixture(
        &ensemble
            .probs()
            .iter()
            .cloned()
            .zip(receiver.iter().cloned())
            .collect::<Vec<_>>(),
    )
    .expect("valid mixture");
    let e_start = crate::qmath::von_neumann_entropy(&avg);
    let e_floor: f64 = ensemble
        .probs()
        .iter()
        .zip(&receiver)
        .map(|(p, w)| p * crate::qmath::von_neumann_entropy(w))
        .sum();
    EntangledEndpoints {
        r_start: e_start - e_floor,
        e_start,
        e_floor,
        r_floor: shannon_entropy(ensemble.probs()),
    }
}

/// C ≥ log₂ D + log₂ F: the classical communication no protocol of
/// fidelity F can beat, back communication or not.
pub fn causality_bound(d: usize, fidelity: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("need D ≥ 1".into()));
    }
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::InvalidParameter("need 0 < F ≤ 1".into()));
    }
    Ok((d as f64).log2() + fidelity.log2())
}

// ---------------------------------------------------------------------------
// Ensemble files
// ---------------------------------------------------------------------------

/// Wire form of ensemble files: `{dims, probs, states: [{re, im}], cut?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub dims: Vec<usize>,
    pub probs: Vec<f64>,
    pub states: Vec<VectorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl EnsembleFile {
    pub fn from_ensemble(ens: &Ensemble) -> Self {
        EnsembleFile {
            dims: vec![ens.dim()],
            probs: ens.probs().to_vec(),
            states: ens.states().iter().map(VectorJson::from_pure).collect(),
            cut: None,
        }
    }

    pub fn from_bipartite(ens: &BipartiteEnsemble) -> Self {
        EnsembleFile {
            dims: vec![ens.d_a() * ens.d_b()],
            probs: ens.probs().to_vec(),
            states: ens.states().iter().map(VectorJson::from_pure).collect(),
            cut: Some([ens.d_a(), ens.d_b()]),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        if self.cut.is_some() {
            return Err(Error::InvalidParameter(
                "file declares a cut; load it as a bipartite ensemble".into(),
            ));
        }
        let d = self.total_dim();
        let states = self
            .states
            .iter()
            .map(|v| v.to_pure(d))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.probs.clone(), states)
    }

    pub fn to_bipartite(&self) -> Result<BipartiteEnsemble> {
        let [da, db] = self
            .cut
            .ok_or_else(|| Error::InvalidParameter("file has no cut".into()))?;
        if da * db != self.total_dim() {
            return Err(Error::DimensionMismatch(da * db, self.total_dim()));
        }
        let states = self
            .states
            .iter()
            .map(|v| v.to_pure(da * db))
            .collect::<Result<Vec<_>>>()?;
        BipartiteEnsemble::new(self.probs.clone(), states, da, db)
    }
}

impl VectorJson {
    pub fn from_pure(psi: &PureState) -> Self {
        VectorJson {
            re: psi.amplitudes().iter().map(|c| c.re).collect(),
            im: psi.amplitudes().iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_pure(&self, d: usize) -> Result<PureState> {
        if self.re.len() != d || self.im.len() != d {
            return Err(Error::DimensionMismatch(d, self.re.len()));
        }
        PureState::new(
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&r, &i)| C64::new(r, i))
                .collect(),
        )
    }
}

/// The ensemble the worked examples use: {|0⟩, |+⟩} uniform.
pub fn zero_plus_ensemble() -> Ensemble {
    Ensemble::new(
        vec![0.5, 0.5],
        vec![PureState::basis(2, 0), PureState::plus()],
    )
    .expect("valid ensemble")
}
