//! Method-of-types machinery: types and their counting bounds, typical and
//! conditionally typical projectors on exact eigenvalue products, the
//! operator law of large numbers, the operator Chernoff bound, and the
//! gentle measurement lemma.
//!
//! Typicality is defined on the exact −(1/n)·log₂ of eigenvalue products,
//! not on letter frequencies. Eigenbases come from the deterministic
//! eigensolver (descending eigenvalues, lexicographic tie-break), so
//! projectors are reproducible bit-for-bit.

use crate::error::{Error, Result};
use crate::linalg::{vdot, CMat, C64};
use crate::qmath::{entropy_bits, DensityOperator};
use crate::sampling::Rng;

/// Empirical letter distribution of a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVector {
    alphabet: usize,
    counts: Vec<usize>,
}

impl TypeVector {
    pub fn of(letters: &[usize], alphabet: usize) -> Self {
        let mut counts = vec![0usize; alphabet];
        for &l in letters {
            counts[l] += 1;
        }
        TypeVector { alphabet, counts }
    }

    pub fn from_counts(counts: Vec<usize>) -> Self {
        TypeVector {
            alphabet: counts.len(),
            counts,
        }
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn frequency(&self, letter: usize) -> f64 {
        self.counts[letter] as f64 / self.n() as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.alphabet).map(|i| self.frequency(i)).collect()
    }

    /// H(P) in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.frequencies())
    }

    /// Exact multinomial size of the type class, n! / ∏ c_i!.
    pub fn class_size(&self) -> u128 {
        let mut result: u128 = 1;
        let mut seen = 0usize;
        for &c in &self.counts {
            for j in 1..=c {
                seen += 1;
                result = result * seen as u128 / j as u128;
            }
        }
        result
    }

    /// A canonical member string: letters in nondecreasing order.
    pub fn canonical_string(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.n());
        for (letter, &c) in self.counts.iter().enumerate() {
            s.extend(std::iter::repeat(letter).take(c));
        }
        s
    }
}

/// Exact type of a string plus the class size, the pair the counting
/// bounds are about.
pub fn type_of(letters: &[usize], alphabet: usize) -> TypeVector {
    TypeVector::of(letters, alphabet)
}

pub fn type_class_size(t: &TypeVector) -> u128 {
    t.class_size()
}

/// Number of types of length-n strings over an alphabet of m letters,
/// C(n+m−1, m−1).
pub fn type_count(n: usize, alphabet: usize) -> u128 {
    let mut result: u128 = 1;
    for j in 1..alphabet {
        result = result * (n + j) as u128 / j as u128;
    }
    result
}

/// All types of length-n strings over `alphabet` letters.
pub fn enumerate_types(n: usize, alphabet: usize) -> Vec<TypeVector> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; alphabet];
    fn recurse(slot: usize, left: usize, counts: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
        if slot + 1 == counts.len() {
            counts[slot] = left;
            out.push(TypeVector::from_counts(counts.clone()));
            return;
        }
        for c in 0..=left {
            counts[slot] = c;
            recurse(slot + 1, left - c, counts, out);
        }
    }
    recurse(0, n, &mut counts, &mut out);
    out
}

/// The counting sandwich (n+1)^{−|X|}·2^{nH(P)} ≤ |T_P^n| ≤ 2^{nH(P)},
/// checked in the log domain.
pub fn type_sandwich_holds(t: &TypeVector) -> bool {
    let n = t.n() as f64;
    let h = t.entropy();
    let log_size = (t.class_size() as f64).log2();
    let upper = n * h;
    let lower = n * h - (t.alphabet() as f64) * (n + 1.0).log2();
    lower - 1e-9 <= log_size && log_size <= upper + 1e-9
}

// ---------------------------------------------------------------------------
// Typical projectors
// ---------------------------------------------------------------------------

const MATRIX_DIM_LIMIT: usize = 2048;

/// Projector onto sequences of eigenvectors whose per-symbol
/// −log₂ eigenvalue product sits within δ of `center`. Stored in factored
/// form (per-site eigensystems plus the kept sequences); the dense matrix
/// materializes on demand.
#[derive(Debug, Clone)]
pub struct TypicalProjector {
    pub n: usize,
    pub delta: f64,
    /// Entropy the window is centered on: S(ρ) or H(W|P).
    pub center: f64,
    pub source: String,
    site_dims: Vec<usize>,
    site_eigvals: Vec<Vec<f64>>,
    site_eigvecs: Vec<CMat>,
    kept: Vec<Vec<usize>>,
}

impl TypicalProjector {
    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    pub fn kept_sequences(&self) -> &[Vec<usize>] {
        &self.kept
    }

    pub fn total_dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    /// tr(source ⊗ … ⊗ source · Π): the exact probability weight of the
    /// kept sequences.
    pub fn weight(&self) -> f64 {
        self.kept
            .iter()
            .map(|seq| {
                seq.iter()
                    .enumerate()
                    .map(|(k, &s)| self.site_eigvals[k][s])
                    .product::<f64>()
            })
            .sum::<f64>()
            + 0.0
    }

    /// tr((O_1 ⊗ … ⊗ O_n) Π) for arbitrary site operators.
    pub fn trace_with(&self, site_ops: &[&CMat]) -> f64 {
        assert_eq!(site_ops.len(), self.n);
        // ⟨e^k_j| O_k |e^k_j⟩ per site and eigenvector.
        let diags: Vec<Vec<f64>> = (0..self.n)
            .map(|k| {
                let v = &self.site_eigvecs[k];
                (0..self.site_dims[k])
                    .map(|j| {
                        let col: Vec<C64> = (0..self.site_dims[k]).map(|r| v[(r, j)]).collect();
                        vdot(&col, &site_ops[k].matvec(&col)).re
                    })
                    .collect()
            })
            .collect();
        self.kept
            .iter()
            .map(|seq| {
                seq.iter()
                    .enumerate()
                    .map(|(k, &s)| diags[k][s])
                    .product::<f64>()
            })
            .sum()
    }

    /// Dense projector on the full product space.
    pub fn matrix(&self) -> Result<CMat> {
        let dim = self.total_dim();
        if dim > MATRIX_DIM_LIMIT {
            return Err(Error::BudgetExceeded(format!(
                "dense projector would be {dim}×{dim}"
            )));
        }
        let mut out = CMat::zeros(dim, dim);
        for seq in &self.kept {
            let mut vec = vec![C64::new(1.0, 0.0)];
            for (k, &s) in seq.iter().enumerate() {
                let v = &self.site_eigvecs[k];
                let col: Vec<C64> = (0..self.site_dims[k]).map(|r| v[(r, s)]).collect();
                vec = crate::linalg::vkron(&vec, &col);
            }
            out = out.add(&CMat::outer(&vec, &vec));
        }
        Ok(out)
    }
}

/// Sequences whose −(1/n) Σ log₂ of per-site values lies within δ of
/// `center`. Sites may have different spectra (the conditional case).
pub fn windowed_sequences(site_vals: &[Vec<f64>], center: f64, delta: f64) -> Vec<Vec<usize>> {
    let n = site_vals.len();
    let mut out = Vec::new();
    let mut seq = vec![0usize; n];
    loop {
        let mut log_sum = 0.0f64;
        for (k, &s) in seq.iter().enumerate() {
            let v = site_vals[k][s];
            if v <= 0.0 {
                log_sum = f64::INFINITY;
                break;
            }
            log_sum -= v.log2();
        }
        if (log_sum / n as f64 - center).abs() <= delta + 1e-12 {
            out.push(seq.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            seq[k] += 1;
            if seq[k] < site_vals[k].len() {
                break;
            }
            seq[k] = 0;
        }
    }
}

/// Typical projector Π^n_{ρ,δ} of ρ^{⊗n}.
pub fn typical_projector(rho: &DensityOperator, n: usize, delta: f64) -> Result<TypicalProjector> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n ≥ 1".into()));
    }
    let d = rho.dim();
    let dim = (d as f64).powi(n as i32);
    if dim > (1u64 << 22) as f64 {
        return Err(Error::BudgetExceeded(format!("d^n = {dim} sequences")));
    }
    let (vals, vecs) = rho.matrix().eig_h();
    let clamped: Vec<f64> = vals.iter().map(|&l| l.clamp(0.0, 1.0)).collect();
    let center = entropy_bits(&clamped);
    let kept = windowed_sequences(&vec![clamped.clone(); n], center, delta);
    Ok(TypicalProjector {
        n,
        delta,
        center,
        source: format!("state on d={d}"),
        site_dims: vec![d; n],
        site_eigvals: vec![clamped; n],
        site_eigvecs: vec![vecs; n],
        kept,
    })
}

/// Conditionally typical projector Π^n_{W,δ}(x^n) for the cq channel
/// x ↦ W_x and input string x^n of type P; the window is centered on
/// H(W|P) = Σ_x P(x) S(W_x).
pub fn cond_typical_projector(
    channel: &[DensityOperator],
    letters: &[usize],
    delta: f64,
) -> Result<TypicalProjector> {
    if letters.is_empty() {
        return Err(Error::InvalidParameter("need n ≥ 1".into()));
    }
    for &l in letters {
        if l >= channel.len() {
            return Err(Error::InvalidParameter(format!("letter {l} out of range")));
        }
    }
    let n = letters.len();
    let d = channel[0].dim();
    if channel.iter().any(|w| w.dim() != d) {
        return Err(Error::DimensionMismatch(d, 0));
    }
    let dim = (d as f64).powi(n as i32);
    if dim > (1u64 << 22) as f64 {
        return Err(Error::BudgetExceeded(format!("d^n = {dim} sequences")));
    }
    let eig: Vec<(Vec<f64>, CMat)> = channel.iter().map(|w| w.matrix().eig_h()).collect();
    let p = TypeVector::of(letters, channel.len());
    let center: f64 = (0..channel.len())
        .map(|x| p.frequency(x) * entropy_bits(&eig[x].0))
        .sum();
    let site_vals: Vec<Vec<f64>> = letters
        .iter()
        .map(|&l| eig[l].0.iter().map(|&v| v.clamp(0.0, 1.0)).collect())
        .collect();
    let kept = windowed_sequences(&site_vals, center, delta);
    Ok(TypicalProjector {
        n,
        delta,
        center,
        source: format!("cq channel on d={d}, string {letters:?}"),
        site_dims: vec![d; n],
        site_eigvals: site_vals,
        site_eigvecs: letters.iter().map(|&l| eig[l].1.clone()).collect(),
        kept,
    })
}

// ---------------------------------------------------------------------------
// Operator law of large numbers
// ---------------------------------------------------------------------------

/// Per-n traces tr(W^n_{x^n} Π^n_{ρ,δ}) for x^n built by repeating a block
/// of letters, plus the first n where the trace clears 1 − ε.
#[derive(Debug, Clone)]
pub struct LlnReport {
    pub points: Vec<(usize, f64)>,
    pub threshold: Option<usize>,
}

/// Evaluate the operator law of large numbers for the cq channel `channel`
/// with the letter pattern `block` repeated 1..=`repeats` times.
pub fn operator_lln_check(
    channel: &[DensityOperator],
    block: &[usize],
    repeats: usize,
    delta: f64,
    epsilon_target: f64,
) -> Result<LlnReport> {
    if block.is_empty() || repeats == 0 {
        return Err(Error::InvalidParameter("need a nonempty block".into()));
    }
    let p = TypeVector::of(block, channel.len());
    let rho = DensityOperator::mixture(
        &(0..channel.len())
            .map(|i| (p.frequency(i), channel[i].clone()))
            .collect::<Vec<_>>(),
    )?;
    let mut points = Vec::new();
    let mut threshold = None;
    for r in 1..=repeats {
        let n = r * block.len();
        let proj = typical_projector(&rho, n, delta)?;
        let letters: Vec<usize> = std::iter::repeat(block.iter().copied())
            .take(r)
            .flatten()
            .collect();
        let ops: Vec<&CMat> = letters.iter().map(|&l| channel[l].matrix()).collect();
        let trace = proj.trace_with(&ops);
        if threshold.is_none() && trace >= 1.0 - epsilon_target {
            threshold = Some(n);
        }
        points.push((n, trace));
    }
    Ok(LlnReport { points, threshold })
}

// ---------------------------------------------------------------------------
// The π_I operator chain
// ---------------------------------------------------------------------------

/// Dense verification of the two operator facts behind the
/// entangled-ensemble protocol: with π_I = Π Π(I) φ_I Π(I) Π,
/// tr π_I ≥ 1 − 2ε_typ and π_I ≤ 2^{−n(H(W|P)−δ)} Π as matrices.
#[derive(Debug, Clone)]
pub struct PiChainReport {
    pub n: usize,
    pub tr_pi: f64,
    pub eps_typ: f64,
    pub large_ok: bool,
    /// Largest eigenvalue of π_I − 2^{−n(H(W|P)−δ)}·Π; ≤ tolerance when
    /// the operator inequality holds.
    pub small_margin: f64,
    pub small_ok: bool,
}

/// Build π_I densely for the cq channel `channel` on input `letters` and
/// check the chain. Dimension d^n must stay within the dense budget.
pub fn pi_chain_check(
    channel: &[DensityOperator],
    letters: &[usize],
    delta: f64,
) -> Result<PiChainReport> {
    let n = letters.len();
    let p = TypeVector::of(letters, channel.len());
    let rho = DensityOperator::mixture(
        &(0..channel.len())
            .map(|i| (p.frequency(i), channel[i].clone()))
            .collect::<Vec<_>>(),
    )?;
    let typ = typical_projector(&rho, n, delta)?;
    let cond = cond_typical_projector(channel, letters, delta)?;
    let big_pi = typ.matrix()?;
    let cond_pi = cond.matrix()?;
    let mut phi = CMat::identity(1);
    for &l in letters {
        phi = phi.kron(channel[l].matrix());
    }
    let eps_typ = {
        let a = 1.0 - phi.mul(&cond_pi).trace().re;
        let b = 1.0 - phi.mul(&big_pi).trace().re;
        a.max(b).max(0.0)
    };
    let sandwiched = cond_pi.mul(&phi).mul(&cond_pi);
    let pi = big_pi.mul(&sandwiched).mul(&big_pi);
    let tr_pi = pi.trace().re;
    let bound = 2f64.powf(-(n as f64) * (cond.center - delta));
    let gap = pi.sub(&big_pi.scale_re(bound));
    let small_margin = gap
        .hermitize()
        .eigvals_h()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PiChainReport {
        n,
        tr_pi,
        eps_typ,
        large_ok: tr_pi >= 1.0 - 2.0 * eps_typ - 1e-9,
        small_margin,
        small_ok: small_margin <= 1e-9,
    })
}

// ---------------------------------------------------------------------------
// Operator Chernoff bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ChernoffReport {
    /// 2D·2^{−Mαη²/(2 ln 2)} — equivalently 2D·e^{−Mαη²/2}.
    pub bound: f64,
    pub empirical: f64,
    pub sigma: f64,
    pub pass: bool,
    /// True when α ≤ 0 made the bound vacuous.
    pub vacuous: bool,
}

/// Monte Carlo check of the operator Chernoff bound: draw M operator
/// samples per trial from `sampler` (each must satisfy 0 ≤ X ≤ 1, mean A ≥
/// α·1) and measure how often the sample mean escapes
/// [(1−η)A, (1+η)A].
pub fn operator_chernoff_check(
    sampler: &(dyn Fn(&mut Rng) -> CMat + Sync),
    mean: &CMat,
    alpha: f64,
    m: usize,
    eta: f64,
    trials: usize,
    rng: &mut Rng,
) -> Result<ChernoffReport> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::InvalidParameter("need 0 < η ≤ 1/2".into()));
    }
    if m == 0 || trials == 0 {
        return Err(Error::InvalidParameter("need M ≥ 1 and trials ≥ 1".into()));
    }
    let d = mean.rows();
    let vacuous = alpha <= 0.0;
    let bound = if vacuous {
        1.0
    } else {
        (2 * d) as f64 * (-(m as f64) * alpha * eta * eta / 2.0).exp()
    };
    let upper = mean.scale_re(1.0 + eta);
    let lower = mean.scale_re(1.0 - eta);
    let mut escapes = 0usize;
    for t in 0..trials {
        let mut local = rng.split(t as u64);
        let mut acc = CMat::zeros(d, d);
        for _ in 0..m {
            let x = sampler(&mut local);
            debug_assert!(x.min_eig_h() > -1e-9);
            acc.add_assign_scaled(&x, 1.0 / m as f64);
        }
        let above_ok = upper.sub(&acc).min_eig_h() >= -1e-10;
        let below_ok = acc.sub(&lower).min_eig_h() >= -1e-10;
        if !(above_ok && below_ok) {
            escapes += 1;
        }
    }
    let empirical = escapes as f64 / trials as f64;
    let sigma = crate::stats::binomial_sigma(bound.min(1.0), trials);
    Ok(ChernoffReport {
        bound,
        empirical,
        sigma,
        pass: empirical <= (bound + 4.0 * sigma).min(1.0) || vacuous,
        vacuous,
    })
}

// ---------------------------------------------------------------------------
// Gentle measurement
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct GentleReport {
    /// ‖ρ − √X ρ √X‖₁
    pub lhs: f64,
    /// √(8ε) with ε = max(0, 1 − tr(ρX))
    pub rhs: f64,
    pub pass: bool,
}

/// The gentle measurement lemma: an almost-certain outcome barely
/// disturbs the state.
pub fn gentle_measurement_check(rho: &DensityOperator, x: &CMat) -> Result<GentleReport> {
    if !x.is_square() || x.rows() != rho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), x.rows()));
    }
    let eigs = x.eigvals_h();
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min < -1e-10 || max > 1.0 + 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ X ≤ 1 (spectrum [{min:.3e}, {max:.3e}])"
        )));
    }
    let eps = (1.0 - rho.matrix().mul(x).trace().re).max(0.0);
    let root = x.sqrt_psd();
    let disturbed = root.mul(rho.matrix()).mul(&root);
    let lhs = rho.matrix().sub(&disturbed).trace_norm_h();
    let rhs = (8.0 * eps).sqrt();
    Ok(GentleReport {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::qmath::PureState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn type_basics() {
        // "000" has class size 1; uniform type over 2 letters at n=4 has 6.
        let t = type_of(&[0, 0, 0], 2);
        assert_eq!(t.class_size(), 1);
        let u = TypeVector::from_counts(vec![2, 2]);
        assert_eq!(u.class_size(), 6);
        assert_eq!(type_count(3, 2), 4);
        assert_eq!(type_count(4, 3), 15);
    }

    #[test]
    fn sandwich_all_types_small() {
        for alphabet in [2usize, 3] {
            for n in 1..=10 {
                for t in enumerate_types(n, alphabet) {
                    assert!(type_sandwich_holds(&t), "failed for {:?}", t.counts());
                }
            }
        }
    }

    #[test]
    fn typical_projector_uniform_state_is_full() {
        // ρ = 1/d: every sequence typical at δ ≥ 0.
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        let proj = typical_projector(&rho, 4, 0.0).unwrap();
        assert_eq!(proj.rank(), 16);
        assert_abs_diff_eq!(proj.weight(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn typical_projector_pure_state_is_rank_one() {
        let rho = PureState::basis(3, 1).density();
        let proj = typical_projector(&rho, 5, 0.1).unwrap();
        assert_eq!(proj.rank(), 1);
        assert_abs_diff_eq!(proj.weight(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn typical_projector_rank_by_enumeration() {
        // diag(3/4,1/4), n=4, δ=0.1: enumerate all 16 eigenvalue products.
        let rho = DensityOperator::new(CMat::diag(&[0.75, 0.25])).unwrap();
        let s = 0.8112781244591328;
        let proj = typical_projector(&rho, 4, 0.1).unwrap();
        let mut expect = 0usize;
        for mask in 0..16u32 {
            let ones = mask.count_ones() as f64;
            let logp = -(4.0 - ones) * 0.75f64.log2() - ones * 0.25f64.log2();
            if (logp / 4.0 - s).abs() <= 0.1 {
                expect += 1;
            }
        }
        assert_eq!(proj.rank(), expect);
        // Rank upper bound 2^{n(S+δ)} holds for every n.
        for n in 1..=10 {
            let p = typical_projector(&rho, n, 0.1).unwrap();
            assert!((p.rank() as f64).log2() <= n as f64 * (s + 0.1) + 1e-9);
        }
    }

    #[test]
    fn projector_algebra_dense() {
        let rho = DensityOperator::new(CMat::diag(&[0.7, 0.3])).unwrap();
        let proj = typical_projector(&rho, 3, 0.2).unwrap();
        let m = proj.matrix().unwrap();
        // Idempotent and Hermitian.
        assert!(m.mul(&m).max_abs_diff(&m) < 1e-10);
        assert!(m.herm_defect() < 1e-10);
        // Commutes with ρ^{⊗n}.
        let mut big = CMat::identity(1);
        for _ in 0..3 {
            big = big.kron(rho.matrix());
        }
        let comm = m.mul(&big).sub(&big.mul(&m));
        assert!(comm.max_abs() < 1e-10);
        // Trace with the product state matches weight().
        let ops = [rho.matrix(), rho.matrix(), rho.matrix()];
        assert_abs_diff_eq!(proj.trace_with(&ops), proj.weight(), epsilon = 1e-12);
    }

    #[test]
    fn cond_typical_identical_pure_channel() {
        let w = vec![
            PureState::basis(2, 0).density(),
            PureState::basis(2, 0).density(),
        ];
        let proj = cond_typical_projector(&w, &[0, 1, 0], 0.1).unwrap();
        assert_eq!(proj.rank(), 1);
    }

    #[test]
    fn cond_typical_uniform_channel_full() {
        let w = vec![
            DensityOperator::maximally_mixed(2).unwrap(),
            DensityOperator::maximally_mixed(2).unwrap(),
        ];
        let proj = cond_typical_projector(&w, &[0, 1], 0.0).unwrap();
        assert_eq!(proj.rank(), 4);
    }

    #[test]
    fn cond_typical_rank_by_enumeration() {
        // {W_0 = diag(.9,.1), W_1 = diag(.5,.5)}, I = "01", δ = 0.3.
        let w = vec![
            DensityOperator::new(CMat::diag(&[0.9, 0.1])).unwrap(),
            DensityOperator::new(CMat::diag(&[0.5, 0.5])).unwrap(),
        ];
        let proj = cond_typical_projector(&w, &[0, 1], 0.3).unwrap();
        let h = 0.5 * entropy_bits(&[0.9, 0.1]) + 0.5 * entropy_bits(&[0.5, 0.5]);
        let mut expect = 0;
        for a in [0.9f64, 0.1] {
            for b in [0.5f64, 0.5] {
                if (-(a * b).log2() / 2.0 - h).abs() <= 0.3 {
                    expect += 1;
                }
            }
        }
        assert_eq!(proj.rank(), expect);
    }

    #[test]
    fn lln_reduces_to_typical_probability_when_channel_constant() {
        let rho = DensityOperator::new(CMat::diag(&[0.75, 0.25])).unwrap();
        let channel = vec![rho.clone(), rho.clone()];
        let report = operator_lln_check(&channel, &[0, 1], 4, 0.25, 0.2).unwrap();
        for &(n, tr) in &report.points {
            let proj = typical_projector(&rho, n, 0.25).unwrap();
            assert_abs_diff_eq!(tr, proj.weight(), epsilon = 1e-10);
        }
    }

    #[test]
    fn commuting_lln_matches_classical_chernoff_computation() {
        // Commuting W_x: the trace is a plain probability computation.
        let w0 = DensityOperator::new(CMat::diag(&[0.8, 0.2])).unwrap();
        let w1 = DensityOperator::new(CMat::diag(&[0.4, 0.6])).unwrap();
        let report = operator_lln_check(&[w0.clone(), w1.clone()], &[0, 1], 3, 0.4, 0.5).unwrap();
        // Classical route: ρ diagonal, kept sequences are bitstrings; sum
        // W-product probabilities over them.
        let rho = DensityOperator::new(CMat::diag(&[0.6, 0.4])).unwrap();
        for &(n, tr) in &report.points {
            let proj = typical_projector(&rho, n, 0.4).unwrap();
            let mut expect = 0.0;
            for seq in proj.kept_sequences() {
                let mut p = 1.0;
                for (k, &s) in seq.iter().enumerate() {
                    let site = if k % 2 == 0 { &w0 } else { &w1 };
                    p *= site.matrix()[(s, s)].re;
                }
                expect += p;
            }
            assert_abs_diff_eq!(tr, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn chernoff_deterministic_sample_never_escapes() {
        let mean = CMat::identity(2).scale_re(0.5);
        let sampler = move |_: &mut Rng| CMat::identity(2).scale_re(0.5);
        let mut rng = Rng::new(5);
        let rep = operator_chernoff_check(&sampler, &mean, 0.5, 10, 0.25, 200, &mut rng).unwrap();
        assert_eq!(rep.empirical, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn chernoff_rejects_large_eta() {
        let mean = CMat::identity(2).scale_re(0.5);
        let sampler = move |_: &mut Rng| CMat::identity(2).scale_re(0.5);
        let mut rng = Rng::new(5);
        assert!(operator_chernoff_check(&sampler, &mean, 0.5, 10, 0.75, 10, &mut rng).is_err());
    }

    #[test]
    fn gentle_measurement_identity_and_support() {
        let rho = PureState::plus().density();
        let rep = gentle_measurement_check(&rho, &CMat::identity(2)).unwrap();
        assert_abs_diff_eq!(rep.lhs, 0.0, epsilon = 1e-12);
        assert!(rep.pass);
        // X a projector containing supp ρ.
        let proj = PureState::plus().projector();
        let rep2 = gentle_measurement_check(&rho, &proj).unwrap();
        assert_abs_diff_eq!(rep2.lhs, 0.0, epsilon = 1e-10);
        assert!(rep2.pass);
        let _ = ONE;
    }

    #[test]
    fn gentle_measurement_rejects_bad_operator() {
        let rho = PureState::plus().density();
        let too_big = CMat::identity(2).scale_re(1.5);
        assert!(gentle_measurement_check(&rho, &too_big).is_err());
    }

    #[test]
    fn pi_chain_small_instance() {
        // Qubit cq channel {I/2, |0⟩⟨0|}, a mixed-type string at n = 4.
        let channel = vec![
            DensityOperator::maximally_mixed(2).unwrap(),
            PureState::basis(2, 0).density(),
        ];
        let report = pi_chain_check(&channel, &[0, 1, 0, 1], 0.4).unwrap();
        assert!(
            report.large_ok,
            "tr π = {} with ε = {}",
            report.tr_pi, report.eps_typ
        );
        assert!(report.small_ok, "margin {}", report.small_margin);
        assert!(report.tr_pi <= 1.0 + 1e-9);
    }
}
