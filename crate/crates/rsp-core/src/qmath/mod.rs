//! Quantum states and the entropic / distance functionals used everywhere
//! else.
//!
//! Conventions, fixed globally:
//! - fidelity is the squared one, F(ρ,σ) = ‖√ρ√σ‖₁²; for pure states this
//!   is |⟨ψ|φ⟩|²,
//! - trace distance is normalized, ½‖ρ−σ‖₁,
//! - entropies are in bits (log base 2),
//! - eigenvalues are clamped at 1e-12 before logs (type invariants are
//!   checked at 1e-10, which exceeds the clamp),
//! - transpose / complex conjugation always refer to the computational
//!   basis, the one defining the maximally entangled state.

mod json;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{vdot, vkron, vnorm, CMat, C64, ONE};

pub use json::StateJson;

const INVARIANT_TOL: f64 = 1e-10;
const CLAMP: f64 = 1e-12;

/// Normalized state vector on dimension D.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amp: Vec<C64>,
}

impl PureState {
    pub fn new(amp: Vec<C64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::InvalidParameter(
                "pure state needs dimension ≥ 1".into(),
            ));
        }
        let norm = vnorm(&amp);
        if (norm - 1.0).abs() > INVARIANT_TOL {
            return Err(Error::InvalidState(format!(
                "state vector norm {norm} is not 1"
            )));
        }
        Ok(PureState { amp })
    }

    /// Normalize and wrap; rejects the zero vector.
    pub fn normalized(amp: Vec<C64>) -> Result<Self> {
        let norm = vnorm(&amp);
        if norm < 1e-14 {
            return Err(Error::InvalidState(
                "cannot normalize the zero vector".into(),
            ));
        }
        PureState::new(amp.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state |k⟩.
    pub fn basis(d: usize, k: usize) -> Self {
        assert!(k < d);
        let mut amp = vec![C64::new(0.0, 0.0); d];
        amp[k] = ONE;
        PureState { amp }
    }

    /// Qubit |+⟩ = (|0⟩+|1⟩)/√2.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState {
            amp: vec![C64::new(h, 0.0), C64::new(h, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    /// ⟨self|other⟩
    pub fn overlap(&self, other: &PureState) -> C64 {
        vdot(&self.amp, &other.amp)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            mat: self.projector(),
        }
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(&self) -> CMat {
        CMat::outer(&self.amp, &self.amp)
    }

    /// Entrywise conjugate in the computational basis.
    pub fn conj(&self) -> PureState {
        PureState {
            amp: self.amp.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amp: vkron(&self.amp, &other.amp),
        }
    }
}

/// Hermitian, PSD, trace-one operator on dimension D.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: CMat,
}

impl DensityOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() || mat.rows() == 0 {
            return Err(Error::InvalidState(
                "density operator must be square".into(),
            ));
        }
        if mat.herm_defect() > INVARIANT_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:.2e})",
                mat.herm_defect()
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > INVARIANT_TOL || tr.im.abs() > INVARIANT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = mat.min_eig_h();
        if min < -INVARIANT_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.2e}"
            )));
        }
        Ok(DensityOperator { mat })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.density()
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be ≥ 1".into()));
        }
        Ok(DensityOperator {
            mat: CMat::identity(d).scale_re(1.0 / d as f64),
        })
    }

    /// Σ p_i ρ_i for a normalized weight vector.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        let d = parts[0].1.dim();
        let mut mat = CMat::zeros(d, d);
        let mut total = 0.0;
        for (p, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch(d, rho.dim()));
            }
            if *p < -1e-12 {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            mat.add_assign_scaled(&rho.mat, *p);
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}"
            )));
        }
        DensityOperator::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }

    pub fn is_pure(&self) -> bool {
        1.0 - self.purity() <= 1e-12
    }

    /// UρU†
    pub fn conjugated(&self, u: &Unitary) -> DensityOperator {
        DensityOperator {
            mat: u.mat.mul(&self.mat).mul(&u.mat.dagger()),
        }
    }

    /// Eigenvalues clamped into [0, 1], descending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.mat
            .eigvals_h()
            .into_iter()
            .map(|l| l.clamp(0.0, 1.0))
            .collect()
    }
}

/// Unitary on dimension D (U·U† = 1 within 1e-10, max-abs entry).
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: CMat,
}

impl Unitary {
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() || mat.rows() == 0 {
            return Err(Error::InvalidState("unitary must be square".into()));
        }
        let defect = mat.unitary_defect();
        if defect > INVARIANT_TOL {
            return Err(Error::InvalidState(format!(
                "not unitary (defect {defect:.2e})"
            )));
        }
        Ok(Unitary { mat })
    }

    pub fn identity(d: usize) -> Self {
        Unitary {
            mat: CMat::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dagger(&self) -> Unitary {
        Unitary {
            mat: self.mat.dagger(),
        }
    }

    pub fn transpose(&self) -> Unitary {
        Unitary {
            mat: self.mat.transpose(),
        }
    }

    pub fn conj(&self) -> Unitary {
        Unitary {
            mat: self.mat.conj(),
        }
    }

    pub fn apply(&self, psi: &PureState) -> PureState {
        PureState {
            amp: self.mat.matvec(psi.amplitudes()),
        }
    }
}

/// Multipartite density operator with named parts; tensor order is the
/// declaration order. Parts listed in `classical` must be diagonal in the
/// computational basis.
#[derive(Debug, Clone)]
pub struct LabeledState {
    parts: Vec<(String, usize)>,
    mat: CMat,
    classical: BTreeSet<String>,
}

impl LabeledState {
    pub fn new(
        parts: Vec<(String, usize)>,
        mat: CMat,
        classical: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let total: usize = parts.iter().map(|(_, d)| d).product();
        if parts.is_empty() || total != mat.rows() || !mat.is_square() {
            return Err(Error::DimensionMismatch(total, mat.rows()));
        }
        let mut seen = BTreeSet::new();
        for (name, d) in &parts {
            if *d == 0 {
                return Err(Error::InvalidParameter(format!(
                    "part {name} has dimension 0"
                )));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate label {name}")));
            }
        }
        let classical: BTreeSet<String> = classical.into_iter().collect();
        for name in &classical {
            if !seen.contains(name) {
                return Err(Error::UnknownLabel(name.clone()));
            }
        }
        // Density-operator invariants on the joint matrix.
        DensityOperator::new(mat.clone())?;
        let state = LabeledState {
            parts,
            mat,
            classical,
        };
        for name in state.classical.clone() {
            let defect = state.classical_defect(&name)?;
            if defect > INVARIANT_TOL {
                return Err(Error::InvalidState(format!(
                    "part {name} declared classical but off-diagonal weight is {defect:.2e}"
                )));
            }
        }
        Ok(state)
    }

    pub fn from_density(label: &str, rho: &DensityOperator) -> Self {
        LabeledState {
            parts: vec![(label.to_string(), rho.dim())],
            mat: rho.matrix().clone(),
            classical: BTreeSet::new(),
        }
    }

    /// Largest off-diagonal magnitude with respect to one part's basis.
    fn classical_defect(&self, label: &str) -> Result<f64> {
        let pos = self.position(label)?;
        let dims: Vec<usize> = self.parts.iter().map(|(_, d)| *d).collect();
        let total = self.total_dim();
        let mut worst = 0.0f64;
        for i in 0..total {
            for j in 0..total {
                if digit(i, pos, &dims) != digit(j, pos, &dims) {
                    worst = worst.max(self.mat[(i, j)].norm());
                }
            }
        }
        Ok(worst)
    }

    pub fn parts(&self) -> &[(String, usize)] {
        &self.parts
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn classical_labels(&self) -> &BTreeSet<String> {
        &self.classical
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            mat: self.mat.clone(),
        }
    }

    fn position(&self, label: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|(n, _)| n == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Trace out everything except `keep`; kept labels stay in declaration
    /// order no matter how `keep` is ordered.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<LabeledState> {
        for l in keep {
            self.position(l)?;
        }
        let kept_pos: Vec<usize> = (0..self.parts.len())
            .filter(|&p| keep.contains(&self.parts[p].0.as_str()))
            .collect();
        if kept_pos.is_empty() {
            return Err(Error::InvalidParameter(
                "cannot trace out every part".into(),
            ));
        }
        let traced_pos: Vec<usize> = (0..self.parts.len())
            .filter(|p| !kept_pos.contains(p))
            .collect();
        if traced_pos.is_empty() {
            return Ok(self.clone());
        }
        let dims: Vec<usize> = self.parts.iter().map(|(_, d)| *d).collect();
        let strides = strides(&dims);
        let kept_dims: Vec<usize> = kept_pos.iter().map(|&p| dims[p]).collect();
        let traced_dims: Vec<usize> = traced_pos.iter().map(|&p| dims[p]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();
        let offset = |idx: usize, pos: &[usize], pdims: &[usize]| -> usize {
            let mut rem = idx;
            let mut off = 0;
            for (slot, &p) in pos.iter().enumerate().rev() {
                let d = pdims[slot];
                off += (rem % d) * strides[p];
                rem /= d;
            }
            off
        };
        let kept_off: Vec<usize> = (0..dk).map(|a| offset(a, &kept_pos, &kept_dims)).collect();
        let traced_off: Vec<usize> = (0..dt)
            .map(|t| offset(t, &traced_pos, &traced_dims))
            .collect();
        let mut out = CMat::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &traced_off {
                    acc += self.mat[(kept_off[a] + t, kept_off[b] + t)];
                }
                out[(a, b)] = acc;
            }
        }
        let parts: Vec<(String, usize)> = kept_pos.iter().map(|&p| self.parts[p].clone()).collect();
        let classical = self
            .classical
            .iter()
            .filter(|l| parts.iter().any(|(n, _)| n == *l))
            .cloned()
            .collect::<BTreeSet<_>>();
        Ok(LabeledState {
            parts,
            mat: out,
            classical,
        })
    }

    /// Entropy (bits) of the reduced state on `labels`.
    pub fn entropy_of(&self, labels: &[&str]) -> Result<f64> {
        let reduced = self.partial_trace(labels)?;
        Ok(entropy_of_matrix(&reduced.mat))
    }

    /// S(X:Y) = S(X) + S(Y) − S(XY)
    pub fn mutual_info(&self, x: &[&str], y: &[&str]) -> Result<f64> {
        disjoint(x, y)?;
        let xy = union(x, y);
        Ok(self.entropy_of(x)? + self.entropy_of(y)? - self.entropy_of(&xy)?)
    }

    /// S(X:Y|C) = S(XC) + S(YC) − S(XYC) − S(C)
    pub fn cond_mutual_info(&self, x: &[&str], y: &[&str], c: &[&str]) -> Result<f64> {
        disjoint(x, y)?;
        disjoint(x, c)?;
        disjoint(y, c)?;
        if c.is_empty() {
            return self.mutual_info(x, y);
        }
        let xc = union(x, c);
        let yc = union(y, c);
        let xyc = union(&union(x, y), c);
        Ok(self.entropy_of(&xc)? + self.entropy_of(&yc)?
            - self.entropy_of(&xyc)?
            - self.entropy_of(c)?)
    }

    /// S(X|C) = S(XC) − S(C)
    pub fn cond_entropy(&self, x: &[&str], c: &[&str]) -> Result<f64> {
        disjoint(x, c)?;
        if c.is_empty() {
            return self.entropy_of(x);
        }
        let xc = union(x, c);
        Ok(self.entropy_of(&xc)? - self.entropy_of(c)?)
    }
}

fn union<'a>(x: &[&'a str], y: &[&'a str]) -> Vec<&'a str> {
    let mut out = x.to_vec();
    out.extend_from_slice(y);
    out
}

fn disjoint(x: &[&str], y: &[&str]) -> Result<()> {
    for l in x {
        if y.contains(l) {
            return Err(Error::OverlappingLabels((*l).to_string()));
        }
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn digit(index: usize, pos: usize, dims: &[usize]) -> usize {
    let s = strides(dims);
    (index / s[pos]) % dims[pos]
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

/// Mixed-state fidelity F = ‖√ρ√σ‖₁², the squared convention. Equals
/// |⟨ψ|φ⟩|² for pure inputs; rank-one inputs take the tr(ρσ) shortcut.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    if rho.is_pure() || sigma.is_pure() {
        let f = rho.matrix().mul(sigma.matrix()).trace().re;
        return Ok(f.clamp(0.0, 1.0));
    }
    let root = rho.matrix().sqrt_psd();
    let m = root.mul(sigma.matrix()).mul(&root);
    let sum: f64 = m.eigvals_h().into_iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((sum * sum).clamp(0.0, 1.0))
}

/// Normalized trace distance ½‖ρ−σ‖₁.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok((0.5 * rho.matrix().sub(sigma.matrix()).trace_norm_h()).clamp(0.0, 1.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_matrix(rho.matrix())
}

pub(crate) fn entropy_of_matrix(mat: &CMat) -> f64 {
    entropy_bits(&mat.eigvals_h())
}

/// −Σ λ log₂ λ with clamping into the unit interval and 0·log 0 = 0.
pub fn entropy_bits(eigs: &[f64]) -> f64 {
    let mut s = 0.0;
    for &l in eigs {
        let l = l.clamp(0.0, 1.0);
        if l > CLAMP {
            s -= l * l.log2();
        }
    }
    s
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    entropy_bits(p)
}

/// |Φ_D⟩ = (1/√D) Σ_j |j⟩|j⟩ on D×D.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be ≥ 1".into()));
    }
    let mut amp = vec![C64::new(0.0, 0.0); d * d];
    let w = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        amp[j * d + j] = C64::new(w, 0.0);
    }
    Ok(PureState { amp })
}

/// |Φ_D⟩⟨Φ_D| as a labeled two-part state.
pub fn max_entangled_labeled(d: usize, a: &str, b: &str) -> Result<LabeledState> {
    let phi = max_entangled(d)?;
    LabeledState::new(
        vec![(a.to_string(), d), (b.to_string(), d)],
        phi.projector(),
        std::iter::empty(),
    )
}
