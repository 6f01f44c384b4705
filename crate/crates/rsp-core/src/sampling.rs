//! Random sources and large-deviation rate functions.
//!
//! All randomness flows through [`Rng`], a counter-based ChaCha12 generator
//! addressed by (seed, stream). Identical (seed, stream) pairs reproduce
//! identical draws on every platform, and parallel work splits streams by
//! id instead of sharing a generator, so results do not depend on thread
//! scheduling.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{vdot, vnorm, CMat, C64};
use crate::qmath::{PureState, Unitary};

/// Deterministic, splittable random source.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng {
            seed,
            stream,
            inner,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent generator for substream `id`, regardless of how much
    /// this generator has already produced.
    pub fn split(&self, id: u64) -> Rng {
        Rng::with_stream(
            self.seed,
            self.stream
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(id)
                .wrapping_add(1),
        )
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        // Rejection-free modulo bias is negligible for our n; keep it
        // simple and deterministic.
        (self.inner.next_u64() % n as u64) as usize
    }

    /// Standard normal via Box–Muller (caches the spare draw).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Gaussian complex number N_C(0, σ²): independent real and imaginary
    /// parts of variance σ²/2.
    pub fn complex_normal(&mut self, variance: f64) -> C64 {
        let s = (variance / 2.0).sqrt();
        C64::new(s * self.standard_normal(), s * self.standard_normal())
    }

    /// Uniform point on the probability simplex of dimension k.
    pub fn simplex_uniform(&mut self, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..k)
            .map(|_| {
                let u = self.uniform().max(1e-300);
                -u.ln()
            })
            .collect();
        let total: f64 = v.iter().sum();
        for x in &mut v {
            *x /= total;
        }
        v
    }

    /// Haar-random pure state on dimension d.
    pub fn pure_state(&mut self, d: usize) -> PureState {
        let v: Vec<C64> = (0..d).map(|_| self.complex_normal(1.0)).collect();
        let n = vnorm(&v);
        PureState::new(v.into_iter().map(|c| c / n).collect()).expect("normalized")
    }
}

/// Complex vector with i.i.d. N_C(0, σ²/d) components, so E⟨Γ|Γ⟩ = σ².
#[derive(Debug, Clone)]
pub struct GaussianVector {
    pub vector: Vec<C64>,
    pub variance: f64,
}

/// Symmetric Gaussian vector with covariance operator (σ²/d)·1.
pub fn gaussian_complex_vector(d: usize, variance: f64, rng: &mut Rng) -> Result<GaussianVector> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be ≥ 1".into()));
    }
    if variance <= 0.0 || variance.is_nan() {
        return Err(Error::InvalidParameter("σ² must be > 0".into()));
    }
    let per = variance / d as f64;
    let vector = (0..d).map(|_| rng.complex_normal(per)).collect();
    Ok(GaussianVector { vector, variance })
}

/// Haar-distributed unitary: orthonormalize a square matrix of i.i.d.
/// N_C(0,1) entries. The normalization fixes the triangular factor's
/// diagonal to be real positive, the phase convention that makes the law
/// exactly Haar rather than approximately so.
pub fn haar_unitary(d: usize, rng: &mut Rng) -> Unitary {
    assert!(d >= 1, "dimension must be ≥ 1");
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.complex_normal(1.0)).collect())
        .collect();
    for j in 0..d {
        // Two Gram-Schmidt passes keep the unitarity defect near machine
        // precision.
        for _pass in 0..2 {
            for i in 0..j {
                let coeff = vdot(&cols[i], &cols[j]);
                for k in 0..d {
                    let prev = cols[i][k];
                    cols[j][k] -= coeff * prev;
                }
            }
        }
        let n = vnorm(&cols[j]);
        for k in 0..d {
            cols[j][k] /= n;
        }
    }
    let mat = CMat::from_fn(d, d, |i, j| cols[j][i]);
    Unitary::new(mat).expect("orthonormalized columns")
}

// ---------------------------------------------------------------------------
// Large deviations for squared Gaussians
// ---------------------------------------------------------------------------

/// Rate function Λ*(x) of X = Y², Y ~ N(0, σ²), in nats:
/// ½[x/σ² − 1 − ln(x/σ²)] for x > 0, +∞ otherwise.
pub fn rate_function_gaussian_square(x: f64, variance: f64) -> f64 {
    assert!(variance > 0.0, "σ² must be > 0");
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let r = x / variance;
    0.5 * (r - 1.0 - r.ln())
}

/// Log moment generating function Λ(y) = ln E e^{yX} for X = Y², in nats.
pub fn log_mgf_gaussian_square(y: f64, variance: f64) -> f64 {
    if y >= 0.5 / variance {
        f64::INFINITY
    } else {
        -0.5 * (1.0 - 2.0 * y * variance).ln()
    }
}

/// Λ*(x) recomputed from the variational form sup_y [yx − Λ(y)], by golden
/// section search; an independent route for checking the closed form.
pub fn rate_function_variational(x: f64, variance: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let hi = 0.5 / variance - 1e-12;
    let lo = -1e4;
    let f = |y: f64| y * x - log_mgf_gaussian_square(y, variance);
    golden_max(f, lo, hi, 1e-12)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Cramér upper bound on Pr{ (1/N) Σ X_i ≥ a } for X = Y², Y ~ N(0, σ²):
/// exp(−N · inf_{x ≥ a} Λ*(x)). Vacuous (=1) at or below the mean.
pub fn cramer_tail_bound(n: usize, a: f64, variance: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be ≥ 1".into()));
    }
    let inf = if a <= variance {
        0.0
    } else {
        rate_function_gaussian_square(a, variance)
    };
    Ok((-(n as f64) * inf).exp())
}

/// Monte Carlo frequency of { (1/N) Σ Y_i² ≥ a } over `trials` repetitions.
pub fn empirical_tail(
    n: usize,
    a: f64,
    variance: f64,
    trials: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("N and trials must be ≥ 1".into()));
    }
    let sd = variance.sqrt();
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut acc = 0.0;
        for _ in 0..n {
            let y = sd * rng.standard_normal();
            acc += y * y;
        }
        if acc / n as f64 >= a {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// ξ − ln(1+ξ), the quantity bounded below by ξ²/6 on [−1, 1] in the
/// Taylor estimate behind the concentration lemma.
pub fn rate_gap(xi: f64) -> f64 {
    xi - xi.ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn determinism_bit_for_bit() {
        let mut a = Rng::with_stream(7, 3);
        let mut b = Rng::with_stream(7, 3);
        for d in [1usize, 2, 5] {
            let ua = haar_unitary(d, &mut a);
            let ub = haar_unitary(d, &mut b);
            assert_eq!(ua.matrix(), ub.matrix());
        }
        let mut c = Rng::with_stream(7, 4);
        assert_ne!(
            haar_unitary(3, &mut c).matrix(),
            haar_unitary(3, &mut Rng::with_stream(7, 3)).matrix()
        );
    }

    #[test]
    fn haar_always_unitary_to_1e12() {
        let mut rng = Rng::new(11);
        for d in [1usize, 2, 3, 8, 16] {
            let u = haar_unitary(d, &mut rng);
            assert!(u.matrix().unitary_defect() < 1e-12);
        }
    }

    #[test]
    fn gaussian_vector_mean_square_norm() {
        // d=1, σ²=1: over 1e5 draws, mean |γ|² = 1 ± 0.02.
        let mut rng = Rng::new(42);
        let trials = 100_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let g = gaussian_complex_vector(1, 1.0, &mut rng).unwrap();
            acc += g.vector[0].norm_sqr();
        }
        assert_abs_diff_eq!(acc / trials as f64, 1.0, epsilon = 0.02);
    }

    #[test]
    fn gaussian_vector_covariance_is_isotropic() {
        // Sample covariance at d=4 → (σ²/4)·1 within 0.02 max-abs.
        let d = 4;
        let variance = 1.0;
        let mut rng = Rng::new(43);
        let trials = 100_000;
        let mut cov = CMat::zeros(d, d);
        for _ in 0..trials {
            let g = gaussian_complex_vector(d, variance, &mut rng).unwrap();
            let outer = CMat::outer(&g.vector, &g.vector);
            cov.add_assign_scaled(&outer, 1.0 / trials as f64);
        }
        let expect = CMat::identity(d).scale_re(variance / d as f64);
        assert!(cov.max_abs_diff(&expect) < 0.02);
    }

    #[test]
    fn gaussian_vector_rejects_bad_parameters() {
        let mut rng = Rng::new(1);
        assert!(gaussian_complex_vector(0, 1.0, &mut rng).is_err());
        assert!(gaussian_complex_vector(4, 0.0, &mut rng).is_err());
        assert!(gaussian_complex_vector(4, -1.0, &mut rng).is_err());
    }

    #[test]
    fn haar_first_moments() {
        // D=1: mean of U over draws → 0; D=2: E|⟨0|U|0⟩|² = 1/2.
        let mut rng = Rng::new(5);
        let trials = 100_000;
        let mut mean = C64::new(0.0, 0.0);
        for _ in 0..trials {
            mean += haar_unitary(1, &mut rng).matrix()[(0, 0)];
        }
        mean /= trials as f64;
        assert!(mean.norm() < 0.02);
        let mut acc = 0.0;
        for _ in 0..trials {
            acc += haar_unitary(2, &mut rng).matrix()[(0, 0)].norm_sqr();
        }
        assert_abs_diff_eq!(acc / trials as f64, 0.5, epsilon = 0.01);
    }

    #[test]
    fn rate_function_values() {
        // Minimum at the mean; +∞ at and below zero; closed form at 2σ².
        assert_abs_diff_eq!(
            rate_function_gaussian_square(1.0, 1.0),
            0.0,
            epsilon = 1e-15
        );
        assert!(rate_function_gaussian_square(0.0, 1.0).is_infinite());
        assert!(rate_function_gaussian_square(-1.0, 2.0).is_infinite());
        let expect = 0.5 * (1.0 - std::f64::consts::LN_2);
        assert_abs_diff_eq!(expect, 0.15342640972002733, epsilon = 1e-15);
        assert_abs_diff_eq!(
            rate_function_gaussian_square(2.0, 1.0),
            expect,
            epsilon = 1e-12
        );
        // Cross-check against the numeric sup.
        assert_abs_diff_eq!(rate_function_variational(2.0, 1.0), expect, epsilon = 1e-8);
    }

    #[test]
    fn cramer_bound_vacuous_at_mean_and_honored_at_1p5() {
        assert_abs_diff_eq!(
            cramer_tail_bound(50, 1.0, 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let bound = cramer_tail_bound(50, 1.5, 1.0).unwrap();
        let mut rng = Rng::new(9);
        let freq = empirical_tail(50, 1.5, 1.0, 100_000, &mut rng).unwrap();
        let sigma = (bound * (1.0 - bound) / 100_000.0).sqrt();
        assert!(freq <= bound + 4.0 * sigma, "freq {freq} vs bound {bound}");
    }

    #[test]
    fn taylor_gap_dominates_quadratic() {
        for i in 0..10_000 {
            let xi = -1.0 + 2.0 * (i as f64 + 0.5) / 10_000.0;
            assert!(rate_gap(xi) >= xi * xi / 6.0 - 1e-12, "failed at ξ={xi}");
        }
    }
}
