//! Dense complex matrices and the Hermitian eigensolver everything else
//! builds on.
//!
//! Matrices are row-major `Vec<Complex64>`. Dimensions stay small (a few
//! hundred at most), so a cyclic Jacobi eigensolver with complex rotations
//! is accurate and fast enough, and gives us full control over the
//! eigenbasis ordering: eigenvalues are sorted descending with a
//! lexicographic tie-break on eigenvector entries, so decompositions are
//! deterministic bit-for-bit.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// |u⟩⟨v|
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = CMat::zeros(u.len(), v.len());
        for i in 0..u.len() {
            for j in 0..v.len() {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = CMat::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == ZERO {
                    continue;
                }
                let orow = k * other.cols;
                let row = i * other.cols;
                for j in 0..other.cols {
                    out.data[row + j] += aik * other.data[orow + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = ZERO;
            let row = i * self.cols;
            for j in 0..self.cols {
                acc += self.data[row + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> CMat {
        self.scale(C64::new(c, 0.0))
    }

    pub fn add_assign_scaled(&mut self, other: &CMat, c: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    /// Hermitian adjoint.
    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Entrywise complex conjugate (in the computational basis).
    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self[(i, j)];
                if aij == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn herm_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// (A + A†)/2
    pub fn hermitize(&self) -> CMat {
        self.add(&self.dagger()).scale_re(0.5)
    }

    pub fn unitary_defect(&self) -> f64 {
        self.mul(&self.dagger())
            .max_abs_diff(&CMat::identity(self.rows))
    }

    /// Eigenvalues and eigenvectors (as columns) of a Hermitian matrix,
    /// eigenvalues descending, deterministic tie-break.
    pub fn eig_h(&self) -> (Vec<f64>, CMat) {
        let (vals, vecs) = jacobi(self, true);
        let vecs = vecs.expect("eigenvectors requested");
        sort_eigen(vals, Some(vecs))
    }

    /// Eigenvalues only (descending), skipping eigenvector accumulation.
    pub fn eigvals_h(&self) -> Vec<f64> {
        let (vals, _) = jacobi(self, false);
        sort_eigen(vals, None).0
    }

    pub fn min_eig_h(&self) -> f64 {
        self.eigvals_h().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Operator square root of a PSD Hermitian matrix; small negative
    /// eigenvalues from roundoff are clamped to zero.
    pub fn sqrt_psd(&self) -> CMat {
        let (vals, vecs) = self.eig_h();
        let roots: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
        recompose(&roots, &vecs)
    }

    /// Σ|λ_i| for a Hermitian matrix (the trace norm ‖·‖₁).
    pub fn trace_norm_h(&self) -> f64 {
        self.eigvals_h().into_iter().map(f64::abs).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// V · diag(vals) · V†
pub fn recompose(vals: &[f64], vecs: &CMat) -> CMat {
    let n = vecs.rows();
    let mut out = CMat::zeros(n, n);
    for (k, &l) in vals.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs[(i, k)] * l;
            for j in 0..n {
                out[(i, j)] += vik * vecs[(j, k)].conj();
            }
        }
    }
    out
}

fn sort_eigen(vals: Vec<f64>, vecs: Option<CMat>) -> (Vec<f64>, CMat) {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .partial_cmp(&vals[a])
            .unwrap()
            .then_with(|| match &vecs {
                Some(v) => {
                    for i in 0..n {
                        let (x, y) = (v[(i, a)], v[(i, b)]);
                        let c =
                            x.re.partial_cmp(&y.re)
                                .unwrap()
                                .then(x.im.partial_cmp(&y.im).unwrap());
                        if c != std::cmp::Ordering::Equal {
                            return c;
                        }
                    }
                    std::cmp::Ordering::Equal
                }
                None => std::cmp::Ordering::Equal,
            })
    });
    let sorted_vals: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
    let sorted_vecs = match vecs {
        Some(v) => {
            let mut out = CMat::zeros(n, n);
            for (newk, &oldk) in order.iter().enumerate() {
                // Fix the global phase: largest-modulus entry real positive.
                let mut best = 0usize;
                let mut bestn = -1.0;
                for i in 0..n {
                    let m = v[(i, oldk)].norm();
                    if m > bestn + 1e-12 {
                        bestn = m;
                        best = i;
                    }
                }
                let pivot = v[(best, oldk)];
                let phase = if pivot.norm() > 0.0 {
                    pivot.conj() / pivot.norm()
                } else {
                    ONE
                };
                for i in 0..n {
                    out[(i, newk)] = v[(i, oldk)] * phase;
                }
            }
            out
        }
        None => CMat::zeros(0, 0),
    };
    (sorted_vals, sorted_vecs)
}

/// Cyclic Jacobi for Hermitian matrices with complex plane rotations.
fn jacobi(a: &CMat, want_vecs: bool) -> (Vec<f64>, Option<CMat>) {
    assert!(a.is_square(), "eig_h needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = if want_vecs {
        Some(CMat::identity(n))
    } else {
        None
    };
    if n <= 1 {
        let vals = (0..n).map(|i| m[(i, i)].re).collect();
        return (vals, v);
    }
    let scale = m.max_abs().max(1e-300);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= tol * 1e-2 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / mag; // e^{iφ}
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p,q): [[c, s], [-s*w, c*w]] with w = conj(phase).
                let w = phase.conj();
                // Column update: M <- M J.
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * c - miq * (w * s);
                    m[(i, q)] = mip * s + miq * (w * c);
                }
                // Row update: M <- J† M.
                let wb = phase; // conj(w)
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = mpj * c - mqj * (wb * s);
                    m[(q, j)] = mpj * s + mqj * (wb * c);
                }
                if let Some(vm) = v.as_mut() {
                    for i in 0..n {
                        let vip = vm[(i, p)];
                        let viq = vm[(i, q)];
                        vm[(i, p)] = vip * c - viq * (w * s);
                        vm[(i, q)] = vip * s + viq * (w * c);
                    }
                }
                // Tidy roundoff: the pivot is now zero by construction.
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
            }
        }
    }
    let vals = (0..n).map(|i| m[(i, i)].re).collect();
    (vals, v)
}

// ---------------------------------------------------------------------------
// Complex vector helpers
// ---------------------------------------------------------------------------

/// ⟨u|v⟩ with the conjugation on the first argument.
pub fn vdot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vnorm(u: &[C64]) -> f64 {
    u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vscale(u: &[C64], c: C64) -> Vec<C64> {
    u.iter().map(|a| a * c).collect()
}

pub fn vsub(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn vkron(u: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}
