//! Small dense linear algebra for the `2d × 2d` quadratic forms carried by
//! Gaussian-mixture terms. Matrices are row-major and square.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(n: usize, real: &[f64]) -> Self {
        assert_eq!(real.len(), n * n);
        CMatrix { n, data: real.iter().map(|&r| Complex64::new(r, 0.0)).collect() }
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(s, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.im).collect()
    }

    pub fn conj(&self) -> Self {
        CMatrix { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        CMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn mul_real_vec(&self, v: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// `xᵀ A x` for real `x` (no conjugation).
    pub fn quad_real(&self, x: &[f64]) -> Complex64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.get(i, j) * x[j];
            }
            acc += row * x[i];
        }
        acc
    }

    /// Largest entry-wise deviation from symmetry, `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// Symmetrize in place: `A ← (A + Aᵀ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                let avg = (self.get(i, j) + self.get(j, i)) * 0.5;
                self.set(i, j, avg);
                self.set(j, i, avg);
            }
        }
    }
}

/// Cholesky factor of a real symmetric matrix; `None` unless positive definite.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = math::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

pub fn is_positive_definite(a: &[f64], n: usize) -> bool {
    cholesky(a, n).is_some()
}

/// Smallest eigenvalue of a real symmetric matrix (cyclic Jacobi).
pub fn min_eigenvalue(a: &[f64], n: usize) -> f64 {
    symmetric_eigenvalues(a, n).into_iter().fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

/// Inverse of a real matrix by Gauss–Jordan with partial pivoting.
pub fn invert_real(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let c = CMatrix::from_real(n, a);
    invert_complex(&c).map(|inv| inv.real_part())
}

/// Inverse of a complex matrix by Gauss–Jordan with partial pivoting.
pub fn invert_complex(a: &CMatrix) -> Option<CMatrix> {
    let n = a.n;
    let mut m = a.clone();
    let mut inv = CMatrix::identity(n);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m.get(col, col).norm();
        for r in (col + 1)..n {
            let v = m.get(r, col).norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if !(best > 0.0) || !best.is_finite() {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(col * n + j, pivot * n + j);
                inv.data.swap(col * n + j, pivot * n + j);
            }
        }
        let p = m.get(col, col);
        for j in 0..n {
            m.data[col * n + j] /= p;
            inv.data[col * n + j] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m.get(r, col);
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let mv = m.get(col, j);
                let iv = inv.get(col, j);
                m.data[r * n + j] -= f * mv;
                inv.data[r * n + j] -= f * iv;
            }
        }
    }
    Some(inv)
}

/// `A = L D Lᵀ` for a complex symmetric `A` whose real part is positive
/// definite. No pivoting is needed: every Schur complement of such a matrix
/// again has a positive definite real part, so every pivot has `Re d_k > 0`.
#[derive(Debug, Clone)]
pub struct ComplexLdl {
    n: usize,
    l: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl ComplexLdl {
    pub fn new(a: &CMatrix) -> Option<Self> {
        let n = a.n;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut dj = a.get(j, j);
            for k in 0..j {
                dj -= l[j * n + k] * l[j * n + k] * d[k];
            }
            if !(dj.re > 0.0) || !dj.re.is_finite() || !dj.im.is_finite() {
                return None;
            }
            d[j] = dj;
            l[j * n + j] = Complex64::new(1.0, 0.0);
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k] * d[k];
                }
                l[i * n + j] = s / dj;
            }
        }
        Some(ComplexLdl { n, l, d })
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[i * n + k];
                y[i] = y[i] - lik * y[k];
            }
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = self.l[k * n + i];
                y[i] = y[i] - lki * y[k];
            }
        }
        y
    }

    /// Branch of `det(A)^{1/2}` obtained by analytic continuation from the
    /// real positive definite case: the product of principal square roots of
    /// the pivots.
    pub fn sqrt_det(&self) -> Complex64 {
        self.d.iter().fold(Complex64::new(1.0, 0.0), |acc, &p| acc * math::csqrt(p))
    }

    /// `ln det(A)^{1/2}` on the same branch as [`ComplexLdl::sqrt_det`].
    pub fn log_sqrt_det(&self) -> Complex64 {
        self.d.iter().map(|&p| math::cln(p) * 0.5).sum()
    }
}
