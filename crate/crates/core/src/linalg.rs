//! Small dense complex matrices: pivoted and plain Cholesky, and a Jacobi
//! eigenvalue solver for Hermitian matrices.

use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn add_to_diagonal(&mut self, eps: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += eps;
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of a semidefinite pivoted Cholesky run.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotedCholesky {
    /// Every pivot and residual diagonal stayed at or above `-tol`, and the
    /// residual block left after stopping is negligible.
    pub psd: bool,
    /// Smallest pivot seen, or the witness eigenvalue of an offending 2x2
    /// residual block when one was found.
    pub min_pivot: f64,
    /// Number of pivots above `tol`.
    pub rank: usize,
    /// Symmetric permutation applied: `perm[k]` is the original index of the
    /// k-th pivot.
    pub perm: Vec<usize>,
    /// Lower-triangular factor in permuted order (first `rank` columns used).
    pub factor: CMatrix,
}

/// Diagonal-pivoted Cholesky of a Hermitian matrix, tolerant of rank
/// deficiency: stops when the largest residual diagonal drops to `tol`, then
/// checks that the residual is negligible.
pub fn pivoted_cholesky(a: &CMatrix, tol: f64) -> PivotedCholesky {
    let n = a.rows();
    let mut s = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = CMatrix::zeros(n, n);
    let mut min_pivot = f64::INFINITY;
    let mut rank = 0;
    let mut psd = true;

    for k in 0..n {
        let (p, d) = (k..n)
            .map(|i| (i, s[(i, i)].re))
            .fold((k, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if d <= tol {
            // Residual block should be numerically zero.
            for i in k..n {
                let di = s[(i, i)].re;
                min_pivot = min_pivot.min(di);
                for j in (i + 1)..n {
                    let dj = s[(j, j)].re;
                    let off = s[(i, j)].norm();
                    if off * off > (di.max(0.0) + tol) * (dj.max(0.0) + tol) {
                        let mean = 0.5 * (di + dj);
                        let half = 0.5 * (di - dj);
                        let witness = mean - (half * half + off * off).sqrt();
                        min_pivot = min_pivot.min(witness);
                    }
                }
            }
            if min_pivot < -tol {
                psd = false;
            }
            break;
        }
        if p != k {
            swap_symmetric(&mut s, k, p);
            perm.swap(k, p);
            for j in 0..k {
                let t = l[(k, j)];
                l[(k, j)] = l[(p, j)];
                l[(p, j)] = t;
            }
        }
        min_pivot = min_pivot.min(d);
        let root = d.sqrt();
        l[(k, k)] = Complex64::new(root, 0.0);
        for i in (k + 1)..n {
            l[(i, k)] = s[(i, k)] / root;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let update = l[(i, k)] * l[(j, k)].conj();
                s[(i, j)] -= update;
            }
        }
        rank += 1;
    }
    if n == 0 {
        min_pivot = 0.0;
    }
    PivotedCholesky {
        psd,
        min_pivot,
        rank,
        perm,
        factor: l,
    }
}

fn swap_symmetric(s: &mut CMatrix, a: usize, b: usize) {
    let n = s.rows();
    for j in 0..n {
        let t = s[(a, j)];
        s[(a, j)] = s[(b, j)];
        s[(b, j)] = t;
    }
    for i in 0..n {
        let t = s[(i, a)];
        s[(i, a)] = s[(i, b)];
        s[(i, b)] = t;
    }
}

/// Plain Cholesky `A = L L*` of a Hermitian positive definite matrix.
/// Returns the offending pivot on failure.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix, f64> {
    let n = a.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(d);
        }
        let root = d.sqrt();
        l[(j, j)] = Complex64::new(root, 0.0);
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / root;
        }
    }
    Ok(l)
}

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic Jacobi
/// rotations on the real symmetric embedding `[[A, -B], [B, A]]` of
/// `A + iB` (each eigenvalue appears there twice).
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    jacobi_symmetric(&mut a, m);
    let mut eig: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig.into_iter().step_by(2).collect()
}

fn jacobi_symmetric(a: &mut [f64], m: usize) {
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}
