//! Dense complex matrices, one-sided Jacobi SVD, pseudo-inverse and a
//! Hermitian eigensolver. Everything here targets the small dimensions of a
//! few-qubit register; no attempt is made at cache blocking or sparsity.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
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
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                actual: rows.iter().map(Vec::len).find(|&l| l != c).unwrap_or(0),
            });
        }
        let mut m = CMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
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

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        let mut out = self.clone();
        for z in &mut out.data {
            *z = z.conj();
        }
        out
    }

    /// Kronecker product; `self` indexes the most significant block.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &CMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(&other.data) {
            *z = f(*z, *w);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= s;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |(M†M - I)_{ij}| over all entries; 0 for an exactly unitary matrix.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.dagger().matmul(self).expect("square");
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                dev = dev.max((gram[(i, j)] - expect).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Moore-Penrose pseudo-inverse. Singular values below
    /// `rel_cutoff * sigma_max` are treated as zero.
    pub fn pinv(&self, rel_cutoff: f64) -> CMatrix {
        let svd = self.svd();
        let sigma_max = svd.singular_values.first().copied().unwrap_or(0.0);
        let cutoff = rel_cutoff * sigma_max;
        // pinv = V Σ⁺ U†
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff || s == 0.0 {
                continue;
            }
            let inv = 1.0 / s;
            for i in 0..self.cols {
                let vk = svd.v[(i, k)];
                for j in 0..self.rows {
                    out[(i, j)] += vk * inv * svd.u[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Full singular value decomposition `A = U Σ V†` with square unitary
    /// factors. Computed by one-sided Jacobi rotations; singular values are
    /// returned in non-increasing order.
    pub fn svd(&self) -> Svd {
        if self.rows >= self.cols {
            svd_tall(self)
        } else {
            // A† = U Σ V†  =>  A = V Σ U†
            let t = svd_tall(&self.dagger());
            Svd {
                u: t.v,
                singular_values: t.singular_values,
                v: t.u,
            }
        }
    }

    /// Eigenvalues of a Hermitian matrix, descending, via two-sided Jacobi
    /// rotations. Callers must pass a (numerically) Hermitian matrix.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square(), "eigenvalues of a non-square matrix");
        let n = self.rows;
        let mut h = self.clone();
        let scale = self.frobenius_norm().max(1.0);
        for _sweep in 0..MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(h[(p, q)].norm());
                }
            }
            if off <= JACOBI_EPS * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = h[(p, q)];
                    if g.norm() <= JACOBI_EPS * scale {
                        continue;
                    }
                    let alpha = h[(p, p)].re;
                    let beta = h[(q, q)].re;
                    let (c, s_mag, phase) = jacobi_rotation(alpha, beta, g);
                    let s = s_mag * phase;
                    // H <- R† H R  with R = [[c, s], [-s̄, c]] on (p, q)
                    for i in 0..n {
                        let hip = h[(i, p)];
                        let hiq = h[(i, q)];
                        h[(i, p)] = hip * c - hiq * s.conj();
                        h[(i, q)] = hip * s + hiq * c;
                    }
                    for j in 0..n {
                        let hpj = h[(p, j)];
                        let hqj = h[(q, j)];
                        h[(p, j)] = hpj * c - hqj * s;
                        h[(q, j)] = hpj * s.conj() + hqj * c;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eigs
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

/// Result of [`CMatrix::svd`]: `a = u * diag(singular_values) * v.dagger()`
/// with `u` (rows × rows) and `v` (cols × cols) unitary.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values above `rel_cutoff * sigma_max`.
    pub fn rank(&self, rel_cutoff: f64) -> usize {
        let sigma_max = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_cutoff * sigma_max && s > 0.0)
            .count()
    }

    /// Reassemble `u * diag(σ) * v†`, mainly for tests.
    pub fn reconstruct(&self) -> CMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut out = CMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                let us = self.u[(i, k)] * s;
                for j in 0..n {
                    out[(i, j)] += us * self.v[(j, k)].conj();
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 64;
const JACOBI_EPS: f64 = 1e-14;

/// Rotation parameters (c, |s|, e^{iφ}) that diagonalize the Hermitian 2×2
/// block [[alpha, g], [ḡ, beta]]; c is real, s = |s| e^{iφ} with φ = arg g.
fn jacobi_rotation(alpha: f64, beta: f64, g: Complex64) -> (f64, f64, Complex64) {
    let g_norm = g.norm();
    let phase = g / g_norm;
    let tau = (beta - alpha) / (2.0 * g_norm);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t, phase)
}

/// One-sided Jacobi SVD for rows >= cols. Columns of the working copy are
/// rotated pairwise until mutually orthogonal; V accumulates the rotations.
fn svd_tall(a: &CMatrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut b = a.clone();
    let mut v = CMatrix::identity(n);

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::ZERO;
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    alpha += bp.norm_sqr();
                    beta += bq.norm_sqr();
                    gamma += bp.conj() * bq;
                }
                if gamma.norm() <= JACOBI_EPS * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, s_mag, phase) = jacobi_rotation(alpha, beta, gamma);
                let s = s_mag * phase;
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    b[(i, p)] = bp * c - bq * s.conj();
                    b[(i, q)] = bp * s + bq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * s.conj();
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);

    let mut u = CMatrix::zeros(m, m);
    let mut v_sorted = CMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        for i in 0..n {
            v_sorted[(i, k)] = v[(i, j)];
        }
        if norms[j] > sigma_max * 1e-306 && norms[j] > 0.0 {
            let inv = 1.0 / norms[j];
            for i in 0..m {
                u[(i, k)] = b[(i, j)] * inv;
            }
        }
    }
    complete_orthonormal(&mut u, &singular_values, sigma_max);

    Svd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Replace the columns of `u` that correspond to (numerically) zero singular
/// values, plus the trailing m-n columns, by an orthonormal completion built
/// from standard basis vectors via Gram-Schmidt.
fn complete_orthonormal(u: &mut CMatrix, singular_values: &[f64], sigma_max: f64) {
    let m = u.rows();
    let floor = sigma_max * 1e-13;
    let good = |k: usize| -> bool {
        k < singular_values.len() && singular_values[k] > floor && singular_values[k] > 0.0
    };

    let mut kept: Vec<Vec<Complex64>> = (0..m)
        .filter(|&k| good(k))
        .map(|k| (0..m).map(|i| u[(i, k)]).collect())
        .collect();

    let orthogonalize = |vec: &mut Vec<Complex64>, kept: &[Vec<Complex64>]| -> f64 {
        for _ in 0..2 {
            for col_kept in kept {
                let proj: Complex64 = col_kept
                    .iter()
                    .zip(vec.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for (vi, ki) in vec.iter_mut().zip(col_kept.iter()) {
                    *vi -= proj * ki;
                }
            }
        }
        vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };

    let fill: Vec<usize> = (0..m).filter(|&k| !good(k)).collect();
    for col in fill {
        // Standard basis vector with the largest residual after projecting
        // out everything kept so far.
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for candidate in 0..m {
            let mut vec = vec![Complex64::ZERO; m];
            vec[candidate] = Complex64::ONE;
            let norm = orthogonalize(&mut vec, &kept);
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, vec));
            }
            if norm > 0.7 {
                break; // good enough, no need to scan further
            }
        }
        let (norm, mut vec) = best.expect("non-empty candidate set");
        assert!(norm > 1e-8, "orthonormal completion failed");
        for z in &mut vec {
            *z /= norm;
        }
        for (i, z) in vec.iter().enumerate() {
            u[(i, col)] = *z;
        }
        kept.push(vec);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        m
    }

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                assert!(
                    (a[(i, j)] - b[(i, j)]).norm() < tol,
                    "entry ({i},{j}): {} vs {}",
                    a[(i, j)],
                    b[(i, j)]
                );
            }
        }
    }

    #[test]
    fn identity_is_unitary() {
        assert!(CMatrix::identity(4).is_unitary(1e-15));
    }

    #[test]
    fn kron_of_identities() {
        let k = CMatrix::identity(2).kron(&CMatrix::identity(3));
        assert_close(&k, &CMatrix::identity(6), 1e-15);
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, n) in &[(1, 1), (2, 2), (4, 2), (2, 4), (8, 3), (3, 8), (6, 6)] {
            for _ in 0..20 {
                let a = random_matrix(&mut rng, m, n);
                let svd = a.svd();
                assert!(svd.u.is_unitary(1e-10), "{m}x{n} U not unitary");
                assert!(svd.v.is_unitary(1e-10), "{m}x{n} V not unitary");
                assert_close(&svd.reconstruct(), &a, 1e-10);
                for w in svd.singular_values.windows(2) {
                    assert!(w[0] >= w[1]);
                }
            }
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        // Outer product => rank 1.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_matrix(&mut rng, 4, 1);
        let y = random_matrix(&mut rng, 1, 3);
        let a = x.matmul(&y).unwrap();
        let svd = a.svd();
        assert_eq!(svd.rank(1e-12), 1);
        assert!(svd.u.is_unitary(1e-10));
        assert!(svd.v.is_unitary(1e-10));
        assert_close(&svd.reconstruct(), &a, 1e-10);
    }

    #[test]
    fn svd_of_zero_matrix() {
        let a = CMatrix::zeros(3, 2);
        let svd = a.svd();
        assert_eq!(svd.rank(1e-12), 0);
        assert!(svd.u.is_unitary(1e-10));
        assert!(svd.v.is_unitary(1e-10));
    }

    #[test]
    fn pinv_satisfies_penrose_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(m, n) in &[(3, 3), (4, 2), (2, 4)] {
            let a = random_matrix(&mut rng, m, n);
            let p = a.pinv(1e-12);
            let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
            let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
            assert_close(&apa, &a, 1e-10);
            assert_close(&pap, &p, 1e-10);
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_construction() {
        // Build H = Q diag(d) Q† from a known spectrum.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_matrix(&mut rng, 5, 5);
        let q = a.svd().u; // any unitary will do
        let d = [3.0, 1.5, 0.25, 0.0, -2.0];
        let mut lam = CMatrix::zeros(5, 5);
        for (i, &x) in d.iter().enumerate() {
            lam[(i, i)] = Complex64::new(x, 0.0);
        }
        let h = q.matmul(&lam).unwrap().matmul(&q.dagger()).unwrap();
        let eigs = h.hermitian_eigenvalues();
        let mut expect = d.to_vec();
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (e, x) in eigs.iter().zip(expect.iter()) {
            assert!((e - x).abs() < 1e-10, "{e} vs {x}");
        }
    }

    #[test]
    fn singular_values_of_diagonal() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = Complex64::new(0.0, 3.0);
        a[(1, 1)] = Complex64::new(-4.0, 0.0);
        let svd = a.svd();
        assert!((svd.singular_values[0] - 4.0).abs() < 1e-12);
        assert!((svd.singular_values[1] - 3.0).abs() < 1e-12);
    }
}
