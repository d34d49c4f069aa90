//! Dense row-major matrices and a nonsymmetric eigenvalue solver.
//!
//! Eigenvalues come from balancing, Householder reduction to upper
//! Hessenberg form and Francis double-shift QR iteration, following the
//! EISPACK `balanc`/`orthes`/`hqr` sequence.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `x^T M` for a row vector `x`.
    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += xi * m;
            }
        }
        out
    }

    /// `M y` for a column vector `y`.
    pub fn right_mul(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `M^k` by repeated squaring; `M^0` is the identity.
    pub fn pow(&self, mut k: u32) -> Matrix {
        assert!(self.is_square());
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Rows and columns `indices`, in that order.
    pub fn submatrix(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(indices.len(), indices.len(), |a, b| self[(indices[a], indices[b])])
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Does not change the spectrum.
fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(h: &mut Matrix) {
    let n = h.rows;
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = math::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[(i, j)]).sum::<f64>() / hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f = (m..=high).rev().map(|j| ort[j] * h[(i, j)]).sum::<f64>() / hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = 0.0;
        }
    }
}

#[inline]
fn with_sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

const MAX_SWEEPS_PER_ROOT: usize = 60;

/// Eigenvalues of an upper Hessenberg matrix by shifted QR; destroys `a`.
fn hessenberg_qr(a: &mut Matrix) -> Result<Vec<Complex64>> {
    let n = a.rows;
    let mut roots = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(roots);
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    // `nn` is one past the last row of the active block.
    let mut nn = n;
    let mut t = 0.0;
    while nn > 0 {
        let mut its = 0;
        loop {
            let last = nn - 1;
            // Look for a negligible subdiagonal element.
            let mut l = last;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }

            let mut x = a[(last, last)];
            if l == last {
                roots[last] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[(last - 1, last - 1)];
            let mut w = a[(last, last - 1)] * a[(last - 1, last)];
            if l + 1 == last {
                let pp = 0.5 * (y - x);
                let qq = pp * pp + w;
                let z = math::sqrt(qq.abs());
                x += t;
                if qq >= 0.0 {
                    let z = pp + with_sign(z, pp);
                    roots[last - 1] = Complex64::new(x + z, 0.0);
                    roots[last] = Complex64::new(if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    roots[last] = Complex64::new(x + pp, -z);
                    roots[last - 1] = Complex64::new(x + pp, z);
                }
                nn -= 2;
                break;
            }

            if its == MAX_SWEEPS_PER_ROOT {
                return Err(Error::NoConvergence { size: last - l + 1 });
            }
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for i in 0..=last {
                    a[(i, i)] -= x;
                }
                let s = a[(last, last - 1)].abs() + a[(last - 1, last - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Look for two consecutive small subdiagonal elements.
            let (mut p, mut q, mut r): (f64, f64, f64);
            let mut m = last - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..last - 1 {
                a[(i + 2, i)] = 0.0;
                if i != m {
                    a[(i + 2, i - 1)] = 0.0;
                }
            }

            // Double QR step on rows l..=last and columns m..=last.
            let mut k = m;
            while k < last {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != last { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = with_sign(math::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=last {
                        let mut pj = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != last {
                            pj += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pj * z;
                        }
                        a[(k + 1, j)] -= pj * y;
                        a[(k, j)] -= pj * x;
                    }
                    let mmin = if last < k + 3 { last } else { k + 3 };
                    for i in l..=mmin {
                        let mut pi = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != last {
                            pi += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pi * r;
                        }
                        a[(i, k + 1)] -= pi * q;
                        a[(i, k)] -= pi;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(roots)
}

/// All eigenvalues of a square real matrix, in no particular order.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::InvalidSize {
            what: "eigenvalues need a square matrix",
            got: m.cols,
        });
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

/// Solves `A x = b` in complex arithmetic by LU with partial pivoting.
/// Exactly singular pivots are nudged, which suits inverse iteration.
fn complex_solve(a: &mut [Complex64], n: usize, b: &mut [Complex64]) {
    let tiny = f64::EPSILON * f64::EPSILON;
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row * n + col].norm() > a[piv * n + col].norm() {
                piv = row;
            }
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        if a[col * n + col].norm() < tiny {
            a[col * n + col] = Complex64::new(tiny, 0.0);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[col * n + j];
                a[row * n + j] -= f * v;
            }
            let bc = b[col];
            b[row] -= f * bc;
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc -= a[col * n + j] * b[j];
        }
        b[col] = acc / a[col * n + col];
    }
}

/// Relative residual `||M v - lambda v|| / (||M||_F ||v||)` of an
/// eigenvector found by inverse iteration for `lambda`.
pub fn eigenpair_residual(m: &Matrix, lambda: Complex64) -> f64 {
    let n = m.rows;
    if n == 0 {
        return 0.0;
    }
    let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let shift = lambda + Complex64::new(norm * 1e-10, norm * 1e-10);
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + i as f64 * 0.01, 0.0)).collect();
    let mut best = f64::INFINITY;
    for _ in 0..4 {
        let mut a: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let d = if i == j { shift } else { Complex64::new(0.0, 0.0) };
                Complex64::new(m[(i, j)], 0.0) - d
            })
            .collect();
        complex_solve(&mut a, n, &mut v);
        let vnorm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if !(vnorm > 0.0) || !vnorm.is_finite() {
            break;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let mut res = 0.0;
        for i in 0..n {
            let mut acc = -lambda * v[i];
            for j in 0..n {
                acc += v[j] * m[(i, j)];
            }
            res += acc.norm_sqr();
        }
        best = best.min(math::sqrt(res) / norm);
    }
    best
}

/// Modulus of a complex number without overflow.
pub fn modulus(z: Complex64) -> f64 {
    math::hypot(z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn identity_spectrum() {
        let ev = eigenvalues(&Matrix::identity(5)).unwrap();
        assert!(ev.iter().all(|z| (z - 1.0).norm() < 1e-12));
    }

    #[test]
    fn swap_matrix_spectrum() {
        let ev = sorted_re(eigenvalues(&Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]])).unwrap());
        assert_abs_diff_eq!(ev[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let ev = sorted_re(eigenvalues(&Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]])).unwrap());
        assert_abs_diff_eq!(ev[0].im.abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[0].re, 0.0, epsilon = 1e-12);
        assert_eq!(ev[0], ev[1].conj());
    }

    #[test]
    fn triangular_spectrum_is_diagonal() {
        let m = Matrix::from_rows(&[[3.0, 1.0, 4.0, 1.0], [0.0, -5.0, 9.0, 2.0], [0.0, 0.0, 6.0, 5.0], [0.0, 0.0, 0.0, 0.5]]);
        let ev = sorted_re(eigenvalues(&m).unwrap());
        for (z, want) in ev.iter().zip([-5.0, 0.5, 3.0, 6.0]) {
            assert_abs_diff_eq!(z.re, want, epsilon = 1e-10);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn cyclic_permutation_roots_of_unity() {
        let n = 7;
        let m = Matrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
        let ev = eigenvalues(&m).unwrap();
        for z in &ev {
            assert_abs_diff_eq!(modulus(*z), 1.0, epsilon = 1e-9);
            assert!(eigenpair_residual(&m, *z) < 1e-8);
        }
    }

    #[test]
    fn power_and_products() {
        let p = Matrix::from_rows(&[[0.9, 0.1], [0.5, 0.5]]);
        let p3 = p.pow(3);
        let direct = p.mul(&p).mul(&p);
        assert!(p3.max_abs_diff(&direct) < 1e-15);
        assert_eq!(p.pow(0), Matrix::identity(2));
        assert_eq!(p.left_mul(&[1.0, 0.0]), vec![0.9, 0.1]);
        assert_eq!(p.right_mul(&[1.0, 1.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_non_square() {
        assert!(eigenvalues(&Matrix::zeros(2, 3)).is_err());
    }
}
