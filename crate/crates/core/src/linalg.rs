//! Dense complex LU and Schur-based eigenvectors for real non-symmetric matrices.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};

use crate::error::{Result, RotorError};
use crate::num::{cabs, creal, csqrt, Complex, Real};

/// LU factorization with partial pivoting of a square complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexLu<T: Real> {
    lu: DMatrix<Complex<T>>,
    perm: Vec<usize>,
    /// Smallest pivot magnitude.
    pub min_pivot: T,
    /// Smallest pivot magnitude relative to the largest entry of the input.
    pub min_pivot_ratio: T,
}

impl<T: Real> ComplexLu<T> {
    pub fn new(mut a: DMatrix<Complex<T>>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let scale = a.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)));
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = T::max_value().unwrap_or_else(T::one);
        for k in 0..n {
            let (mut p, mut best) = (k, T::zero());
            for i in k..n {
                let v = cabs(a[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            min_pivot = min_pivot.min(best);
            if p != k {
                a.swap_rows(p, k);
                perm.swap(p, k);
            }
            let pivot = a[(k, k)];
            if best == T::zero() {
                continue;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f != creal(T::zero()) {
                    for j in k + 1..n {
                        let t = a[(k, j)];
                        a[(i, j)] -= f * t;
                    }
                }
            }
        }
        let min_pivot_ratio = if scale > T::zero() { min_pivot / scale } else { T::zero() };
        Self { lu: a, perm, min_pivot, min_pivot_ratio }
    }

    pub fn is_singular(&self) -> bool {
        self.min_pivot_ratio == T::zero()
    }

    /// Solves `A x = b`. Returns `None` on an exactly zero pivot.
    pub fn solve(&self, b: &DVector<Complex<T>>) -> Option<DVector<Complex<T>>> {
        let n = self.lu.nrows();
        let mut x = DVector::from_fn(n, |i, _| b[self.perm[i]]);
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            let d = self.lu[(i, i)];
            if d == creal(T::zero()) {
                return None;
            }
            x[i] = acc / d;
        }
        Some(x)
    }
}

/// One eigenvalue of a real matrix with its right and left eigenvectors.
#[derive(Debug, Clone)]
pub(crate) struct EigenTriple<T: Real> {
    pub value: Complex<T>,
    pub right: DVector<Complex<T>>,
    pub left: DVector<Complex<T>>,
}

#[derive(Debug, Clone)]
pub(crate) struct RealEigen<T: Real> {
    /// Every eigenvalue, in Schur order.
    pub all_values: Vec<Complex<T>>,
    /// One representative per conjugate pair (`Im ≥ 0`) and every real eigenvalue.
    pub kept: Vec<EigenTriple<T>>,
}

/// Eigenvalues of the 2×2 block `[[a, b], [c, d]]`, ordered with `Im ≥ 0` first.
fn block_eigenvalues<T: Real>(a: T, b: T, c: T, d: T) -> [Complex<T>; 2] {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let disc = ((a - d) * half).powi(2) + b * c;
    if disc >= T::zero() {
        let r = disc.sqrt();
        [creal(mean + r), creal(mean - r)]
    } else {
        let r = (-disc).sqrt();
        [Complex::new(mean, r), Complex::new(mean, -r)]
    }
}

/// Solves the 2×2 complex system `m x = rhs` with a pivot floor.
fn solve2<T: Real>(m: [[Complex<T>; 2]; 2], rhs: [Complex<T>; 2], floor: T) -> [Complex<T>; 2] {
    // Gaussian elimination with row pivoting.
    let (m, rhs) = if cabs(m[1][0]) > cabs(m[0][0]) { ([m[1], m[0]], [rhs[1], rhs[0]]) } else { (m, rhs) };
    let mut p0 = m[0][0];
    if cabs(p0) < floor {
        p0 = creal(floor);
    }
    let f = m[1][0] / p0;
    let mut p1 = m[1][1] - f * m[0][1];
    if cabs(p1) < floor {
        p1 = creal(floor);
    }
    let x1 = (rhs[1] - f * rhs[0]) / p1;
    let x0 = (rhs[0] - m[0][1] * x1) / p0;
    [x0, x1]
}

/// Null vector of a singular 2×2 complex matrix.
fn null2<T: Real>(m: [[Complex<T>; 2]; 2]) -> [Complex<T>; 2] {
    let a = [m[0][1], -m[0][0]];
    let b = [-m[1][1], m[1][0]];
    let na = cabs(a[0]) + cabs(a[1]);
    let nb = cabs(b[0]) + cabs(b[1]);
    if na == T::zero() && nb == T::zero() {
        [creal(T::one()), creal(T::zero())]
    } else if na >= nb {
        a
    } else {
        b
    }
}

/// Real Schur decomposition followed by quasi-triangular back/forward
/// substitution for right and left eigenvectors, transformed back with the
/// Schur vectors. Costs O(N³) overall.
pub(crate) fn real_eigen<T: Real>(s: DMatrix<T>) -> Result<RealEigen<T>> {
    let n = s.nrows();
    let eps = T::machine_eps();
    let schur = Schur::try_new(s, eps, 200 * n.max(10)).ok_or(RotorError::EigenFailure { residual: f64::NAN })?;
    let (q, t) = schur.unpack();

    // Block structure of the quasi-triangular factor.
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != T::zero() {
            if i + 2 < n && t[(i + 2, i + 1)] != T::zero() {
                return Err(RotorError::EigenFailure { residual: t[(i + 2, i + 1)].abs().to_f64_lossy() });
            }
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    let mut block_of = vec![0usize; n];
    for (b, &(start, size)) in blocks.iter().enumerate() {
        for r in start..start + size {
            block_of[r] = b;
        }
    }

    let tnorm = t.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let floor = (eps * tnorm).max(T::min_value().unwrap_or(eps));
    let tc = |r: usize, c: usize| creal(t[(r, c)]);

    let mut all_values = Vec::with_capacity(n);
    let mut kept = Vec::new();
    for &(start, size) in &blocks {
        let values: Vec<Complex<T>> = if size == 1 {
            vec![creal(t[(start, start)])]
        } else {
            let v = block_eigenvalues(
                t[(start, start)],
                t[(start, start + 1)],
                t[(start + 1, start)],
                t[(start + 1, start + 1)],
            );
            v.to_vec()
        };
        all_values.extend(values.iter().copied());
        let complex_pair = size == 2 && values[0].im != T::zero();
        let wanted: Vec<Complex<T>> = if complex_pair { vec![values[0]] } else { values };

        for lambda in wanted {
            // Right eigenvector of T: zero below the block, back-substitute above.
            let mut x = DVector::from_element(n, creal(T::zero()));
            if size == 1 {
                x[start] = creal(T::one());
            } else {
                let v = null2([
                    [tc(start, start) - lambda, tc(start, start + 1)],
                    [tc(start + 1, start), tc(start + 1, start + 1) - lambda],
                ]);
                x[start] = v[0];
                x[start + 1] = v[1];
            }
            let mut b = block_of[start];
            while b > 0 {
                b -= 1;
                let (r0, sz) = blocks[b];
                let tail = start + size;
                let rhs = |r: usize| {
                    let mut acc = creal(T::zero());
                    for c in r0 + sz..tail {
                        acc += tc(r, c) * x[c];
                    }
                    -acc
                };
                if sz == 1 {
                    let mut d = tc(r0, r0) - lambda;
                    if cabs(d) < floor {
                        d = creal(floor);
                    }
                    x[r0] = rhs(r0) / d;
                } else {
                    let sol = solve2(
                        [
                            [tc(r0, r0) - lambda, tc(r0, r0 + 1)],
                            [tc(r0 + 1, r0), tc(r0 + 1, r0 + 1) - lambda],
                        ],
                        [rhs(r0), rhs(r0 + 1)],
                        floor,
                    );
                    x[r0] = sol[0];
                    x[r0 + 1] = sol[1];
                }
                rescale(&mut x);
            }

            // Left eigenvector of T: zero above the block, forward-substitute below.
            let mut z = DVector::from_element(n, creal(T::zero()));
            if size == 1 {
                z[start] = creal(T::one());
            } else {
                let v = null2([
                    [tc(start, start) - lambda, tc(start + 1, start)],
                    [tc(start, start + 1), tc(start + 1, start + 1) - lambda],
                ]);
                z[start] = v[0];
                z[start + 1] = v[1];
            }
            for &(c0, sz) in &blocks[block_of[start] + 1..] {
                let rhs = |c: usize| {
                    let mut acc = creal(T::zero());
                    for r in start..c0 {
                        acc += z[r] * tc(r, c);
                    }
                    -acc
                };
                if sz == 1 {
                    let mut d = tc(c0, c0) - lambda;
                    if cabs(d) < floor {
                        d = creal(floor);
                    }
                    z[c0] = rhs(c0) / d;
                } else {
                    let sol = solve2(
                        [
                            [tc(c0, c0) - lambda, tc(c0 + 1, c0)],
                            [tc(c0, c0 + 1), tc(c0 + 1, c0 + 1) - lambda],
                        ],
                        [rhs(c0), rhs(c0 + 1)],
                        floor,
                    );
                    z[c0] = sol[0];
                    z[c0 + 1] = sol[1];
                }
                rescale(&mut z);
            }

            let right = real_times_complex(&q, &x);
            let left = real_times_complex(&q, &z);
            kept.push(EigenTriple { value: lambda, right, left });
        }
    }
    Ok(RealEigen { all_values, kept })
}

/// Keeps partially built eigenvectors away from overflow.
fn rescale<T: Real>(x: &mut DVector<Complex<T>>) {
    let m = x.iter().fold(T::zero(), |a, v| a.max(cabs(*v)));
    if m > T::lit(1e30) {
        let inv = T::one() / m;
        for v in x.iter_mut() {
            *v *= inv;
        }
    }
}

pub(crate) fn real_times_complex<T: Real>(a: &DMatrix<T>, x: &DVector<Complex<T>>) -> DVector<Complex<T>> {
    let re = a * x.map(|v| v.re);
    let im = a * x.map(|v| v.im);
    DVector::from_fn(a.nrows(), |i, _| Complex::new(re[i], im[i]))
}

/// Unconjugated bilinear product `xᵀ y`.
pub(crate) fn dot_t<T: Real>(x: &DVector<Complex<T>>, y: &DVector<Complex<T>>) -> Complex<T> {
    x.iter().zip(y.iter()).fold(creal(T::zero()), |acc, (a, b)| acc + *a * *b)
}

/// Hermitian product `xᴴ y`.
pub(crate) fn dot_h<T: Real>(x: &DVector<Complex<T>>, y: &DVector<Complex<T>>) -> Complex<T> {
    x.iter().zip(y.iter()).fold(creal(T::zero()), |acc, (a, b)| acc + a.conj() * *b)
}

pub(crate) fn cnorm<T: Real>(x: &DVector<Complex<T>>) -> T {
    x.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
}

/// Frobenius norm of a real matrix.
pub(crate) fn fnorm<T: Real>(a: &DMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt()
}

/// Roots of `a s² + b s + c` (complex coefficients).
pub(crate) fn quadratic_roots<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> [Complex<T>; 2] {
    let two = creal(T::lit(2.0));
    let disc = csqrt(b * b - creal(T::lit(4.0)) * a * c);
    // Cancellation-free form.
    let q = if (b.conj() * disc).re >= T::zero() { -(b + disc) / two } else { -(b - disc) / two };
    if cabs(q) == T::zero() {
        return [creal(T::zero()), creal(T::zero())];
    }
    [q / a, c / q]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_complex_system() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex::new(1.0, 1.0),
                Complex::new(2.0, 0.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.0, 0.0),
                Complex::new(3.0, 0.5),
                Complex::new(1.0, 0.0),
                Complex::new(4.0, 0.0),
                Complex::new(0.0, 2.0),
                Complex::new(1.0, -1.0),
            ],
        );
        let x = DVector::from_vec(vec![Complex::new(1.0, 2.0), Complex::new(-1.0, 0.0), Complex::new(0.5, 0.5)]);
        let b = &a * &x;
        let lu = ComplexLu::new(a);
        let y = lu.solve(&b).unwrap();
        assert!((y - x).norm() < 1e-13);
    }

    #[test]
    fn lu_reports_singularity() {
        let a = DMatrix::from_element(2, 2, Complex::new(1.0, 0.0));
        let lu = ComplexLu::new(a);
        assert!(lu.is_singular());
        assert!(lu.solve(&DVector::from_element(2, Complex::new(1.0, 0.0))).is_none());
    }

    #[test]
    fn schur_eigenvectors_satisfy_definition() {
        let a = DMatrix::from_row_slice(4, 4, &[
            0.0, 1.0, 0.0, 0.0, //
            -4.0, -0.2, 1.0, 0.3, //
            0.0, 0.0, 0.0, 1.0, //
            0.5, 0.1, -9.0, -0.1,
        ]);
        let eig = real_eigen(a.clone()).unwrap();
        assert_eq!(eig.all_values.len(), 4);
        for t in &eig.kept {
            let ax = real_times_complex(&a, &t.right);
            let r = ax - t.right.map(|v| v * t.value);
            assert!(cnorm(&r) < 1e-12 * cnorm(&t.right));
            let atz = real_times_complex(&a.transpose(), &t.left);
            let r = atz - t.left.map(|v| v * t.value);
            assert!(cnorm(&r) < 1e-12 * cnorm(&t.left));
        }
    }

    #[test]
    fn repeated_eigenvalue_gives_independent_vectors() {
        let mut a = DMatrix::<f64>::zeros(4, 4);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = -25.0;
        a[(2, 3)] = 1.0;
        a[(3, 2)] = -25.0;
        let eig = real_eigen(a.clone()).unwrap();
        assert_eq!(eig.kept.len(), 2);
        let (u, v) = (&eig.kept[0].right, &eig.kept[1].right);
        let mac = dot_h(u, v).norm_sqr() / (dot_h(u, u).re * dot_h(v, v).re);
        assert!(mac < 0.99);
        for t in &eig.kept {
            let r = real_times_complex(&a, &t.right) - t.right.map(|x| x * t.value);
            assert!(cnorm(&r) < 1e-12 * cnorm(&t.right));
        }
    }

    #[test]
    fn quadratic_roots_match() {
        let r = quadratic_roots(Complex::new(1.0, 0.0), Complex::new(2.0, 0.0), Complex::new(100.0, 0.0));
        let sq = 99f64.sqrt();
        let mut ims: Vec<f64> = r.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[1] - sq).abs() < 1e-12 && (ims[0] + sq).abs() < 1e-12);
        assert!(r.iter().all(|z| (z.re + 1.0).abs() < 1e-12));
    }
}
