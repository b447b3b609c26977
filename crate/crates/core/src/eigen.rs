//! Dense real symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-type shifts (the EISPACK `tred2`/`tql2` pair).
//! Matrices that are already tridiagonal skip the reduction. The output is
//! sorted ascending and is a deterministic function of the input.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::OperatorMatrix;

const MAX_SWEEPS_PER_VALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Array1<f64>,
    vectors: Array2<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    /// Orthogonal matrix whose column `k` is the eigenvector of `values[k]`.
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> ArrayView1<'_, f64> {
        self.vectors.column(k)
    }

    /// `V^T A V`: an operator expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &Array2<f64>) -> Array2<f64> {
        self.vectors.t().dot(a).dot(&self.vectors)
    }

    /// Components `V^T v` of a state in the eigenbasis.
    pub fn state_to_eigenbasis(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        self.vectors.t().dot(&v)
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut scaled = self.vectors.clone();
        for (mut col, &e) in scaled.axis_iter_mut(Axis(1)).zip(self.values.iter()) {
            col *= e;
        }
        scaled.dot(&self.vectors.t())
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.vectors.t().dot(&self.vectors);
        gram.indexed_iter()
            .map(|((i, j), &g)| (g - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// Phase factors `exp(+i E_k t)` of the Heisenberg-picture propagator.
    pub fn propagator_phases(&self, t: f64) -> Vec<Complex64> {
        self.values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, e * t))
            .collect()
    }
}

/// Eigendecomposition of a spin operator or Hamiltonian.
pub fn eigh(op: &OperatorMatrix) -> Result<EigenDecomposition> {
    eigh_matrix(op.matrix())
}

/// Eigendecomposition of a dense real symmetric matrix.
///
/// Rejects input whose asymmetry exceeds `1e-12 * max|a_ij|`.
pub fn eigh_matrix(a: &Array2<f64>) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidSector("empty matrix".into()));
    }
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut asym = 0.0_f64;
    let mut tridiagonal = true;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((a[[i, j]] - a[[j, i]]).abs());
            if j > i + 1 && (a[[i, j]] != 0.0 || a[[j, i]] != 0.0) {
                tridiagonal = false;
            }
        }
    }
    if !asym.is_finite() || asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }

    if tridiagonal {
        let diag: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
        let off: Vec<f64> = (1..n).map(|i| a[[i, i - 1]]).collect();
        return eigh_tridiagonal(&diag, &off);
    }

    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(&mut v, &mut d, &mut e);
    implicit_ql(&mut v, &mut d, &mut e)?;
    Ok(sorted(v, d))
}

/// Eigendecomposition of the symmetric tridiagonal matrix with main
/// diagonal `diag` and sub/super-diagonal `off` (`off[i]` couples `i` and `i + 1`).
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<EigenDecomposition> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidSector("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: off.len(),
        });
    }
    let mut v = Array2::eye(n);
    let mut d = diag.to_vec();
    // tql2 convention: e[i] couples i - 1 and i.
    let mut e = vec![0.0; n];
    e[1..].copy_from_slice(off);
    implicit_ql(&mut v, &mut d, &mut e)?;
    Ok(sorted(v, d))
}

fn sorted(v: Array2<f64>, d: Vec<f64>) -> EigenDecomposition {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = Array1::from_iter(order.iter().map(|&i| d[i]));
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    EigenDecomposition { values, vectors }
}

/// Householder reduction of the symmetric matrix held in `v`. On return `d`
/// holds the diagonal, `e[1..]` the sub-diagonal and `v` the accumulated
/// orthogonal transformation.
fn householder_tridiagonalize(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[[n - 1, j]];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[[i - 1, j]];
                v[[i, j]] = 0.0;
                v[[j, i]] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[[j, i]] = f;
                g = e[j] + v[[j, j]] * f;
                for k in (j + 1)..i {
                    g += v[[k, j]] * d[k];
                    e[k] += v[[k, j]] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[[k, j]] -= f * e[k] + g * d[k];
                }
                d[j] = v[[i - 1, j]];
                v[[i, j]] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v[[n - 1, i]] = v[[i, i]];
        v[[i, i]] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[[k, i + 1]] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[[k, i + 1]] * v[[k, j]];
                }
                for k in 0..=i {
                    v[[k, j]] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[[k, i + 1]] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[[n - 1, j]];
        v[[n - 1, j]] = 0.0;
    }
    v[[n - 1, n - 1]] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix (`d`, `e`), accumulating
/// rotations into the columns of `v`.
fn implicit_ql(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_VALUE {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: iter - 1,
                        residual: e[l].abs(),
                    });
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for mut row in v.rows_mut() {
                        let vi = row[i];
                        let vi1 = row[i + 1];
                        row[i + 1] = s * vi + c * vi1;
                        row[i] = c * vi - s * vi1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn check_invariants(a: &Array2<f64>, dec: &EigenDecomposition) {
        assert!(dec.orthonormality_error() < 1e-10);
        let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
        let err = (&dec.reconstruct() - a)
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!(err < 1e-8 * scale, "reconstruction error {err}");
        for w in dec.values().windows(2).into_iter() {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let a = Array2::<f64>::eye(5);
        let dec = eigh_matrix(&a).unwrap();
        assert!(dec.values().iter().all(|&x| (x - 1.0).abs() < 1e-15));
        check_invariants(&a, &dec);
    }

    #[test]
    fn half_sigma_x() {
        let a = array![[0.0, 0.5], [0.5, 0.0]];
        let dec = eigh_matrix(&a).unwrap();
        assert!((dec.values()[0] + 0.5).abs() < 1e-15);
        assert!((dec.values()[1] - 0.5).abs() < 1e-15);
        check_invariants(&a, &dec);
    }

    #[test]
    fn dense_path_matches_known_spectrum() {
        // Eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2) of the 1D Laplacian, but
        // stored dense after an orthogonal similarity to force tred2.
        let lap = array![[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let (c, s) = (0.6_f64, 0.8_f64);
        let q = array![[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]];
        let a = q.t().dot(&lap).dot(&q);
        let dec = eigh_matrix(&a).unwrap();
        let r2 = 2.0_f64.sqrt();
        for (got, want) in dec.values().iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-13);
        }
        check_invariants(&a, &dec);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = array![[1.0, 2.0], [2.5, 1.0]];
        assert!(matches!(eigh_matrix(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn rejects_non_square() {
        let a = Array2::<f64>::zeros((2, 3));
        assert!(matches!(
            eigh_matrix(&a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn one_by_one() {
        let dec = eigh_matrix(&array![[-3.5]]).unwrap();
        assert_eq!(dec.values()[0], -3.5);
        assert_eq!(dec.vectors()[[0, 0]].abs(), 1.0);
    }

    #[test]
    fn phases_are_unit_and_conjugate_under_time_reversal() {
        let dec = eigh_tridiagonal(&[0.3, -1.2, 2.0], &[0.4, 0.1]).unwrap();
        assert!(dec.propagator_phases(0.0).iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        let fwd = dec.propagator_phases(3.7);
        let bwd = dec.propagator_phases(-3.7);
        for (a, b) in fwd.iter().zip(&bwd) {
            assert!((a.norm() - 1.0).abs() < 1e-14);
            assert!((a - b.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn phase_ratio_has_gap_period() {
        let dec = eigh_matrix(&array![[1.0, 0.0], [0.0, 1.75]]).unwrap();
        let gap = 0.75;
        let period = 2.0 * std::f64::consts::PI / gap;
        let ratio = |t: f64| {
            let p = dec.propagator_phases(t);
            p[1] / p[0]
        };
        for t in [0.0, 0.4, 2.9] {
            assert!((ratio(t) - ratio(t + period)).norm() < 1e-13);
        }
        assert!((ratio(0.5 * period) + 1.0).norm() < 1e-13);
    }
}
