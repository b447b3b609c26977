//! Reference implementations used only by the tests. They share no code
//! with the library: spin matrices are built in the `S_z` basis from the
//! ladder formula, eigenpairs come from cyclic Jacobi rotations and time
//! evolution from a dense matrix exponential.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// `(S_z, S_x)` in the `S_z` basis ordered `m = -S, ..., S`.
pub fn spin_matrices(n_spins: u32) -> (Array2<f64>, Array2<f64>) {
    let s = f64::from(n_spins) / 2.0;
    let d = n_spins as usize + 1;
    let mut sz = Array2::zeros((d, d));
    let mut sx = Array2::zeros((d, d));
    for k in 0..d {
        let m = -s + k as f64;
        sz[[k, k]] = m;
        if k + 1 < d {
            let up = (s * (s + 1.0) - m * (m + 1.0)).sqrt() / 2.0;
            sx[[k + 1, k]] = up;
            sx[[k, k + 1]] = up;
        }
    }
    (sz, sx)
}

/// `H = -(2(1-alpha)/S) S_x^2 + alpha (S_z + S) + lambda S_z`.
pub fn hamiltonian(alpha: f64, lambda: f64, n_spins: u32) -> Array2<f64> {
    let s = f64::from(n_spins) / 2.0;
    let (sz, sx) = spin_matrices(n_spins);
    let d = sz.nrows();
    let sx2 = sx.dot(&sx);
    -(2.0 * (1.0 - alpha) / s) * sx2 + (alpha + lambda) * &sz + alpha * s * Array2::<f64>::eye(d)
}

/// Eigenpairs by cyclic Jacobi, ascending. Columns of the matrix are vectors.
pub fn jacobi_eigh(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));
    let values = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        vectors.column_mut(col).assign(&v.column(i));
    }
    (values, vectors)
}

/// Eigenvalue `k` (ascending) of a symmetric tridiagonal matrix by Sturm
/// bisection.
pub fn sturm_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let bound = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i < off.len() { off[i].abs() } else { 0.0 };
            d.abs() + l + r
        })
        .fold(0.0, f64::max);
    let count_below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..diag.len() {
            let b2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn cmat(a: &Array2<f64>) -> Array2<Complex64> {
    a.mapv(|x| Complex64::new(x, 0.0))
}

/// `exp(-i H t)` by scaling and squaring of a Taylor series.
pub fn propagator(h: &Array2<f64>, t: f64) -> Array2<Complex64> {
    let d = h.nrows();
    let norm: f64 = h.iter().map(|x| x.abs()).sum::<f64>() * t.abs();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = t / 2f64.powi(squarings);
    let x = cmat(h).mapv(|z| z * Complex64::new(0.0, -scale));
    let mut term = Array2::<Complex64>::eye(d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = term.dot(&x).mapv(|z| z / k as f64);
        sum = sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// Brute-force `F`, `C` for `W = S_x / S` and initial real state `psi`,
/// computed by conjugating `W` with `exp(-i H t)`.
pub fn brute_force_otoc(h: &Array2<f64>, w: &Array2<f64>, psi: &Array1<f64>, t: f64) -> (Complex64, f64) {
    let u = propagator(h, t);
    let udag = u.t().mapv(|z| z.conj());
    let wc = cmat(w);
    let wt = udag.dot(&wc).dot(&u);
    let psic = psi.mapv(|x| Complex64::new(x, 0.0));
    let rhs = wt.dot(&wc.dot(&wt.dot(&wc.dot(&psic))));
    let f: Complex64 = psic.iter().zip(rhs.iter()).map(|(a, b)| a.conj() * b).sum();
    let comm = wt.dot(&wc) - wc.dot(&wt);
    let v = comm.dot(&psic);
    let c = v.iter().map(|z| z.norm_sqr()).sum();
    (f, c)
}

/// Trapezoidal mean of `Re F` over `t = 0, dt, ..., m dt` summed exactly
/// from the spectral expansion, one geometric series per frequency.
pub fn spectral_trapezoid_mean(energies: &[f64], w: &Array2<f64>, psi: &Array1<f64>, dt: f64, m: usize) -> f64 {
    let d = energies.len();
    let phi = w.dot(psi);
    let t_total = dt * m as f64;
    let weight = |omega: f64| -> Complex64 {
        let z = Complex64::from_polar(1.0, omega * dt);
        let zm = Complex64::from_polar(1.0, omega * dt * m as f64);
        let geometric = if (omega * dt).abs() < 1e-14 {
            Complex64::new(m as f64 + 1.0, 0.0)
        } else {
            (Complex64::new(1.0, 0.0) - zm * z) / (Complex64::new(1.0, 0.0) - z)
        };
        (geometric - (Complex64::new(1.0, 0.0) + zm) * 0.5) * (dt / t_total)
    };
    let mut total = Complex64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            let ab = psi[a] * w[[a, b]];
            if ab == 0.0 {
                continue;
            }
            for c in 0..d {
                let abc = ab * w[[b, c]];
                for dd in 0..d {
                    let coef = abc * w[[c, dd]] * phi[dd];
                    if coef != 0.0 {
                        total += weight(energies[a] - energies[b] + energies[c] - energies[dd]) * coef;
                    }
                }
            }
        }
    }
    total.re
}

/// Express `a` in the eigenbasis with columns `v`.
pub fn to_basis(v: &Array2<f64>, a: &Array2<f64>) -> Array2<f64> {
    v.t().dot(a).dot(v)
}
