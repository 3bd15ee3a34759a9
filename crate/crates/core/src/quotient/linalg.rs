//! Small dense complex linear algebra: spectral norm and characteristic polynomial.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type Matrix = Array2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Seed used by [`operator_norm`].
pub const DEFAULT_NORM_SEED: u64 = 0x0b1a_5c4e;

const MAX_ITERATIONS: usize = 100_000;
const RESTARTS: u64 = 3;

fn vec_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Array1<Complex64> {
    let mut v: Array1<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    let nv = vec_norm(&v);
    v.mapv_inplace(|x| x / nv);
    v
}

/// Largest singular value by power iteration on `A^* A`; see [`operator_norm_seeded`].
pub fn operator_norm(a: ArrayView2<Complex64>) -> Result<f64> {
    operator_norm_seeded(a, DEFAULT_NORM_SEED)
}

/// Largest singular value by power iteration on `A^* A` from three seeded random
/// starts, keeping the largest Rayleigh quotient. Each run stops once the quotient
/// changes by at most `1e-13` relative on three consecutive steps.
pub fn operator_norm_seeded(a: ArrayView2<Complex64>, seed: u64) -> Result<f64> {
    let (rows, cols) = a.dim();
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    if rows == 0 || cols == 0 {
        return Ok(0.0);
    }
    let ah = a.t().mapv(|x| x.conj());
    let mut best = 0.0_f64;
    for restart in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart));
        let mut v = random_unit(cols, &mut rng);
        let mut prev = f64::NAN;
        let mut calm = 0;
        let mut converged = false;
        let mut last_change = f64::INFINITY;
        for _ in 0..MAX_ITERATIONS {
            let w = a.dot(&v);
            let sigma2 = w.iter().map(|x| x.norm_sqr()).sum::<f64>();
            if sigma2 == 0.0 {
                converged = true;
                prev = 0.0;
                break;
            }
            let u = ah.dot(&w);
            let nu = vec_norm(&u);
            v = u.mapv(|x| x / nu);
            last_change = ((sigma2 - prev) / sigma2).abs();
            prev = sigma2;
            if last_change <= 1e-13 {
                calm += 1;
                if calm >= 3 {
                    converged = true;
                    break;
                }
            } else {
                calm = 0;
            }
        }
        if !converged && !(last_change <= 1e-10) {
            return Err(Error::non_convergence(
                "operator norm",
                format!("power iteration still moving by {last_change:e} after {MAX_ITERATIONS} steps"),
            ));
        }
        best = best.max(prev.sqrt());
    }
    Ok(best)
}

/// Coefficients (ascending, monic) of `det(x I - A)`, via Householder reduction
/// to upper Hessenberg form followed by the Hessenberg determinant recurrence.
pub fn characteristic_polynomial(a: ArrayView2<Complex64>) -> Result<Vec<Complex64>> {
    let (n, m) = a.dim();
    if n != m {
        return Err(Error::invalid("characteristic polynomial needs a square matrix"));
    }
    let h = hessenberg(a.to_owned());
    // p[k] = det(x I - H[..k, ..k]) as ascending coefficients.
    let mut p: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
    p.push(vec![ONE]);
    for k in 1..=n {
        let kk = k - 1;
        // (x - h_kk) p_{k-1}
        let prev = &p[k - 1];
        let mut cur = vec![ZERO; k + 1];
        for (i, &c) in prev.iter().enumerate() {
            cur[i + 1] += c;
            cur[i] -= h[[kk, kk]] * c;
        }
        // - sum_{i<k} h_{i,kk} (prod_{j=i+1}^{kk} h_{j,j-1}) p_i
        let mut sub = ONE;
        for i in (0..kk).rev() {
            sub *= h[[i + 1, i]];
            let coef = h[[i, kk]] * sub;
            if coef == ZERO {
                continue;
            }
            for (t, &c) in p[i].iter().enumerate() {
                cur[t] -= coef * c;
            }
        }
        p.push(cur);
    }
    Ok(p.pop().unwrap())
}

fn hessenberg(mut h: Matrix) -> Matrix {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[[i, k]]).collect();
        let alpha_norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * alpha_norm;
        let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vn;
        }
        // H <- (I - 2 v v^*) H (I - 2 v v^*) on the trailing block.
        for j in 0..n {
            let mut s = ZERO;
            for (t, &vt) in v.iter().enumerate() {
                s += vt.conj() * h[[k + 1 + t, j]];
            }
            for (t, &vt) in v.iter().enumerate() {
                h[[k + 1 + t, j]] -= 2.0 * vt * s;
            }
        }
        for i in 0..n {
            let mut s = ZERO;
            for (t, &vt) in v.iter().enumerate() {
                s += h[[i, k + 1 + t]] * vt;
            }
            for (t, &vt) in v.iter().enumerate() {
                h[[i, k + 1 + t]] -= 2.0 * s * vt.conj();
            }
        }
        for i in k + 2..n {
            h[[i, k]] = ZERO;
        }
    }
    h
}
