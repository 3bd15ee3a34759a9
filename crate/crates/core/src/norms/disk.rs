//! Tensor-product quadrature on the unit disk for the normalized area measure.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcexpr::fourier::{next_pow2, unit_root, CircleSamples, MAX_GRID};

/// Gauss–Jacobi rule for `int_0^1 g(t) (1 - t)^beta dt`.
#[derive(Clone, Debug)]
pub struct RadialRule {
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Nodes and weights of the `k`-point Gauss–Jacobi rule on `[0, 1]` with weight
/// `(1 - t)^beta`. Rules are cached per `(beta, k)`.
pub fn gauss_jacobi(k: usize, beta: f64) -> Result<Arc<RadialRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<RadialRule>>>> = OnceLock::new();
    if k == 0 || !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::invalid(format!(
            "Gauss–Jacobi rule needs k >= 1 and beta > -1, got k = {k}, beta = {beta}"
        )));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (beta.to_bits(), k);
    if let Some(rule) = cache.lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(golub_welsch(k, beta)?);
    cache.lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

fn golub_welsch(k: usize, beta: f64) -> Result<RadialRule> {
    // Jacobi matrix on [-1, 1] for (1 - x)^a (1 + x)^b with a = beta, b = 0.
    let a = beta;
    let b = 0.0;
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k];
    for (i, d) in diag.iter_mut().enumerate() {
        *d = if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * i as f64 + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        };
    }
    for j in 1..k {
        let jf = j as f64;
        let s = 2.0 * jf + a + b;
        off[j - 1] = 2.0 / s
            * (jf * (jf + a) * (jf + b) * (jf + a + b) / ((s + 1.0) * (s - 1.0))).sqrt();
    }
    let first = tridiagonal_ql(&mut diag, &mut off)?;
    let mu0 = 2f64.powf(a + 1.0) / (a + 1.0);
    let to_unit = 2f64.powf(a + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&first)
        .map(|(&x, &v)| (0.5 * (x + 1.0), mu0 * v * v / to_unit))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(RadialRule {
        beta,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Implicit QL on a symmetric tridiagonal matrix. On return `d` holds the
/// eigenvalues; the result holds the first component of each normalized eigenvector.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::non_convergence(
                    "Gauss–Jacobi eigenvalues",
                    format!("QL iteration stalled at index {l} of {n}"),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(z)
}

/// Result of an adaptive integral: value and the change between the last two levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error_est: f64,
}

/// Normalized mean of `g` over the circle of radius `rho`, together with the mean
/// of `|g|`. The angular grid doubles from `m0` until the mean moves by at most
/// `tol` times the mean of `|g|`.
pub(crate) fn ring_mean<G>(g: &G, rho: f64, m0: usize, tol: f64) -> Result<(Complex64, f64)>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let eval = |j: usize, m: usize| g(unit_root(j, m) * rho);
    let mut samples = CircleSamples::new(next_pow2(m0), eval)?;
    let means = |s: &CircleSamples<Complex64>| {
        let m = s.len() as f64;
        let sum: Complex64 = s.values().iter().sum();
        let abs: f64 = s.values().iter().map(|v| v.norm()).sum();
        (sum / m, abs / m)
    };
    let mut prev = means(&samples).0;
    loop {
        if 2 * samples.len() > MAX_GRID {
            return Err(Error::non_convergence(
                "disk quadrature",
                format!("ring at radius {rho} not resolved with {} nodes", samples.len()),
            ));
        }
        samples.refine(eval)?;
        let (cur, abs) = means(&samples);
        if (cur - prev).norm() <= tol * abs {
            return Ok((cur, abs));
        }
        prev = cur;
    }
}

/// `int_D g(z) (1 - |z|^2)^beta dA(z)` with `dA` the normalized area measure.
///
/// Radial Gauss–Jacobi in `t = |z|^2` with `k0` nodes, doubled until the total
/// changes by at most `tol` relative to `int |g|`; each ring is resolved
/// adaptively from `m0` angular nodes.
pub fn disk_integral<G>(g: G, beta: f64, k0: usize, m0: usize, tol: f64) -> Result<Integral>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let level = |k: usize| -> Result<(Complex64, f64)> {
        let rule = gauss_jacobi(k, beta)?;
        let mut total = Complex64::new(0.0, 0.0);
        let mut total_abs = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (mean, abs) = ring_mean(&g, t.sqrt(), m0, 0.1 * tol)?;
            total += mean * w;
            total_abs += abs * w;
        }
        Ok((total, total_abs))
    };
    let mut k = k0.max(2);
    let mut prev = level(k)?.0;
    loop {
        if k > 1 << 14 {
            return Err(Error::non_convergence(
                "disk quadrature",
                format!("radial rule not resolved with {k} nodes"),
            ));
        }
        k *= 2;
        let (cur, abs) = level(k)?;
        let change = (cur - prev).norm();
        if change <= tol * abs {
            return Ok(Integral {
                value: cur,
                error_est: change,
            });
        }
        prev = cur;
    }
}
