#![allow(dead_code)]

use blaschke_lab::funcexpr::{FunctionExpr, Polynomial};
use blaschke_lab::modelspace::PointSequence;
use blaschke_lab::quotient::Matrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn normal_c(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Uniform point of the disk of radius `r`.
pub fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    let rho = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn circle_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_sigma(rng: &mut ChaCha8Rng, n: usize, r: f64) -> PointSequence {
    PointSequence::new((0..n).map(|_| disk_point(rng, r)).collect()).unwrap()
}

pub fn random_coeffs(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| normal_c(rng)).collect()
}

pub fn unit_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let mut v = random_coeffs(rng, len);
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

pub fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<Complex64> {
    let d = rng.random_range(0..=max_degree);
    random_coeffs(rng, d + 1)
}

pub fn poly_expr(coeffs: &[Complex64]) -> FunctionExpr {
    FunctionExpr::polynomial(Polynomial::new(coeffs.to_vec()))
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Random expression analytic on a neighbourhood of the closed disk. Inner
/// functions of compositions are Blaschke products, so they map the disk into itself.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> FunctionExpr {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        return match rng.random_range(0..4) {
            0 => poly_expr(&random_poly(rng, 5)),
            1 => FunctionExpr::blaschke_factor(disk_point(rng, 0.8)).unwrap(),
            2 => FunctionExpr::cauchy_kernel(disk_point(rng, 0.8)).unwrap(),
            _ => {
                let root = disk_point(rng, 1.0) / 0.8;
                let root = if root.norm() < 1.25 { root / root.norm() * 1.25 } else { root };
                let den = Polynomial::new(vec![Complex64::new(1.0, 0.0), -root.inv()]);
                FunctionExpr::rational(Polynomial::new(random_poly(rng, 3)), den).unwrap()
            }
        };
    }
    match rng.random_range(0..5) {
        0 => FunctionExpr::sum(vec![random_expr(rng, depth - 1), random_expr(rng, depth - 1)]),
        1 => FunctionExpr::product(vec![random_expr(rng, depth - 1), random_expr(rng, depth - 1)]),
        2 => random_expr(rng, depth - 1).powi(rng.random_range(0..4)),
        3 => {
            let inner = FunctionExpr::product(vec![
                FunctionExpr::blaschke_factor(disk_point(rng, 0.8)).unwrap(),
                FunctionExpr::blaschke_factor(disk_point(rng, 0.8)).unwrap(),
            ]);
            random_expr(rng, depth - 1).compose(&inner)
        }
        _ => random_expr(rng, depth - 1).scale(normal_c(rng)),
    }
}

/// `f(T)` for upper-triangular `T` with distinct diagonal entries (Parlett recurrence).
pub fn parlett(t: &Matrix, f: impl Fn(Complex64) -> Complex64) -> Matrix {
    let n = t.nrows();
    let mut out = Matrix::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = f(t[[i, i]]);
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let mut s = t[[i, j]] * (out[[j, j]] - out[[i, i]]);
            for k in i + 1..j {
                s += out[[i, k]] * t[[k, j]] - t[[i, k]] * out[[k, j]];
            }
            out[[i, j]] = s / (t[[j, j]] - t[[i, i]]);
        }
    }
    out
}

/// Conjugate a matrix in the basis `((-z)^j)` into the monomial basis.
pub fn to_monomial(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for ((i, j), v) in out.indexed_iter_mut() {
        if (i + j) % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `(b^p)` polynomial coefficients by repeated convolution.
pub fn poly_pow(base: &[Complex64], p: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..p {
        let mut next = vec![ZERO; out.len() + base.len() - 1];
        for (i, a) in out.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

/// `p(q(z))` coefficients, Horner over polynomials.
pub fn poly_compose(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut acc = vec![ZERO];
    for &c in p.iter().rev() {
        let mut next = vec![ZERO; acc.len() + q.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        next[0] += c;
        acc = next;
    }
    acc
}

/// Constants frozen from one calibration run over the default grid, with
/// roughly a factor two of slack on the observed extremes.
pub mod frozen {
    /// `max ||f^(l)||_inf / ((n / (1 - r))^l ||f||_inf)`; observed 1.233 (l = 1), 1.924 (l = 2).
    pub const BERNSTEIN: [(usize, f64); 2] = [(1, 2.5), (2, 4.0)];
    /// `||phi_n||_{A^p(beta)} (1 - r)^(N - s) / n^(2N - s)`; observed at most 0.955.
    pub const PHI_BERGMAN_SCALE: f64 = 2.0;
    /// Window for `fejer (1 - r)^N / n^(2N)` by `N`; observed
    /// [0.252, 0.326], [0.0192, 0.0345], [0.00070, 0.00143].
    pub const FEJER_WINDOW: [(u32, f64, f64); 3] =
        [(1, 0.12, 0.66), (2, 0.009, 0.07), (3, 0.00035, 0.0029)];
    /// `interp_lower / (n / (1 - r))^s`; observed maxima 0.545 (H^1), 0.486 (H^2),
    /// 0.410 (H^4), 0.0913 (A^2(0)), 0.0087 (A^2(1)), 0.104 (A^1(0)).
    pub const KAPPA_HARDY: f64 = 1.1;
    pub const KAPPA_BERGMAN: [((f64, f64), f64); 3] =
        [((2.0, 0.0), 0.2), ((2.0, 1.0), 0.02), ((1.0, 0.0), 0.21)];
    /// Window `[1/C, C]` for the scaled standard integral; observed [0.0461, 0.277].
    pub const BAS: f64 = 40.0;
}
