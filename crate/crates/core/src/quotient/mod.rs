//! The model operator `M_B`, matrix functions `f(M_B)` and the quotient norm
//! `||f||_{H^inf / B H^inf} = ||f(M_B)||`.

mod hermite;
pub mod linalg;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::funcexpr::fourier::{fft_coefficients, next_pow2, unit_root, CircleSamples, MAX_GRID};
use crate::funcexpr::FunctionExpr;
use crate::modelspace::{basis_grid_size, mw_basis, PointSequence};
pub use hermite::{hermite_interpolant, HermiteInterpolant};
pub use linalg::{
    characteristic_polynomial, operator_norm, operator_norm_seeded, Matrix, DEFAULT_NORM_SEED,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest sequence accepted by [`model_operator`].
pub const MAX_MODEL_DIMENSION: usize = 512;

/// Matrix of `M_B` in the Malmquist–Walsh basis: `A_ij = <z e_j, e_i>`.
#[derive(Clone, Debug)]
pub struct ModelOperatorMatrix {
    pub sigma: PointSequence,
    pub entries: Matrix,
}

/// Compute `A_ij = <z e_j, e_i>` by boundary quadrature and verify that `A` is a
/// contraction whose characteristic polynomial is `P_sigma`.
pub fn model_operator(sigma: &PointSequence) -> Result<ModelOperatorMatrix> {
    let n = sigma.len();
    if n > MAX_MODEL_DIMENSION {
        return Err(Error::invalid(format!(
            "model operator limited to n <= {MAX_MODEL_DIMENSION}, got {n}"
        )));
    }
    let basis = mw_basis(sigma);
    let pairings = |m: usize| -> Matrix {
        let mut a: Matrix = Array2::zeros((n, n));
        let mut vals = Vec::with_capacity(n);
        for j in 0..m {
            let z = unit_root(j, m);
            basis.eval_all_into(z, &mut vals);
            for i in 0..n {
                let ei = vals[i].conj();
                for k in 0..n {
                    a[[i, k]] += z * vals[k] * ei;
                }
            }
        }
        a.mapv_inplace(|v| v / m as f64);
        a
    };
    let mut m = basis_grid_size(sigma);
    let mut a = pairings(m);
    loop {
        if 2 * m > MAX_GRID {
            return Err(Error::InvariantViolation {
                what: "model operator",
                detail: format!("pairings not stable at {m} nodes"),
            });
        }
        m *= 2;
        let next = pairings(m);
        let change = (&next - &a).iter().map(|v| v.norm()).fold(0.0, f64::max);
        a = next;
        if change <= 1e-14 {
            break;
        }
    }
    check_model_operator(sigma, a.view())?;
    Ok(ModelOperatorMatrix {
        sigma: sigma.clone(),
        entries: a,
    })
}

fn check_model_operator(sigma: &PointSequence, a: ArrayView2<Complex64>) -> Result<()> {
    let norm = operator_norm(a)?;
    if norm > 1.0 + 1e-10 {
        return Err(Error::InvariantViolation {
            what: "model operator",
            detail: format!("operator norm {norm} exceeds 1"),
        });
    }
    let got = characteristic_polynomial(a)?;
    let want = sigma.monic_polynomial();
    // Coefficients of P_sigma are bounded by prod (1 + |lambda|); errors scale with it.
    let scale: f64 = sigma.points().iter().map(|l| 1.0 + l.norm()).product();
    let err = got
        .iter()
        .enumerate()
        .map(|(k, &c)| (c - want.coeffs().get(k).copied().unwrap_or(ZERO)).norm())
        .fold(0.0, f64::max);
    if err > 1e-8 * scale {
        return Err(Error::InvariantViolation {
            what: "model operator",
            detail: format!("characteristic polynomial off by {err:e} (scale {scale:e})"),
        });
    }
    Ok(())
}

/// `f(M_B)` in the Malmquist–Walsh basis.
pub fn matrix_function(f: &FunctionExpr, sigma: &PointSequence) -> Result<Matrix> {
    let a = model_operator(sigma)?;
    hermite_interpolant(f, sigma)?.eval_matrix(&a.entries)
}

/// Lower-triangular Toeplitz matrix with first column `coeffs[..n]`.
pub fn lower_toeplitz(coeffs: &[Complex64], n: usize) -> Matrix {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i >= j {
            coeffs.get(i - j).copied().unwrap_or(ZERO)
        } else {
            ZERO
        }
    })
}

/// `||f||_{H^inf / B_sigma H^inf}`.
///
/// For `sigma = (lambda, ..., lambda)` the quotient is unitarily equivalent to the
/// one over `z^n` after composing with `b_lambda`, so the norm is that of the
/// lower-triangular Toeplitz matrix of the first `n` Taylor coefficients of
/// `f ∘ b_lambda`. Other sequences go through `||f(M_B)||`.
pub fn quotient_norm(f: &FunctionExpr, sigma: &PointSequence) -> Result<f64> {
    quotient_norm_seeded(f, sigma, DEFAULT_NORM_SEED)
}

/// [`quotient_norm`] with an explicit seed for the power iteration.
pub fn quotient_norm_seeded(f: &FunctionExpr, sigma: &PointSequence, seed: u64) -> Result<f64> {
    match sigma.single_point() {
        Some(lambda) => {
            let n = sigma.len();
            let g = f.compose(&FunctionExpr::blaschke_factor(lambda)?);
            let coeffs = boundary_taylor(&g, n)?;
            operator_norm_seeded(lower_toeplitz(&coeffs, n).view(), seed)
        }
        None => operator_norm_seeded(matrix_function(f, sigma)?.view(), seed),
    }
}

/// First `count` Taylor coefficients at 0 of a function holomorphic across the
/// closed disk, read off from boundary samples.
///
/// Local series at `lambda` are useless here: for the extremal functions they
/// grow like `(1 - |lambda|^2)^-k` and cancel catastrophically under composition.
fn boundary_taylor(g: &FunctionExpr, count: usize) -> Result<Vec<Complex64>> {
    let eval = |j: usize, m: usize| g.eval(unit_root(j, m));
    let m0 = next_pow2(64.max(2 * count).max(2 * g.degree_hint() + 2)).min(MAX_GRID);
    let mut samples = CircleSamples::new(m0, eval)?;
    let mut prev = fft_coefficients(samples.values(), count);
    while 2 * samples.len() <= MAX_GRID {
        samples.refine(eval)?;
        let cur = fft_coefficients(samples.values(), count);
        let scale = samples.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let change = cur.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if change <= 1e-14 * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::non_convergence(
        "Taylor coefficients of f∘b",
        format!("boundary samples not resolved with {MAX_GRID} nodes"),
    ))
}

/// `||f(M_B)||` through the model operator for any `sigma`.
pub fn quotient_norm_generic(f: &FunctionExpr, sigma: &PointSequence) -> Result<f64> {
    operator_norm(matrix_function(f, sigma)?.view())
}

/// `sum_{k<n} (1 - k/n) psi_k`, the value at `1` of `Psi * F_n` with the Fejér kernel
/// normalized to unit mean. Missing coefficients count as zero.
pub fn fejer_lower_bound(psi_coeffs: &[Complex64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("Fejér mean needs n >= 1"));
    }
    let nf = n as f64;
    let sum: Complex64 = psi_coeffs
        .iter()
        .take(n)
        .enumerate()
        .map(|(k, &c)| c * (1.0 - k as f64 / nf))
        .sum();
    Ok(sum.norm())
}

/// Upper-triangular contraction with diagonal `sigma` and random strictly upper
/// part scaled by the largest `t` in `(0, 1]` (found by bisection) keeping `||T|| <= 1`.
pub fn random_contraction(sigma: &PointSequence, seed: u64) -> Result<Matrix> {
    if !sigma.has_distinct_points() {
        return Err(Error::DegenerateSigma);
    }
    let n = sigma.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut upper: Matrix = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            upper[[i, j]] = Complex64::new(re, im);
        }
    }
    let norm_seed = rng.next_u64();
    let build = |t: f64| {
        let mut m = upper.mapv(|v| v * t);
        for (i, &l) in sigma.points().iter().enumerate() {
            m[[i, i]] = l;
        }
        m
    };
    let fits = |t: f64| -> Result<bool> { Ok(operator_norm_seeded(build(t).view(), norm_seed)? <= 1.0) };
    let t = if fits(1.0)? {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Margin for the power-iteration tolerance.
        lo * (1.0 - 1e-9)
    };
    Ok(build(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspace::blaschke_product;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn seq(points: &[f64]) -> PointSequence {
        PointSequence::new(points.iter().map(|&x| c(x)).collect()).unwrap()
    }

    /// MW basis of K_{z^n} is ((-z)^j); conjugating by diag((-1)^j) gives monomials.
    fn to_monomial(a: &Matrix) -> Matrix {
        Array2::from_shape_fn(a.dim(), |(i, j)| {
            if (i + j) % 2 == 0 {
                a[[i, j]]
            } else {
                -a[[i, j]]
            }
        })
    }

    #[test]
    fn model_operator_examples() {
        let a = model_operator(&seq(&[0.0])).unwrap();
        assert!(a.entries[[0, 0]].norm() < 1e-15);

        let a = to_monomial(&model_operator(&seq(&[0.0, 0.0])).unwrap().entries);
        let want = [[0.0, 0.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[[i, j]] - c(want[i][j])).norm() < 1e-14);
            }
        }

        let a = model_operator(&seq(&[0.5, -0.3])).unwrap().entries;
        assert!((a[[0, 0]] - c(0.5)).norm() < 1e-13);
        assert!((a[[1, 1]] - c(-0.3)).norm() < 1e-13);
        assert!(a[[0, 1]].norm() < 1e-13);
    }

    #[test]
    fn hermite_examples() {
        let p = hermite_interpolant(&FunctionExpr::poly(&[0.0, 0.0, 1.0]), &seq(&[0.0, 0.0])).unwrap();
        for x in [c(0.0), c(0.5), c(-2.0)] {
            assert!(p.eval(x).norm() < 1e-15);
        }
        let f = FunctionExpr::cauchy_kernel(c(0.5)).unwrap();
        let p = hermite_interpolant(&f, &seq(&[0.3])).unwrap();
        assert!((p.eval(c(-0.9)) - f.eval(c(0.3)).unwrap()).norm() < 1e-15);
        let p = hermite_interpolant(&f, &seq(&[0.0, 0.0, 0.0])).unwrap();
        let t = p.taylor_at(c(0.0), 2);
        for (got, want) in t.iter().zip([1.0, 0.5, 0.25]) {
            assert!((got - c(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn matrix_function_examples() {
        let s = seq(&[0.4, -0.2, 0.7]);
        let b = blaschke_product(&s).expr;
        let m = matrix_function(&b, &s).unwrap();
        assert!(m.iter().all(|v| v.norm() < 1e-8));

        let m = to_monomial(&matrix_function(&FunctionExpr::poly(&[1.0, 1.0]), &seq(&[0.0, 0.0])).unwrap());
        let want = [[1.0, 0.0], [1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[[i, j]] - c(want[i][j])).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn quotient_norm_examples() {
        let s = seq(&[0.3, -0.5]);
        let v = quotient_norm(&FunctionExpr::constant(Complex64::new(0.0, -2.5)), &s).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
        assert!(quotient_norm(&blaschke_product(&s).expr, &s).unwrap() < 1e-8);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let v = quotient_norm(&FunctionExpr::poly(&[1.0, 1.0]), &seq(&[0.0, 0.0])).unwrap();
        assert!((v - golden).abs() < 1e-12);
        let v = quotient_norm_generic(&FunctionExpr::poly(&[1.0, 1.0]), &seq(&[0.0, 0.0])).unwrap();
        assert!((v - golden).abs() < 1e-12);
    }

    #[test]
    fn fejer_examples() {
        assert!((fejer_lower_bound(&[c(1.0), c(2.0), c(1.0)], 2).unwrap() - 2.0).abs() < 1e-15);
        assert!((fejer_lower_bound(&[c(1.0)], 7).unwrap() - 1.0).abs() < 1e-15);
        let with_tail = [c(1.0), c(3.0), c(100.0), c(-50.0)];
        assert_eq!(
            fejer_lower_bound(&with_tail, 2).unwrap(),
            fejer_lower_bound(&with_tail[..2], 2).unwrap()
        );
    }

    #[test]
    fn random_contraction_examples() {
        let s = seq(&[0.5, -0.3, 0.1]);
        let t = random_contraction(&s, 7).unwrap();
        assert_eq!(t[[0, 0]], c(0.5));
        assert_eq!(t[[1, 1]], c(-0.3));
        assert!(operator_norm(t.view()).unwrap() <= 1.0 + 1e-12);
        assert_eq!(t, random_contraction(&s, 7).unwrap());
        assert!(matches!(random_contraction(&seq(&[0.5, 0.5]), 1), Err(Error::DegenerateSigma)));
    }
}
