//! Extremal test functions and the sweeps that estimate growth exponents.
//!
//! The one-point sequence `sigma = (-r, ..., -r)` and the functions
//! `Q_n = (1 - r^2) / (1 + r z)^2 * D_n(b_{-r}(z))^2` are the witnesses behind every
//! lower bound here. After the substitution `z = b_{-r}(w)` they become
//! polynomials with positive coefficients, which is what makes both the quotient
//! norm and the sup norm computable in closed form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::beta::ln_beta;

use crate::error::{Error, Result};
use crate::funcexpr::FunctionExpr;
use crate::modelspace::{mw_basis, reproducing_kernel, PointSequence};
use crate::norms::{
    bergman_norm_with, hardy_norm_with, sup_norm, sup_on_circle, QuadOptions,
};
use crate::quotient::{fejer_lower_bound, quotient_norm_seeded, DEFAULT_NORM_SEED};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Smallest x-range factor accepted by [`exponent_fit`].
pub const MIN_RANGE_FACTOR: f64 = 32.0;

/// `D_n(z) = 1 + z + ... + z^(n-1)`.
pub fn dirichlet_kernel(n: usize) -> Result<FunctionExpr> {
    if n == 0 {
        return Err(Error::invalid("Dirichlet kernel needs n >= 1"));
    }
    Ok(FunctionExpr::poly(&vec![1.0; n]))
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::invalid(format!("radius must lie in [0, 1), got {r}")));
    }
    Ok(())
}

/// `phi = Q_n^N` together with the Taylor coefficients of `Psi = phi ∘ b_{-r}`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub n: usize,
    pub r: f64,
    pub big_n: u32,
    /// `Q_n`.
    pub q: FunctionExpr,
    /// `phi = Q_n^N`.
    pub expr: FunctionExpr,
    /// Coefficients of the polynomial `Psi`, all nonnegative.
    pub psi_coeffs: Vec<f64>,
}

impl TestFunction {
    /// `Psi(1) = n^(2N) ((1 + r) / (1 - r))^N`, which is also `||phi||_inf`.
    pub fn psi_at_one(&self) -> f64 {
        self.psi_coeffs.iter().sum()
    }

    pub fn psi_complex(&self) -> Vec<Complex64> {
        self.psi_coeffs.iter().map(|&c| real(c)).collect()
    }

    pub fn sigma(&self) -> PointSequence {
        PointSequence::one_point(self.n, real(-self.r)).expect("r < 1")
    }

    /// `x = n / (1 - r)`.
    pub fn x(&self) -> f64 {
        self.n as f64 / (1.0 - self.r)
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn test_function(n: usize, r: f64, big_n: u32) -> Result<TestFunction> {
    if n == 0 || big_n == 0 {
        return Err(Error::invalid(format!("test function needs n, N >= 1, got n = {n}, N = {big_n}")));
    }
    check_radius(r)?;
    let b = FunctionExpr::blaschke_factor(real(-r))?;
    let dn = dirichlet_kernel(n)?.compose(&b);
    let q = FunctionExpr::product(vec![
        FunctionExpr::cauchy_kernel(real(-r))?.powi(2),
        dn.powi(2),
    ])
    .scale(real(1.0 - r * r));
    let expr = if big_n == 1 { q.clone() } else { q.powi(big_n) };

    // Psi = ((1 + (1 + r)(z + ... + z^(n-1)) + r z^n)^2 / (1 - r^2))^N, expanded
    // by exact convolution so that every coefficient stays nonnegative.
    let mut base = vec![1.0 + r; n + 1];
    base[0] = 1.0;
    base[n] = r;
    let scale = 1.0 / (1.0 - r * r);
    let base_sq: Vec<f64> = poly_mul(&base, &base).into_iter().map(|c| c * scale).collect();
    let mut psi = vec![1.0];
    for _ in 0..big_n {
        psi = poly_mul(&psi, &base_sq);
    }
    let tf = TestFunction {
        n,
        r,
        big_n,
        q,
        expr,
        psi_coeffs: psi,
    };
    tf.cross_validate()?;
    Ok(tf)
}

impl TestFunction {
    fn cross_validate(&self) -> Result<()> {
        let b = FunctionExpr::blaschke_factor(real(-self.r))?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e57_f00d ^ self.n as u64);
        let scale = self.psi_at_one();
        for _ in 0..16 {
            let w = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let direct = self.expr.eval(b.eval(w)?)?;
            let poly = self.psi_coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c);
            if (direct - poly).norm() > 1e-8 * scale {
                return Err(Error::InvariantViolation {
                    what: "test function",
                    detail: format!("phi(b(w)) = {direct} but Psi(w) = {poly} at w = {w}"),
                });
            }
        }
        Ok(())
    }
}

/// `N = l + 2` with `l = max(0, ceil(beta))`, i.e. `beta` in `(l - 1, l]`.
pub fn choose_n(beta: f64) -> Result<u32> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be > -1, got {beta}")));
    }
    Ok(beta.ceil().max(0.0) as u32 + 2)
}

/// Knobs shared by every sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Relative quadrature tolerance; `None` keeps each norm's default.
    pub rel_tol: Option<f64>,
    /// Seed of the power iteration behind quotient norms.
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            rel_tol: None,
            seed: DEFAULT_NORM_SEED,
        }
    }
}

impl SweepOptions {
    fn quad(&self, center: Complex64) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol,
            ..QuadOptions::centered(center)
        }
    }
}

/// Target space of an interpolation or embedding constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum Space {
    /// `H^p`.
    Hardy { p: f64 },
    /// `A^p(beta)`.
    Bergman { p: f64, beta: f64 },
}

impl Space {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Space::Hardy { p } if p >= 1.0 && p.is_finite() => Ok(()),
            Space::Bergman { p, beta } if p >= 1.0 && p.is_finite() && beta > -1.0 && beta.is_finite() => {
                Ok(())
            }
            other => Err(Error::invalid(format!("unsupported space parameters {other:?}"))),
        }
    }

    /// Power `N` of the test function used for this space.
    pub fn power(&self) -> Result<u32> {
        match *self {
            Space::Hardy { .. } => Ok(1),
            Space::Bergman { beta, .. } => choose_n(beta),
        }
    }

    /// Exponent `s` in `c(sigma_{n,r}, X, H^inf) ≍ (n / (1 - r))^s`.
    pub fn interpolation_exponent(&self) -> f64 {
        match *self {
            Space::Hardy { p } => 1.0 / p,
            Space::Bergman { p, beta } => (2.0 + beta) / p,
        }
    }

    /// `||f||_X`, integrating in the variable `w = b_c(z)`.
    pub fn norm(&self, f: &FunctionExpr, center: Complex64) -> Result<f64> {
        self.norm_with(f, &QuadOptions::centered(center))
    }

    pub fn norm_with(&self, f: &FunctionExpr, opts: &QuadOptions) -> Result<f64> {
        Ok(match *self {
            Space::Hardy { p } => hardy_norm_with(f, p, opts)?.value,
            Space::Bergman { p, beta } => bergman_norm_with(f, p, beta, opts)?.value,
        })
    }
}

/// One grid point of the interpolation lower bound. Ratios are normalized by `||phi||_X`.
#[derive(Clone, Debug, Serialize)]
pub struct InterpLower {
    pub n: usize,
    pub r: f64,
    pub x: f64,
    /// `||phi||_{H^inf / b_{-r}^n H^inf} / ||phi||_X`.
    pub lower: f64,
    /// Fejér lower bound for the numerator, divided by `||phi||_X`.
    pub fejer: f64,
    /// `||phi||_inf / ||phi||_X`.
    pub supnorm: f64,
    pub quotient: f64,
    pub fejer_raw: f64,
    pub sup_raw: f64,
    pub x_norm: f64,
}

pub fn interp_lower(n: usize, r: f64, space: &Space) -> Result<InterpLower> {
    interp_lower_with(n, r, space, &SweepOptions::default())
}

pub fn interp_lower_with(n: usize, r: f64, space: &Space, opts: &SweepOptions) -> Result<InterpLower> {
    space.validate()?;
    let tf = test_function(n, r, space.power()?)?;
    let quotient = quotient_norm_seeded(&tf.expr, &tf.sigma(), opts.seed)?;
    let fejer_raw = fejer_lower_bound(&tf.psi_complex(), n)?;
    let sup_raw = sup_norm(&tf.expr, tf.x())?.value;
    let x_norm = space.norm_with(&tf.expr, &opts.quad(real(-r)))?;
    Ok(InterpLower {
        n,
        r,
        x: tf.x(),
        lower: quotient / x_norm,
        fejer: fejer_raw / x_norm,
        supnorm: sup_raw / x_norm,
        quotient,
        fejer_raw,
        sup_raw,
        x_norm,
    })
}

/// One grid point of the embedding lower bound `||phi_m||_inf / ||phi_m||_{A^p(beta)}`.
#[derive(Clone, Debug, Serialize)]
pub struct EmbedLower {
    pub n: usize,
    pub r: f64,
    pub x: f64,
    pub m: usize,
    pub big_n: u32,
    pub value: f64,
    pub sup: f64,
    pub bergman: f64,
}

pub fn embed_lower(n: usize, r: f64, p: f64, beta: f64) -> Result<EmbedLower> {
    embed_lower_with(n, r, p, beta, &SweepOptions::default())
}

pub fn embed_lower_with(n: usize, r: f64, p: f64, beta: f64, opts: &SweepOptions) -> Result<EmbedLower> {
    let space = Space::Bergman { p, beta };
    space.validate()?;
    let big_n = choose_n(beta)?;
    let two_n = 2 * big_n as usize;
    if n <= two_n {
        return Err(Error::NTooSmall { n, two_n });
    }
    let m = n / two_n;
    let tf = test_function(m, r, big_n)?;
    let sup = sup_norm(&tf.expr, tf.x())?.value;
    let bergman = space.norm_with(&tf.expr, &opts.quad(real(-r)))?;
    Ok(EmbedLower {
        n,
        r,
        x: n as f64 / (1.0 - r),
        m,
        big_n,
        value: sup / bergman,
        sup,
        bergman,
    })
}

/// Grid of `(n, r)` pairs, visited n-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub n_values: Vec<usize>,
    pub r_values: Vec<f64>,
}

impl SweepGrid {
    pub fn new(n_values: Vec<usize>, r_values: Vec<f64>) -> Result<Self> {
        if n_values.is_empty() || r_values.is_empty() {
            return Err(Error::invalid("sweep grid needs at least one n and one r"));
        }
        if n_values.contains(&0) {
            return Err(Error::invalid("grid n values must be >= 1"));
        }
        for &r in &r_values {
            check_radius(r)?;
        }
        Ok(SweepGrid { n_values, r_values })
    }

    /// `n in {8, 16, 32, 64, 128}`, `r in {0.5, 0.75, 0.9}`.
    pub fn default_grid() -> Self {
        SweepGrid {
            n_values: vec![8, 16, 32, 64, 128],
            r_values: vec![0.5, 0.75, 0.9],
        }
    }

    pub fn points(&self) -> Vec<(usize, f64)> {
        self.n_values
            .iter()
            .flat_map(|&n| self.r_values.iter().map(move |&r| (n, r)))
            .collect()
    }

    /// `max x / min x` over the grid.
    pub fn range_factor(&self) -> f64 {
        let xs: Vec<f64> = self.points().iter().map(|&(n, r)| n as f64 / (1.0 - r)).collect();
        let max = xs.iter().cloned().fold(f64::MIN, f64::max);
        let min = xs.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Kernel quantity measured by [`kernel_norm_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum KernelTarget {
    /// `||k||_{H^q}`, `q` in `(1, inf]`.
    Hq { q: f64 },
    /// `||k^(l)||_{A^q(gamma)}`.
    DerivativeAq { l: usize, q: f64, gamma: f64 },
    /// `||k^(l)||_{B_alpha} = sup |k^(l+1)(z)| (1 - |z|)^alpha`.
    Bloch { l: usize, alpha: f64 },
}

impl KernelTarget {
    /// Exponent `s` in the bound `≲ (n / (1 - r))^s`.
    pub fn exponent(&self) -> f64 {
        match *self {
            KernelTarget::Hq { q } => 1.0 - 1.0 / q,
            KernelTarget::DerivativeAq { l, q, gamma } => l as f64 + 1.0 - (gamma + 2.0) / q,
            KernelTarget::Bloch { l, alpha } => l as f64 + 2.0 - alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            KernelTarget::Hq { q } => q > 1.0,
            KernelTarget::DerivativeAq { l, q, gamma } => {
                l >= 1 && q > 1.0 && q.is_finite() && gamma > -1.0 && gamma <= q
            }
            KernelTarget::Bloch { alpha, .. } => (0.0..=1.0).contains(&alpha),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("kernel target parameters out of range: {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelRow {
    pub n: usize,
    pub r: f64,
    pub x: f64,
    pub value: f64,
}

/// Point of the circle where the kernels of `sigma_{n,-r}` peak.
pub const KERNEL_SCAN_ZETA: Complex64 = Complex64::new(-1.0, 0.0);

/// Norm of the kernel `k_zeta^B` (or a derivative) of `B = b_{-r}^n` at `zeta = -1`.
pub fn kernel_norm(n: usize, r: f64, target: &KernelTarget) -> Result<f64> {
    kernel_norm_with(n, r, target, &SweepOptions::default())
}

pub fn kernel_norm_with(n: usize, r: f64, target: &KernelTarget, sweep: &SweepOptions) -> Result<f64> {
    target.validate()?;
    check_radius(r)?;
    let sigma = PointSequence::one_point(n, real(-r))?;
    let k = reproducing_kernel(&sigma, KERNEL_SCAN_ZETA)?.expr;
    let x = n as f64 / (1.0 - r);
    let opts = sweep.quad(real(-r));
    Ok(match *target {
        KernelTarget::Hq { q } if q.is_infinite() => sup_norm(&k, x)?.value,
        KernelTarget::Hq { q } => hardy_norm_with(&k, q, &opts)?.value,
        KernelTarget::DerivativeAq { l, q, gamma } => {
            bergman_norm_with(&k.derivative(l), q, gamma, &opts)?.value
        }
        KernelTarget::Bloch { l, alpha } => bloch_seminorm_scaled(&k.derivative(l + 1), alpha, x)?,
    })
}

/// `sup |g(z)| (1 - |z|)^alpha` over circles of radius `1 - 2^-j`, `g` already differentiated.
fn bloch_seminorm_scaled(g: &FunctionExpr, alpha: f64, scale_hint: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(sup_norm(g, scale_hint)?.value);
    }
    let mut best = g.eval(ZERO)?.norm();
    let mut stale = 0;
    for j in 1..=52 {
        let h = 0.5f64.powi(j);
        let ring = sup_on_circle(|z| g.eval(z), scale_hint, 1.0 - h)?.value * h.powf(alpha);
        if ring > best * (1.0 + 1e-8) {
            best = ring;
            stale = 0;
        } else {
            stale += 1;
            if stale >= 3 {
                break;
            }
        }
    }
    Ok(best)
}

/// Kernel norms over a grid, evaluated in parallel and returned in grid order.
pub fn kernel_norm_scan(grid: &SweepGrid, target: &KernelTarget) -> Result<Vec<KernelRow>> {
    kernel_norm_scan_with(grid, target, &SweepOptions::default())
}

pub fn kernel_norm_scan_with(
    grid: &SweepGrid,
    target: &KernelTarget,
    opts: &SweepOptions,
) -> Result<Vec<KernelRow>> {
    target.validate()?;
    grid.points()
        .into_par_iter()
        .map(|(n, r)| {
            Ok(KernelRow {
                n,
                r,
                x: n as f64 / (1.0 - r),
                value: kernel_norm_with(n, r, target, opts)?,
            })
        })
        .collect()
}

/// [`interp_lower_with`] at every grid point, in grid order.
pub fn interp_sweep(grid: &SweepGrid, space: &Space, opts: &SweepOptions) -> Result<Vec<InterpLower>> {
    space.validate()?;
    grid.points()
        .into_par_iter()
        .map(|(n, r)| interp_lower_with(n, r, space, opts))
        .collect()
}

/// [`embed_lower_with`] at every grid point, in grid order.
pub fn embed_sweep(grid: &SweepGrid, p: f64, beta: f64, opts: &SweepOptions) -> Result<Vec<EmbedLower>> {
    Space::Bergman { p, beta }.validate()?;
    let two_n = 2 * choose_n(beta)? as usize;
    if let Some(&n) = grid.n_values.iter().find(|&&n| n <= two_n) {
        return Err(Error::NTooSmall { n, two_n });
    }
    grid.points()
        .into_par_iter()
        .map(|(n, r)| embed_lower_with(n, r, p, beta, opts))
        .collect()
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 2 {
        return Err(Error::invalid("exponent fit needs at least two points"));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid(format!("exponent fit needs positive finite data, got ({x}, {y})")));
    }
    let max = points.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    let min = points.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let factor = max / min;
    if factor < MIN_RANGE_FACTOR {
        return Err(Error::DegenerateDesign {
            factor,
            required: MIN_RANGE_FACTOR,
        });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(ExponentFit {
        slope,
        intercept,
        max_residual,
    })
}

/// `sup { |f(t)| : ||f|| <= 1 }` over polynomials, i.e. the norm of the
/// reproducing kernel at `t`, summed from monomial norms until the terms are negligible.
pub fn eval_functional_proxy(space: &Space, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::invalid(format!("t must lie in [0, 1), got {t}")));
    }
    let ln_norm_sq: Box<dyn Fn(usize) -> f64> = match *space {
        Space::Hardy { p } if p == 2.0 => Box::new(|_| 0.0),
        Space::Bergman { p, beta } if p == 2.0 && beta > -1.0 => {
            Box::new(move |m| ln_beta(m as f64 + 1.0, beta + 1.0))
        }
        other => return Err(Error::UnsupportedSpace(format!("{other:?}"))),
    };
    if t == 0.0 {
        return Ok((-ln_norm_sq(0)).exp().sqrt());
    }
    let lt = 2.0 * t.ln();
    let mut sum = 0.0;
    for m in 0..10_000_000usize {
        let term = (m as f64 * lt - ln_norm_sq(m)).exp();
        sum += term;
        if m > 8 && term < 1e-17 * sum {
            return Ok(sum.sqrt());
        }
    }
    Err(Error::non_convergence("evaluation functional", format!("series at t = {t} too slow")))
}

/// `||f^(l)||_inf / ((n / (1 - r))^l ||f||_inf)` for one function of `K_B`.
pub fn bernstein_ratio_for(f: &FunctionExpr, sigma: &PointSequence, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("Bernstein ratio needs l >= 1"));
    }
    let x = sigma.len() as f64 / (1.0 - sigma.r());
    let sup_f = sup_norm(f, x)?.value;
    let sup_d = sup_norm(&f.derivative(l), x)?.value;
    if sup_f == 0.0 {
        return Ok(0.0);
    }
    Ok(sup_d / (x.powi(l as i32) * sup_f))
}

/// Largest Bernstein ratio over `samples` random elements of `K_B` whose
/// Malmquist–Walsh coefficient vectors are unit vectors in `C^n`.
pub fn bernstein_ratio(sigma: &PointSequence, l: usize, samples: usize, seed: u64) -> Result<f64> {
    let basis = mw_basis(sigma);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    for _ in 0..samples {
        let mut c: Vec<Complex64> = (0..basis.len())
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        c.iter_mut().for_each(|v| *v /= norm);
        let f = basis.combination(&c)?;
        best = best.max(bernstein_ratio_for(&f, sigma, l)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_kernel(1).unwrap().eval(real(0.7)).unwrap(), real(1.0));
        assert_eq!(dirichlet_kernel(3).unwrap().eval(real(1.0)).unwrap(), real(3.0));
        assert_eq!(dirichlet_kernel(2).unwrap().eval(real(-1.0)).unwrap(), real(0.0));
        assert!(dirichlet_kernel(0).is_err());
    }

    #[test]
    fn psi_at_r_zero() {
        let tf = test_function(2, 0.0, 1).unwrap();
        assert_eq!(tf.psi_coeffs[..3], [1.0, 2.0, 1.0]);
        assert!(tf.psi_coeffs[3..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn psi_is_positive_and_peaks_at_one() {
        for &(n, r, big_n) in &[(4, 0.5, 1), (7, 0.9, 3), (16, 0.75, 2)] {
            let tf = test_function(n, r, big_n).unwrap();
            assert!(tf.psi_coeffs.iter().all(|&c| c >= 0.0));
            let want = (n as f64).powi(2 * big_n as i32) * ((1.0 + r) / (1.0 - r)).powi(big_n as i32);
            assert!((tf.psi_at_one() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn test_function_norms() {
        let tf = test_function(4, 0.5, 1).unwrap();
        assert!((sup_norm(&tf.expr, tf.x()).unwrap().value - 48.0).abs() < 1e-9);
        let h1 = Space::Hardy { p: 1.0 }.norm(&tf.q, real(-0.5)).unwrap();
        assert!((h1 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn choose_n_examples() {
        assert_eq!(choose_n(0.0).unwrap(), 2);
        assert_eq!(choose_n(0.5).unwrap(), 3);
        assert_eq!(choose_n(2.0).unwrap(), 4);
        assert_eq!(choose_n(-0.5).unwrap(), 2);
        assert!(choose_n(-1.0).is_err());
    }

    #[test]
    fn interp_lower_trivial_point() {
        let v = interp_lower(1, 0.0, &Space::Hardy { p: 2.0 }).unwrap();
        assert!((v.lower - 1.0).abs() < 1e-12);
        let v = interp_lower(4, 0.5, &Space::Hardy { p: 1.0 }).unwrap();
        assert!((v.x_norm - 4.0).abs() < 1e-9);
        assert!(v.fejer_raw <= v.quotient && v.quotient <= v.sup_raw * (1.0 + 1e-12));
    }

    #[test]
    fn embed_lower_needs_large_n() {
        assert!(matches!(embed_lower(4, 0.5, 2.0, 0.0), Err(Error::NTooSmall { n: 4, two_n: 4 })));
        let e = embed_lower(16, 0.5, 2.0, 0.0).unwrap();
        assert_eq!(e.m, 4);
        let want = 4f64.powi(4) * 3f64.powi(2);
        assert!((e.sup - want).abs() < 1e-8 * want);
    }

    #[test]
    fn kernel_h2_norm_closed_form() {
        // ||k_{-1}||^2 = sum_j (1 - r^2) / |1 + r|^2 = n (1 - r) / (1 + r) ... times |B_{j-1}|^2 = 1,
        // with zeta aligned to the zeros the terms are (1 - r^2) / (1 - r)^2.
        for &(n, r) in &[(1usize, 0.5), (8, 0.75), (32, 0.9)] {
            let v = kernel_norm(n, r, &KernelTarget::Hq { q: 2.0 }).unwrap();
            let want = (n as f64 * (1.0 + r) / (1.0 - r)).sqrt();
            assert!((v - want).abs() < 1e-9 * want, "{n} {r}: {v} vs {want}");
        }
        let inf = kernel_norm(8, 0.5, &KernelTarget::Hq { q: f64::INFINITY }).unwrap();
        assert!((inf - 8.0 * 3.0).abs() < 1e-9 * 24.0);
    }

    #[test]
    fn fit_examples() {
        let xs = [1.0f64, 4.0, 16.0, 64.0];
        let f = exponent_fit(&xs.iter().map(|&x| (x, x.sqrt())).collect::<Vec<_>>()).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-14 && f.max_residual < 1e-14);
        let f = exponent_fit(&xs.iter().map(|&x| (x, 7.0 * x * x)).collect::<Vec<_>>()).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-13 && (f.intercept - 7f64.ln()).abs() < 1e-12);
        assert!(matches!(
            exponent_fit(&[(1.0, 1.0), (8.0, 2.0)]),
            Err(Error::DegenerateDesign { .. })
        ));
    }

    #[test]
    fn eval_functional_examples() {
        let h2 = Space::Hardy { p: 2.0 };
        assert!((eval_functional_proxy(&h2, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((eval_functional_proxy(&h2, 0.6).unwrap() - 1.25).abs() < 1e-14);
        let a2 = Space::Bergman { p: 2.0, beta: 0.0 };
        assert!((eval_functional_proxy(&a2, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // Bergman kernel: sum (m + 1) t^{2m} = (1 - t^2)^{-2}
        assert!((eval_functional_proxy(&a2, 0.5).unwrap() - 1.0 / 0.75).abs() < 1e-12);
        assert!(matches!(
            eval_functional_proxy(&Space::Hardy { p: 1.0 }, 0.5),
            Err(Error::UnsupportedSpace(_))
        ));
    }

    #[test]
    fn bernstein_examples() {
        let n = 6;
        let sigma = PointSequence::one_point(n, ZERO).unwrap();
        let mut coeffs = vec![0.0; n];
        coeffs[n - 1] = 1.0;
        let f = FunctionExpr::poly(&coeffs);
        let v = bernstein_ratio_for(&f, &sigma, 1).unwrap();
        assert!((v - (n as f64 - 1.0) / n as f64).abs() < 1e-12);
        let one = PointSequence::one_point(1, ZERO).unwrap();
        assert_eq!(bernstein_ratio(&one, 1, 4, 3).unwrap(), 0.0);
    }
}
