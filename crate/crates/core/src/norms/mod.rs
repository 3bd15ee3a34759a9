//! Norms and pairings of analytic functions on the disk and its boundary.
//!
//! Boundary integrals use the trapezoid rule on equispaced nodes, which converges
//! geometrically for functions analytic across the circle. Area integrals use a
//! Gauss–Jacobi rule in `t = |z|^2` times an adaptive angular rule per ring.
//!
//! Functions concentrated near a boundary point `c / |c|` are integrated after the
//! change of variables `z = b_c(w)`, which spreads the peak over the whole circle.
//! For the rational functions built from Blaschke factors with zero `c` this
//! typically turns the integrand into a polynomial.

pub mod disk;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::funcexpr::fourier::{next_pow2, unit_root, CircleSamples, MAX_GRID};
use crate::funcexpr::FunctionExpr;
pub use disk::{disk_integral, gauss_jacobi, Integral, RadialRule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A computed norm with the change between the last two refinement levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub error_est: f64,
}

/// `M` equispaced nodes of the circle, each carrying weight `1/M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleGrid {
    m: usize,
}

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if !m.is_power_of_two() || m > MAX_GRID {
            return Err(Error::invalid(format!(
                "circle grid size must be a power of two up to {MAX_GRID}, got {m}"
            )));
        }
        Ok(CircleGrid { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn node(&self, j: usize) -> Complex64 {
        unit_root(j, self.m)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.m).map(|j| self.node(j))
    }
}

/// Tuning shared by the adaptive routines.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Center `c` of the transport `z = b_c(w)`, `|c| < 1`.
    pub center: Complex64,
    /// Relative tolerance; `None` keeps each routine's default.
    pub rel_tol: Option<f64>,
    /// Lower bound on the starting number of angular nodes.
    pub min_nodes: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            center: ZERO,
            rel_tol: None,
            min_nodes: 0,
        }
    }
}

impl QuadOptions {
    pub fn centered(center: Complex64) -> Self {
        QuadOptions {
            center,
            ..Self::default()
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.rel_tol.unwrap_or(default)
    }

    fn validate(&self) -> Result<()> {
        if !(self.center.norm() < 1.0) {
            return Err(Error::invalid(format!(
                "transport center must lie in the open disk, got {}",
                self.center
            )));
        }
        Ok(())
    }
}

/// `b_c(w) = (c - w) / (1 - conj(c) w)`; an involution of the disk.
pub(crate) fn mobius(c: Complex64, w: Complex64) -> Complex64 {
    if c == ZERO {
        return w;
    }
    (c - w) / (1.0 - c.conj() * w)
}

/// `int_T g dm`, doubling the grid from `m0` until the change is at most `tol`
/// times `int_T |g| dm`. With a nonzero center the integral runs over `w`, using
/// `dm(z) = (1 - |c|^2) / |1 - conj(c) w|^2 dm(w)`.
pub fn circle_integral<G>(g: G, opts: &QuadOptions, m0: usize, tol: f64) -> Result<Integral>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    opts.validate()?;
    let c = opts.center;
    let jac_num = 1.0 - c.norm_sqr();
    let integrand = |j: usize, m: usize| -> Result<Complex64> {
        let w = unit_root(j, m);
        if c == ZERO {
            g(w)
        } else {
            Ok(g(mobius(c, w))? * (jac_num / (1.0 - c.conj() * w).norm_sqr()))
        }
    };
    let m0 = next_pow2(m0.max(opts.min_nodes).max(16));
    let mut samples = CircleSamples::new(m0.min(MAX_GRID), integrand)?;
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
                "boundary quadrature",
                format!("integral not stable at {} nodes", samples.len()),
            ));
        }
        samples.refine(integrand)?;
        let (cur, abs) = means(&samples);
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

fn check_exponent(p: f64) -> Result<()> {
    if p == f64::INFINITY {
        return Err(Error::invalid(
            "p = infinity is a sup norm; use sup_norm instead",
        ));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("exponent p must be a finite number >= 1, got {p}")));
    }
    Ok(())
}

fn start_nodes(f: &FunctionExpr, p: f64) -> usize {
    next_pow2((2.0 * f.degree_hint() as f64 * p.ceil()) as usize + 2).max(64)
}

/// `(int_T |f|^p dm)^(1/p)` by the trapezoid rule, to relative accuracy `1e-9`.
pub fn hardy_norm(f: &FunctionExpr, p: f64) -> Result<NormEstimate> {
    hardy_norm_with(f, p, &QuadOptions::default())
}

pub fn hardy_norm_with(f: &FunctionExpr, p: f64, opts: &QuadOptions) -> Result<NormEstimate> {
    check_exponent(p)?;
    let tol = opts.tol(1e-9);
    // A relative change d in the integral moves the norm by d / p.
    let integral = circle_integral(
        |z| Ok(Complex64::new(f.eval(z)?.norm().powf(p), 0.0)),
        opts,
        start_nodes(f, p),
        tol * p,
    )?;
    let value = integral.value.re.max(0.0).powf(1.0 / p);
    let error_est = if value > 0.0 {
        value * integral.error_est / (p * integral.value.re)
    } else {
        0.0
    };
    Ok(NormEstimate { value, error_est })
}

/// `int_T h conj(g) dm` to relative accuracy `1e-10` (relative to `int |h g| dm`).
pub fn cauchy_pairing(h: &FunctionExpr, g: &FunctionExpr) -> Result<Complex64> {
    cauchy_pairing_with(h, g, &QuadOptions::default())
}

pub fn cauchy_pairing_with(
    h: &FunctionExpr,
    g: &FunctionExpr,
    opts: &QuadOptions,
) -> Result<Complex64> {
    let m0 = next_pow2(2 * (h.degree_hint() + g.degree_hint()) + 2).max(64);
    Ok(circle_integral(
        |z| Ok(h.eval(z)? * g.eval(z)?.conj()),
        opts,
        m0,
        opts.tol(1e-10),
    )?
    .value)
}

/// `(int_D |f|^p (1 - |z|^2)^beta dA)^(1/p)` to relative accuracy `1e-8`.
pub fn bergman_norm(f: &FunctionExpr, p: f64, beta: f64) -> Result<NormEstimate> {
    bergman_norm_with(f, p, beta, &QuadOptions::default())
}

pub fn bergman_norm_with(
    f: &FunctionExpr,
    p: f64,
    beta: f64,
    opts: &QuadOptions,
) -> Result<NormEstimate> {
    check_exponent(p)?;
    let tol = opts.tol(1e-8);
    let integral = weighted_disk_integral(
        |z| Ok(Complex64::new(f.eval(z)?.norm().powf(p), 0.0)),
        beta,
        f.degree_hint() as f64 * p,
        opts,
        tol * p,
    )?;
    let value = integral.value.re.max(0.0).powf(1.0 / p);
    let error_est = if value > 0.0 {
        value * integral.error_est / (p * integral.value.re)
    } else {
        0.0
    };
    Ok(NormEstimate { value, error_est })
}

/// `int_D h conj(g) dA`.
pub fn bergman_pairing(h: &FunctionExpr, g: &FunctionExpr) -> Result<Complex64> {
    bergman_pairing_weighted(h, g, 0.0, &QuadOptions::default())
}

/// `int_D h conj(g) (1 - |z|^2)^beta dA`.
pub fn bergman_pairing_weighted(
    h: &FunctionExpr,
    g: &FunctionExpr,
    beta: f64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    let degree = (h.degree_hint() + g.degree_hint()) as f64;
    Ok(weighted_disk_integral(
        |z| Ok(h.eval(z)? * g.eval(z)?.conj()),
        beta,
        degree,
        opts,
        opts.tol(1e-10),
    )?
    .value)
}

/// `int_D g(z) (1 - |z|^2)^beta dA(z)`, transported by `opts.center`:
/// the integral equals `(1 - |c|^2)^(beta + 2) int_D g(b_c(u)) |1 - conj(c) u|^(-2 beta - 4) (1 - |u|^2)^beta dA(u)`.
///
/// `degree` estimates the angular frequency content of `g` and sizes the
/// starting grids.
pub fn weighted_disk_integral<G>(
    g: G,
    beta: f64,
    degree: f64,
    opts: &QuadOptions,
    tol: f64,
) -> Result<Integral>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    opts.validate()?;
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::invalid(format!("weight exponent beta must be > -1, got {beta}")));
    }
    let c = opts.center;
    let k0 = next_pow2((degree / 4.0).ceil() as usize + 8).max(8);
    let m0 = next_pow2((2.0 * degree).ceil() as usize + 2).max(32).max(opts.min_nodes);
    if c == ZERO {
        return disk_integral(g, beta, k0, m0, tol);
    }
    let scale = (1.0 - c.norm_sqr()).powf(beta + 2.0);
    let exponent = -(beta + 2.0);
    let transported = |u: Complex64| -> Result<Complex64> {
        let jac = (1.0 - c.conj() * u).norm_sqr().powf(exponent);
        Ok(g(mobius(c, u))? * jac)
    };
    let mut out = disk_integral(transported, beta, k0, m0, tol)?;
    out.value *= scale;
    out.error_est *= scale;
    Ok(out)
}

/// `max_T |f|`: grid maximum over `max(4096, 64 * scale_hint)` nodes, then a
/// golden-section search around the eight largest local maxima.
pub fn sup_norm(f: &FunctionExpr, scale_hint: f64) -> Result<NormEstimate> {
    sup_on_circle(|z| f.eval(z), scale_hint, 1.0)
}

/// Supremum of `|g|` on the circle of radius `rho`.
pub(crate) fn sup_on_circle<G>(g: G, scale_hint: f64, rho: f64) -> Result<NormEstimate>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let target = (64.0 * scale_hint.max(1.0)).min(MAX_GRID as f64) as usize;
    let m = next_pow2(target.max(4096)).min(MAX_GRID);
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let values = (0..m)
        .map(|j| Ok(g(unit_root(j, m) * rho)?.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let grid_max = values.iter().cloned().fold(0.0, f64::max);
    if grid_max == 0.0 {
        return Ok(NormEstimate {
            value: 0.0,
            error_est: 0.0,
        });
    }
    let mut peaks: Vec<usize> = (0..m)
        .filter(|&j| {
            let prev = values[(j + m - 1) % m];
            let next = values[(j + 1) % m];
            values[j] >= prev && values[j] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    peaks.truncate(8);
    let at = |theta: f64| -> Result<f64> { Ok(g(Complex64::from_polar(rho, theta))?.norm()) };
    let mut best = grid_max;
    for &j in &peaks {
        let center = j as f64 * step;
        let refined = golden_max(&at, center - step, center + step, 1e-13 * step.max(1e-6))?;
        best = best.max(refined);
    }
    Ok(NormEstimate {
        value: best,
        error_est: best - grid_max,
    })
}

fn golden_max<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = f1.max(f2);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// `sup_D |f'(z)| (1 - |z|)^alpha`.
///
/// For `alpha = 0` this is the boundary maximum of `|f'|`. Otherwise circles of
/// radius `1 - 2^-j` are scanned for growing `j` until three consecutive radii
/// fail to raise the supremum by more than `1e-8` relative.
pub fn bloch_seminorm(f: &FunctionExpr, alpha: f64) -> Result<NormEstimate> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let df = f.derivative(1);
    let hint = f.degree_hint() as f64;
    if alpha == 0.0 {
        return sup_norm(&df, hint);
    }
    let mut best = df.eval(ZERO)?.norm();
    let mut last_gain = 0.0;
    let mut stale = 0;
    for j in 1..=52 {
        let h = 0.5f64.powi(j);
        let ring = sup_on_circle(|z| df.eval(z), hint, 1.0 - h)?;
        let candidate = ring.value * h.powf(alpha);
        if candidate > best * (1.0 + 1e-8) {
            last_gain = candidate - best;
            best = candidate;
            stale = 0;
        } else {
            stale += 1;
            if stale >= 3 {
                break;
            }
        }
    }
    Ok(NormEstimate {
        value: best,
        error_est: last_gain,
    })
}

/// Multiplier `Gamma(m + 2 + alpha) / ((m + 1)! Gamma(2 + alpha))` of the
/// fractional derivative `D_alpha` on `z^m`.
pub fn frac_diff_multiplier(m: usize, alpha: f64) -> f64 {
    let m = m as f64;
    (ln_gamma(m + 2.0 + alpha) - ln_gamma(m + 2.0) - ln_gamma(2.0 + alpha)).exp()
}

/// Apply `D_alpha` to a Taylor coefficient list.
pub fn frac_diff(coeffs: &[Complex64], alpha: f64) -> Result<Vec<Complex64>> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be > -1, got {alpha}")));
    }
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(m, &c)| c * frac_diff_multiplier(m, alpha))
        .collect())
}

/// The backward shift `(f - f(0)) / z`.
pub fn backward_shift(f: &FunctionExpr) -> Result<FunctionExpr> {
    f.divided_difference(ZERO)
}
