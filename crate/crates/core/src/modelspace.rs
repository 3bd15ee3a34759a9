//! Finite Blaschke products and their model spaces `K_B = H^2 ⊖ B H^2`.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcexpr::fourier::{next_pow2, unit_root, CircleSamples, MAX_GRID};
use crate::funcexpr::{check_finite, FunctionExpr, Polynomial};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A finite sequence in the open disk; repeated points encode multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSequence {
    points: Vec<Complex64>,
    r: f64,
}

impl PointSequence {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a point sequence needs at least one point"));
        }
        for &p in &points {
            check_finite(p, "sequence point")?;
            if p.norm() >= 1.0 {
                return Err(Error::invalid(format!(
                    "sequence points must satisfy |lambda| < 1, got {p} with modulus {}",
                    p.norm()
                )));
            }
        }
        let r = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        Ok(PointSequence { points, r })
    }

    /// The point `lambda` repeated `n` times.
    pub fn one_point(n: usize, lambda: Complex64) -> Result<Self> {
        Self::new(vec![lambda; n])
    }

    /// Parse `re im` lines; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::invalid(format!(
                    "line {}: expected `re im`, got {line:?}",
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    Error::invalid(format!("line {}: bad number {s:?}: {e}", lineno + 1))
                })
            };
            points.push(Complex64::new(parse(fields[0])?, parse(fields[1])?));
        }
        Self::new(points)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `max |lambda_j|`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Distinct points with multiplicities, in order of first appearance.
    pub fn distinct(&self) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for &p in &self.points {
            match out.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += 1,
                None => out.push((p, 1)),
            }
        }
        out
    }

    pub fn has_distinct_points(&self) -> bool {
        self.distinct().len() == self.points.len()
    }

    /// `Some(lambda)` when every point equals `lambda`.
    pub fn single_point(&self) -> Option<Complex64> {
        let first = self.points[0];
        self.points.iter().all(|&p| p == first).then_some(first)
    }

    /// The sequence with `0` prepended, whose Blaschke product is `z B`.
    pub fn with_origin(&self) -> PointSequence {
        let mut points = Vec::with_capacity(self.len() + 1);
        points.push(ZERO);
        points.extend_from_slice(&self.points);
        PointSequence { points, r: self.r }
    }

    /// The monic polynomial with zero set `sigma`.
    pub fn monic_polynomial(&self) -> Polynomial {
        self.points
            .iter()
            .fold(Polynomial::one(), |acc, &p| acc.mul(&Polynomial::linear_root(p)))
    }
}

/// `prod b_lambda` over a list of points, grouping equal points into powers.
fn product_expr(points: &[Complex64]) -> Result<FunctionExpr> {
    let seq_distinct = {
        let mut out: Vec<(Complex64, u32)> = Vec::new();
        for &p in points {
            match out.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += 1,
                None => out.push((p, 1)),
            }
        }
        out
    };
    let factors = seq_distinct
        .into_iter()
        .map(|(p, m)| {
            let b = FunctionExpr::blaschke_factor(p)?;
            Ok(if m == 1 { b } else { b.powi(m) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match factors.len() {
        1 => factors.into_iter().next().unwrap(),
        _ => FunctionExpr::product(factors),
    })
}

/// `B_sigma = prod b_lambda`.
#[derive(Clone, Debug)]
pub struct BlaschkeProduct {
    pub sigma: PointSequence,
    pub expr: FunctionExpr,
}

impl BlaschkeProduct {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.expr.eval(z)
    }
}

pub fn blaschke_product(sigma: &PointSequence) -> BlaschkeProduct {
    BlaschkeProduct {
        sigma: sigma.clone(),
        expr: product_expr(sigma.points()).expect("points validated by PointSequence"),
    }
}

/// Orthonormal basis `e_j = (1 - |lambda_j|^2)^(1/2) B_(j-1) k_(lambda_j)` of `K_B`.
#[derive(Clone, Debug)]
pub struct MalmquistWalshBasis {
    pub sigma: PointSequence,
    pub elements: Vec<FunctionExpr>,
    scales: Vec<f64>,
}

pub fn mw_basis(sigma: &PointSequence) -> MalmquistWalshBasis {
    let points = sigma.points();
    let scales: Vec<f64> = points.iter().map(|l| (1.0 - l.norm_sqr()).sqrt()).collect();
    let single = sigma.single_point();
    let mut elements = Vec::with_capacity(points.len());
    let mut partial = FunctionExpr::constant(ONE);
    for (j, &lambda) in points.iter().enumerate() {
        let kernel = FunctionExpr::cauchy_kernel(lambda).expect("|lambda| < 1");
        let factor = if j == 0 {
            kernel
        } else {
            FunctionExpr::product(vec![partial.clone(), kernel])
        };
        elements.push(factor.scale(Complex64::new(scales[j], 0.0)));
        let b = FunctionExpr::blaschke_factor(lambda).expect("|lambda| < 1");
        partial = match single {
            Some(_) => b.powi(j as u32 + 1),
            None if j == 0 => b,
            None => FunctionExpr::product(vec![partial, b]),
        };
    }
    MalmquistWalshBasis {
        sigma: sigma.clone(),
        elements,
        scales,
    }
}

impl MalmquistWalshBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// All basis values at `z` in `O(n)`.
    pub fn eval_all(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        self.eval_all_into(z, &mut out);
        out
    }

    pub(crate) fn eval_all_into(&self, z: Complex64, out: &mut Vec<Complex64>) {
        out.clear();
        let mut partial = ONE;
        for (&lambda, &s) in self.sigma.points().iter().zip(&self.scales) {
            let den = ONE - lambda.conj() * z;
            out.push(partial * s / den);
            partial *= (lambda - z) / den;
        }
    }

    /// `sum c_j e_j`, built in nested form so that evaluation costs `O(n)`.
    pub fn combination(&self, coeffs: &[Complex64]) -> Result<FunctionExpr> {
        if coeffs.len() != self.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                self.len(),
                coeffs.len()
            )));
        }
        let points = self.sigma.points();
        let term = |j: usize| {
            FunctionExpr::cauchy_kernel(points[j])
                .expect("|lambda| < 1")
                .scale(coeffs[j] * self.scales[j])
        };
        let n = self.len();
        let mut acc = term(n - 1);
        for j in (0..n - 1).rev() {
            let b = FunctionExpr::blaschke_factor(points[j]).expect("|lambda| < 1");
            acc = FunctionExpr::sum(vec![term(j), FunctionExpr::product(vec![b, acc])]);
        }
        Ok(acc)
    }

    /// Gram matrix `<e_j, e_i>` by the boundary trapezoid rule on `m` nodes.
    pub fn gram(&self, m: usize) -> Vec<Vec<Complex64>> {
        let n = self.len();
        let mut g = vec![vec![ZERO; n]; n];
        let mut vals = Vec::with_capacity(n);
        for j in 0..m {
            self.eval_all_into(unit_root(j, m), &mut vals);
            for (i, row) in g.iter_mut().enumerate() {
                let vi = vals[i].conj();
                for (k, entry) in row.iter_mut().enumerate() {
                    *entry += vals[k] * vi;
                }
            }
        }
        for row in g.iter_mut() {
            for entry in row.iter_mut() {
                *entry /= m as f64;
            }
        }
        g
    }
}

/// Nodes needed for the trapezoid rule to resolve products of basis elements.
pub(crate) fn basis_grid_size(sigma: &PointSequence) -> usize {
    // Aliasing error decays like r^M; the polynomial prefactor grows like n.
    let r = sigma.r().max(0.5);
    let m = (40.0 / -r.ln()) as usize + 8 * sigma.len();
    next_pow2(m).clamp(64, MAX_GRID)
}

/// The reproducing kernel `k_zeta^B(z) = (1 - conj(B(zeta)) B(z)) / (1 - conj(zeta) z)`.
#[derive(Clone, Debug)]
pub struct KernelFunction {
    pub sigma: PointSequence,
    pub zeta: Complex64,
    pub expr: FunctionExpr,
}

/// Points with `|zeta| >= 1 - BOUNDARY_SLACK` use the divided-difference form.
const BOUNDARY_SLACK: f64 = 1e-12;

pub fn reproducing_kernel(sigma: &PointSequence, zeta: Complex64) -> Result<KernelFunction> {
    check_finite(zeta, "kernel point")?;
    if zeta.norm() > 1.0 + BOUNDARY_SLACK {
        return Err(Error::invalid(format!(
            "kernel point must lie in the closed disk, got |{zeta}| = {}",
            zeta.norm()
        )));
    }
    let b = blaschke_product(sigma).expr;
    let b_zeta = b.eval(zeta)?;
    let expr = if zeta.norm() >= 1.0 - BOUNDARY_SLACK {
        // On the circle conj(B(zeta)) = 1 / B(zeta), so the kernel is
        // zeta conj(B(zeta)) (B(z) - B(zeta)) / (z - zeta), analytic across z = zeta.
        b.divided_difference(zeta)?.scale(zeta * b_zeta.conj())
    } else {
        let numerator = FunctionExpr::sum(vec![
            FunctionExpr::constant(ONE),
            b.scale(-b_zeta.conj()),
        ]);
        FunctionExpr::product(vec![numerator, FunctionExpr::cauchy_kernel(zeta)?])
    };
    Ok(KernelFunction {
        sigma: sigma.clone(),
        zeta,
        expr,
    })
}

/// Coefficients `<f, e_k>` of the orthogonal projection onto `K_B`, by boundary
/// quadrature refined until no coefficient moves by more than `1e-12` times the
/// `L^2` size of the samples.
pub fn project(sigma: &PointSequence, f: &FunctionExpr) -> Result<Vec<Complex64>> {
    project_onto(&mw_basis(sigma), f)
}

pub fn project_onto(basis: &MalmquistWalshBasis, f: &FunctionExpr) -> Result<Vec<Complex64>> {
    let n = basis.len();
    let m0 = basis_grid_size(&basis.sigma).max(next_pow2(4 * f.degree_hint() + 4));
    let eval = |j: usize, m: usize| -> Result<(Complex64, Vec<Complex64>)> {
        let z = unit_root(j, m);
        Ok((f.eval(z)?, basis.eval_all(z)))
    };
    let mut samples = CircleSamples::new(m0, eval)?;
    let coefficients = |s: &CircleSamples<(Complex64, Vec<Complex64>)>| {
        let mut c = vec![ZERO; n];
        let mut l2 = 0.0;
        for (fz, es) in s.values() {
            l2 += fz.norm_sqr();
            for (ck, ek) in c.iter_mut().zip(es) {
                *ck += fz * ek.conj();
            }
        }
        let m = s.len() as f64;
        for ck in c.iter_mut() {
            *ck /= m;
        }
        (c, (l2 / m).sqrt())
    };
    let mut prev = coefficients(&samples).0;
    loop {
        if 2 * samples.len() > MAX_GRID {
            return Err(Error::non_convergence(
                "projection onto the model space",
                format!("coefficients not stable at {} nodes", samples.len()),
            ));
        }
        samples.refine(eval)?;
        let (cur, scale) = coefficients(&samples);
        let change = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Recover `sigma` from a rational function with all poles outside the closed disk:
/// each pole `rho` maps to `1 / conj(rho)`, padded with zeros up to
/// `max(deg P, deg Q)` (poles at infinity). Membership of `f` in `K_(z B_sigma)` is
/// then checked at 64 seeded boundary points to `1e-8` relative.
pub fn poles_to_sigma(f: &FunctionExpr) -> Result<PointSequence> {
    let (num, den) = f.to_rational()?;
    if den.is_zero() {
        return Err(Error::invalid("denominator is identically zero"));
    }
    let degree = den.degree();
    let rel_tol = if degree == 0 {
        0.0
    } else {
        (3.0 * f64::EPSILON.powf(1.0 / degree as f64)).max(1e-6)
    };
    let mut points = Vec::new();
    for (rho, m) in den.multiple_roots(rel_tol) {
        if rho.norm() <= 1.0 {
            return Err(Error::PoleInsideDisk { root: rho });
        }
        let lambda = ONE / rho.conj();
        points.extend(std::iter::repeat_n(lambda, m));
    }
    let n = num.degree().max(den.degree()).max(1);
    points.resize(n, ZERO);
    let sigma = PointSequence::new(points)?;

    let basis = mw_basis(&sigma.with_origin());
    let coeffs = project_onto(&basis, f)?;
    let rebuilt = basis.combination(&coeffs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9013);
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for _ in 0..64 {
        let z = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let fz = f.eval(z)?;
        worst = worst.max((fz - rebuilt.eval(z)?).norm());
        scale = scale.max(fz.norm());
    }
    if worst > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvariantViolation {
            what: "model space membership",
            detail: format!("projection misses f by {worst:e} (scale {scale:e})"),
        });
    }
    Ok(sigma)
}
