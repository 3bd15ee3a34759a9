//! Analytic function expressions with value and derivative (jet) evaluation.
//!
//! Every function the library manipulates (Blaschke factors and products,
//! Cauchy kernels, polynomials, rational functions and anything built from them
//! by sums, products, powers and composition) is a [`FunctionExpr`]. Values come
//! from [`FunctionExpr::eval`]; derivatives of any order come from
//! [`FunctionExpr::eval_jet`], which propagates truncated Taylor series through
//! the expression tree instead of differencing.

pub mod fourier;
mod polynomial;
pub(crate) mod series;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use polynomial::{cluster_roots, Polynomial};
use series::Series;

/// A point of the complex plane. Public operations reject non-finite points.
pub type ComplexPoint = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Denominators with modulus below this are treated as poles.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// Inside this distance a divided difference switches to the Taylor expansion
/// about its base point.
const DIVIDED_DIFFERENCE_NEAR: f64 = 1e-4;
const DIVIDED_DIFFERENCE_EXTRA_TERMS: usize = 48;

pub(crate) fn check_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be finite, got {z}")))
    }
}

/// Values `[f(z), f'(z), ..., f^(L)(z)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    values: Vec<Complex64>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The `k`-th derivative.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// Expression node. Construct through the checked constructors on [`FunctionExpr`].
#[derive(Debug)]
pub enum Node {
    Polynomial(Polynomial),
    Rational {
        num: Polynomial,
        den: Polynomial,
    },
    /// `(lambda - z) / (1 - conj(lambda) z)`, `|lambda| < 1`.
    BlaschkeFactor(Complex64),
    /// `1 / (1 - conj(zeta) z)`, `|zeta| <= 1`.
    CauchyKernel(Complex64),
    Sum(Vec<FunctionExpr>),
    Product(Vec<FunctionExpr>),
    IntegerPower(FunctionExpr, u32),
    /// `outer(inner(z))`.
    Compose {
        outer: FunctionExpr,
        inner: FunctionExpr,
    },
    ScalarMultiple(Complex64, FunctionExpr),
    /// `(f(z) - f(a)) / (z - a)`, continuous at `z = a`.
    DividedDifference {
        f: FunctionExpr,
        at: Complex64,
        value_at: Complex64,
    },
    /// The `l`-th complex derivative.
    Derivative(FunctionExpr, usize),
}

/// Immutable, cheaply clonable analytic function expression.
#[derive(Clone)]
pub struct FunctionExpr {
    node: Arc<Node>,
}

impl fmt::Debug for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node.fmt(f)
    }
}

impl FunctionExpr {
    fn from_node(node: Node) -> Self {
        FunctionExpr {
            node: Arc::new(node),
        }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::from_node(Node::Polynomial(p))
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        Self::polynomial(Polynomial::from_real(coeffs))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    /// The identity function `z`.
    pub fn identity() -> Self {
        Self::poly(&[0.0, 1.0])
    }

    /// Rational function `num / den`; rejects denominators with a zero in the closed disk.
    pub fn rational(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid("rational denominator is identically zero"));
        }
        for c in num.coeffs().iter().chain(den.coeffs()) {
            check_finite(*c, "rational coefficient")?;
        }
        if let Some(root) = den.roots().into_iter().find(|r| r.norm() <= 1.0) {
            return Err(Error::PoleInsideDisk { root });
        }
        Ok(Self::from_node(Node::Rational { num, den }))
    }

    pub fn blaschke_factor(lambda: Complex64) -> Result<Self> {
        check_finite(lambda, "Blaschke zero")?;
        if lambda.norm() >= 1.0 {
            return Err(Error::invalid(format!(
                "Blaschke factor needs |lambda| < 1, got |{lambda}| = {}",
                lambda.norm()
            )));
        }
        Ok(Self::from_node(Node::BlaschkeFactor(lambda)))
    }

    pub fn cauchy_kernel(zeta: Complex64) -> Result<Self> {
        check_finite(zeta, "Cauchy kernel point")?;
        if zeta.norm() > 1.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "Cauchy kernel point must lie in the closed disk, got |{zeta}| = {}",
                zeta.norm()
            )));
        }
        Ok(Self::from_node(Node::CauchyKernel(zeta)))
    }

    pub fn sum(items: Vec<FunctionExpr>) -> Self {
        if items.is_empty() {
            return Self::constant(ZERO);
        }
        Self::from_node(Node::Sum(items))
    }

    pub fn product(items: Vec<FunctionExpr>) -> Self {
        if items.is_empty() {
            return Self::constant(ONE);
        }
        Self::from_node(Node::Product(items))
    }

    pub fn powi(&self, k: u32) -> Self {
        Self::from_node(Node::IntegerPower(self.clone(), k))
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &FunctionExpr) -> Self {
        Self::from_node(Node::Compose {
            outer: self.clone(),
            inner: inner.clone(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_node(Node::ScalarMultiple(c, self.clone()))
    }

    /// `(f(z) - f(a)) / (z - a)` with the removable singularity at `a` filled in.
    pub fn divided_difference(&self, a: Complex64) -> Result<Self> {
        check_finite(a, "divided difference base point")?;
        let value_at = self.eval(a)?;
        Ok(Self::from_node(Node::DividedDifference {
            f: self.clone(),
            at: a,
            value_at,
        }))
    }

    pub fn derivative(&self, l: usize) -> Self {
        if l == 0 {
            return self.clone();
        }
        Self::from_node(Node::Derivative(self.clone(), l))
    }

    /// Rough polynomial-degree proxy used to size sampling grids.
    pub fn degree_hint(&self) -> usize {
        match self.node() {
            Node::Polynomial(p) => p.degree(),
            Node::Rational { num, den } => num.degree().max(den.degree()),
            Node::BlaschkeFactor(_) | Node::CauchyKernel(_) => 1,
            Node::Sum(items) => items.iter().map(|e| e.degree_hint()).max().unwrap_or(0),
            Node::Product(items) => items.iter().map(|e| e.degree_hint()).sum(),
            Node::IntegerPower(b, k) => b.degree_hint() * *k as usize,
            Node::Compose { outer, inner } => outer.degree_hint() * inner.degree_hint().max(1),
            Node::ScalarMultiple(_, e) => e.degree_hint(),
            Node::DividedDifference { f, .. } => f.degree_hint(),
            Node::Derivative(f, _) => f.degree_hint(),
        }
    }

    /// Plain evaluation.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self.node() {
            Node::Polynomial(p) => Ok(p.eval(z)),
            Node::Rational { num, den } => {
                let d = den.eval(z);
                pole_check(z, d)?;
                Ok(num.eval(z) / d)
            }
            Node::BlaschkeFactor(l) => {
                let d = ONE - l.conj() * z;
                pole_check(z, d)?;
                Ok((l - z) / d)
            }
            Node::CauchyKernel(zeta) => {
                let d = ONE - zeta.conj() * z;
                pole_check(z, d)?;
                Ok(d.inv())
            }
            Node::Sum(items) => items.iter().try_fold(ZERO, |acc, e| Ok(acc + e.eval(z)?)),
            Node::Product(items) => items.iter().try_fold(ONE, |acc, e| Ok(acc * e.eval(z)?)),
            Node::IntegerPower(b, k) => Ok(b.eval(z)?.powu(*k)),
            Node::Compose { outer, inner } => outer.eval(inner.eval(z)?),
            Node::ScalarMultiple(c, e) => Ok(c * e.eval(z)?),
            Node::DividedDifference { f, at, value_at } => {
                let h = z - at;
                if h.norm() < DIVIDED_DIFFERENCE_NEAR {
                    Ok(divided_difference_series(f, *at, *value_at, z, 0)?[0])
                } else {
                    Ok((f.eval(z)? - value_at) / h)
                }
            }
            Node::Derivative(f, l) => {
                let s = f.series(z, *l)?;
                Ok(s[*l] * factorial(*l))
            }
        }
    }

    /// Values of the function and its first `order` derivatives at `z`.
    pub fn eval_jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        check_finite(z, "evaluation point")?;
        Ok(Jet {
            values: series::to_derivatives(self.series(z, order)?),
        })
    }

    /// Normalized Taylor coefficients `f^(k)(z)/k!`, `k = 0..=order`.
    pub fn taylor_at(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        check_finite(z, "expansion point")?;
        self.series(z, order)
    }

    pub(crate) fn series(&self, z: Complex64, order: usize) -> Result<Series> {
        match self.node() {
            Node::Polynomial(p) => Ok(p.series_at(z, order)),
            Node::Rational { num, den } => {
                let d = den.series_at(z, order);
                pole_check(z, d[0])?;
                Ok(series::div(&num.series_at(z, order), &d))
            }
            Node::BlaschkeFactor(l) => {
                let d = ONE - l.conj() * z;
                pole_check(z, d)?;
                // b(z0 + h) = (l - z0)/d - (1 - |l|^2) sum_{k>=1} conj(l)^{k-1} h^k / d^{k+1}
                let mut out = Vec::with_capacity(order + 1);
                out.push((l - z) / d);
                let inv_d = d.inv();
                let mut term = -(1.0 - l.norm_sqr()) * inv_d * inv_d;
                for _ in 1..=order {
                    out.push(term);
                    term *= l.conj() * inv_d;
                }
                Ok(out)
            }
            Node::CauchyKernel(zeta) => {
                let d = ONE - zeta.conj() * z;
                pole_check(z, d)?;
                let inv_d = d.inv();
                let mut out = Vec::with_capacity(order + 1);
                let mut term = inv_d;
                for _ in 0..=order {
                    out.push(term);
                    term *= zeta.conj() * inv_d;
                }
                Ok(out)
            }
            Node::Sum(items) => {
                let mut acc = series::constant(ZERO, order);
                for e in items {
                    series::add_assign(&mut acc, &e.series(z, order)?);
                }
                Ok(acc)
            }
            Node::Product(items) => {
                let mut acc = series::constant(ONE, order);
                for e in items {
                    acc = series::mul(&acc, &e.series(z, order)?);
                }
                Ok(acc)
            }
            Node::IntegerPower(b, k) => Ok(series::powi(&b.series(z, order)?, *k)),
            Node::Compose { outer, inner } => {
                let inner_s = inner.series(z, order)?;
                let outer_s = outer.series(inner_s[0], order)?;
                Ok(series::compose(&outer_s, &inner_s))
            }
            Node::ScalarMultiple(c, e) => {
                let mut s = e.series(z, order)?;
                series::scale(&mut s, *c);
                Ok(s)
            }
            Node::DividedDifference { f, at, value_at } => {
                divided_difference_series(f, *at, *value_at, z, order)
            }
            Node::Derivative(f, l) => {
                let s = f.series(z, order + l)?;
                // (f^(l))^(k)/k! = c_{k+l} (k+l)!/k!
                Ok((0..=order)
                    .map(|k| s[k + l] * falling_ratio(k, *l))
                    .collect())
            }
        }
    }

    /// Expand into a single quotient of polynomials (no cancellation is attempted).
    pub fn to_rational(&self) -> Result<(Polynomial, Polynomial)> {
        Ok(match self.node() {
            Node::Polynomial(p) => (p.clone(), Polynomial::one()),
            Node::Rational { num, den } => (num.clone(), den.clone()),
            Node::BlaschkeFactor(l) => (
                Polynomial::new(vec![*l, -ONE]),
                Polynomial::new(vec![ONE, -l.conj()]),
            ),
            Node::CauchyKernel(zeta) => {
                (Polynomial::one(), Polynomial::new(vec![ONE, -zeta.conj()]))
            }
            Node::Sum(items) => {
                let mut acc = (Polynomial::constant(ZERO), Polynomial::one());
                for e in items {
                    let (n, d) = e.to_rational()?;
                    acc = if d == acc.1 {
                        (acc.0.add(&n), d)
                    } else {
                        (acc.0.mul(&d).add(&n.mul(&acc.1)), acc.1.mul(&d))
                    };
                }
                acc
            }
            Node::Product(items) => {
                let mut acc = (Polynomial::one(), Polynomial::one());
                for e in items {
                    let (n, d) = e.to_rational()?;
                    acc = (acc.0.mul(&n), acc.1.mul(&d));
                }
                acc
            }
            Node::IntegerPower(b, k) => {
                let (n, d) = b.to_rational()?;
                (n.powi(*k), d.powi(*k))
            }
            Node::Compose { outer, inner } => {
                let (p, q) = outer.to_rational()?;
                let (a, b) = inner.to_rational()?;
                let deg = p.degree().max(q.degree());
                let homogenize = |poly: &Polynomial| {
                    let mut acc = Polynomial::constant(ZERO);
                    for (k, &c) in poly.coeffs().iter().enumerate() {
                        let term = a.powi(k as u32).mul(&b.powi((deg - k) as u32)).scale(c);
                        acc = acc.add(&term);
                    }
                    acc
                };
                (homogenize(&p), homogenize(&q))
            }
            Node::ScalarMultiple(c, e) => {
                let (n, d) = e.to_rational()?;
                (n.scale(*c), d)
            }
            Node::DividedDifference { f, at, value_at } => {
                let (n, d) = f.to_rational()?;
                let (quot, _rem) = n.add(&d.scale(-value_at)).div_linear(*at);
                (quot, d)
            }
            Node::Derivative(f, l) => {
                let (mut n, mut d) = f.to_rational()?;
                for _ in 0..*l {
                    let nn = n.derivative().mul(&d).add(&n.mul(&d.derivative()).scale(-ONE));
                    d = d.mul(&d);
                    n = nn;
                }
                (n, d)
            }
        })
    }
}

fn pole_check(z: Complex64, denominator: Complex64) -> Result<()> {
    let modulus = denominator.norm();
    if modulus < POLE_TOLERANCE || !modulus.is_finite() {
        Err(Error::PoleOnDomain { z, modulus })
    } else {
        Ok(())
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `(k + l)! / k!`
fn falling_ratio(k: usize, l: usize) -> f64 {
    ((k + 1)..=(k + l)).fold(1.0, |acc, j| acc * j as f64)
}

fn divided_difference_series(
    f: &FunctionExpr,
    at: Complex64,
    value_at: Complex64,
    z: Complex64,
    order: usize,
) -> Result<Series> {
    let h = z - at;
    if h.norm() < DIVIDED_DIFFERENCE_NEAR {
        let total = order + DIVIDED_DIFFERENCE_EXTRA_TERMS;
        let fs = f.series(at, total)?;
        let g = &fs[1..];
        if h == ZERO {
            return Ok(g[..=order].to_vec());
        }
        // Accept the expansion only when the truncated tail is negligible.
        let hn = h.norm();
        let head = g[..=order].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let last = g.len() - 1;
        let tail = g[last].norm() * hn.powi((last - order) as i32) * binomial(last, order);
        if tail.is_finite() && tail <= 1e-16 * head.max(f64::MIN_POSITIVE) {
            return Ok(series::recenter(g, h, order));
        }
    }
    let mut s = f.series(z, order)?;
    s[0] -= value_at;
    let mut d = series::constant(h, order);
    if order >= 1 {
        d[1] = ONE;
    }
    Ok(series::div(&s, &d))
}

/// First `d + 1` Taylor coefficients at the origin, extracted by FFT from
/// equispaced boundary samples.
///
/// The grid starts at `m_start` (default `max(4096, next_pow2(32 * degree_hint))`)
/// and doubles until no requested coefficient moves by more than `1e-10`
/// relative to the largest of them.
pub fn taylor_coefficients(
    expr: &FunctionExpr,
    d: usize,
    m_start: Option<usize>,
) -> Result<Vec<Complex64>> {
    let default_m = 4096.max(fourier::next_pow2(32 * expr.degree_hint()));
    let mut m = fourier::next_pow2(m_start.unwrap_or(default_m).max(d + 2));
    if m > fourier::MAX_GRID {
        m = fourier::MAX_GRID;
    }
    let eval = |j: usize, m: usize| expr.eval(fourier::unit_root(j, m));
    let mut samples = fourier::CircleSamples::new(m, eval)?;
    let mut prev = fourier::fft_coefficients(samples.values(), d + 1);
    loop {
        if samples.len() * 2 > fourier::MAX_GRID {
            return Err(Error::non_convergence(
                "taylor_coefficients",
                format!("coefficients not stable at M = {}", samples.len()),
            ));
        }
        samples.refine(eval)?;
        let cur = fourier::fft_coefficients(samples.values(), d + 1);
        let scale = cur.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let change = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change <= 1e-10 * scale || scale == 0.0 {
            return Ok(cur);
        }
        prev = cur;
    }
}
