use num_complex::Complex64;

use super::series::{self, Series};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense polynomial with complex coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// The monomial `z - a`.
    pub fn linear_root(a: Complex64) -> Self {
        Self::new(vec![-a, Complex64::new(1.0, 0.0)])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == ZERO {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(ZERO);
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Normalized Taylor coefficients about `z0` up to `order`.
    pub(crate) fn series_at(&self, z0: Complex64, order: usize) -> Series {
        series::recenter(&self.coeffs, z0, order)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::constant(ZERO);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![ZERO; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn powi(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one();
        for _ in 0..k {
            result = result.mul(self);
        }
        result
    }

    /// Exact division by `(z - a)` (synthetic division). Returns quotient and remainder.
    pub fn div_linear(&self, a: Complex64) -> (Polynomial, Complex64) {
        if self.degree() == 0 {
            return (Polynomial::constant(ZERO), self.coeffs[0]);
        }
        let n = self.degree();
        let mut q = vec![ZERO; n];
        let mut carry = ZERO;
        for k in (0..=n).rev() {
            let v = self.coeffs[k] + carry * a;
            if k == 0 {
                return (Polynomial::new(q), v);
            }
            q[k - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// All complex roots, computed with the Aberth–Ehrlich iteration.
    ///
    /// Multiple roots come back as tight clusters; use [`cluster_roots`] to merge them.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let deriv = Polynomial::new(monic.clone()).derivative();
        let p = Polynomial::new(monic.clone());

        // Cauchy-type bound for the initial circle.
        let radius = monic[..n]
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
            .fold(0.0_f64, f64::max)
            .max(1e-3);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(radius, th)
            })
            .collect();

        for _ in 0..2000 {
            let mut max_step = 0.0_f64;
            for i in 0..n {
                let pz = p.eval(z[i]);
                if pz == ZERO {
                    continue;
                }
                let ratio = pz / deriv.eval(z[i]);
                let mut s = ZERO;
                for j in 0..n {
                    if j != i {
                        let d = z[i] - z[j];
                        if d != ZERO {
                            s += d.inv();
                        }
                    }
                }
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        z
    }

    /// Distinct roots with multiplicities: Aberth roots grouped by [`cluster_roots`],
    /// then each centroid polished by Newton's method on `p^(m-1)`, where the
    /// `m`-fold root is simple.
    pub fn multiple_roots(&self, rel_tol: f64) -> Vec<(Complex64, usize)> {
        let mut clusters = cluster_roots(&self.roots(), rel_tol);
        for (root, m) in clusters.iter_mut() {
            let mut d = self.clone();
            for _ in 1..*m {
                d = d.derivative();
            }
            let dd = d.derivative();
            for _ in 0..50 {
                let step = d.eval(*root) / dd.eval(*root);
                if !step.is_finite() {
                    break;
                }
                *root -= step;
                if step.norm() <= 1e-16 * root.norm().max(1.0) {
                    break;
                }
            }
        }
        clusters
    }
}

/// Group roots lying within `rel_tol * max(1, |root|)` of a cluster and replace
/// each cluster by its centroid. The centroid of a perturbed multiple root is far
/// better conditioned than the individual members.
pub fn cluster_roots(roots: &[Complex64], rel_tol: f64) -> Vec<(Complex64, usize)> {
    let mut assigned = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if assigned[i] {
            continue;
        }
        let mut members = vec![i];
        assigned[i] = true;
        // grow transitively
        let mut k = 0;
        while k < members.len() {
            let c = roots[members[k]];
            for j in 0..roots.len() {
                if !assigned[j] && (roots[j] - c).norm() <= rel_tol * c.norm().max(1.0) {
                    assigned[j] = true;
                    members.push(j);
                }
            }
            k += 1;
        }
        let centroid =
            members.iter().map(|&m| roots[m]).sum::<Complex64>() / members.len() as f64;
        out.push((centroid, members.len()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        // (z - 2)(z + 3) = z^2 + z - 6
        let p = Polynomial::from_real(&[-6.0, 1.0, 1.0]);
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 3.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multiple_root_is_polished() {
        let base = Polynomial::from_real(&[1.0, 0.5]); // root -2
        let p = base.powi(8);
        let clusters = p.multiple_roots(0.1);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].1, 8);
        let err = (clusters[0].0 - Complex64::new(-2.0, 0.0)).norm();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn synthetic_division() {
        let p = Polynomial::from_real(&[-6.0, 1.0, 1.0]);
        let (q, rem) = p.div_linear(Complex64::new(2.0, 0.0));
        assert!(rem.norm() < 1e-14);
        assert_eq!(q, Polynomial::from_real(&[3.0, 1.0]));
    }

    #[test]
    fn derivative_and_eval() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(p.derivative(), Polynomial::from_real(&[2.0, 6.0]));
        assert_eq!(p.eval(Complex64::new(2.0, 0.0)), Complex64::new(17.0, 0.0));
    }
}
