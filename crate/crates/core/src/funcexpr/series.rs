//! Truncated Taylor series arithmetic.
//!
//! A series of order `L` stores the normalized coefficients `c_k = f^(k)(z0) / k!`
//! for `k = 0..=L`. Every operation truncates its result to the order of its
//! inputs, so composing operations never needs more than `O(L^2)` work per node.

use num_complex::Complex64;

pub(crate) type Series = Vec<Complex64>;

pub(crate) fn constant(c: Complex64, order: usize) -> Series {
    let mut s = vec![Complex64::new(0.0, 0.0); order + 1];
    s[0] = c;
    s
}

pub(crate) fn add_assign(acc: &mut Series, other: &Series) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += *b;
    }
}

pub(crate) fn scale(s: &mut Series, c: Complex64) {
    for a in s.iter_mut() {
        *a *= c;
    }
}

pub(crate) fn mul(a: &Series, b: &Series) -> Series {
    let order = a.len().min(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    for (i, &ai) in a.iter().enumerate().take(order) {
        if ai == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(order - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `a / b`; the caller guarantees `b[0] != 0`.
pub(crate) fn div(a: &Series, b: &Series) -> Series {
    let order = a.len().min(b.len());
    let inv_b0 = b[0].inv();
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    for k in 0..order {
        let mut acc = a[k];
        for j in 1..=k {
            acc -= b[j] * out[k - j];
        }
        out[k] = acc * inv_b0;
    }
    out
}

pub(crate) fn powi(base: &Series, mut k: u32) -> Series {
    let order = base.len();
    let mut result = constant(Complex64::new(1.0, 0.0), order - 1);
    if k == 0 {
        return result;
    }
    let mut b = base.clone();
    loop {
        if k & 1 == 1 {
            result = mul(&result, &b);
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        b = mul(&b, &b);
    }
    result
}

/// Composition `outer(inner(z0 + h))` where `outer` is expanded about `inner[0]`.
pub(crate) fn compose(outer: &Series, inner: &Series) -> Series {
    let order = outer.len().min(inner.len());
    let mut shifted = inner[..order].to_vec();
    shifted[0] = Complex64::new(0.0, 0.0);
    // Horner in the shifted inner series; shifted has no constant term so each
    // multiplication raises the valuation and truncation stays exact.
    let mut acc = constant(outer[order - 1], order - 1);
    for k in (0..order - 1).rev() {
        acc = mul(&acc, &shifted);
        acc[0] += outer[k];
    }
    acc
}

/// Shift the expansion point: given coefficients about `a`, return the first
/// `order + 1` coefficients about `a + h`.
pub(crate) fn recenter(coeffs: &[Complex64], h: Complex64, order: usize) -> Series {
    // Repeated synthetic division by (z - h) in the local variable.
    let mut work = coeffs.to_vec();
    let deg = work.len() - 1;
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order.min(deg) {
        for i in (k..deg).rev() {
            let carry = work[i + 1] * h;
            work[i] += carry;
        }
        out.push(work[k]);
    }
    out.resize(order + 1, Complex64::new(0.0, 0.0));
    out
}

pub(crate) fn to_derivatives(mut s: Series) -> Vec<Complex64> {
    let mut fact = 1.0;
    for (k, c) in s.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *c *= fact;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn division_inverts_geometric_series() {
        // 1 / (1 - h) = 1 + h + h^2 + ...
        let one = constant(c(1.0), 4);
        let d = vec![c(1.0), c(-1.0), c(0.0), c(0.0), c(0.0)];
        let q = div(&one, &d);
        assert!(q.iter().all(|x| (x - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn compose_exp_like() {
        // outer is already expanded about inner[0] = 2.
        let outer = vec![c(1.0), c(1.0), c(1.0)];
        let inner = vec![c(2.0), c(1.0), c(0.0)];
        let r = compose(&outer, &inner);
        assert_eq!(r, vec![c(1.0), c(1.0), c(1.0)]);
        // inner = 2h gives 1 + 2h + 4h^2
        let inner = vec![c(2.0), c(2.0), c(0.0)];
        assert_eq!(compose(&outer, &inner), vec![c(1.0), c(2.0), c(4.0)]);
    }

    #[test]
    fn recenter_matches_binomial_expansion() {
        // z^3 about 0 recentred at 2: 8 + 12 h + 6 h^2 + h^3
        let coeffs = vec![c(0.0), c(0.0), c(0.0), c(1.0)];
        let r = recenter(&coeffs, c(2.0), 3);
        assert_eq!(r, vec![c(8.0), c(12.0), c(6.0), c(1.0)]);
    }

    #[test]
    fn power_by_squaring() {
        let base = vec![c(1.0), c(1.0), c(0.0), c(0.0)];
        assert_eq!(powi(&base, 3), vec![c(1.0), c(3.0), c(3.0), c(1.0)]);
        assert_eq!(powi(&base, 0), vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
    }
}
