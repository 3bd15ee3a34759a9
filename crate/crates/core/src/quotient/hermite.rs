use ndarray::Array2;
use num_complex::Complex64;

use super::linalg::Matrix;
use crate::error::{Error, Result};
use crate::funcexpr::FunctionExpr;
use crate::modelspace::PointSequence;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Polynomial of degree `< n` matching `f` and its derivatives on `sigma`
/// (multiplicities counted), stored in Newton form on confluent nodes.
#[derive(Clone, Debug)]
pub struct HermiteInterpolant {
    pub sigma: PointSequence,
    /// Node sequence; copies of a repeated point are adjacent.
    nodes: Vec<Complex64>,
    newton: Vec<Complex64>,
}

/// Leja order: start from the point of largest modulus, then repeatedly take the
/// point maximizing the product of distances to the points already chosen.
fn leja_order(points: &[(Complex64, usize)]) -> Vec<(Complex64, usize)> {
    let mut rest: Vec<(Complex64, usize)> = points.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    if rest.is_empty() {
        return out;
    }
    let first = (0..rest.len())
        .max_by(|&i, &j| rest[i].0.norm().total_cmp(&rest[j].0.norm()))
        .unwrap();
    out.push(rest.swap_remove(first));
    let mut score: Vec<f64> = vec![0.0; rest.len()];
    while !rest.is_empty() {
        let (last, mult) = *out.last().unwrap();
        for (s, (p, _)) in score.iter_mut().zip(&rest) {
            *s += mult as f64 * (p - last).norm().ln();
        }
        let pick = (0..rest.len()).max_by(|&i, &j| score[i].total_cmp(&score[j])).unwrap();
        out.push(rest.swap_remove(pick));
        score.swap_remove(pick);
    }
    out
}

pub fn hermite_interpolant(f: &FunctionExpr, sigma: &PointSequence) -> Result<HermiteInterpolant> {
    let ordered = leja_order(&sigma.distinct());
    let mut nodes = Vec::with_capacity(sigma.len());
    // Taylor coefficients at each node position (shared by copies of a point).
    let mut taylor: Vec<std::rc::Rc<Vec<Complex64>>> = Vec::with_capacity(sigma.len());
    for &(p, m) in &ordered {
        let t = std::rc::Rc::new(f.taylor_at(p, m - 1)?);
        for _ in 0..m {
            nodes.push(p);
            taylor.push(t.clone());
        }
    }
    let n = nodes.len();
    let mut column: Vec<Complex64> = taylor.iter().map(|t| t[0]).collect();
    let mut newton = Vec::with_capacity(n);
    newton.push(column[0]);
    for k in 1..n {
        let next: Vec<Complex64> = (0..n - k)
            .map(|i| {
                if nodes[i] == nodes[i + k] {
                    taylor[i][k]
                } else {
                    (column[i + 1] - column[i]) / (nodes[i + k] - nodes[i])
                }
            })
            .collect();
        newton.push(next[0]);
        column = next;
    }
    let interp = HermiteInterpolant {
        sigma: sigma.clone(),
        nodes,
        newton,
    };
    interp.verify(f, &ordered)?;
    Ok(interp)
}

impl HermiteInterpolant {
    pub fn degree_bound(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn newton_coefficients(&self) -> &[Complex64] {
        &self.newton
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let n = self.nodes.len();
        let mut acc = self.newton[n - 1];
        for k in (0..n - 1).rev() {
            acc = self.newton[k] + (x - self.nodes[k]) * acc;
        }
        acc
    }

    /// Normalized Taylor coefficients of the interpolant about `x` up to `order`.
    pub fn taylor_at(&self, x: Complex64, order: usize) -> Vec<Complex64> {
        let n = self.nodes.len();
        let mut acc = vec![ZERO; order + 1];
        acc[0] = self.newton[n - 1];
        for k in (0..n - 1).rev() {
            // acc <- c_k + ((x - z_k) + h) acc
            let shift = x - self.nodes[k];
            let mut next = vec![ZERO; order + 1];
            for i in 0..=order {
                next[i] += shift * acc[i];
                if i + 1 <= order {
                    next[i + 1] += acc[i];
                }
            }
            next[0] += self.newton[k];
            acc = next;
        }
        acc
    }

    /// `p(A)` by Horner's rule in Newton form: `P <- c_k I + (A - z_k I) P`.
    pub fn eval_matrix(&self, a: &Matrix) -> Result<Matrix> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(Error::invalid("matrix function needs a square matrix"));
        }
        let n = self.nodes.len();
        let eye: Matrix = Array2::eye(rows);
        let mut p = eye.mapv(|v| v * self.newton[n - 1]);
        for k in (0..n - 1).rev() {
            let mut shifted = a.clone();
            for i in 0..rows {
                shifted[[i, i]] -= self.nodes[k];
            }
            p = shifted.dot(&p);
            for i in 0..rows {
                p[[i, i]] += self.newton[k];
            }
        }
        Ok(p)
    }

    fn verify(&self, f: &FunctionExpr, ordered: &[(Complex64, usize)]) -> Result<()> {
        for &(x, m) in ordered {
            let want = f.taylor_at(x, m - 1)?;
            let got = self.taylor_at(x, m - 1);
            let scale = want.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
            let err = want
                .iter()
                .zip(&got)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if !(err <= 1e-8 * scale) {
                return Err(Error::NumericalBreakdown {
                    what: "Hermite interpolation",
                    detail: format!("jet mismatch {err:e} (scale {scale:e}) at node {x}"),
                });
            }
        }
        Ok(())
    }
}
