//! Equispaced boundary sampling and FFT-based coefficient extraction.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest boundary grid any refinement loop may reach.
pub const MAX_GRID: usize = 1 << 22;

/// `exp(2 pi i j / m)`, reduced to the first quadrant so that quarter turns are exact.
pub fn unit_root(j: usize, m: usize) -> Complex64 {
    let j = j % m;
    let quadrant = (4 * j) / m;
    let rem = 4 * j - quadrant * m;
    let theta = std::f64::consts::FRAC_PI_2 * rem as f64 / m as f64;
    let (s, c) = theta.sin_cos();
    match quadrant {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

pub fn next_pow2(x: usize) -> usize {
    x.max(1).next_power_of_two()
}

/// Samples of a function on the `m` equispaced nodes `exp(2 pi i j / m)`.
///
/// Doubling the grid only evaluates the new odd-indexed nodes.
#[derive(Clone, Debug)]
pub struct CircleSamples<T> {
    values: Vec<T>,
}

impl<T: Clone> CircleSamples<T> {
    pub fn new<F>(m: usize, eval: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<T>,
    {
        let values = (0..m).map(|j| eval(j, m)).collect::<Result<Vec<_>>>()?;
        Ok(CircleSamples { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Double the grid; `eval(j, m)` receives node indices of the refined grid.
    pub fn refine<F>(&mut self, eval: F) -> Result<()>
    where
        F: Fn(usize, usize) -> Result<T>,
    {
        let m = 2 * self.values.len();
        if m > MAX_GRID {
            return Err(Error::non_convergence(
                "boundary quadrature",
                format!("grid would exceed {MAX_GRID} nodes"),
            ));
        }
        let mut out = Vec::with_capacity(m);
        for (k, v) in self.values.drain(..).enumerate() {
            out.push(v);
            out.push(eval(2 * k + 1, m)?);
        }
        self.values = out;
        Ok(())
    }
}

/// First `count` Fourier coefficients of the sampled boundary values.
pub fn fft_coefficients(samples: &[Complex64], count: usize) -> Vec<Complex64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    buf.truncate(count.min(m));
    for c in buf.iter_mut() {
        *c *= inv;
    }
    buf
}
