//! Absolute-value functionals of a simulated Brownian motion on [0, 1].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsFunctionals {
    /// `int_0^1 |X(r)| dr`.
    pub full: f64,
    /// `int |X(r)| dr` over each of the `q` equal subintervals.
    pub parts: Vec<f64>,
}

impl AbsFunctionals {
    /// `D_q = full * sqrt(q (q - 1) / sum_j (full - q part_j)^2)`.
    /// For `q = 2` this is `full / |part_1 - part_2|`.
    pub fn d_q(&self) -> f64 {
        let q = self.parts.len() as f64;
        let ss: f64 = self.parts.iter().map(|p| (self.full - q * p).powi(2)).sum();
        self.full * (q * (q - 1.0) / ss).sqrt()
    }
}

/// Left Riemann sums of `|X|` over a path given on the grid `i / n`,
/// `i = 0..n-1`. `n` must be divisible by `q`.
pub fn abs_functionals_from_path(path: &[f64], q: usize) -> Result<AbsFunctionals> {
    let n = path.len();
    if q < 2 {
        return Err(Error::Config(format!("q must be >= 2, got {q}")));
    }
    if n == 0 || n % q != 0 {
        return Err(Error::Config(format!("path length {n} is not a positive multiple of q = {q}")));
    }
    let h = 1.0 / n as f64;
    let parts: Vec<f64> = path
        .chunks_exact(n / q)
        .map(|c| h * c.iter().map(|v| v.abs()).sum::<f64>())
        .collect();
    Ok(AbsFunctionals {
        full: parts.iter().sum(),
        parts,
    })
}

/// Simulate a standard Brownian motion with `n_steps` steps (`X(0) = 0`) and
/// return its absolute-value functionals over `q` equal subintervals.
pub fn gen_brownian_abs_functionals(n_steps: usize, q: usize, stream: &mut RngStream) -> Result<AbsFunctionals> {
    if n_steps == 0 {
        return Err(Error::Config("n_steps must be positive".into()));
    }
    let sd = (1.0 / n_steps as f64).sqrt();
    let mut x = 0.0;
    let mut path = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        path.push(x);
        x += sd * stream.normal();
    }
    abs_functionals_from_path(&path, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path() {
        let f = abs_functionals_from_path(&[1.0; 1000], 2).unwrap();
        assert!((f.full - 1.0).abs() < 1e-12);
        assert!((f.parts[0] - 0.5).abs() < 1e-12 && (f.parts[1] - 0.5).abs() < 1e-12);
        assert!(f.d_q().is_infinite());
    }

    #[test]
    fn d2_closed_form() {
        let f = AbsFunctionals {
            full: 3.0,
            parts: vec![2.0, 1.0],
        };
        assert!((f.d_q() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn d2_exceeds_one() {
        for r in 0..500 {
            let f = gen_brownian_abs_functionals(1000, 2, &mut RngStream::new(5, r)).unwrap();
            assert!(f.d_q() > 1.0);
            assert!((f.parts.iter().sum::<f64>() - f.full).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_partition() {
        assert!(abs_functionals_from_path(&[0.0; 10], 3).is_err());
        assert!(abs_functionals_from_path(&[0.0; 10], 1).is_err());
    }
}
