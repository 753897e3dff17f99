//! Reproducible random streams.
//!
//! Every Monte Carlo replication owns one [`RngStream`], addressed by a
//! `(master_seed, stream_index)` pair. The stream is a ChaCha8 keystream:
//! the master seed fixes the key and the index selects the ChaCha stream
//! word, so stream `r` is available without drawing from streams `0..r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Poisson draw by inversion; only used for small means (jump counts per step).
    pub fn poisson(&mut self, mean: f64) -> u32 {
        if mean <= 0.0 {
            return 0;
        }
        let u = self.uniform();
        let mut k = 0u32;
        let mut p = (-mean).exp();
        let mut cdf = p;
        while u > cdf && k < 10_000 {
            k += 1;
            p *= mean / f64::from(k);
            cdf += p;
        }
        k
    }

    /// Two standard normals with correlation `rho`, built as
    /// `(z1, rho * z1 + sqrt(1 - rho^2) * z2)`.
    pub fn correlated_normals(&mut self, rho: f64) -> Result<(f64, f64)> {
        let pair = CorrelatedPair::new(rho)?;
        Ok(pair.draw(self))
    }
}

/// Cholesky factor of a 2x2 correlation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatedPair {
    rho: f64,
    complement: f64,
}

impl CorrelatedPair {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() > 1.0 {
            return Err(Error::Domain(format!("correlation {rho} outside [-1, 1]")));
        }
        Ok(Self {
            rho,
            complement: (1.0 - rho * rho).max(0.0).sqrt(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn draw(&self, stream: &mut RngStream) -> (f64, f64) {
        let a = stream.normal();
        let b = stream.normal();
        (a, self.combine(a, b))
    }

    /// Correlate an already drawn `first` with an independent normal `independent`.
    #[inline]
    pub fn combine(&self, first: f64, independent: f64) -> f64 {
        self.rho * first + self.complement * independent
    }
}
