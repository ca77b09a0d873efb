//! Per-run random streams.
//!
//! Every run draws from exactly one ChaCha8 stream keyed by the master seed,
//! with the run index selecting the ChaCha stream id. Runs therefore never
//! share state and the result of run `k` does not depend on how many other
//! runs execute, or in which order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    run_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, run_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(run_index);
        Self {
            master_seed,
            run_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn run_index(&self) -> u64 {
        self.run_index
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        // sd is validated positive and finite before any run starts.
        Normal::new(mean, sd)
            .expect("normal parameters validated")
            .sample(&mut self.inner)
    }

    /// Normal draw restricted to non-negative values by rejection.
    pub fn non_negative_normal(&mut self, mean: f64, sd: f64) -> f64 {
        loop {
            let x = self.normal(mean, sd);
            if x >= 0.0 {
                return x;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
