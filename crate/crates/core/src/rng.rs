//! Seeded Gaussian streams.
//!
//! The generator is ChaCha20 keyed by the seed (little-endian, zero padded to
//! 32 bytes) with the stream id as the ChaCha stream. Uniforms take the top
//! 53 bits of each 64-bit output; normals come from Box–Muller, both outputs
//! used in order.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::DVector;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::operator::C64;

pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Standard complex Gaussian: `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        let im = self.normal();
        C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }

    pub fn complex_vector(&mut self, n: usize) -> DVector<C64> {
        DVector::from_fn(n, |_, _| self.complex_normal())
    }

    /// Uniformly distributed unit vector.
    pub fn unit_vector(&mut self, n: usize) -> DVector<C64> {
        loop {
            let v = self.complex_vector(n);
            let norm = v.norm();
            if norm > 1e-12 {
                return v / C64::new(norm, 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = {
            let mut g = GaussianStream::new(42, 0);
            (0..8).map(|_| g.normal()).collect()
        };
        let b: Vec<f64> = {
            let mut g = GaussianStream::new(42, 0);
            (0..8).map(|_| g.normal()).collect()
        };
        let c: Vec<f64> = {
            let mut g = GaussianStream::new(42, 1);
            (0..8).map(|_| g.normal()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn moments_are_plausible() {
        let mut g = GaussianStream::new(7, 3);
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = g.complex_normal();
            s1 += z.re;
            s2 += z.norm_sqr();
        }
        assert!((s1 / n as f64).abs() < 0.01);
        assert!((s2 / n as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut g = GaussianStream::new(1, 0);
        for _ in 0..10_000 {
            let u = g.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
