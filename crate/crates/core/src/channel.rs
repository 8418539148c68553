//! Independent X-error channel, syndrome extraction, and per-trial RNG
//! streams.
//!
//! Each trial gets its own ChaCha stream addressed by (master_seed,
//! trial index), so a campaign produces the same errors no matter how trials
//! are distributed over threads.

use crate::code::CssCode;
use crate::gf2::BitVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("p_x = {0} is outside [0, 0.5); the prior LLR must stay positive")]
    InvalidProbability(f64),
}

/// Independent Pauli-X channel: each qubit flips with probability `p_x`.
///
/// `p_x = 0` is allowed for smoke tests; `p_x >= 0.5` is rejected because
/// the channel prior `ln((1-p)/p)` would lose its sign.
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    p_x: f64,
}

impl NoiseModel {
    pub fn new(p_x: f64) -> Result<Self, ChannelError> {
        if !(0.0..0.5).contains(&p_x) {
            return Err(ChannelError::InvalidProbability(p_x));
        }
        Ok(NoiseModel { p_x })
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    /// Channel prior LLR `ln((1-p)/p)`, positive on the valid range;
    /// infinite at `p_x = 0` (decoders clip stored values).
    pub fn prior_llr(&self) -> f64 {
        ((1.0 - self.p_x) / self.p_x).ln()
    }
}

/// One trial's random stream: ChaCha8 seeded by the campaign master seed
/// with the trial index as the stream counter.
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        RngStream { rng }
    }

    fn draw(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }
}

/// Length-`n` error pattern with i.i.d. Bernoulli(p_x) entries.
pub fn sample_error(model: &NoiseModel, n: usize, rng: &mut RngStream) -> BitVector {
    let mut x = BitVector::zeros(n);
    for i in 0..n {
        if rng.draw(model.p_x()) {
            x.set(i, true);
        }
    }
    x
}

/// X-syndrome `h1 · x` over GF(2).
///
/// # Panics
/// Panics if `x.len() != code.n()`.
pub fn syndrome(code: &CssCode, x: &BitVector) -> BitVector {
    code.h1().mul_vec(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::builtin_code;

    #[test]
    fn noise_model_bounds() {
        assert!(NoiseModel::new(0.0).is_ok());
        assert!(NoiseModel::new(0.49).is_ok());
        assert!(NoiseModel::new(0.5).is_err());
        assert!(NoiseModel::new(-0.01).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn prior_llr_values() {
        let m = NoiseModel::new(0.1).unwrap();
        assert!((m.prior_llr() - 2.1972245773362196).abs() < 1e-15);
        assert_eq!(NoiseModel::new(0.0).unwrap().prior_llr(), f64::INFINITY);
    }

    #[test]
    fn zero_probability_samples_zero_vector() {
        let model = NoiseModel::new(0.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert!(sample_error(&model, 64, &mut rng).is_zero());
    }

    #[test]
    fn replay_is_bit_exact() {
        let model = NoiseModel::new(0.2).unwrap();
        let a = sample_error(&model, 500, &mut RngStream::new(42, 7));
        let b = sample_error(&model, 500, &mut RngStream::new(42, 7));
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_differ() {
        let model = NoiseModel::new(0.2).unwrap();
        let a = sample_error(&model, 500, &mut RngStream::new(42, 0));
        let b = sample_error(&model, 500, &mut RngStream::new(42, 1));
        let c = sample_error(&model, 500, &mut RngStream::new(43, 0));
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_weight_concentrates() {
        // Binomial(1e5, 0.1): 5 sigma is under 0.005 absolute.
        let model = NoiseModel::new(0.1).unwrap();
        let n = 100_000;
        let x = sample_error(&model, n, &mut RngStream::new(7, 0));
        let fraction = x.weight() as f64 / n as f64;
        assert!((fraction - 0.1).abs() < 0.005, "fraction = {fraction}");
    }

    #[test]
    fn syndrome_is_linear_and_blind_to_stabilizers() {
        let code = builtin_code("hgp:rep3").unwrap();
        let mut rng = RngStream::new(3, 5);
        let model = NoiseModel::new(0.3).unwrap();
        let a = sample_error(&model, code.n(), &mut rng);
        let b = sample_error(&model, code.n(), &mut rng);
        let mut ab = a.clone();
        ab ^= &b;
        let mut sa = syndrome(&code, &a);
        sa ^= &syndrome(&code, &b);
        assert_eq!(syndrome(&code, &ab), sa);

        for r in 0..code.g2().rows() {
            assert!(syndrome(&code, &code.g2().row(r)).is_zero());
        }
    }

    #[test]
    fn weight_one_errors_read_off_h1_columns() {
        let code = builtin_code("hgp:rep3").unwrap();
        for v in 0..code.n() {
            let e = BitVector::from_support(code.n(), &[v]);
            let s = syndrome(&code, &e);
            for c in 0..code.h1().rows() {
                assert_eq!(s.get(c), code.h1().get(c, v));
            }
        }
    }

    #[test]
    fn zero_error_zero_syndrome() {
        let code = builtin_code("hgp:rep3").unwrap();
        assert!(syndrome(&code, &BitVector::zeros(code.n())).is_zero());
    }
}
