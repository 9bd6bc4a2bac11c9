//! Lower-triangular (causal) convolution sums for the Volterra schemes.
//!
//! Each Euler step needs `sum_{i<j} w[j-i] * u[i]`. The sums are evaluated
//! in fixed blocks whose partials are combined in index order, so the
//! result is bit-identical no matter how many threads computed the
//! blocks — and identical to the sequential build. Parallelism kicks in
//! only for long histories where it pays.

/// Block length for partial sums.
pub const BLOCK: usize = 1024;

/// History length above which blocks are evaluated in parallel.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 8192;

/// sum_{i < j} weights[j - i] * inputs[i], with weights indexed by lag
/// (weights[0] is unused).
pub fn causal_dot(weights: &[f64], inputs: &[f64], j: usize) -> f64 {
    debug_assert!(weights.len() > j);
    debug_assert!(inputs.len() >= j);
    let block_sum = |b: usize| -> f64 {
        let lo = b * BLOCK;
        let hi = ((b + 1) * BLOCK).min(j);
        let mut s = 0.0;
        for i in lo..hi {
            s += weights[j - i] * inputs[i];
        }
        s
    };
    let n_blocks = j.div_ceil(BLOCK);
    #[cfg(feature = "parallel")]
    if j >= PAR_THRESHOLD {
        use rayon::prelude::*;
        let partials: Vec<f64> = (0..n_blocks).into_par_iter().map(block_sum).collect();
        return partials.iter().sum();
    }
    (0..n_blocks).map(block_sum).sum()
}

/// Plain straight-line reference sum, kept for agreement tests.
pub fn causal_dot_naive(weights: &[f64], inputs: &[f64], j: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..j {
        s += weights[j - i] * inputs[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn blocked_agrees_with_naive() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 10_000;
        let weights: Vec<f64> = (0..=n).map(|_| rng.gen::<f64>() - 0.3).collect();
        let inputs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        for j in [1, 2, BLOCK - 1, BLOCK, BLOCK + 1, 4097, 9999, 10_000] {
            let a = causal_dot(&weights, &inputs, j);
            let b = causal_dot_naive(&weights, &inputs, j);
            let scale = b.abs().max(1.0);
            assert!(
                (a - b).abs() <= 1e-9 * scale,
                "j={j}: blocked {a} vs naive {b}"
            );
        }
    }

    #[test]
    fn empty_history_is_zero() {
        assert_eq!(causal_dot(&[0.0, 1.0], &[2.0], 0), 0.0);
    }
}
