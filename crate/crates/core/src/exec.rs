//! Seeded replication streams and the replication runner.
//!
//! Every replication draws from its own counter-derived ChaCha stream
//! `(master_seed, replication_index)`, so results depend only on the seed
//! and the replication index — never on scheduling or thread count.
//! Results are collected in replication order; downstream aggregation sees
//! identical inputs whether the work ran on one thread or many.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Independent random stream for one replication.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

/// Run `n_reps` independent replications, in parallel when the `parallel`
/// feature is enabled. The output vector is indexed by replication.
pub fn run_replications<T, F>(n_reps: usize, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha12Rng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replication_rng(master_seed, rep as u64);
                f(rep, &mut rng)
            })
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_replications_seq(n_reps, master_seed, f)
    }
}

/// Parallel map over indices 0..n with order-preserving collection; the
/// closure derives whatever streams it needs from the index.
pub fn par_map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`run_replications`]; always available, used by the
/// benches to compare against the parallel path.
pub fn run_replications_seq<T, F>(n_reps: usize, master_seed: u64, f: F) -> Vec<T>
where
    F: Fn(usize, &mut ChaCha12Rng) -> T,
{
    (0..n_reps)
        .map(|rep| {
            let mut rng = replication_rng(master_seed, rep as u64);
            f(rep, &mut rng)
        })
        .collect()
}

/// Run `f` inside a pool with `n_threads` workers (0 = library default).
/// Without the `parallel` feature the closure just runs on this thread.
pub fn with_threads<R, F>(n_threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n_threads == 0 {
            f()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n_threads)
                .build()
                .expect("thread pool")
                .install(f)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n_threads;
        f()
    }
}
