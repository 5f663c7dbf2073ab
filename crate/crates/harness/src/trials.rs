use rayon::prelude::*;

/// Runs `count` independent trials in parallel, trial `t` receiving the seed
/// `seed ^ t`. Results come back in trial order.
pub fn run_trials<T, F>(count: u64, seed: u64, f: F) -> Vec<mallows_core::Result<T>>
where
    T: Send,
    F: Fn(u64) -> mallows_core::Result<T> + Sync + Send,
{
    (0..count).into_par_iter().map(|t| f(seed ^ t)).collect()
}

/// Completed trial values (in order) and the number of errored trials.
pub fn split<T>(results: Vec<mallows_core::Result<T>>) -> (Vec<Option<T>>, u64) {
    let mut errored = 0;
    let values = results
        .into_iter()
        .map(|r| match r {
            Ok(v) => Some(v),
            Err(_) => {
                errored += 1;
                None
            }
        })
        .collect();
    (values, errored)
}

/// Seed for the `k`-th independent stream of an experiment.
pub fn sub_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add((k + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// FNV-1a, used to give each named experiment its own seed stream.
pub fn name_hash(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}
