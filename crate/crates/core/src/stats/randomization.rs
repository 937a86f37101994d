use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Rounds per independent substream.
const BLOCK: usize = 4096;

/// Counter-based generator for substream `stream` of master `seed`.
///
/// Work split across substreams gives identical results whatever the number
/// of worker threads.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Monte Carlo two-sample randomization test on the absolute difference of
/// means. Returns `(1 + hits) / (rounds + 1)` where `hits` counts random
/// relabelings at least as extreme as the observed split.
///
/// Panics if either group is empty.
pub fn fisher_randomization(a: &[f64], b: &[f64], rounds: usize, seed: u64) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "both groups need at least one value");
    let observed = (mean(a) - mean(b)).abs();
    let threshold = observed - 1e-9 * observed.max(f64::MIN_POSITIVE);

    // canonical order makes the result independent of which group is `a`
    let mut pool: Vec<f64> = a.iter().chain(b).copied().collect();
    pool.sort_by(f64::total_cmp);
    let total: f64 = pool.iter().sum();
    let n = pool.len();
    // draw the smaller group; its complement is the other
    let k = a.len().min(b.len());

    let blocks = rounds.div_ceil(BLOCK);
    let hits: usize = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = substream(seed, block as u64);
            let mut work = pool.clone();
            let todo = BLOCK.min(rounds - block * BLOCK);
            let mut hits = 0;
            for _ in 0..todo {
                let (chosen, _) = work.partial_shuffle(&mut rng, k);
                let sum: f64 = chosen.iter().sum();
                let diff = (sum / k as f64 - (total - sum) / (n - k) as f64).abs();
                if diff >= threshold {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    (1 + hits) as f64 / (rounds + 1) as f64
}
