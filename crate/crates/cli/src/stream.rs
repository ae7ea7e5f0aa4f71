//! Order-preserving parallel extraction.
//!
//! Whole input blocks are independent given the (read-only) seed, so the
//! packed input splits into contiguous runs of blocks, one per worker;
//! outputs concatenate in input order, making the result bit-identical to
//! a sequential run by construction. The trailing partial block is
//! discarded and counted, as in the sequential path.

use anyhow::Result;
use pqn_core::bits::BitBlock;
use pqn_core::extractor::{StreamStats, ToeplitzExtractor, ToeplitzSeed};

/// Worker count from `--workers`, the `PQN_WORKERS` environment variable,
/// or the machine's parallelism, in that order.
pub fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("PQN_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
    .max(1)
}

/// Extract every whole block of `input` with `workers` threads.
pub fn extract_parallel(
    seed: &ToeplitzSeed,
    input: &BitBlock,
    workers: usize,
) -> Result<(BitBlock, StreamStats)> {
    let n = seed.n_in();
    let total_blocks = input.len() / n;
    let engine = ToeplitzExtractor::new(seed);

    // Fall back to one thread for tiny inputs or byte-unaligned geometry
    // (the parallel split slices the packed bytes at block boundaries).
    let workers = if n % 8 != 0 || total_blocks < 2 * workers {
        1
    } else {
        workers.min(total_blocks.max(1))
    };

    let out = if workers <= 1 {
        engine.extract_whole_blocks(input).0
    } else {
        let block_bytes = n / 8;
        let per = total_blocks.div_ceil(workers);
        let bytes = input.as_bytes();
        let mut chunks: Vec<BitBlock> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let lo = w * per;
                let hi = ((w + 1) * per).min(total_blocks);
                if lo >= hi {
                    break;
                }
                let engine = &engine;
                let slice = &bytes[lo * block_bytes..hi * block_bytes];
                handles.push(scope.spawn(move || {
                    let bits = BitBlock::from_bytes(slice.to_vec());
                    engine.extract_whole_blocks(&bits).0
                }));
            }
            for h in handles {
                chunks.push(h.join().expect("extract worker panicked"));
            }
        });
        let mut merged = BitBlock::with_capacity(total_blocks * seed.m_out());
        for c in &chunks {
            merged.append(c);
        }
        merged
    };

    let used = total_blocks * n;
    Ok((
        out,
        StreamStats {
            whole_blocks: total_blocks,
            input_bits_used: used,
            tail_bits_discarded: input.len() - used,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pqn_core::rng::{self, RngCore};

    #[test]
    fn parallel_output_matches_sequential() {
        let seed = ToeplitzSeed::from_rng(256, 128, 7).unwrap();
        let mut rng = rng::from_seed(123);
        let mut bytes = vec![0u8; 256 / 8 * 101 + 5];
        rng.fill_bytes(&mut bytes);
        let input = BitBlock::from_bytes(bytes);

        let (seq, seq_stats) = extract_parallel(&seed, &input, 1).unwrap();
        for workers in [2, 3, 4, 7] {
            let (par, par_stats) = extract_parallel(&seed, &input, workers).unwrap();
            assert_eq!(seq, par, "workers = {workers}");
            assert_eq!(seq_stats, par_stats);
        }
        assert_eq!(seq_stats.whole_blocks, 101);
        assert_eq!(seq_stats.tail_bits_discarded, 40);
    }

    #[test]
    fn worker_count_resolution() {
        assert_eq!(worker_count(Some(3)), 3);
        assert!(worker_count(None) >= 1);
    }
}
