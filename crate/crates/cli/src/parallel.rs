//! Multi-threaded drivers over the core's range-addressed counters.
//!
//! The trial range is cut into one contiguous chunk per worker and the
//! integer counts are summed, so the result is the same for any worker count.

use std::ops::Range;
use std::thread;

use mfsec_core::montecarlo::{count_outages, count_paired, McConfig, PairedEstimate, SchemeCounts};
use mfsec_core::protocol::{tally_trials, ProtocolConfig, ProtocolTally};
use mfsec_core::{OutageEstimate, SnrProfile, TargetRate};

/// `0` means one worker per available core.
pub fn worker_count(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

fn chunks(n: u64, workers: usize) -> Vec<Range<u64>> {
    let w = (workers as u64).clamp(1, n.max(1));
    let base = n / w;
    let extra = n % w;
    let mut start = 0;
    (0..w)
        .map(|i| {
            let len = base + u64::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

fn map_reduce<T, F>(n: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let ranges = chunks(n, worker_count(workers));
    if ranges.len() == 1 {
        return ranges.into_iter().map(&f).collect();
    }
    thread::scope(|s| {
        let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(|| f(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn estimate_outage(cfg: &McConfig, workers: usize) -> mfsec_core::Result<OutageEstimate> {
    cfg.validate()?;
    let outages: u64 = map_reduce(cfg.n_trials, workers, |r| count_outages(cfg, r)).into_iter().sum();
    OutageEstimate::from_count(outages, cfg.n_trials, cfg.seed)
}

pub fn estimate_paired(
    profile: &SnrProfile,
    rate: TargetRate,
    n_trials: u64,
    seed: u64,
    workers: usize,
) -> mfsec_core::Result<PairedEstimate> {
    profile.validate()?;
    let counts = map_reduce(n_trials, workers, |r| count_paired(profile, rate, seed, r))
        .into_iter()
        .fold(SchemeCounts::default(), |a, b| a + b);
    PairedEstimate::from_counts(&counts, n_trials, seed)
}

pub fn tally_protocol(
    profile: &SnrProfile,
    cfg: &ProtocolConfig,
    seed: u64,
    trials: u64,
    workers: usize,
) -> mfsec_core::Result<ProtocolTally> {
    map_reduce(trials, workers, |r| tally_trials(profile, cfg, seed, r))
        .into_iter()
        .try_fold(ProtocolTally::default(), |acc, t| t.map(|t| acc + t))
}

/// Runs `f` over `items` on up to `workers` threads, preserving order.
pub fn map_ordered<I, T, F>(items: &[I], workers: usize, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync,
{
    let per_chunk = items.len().div_ceil(worker_count(workers)).max(1);
    if per_chunk >= items.len() {
        return items.iter().map(&f).collect();
    }
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(per_chunk)
            .map(|chunk| {
                let f = &f;
                s.spawn(move || chunk.iter().map(f).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
