//! Deterministic fan-out for trial campaigns.
//!
//! Trials are split into fixed-size chunks; worker threads claim chunks
//! from a shared counter, and chunk summaries are merged in chunk order.
//! Because every trial draws from its own RNG substream and merging is
//! order-canonical, the thread count never changes a campaign's result —
//! it only changes the wall clock.

use std::sync::atomic::{AtomicU64, Ordering};

/// Trials per work unit. Small enough to balance load, large enough to
/// amortize the claim.
pub(crate) const CHUNK: u64 = 1024;

/// Worker threads to use: the `QSEAL_THREADS` environment variable when
/// set (minimum 1), otherwise the machine's available parallelism.
pub(crate) fn thread_count() -> usize {
    if let Ok(text) = std::env::var("QSEAL_THREADS") {
        if let Ok(n) = text.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Run `trials` trials through `worker`, which evaluates one contiguous
/// trial range into a summary; summaries are merged in chunk order via
/// `merge`. `worker` receives `(first_trial, last_trial_exclusive)`.
pub(crate) fn parallel_trials<S, W, M>(trials: u64, worker: W, mut merge: M) -> S
where
    S: Send + Default,
    W: Fn(u64, u64) -> S + Sync,
    M: FnMut(S, S) -> S,
{
    let chunk_count = trials.div_ceil(CHUNK);
    let threads = thread_count().min(chunk_count.max(1) as usize);
    if threads <= 1 || chunk_count <= 1 {
        // Same chunk structure as the threaded path, so the merged result
        // is identical by construction.
        let mut acc = S::default();
        for c in 0..chunk_count {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(trials);
            acc = merge(acc, worker(start, end));
        }
        return acc;
    }
    let mut slots: Vec<Option<S>> = Vec::with_capacity(chunk_count as usize);
    slots.resize_with(chunk_count as usize, || None);
    let next = AtomicU64::new(0);
    let slot_refs: Vec<std::sync::Mutex<&mut Option<S>>> =
        slots.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= chunk_count {
                    break;
                }
                let start = c * CHUNK;
                let end = (start + CHUNK).min(trials);
                let summary = worker(start, end);
                **slot_refs[c as usize].lock().expect("chunk slot") = Some(summary);
            });
        }
    });
    drop(slot_refs);
    let mut acc = S::default();
    for slot in slots {
        acc = merge(acc, slot.expect("every chunk completed"));
    }
    acc
}
