//! Worker pool shared by the enumeration and annealing code. Thread count
//! comes from `CUTSPEC_THREADS` (0 or unset means automatic). All parallel
//! reductions in this crate are written to give thread-count-independent
//! results.

use std::sync::OnceLock;

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

pub fn configured_threads() -> usize {
    match std::env::var("CUTSPEC_THREADS") {
        Ok(v) => v.trim().parse::<usize>().unwrap_or(0),
        Err(_) => 0,
    }
}

pub fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        let t = configured_threads();
        if t > 0 {
            b = b.num_threads(t);
        }
        b.build().expect("thread pool construction")
    })
}

/// Run `f` inside the crate pool so nested rayon calls use it.
pub fn run<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    pool().install(f)
}

/// Split `total` items into chunk ranges whose boundaries are multiples of
/// `align` (except the final end). State refreshes are pinned to the same
/// grid, so chunked and serial walks compute identical floating-point
/// values.
pub fn aligned_chunks(total: u64, align: u64, want: usize) -> Vec<(u64, u64)> {
    assert!(align.is_power_of_two());
    if total == 0 {
        return Vec::new();
    }
    let want = want.max(1) as u64;
    let raw = total.div_ceil(want);
    let size = raw.div_ceil(align) * align;
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < total {
        let hi = (lo + size).min(total);
        out.push((lo, hi));
        lo = hi;
    }
    out
}
