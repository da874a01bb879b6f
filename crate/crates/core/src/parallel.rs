//! Data-parallel map over independent work items.
//!
//! Fold evaluations, grid points and forward-selection steps are independent
//! of each other. They run on rayon when the `parallel` feature is enabled and
//! sequentially otherwise. Output order always matches input order, so serial
//! and parallel runs produce identical results.

/// Worker count for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Jobs {
    /// Run on the calling thread.
    Serial,
    /// Use rayon's global pool (all cores).
    #[default]
    Auto,
    /// Use a dedicated pool with this many threads.
    Threads(usize),
}

impl Jobs {
    /// `0` means all cores, `1` means serial.
    pub fn from_count(count: usize) -> Self {
        match count {
            0 => Jobs::Auto,
            1 => Jobs::Serial,
            n => Jobs::Threads(n),
        }
    }

    pub fn is_serial(self) -> bool {
        !cfg!(feature = "parallel") || self == Jobs::Serial
    }
}

/// Maps `f` over `items`, preserving order.
pub fn par_map<T, R, F>(items: Vec<T>, jobs: Jobs, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match jobs {
            Jobs::Serial => items.into_iter().map(f).collect(),
            Jobs::Auto => items.into_par_iter().map(f).collect(),
            // Nested calls reuse the pool they already run on.
            Jobs::Threads(_) if rayon::current_thread_index().is_some() => {
                items.into_par_iter().map(f).collect()
            }
            Jobs::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| items.into_par_iter().map(&f).collect()),
                Err(err) => {
                    log::warn!("falling back to global pool: {err}");
                    items.into_par_iter().map(f).collect()
                }
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        items.into_iter().map(f).collect()
    }
}

/// Fallible variant of [`par_map`]; returns the first error in input order.
pub fn try_par_map<T, R, E, F>(items: Vec<T>, jobs: Jobs, f: F) -> Result<Vec<R>, E>
where
    T: Send,
    R: Send,
    E: Send,
    F: Fn(T) -> Result<R, E> + Sync + Send,
{
    par_map(items, jobs, f).into_iter().collect()
}
