//! Sequential / parallel execution of independent indexed jobs.

/// How independent jobs are scheduled.
///
/// Every job receives its index and derives its own RNG stream from it, so
/// output never depends on the choice made here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Runs on the current rayon pool. Falls back to sequential when the crate
    /// is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `job(i)` for `i in 0..n` and returns results in index order.
    pub fn map_indexed<T, F>(self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(job).collect(),
            Execution::Parallel => parallel_map(n, job),
        }
    }

    /// Like [`map_indexed`](Self::map_indexed) but each worker gets a scratch
    /// value built by `init`, reused across the jobs that worker runs.
    pub fn map_indexed_init<S, T, I, F>(self, n: usize, init: I, job: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => {
                let mut scratch = init();
                (0..n).map(|i| job(&mut scratch, i)).collect()
            }
            Execution::Parallel => parallel_map_init(n, init, job),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(job).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(job).collect()
}

#[cfg(feature = "parallel")]
fn parallel_map_init<S, T, I, F>(n: usize, init: I, job: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map_init(init, job).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map_init<S, T, I, F>(n: usize, init: I, job: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    let mut scratch = init();
    (0..n).map(|i| job(&mut scratch, i)).collect()
}
