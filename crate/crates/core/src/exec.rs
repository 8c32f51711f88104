//! Sequential / parallel dispatch for the data-parallel loops.

use num_complex::Complex64;

/// How a data-parallel loop is executed.
///
/// `Parallel` silently degrades to `Sequential` when the crate is built without the
/// `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps every item to a complex vector of length `len` and sums the results.
pub(crate) fn sum_vectors<T, F>(exec: Execution, items: &[T], len: usize, f: F) -> Vec<Complex64>
where
    T: Sync,
    F: Fn(&T) -> Vec<Complex64> + Sync + Send,
{
    let add = |mut acc: Vec<Complex64>, v: Vec<Complex64>| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
        acc
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .map(&f)
            .reduce(|| vec![Complex64::new(0.0, 0.0); len], add);
    }
    let _ = exec;
    items
        .iter()
        .map(&f)
        .fold(vec![Complex64::new(0.0, 0.0); len], add)
}
