//! Execution strategy for nodewise loops.
//!
//! Every heavy loop in the crate evaluates one output node (or one family
//! member) per index with no shared state, so the same closure runs under
//! either strategy and produces bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f(0), …, f(n-1)` and collects the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    pub fn for_each_mut<T, F>(self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter_mut().enumerate().for_each(|(i, x)| f(i, x)),
            #[cfg(feature = "parallel")]
            Exec::Parallel => items
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, x)| f(i, x)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Exec::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Exec::Parallel => "parallel",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let seq = Exec::Sequential.map(1000, f);
        let def = Exec::default().map(1000, f);
        assert_eq!(seq, def);
    }

    #[test]
    fn for_each_mut_visits_in_place() {
        let mut v = vec![0usize; 17];
        Exec::default().for_each_mut(&mut v, |i, x| *x = 2 * i);
        assert_eq!(v[16], 32);
    }
}
