use crate::error::{Error, Result};
use crate::grad_stats::EmaSmoother;
use crate::scalar::Scalar;

use super::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMode {
    /// EMA of `f_k`; an element is switched off for good once it drops below the threshold.
    Greedy,
    /// EMA `c_k` of `1 − f_k`; an element learns while `c_k ≤ 0` and may switch back on.
    NonGreedy,
}

pub const DEFAULT_GREEDY_THRESHOLD: f64 = 1.0;
/// Warm-up value of the greedy `f`-EMA.
pub const DEFAULT_GREEDY_INIT: f64 = 10.0;
/// Warm-up value of the non-greedy `c`-EMA (`1 − 10`).
pub const DEFAULT_NONGREEDY_INIT: f64 = -9.0;

/// Per-parameter learning switches driven by smoothed signal-to-noise fractions.
#[derive(Debug, Clone)]
pub struct ElementMask<T> {
    mode: MaskMode,
    active: Vec<bool>,
    smoother: EmaSmoother<T>,
    scratch: Vec<T>,
}

impl<T: Scalar> ElementMask<T> {
    pub fn greedy(dim: usize, beta: T, init: T) -> Result<Self> {
        Self::build(MaskMode::Greedy, dim, beta, init)
    }

    pub fn nongreedy(dim: usize, beta: T, init: T) -> Result<Self> {
        Self::build(MaskMode::NonGreedy, dim, beta, init)
    }

    fn build(mode: MaskMode, dim: usize, beta: T, init: T) -> Result<Self> {
        let smoother = EmaSmoother::new(dim, beta, init)?;
        let active = match mode {
            MaskMode::Greedy => vec![true; dim],
            MaskMode::NonGreedy => vec![init <= T::zero(); dim],
        };
        Ok(ElementMask {
            mode,
            active,
            smoother,
            scratch: Vec::with_capacity(dim),
        })
    }

    pub fn mode(&self) -> MaskMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn smoothed(&self) -> &[T] {
        self.smoother.value()
    }

    fn check(&self, f: &[T]) -> Result<()> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: f.len(),
            });
        }
        Ok(())
    }

    /// Greedy rule: smooth `f`, then switch off every element whose smoothed
    /// fraction is below `threshold`. Switched-off elements stay off.
    pub fn greedy_update(&mut self, f: &[T], threshold: T) -> Result<()> {
        self.check(f)?;
        if self.mode != MaskMode::Greedy {
            return Err(Error::invalid("greedy update on a non-greedy mask"));
        }
        self.smoother.update(f)?;
        for (a, &s) in self.active.iter_mut().zip(self.smoother.value()) {
            if s < threshold {
                *a = false;
            }
        }
        Ok(())
    }

    /// Non-greedy rule: `c ← β·c + (1−β)·(1 − f)`, active iff `c ≤ 0`.
    pub fn nongreedy_update(&mut self, f: &[T]) -> Result<()> {
        self.check(f)?;
        if self.mode != MaskMode::NonGreedy {
            return Err(Error::invalid("non-greedy update on a greedy mask"));
        }
        self.scratch.clear();
        self.scratch.extend(f.iter().map(|&x| T::one() - x));
        self.smoother.update(&self.scratch)?;
        for (a, &c) in self.active.iter_mut().zip(self.smoother.value()) {
            *a = c <= T::zero();
        }
        Ok(())
    }

    /// Fraction of switched-off elements.
    pub fn off_fraction(&self) -> f64 {
        off_count(&self.active, 0..self.dim()) as f64 / self.dim().max(1) as f64
    }

    pub fn off_fraction_by_group(&self, partition: &Partition) -> Result<Vec<f64>> {
        partition.check_dim(self.dim())?;
        Ok(partition
            .groups()
            .iter()
            .map(|g| off_count(&self.active, g.iter().copied()) as f64 / g.len() as f64)
            .collect())
    }
}

fn off_count(active: &[bool], idx: impl Iterator<Item = usize>) -> usize {
    idx.filter(|&k| !active[k]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_deactivates_after_warmup() {
        let mut m = ElementMask::greedy(2, 0.9, 10.0).unwrap();
        let mut steps = 0;
        while m.active()[0] {
            m.greedy_update(&[0.0, 5.0], 1.0).unwrap();
            steps += 1;
        }
        // 10·0.9ᵗ < 1 first at t = 22
        assert_eq!(steps, 22);
        assert!(m.active()[1]);
    }

    #[test]
    fn greedy_is_monotone() {
        let mut m = ElementMask::greedy(1, 0.0, 10.0).unwrap();
        m.greedy_update(&[0.1], 1.0).unwrap();
        assert!(!m.active()[0]);
        m.greedy_update(&[100.0], 1.0).unwrap();
        assert!(!m.active()[0]);
    }

    #[test]
    fn nongreedy_toggles_back_on() {
        let mut m = ElementMask::nongreedy(1, 0.5, -9.0).unwrap();
        assert!(m.active()[0]);
        while m.active()[0] {
            m.nongreedy_update(&[0.0]).unwrap();
        }
        let mut back = 0;
        while !m.active()[0] {
            m.nongreedy_update(&[50.0]).unwrap();
            back += 1;
        }
        assert!(back >= 1);
        assert!(m.smoothed()[0] <= 0.0);
    }

    #[test]
    fn off_fraction_counts() {
        let mut m = ElementMask::greedy(4, 0.0, 10.0).unwrap();
        assert_eq!(m.off_fraction(), 0.0);
        m.greedy_update(&[0.0, 0.0, 0.0, 2.0], 1.0).unwrap();
        assert_eq!(m.off_fraction(), 0.75);
        m.greedy_update(&[0.0; 4], 1.0).unwrap();
        assert_eq!(m.off_fraction(), 1.0);
        let p = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(m.off_fraction_by_group(&p).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn wrong_mode_rejected() {
        let mut g = ElementMask::greedy(1, 0.5, 10.0).unwrap();
        assert!(g.nongreedy_update(&[0.0]).is_err());
        let mut n = ElementMask::nongreedy(1, 0.5, -9.0).unwrap();
        assert!(n.greedy_update(&[0.0], 1.0).is_err());
        assert!(n.nongreedy_update(&[0.0, 1.0]).is_err());
    }
}
