use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{sup_norm, Vector};

/// Finite integer interval `[lo, hi]` standing in for ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    pub lo: i64,
    pub hi: i64,
}

impl TimeWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty window [{lo}, {hi}]")));
        }
        Ok(TimeWindow { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: i64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn contains_window(&self, other: &TimeWindow) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn shifted(&self, k: i64) -> TimeWindow {
        TimeWindow { lo: self.lo + k, hi: self.hi + k }
    }
}

/// A vector-valued sequence sampled on a [`TimeWindow`].
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceWindow {
    window: TimeWindow,
    values: Vec<Vector>,
}

impl SequenceWindow {
    pub fn new(window: TimeWindow, values: Vec<Vector>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::Domain(format!(
                "window [{}, {}] needs {} samples, got {}",
                window.lo,
                window.hi,
                window.len(),
                values.len()
            )));
        }
        if let Some(first) = values.first() {
            let n = first.len();
            if values.iter().any(|v| v.len() != n) {
                return Err(Error::Domain("samples have inconsistent dimensions".into()));
            }
        }
        Ok(SequenceWindow { window, values })
    }

    pub fn from_fn(window: TimeWindow, f: impl FnMut(i64) -> Vector) -> Self {
        let values = window.iter().map(f).collect();
        SequenceWindow { window, values }
    }

    pub fn constant(window: TimeWindow, value: Vector) -> Self {
        Self::from_fn(window, |_| value.clone())
    }

    pub fn zeros(window: TimeWindow, dim: usize) -> Self {
        Self::constant(window, Vector::zeros(dim))
    }

    /// Scalar sequence from plain samples.
    pub fn scalar(window: TimeWindow, samples: &[f64]) -> Result<Self> {
        Self::new(window, samples.iter().map(|&v| Vector::from_element(1, v)).collect())
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |v| v.len())
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn get(&self, t: i64) -> Result<&Vector> {
        if self.window.contains(t) {
            Ok(&self.values[(t - self.window.lo) as usize])
        } else {
            Err(Error::MissingIndex { index: t, lo: self.window.lo, hi: self.window.hi })
        }
    }

    pub fn get_mut(&mut self, t: i64) -> Result<&mut Vector> {
        if self.window.contains(t) {
            Ok(&mut self.values[(t - self.window.lo) as usize])
        } else {
            Err(Error::MissingIndex { index: t, lo: self.window.lo, hi: self.window.hi })
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Vector)> {
        self.window.iter().zip(self.values.iter())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(sup_norm).fold(0.0, f64::max)
    }

    /// Sup-distance to `other` over the common part of both windows.
    pub fn sup_distance(&self, other: &SequenceWindow) -> f64 {
        let lo = self.window.lo.max(other.window.lo);
        let hi = self.window.hi.min(other.window.hi);
        (lo..=hi)
            .map(|t| sup_norm(&(self.get(t).unwrap() - other.get(t).unwrap())))
            .fold(0.0, f64::max)
    }

    pub fn restrict(&self, window: TimeWindow) -> Result<SequenceWindow> {
        if !self.window.contains_window(&window) {
            let missing = if window.lo < self.window.lo { window.lo } else { window.hi };
            return Err(Error::MissingIndex {
                index: missing,
                lo: self.window.lo,
                hi: self.window.hi,
            });
        }
        let start = (window.lo - self.window.lo) as usize;
        Ok(SequenceWindow {
            window,
            values: self.values[start..start + window.len()].to_vec(),
        })
    }

    /// `t ↦ self(t + k)`, re-indexed onto the window shifted by `-k`.
    pub fn shifted(&self, k: i64) -> SequenceWindow {
        SequenceWindow { window: self.window.shifted(-k), values: self.values.clone() }
    }

    /// `t ↦ self(-t)`.
    pub fn reflected(&self) -> SequenceWindow {
        let window = TimeWindow { lo: -self.window.hi, hi: -self.window.lo };
        let values = self.values.iter().rev().cloned().collect();
        SequenceWindow { window, values }
    }

    pub fn map(&self, f: impl Fn(i64, &Vector) -> Vector) -> SequenceWindow {
        let values = self.iter().map(|(t, v)| f(t, v)).collect();
        SequenceWindow { window: self.window, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_must_match_window() {
        let w = TimeWindow::new(-2, 2).unwrap();
        assert_eq!(w.len(), 5);
        assert!(SequenceWindow::scalar(w, &[1.0, 2.0]).is_err());
        assert!(TimeWindow::new(3, 2).is_err());
    }

    #[test]
    fn missing_index_is_named() {
        let w = TimeWindow::new(0, 3).unwrap();
        let x = SequenceWindow::zeros(w, 2);
        assert_eq!(x.get(4).unwrap_err(), Error::MissingIndex { index: 4, lo: 0, hi: 3 });
    }

    #[test]
    fn shift_and_reflect_reindex() {
        let w = TimeWindow::new(0, 4).unwrap();
        let x = SequenceWindow::scalar(w, &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = x.shifted(2);
        assert_eq!(s.window(), TimeWindow { lo: -2, hi: 2 });
        assert_eq!(s.get(0).unwrap()[0], 2.0);
        let r = x.reflected();
        assert_eq!(r.get(-3).unwrap()[0], 3.0);
        assert_eq!(x.sup_norm(), 4.0);
    }
}
