//! Dense vector arithmetic and the sliding window of recent squared step
//! norms that every communication rule compares against.
//!
//! All operations reject NaN/infinity instead of letting it propagate, and
//! mixed-length arithmetic is an error: vector length is fixed per
//! experiment.

use std::collections::VecDeque;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense parameter-shaped vector: houses the model itself, gradients,
/// moments, and gradient innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector<R: Real> {
    values: Vec<R>,
}

fn ensure_finite<R: Real>(values: &[R], context: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

impl<R: Real> ParamVector<R> {
    /// Zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        ParamVector {
            values: vec![R::zero(); len],
        }
    }

    /// Wrap a vector of entries, rejecting non-finite values.
    pub fn from_vec(values: Vec<R>) -> Result<Self> {
        ensure_finite(&values, "ParamVector::from_vec")?;
        Ok(ParamVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[R] {
        &self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, R> {
        self.values.iter()
    }

    fn check_len(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what,
                expected: self.len(),
                got: other.len(),
            })
        }
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "ParamVector::add")?;
        let values: Vec<R> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + b)
            .collect();
        ensure_finite(&values, "ParamVector::add")?;
        Ok(ParamVector { values })
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "ParamVector::sub")?;
        let values: Vec<R> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a - b)
            .collect();
        ensure_finite(&values, "ParamVector::sub")?;
        Ok(ParamVector { values })
    }

    /// Scalar multiple `c * self`.
    pub fn scale(&self, c: R) -> Result<Self> {
        let values: Vec<R> = self.values.iter().map(|&a| a * c).collect();
        ensure_finite(&values, "ParamVector::scale")?;
        Ok(ParamVector { values })
    }

    /// In-place `self += c * other`; used for the server's running aggregate.
    pub fn add_assign_scaled(&mut self, other: &Self, c: R) -> Result<()> {
        self.check_len(other, "ParamVector::add_assign_scaled")?;
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a = *a + c * b;
        }
        ensure_finite(&self.values, "ParamVector::add_assign_scaled")
    }

    /// Squared Euclidean norm; exactly zero iff the vector is zero.
    pub fn squared_norm(&self) -> Result<R> {
        let sum = self.values.iter().fold(R::zero(), |acc, &v| acc + v * v);
        if sum.is_finite() {
            Ok(sum)
        } else {
            Err(Error::NonFinite {
                context: "ParamVector::squared_norm",
            })
        }
    }

    /// Largest absolute entrywise difference, for trajectory comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> Result<R> {
        self.check_len(other, "ParamVector::max_abs_diff")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(R::zero(), |acc, (&a, &b)| acc.max((a - b).abs())))
    }

    /// Entrywise mean of a non-empty set of same-length vectors.
    pub fn mean(vectors: &[Self]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("mean of zero vectors".into()))?;
        let mut acc = ParamVector::zeros(first.len());
        for v in vectors {
            acc.add_assign_scaled(v, R::one())?;
        }
        acc.scale(R::one() / crate::scalar::real(vectors.len() as f64))
    }
}

impl<R: Real> Index<usize> for ParamVector<R> {
    type Output = R;

    fn index(&self, index: usize) -> &R {
        &self.values[index]
    }
}

/// Fixed-capacity window of the most recent squared parameter step norms,
/// newest first. Rounds before the experiment start count as zero steps,
/// so a partially filled window simply sums fewer entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StepNormWindow<R: Real> {
    capacity: usize,
    entries: VecDeque<R>,
}

impl<R: Real> StepNormWindow<R> {
    /// Window holding at most `capacity` entries; `capacity >= 1`.
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument(
                "step-norm window capacity must be at least 1".into(),
            ));
        }
        Ok(StepNormWindow {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Push the newest squared step norm, evicting the oldest entry once at
    /// capacity. Negative or non-finite inputs are contract errors.
    pub fn record(&mut self, sq_norm: R) -> Result<()> {
        if !sq_norm.is_finite() {
            return Err(Error::NonFinite {
                context: "StepNormWindow::record",
            });
        }
        if sq_norm < R::zero() {
            return Err(Error::InvalidArgument(format!(
                "squared step norm must be non-negative, got {sq_norm}"
            )));
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_back();
        }
        self.entries.push_front(sq_norm);
        Ok(())
    }

    /// Sum of the stored entries, newest first.
    pub fn sum(&self) -> R {
        self.entries.iter().fold(R::zero(), |acc, &v| acc + v)
    }

    /// Stored entries, newest first.
    pub fn iter(&self) -> impl Iterator<Item = &R> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn squared_norm_pythagorean() {
        let v = ParamVector::from_vec(vec![3.0_f64, 4.0]).unwrap();
        assert_eq!(v.squared_norm().unwrap(), 25.0);
    }

    #[test]
    fn squared_norm_zero_vector() {
        let v: ParamVector<f64> = ParamVector::zeros(3);
        assert_eq!(v.squared_norm().unwrap(), 0.0);
    }

    #[test]
    fn squared_norm_small_entries() {
        // 0.1^2 + 0.2^2 + 0.2^2 = 0.09
        let v = ParamVector::from_vec(vec![0.1_f64, -0.2, 0.2]).unwrap();
        let got = v.squared_norm().unwrap();
        assert!((got - 0.09).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn squared_norm_overflow_is_error() {
        let v = ParamVector::from_vec(vec![1e200_f64, 1e200]).unwrap();
        assert!(matches!(
            v.squared_norm(),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn from_vec_rejects_nan_and_inf() {
        assert!(ParamVector::from_vec(vec![0.0_f64, f64::NAN]).is_err());
        assert!(ParamVector::from_vec(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn mixed_length_arithmetic_rejected() {
        let a = ParamVector::from_vec(vec![1.0_f64, 2.0]).unwrap();
        let b = ParamVector::from_vec(vec![1.0_f64]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.sub(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn window_record_and_evict() {
        let mut w = StepNormWindow::new(2).unwrap();
        w.record(0.01_f64).unwrap();
        w.record(0.03).unwrap();
        let entries: Vec<f64> = w.iter().copied().collect();
        assert_eq!(entries, vec![0.03, 0.01]);
        assert!((w.sum() - 0.04).abs() < 1e-15);

        let mut w1 = StepNormWindow::new(1).unwrap();
        w1.record(0.5_f64).unwrap();
        w1.record(0.2).unwrap();
        assert_eq!(w1.len(), 1);
        assert_eq!(w1.sum(), 0.2);
    }

    #[test]
    fn window_zero_step() {
        let mut w = StepNormWindow::new(3).unwrap();
        w.record(0.0_f64).unwrap();
        assert_eq!(w.sum(), 0.0);
    }

    #[test]
    fn window_rejects_negative() {
        let mut w = StepNormWindow::new(3).unwrap();
        assert!(w.record(-1.0_f64).is_err());
    }

    #[test]
    fn f32_instantiation_works() {
        let v = ParamVector::from_vec(vec![3.0_f32, 4.0]).unwrap();
        assert_eq!(v.squared_norm().unwrap(), 25.0_f32);
    }

    proptest! {
        // Window sum must match a brute-force sum over the full history.
        #[test]
        fn window_sum_matches_history(
            capacity in 1usize..12,
            values in proptest::collection::vec(0.0_f64..10.0, 0..64),
        ) {
            let mut w = StepNormWindow::new(capacity).unwrap();
            for &v in &values {
                w.record(v).unwrap();
            }
            let tail = values.len().saturating_sub(capacity);
            // Same newest-first order as the window's own accumulation.
            let expected: f64 = values[tail..].iter().rev().sum();
            prop_assert_eq!(w.sum(), expected);
        }

        // ||c*v||^2 = c^2 ||v||^2 to 1e-12 relative.
        #[test]
        fn squared_norm_scaling(
            values in proptest::collection::vec(-100.0_f64..100.0, 1..32),
            c in -8.0_f64..8.0,
        ) {
            let v = ParamVector::from_vec(values).unwrap();
            let lhs = v.scale(c).unwrap().squared_norm().unwrap();
            let rhs = c * c * v.squared_norm().unwrap();
            let denom = rhs.abs().max(1e-300);
            prop_assert!((lhs - rhs).abs() / denom < 1e-12 || (lhs - rhs).abs() < 1e-300);
        }
    }
}
