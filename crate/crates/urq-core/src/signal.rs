//! Real-valued signal vectors.

use crate::error::{Error, Result};

/// A K-dimensional real signal, the object being acquired.
///
/// Entries are finite and the length is at least one. Model-constrained
/// experiments additionally keep `norm() <= 1`, but that is a property of
/// the signal set, not of the type.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    /// Wrap a vector of finite values; errors on an empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::parameter("signal must have at least one entry"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("signal entries must be finite"));
        }
        Ok(Signal { values })
    }

    /// The zero signal of dimension `dim`.
    pub fn zeros(dim: usize) -> Result<Self> {
        Signal::new(vec![0.0; dim])
    }

    /// `scale` times the `axis`-th standard basis vector in dimension `dim`.
    pub fn scaled_basis(dim: usize, axis: usize, scale: f64) -> Result<Self> {
        if axis >= dim {
            return Err(Error::parameter(format!(
                "basis axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut values = vec![0.0; dim];
        values[axis] = scale;
        Signal::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Euclidean distance to another signal of the same dimension.
    pub fn distance_to(&self, other: &Signal) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::dimension(format!(
                "signal lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

impl AsRef<[f64]> for Signal {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Signal::new(vec![]).is_err());
        assert!(Signal::new(vec![1.0, f64::NAN]).is_err());
        assert!(Signal::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_and_distance() {
        let a = Signal::new(vec![3.0, 4.0]).unwrap();
        let b = Signal::zeros(2).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.distance_to(&b).unwrap(), 5.0);
        let c = Signal::zeros(3).unwrap();
        assert!(a.distance_to(&c).is_err());
    }
}
