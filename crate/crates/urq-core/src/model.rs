//! Declarative signal-set models and samplers.

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// An orthonormal basis of a `dim`-dimensional subspace of an
/// `ambient`-dimensional space, stored as `dim` columns of length `ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    ambient: usize,
    dim: usize,
    columns: Vec<f64>, // column-major ambient x dim
}

impl SubspaceBasis {
    pub fn new(ambient: usize, dim: usize, columns: Vec<f64>) -> Result<Self> {
        if dim == 0 || ambient == 0 || dim > ambient {
            return Err(Error::parameter(format!(
                "need 1 <= dim <= ambient, got dim={dim}, ambient={ambient}"
            )));
        }
        if columns.len() != ambient * dim {
            return Err(Error::dimension(format!(
                "expected {} basis entries, got {}",
                ambient * dim,
                columns.len()
            )));
        }
        let basis = SubspaceBasis { ambient, dim, columns };
        for i in 0..dim {
            for j in i..dim {
                let dot: f64 = basis
                    .column(i)
                    .iter()
                    .zip(basis.column(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-8 {
                    return Err(Error::parameter(format!(
                        "basis columns {i},{j} not orthonormal (dot = {dot})"
                    )));
                }
            }
        }
        Ok(basis)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.ambient..(j + 1) * self.ambient]
    }

    /// Map subspace coefficients to an ambient vector.
    pub fn lift(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.dim {
            return Err(Error::dimension(format!(
                "expected {} coefficients, got {}",
                self.dim,
                coeffs.len()
            )));
        }
        let mut out = vec![0.0; self.ambient];
        for (j, c) in coeffs.iter().enumerate() {
            for (o, b) in out.iter_mut().zip(self.column(j)) {
                *o += c * b;
            }
        }
        Ok(out)
    }

    /// Random orthonormal basis from Gaussian columns and Gram-Schmidt.
    pub fn random(ambient: usize, dim: usize, rng: &mut ChaCha12Rng) -> Result<Self> {
        if dim == 0 || ambient == 0 || dim > ambient {
            return Err(Error::parameter(format!(
                "need 1 <= dim <= ambient, got dim={dim}, ambient={ambient}"
            )));
        }
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(dim);
        while columns.len() < dim {
            let mut v: Vec<f64> = (0..ambient).map(|_| rng.sample(StandardNormal)).collect();
            for c in &columns {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= dot * ci;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-9 {
                continue; // essentially never: redraw a degenerate column
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            columns.push(v);
        }
        let flat: Vec<f64> = columns.into_iter().flatten().collect();
        SubspaceBasis::new(ambient, dim, flat)
    }
}

/// Declarative description of the signal set being acquired.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalModel {
    /// `{ x in R^dim : ||x|| <= 1 }`.
    UnitBall { dim: usize },
    /// Vectors in `R^ambient` with at most `sparsity` nonzeros and norm <= 1.
    Sparse { ambient: usize, sparsity: usize },
    /// Union of `count` subspaces of dimension `dim` in `R^ambient`,
    /// intersected with the unit ball. `bases` may be empty when the model is
    /// used only for rate planning; sampling then reports an error.
    UnionOfSubspaces {
        ambient: usize,
        dim: usize,
        count: usize,
        bases: Vec<SubspaceBasis>,
    },
    /// The ball of radius `radius` around a known signal.
    SimilarSignal { center: Signal, radius: f64 },
}

impl SignalModel {
    pub fn unit_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::parameter("dimension must be at least 1"));
        }
        Ok(SignalModel::UnitBall { dim })
    }

    pub fn sparse(ambient: usize, sparsity: usize) -> Result<Self> {
        if sparsity == 0 || sparsity > ambient {
            return Err(Error::parameter(format!(
                "need 1 <= sparsity <= ambient, got sparsity={sparsity}, ambient={ambient}"
            )));
        }
        Ok(SignalModel::Sparse { ambient, sparsity })
    }

    /// A union model described only by its subspace count, for planning.
    pub fn union_described(ambient: usize, dim: usize, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::parameter("subspace count must be at least 1"));
        }
        if dim == 0 || dim > ambient {
            return Err(Error::parameter(format!(
                "need 1 <= dim <= ambient, got dim={dim}, ambient={ambient}"
            )));
        }
        Ok(SignalModel::UnionOfSubspaces { ambient, dim, count, bases: Vec::new() })
    }

    /// A union model with explicit orthonormal bases.
    pub fn union_with_bases(bases: Vec<SubspaceBasis>) -> Result<Self> {
        let first = bases
            .first()
            .ok_or_else(|| Error::parameter("need at least one subspace"))?;
        let (ambient, dim) = (first.ambient(), first.dim());
        if bases.iter().any(|b| b.ambient() != ambient || b.dim() != dim) {
            return Err(Error::dimension("all bases must share ambient and dim"));
        }
        let count = bases.len();
        Ok(SignalModel::UnionOfSubspaces { ambient, dim, count, bases })
    }

    pub fn similar_signal(center: Signal, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::parameter("radius must be positive and finite"));
        }
        Ok(SignalModel::SimilarSignal { center, radius })
    }

    /// Dimension of the space the model's signals live in (K, or N for the
    /// sparse and union models).
    pub fn ambient_dim(&self) -> usize {
        match self {
            SignalModel::UnitBall { dim } => *dim,
            SignalModel::Sparse { ambient, .. } => *ambient,
            SignalModel::UnionOfSubspaces { ambient, .. } => *ambient,
            SignalModel::SimilarSignal { center, .. } => center.len(),
        }
    }

    /// Intrinsic dimension used in covering-number exponents.
    pub fn intrinsic_dim(&self) -> usize {
        match self {
            SignalModel::UnitBall { dim } => *dim,
            SignalModel::Sparse { sparsity, .. } => *sparsity,
            SignalModel::UnionOfSubspaces { dim, .. } => *dim,
            SignalModel::SimilarSignal { center, .. } => center.len(),
        }
    }

    /// Membership test, with a small tolerance on norms.
    pub fn contains(&self, x: &Signal) -> bool {
        const TOL: f64 = 1e-9;
        if x.len() != self.ambient_dim() {
            return false;
        }
        match self {
            SignalModel::UnitBall { .. } => x.norm() <= 1.0 + TOL,
            SignalModel::Sparse { sparsity, .. } => {
                let nnz = x.values().iter().filter(|v| **v != 0.0).count();
                nnz <= *sparsity && x.norm() <= 1.0 + TOL
            }
            SignalModel::UnionOfSubspaces { bases, .. } => {
                if x.norm() > 1.0 + TOL {
                    return false;
                }
                bases.iter().any(|b| {
                    // Residual after projecting onto the subspace.
                    let mut residual: Vec<f64> = x.values().to_vec();
                    for j in 0..b.dim() {
                        let col = b.column(j);
                        let dot: f64 = x.values().iter().zip(col).map(|(a, c)| a * c).sum();
                        for (r, c) in residual.iter_mut().zip(col) {
                            *r -= dot * c;
                        }
                    }
                    residual.iter().map(|r| r * r).sum::<f64>().sqrt() <= 1e-7
                })
            }
            SignalModel::SimilarSignal { center, radius } => {
                x.distance_to(center).map(|d| d <= radius + TOL).unwrap_or(false)
            }
        }
    }

    /// Draw a signal uniformly-in-spirit from the model: uniform in the ball
    /// for the ball-shaped sets, uniform support + uniform ball coefficients
    /// for the sparse model, uniform subspace choice + uniform ball
    /// coefficients for a union.
    pub fn sample(&self, rng: &mut ChaCha12Rng) -> Result<Signal> {
        match self {
            SignalModel::UnitBall { dim } => {
                Signal::new(uniform_ball(*dim, 1.0, rng))
            }
            SignalModel::Sparse { ambient, sparsity } => {
                let coeffs = uniform_ball(*sparsity, 1.0, rng);
                let support = index_sample(rng, *ambient, *sparsity);
                let mut values = vec![0.0; *ambient];
                for (slot, c) in support.iter().zip(coeffs) {
                    values[slot] = c;
                }
                Signal::new(values)
            }
            SignalModel::UnionOfSubspaces { count, bases, .. } => {
                if bases.is_empty() {
                    return Err(Error::Unsupported(
                        "cannot sample a union model described only by its count".into(),
                    ));
                }
                let which = rng.random_range(0..*count);
                let coeffs = uniform_ball(bases[which].dim(), 1.0, rng);
                Signal::new(bases[which].lift(&coeffs)?)
            }
            SignalModel::SimilarSignal { center, radius } => {
                let offset = uniform_ball(center.len(), *radius, rng);
                Signal::new(
                    center
                        .values()
                        .iter()
                        .zip(offset)
                        .map(|(c, o)| c + o)
                        .collect(),
                )
            }
        }
    }
}

/// Uniform draw from the radius-`r` ball in `dim` dimensions.
fn uniform_ball(dim: usize, r: f64, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v; // all zeros; probability zero
    }
    let u: f64 = rng.random::<f64>();
    let scale = r * u.powf(1.0 / dim as f64) / norm;
    for x in v.iter_mut() {
        *x *= scale;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn samples_satisfy_membership() {
        let mut rng = substream(3, 0x77);
        let ball = SignalModel::unit_ball(4).unwrap();
        let sparse = SignalModel::sparse(10, 3).unwrap();
        let center = Signal::new(vec![0.2, -0.1, 0.4]).unwrap();
        let similar = SignalModel::similar_signal(center, 0.5).unwrap();
        let bases = (0..3)
            .map(|_| SubspaceBasis::random(6, 2, &mut rng).unwrap())
            .collect();
        let union = SignalModel::union_with_bases(bases).unwrap();
        for model in [&ball, &sparse, &similar, &union] {
            for _ in 0..200 {
                let x = model.sample(&mut rng).unwrap();
                assert!(model.contains(&x), "sample escaped model {model:?}");
            }
        }
    }

    #[test]
    fn described_union_cannot_sample_but_has_dims() {
        let model = SignalModel::union_described(16, 2, 100).unwrap();
        assert_eq!(model.ambient_dim(), 16);
        assert_eq!(model.intrinsic_dim(), 2);
        let mut rng = substream(0, 0);
        assert!(model.sample(&mut rng).is_err());
    }

    #[test]
    fn sparse_counts_nonzeros() {
        let model = SignalModel::sparse(8, 2).unwrap();
        let mut rng = substream(9, 1);
        for _ in 0..50 {
            let x = model.sample(&mut rng).unwrap();
            let nnz = x.values().iter().filter(|v| **v != 0.0).count();
            assert!(nnz <= 2);
        }
    }

    #[test]
    fn random_basis_is_orthonormal() {
        let mut rng = substream(5, 2);
        let b = SubspaceBasis::random(7, 3, &mut rng).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = b.column(i).iter().zip(b.column(j)).map(|(a, c)| a * c).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10);
            }
        }
    }
}
