//! Loss and stochastic-gradient oracles for the supported problem kinds,
//! plus minibatch sampling.
//!
//! Batch losses are the MEAN over the batch (not the sum), so gradient
//! magnitudes do not depend on the batch size. Every loss carries an
//! optional ridge term `(lambda/2)||theta||^2`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::ParamVector;
use crate::scalar::{real, Real};

/// One observation: sparse features (ascending 0-based indices) and a label.
///
/// Label interpretation depends on the problem kind: `+1/-1` (with `1`/`0`
/// accepted and mapped) for binary logistic, an integer in `0..C` for
/// multiclass, and a real regression target for the quadratic problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<R: Real> {
    pub features: Vec<(usize, R)>,
    pub label: R,
}

/// An in-memory dataset with a fixed feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<R: Real> {
    samples: Vec<Sample<R>>,
    feature_dim: usize,
}

impl<R: Real> Dataset<R> {
    /// Validates that every sample is finite, indexed strictly ascending,
    /// and within `feature_dim`. Datasets are never empty.
    pub fn new(samples: Vec<Sample<R>>, feature_dim: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("dataset must be non-empty".into()));
        }
        for s in &samples {
            if !s.label.is_finite() {
                return Err(Error::NonFinite {
                    context: "Dataset label",
                });
            }
            let mut prev: Option<usize> = None;
            for &(idx, val) in &s.features {
                if idx >= feature_dim {
                    return Err(Error::InvalidArgument(format!(
                        "feature index {idx} out of range for dimension {feature_dim}"
                    )));
                }
                if let Some(p) = prev {
                    if idx <= p {
                        return Err(Error::InvalidArgument(
                            "feature indices must be strictly ascending".into(),
                        ));
                    }
                }
                if !val.is_finite() {
                    return Err(Error::NonFinite {
                        context: "Dataset feature value",
                    });
                }
                prev = Some(idx);
            }
        }
        Ok(Dataset {
            samples,
            feature_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn samples(&self) -> &[Sample<R>] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample<R> {
        &self.samples[i]
    }
}

/// Which loss the experiment optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    BinaryLogistic,
    MulticlassLogistic { classes: usize },
    /// Least squares: per-sample loss `(1/2)(<x, theta> - y)^2`.
    Quadratic,
}

/// Problem definition: loss kind, ridge coefficient, feature dimension.
///
/// The parameter dimension equals the feature dimension except for
/// multiclass logistic regression, where the parameter vector is laid out
/// as `classes` contiguous class-major blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<R: Real> {
    pub kind: ProblemKind,
    pub lambda: R,
    feature_dim: usize,
}

impl<R: Real> ProblemSpec<R> {
    pub fn new(kind: ProblemKind, feature_dim: usize, lambda: R) -> Result<Self> {
        if feature_dim == 0 {
            return Err(Error::Config("feature dimension must be positive".into()));
        }
        if !(lambda.is_finite() && lambda >= R::zero()) {
            return Err(Error::Config("lambda must be finite and >= 0".into()));
        }
        if let ProblemKind::MulticlassLogistic { classes } = kind {
            if classes < 2 {
                return Err(Error::Config(
                    "multiclass logistic needs at least 2 classes".into(),
                ));
            }
        }
        Ok(ProblemSpec {
            kind,
            lambda,
            feature_dim,
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Length of the parameter vector this problem optimizes over.
    pub fn param_dim(&self) -> usize {
        match self.kind {
            ProblemKind::MulticlassLogistic { classes } => classes * self.feature_dim,
            _ => self.feature_dim,
        }
    }

    /// Check that a dataset's dimension and labels fit this problem.
    pub fn validate_dataset(&self, data: &Dataset<R>) -> Result<()> {
        if data.feature_dim() > self.feature_dim {
            return Err(Error::DimensionMismatch {
                what: "dataset feature dimension",
                expected: self.feature_dim,
                got: data.feature_dim(),
            });
        }
        match self.kind {
            ProblemKind::BinaryLogistic => {
                for s in data.samples() {
                    binary_sign(s.label)?;
                }
            }
            ProblemKind::MulticlassLogistic { classes } => {
                for s in data.samples() {
                    class_index(s.label, classes)?;
                }
            }
            ProblemKind::Quadratic => {}
        }
        Ok(())
    }
}

/// Indices into one worker's shard; always non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minibatch {
    indices: Vec<usize>,
}

impl Minibatch {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("minibatch must be non-empty".into()));
        }
        Ok(Minibatch { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Map a binary label to `+1`/`-1`: accepts `1`/`+1` as positive and
/// `0`/`-1` as negative.
fn binary_sign<R: Real>(label: R) -> Result<R> {
    if label == R::one() {
        Ok(R::one())
    } else if label == R::zero() || label == -R::one() {
        Ok(-R::one())
    } else {
        Err(Error::InvalidArgument(format!(
            "binary label must be one of 1, +1, 0, -1; got {label}"
        )))
    }
}

fn class_index<R: Real>(label: R, classes: usize) -> Result<usize> {
    let as_f = label.to_f64().unwrap_or(f64::NAN);
    if as_f.fract() == 0.0 && as_f >= 0.0 && (as_f as usize) < classes {
        Ok(as_f as usize)
    } else {
        Err(Error::InvalidArgument(format!(
            "multiclass label must be an integer in 0..{classes}; got {label}"
        )))
    }
}

fn sparse_dot<R: Real>(features: &[(usize, R)], theta: &[R]) -> R {
    features
        .iter()
        .fold(R::zero(), |acc, &(i, v)| acc + v * theta[i])
}

/// Numerically stable `1 / (1 + exp(-u))`.
fn sigmoid<R: Real>(u: R) -> R {
    if u >= R::zero() {
        R::one() / (R::one() + (-u).exp())
    } else {
        let e = u.exp();
        e / (R::one() + e)
    }
}

/// Numerically stable `ln(1 + exp(u))`.
fn softplus<R: Real>(u: R) -> R {
    u.max(R::zero()) + (-u.abs()).exp().ln_1p()
}

fn check_theta<R: Real>(spec: &ProblemSpec<R>, theta: &ParamVector<R>) -> Result<()> {
    if theta.len() != spec.param_dim() {
        return Err(Error::DimensionMismatch {
            what: "parameter vector",
            expected: spec.param_dim(),
            got: theta.len(),
        });
    }
    Ok(())
}

fn batch_indices<'a>(
    data: &Dataset<impl Real>,
    batch: Option<&'a Minibatch>,
) -> Result<Box<dyn Iterator<Item = usize> + 'a>> {
    match batch {
        Some(b) => {
            for &i in b.indices() {
                if i >= data.len() {
                    return Err(Error::InvalidArgument(format!(
                        "minibatch index {i} out of range for shard of {}",
                        data.len()
                    )));
                }
            }
            Ok(Box::new(b.indices().iter().copied()))
        }
        None => Ok(Box::new(0..data.len())),
    }
}

/// Mean per-sample loss over the batch (all samples when `batch` is `None`)
/// plus the ridge term `(lambda/2)||theta||^2`.
pub fn loss<R: Real>(
    spec: &ProblemSpec<R>,
    data: &Dataset<R>,
    theta: &ParamVector<R>,
    batch: Option<&Minibatch>,
) -> Result<R> {
    check_theta(spec, theta)?;
    let t = theta.as_slice();
    let mut total = R::zero();
    let mut count = 0usize;
    for i in batch_indices(data, batch)? {
        let s = data.sample(i);
        let li = match spec.kind {
            ProblemKind::BinaryLogistic => {
                let y = binary_sign(s.label)?;
                softplus(-y * sparse_dot(&s.features, t))
            }
            ProblemKind::MulticlassLogistic { classes } => {
                let y = class_index(s.label, classes)?;
                let d = spec.feature_dim();
                let logits: Vec<R> = (0..classes)
                    .map(|c| sparse_dot(&s.features, &t[c * d..(c + 1) * d]))
                    .collect();
                let m = logits.iter().fold(R::neg_infinity(), |a, &z| a.max(z));
                let sum_exp = logits.iter().fold(R::zero(), |a, &z| a + (z - m).exp());
                m + sum_exp.ln() - logits[y]
            }
            ProblemKind::Quadratic => {
                let r = sparse_dot(&s.features, t) - s.label;
                r * r / real(2.0)
            }
        };
        total = total + li;
        count += 1;
    }
    let mean = total / real(count as f64);
    let reg = spec.lambda / real(2.0) * theta.squared_norm()?;
    let out = mean + reg;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite { context: "loss" })
    }
}

/// Exact gradient of [`loss`] over the same batch, including the ridge term.
pub fn gradient<R: Real>(
    spec: &ProblemSpec<R>,
    data: &Dataset<R>,
    theta: &ParamVector<R>,
    batch: Option<&Minibatch>,
) -> Result<ParamVector<R>> {
    check_theta(spec, theta)?;
    let t = theta.as_slice();
    let mut acc = vec![R::zero(); theta.len()];
    let mut count = 0usize;
    for i in batch_indices(data, batch)? {
        let s = data.sample(i);
        match spec.kind {
            ProblemKind::BinaryLogistic => {
                let y = binary_sign(s.label)?;
                // d/dtheta ln(1+exp(-y<x,theta>)) = -y * sigmoid(-y<x,theta>) * x
                let coeff = -y * sigmoid(-y * sparse_dot(&s.features, t));
                for &(j, v) in &s.features {
                    acc[j] = acc[j] + coeff * v;
                }
            }
            ProblemKind::MulticlassLogistic { classes } => {
                let y = class_index(s.label, classes)?;
                let d = spec.feature_dim();
                let logits: Vec<R> = (0..classes)
                    .map(|c| sparse_dot(&s.features, &t[c * d..(c + 1) * d]))
                    .collect();
                let m = logits.iter().fold(R::neg_infinity(), |a, &z| a.max(z));
                let sum_exp = logits.iter().fold(R::zero(), |a, &z| a + (z - m).exp());
                for c in 0..classes {
                    let p_c = (logits[c] - m).exp() / sum_exp;
                    let coeff = if c == y { p_c - R::one() } else { p_c };
                    for &(j, v) in &s.features {
                        acc[c * d + j] = acc[c * d + j] + coeff * v;
                    }
                }
            }
            ProblemKind::Quadratic => {
                let r = sparse_dot(&s.features, t) - s.label;
                for &(j, v) in &s.features {
                    acc[j] = acc[j] + r * v;
                }
            }
        }
        count += 1;
    }
    let inv = R::one() / real(count as f64);
    for (g, &th) in acc.iter_mut().zip(t) {
        *g = *g * inv + spec.lambda * th;
    }
    ParamVector::from_vec(acc)
}

/// Draw `batch_size` indices uniformly without replacement from
/// `0..shard_size`; fully determined by the RNG state.
pub fn sample_minibatch<G: Rng>(
    shard_size: usize,
    batch_size: usize,
    rng: &mut G,
) -> Result<Minibatch> {
    if batch_size == 0 || batch_size > shard_size {
        return Err(Error::InvalidArgument(format!(
            "batch size {batch_size} out of range for shard of {shard_size}"
        )));
    }
    let indices = rand::seq::index::sample(rng, shard_size, batch_size).into_vec();
    Minibatch::new(indices)
}
