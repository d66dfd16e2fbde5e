//! Dense real vectors and the elementary measures built on the inner product.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("signal must have at least one entry")]
    Empty,
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("cannot normalize the zero signal")]
    ZeroNorm,
    #[error("cannot parse {value:?} as a number in field {index}")]
    Parse { index: usize, value: String },
}

/// A vector in a finite-dimensional real inner-product space.
///
/// The universal carrier for inputs, spectra, colors, and reference points.
/// Entries are always finite; serializes as a plain JSON array of numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Signal {
    entries: Vec<f64>,
}

impl Signal {
    pub fn new(entries: Vec<f64>) -> Result<Self, SignalError> {
        if entries.is_empty() {
            return Err(SignalError::Empty);
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(SignalError::NonFinite { index });
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Result<Self, SignalError> {
        Self::new(vec![0.0; dim])
    }

    /// The canonical basis vector e_i (0-based index).
    pub fn basis_vector(dim: usize, i: usize) -> Result<Self, SignalError> {
        if i >= dim {
            return Err(SignalError::DimensionMismatch(i, dim));
        }
        let mut entries = vec![0.0; dim];
        entries[i] = 1.0;
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SignalError> {
        self.check_dim(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SignalError> {
        self.check_dim(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn normalized(&self) -> Result<Self, SignalError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SignalError::ZeroNorm);
        }
        Ok(self.scaled(1.0 / n))
    }

    fn check_dim(&self, other: &Self) -> Result<(), SignalError> {
        if self.dim() != other.dim() {
            return Err(SignalError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Parse a single-line CSV row of numbers ("0.95,0.1,0.1").
    pub fn from_csv_row(row: &str) -> Result<Self, SignalError> {
        let entries = row
            .split(',')
            .enumerate()
            .map(|(index, field)| {
                field.trim().parse::<f64>().map_err(|_| SignalError::Parse {
                    index,
                    value: field.trim().to_string(),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        Self::new(entries)
    }

    pub fn to_csv_row(&self) -> String {
        self.entries
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = SignalError;

    fn try_from(entries: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Self {
        s.entries
    }
}

/// Standard inner product Σ f_i g_i.
pub fn inner(f: &Signal, g: &Signal) -> Result<f64, SignalError> {
    f.check_dim(g)?;
    Ok(f.entries.iter().zip(&g.entries).map(|(a, b)| a * b).sum())
}

/// The dissimilarity functional F[f,g] = ‖f‖‖g‖ − |⟨f,g⟩|.
///
/// Nonnegative by the Schwarz inequality; zero exactly on collinear pairs,
/// so it is scale-blind and must be read accordingly.
pub fn dissimilarity_f(f: &Signal, g: &Signal) -> Result<f64, SignalError> {
    let ip = inner(f, g)?;
    Ok(f.norm() * g.norm() - ip.abs())
}

/// Squared norm distance ‖f−g‖².
pub fn sq_distance(f: &Signal, g: &Signal) -> Result<f64, SignalError> {
    f.check_dim(g)?;
    Ok(f.entries
        .iter()
        .zip(&g.entries)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Rounding slack applied to every ε-membership comparison.
///
/// Distances assembled from decimal inputs land within a few ulp of the
/// intended value (e.g. fl(1.1) − fl(1.0) exceeds fl(0.1)), and a boundary
/// point must still count as a member.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

pub(crate) fn within_radius(dist: f64, eps: f64) -> bool {
    dist <= eps + MEMBERSHIP_SLACK * (1.0 + eps)
}

/// Membership in the norm ball K_ε(P) = {f : ‖P−f‖ ≤ ε}.
pub fn norm_ball_member(center: &Signal, f: &Signal, eps: f64) -> Result<bool, SignalError> {
    let d = sq_distance(center, f)?.sqrt();
    Ok(within_radius(d, eps))
}
