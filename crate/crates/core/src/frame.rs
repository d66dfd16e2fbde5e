//! Finite frames, canonical duals, and the Δ/∇ dissimilarity measures.
//!
//! A frame is a spanning family {Ψ_j} with A‖f‖² ≤ Σ|⟨Ψ_j,f⟩|² ≤ B‖f‖².
//! The optimal bounds are the extreme eigenvalues of the frame operator
//! S = Σ|Ψ_j⟩⟨Ψ_j|, the canonical dual is Ψ̃_j = S⁻¹Ψ_j, and any vector
//! reconstructs as f = Σ⟨Ψ_j,f⟩Ψ̃_j. Redundancy is what buys noise
//! robustness: Δ and ∇ compare signals through sup-norms of frame
//! coefficients rather than through the plain norm distance, so a small
//! per-coefficient perturbation cannot eject a signal from its cluster.
//!
//! The interleaved family {e_1, c·e_1, e_2, c·e_2, …} used for spectra keeps
//! a structured representation: with 2·22050 vectors, materializing it (or
//! its 22050² frame operator) is off the table, while all of its bounds,
//! duals, and coefficient sups have closed forms.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{inner, within_radius, Signal, SignalError};

/// Families with a smallest frame bound at or below this do not span.
pub const SPANNING_TOL: f64 = 1e-12;
/// Tightness detection: |A − B| ≤ TIGHTNESS_TOL · max(A, 1).
pub const TIGHTNESS_TOL: f64 = 1e-10;
/// Dimension above which bounds switch from a dense symmetric eigensolve
/// to power / inverse-power iteration on the frame operator.
const DENSE_EIGEN_MAX_DIM: usize = 64;
const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum FrameError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("a frame needs at least one vector")]
    Empty,
    #[error("not a frame: smallest bound {0:e} (family does not span)")]
    NotAFrame(f64),
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("scale must be positive and finite")]
    InvalidScale,
    #[error("cluster radius must be positive")]
    InvalidEpsilon,
    #[error("frame JSON: {0}")]
    Json(String),
}

/// Which measure defines an ε-cluster around a reference point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMeasure {
    Norm,
    Delta,
    Nabla,
}

/// Both coefficient sups for a pair of signals, and the measures they induce.
#[derive(Clone, Debug, Serialize)]
pub struct DissimilarityReport {
    /// max(sup_analysis, sup_dual) — a metric.
    pub delta: f64,
    /// min(sup_analysis, sup_dual) — symmetric and positive, but the
    /// triangle inequality can fail.
    pub nabla: f64,
    /// sup_j |⟨Ψ_j, f−g⟩|.
    pub sup_analysis: f64,
    /// sup_j |⟨Ψ̃_j, f−g⟩|.
    pub sup_dual: f64,
}

#[derive(Clone, Debug)]
enum Rep {
    General {
        vectors: Vec<Signal>,
        duals: Vec<Signal>,
    },
    /// {e_i, scale·e_i} interleaved over i = 0..dim; tight with A = 1 + scale².
    ScaledPair { dim: usize, scale: f64 },
}

/// An indexed spanning family with its optimal bounds and canonical dual.
#[derive(Clone, Debug)]
pub struct Frame {
    rep: Rep,
    bounds: (f64, f64),
}

/// Serialized form: duals and bounds are always recomputed on load, never
/// trusted from the file.
#[derive(Serialize, Deserialize)]
struct FrameFile {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl Frame {
    /// Build a frame from an explicit family, computing optimal bounds and
    /// the canonical dual. Errors unless the family spans its space.
    pub fn new(vectors: Vec<Signal>) -> Result<Self, FrameError> {
        if vectors.is_empty() {
            return Err(FrameError::Empty);
        }
        let n = vectors[0].dim();
        for v in &vectors[1..] {
            if v.dim() != n {
                return Err(SignalError::DimensionMismatch(n, v.dim()).into());
            }
        }
        if vectors.len() < n {
            // fewer vectors than dimensions cannot span
            return Err(FrameError::NotAFrame(0.0));
        }

        let s = frame_operator(&vectors, n);
        let (a, b) = operator_bounds(&s)?;
        if a <= SPANNING_TOL {
            return Err(FrameError::NotAFrame(a));
        }

        let duals = if (a - b).abs() <= TIGHTNESS_TOL * a.max(1.0) {
            vectors.iter().map(|v| v.scaled(1.0 / a)).collect()
        } else {
            let chol = Cholesky::new(s).ok_or(FrameError::NotAFrame(a))?;
            vectors
                .iter()
                .map(|v| {
                    let solved = chol.solve(&DVector::from_column_slice(v.entries()));
                    Signal::new(solved.as_slice().to_vec()).map_err(FrameError::from)
                })
                .collect::<Result<Vec<_>, _>>()?
        };

        Ok(Self {
            rep: Rep::General { vectors, duals },
            bounds: (a, b),
        })
    }

    /// The tight frame {e_1, c·e_1, …, e_n, c·e_n} with A = B = 1 + c².
    ///
    /// Closed forms are used throughout; `analysis_energy_ratio` exists to
    /// cross-check the bound on live data.
    pub fn scaled_pair(dim: usize, scale: f64) -> Result<Self, FrameError> {
        if dim == 0 {
            return Err(FrameError::Empty);
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(FrameError::InvalidScale);
        }
        let a = 1.0 + scale * scale;
        Ok(Self {
            rep: Rep::ScaledPair { dim, scale },
            bounds: (a, a),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.rep {
            Rep::General { vectors, .. } => vectors[0].dim(),
            Rep::ScaledPair { dim, .. } => *dim,
        }
    }

    pub fn len(&self) -> usize {
        match &self.rep {
            Rep::General { vectors, .. } => vectors.len(),
            Rep::ScaledPair { dim, .. } => 2 * dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Optimal frame bounds (A, B).
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn is_tight(&self) -> bool {
        let (a, b) = self.bounds;
        (a - b).abs() <= TIGHTNESS_TOL * a.max(1.0)
    }

    /// Materialize Ψ_j.
    pub fn vector(&self, j: usize) -> Signal {
        match &self.rep {
            Rep::General { vectors, .. } => vectors[j].clone(),
            Rep::ScaledPair { dim, scale } => {
                let mut e = vec![0.0; *dim];
                e[j / 2] = if j.is_multiple_of(2) { 1.0 } else { *scale };
                Signal::new(e).unwrap()
            }
        }
    }

    /// Materialize the canonical dual Ψ̃_j.
    pub fn dual(&self, j: usize) -> Signal {
        match &self.rep {
            Rep::General { duals, .. } => duals[j].clone(),
            Rep::ScaledPair { .. } => self.vector(j).scaled(1.0 / self.bounds.0),
        }
    }

    /// Analysis coefficients (⟨Ψ_j, f⟩)_j.
    pub fn analysis(&self, f: &Signal) -> Result<Vec<f64>, FrameError> {
        self.check_dim(f)?;
        Ok(match &self.rep {
            Rep::General { vectors, .. } => vectors.iter().map(|v| inner(v, f).unwrap()).collect(),
            Rep::ScaledPair { scale, .. } => {
                let mut out = Vec::with_capacity(2 * f.dim());
                for x in f.entries() {
                    out.push(*x);
                    out.push(scale * x);
                }
                out
            }
        })
    }

    /// Synthesis Σ c_j Ψ_j.
    pub fn synthesis(&self, coeffs: &[f64]) -> Result<Signal, FrameError> {
        self.synthesize_with(coeffs, false)
    }

    /// Synthesis against the dual family, Σ c_j Ψ̃_j.
    pub fn synthesis_dual(&self, coeffs: &[f64]) -> Result<Signal, FrameError> {
        self.synthesize_with(coeffs, true)
    }

    fn synthesize_with(&self, coeffs: &[f64], use_dual: bool) -> Result<Signal, FrameError> {
        if coeffs.len() != self.len() {
            return Err(FrameError::CoefficientCount {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        match &self.rep {
            Rep::General { vectors, duals } => {
                let family = if use_dual { duals } else { vectors };
                let mut acc = vec![0.0; self.dim()];
                for (c, v) in coeffs.iter().zip(family) {
                    for (a, x) in acc.iter_mut().zip(v.entries()) {
                        *a += c * x;
                    }
                }
                Ok(Signal::new(acc)?)
            }
            Rep::ScaledPair { dim, scale } => {
                let factor = if use_dual { 1.0 / self.bounds.0 } else { 1.0 };
                let mut acc = vec![0.0; *dim];
                for (i, a) in acc.iter_mut().enumerate() {
                    *a = factor * (coeffs[2 * i] + scale * coeffs[2 * i + 1]);
                }
                Ok(Signal::new(acc)?)
            }
        }
    }

    /// Round-trip f = Σ⟨Ψ_j,f⟩Ψ̃_j through the analysis coefficients.
    pub fn reconstruct(&self, f: &Signal) -> Result<Signal, FrameError> {
        let coeffs = self.analysis(f)?;
        self.synthesis_dual(&coeffs)
    }

    /// sup_j |⟨Ψ_j, d⟩|, streamed without materializing the coefficients.
    pub fn sup_analysis(&self, d: &Signal) -> Result<f64, FrameError> {
        self.check_dim(d)?;
        Ok(match &self.rep {
            Rep::General { vectors, .. } => vectors
                .iter()
                .map(|v| inner(v, d).unwrap().abs())
                .fold(0.0, f64::max),
            Rep::ScaledPair { scale, .. } => {
                let peak = d.entries().iter().map(|x| x.abs()).fold(0.0, f64::max);
                peak * scale.max(1.0)
            }
        })
    }

    /// sup_j |⟨Ψ̃_j, d⟩| over the canonical dual.
    pub fn sup_dual(&self, d: &Signal) -> Result<f64, FrameError> {
        self.check_dim(d)?;
        Ok(match &self.rep {
            Rep::General { duals, .. } => duals
                .iter()
                .map(|v| inner(v, d).unwrap().abs())
                .fold(0.0, f64::max),
            Rep::ScaledPair { .. } => self.sup_analysis(d)? / self.bounds.0,
        })
    }

    /// Both sups and the induced Δ/∇ values for a pair of signals.
    pub fn dissimilarity(&self, f: &Signal, g: &Signal) -> Result<DissimilarityReport, FrameError> {
        let d = f.sub(g)?;
        let sup_analysis = self.sup_analysis(&d)?;
        let sup_dual = self.sup_dual(&d)?;
        Ok(DissimilarityReport {
            delta: sup_analysis.max(sup_dual),
            nabla: sup_analysis.min(sup_dual),
            sup_analysis,
            sup_dual,
        })
    }

    /// Δ(f,g) = max of the two coefficient sups.
    pub fn delta(&self, f: &Signal, g: &Signal) -> Result<f64, FrameError> {
        Ok(self.dissimilarity(f, g)?.delta)
    }

    /// ∇(f,g) = min of the two coefficient sups.
    pub fn nabla(&self, f: &Signal, g: &Signal) -> Result<f64, FrameError> {
        Ok(self.dissimilarity(f, g)?.nabla)
    }

    /// Membership of f in the ε-cluster around P under the chosen measure.
    pub fn cluster_member(
        &self,
        center: &Signal,
        f: &Signal,
        eps: f64,
        measure: FrameMeasure,
    ) -> Result<bool, FrameError> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(FrameError::InvalidEpsilon);
        }
        let value = match measure {
            FrameMeasure::Norm => crate::signal::sq_distance(center, f)?.sqrt(),
            FrameMeasure::Delta => self.delta(f, center)?,
            FrameMeasure::Nabla => self.nabla(f, center)?,
        };
        Ok(within_radius(value, eps))
    }

    /// (Σ‖Ψ_j‖, Σ‖Ψ̃_j‖) — the constants in the norm-vs-Δ comparison bound.
    pub fn norm_sums(&self) -> (f64, f64) {
        match &self.rep {
            Rep::General { vectors, duals } => (
                vectors.iter().map(Signal::norm).sum(),
                duals.iter().map(Signal::norm).sum(),
            ),
            Rep::ScaledPair { dim, scale } => {
                let primal = (*dim as f64) * (1.0 + scale);
                (primal, primal / self.bounds.0)
            }
        }
    }

    /// Ratio Σ|⟨Ψ_j,f⟩|² / ‖f‖²; for a tight frame this equals A for every f.
    pub fn analysis_energy_ratio(&self, f: &Signal) -> Result<f64, FrameError> {
        let n2 = f.norm_sq();
        if n2 == 0.0 {
            return Err(SignalError::ZeroNorm.into());
        }
        let energy: f64 = self.analysis(f)?.iter().map(|c| c * c).sum();
        Ok(energy / n2)
    }

    pub fn to_json(&self) -> String {
        let file = FrameFile {
            dim: self.dim(),
            vectors: (0..self.len())
                .map(|j| self.vector(j).entries().to_vec())
                .collect(),
        };
        serde_json::to_string(&file).unwrap()
    }

    /// Parse the `{"dim": n, "vectors": [[...], ...]}` form. Bounds and duals
    /// are derived from the vectors alone.
    pub fn from_json(text: &str) -> Result<Self, FrameError> {
        let file: FrameFile =
            serde_json::from_str(text).map_err(|e| FrameError::Json(e.to_string()))?;
        let vectors = file
            .vectors
            .into_iter()
            .map(|v| {
                if v.len() != file.dim {
                    return Err(FrameError::Json(format!(
                        "vector of length {} in a dim-{} frame",
                        v.len(),
                        file.dim
                    )));
                }
                Signal::new(v).map_err(FrameError::from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vectors)
    }

    fn check_dim(&self, f: &Signal) -> Result<(), FrameError> {
        if f.dim() != self.dim() {
            return Err(SignalError::DimensionMismatch(self.dim(), f.dim()).into());
        }
        Ok(())
    }
}

fn frame_operator(vectors: &[Signal], n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::<f64>::zeros(n, n);
    for v in vectors {
        let e = v.entries();
        for i in 0..n {
            if e[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                s[(i, j)] += e[i] * e[j];
            }
        }
    }
    s
}

/// Extreme eigenvalues of the (symmetric, positive semidefinite) frame
/// operator: dense solve for small dimensions, power and inverse-power
/// iteration above [`DENSE_EIGEN_MAX_DIM`].
fn operator_bounds(s: &DMatrix<f64>) -> Result<(f64, f64), FrameError> {
    let n = s.nrows();
    if n <= DENSE_EIGEN_MAX_DIM {
        let eigen = s.clone().symmetric_eigen();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for ev in eigen.eigenvalues.iter() {
            lo = lo.min(*ev);
            hi = hi.max(*ev);
        }
        return Ok((lo, hi));
    }

    let b_vec = power_vector(|v| s * v, n);
    let b = (s * &b_vec).dot(&b_vec);
    // inverse-power for the bottom of the spectrum needs S to be numerically
    // positive definite; failure means the family does not span
    let chol = Cholesky::new(s.clone()).ok_or(FrameError::NotAFrame(0.0))?;
    let a_vec = power_vector(|v| chol.solve(v), n);
    let a = (s * &a_vec).dot(&a_vec);
    Ok((a, b))
}

fn start_vector(n: usize) -> DVector<f64> {
    // deterministic, with a ramp so it is not orthogonal to symmetric eigenspaces
    let v = DVector::from_fn(n, |i, _| 1.0 + i as f64 / n as f64);
    let norm = v.norm();
    v / norm
}

/// Iterate v ← Av/‖Av‖ until the Rayleigh quotient settles; returns the
/// converged unit vector.
fn power_vector<F>(apply: F, n: usize) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut v = start_vector(n);
    let mut rayleigh = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = apply(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return v;
        }
        v = w / norm;
        if (next - rayleigh).abs() <= POWER_TOL * next.abs().max(1.0) {
            return v;
        }
        rayleigh = next;
    }
    v
}
