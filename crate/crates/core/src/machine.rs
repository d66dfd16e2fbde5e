//! The projector-based clustering machine.
//!
//! A machine partitions an orthonormal set into output groups. Each group α
//! induces an orthogonal projector Q_α, a signal f gets the score vector
//! q_α(f) = ‖Q_α f‖², and the scores drive a four-way decision: certain,
//! almost-certain, split between outputs, or evidence that the output set
//! itself is incomplete (in which case the basis can be extended with the
//! normalized residual).

use serde::Serialize;
use thiserror::Error;

use crate::signal::{inner, Signal, SignalError};

/// Tolerance for pairwise orthonormality checks, |⟨e_i,e_j⟩ − δ_ij|.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Tolerance for the completeness equality Σ q_α = ‖f‖².
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Residual norms at or below this count as "already spanned".
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Relative slack on the q_α = ‖f‖² test for a Definite verdict.
pub const DEFINITE_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum MachineError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("vectors {i} and {j} break orthonormality: |<e_i,e_j> - delta| = {deviation:e}")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },
    #[error("orthonormal set of {count} vectors cannot live in dimension {dim}")]
    TooManyVectors { count: usize, dim: usize },
    #[error("groups must form a partition of 0..{basis_len}: {reason}")]
    BadPartition { basis_len: usize, reason: String },
    #[error("expected {groups} labels, got {labels}")]
    LabelCount { groups: usize, labels: usize },
    #[error("thresholds must satisfy 0 < theta_lo < theta_hi <= 1")]
    BadThresholds,
    #[error("cannot classify the zero signal")]
    ZeroSignal,
    #[error("signal already spanned: residual norm {0:e}")]
    AlreadySpanned(f64),
}

/// A set of pairwise orthonormal vectors of common dimension.
#[derive(Clone, Debug)]
pub struct OrthonormalSet {
    vectors: Vec<Signal>,
}

impl OrthonormalSet {
    /// Validates pairwise inner products against [`ORTHONORMALITY_TOL`].
    pub fn new(vectors: Vec<Signal>) -> Result<Self, MachineError> {
        if vectors.is_empty() {
            return Err(SignalError::Empty.into());
        }
        let dim = vectors[0].dim();
        for v in &vectors[1..] {
            if v.dim() != dim {
                return Err(SignalError::DimensionMismatch(dim, v.dim()).into());
            }
        }
        if vectors.len() > dim {
            return Err(MachineError::TooManyVectors {
                count: vectors.len(),
                dim,
            });
        }
        for i in 0..vectors.len() {
            for j in i..vectors.len() {
                let expected = if i == j { 1.0 } else { 0.0 };
                let deviation = (inner(&vectors[i], &vectors[j])? - expected).abs();
                if deviation > ORTHONORMALITY_TOL {
                    return Err(MachineError::NotOrthonormal { i, j, deviation });
                }
            }
        }
        Ok(Self { vectors })
    }

    /// The canonical basis of ℝ^dim.
    pub fn canonical(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| Signal::basis_vector(dim, i).unwrap())
            .collect();
        Self { vectors }
    }

    /// The first `count` canonical basis vectors inside ℝ^dim (an incomplete set).
    pub fn canonical_prefix(dim: usize, count: usize) -> Result<Self, MachineError> {
        if count > dim {
            return Err(MachineError::TooManyVectors { count, dim });
        }
        let vectors = (0..count)
            .map(|i| Signal::basis_vector(dim, i).unwrap())
            .collect();
        Ok(Self { vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn vectors(&self) -> &[Signal] {
        &self.vectors
    }

    /// True when the set spans the whole space (N = dim).
    pub fn is_complete(&self) -> bool {
        self.len() == self.dim()
    }
}

/// Scores q_α(f) = ‖Q_α f‖² for one signal against every output group.
#[derive(Clone, Debug, Serialize)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub total: f64,
    pub input_norm_sq: f64,
}

impl ScoreVector {
    /// Scores divided by their sum (the degree-of-membership view).
    /// Empty when the total is zero.
    pub fn normalized_scores(&self) -> Vec<f64> {
        if self.total == 0.0 {
            return vec![0.0; self.scores.len()];
        }
        self.scores.iter().map(|q| q / self.total).collect()
    }

    /// Index of the maximal score; first index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, q) in self.scores.iter().enumerate() {
            if *q > self.scores[best] {
                best = i;
            }
        }
        best
    }
}

/// The outcome of classifying one signal.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "case")]
pub enum VerdictKind {
    /// q_α captures the full energy of f: the output is certain.
    Definite { group: usize },
    /// q_α ≥ θ_hi·‖f‖²: almost sure, with the winning score attached.
    Probable { group: usize, score: f64 },
    /// Several groups share the energy; entries sorted by descending score,
    /// ties by ascending group index.
    Split { shares: Vec<(usize, f64)> },
    /// Too little of f lands in the machine: an output is missing and the
    /// residual (of this norm) can seed a new basis vector.
    MissingOutput { residual_norm: f64 },
    /// Every score is negligible: f is orthogonal to everything known.
    Null,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub theta_hi: f64,
    pub theta_lo: f64,
}

/// A partition of an orthonormal set into M labeled output groups.
#[derive(Clone, Debug)]
pub struct ClusteringMachine {
    basis: OrthonormalSet,
    groups: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl ClusteringMachine {
    pub fn new(
        basis: OrthonormalSet,
        groups: Vec<Vec<usize>>,
        labels: Vec<String>,
    ) -> Result<Self, MachineError> {
        let n = basis.len();
        if labels.len() != groups.len() {
            return Err(MachineError::LabelCount {
                groups: groups.len(),
                labels: labels.len(),
            });
        }
        let mut seen = vec![false; n];
        let mut covered = 0usize;
        for group in &groups {
            if group.is_empty() {
                return Err(MachineError::BadPartition {
                    basis_len: n,
                    reason: "empty group".into(),
                });
            }
            for &k in group {
                if k >= n {
                    return Err(MachineError::BadPartition {
                        basis_len: n,
                        reason: format!("index {k} out of range"),
                    });
                }
                if seen[k] {
                    return Err(MachineError::BadPartition {
                        basis_len: n,
                        reason: format!("index {k} appears twice"),
                    });
                }
                seen[k] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(MachineError::BadPartition {
                basis_len: n,
                reason: format!("only {covered} of {n} indices covered"),
            });
        }
        Ok(Self {
            basis,
            groups,
            labels,
        })
    }

    /// One group per basis vector, labeled "O1".."ON".
    pub fn singletons(basis: OrthonormalSet) -> Self {
        let groups: Vec<Vec<usize>> = (0..basis.len()).map(|k| vec![k]).collect();
        let labels = (1..=basis.len()).map(|a| format!("O{a}")).collect();
        Self::new(basis, groups, labels).unwrap()
    }

    pub fn basis(&self) -> &OrthonormalSet {
        &self.basis
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_outputs(&self) -> usize {
        self.groups.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Q_α f = Σ_{k∈group_α} ⟨e_k,f⟩ e_k.
    pub fn project(&self, alpha: usize, f: &Signal) -> Result<Signal, MachineError> {
        let mut out = Signal::zeros(self.dim())?;
        for &k in &self.groups[alpha] {
            let e = &self.basis.vectors()[k];
            out = out.add(&e.scaled(inner(e, f)?))?;
        }
        Ok(out)
    }

    /// The score vector q_α(f) = Σ_{k∈group_α} ⟨e_k,f⟩².
    pub fn project_scores(&self, f: &Signal) -> Result<ScoreVector, MachineError> {
        let coeffs: Vec<f64> = self
            .basis
            .vectors()
            .iter()
            .map(|e| inner(e, f))
            .collect::<Result<_, _>>()?;
        let scores: Vec<f64> = self
            .groups
            .iter()
            .map(|group| group.iter().map(|&k| coeffs[k] * coeffs[k]).sum())
            .collect();
        Ok(ScoreVector {
            total: scores.iter().sum(),
            scores,
            input_norm_sq: f.norm_sq(),
        })
    }

    /// Route a signal to one of the decision cases.
    ///
    /// Thresholds are applied relative to ‖f‖², so non-normalized inputs
    /// (e.g. RGB colors) are classified without rescaling them.
    /// Precedence: Definite > Probable > Split > Null > MissingOutput.
    pub fn classify(
        &self,
        f: &Signal,
        theta_hi: f64,
        theta_lo: f64,
    ) -> Result<Verdict, MachineError> {
        if !(0.0 < theta_lo && theta_lo < theta_hi && theta_hi <= 1.0) {
            return Err(MachineError::BadThresholds);
        }
        let sv = self.project_scores(f)?;
        let n2 = sv.input_norm_sq;
        if n2 == 0.0 {
            return Err(MachineError::ZeroSignal);
        }

        let best = sv.argmax();
        let kind = if sv.scores[best] >= n2 * (1.0 - DEFINITE_TOL) {
            VerdictKind::Definite { group: best }
        } else if sv.scores[best] >= theta_hi * n2 {
            VerdictKind::Probable {
                group: best,
                score: sv.scores[best],
            }
        } else {
            // scores indistinguishable from zero are not reported as shares
            let mut shares: Vec<(usize, f64)> = sv
                .scores
                .iter()
                .enumerate()
                .filter(|(_, q)| **q > 1e-12 * n2)
                .map(|(a, q)| (a, *q))
                .collect();
            if shares.len() >= 2 && sv.total >= theta_hi * n2 {
                shares.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                VerdictKind::Split { shares }
            } else if sv.scores.iter().all(|q| *q <= theta_lo * n2) {
                VerdictKind::Null
            } else {
                VerdictKind::MissingOutput {
                    residual_norm: (n2 - sv.total).max(0.0).sqrt(),
                }
            }
        };
        Ok(Verdict {
            kind,
            theta_hi,
            theta_lo,
        })
    }

    /// Gram–Schmidt extension: orthogonalize f against the basis and adjoin
    /// the normalized residual as a fresh singleton output group.
    ///
    /// Returns the extended machine and the new basis vector. Errors when f
    /// is already spanned (residual norm ≤ [`RESIDUAL_TOL`]).
    pub fn extend(&self, f: &Signal) -> Result<(ClusteringMachine, Signal), MachineError> {
        let mut residual = f.clone();
        // two projection passes keep the residual orthogonal to 1e-10 even
        // when f is nearly inside the span
        for _ in 0..2 {
            for e in self.basis.vectors() {
                residual = residual.sub(&e.scaled(inner(e, &residual)?))?;
            }
        }
        let norm = residual.norm();
        if norm <= RESIDUAL_TOL {
            return Err(MachineError::AlreadySpanned(norm));
        }
        let e_new = residual.scaled(1.0 / norm);

        let mut vectors = self.basis.vectors().to_vec();
        vectors.push(e_new.clone());
        let basis = OrthonormalSet::new(vectors)?;
        let mut groups = self.groups.clone();
        groups.push(vec![basis.len() - 1]);
        let mut labels = self.labels.clone();
        labels.push(format!("O{}", groups.len()));
        Ok((ClusteringMachine::new(basis, groups, labels)?, e_new))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::sq_distance;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    /// The XOR machine: groups {e1,e4} and {e2,e3} over the canonical ℝ⁴ basis.
    fn xor_machine() -> ClusteringMachine {
        ClusteringMachine::new(
            OrthonormalSet::canonical(4),
            vec![vec![0, 3], vec![1, 2]],
            vec!["O1".into(), "O2".into()],
        )
        .unwrap()
    }

    /// Same grouping but over the first four basis vectors of ℝ⁵.
    fn xor_machine_ambient5() -> ClusteringMachine {
        ClusteringMachine::new(
            OrthonormalSet::canonical_prefix(5, 4).unwrap(),
            vec![vec![0, 3], vec![1, 2]],
            vec!["O1".into(), "O2".into()],
        )
        .unwrap()
    }

    fn rgb_machine() -> ClusteringMachine {
        ClusteringMachine::new(
            OrthonormalSet::canonical(3),
            vec![vec![0], vec![1], vec![2]],
            vec!["R".into(), "G".into(), "B".into()],
        )
        .unwrap()
    }

    #[test]
    fn build_rejects_non_orthonormal_basis() {
        let e = OrthonormalSet::new(vec![sig(&[1.0, 0.0]), sig(&[0.9, 0.1])]).unwrap_err();
        assert!(matches!(e, MachineError::NotOrthonormal { .. }));
        // within tolerance passes
        OrthonormalSet::new(vec![sig(&[1.0, 1e-11]), sig(&[0.0, 1.0])]).unwrap();
    }

    #[test]
    fn build_rejects_bad_partitions() {
        let basis = OrthonormalSet::canonical(3);
        for groups in [
            vec![vec![0, 1], vec![1, 2]], // overlap
            vec![vec![0, 1], vec![]],     // empty group
            vec![vec![0], vec![1]],       // not covering
            vec![vec![0, 1, 2], vec![3]], // out of range
        ] {
            let labels = vec!["a".to_string(); groups.len()];
            assert!(matches!(
                ClusteringMachine::new(basis.clone(), groups, labels).unwrap_err(),
                MachineError::BadPartition { .. }
            ));
        }
    }

    #[test]
    fn xor_projector_is_diag_1001() {
        let cm = xor_machine();
        let q1e1 = cm.project(0, &sig(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(q1e1.entries(), &[1.0, 0.0, 0.0, 0.0]);
        let q1f = cm.project(0, &sig(&[0.5, 0.5, 0.5, 0.5])).unwrap();
        assert_eq!(q1f.entries(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn single_group_machine_acts_as_identity_on_span() {
        let basis = OrthonormalSet::canonical(3);
        let cm = ClusteringMachine::new(basis, vec![vec![0, 1, 2]], vec!["all".into()]).unwrap();
        let f = sig(&[0.3, -0.2, 0.9]);
        let qf = cm.project(0, &f).unwrap();
        assert!(sq_distance(&qf, &f).unwrap() < 1e-28);
    }

    #[test]
    fn xor_scores_on_basis_inputs() {
        let cm = xor_machine();
        let sv = cm.project_scores(&sig(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(sv.scores, vec![1.0, 0.0]);
        let sv = cm.project_scores(&sig(&[0.5, 0.5, 0.5, 0.5])).unwrap();
        assert!((sv.scores[0] - 0.5).abs() < 1e-15);
        assert!((sv.scores[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rgb_scores_near_red() {
        let sv = rgb_machine()
            .project_scores(&sig(&[0.95, 0.1, 0.1]))
            .unwrap();
        assert!((sv.scores[0] - 0.9025).abs() < 1e-15);
        assert!((sv.scores[1] - 0.01).abs() < 1e-15);
        assert!((sv.scores[2] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn classify_definite_on_exact_basis_input() {
        let v = xor_machine()
            .classify(&sig(&[0.0, 1.0, 0.0, 0.0]), 0.9, 0.05)
            .unwrap();
        assert_eq!(v.kind, VerdictKind::Definite { group: 1 });
    }

    #[test]
    fn classify_probable_when_score_clears_theta_hi() {
        let v = xor_machine()
            .classify(&sig(&[0.96, 0.28, 0.0, 0.0]), 0.9, 0.05)
            .unwrap();
        match v.kind {
            VerdictKind::Probable { group: 0, score } => assert!((score - 0.9216).abs() < 1e-12),
            other => panic!("expected Probable, got {other:?}"),
        }
    }

    #[test]
    fn classify_split_orders_shares_deterministically() {
        let third = 1.0 / 3f64.sqrt();
        let v = rgb_machine()
            .classify(&sig(&[third, third, third]), 0.9, 0.05)
            .unwrap();
        match v.kind {
            VerdictKind::Split { shares } => {
                // equal scores: ties broken by ascending group index
                assert_eq!(
                    shares.iter().map(|s| s.0).collect::<Vec<_>>(),
                    vec![0, 1, 2]
                );
            }
            other => panic!("expected Split, got {other:?}"),
        }
    }

    #[test]
    fn classify_null_outside_the_span() {
        let v = xor_machine_ambient5()
            .classify(&sig(&[0.0, 0.0, 0.0, 0.0, 1.0]), 0.9, 0.05)
            .unwrap();
        assert_eq!(v.kind, VerdictKind::Null);
    }

    #[test]
    fn classify_missing_output_on_partial_overlap() {
        let inv = 1.0 / 2f64.sqrt();
        let v = xor_machine_ambient5()
            .classify(&sig(&[inv, 0.0, 0.0, 0.0, inv]), 0.9, 0.05)
            .unwrap();
        match v.kind {
            VerdictKind::MissingOutput { residual_norm } => {
                assert!((residual_norm - inv).abs() < 1e-12);
            }
            other => panic!("expected MissingOutput, got {other:?}"),
        }
    }

    #[test]
    fn classify_rejects_zero_signal_and_bad_thresholds() {
        let cm = xor_machine();
        assert_eq!(
            cm.classify(&sig(&[0.0; 4]), 0.9, 0.05).unwrap_err(),
            MachineError::ZeroSignal
        );
        assert_eq!(
            cm.classify(&sig(&[1.0, 0.0, 0.0, 0.0]), 0.05, 0.9)
                .unwrap_err(),
            MachineError::BadThresholds
        );
    }

    #[test]
    fn extend_adopts_the_orthogonal_direction() {
        let cm = xor_machine_ambient5();
        let f = sig(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let (cm2, e_new) = cm.extend(&f).unwrap();
        assert_eq!(cm2.num_outputs(), 3);
        assert_eq!(e_new.entries(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        let sv = cm2.project_scores(&f).unwrap();
        assert!((sv.scores[2] - 1.0).abs() < 1e-12);
        assert!((sv.total - f.norm_sq()).abs() < COMPLETENESS_TOL);
    }

    #[test]
    fn extend_normalizes_a_mixed_residual() {
        let cm = xor_machine_ambient5();
        let inv = 1.0 / 2f64.sqrt();
        let f = sig(&[inv, 0.0, 0.0, 0.0, inv]);
        let (cm2, e_new) = cm.extend(&f).unwrap();
        assert!(sq_distance(&e_new, &sig(&[0.0, 0.0, 0.0, 0.0, 1.0])).unwrap() < 1e-20);
        let sv = cm2.project_scores(&f).unwrap();
        assert!((sv.total - 1.0).abs() < COMPLETENESS_TOL);
    }

    #[test]
    fn extend_rejects_spanned_signals() {
        let cm = xor_machine();
        assert!(matches!(
            cm.extend(&sig(&[0.1, 0.2, 0.3, 0.4])).unwrap_err(),
            MachineError::AlreadySpanned(_)
        ));
    }

    fn random_machine(rng: &mut ChaCha8Rng, dim: usize) -> ClusteringMachine {
        // random rotation of the canonical basis via Gram-Schmidt
        let mut vectors: Vec<Signal> = Vec::new();
        while vectors.len() < dim {
            let cand: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut v = Signal::new(cand).unwrap();
            for e in &vectors {
                v = v.sub(&e.scaled(inner(e, &v).unwrap())).unwrap();
            }
            // repeat the sweep once for numerical orthogonality
            for e in &vectors {
                v = v.sub(&e.scaled(inner(e, &v).unwrap())).unwrap();
            }
            if v.norm() > 1e-6 {
                vectors.push(v.normalized().unwrap());
            }
        }
        let basis = OrthonormalSet::new(vectors).unwrap();
        // random partition into 2..=dim groups
        let m = rng.random_range(2..=dim.max(2)).min(dim);
        let mut groups: Vec<Vec<usize>> = (0..m).map(|a| vec![a]).collect();
        for k in m..dim {
            let g = rng.random_range(0..m);
            groups[g].push(k);
        }
        let labels = (1..=m).map(|a| format!("O{a}")).collect();
        ClusteringMachine::new(basis, groups, labels).unwrap()
    }

    #[test]
    fn projections_onto_distinct_groups_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let dim = rng.random_range(2..8);
            let cm = random_machine(&mut rng, dim);
            let f = Signal::new((0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
            for a in 0..cm.num_outputs() {
                let qa = cm.project(a, &f).unwrap();
                for b in (a + 1)..cm.num_outputs() {
                    let qb = cm.project(b, &f).unwrap();
                    assert!(inner(&qa, &qb).unwrap().abs() <= 1e-10);
                }
                // projecting a projected signal concentrates in group a
                let sv = cm.project_scores(&qa).unwrap();
                let off: f64 = sv
                    .scores
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| *b != a)
                    .map(|(_, q)| q)
                    .sum();
                assert!(off <= 1e-10 * (1.0 + sv.input_norm_sq));
            }
        }
    }

    #[test]
    fn bessel_and_completeness_on_random_machines() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let dim = rng.random_range(2..8);
            let cm = random_machine(&mut rng, dim);
            let f = Signal::new((0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
            let sv = cm.project_scores(&f).unwrap();
            assert!(sv.total <= sv.input_norm_sq + 1e-10);
            // complete basis: equality
            assert!(
                (sv.total - sv.input_norm_sq).abs() <= COMPLETENESS_TOL * (1.0 + sv.input_norm_sq)
            );
        }
    }

    proptest! {
        #[test]
        fn argmax_is_scale_invariant(
            entries in proptest::collection::vec(-5.0f64..5.0, 4),
            c in 0.001f64..1000.0,
        ) {
            let f = Signal::new(entries).unwrap();
            prop_assume!(f.norm_sq() > 1e-6);
            let cm = xor_machine();
            let a = cm.project_scores(&f).unwrap().argmax();
            let b = cm.project_scores(&f.scaled(c)).unwrap().argmax();
            prop_assert_eq!(a, b);
        }
    }
}
