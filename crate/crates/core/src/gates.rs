//! XOR and OR gates as clustering machines over the canonical ℝ⁴ basis,
//! and the rank-deficient transport operator between their projector sets.
//!
//! The two gates share inputs but group them differently, so their
//! projectors have different traces and no similarity Q̃ = UQU⁻¹ can relate
//! them. Transport still works one level up: map each projector to an
//! orthonormal tag vector φ_j and move the tags with U = |φ₁⟩⟨φ₃|+|φ₂⟩⟨φ₄|.

use thiserror::Error;

use crate::machine::{ClusteringMachine, MachineError, OrthonormalSet};
use crate::signal::{inner, Signal, SignalError};

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("{0:?} is not a projector of the source gate for this direction")]
    WrongDirection(ProjectorId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Xor,
    Or,
}

/// The four projectors involved in the transport: Q₁, Q₂ of the XOR gate and
/// Q̃₁, Q̃₂ of the OR gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorId {
    Xor1,
    Xor2,
    Or1,
    Or2,
}

impl ProjectorId {
    pub const ALL: [ProjectorId; 4] = [
        ProjectorId::Xor1,
        ProjectorId::Xor2,
        ProjectorId::Or1,
        ProjectorId::Or2,
    ];

    /// Index of the tag vector φ assigned to this projector.
    fn tag_index(self) -> usize {
        match self {
            ProjectorId::Xor1 => 0,
            ProjectorId::Xor2 => 1,
            ProjectorId::Or1 => 2,
            ProjectorId::Or2 => 3,
        }
    }

    fn from_tag_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

/// A two-output gate realized as a clustering machine.
///
/// Inputs are tagged e₁=(0,0), e₂=(0,1), e₃=(1,0), e₄=(1,1). The XOR groups
/// {e₁,e₄} (output 0) against {e₂,e₃} (output 1); the OR groups {e₁} against
/// the rest.
#[derive(Clone, Debug)]
pub struct GateMachine {
    kind: GateKind,
    machine: ClusteringMachine,
}

impl GateMachine {
    pub fn new(kind: GateKind) -> Self {
        let groups = match kind {
            GateKind::Xor => vec![vec![0, 3], vec![1, 2]],
            GateKind::Or => vec![vec![0], vec![1, 2, 3]],
        };
        let machine = ClusteringMachine::new(
            OrthonormalSet::canonical(4),
            groups,
            vec!["O1".into(), "O2".into()],
        )
        .unwrap();
        Self { kind, machine }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn machine(&self) -> &ClusteringMachine {
        &self.machine
    }

    /// (q₁, q₂) for a signal in ℝ⁴.
    pub fn scores(&self, f: &Signal) -> Result<(f64, f64), GateError> {
        let sv = self.machine.project_scores(f)?;
        Ok((sv.scores[0], sv.scores[1]))
    }

    /// The boolean truth table realized by this gate: rows of
    /// ((bit, bit), output group index).
    pub fn truth_table(&self) -> [((u8, u8), usize); 4] {
        let inputs = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let mut rows = [((0, 0), 0); 4];
        for (j, bits) in inputs.into_iter().enumerate() {
            let f = Signal::basis_vector(4, j).unwrap();
            let (q1, q2) = self.scores(&f).unwrap();
            rows[j] = (bits, if q2 > q1 { 1 } else { 0 });
        }
        rows
    }

    /// Trace of the projector Q_α, evaluated as Σ_i ⟨e_i, Q_α e_i⟩.
    pub fn projector_trace(&self, alpha: usize) -> f64 {
        (0..4)
            .map(|i| {
                let e = Signal::basis_vector(4, i).unwrap();
                let q = self.machine.project(alpha, &e).unwrap();
                inner(&e, &q).unwrap()
            })
            .sum()
    }
}

/// The tag map Φ and the operator U that carries OR projectors to XOR
/// projectors (and back via U†).
///
/// Concretely Φ(Q₁)=φ₁, Φ(Q₂)=φ₂, Φ(Q̃₁)=φ₃, Φ(Q̃₂)=φ₄ with φ_j the canonical
/// ℝ⁴ basis. U = |φ₁⟩⟨φ₃| + |φ₂⟩⟨φ₄| annihilates φ₁, φ₂, so it is rank 2 and
/// not invertible.
#[derive(Clone, Debug)]
pub struct TransportMap {
    u: [[f64; 4]; 4],
}

impl Default for TransportMap {
    fn default() -> Self {
        Self::new()
    }
}

impl TransportMap {
    pub fn new() -> Self {
        let mut u = [[0.0; 4]; 4];
        u[0][2] = 1.0; // |φ1><φ3|
        u[1][3] = 1.0; // |φ2><φ4|
        Self { u }
    }

    fn apply(&self, adjoint: bool, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (r, row) in self.u.iter().enumerate() {
            for (c, coeff) in row.iter().enumerate() {
                if adjoint {
                    out[c] += coeff * v[r];
                } else {
                    out[r] += coeff * v[c];
                }
            }
        }
        out
    }

    fn transport(&self, adjoint: bool, id: ProjectorId) -> Result<ProjectorId, GateError> {
        let mut phi = [0.0; 4];
        phi[id.tag_index()] = 1.0;
        let moved = self.apply(adjoint, phi);
        // the image must be exactly one tag vector; U annihilates the others
        let hits: Vec<usize> = (0..4).filter(|&i| moved[i] != 0.0).collect();
        match hits.as_slice() {
            [i] if moved[*i] == 1.0 => Ok(ProjectorId::from_tag_index(*i)),
            _ => Err(GateError::WrongDirection(id)),
        }
    }

    /// Q_j = Φ⁻¹(U Φ(Q̃_j)): carries OR projectors to XOR projectors.
    pub fn or_to_xor(&self, id: ProjectorId) -> Result<ProjectorId, GateError> {
        self.transport(false, id)
    }

    /// The inverse direction, implemented by U†.
    pub fn xor_to_or(&self, id: ProjectorId) -> Result<ProjectorId, GateError> {
        self.transport(true, id)
    }
}

/// (trace Q₁, trace Q̃₁) — unequal traces witness that no invertible U with
/// Q̃_j = U Q_j U⁻¹ can exist, since similarity preserves traces.
pub fn similarity_obstruction() -> (f64, f64) {
    let xor = GateMachine::new(GateKind::Xor);
    let or = GateMachine::new(GateKind::Or);
    (xor.projector_trace(0), or.projector_trace(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e4(i: usize) -> Signal {
        Signal::basis_vector(4, i).unwrap()
    }

    #[test]
    fn xor_scores_follow_the_truth_table() {
        let gate = GateMachine::new(GateKind::Xor);
        assert_eq!(gate.scores(&e4(0)).unwrap(), (1.0, 0.0));
        assert_eq!(gate.scores(&e4(1)).unwrap(), (0.0, 1.0));
        assert_eq!(gate.scores(&e4(2)).unwrap(), (0.0, 1.0));
        assert_eq!(gate.scores(&e4(3)).unwrap(), (1.0, 0.0));
        assert_eq!(
            gate.truth_table().map(|(_, o)| o),
            // XOR: 0^0=0, 0^1=1, 1^0=1, 1^1=0 (group 0 is output "0")
            [0, 1, 1, 0]
        );
    }

    #[test]
    fn or_scores_follow_the_truth_table() {
        let gate = GateMachine::new(GateKind::Or);
        assert_eq!(gate.scores(&e4(0)).unwrap(), (1.0, 0.0));
        assert_eq!(gate.scores(&e4(3)).unwrap(), (0.0, 1.0));
        assert_eq!(gate.truth_table().map(|(_, o)| o), [0, 1, 1, 1]);
    }

    #[test]
    fn normalized_inputs_split_unit_energy() {
        let gate = GateMachine::new(GateKind::Xor);
        let f = Signal::new(vec![0.5, -0.5, 0.5, -0.5]).unwrap();
        let (q1, q2) = gate.scores(&f).unwrap();
        assert!((q1 + q2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transport_carries_or_projectors_to_xor() {
        let map = TransportMap::new();
        assert_eq!(map.or_to_xor(ProjectorId::Or1).unwrap(), ProjectorId::Xor1);
        assert_eq!(map.or_to_xor(ProjectorId::Or2).unwrap(), ProjectorId::Xor2);
        assert_eq!(map.xor_to_or(ProjectorId::Xor1).unwrap(), ProjectorId::Or1);
        assert_eq!(map.xor_to_or(ProjectorId::Xor2).unwrap(), ProjectorId::Or2);
    }

    #[test]
    fn transport_round_trips_are_identities() {
        let map = TransportMap::new();
        for id in [ProjectorId::Or1, ProjectorId::Or2] {
            assert_eq!(map.xor_to_or(map.or_to_xor(id).unwrap()).unwrap(), id);
        }
        for id in [ProjectorId::Xor1, ProjectorId::Xor2] {
            assert_eq!(map.or_to_xor(map.xor_to_or(id).unwrap()).unwrap(), id);
        }
    }

    #[test]
    fn transport_rejects_the_annihilated_directions() {
        let map = TransportMap::new();
        // U kills φ1, φ2, so XOR projectors cannot ride the OR→XOR direction
        assert_eq!(
            map.or_to_xor(ProjectorId::Xor1).unwrap_err(),
            GateError::WrongDirection(ProjectorId::Xor1)
        );
        assert_eq!(
            map.xor_to_or(ProjectorId::Or2).unwrap_err(),
            GateError::WrongDirection(ProjectorId::Or2)
        );
    }

    #[test]
    fn traces_obstruct_similarity() {
        assert_eq!(similarity_obstruction(), (2.0, 1.0));
        let xor = GateMachine::new(GateKind::Xor);
        let or = GateMachine::new(GateKind::Or);
        assert_eq!(xor.projector_trace(1), 2.0);
        assert_eq!(or.projector_trace(1), 3.0);
        // both machines resolve the identity on ℝ⁴
        assert_eq!(xor.projector_trace(0) + xor.projector_trace(1), 4.0);
        assert_eq!(or.projector_trace(0) + or.projector_trace(1), 4.0);
    }
}
