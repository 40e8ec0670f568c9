//! Proof backends for constraint-system satisfaction and per-branch
//! proving.
//!
//! [`IpaBackend`] is a transparent succinct argument. [`MockBackend`] ships
//! the private witness as its "proof" and re-checks every constraint; it
//! exists to test circuits and the harness without cryptography.

mod ipa;

use std::sync::Arc;

pub use ipa::{IpaMaterial, IpaProof};

use crate::algebra::{FieldElement, FIELD_ELEMENT_BYTES};
use crate::circuit::{assign_branch, build_branch_circuit, is_satisfied, Assignment, ConstraintSystem};
use crate::merkle::MerkleBranch;
use crate::{Error, Result};

/// Size the per-branch proof is modeled at in size reports, in bytes.
pub const MODELED_PROOF_BYTES: usize = 192;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum BackendKind {
    Ipa = 1,
    Mock = 2,
}

impl BackendKind {
    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1 => Ok(BackendKind::Ipa),
            2 => Ok(BackendKind::Mock),
            _ => Err(Error::InvalidEncoding("unknown backend tag")),
        }
    }
}

/// A proof together with the public inputs it was made for.
///
/// Encoding: `tag (u8) || u32 LE len || proof || u32 LE len || public`,
/// where `public` is the concatenation of 32-byte field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchProof {
    pub backend: BackendKind,
    pub proof: Vec<u8>,
    pub public_inputs: Vec<FieldElement>,
}

impl BranchProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        out.push(self.backend as u8);
        out.extend_from_slice(&(self.proof.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.proof);
        out.extend_from_slice(&((self.public_inputs.len() * FIELD_ELEMENT_BYTES) as u32).to_le_bytes());
        for p in &self.public_inputs {
            out.extend_from_slice(&p.to_bytes());
        }
        out
    }

    pub fn serialized_len(&self) -> usize {
        1 + 4 + self.proof.len() + 4 + self.public_inputs.len() * FIELD_ELEMENT_BYTES
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let truncated = || Error::malformed("branch proof", "truncated");
        let backend = BackendKind::from_tag(*bytes.first().ok_or_else(truncated)?)?;
        let mut at = 1;
        let chunk = |at: &mut usize| -> Result<&[u8]> {
            let len_bytes = bytes.get(*at..*at + 4).ok_or_else(truncated)?;
            let len = u32::from_le_bytes(len_bytes.try_into().expect("4 bytes")) as usize;
            let body = bytes.get(*at + 4..*at + 4 + len).ok_or_else(truncated)?;
            *at += 4 + len;
            Ok(body)
        };
        let proof = chunk(&mut at)?.to_vec();
        let public = chunk(&mut at)?;
        if at != bytes.len() {
            return Err(Error::malformed("branch proof", "trailing bytes"));
        }
        if public.len() % FIELD_ELEMENT_BYTES != 0 {
            return Err(Error::malformed("branch proof", "public inputs not a multiple of 32 bytes"));
        }
        let public_inputs =
            public.chunks(FIELD_ELEMENT_BYTES).map(FieldElement::from_bytes).collect::<Result<Vec<_>>>()?;
        Ok(BranchProof { backend, proof, public_inputs })
    }
}

/// A proof system for one constraint system at a time.
pub trait ProverBackend: Sync {
    type Material: Send + Sync;

    fn kind(&self) -> BackendKind;

    fn setup(&self, cs: &ConstraintSystem) -> Result<Self::Material>;

    fn prove(&self, material: &Self::Material, assignment: &Assignment) -> Result<BranchProof>;

    /// Checks `proof` against `public_inputs`. Never looks at private
    /// values. `Err` means the proof bytes are malformed.
    fn verify(&self, material: &Self::Material, public_inputs: &[FieldElement], proof: &[u8]) -> Result<bool>;

    /// Verifies a [`BranchProof`] against the public inputs it carries.
    fn verify_proof(&self, material: &Self::Material, proof: &BranchProof) -> Result<bool> {
        if proof.backend != self.kind() {
            return Ok(false);
        }
        self.verify(material, &proof.public_inputs, &proof.proof)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IpaBackend;

impl ProverBackend for IpaBackend {
    type Material = IpaMaterial;

    fn kind(&self) -> BackendKind {
        BackendKind::Ipa
    }

    fn setup(&self, cs: &ConstraintSystem) -> Result<IpaMaterial> {
        IpaMaterial::setup(cs)
    }

    fn prove(&self, material: &IpaMaterial, assignment: &Assignment) -> Result<BranchProof> {
        let proof = ipa::prove(material, assignment)?;
        Ok(BranchProof {
            backend: BackendKind::Ipa,
            proof: proof.to_bytes(),
            public_inputs: assignment.public_inputs().to_vec(),
        })
    }

    fn verify(&self, material: &IpaMaterial, public_inputs: &[FieldElement], proof: &[u8]) -> Result<bool> {
        let proof = IpaProof::from_bytes(proof, material.rounds())?;
        ipa::verify(material, public_inputs, &proof)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MockBackend;

impl ProverBackend for MockBackend {
    type Material = Arc<ConstraintSystem>;

    fn kind(&self) -> BackendKind {
        BackendKind::Mock
    }

    fn setup(&self, cs: &ConstraintSystem) -> Result<Arc<ConstraintSystem>> {
        Ok(Arc::new(cs.clone()))
    }

    /// The proof is the private witness, 32 bytes per private variable.
    fn prove(&self, _cs: &Arc<ConstraintSystem>, assignment: &Assignment) -> Result<BranchProof> {
        Ok(BranchProof {
            backend: BackendKind::Mock,
            proof: assignment.private_values().iter().flat_map(|v| v.to_bytes()).collect(),
            public_inputs: assignment.public_inputs().to_vec(),
        })
    }

    fn verify(&self, cs: &Arc<ConstraintSystem>, public_inputs: &[FieldElement], proof: &[u8]) -> Result<bool> {
        if public_inputs.len() != cs.num_public() {
            return Err(Error::LengthMismatch { expected: cs.num_public(), actual: public_inputs.len() });
        }
        if proof.len() != cs.num_private() * FIELD_ELEMENT_BYTES {
            return Err(Error::LengthMismatch { expected: cs.num_private() * FIELD_ELEMENT_BYTES, actual: proof.len() });
        }
        let mut values = Vec::with_capacity(cs.num_variables());
        values.push(FieldElement::ONE);
        values.extend_from_slice(public_inputs);
        for chunk in proof.chunks(FIELD_ELEMENT_BYTES) {
            values.push(FieldElement::from_bytes(chunk)?);
        }
        is_satisfied(cs, &Assignment::new(values, cs.num_public())?)
    }
}

/// Accept/reject decision for proving `assignment`: an unsatisfied
/// assignment that the prover refuses counts as a rejection.
pub fn decide<B: ProverBackend>(backend: &B, material: &B::Material, assignment: &Assignment) -> Result<bool> {
    match backend.prove(material, assignment) {
        Ok(proof) => backend.verify_proof(material, &proof),
        Err(Error::Unsatisfied) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Proves each `(branch, root)` pair separately with one shared circuit.
/// All branches must have the same depth.
pub fn batch_prove<B: ProverBackend>(
    backend: &B,
    branches: &[(MerkleBranch, FieldElement)],
) -> Result<(Option<B::Material>, Vec<BranchProof>)> {
    let Some((first, _)) = branches.first() else {
        return Ok((None, Vec::new()));
    };
    let depth = first.depth();
    if let Some((b, _)) = branches.iter().find(|(b, _)| b.depth() != depth) {
        return Err(Error::DepthMismatch { expected: depth, actual: b.depth() });
    }
    let cs = build_branch_circuit(depth)?;
    let material = backend.setup(&cs)?;
    let proofs = crate::parallel::map(branches, |(branch, root)| {
        let assignment = assign_branch(&cs, branch, root)?;
        backend.prove(&material, &assignment)
    });
    Ok((Some(material), proofs.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Witness bytes of per-branch proofs plus 32-byte key and value per
/// branch, using the measured proof lengths.
pub fn measured_witness_bytes(proofs: &[BranchProof]) -> usize {
    proofs.iter().map(|p| p.proof.len() + 2 * 32).sum()
}

/// The same total with every proof counted at [`MODELED_PROOF_BYTES`].
pub fn modeled_witness_bytes(branches: usize) -> usize {
    branches * (MODELED_PROOF_BYTES + 2 * 32)
}
