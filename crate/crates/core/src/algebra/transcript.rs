use sha2::{Digest, Sha512};

use super::field::FieldElement;
use super::group::GroupElement;

/// Fiat-Shamir transcript over a running SHA-512 state.
///
/// Every absorbed item is framed as `le64(|label|) || label || le64(|msg|) || msg`,
/// so distinct absorb sequences never produce the same byte stream. A
/// challenge hashes the current state together with its label, reduces the
/// 64-byte digest mod q, and then absorbs the digest so that successive
/// challenges differ.
#[derive(Clone)]
pub struct Transcript {
    state: Sha512,
}

impl Transcript {
    pub fn new(label: &[u8]) -> Self {
        let mut t = Transcript { state: Sha512::new() };
        t.append_message(b"transcript", label);
        t
    }

    pub fn append_message(&mut self, label: &[u8], msg: &[u8]) {
        self.state.update((label.len() as u64).to_le_bytes());
        self.state.update(label);
        self.state.update((msg.len() as u64).to_le_bytes());
        self.state.update(msg);
    }

    pub fn append_u64(&mut self, label: &[u8], v: u64) {
        self.append_message(label, &v.to_le_bytes());
    }

    pub fn append_field(&mut self, label: &[u8], v: &FieldElement) {
        self.append_message(label, &v.to_bytes());
    }

    pub fn append_point(&mut self, label: &[u8], p: &GroupElement) {
        self.append_message(label, &p.to_bytes());
    }

    /// Absorbs an already-serialized point (avoids re-normalizing).
    pub(crate) fn append_point_bytes(&mut self, label: &[u8], bytes: &[u8; 48]) {
        self.append_message(label, bytes);
    }

    pub fn challenge(&mut self, label: &[u8]) -> FieldElement {
        let mut h = self.state.clone();
        h.update(b"challenge");
        h.update((label.len() as u64).to_le_bytes());
        h.update(label);
        let digest: [u8; 64] = h.finalize().into();
        self.append_message(b"challenge-output", &digest);
        FieldElement::from_uniform_bytes(&digest)
    }
}
