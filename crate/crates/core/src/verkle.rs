//! Arity-256 Verkle tree over 32-byte keys and values.
//!
//! Byte `i` of a key selects the child at depth `i`. A subtree holding a
//! single leaf is stored as that leaf at the shallowest depth where its key
//! diverges from its neighbours. An internal node commits to the vector
//! whose slot `i` is
//!
//! - `map_commitment(C_child)` for an internal child,
//! - `hash_to_field("verkle/leaf", key || value)` for a leaf child,
//! - zero when slot `i` is empty.
//!
//! A witness for a set of keys lists the leaves, the commitments of every
//! non-root internal node on the access paths (each once), and a single
//! multiproof over every parent-child hop.
//!
//! # Witness encoding
//!
//! ```text
//! multiproof                              (self-delimiting, see MultiProof)
//! -- present only if the multiproof is non-empty --
//! u32 LE   K                              number of keys
//! K times: key (32) | depth (u8) | kind (u8) | payload
//!          kind 0 absent:     no payload
//!          kind 1 present:    value (32)
//!          kind 2 diverging:  other key (32) | other value (32)
//! u32 LE   C                              number of path commitments
//! C times: commitment (48)
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::algebra::{hash_to_field, FieldElement, Transcript};
use crate::commitment::{multiprove_with, verify_claims, Commitment, CommitmentKey, MultiProof, OpeningClaim};
use crate::{parallel, Error, Result};

pub type VerkleKey = [u8; 32];
pub type VerkleValue = [u8; 32];

pub const KEY_BYTES: usize = 32;
pub const VALUE_BYTES: usize = 32;

const TRANSCRIPT_LABEL: &[u8] = b"verkle-witness";

/// Slot value of an internal child.
pub fn map_commitment(c: &Commitment) -> FieldElement {
    hash_to_field(b"verkle/commitment", c.as_bytes())
}

/// Slot value of a leaf child.
pub fn leaf_slot(key: &VerkleKey, value: &VerkleValue) -> FieldElement {
    let mut msg = [0u8; 64];
    msg[..32].copy_from_slice(key);
    msg[32..].copy_from_slice(value);
    hash_to_field(b"verkle/leaf", &msg)
}

#[derive(Clone, Debug)]
struct Leaf {
    key: VerkleKey,
    value: VerkleValue,
    slot: FieldElement,
}

#[derive(Clone, Debug)]
struct Internal {
    /// Sorted by child index.
    children: Vec<(u8, Node)>,
    commitment: Commitment,
    slot: FieldElement,
    dirty: bool,
}

#[derive(Clone, Debug)]
enum Node {
    Internal(Box<Internal>),
    Leaf(Leaf),
}

impl Node {
    fn slot(&self) -> FieldElement {
        match self {
            Node::Internal(n) => n.slot,
            Node::Leaf(l) => l.slot,
        }
    }
}

impl Internal {
    fn empty() -> Self {
        let commitment = Commitment::identity();
        Internal { children: Vec::new(), slot: map_commitment(&commitment), commitment, dirty: false }
    }

    fn child(&self, idx: u8) -> Option<&Node> {
        self.children.binary_search_by_key(&idx, |(i, _)| *i).ok().map(|p| &self.children[p].1)
    }

    fn insert(&mut self, depth: usize, key: VerkleKey, value: VerkleValue) -> bool {
        self.dirty = true;
        let idx = key[depth];
        let pos = match self.children.binary_search_by_key(&idx, |(i, _)| *i) {
            Ok(p) => p,
            Err(p) => {
                let slot = leaf_slot(&key, &value);
                self.children.insert(p, (idx, Node::Leaf(Leaf { key, value, slot })));
                return true;
            }
        };
        let child = &mut self.children[pos].1;
        match child {
            Node::Internal(n) => n.insert(depth + 1, key, value),
            Node::Leaf(l) if l.key == key => {
                l.value = value;
                l.slot = leaf_slot(&key, &value);
                false
            }
            Node::Leaf(l) => {
                let old = l.clone();
                let mut split = Internal::empty();
                split.dirty = true;
                split.children.push((old.key[depth + 1], Node::Leaf(old)));
                split.insert(depth + 1, key, value);
                *child = Node::Internal(Box::new(split));
                true
            }
        }
    }

    fn refresh(&mut self, ck: &CommitmentKey) {
        if !self.dirty {
            return;
        }
        parallel::for_each_mut(&mut self.children, |(_, child)| {
            if let Node::Internal(n) = child {
                n.refresh(ck);
            }
        });
        let slots: Vec<(usize, FieldElement)> = self.children.iter().map(|(i, c)| (*i as usize, c.slot())).collect();
        self.commitment = Commitment::from_point(ck.commit_sparse(slots.iter().map(|(i, v)| (*i, v))));
        self.slot = map_commitment(&self.commitment);
        self.dirty = false;
    }

    fn count_internal(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|(_, c)| match c {
                Node::Internal(n) => n.count_internal(),
                Node::Leaf(_) => 0,
            })
            .sum::<usize>()
    }
}

/// In-memory Verkle tree. Mutation marks the touched path dirty;
/// [`VerkleTree::root_commitment`] recommits dirty nodes bottom-up.
#[derive(Clone, Debug)]
pub struct VerkleTree {
    root: Internal,
    len: usize,
    key: &'static CommitmentKey,
}

impl Default for VerkleTree {
    fn default() -> Self {
        Self::new()
    }
}

impl VerkleTree {
    /// Empty tree over the shared 256-wide commitment key.
    pub fn new() -> Self {
        VerkleTree { root: Internal::empty(), len: 0, key: CommitmentKey::shared() }
    }

    pub fn commitment_key(&self) -> &'static CommitmentKey {
        self.key
    }

    /// Inserts or overwrites `key`.
    pub fn insert(&mut self, key: VerkleKey, value: VerkleValue) {
        if self.root.insert(0, key, value) {
            self.len += 1;
        }
    }

    pub fn get(&self, key: &VerkleKey) -> Option<VerkleValue> {
        let mut node = &self.root;
        for &b in key.iter() {
            match node.child(b)? {
                Node::Internal(n) => node = n,
                Node::Leaf(l) => return (l.key == *key).then_some(l.value),
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_clean(&self) -> bool {
        !self.root.dirty
    }

    /// Number of internal nodes, root included.
    pub fn internal_node_count(&self) -> usize {
        self.root.count_internal()
    }

    /// Depth at which `key`'s slot lives: the leaf's depth if present,
    /// otherwise the depth of the empty or diverging slot.
    pub fn depth_of(&self, key: &VerkleKey) -> usize {
        let mut node = &self.root;
        for (d, &b) in key.iter().enumerate() {
            match node.child(b) {
                Some(Node::Internal(n)) => node = n,
                _ => return d,
            }
        }
        unreachable!("distinct keys diverge before the last byte")
    }

    /// Recommits all dirty nodes. The empty tree commits to the zero vector.
    pub fn root_commitment(&mut self) -> Commitment {
        self.root.refresh(self.key);
        self.root.commitment
    }

    /// Root commitment of a clean tree.
    pub fn cached_root(&self) -> Result<Commitment> {
        if self.root.dirty {
            return Err(Error::DirtyTree);
        }
        Ok(self.root.commitment)
    }

    /// Builds a witness for `keys` (duplicates are ignored). Requires a clean
    /// tree.
    pub fn make_witness(&self, keys: &[VerkleKey]) -> Result<VerkleWitness> {
        if self.root.dirty {
            return Err(Error::DirtyTree);
        }
        let keys = normalize_keys(keys);
        let mut entries = Vec::with_capacity(keys.len());
        let mut paths: Vec<Vec<&Internal>> = Vec::with_capacity(keys.len());
        for key in &keys {
            let mut node = &self.root;
            let mut path = vec![node];
            let mut depth = 0;
            let proof = loop {
                match node.child(key[depth]) {
                    None => break LeafProof::Absent,
                    Some(Node::Leaf(l)) if l.key == *key => break LeafProof::Present(l.value),
                    Some(Node::Leaf(l)) => break LeafProof::Diverging { key: l.key, value: l.value },
                    Some(Node::Internal(n)) => {
                        node = n;
                        path.push(node);
                        depth += 1;
                    }
                }
            };
            entries.push(WitnessEntry { key: *key, depth: depth as u8, proof });
            paths.push(path);
        }

        let mut path_commitments = Vec::new();
        let mut seen_nodes = HashSet::new();
        let mut seen_openings = HashSet::new();
        let mut opened: Vec<(&Internal, u8)> = Vec::new();
        let mut claims = Vec::new();
        for (entry, path) in entries.iter().zip(&paths) {
            for (i, node) in path.iter().enumerate().skip(1) {
                if seen_nodes.insert(node_id(&entry.key, i)) {
                    path_commitments.push(node.commitment);
                }
            }
            for (i, node) in path.iter().enumerate() {
                let idx = entry.key[i];
                if !seen_openings.insert((node_id(&entry.key, i), idx)) {
                    continue;
                }
                let value = if i < path.len() - 1 { path[i + 1].slot } else { entry.terminal_slot() };
                opened.push((node, idx));
                claims.push(OpeningClaim { commitment: &node.commitment, point: self.key.domain().point(idx as usize), value });
            }
        }

        let mut transcript = Transcript::new(TRANSCRIPT_LABEL);
        transcript.append_point_bytes(b"root", self.root.commitment.as_bytes());
        let multiproof = multiprove_with(
            self.key,
            &claims,
            |i, coeff, acc| {
                for (idx, child) in &opened[i].0.children {
                    acc[*idx as usize] += coeff * child.slot();
                }
            },
            &mut transcript,
        )?;
        Ok(VerkleWitness { entries, path_commitments, multiproof })
    }
}

fn normalize_keys(keys: &[VerkleKey]) -> Vec<VerkleKey> {
    let mut keys = keys.to_vec();
    keys.sort_unstable();
    keys.dedup();
    keys
}

/// Identifies the node reached after `depth` hops along `key`.
fn node_id(key: &VerkleKey, depth: usize) -> (u8, VerkleKey) {
    let mut prefix = [0u8; 32];
    prefix[..depth].copy_from_slice(&key[..depth]);
    (depth as u8, prefix)
}

/// What the slot at the end of a key's path holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafProof {
    /// The slot is empty.
    Absent,
    Present(VerkleValue),
    /// The slot holds a different key's leaf.
    Diverging { key: VerkleKey, value: VerkleValue },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessEntry {
    pub key: VerkleKey,
    /// Depth of the node whose slot `key[depth]` terminates the path.
    pub depth: u8,
    pub proof: LeafProof,
}

impl WitnessEntry {
    fn terminal_slot(&self) -> FieldElement {
        match &self.proof {
            LeafProof::Absent => FieldElement::ZERO,
            LeafProof::Present(v) => leaf_slot(&self.key, v),
            LeafProof::Diverging { key, value } => leaf_slot(key, value),
        }
    }

    pub fn value(&self) -> Option<VerkleValue> {
        match self.proof {
            LeafProof::Present(v) => Some(v),
            _ => None,
        }
    }
}

/// Leaves, deduplicated path commitments and one multiproof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerkleWitness {
    pub entries: Vec<WitnessEntry>,
    /// Non-root internal commitments in first-appearance order.
    pub path_commitments: Vec<Commitment>,
    pub multiproof: MultiProof,
}

/// Byte breakdown of an encoded witness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WitnessSize {
    /// Keys, values and diverging leaves.
    pub leaves: usize,
    pub commitments: usize,
    pub multiproof: usize,
    /// Counts, depths and kind tags.
    pub metadata: usize,
}

impl WitnessSize {
    pub fn total(&self) -> usize {
        self.leaves + self.commitments + self.multiproof + self.metadata
    }
}

/// Exact encoded size of `witness`, split by component.
pub fn witness_size_bytes(witness: &VerkleWitness) -> WitnessSize {
    let multiproof = witness.multiproof.serialized_len();
    if witness.multiproof.is_empty() {
        return WitnessSize { multiproof, ..Default::default() };
    }
    let leaves = witness
        .entries
        .iter()
        .map(|e| {
            KEY_BYTES
                + match e.proof {
                    LeafProof::Absent => 0,
                    LeafProof::Present(_) => VALUE_BYTES,
                    LeafProof::Diverging { .. } => KEY_BYTES + VALUE_BYTES,
                }
        })
        .sum();
    WitnessSize {
        leaves,
        commitments: witness.path_commitments.len() * Commitment::BYTES,
        multiproof,
        metadata: 4 + 2 * witness.entries.len() + 4,
    }
}

impl VerkleWitness {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(witness_size_bytes(self).total());
        self.multiproof.write(&mut out);
        if self.multiproof.is_empty() {
            return out;
        }
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&e.key);
            out.push(e.depth);
            match &e.proof {
                LeafProof::Absent => out.push(0),
                LeafProof::Present(v) => {
                    out.push(1);
                    out.extend_from_slice(v);
                }
                LeafProof::Diverging { key, value } => {
                    out.push(2);
                    out.extend_from_slice(key);
                    out.extend_from_slice(value);
                }
            }
        }
        out.extend_from_slice(&(self.path_commitments.len() as u32).to_le_bytes());
        for c in &self.path_commitments {
            out.extend_from_slice(c.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (multiproof, used) = MultiProof::decode_prefix(bytes)?;
        let mut r = Reader { bytes, pos: used };
        if multiproof.is_empty() {
            r.finish()?;
            return Ok(VerkleWitness { entries: Vec::new(), path_commitments: Vec::new(), multiproof });
        }
        let k = r.u32()? as usize;
        let mut entries = Vec::with_capacity(k.min(1 << 16));
        for _ in 0..k {
            let key = r.array::<32>()?;
            let depth = r.u8()?;
            let proof = match r.u8()? {
                0 => LeafProof::Absent,
                1 => LeafProof::Present(r.array::<32>()?),
                2 => LeafProof::Diverging { key: r.array::<32>()?, value: r.array::<32>()? },
                _ => return Err(Error::malformed("verkle witness", "unknown leaf kind")),
            };
            entries.push(WitnessEntry { key, depth, proof });
        }
        let c = r.u32()? as usize;
        let mut path_commitments = Vec::with_capacity(c.min(1 << 16));
        for _ in 0..c {
            path_commitments.push(Commitment::from_bytes(r.take(Commitment::BYTES)?)?);
        }
        r.finish()?;
        Ok(VerkleWitness { entries, path_commitments, multiproof })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::malformed("verkle witness", "truncated"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array::<4>()?))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::malformed("verkle witness", format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

/// Outcome of verifying a well-formed witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessVerdict {
    /// Every queried key is bound to its value (`None` for absent keys).
    Accepted(BTreeMap<VerkleKey, Option<VerkleValue>>),
    Rejected,
}

impl WitnessVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, WitnessVerdict::Accepted(_))
    }
}

/// Checks `witness` for `keys` against `root`, using the shared key.
///
/// Returns `Err` when the witness is structurally malformed (keys that do
/// not match the query, bad depths, leftover commitments) and
/// `Ok(Rejected)` when it is well formed but does not verify.
pub fn verify_witness(root: &Commitment, keys: &[VerkleKey], witness: &VerkleWitness) -> Result<WitnessVerdict> {
    let ck = CommitmentKey::shared();
    let keys = normalize_keys(keys);
    if witness.entries.len() != keys.len() || witness.entries.iter().zip(&keys).any(|(e, k)| e.key != *k) {
        return Err(Error::malformed("verkle witness", "entries do not match the queried keys"));
    }

    let mut node_coms: HashMap<(u8, VerkleKey), usize> = HashMap::new();
    let mut next = 0usize;
    let mut openings: HashMap<((u8, VerkleKey), u8), FieldElement> = HashMap::new();
    let mut claims: Vec<(usize, u8, FieldElement)> = Vec::new();
    // Index usize::MAX stands for the root commitment.
    const ROOT: usize = usize::MAX;
    for e in &witness.entries {
        let depth = e.depth as usize;
        if depth >= KEY_BYTES {
            return Err(Error::malformed("verkle witness", format!("depth {depth} out of range")));
        }
        if let LeafProof::Diverging { key, .. } = &e.proof {
            if *key == e.key || key[..=depth] != e.key[..=depth] {
                return Err(Error::malformed("verkle witness", "diverging leaf does not share the path"));
            }
        }
        let mut path = Vec::with_capacity(depth + 1);
        path.push(ROOT);
        for i in 1..=depth {
            let id = node_id(&e.key, i);
            let c = match node_coms.get(&id) {
                Some(&c) => c,
                None => {
                    if next >= witness.path_commitments.len() {
                        return Err(Error::malformed("verkle witness", "too few path commitments"));
                    }
                    node_coms.insert(id, next);
                    next += 1;
                    next - 1
                }
            };
            path.push(c);
        }
        for i in 0..=depth {
            let idx = e.key[i];
            let y = if i < depth { map_commitment(&witness.path_commitments[path[i + 1]]) } else { e.terminal_slot() };
            match openings.get(&(node_id(&e.key, i), idx)) {
                Some(prev) if *prev != y => return Ok(WitnessVerdict::Rejected),
                Some(_) => {}
                None => {
                    openings.insert((node_id(&e.key, i), idx), y);
                    claims.push((path[i], idx, y));
                }
            }
        }
    }
    if next != witness.path_commitments.len() {
        return Err(Error::malformed("verkle witness", "unused path commitments"));
    }

    let claims: Vec<OpeningClaim<'_>> = claims
        .iter()
        .map(|&(c, idx, y)| OpeningClaim {
            commitment: if c == ROOT { root } else { &witness.path_commitments[c] },
            point: ck.domain().point(idx as usize),
            value: y,
        })
        .collect();
    let mut transcript = Transcript::new(TRANSCRIPT_LABEL);
    transcript.append_point_bytes(b"root", root.as_bytes());
    if !verify_claims(ck, &claims, &witness.multiproof, &mut transcript)? {
        return Ok(WitnessVerdict::Rejected);
    }
    Ok(WitnessVerdict::Accepted(witness.entries.iter().map(|e| (e.key, e.value())).collect()))
}
