//! Sparse binary Merkle tree over a Poseidon-style permutation.
//!
//! The permutation has width 3, S-box `x^5`, 8 full rounds (4 before and 4
//! after) and 56 partial rounds. Round constants are
//! `hash_to_field(POSEIDON_SEED, le64(3 * round + lane))`, and the mixing
//! matrix is the Cauchy matrix `M[i][j] = 1 / (i + j + 3)`. These are
//! demonstration parameters and do not match any external library.
//!
//! `hash2(a, b)` permutes `[a, b, 2]` and returns lane 0.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::algebra::{hash_to_field, FieldElement, FIELD_ELEMENT_BYTES};
use crate::{parallel, Error, Result};

pub const WIDTH: usize = 3;
pub const FULL_ROUNDS: usize = 8;
pub const PARTIAL_ROUNDS: usize = 56;
pub const ALPHA: u64 = 5;
pub const POSEIDON_SEED: &[u8] = b"stateless-witness/poseidon/v1";
/// Capacity lane value used by `hash2`.
pub const HASH2_CAPACITY: u64 = 2;
/// Largest supported tree depth.
pub const MAX_DEPTH: u32 = 63;

pub type State = [FieldElement; WIDTH];

#[derive(Clone, Debug)]
pub struct PoseidonParams {
    round_constants: Vec<State>,
    mds: [State; WIDTH],
}

impl PoseidonParams {
    pub fn new(seed: &[u8]) -> Self {
        let rounds = FULL_ROUNDS + PARTIAL_ROUNDS;
        let round_constants = (0..rounds)
            .map(|r| std::array::from_fn(|i| hash_to_field(seed, &((WIDTH * r + i) as u64).to_le_bytes())))
            .collect();
        let mds = std::array::from_fn(|i| {
            std::array::from_fn(|j| FieldElement::from_u64((i + j + 3) as u64).inverse().expect("non-zero"))
        });
        PoseidonParams { round_constants, mds }
    }

    pub fn shared() -> &'static PoseidonParams {
        static P: OnceLock<PoseidonParams> = OnceLock::new();
        P.get_or_init(|| PoseidonParams::new(POSEIDON_SEED))
    }

    pub fn rounds(&self) -> usize {
        self.round_constants.len()
    }

    pub fn round_constants(&self, round: usize) -> &State {
        &self.round_constants[round]
    }

    pub fn mds(&self) -> &[State; WIDTH] {
        &self.mds
    }

    /// Full rounds apply the S-box to every lane, partial rounds to lane 0.
    pub fn is_full_round(round: usize) -> bool {
        round < FULL_ROUNDS / 2 || round >= FULL_ROUNDS / 2 + PARTIAL_ROUNDS
    }

    pub fn permute(&self, state: &mut State) {
        for (r, rc) in self.round_constants.iter().enumerate() {
            for (s, c) in state.iter_mut().zip(rc) {
                *s += *c;
            }
            if Self::is_full_round(r) {
                for s in state.iter_mut() {
                    *s = sbox(*s);
                }
            } else {
                state[0] = sbox(state[0]);
            }
            *state = self.mix(state);
        }
    }

    pub fn mix(&self, state: &State) -> State {
        std::array::from_fn(|i| self.mds[i].iter().zip(state).map(|(m, s)| *m * *s).sum())
    }

    pub fn hash2(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let mut state = [a, b, FieldElement::from_u64(HASH2_CAPACITY)];
        self.permute(&mut state);
        state[0]
    }
}

fn sbox(x: FieldElement) -> FieldElement {
    let x2 = x.square();
    x2.square() * x
}

/// Two-to-one hash with the shared parameters.
pub fn hash2(a: FieldElement, b: FieldElement) -> FieldElement {
    PoseidonParams::shared().hash2(a, b)
}

/// `defaults[i]` is the root of an empty subtree of height `i`.
pub fn default_hashes(depth: u32) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO];
    for i in 0..depth as usize {
        out.push(hash2(out[i], out[i]));
    }
    out
}

/// Sparse binary tree of fixed depth. Unset leaves are zero.
#[derive(Clone, Debug)]
pub struct BinaryTree {
    depth: u32,
    /// `levels[0]` holds leaves, `levels[depth]` the root.
    levels: Vec<HashMap<u64, FieldElement>>,
    defaults: Vec<FieldElement>,
}

impl BinaryTree {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::InvalidParameter(format!("tree depth {depth} outside 1..={MAX_DEPTH}")));
        }
        Ok(BinaryTree { depth, levels: vec![HashMap::new(); depth as usize + 1], defaults: default_hashes(depth) })
    }

    /// Builds a tree from many leaves at once, hashing each level in parallel.
    pub fn from_leaves(depth: u32, leaves: &[(u64, FieldElement)]) -> Result<Self> {
        let mut tree = BinaryTree::new(depth)?;
        for (i, v) in leaves {
            tree.check_index(*i)?;
            tree.levels[0].insert(*i, *v);
        }
        for level in 0..depth as usize {
            let mut parents: Vec<u64> = tree.levels[level].keys().map(|i| i >> 1).collect();
            parents.sort_unstable();
            parents.dedup();
            let below = &tree.levels[level];
            let default = tree.defaults[level];
            let hashed = parallel::map(&parents, |p| {
                let l = below.get(&(2 * p)).copied().unwrap_or(default);
                let r = below.get(&(2 * p + 1)).copied().unwrap_or(default);
                (*p, hash2(l, r))
            });
            tree.levels[level + 1] = hashed.into_iter().collect();
        }
        Ok(tree)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn defaults(&self) -> &[FieldElement] {
        &self.defaults
    }

    fn check_index(&self, index: u64) -> Result<()> {
        if index >> self.depth != 0 {
            return Err(Error::IndexOutOfRange { index, depth: self.depth });
        }
        Ok(())
    }

    fn node(&self, level: usize, index: u64) -> FieldElement {
        self.levels[level].get(&index).copied().unwrap_or(self.defaults[level])
    }

    pub fn set_leaf(&mut self, index: u64, value: FieldElement) -> Result<()> {
        self.check_index(index)?;
        self.levels[0].insert(index, value);
        let mut cur = value;
        let mut idx = index;
        for level in 0..self.depth as usize {
            let sib = self.node(level, idx ^ 1);
            cur = if idx & 1 == 0 { hash2(cur, sib) } else { hash2(sib, cur) };
            idx >>= 1;
            self.levels[level + 1].insert(idx, cur);
        }
        Ok(())
    }

    pub fn leaf(&self, index: u64) -> Result<FieldElement> {
        self.check_index(index)?;
        Ok(self.node(0, index))
    }

    pub fn root(&self) -> FieldElement {
        self.node(self.depth as usize, 0)
    }

    pub fn branch(&self, index: u64) -> Result<MerkleBranch> {
        self.check_index(index)?;
        let siblings = (0..self.depth as usize).map(|level| self.node(level, (index >> level) ^ 1)).collect();
        Ok(MerkleBranch { index, leaf: self.node(0, index), siblings })
    }
}

/// Leaf, its index, and the sibling hashes from the bottom up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleBranch {
    pub index: u64,
    pub leaf: FieldElement,
    pub siblings: Vec<FieldElement>,
}

impl MerkleBranch {
    pub fn depth(&self) -> usize {
        self.siblings.len()
    }

    /// Root obtained by folding the leaf upward, ignoring index bits above
    /// the branch depth.
    pub fn compute_root(&self) -> FieldElement {
        let params = PoseidonParams::shared();
        self.siblings.iter().enumerate().fold(self.leaf, |cur, (level, sib)| {
            if (self.index >> level) & 1 == 0 {
                params.hash2(cur, *sib)
            } else {
                params.hash2(*sib, cur)
            }
        })
    }

    pub fn serialized_len(&self) -> usize {
        8 + FIELD_ELEMENT_BYTES * (1 + self.siblings.len())
    }

    /// `index (u64 LE) || leaf (32) || siblings (32 each)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        out.extend_from_slice(&self.index.to_le_bytes());
        out.extend_from_slice(&self.leaf.to_bytes());
        for s in &self.siblings {
            out.extend_from_slice(&s.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 + FIELD_ELEMENT_BYTES || (bytes.len() - 8) % FIELD_ELEMENT_BYTES != 0 {
            return Err(Error::malformed("merkle branch", format!("length {}", bytes.len())));
        }
        let index = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"));
        let mut fields = bytes[8..].chunks(FIELD_ELEMENT_BYTES).map(FieldElement::from_bytes);
        let leaf = fields.next().expect("length checked")?;
        let siblings = fields.collect::<Result<Vec<_>>>()?;
        Ok(MerkleBranch { index, leaf, siblings })
    }
}

/// Checks `branch` against `root` for a tree of `depth` levels. A sibling
/// count or index that does not fit the depth is a structural error.
pub fn verify_branch(root: &FieldElement, depth: u32, branch: &MerkleBranch) -> Result<bool> {
    if branch.depth() != depth as usize {
        return Err(Error::DepthMismatch { expected: depth as usize, actual: branch.depth() });
    }
    if depth > MAX_DEPTH || branch.index >> depth != 0 {
        return Err(Error::IndexOutOfRange { index: branch.index, depth });
    }
    Ok(branch.compute_root() == *root)
}

/// Bytes of `t` sibling-path branches with `b`-byte hashes in an arity-`k`
/// tree of `n` leaves: `t * b * (k - 1) * ceil(log_k n)`.
pub fn naive_witness_size(t: u64, b: u64, k: u64, n: u64) -> Result<u64> {
    if k < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!("need k >= 2 and n >= 1, got k={k}, n={n}")));
    }
    let levels = ceil_log(k, n);
    [t, b, k - 1, levels]
        .into_iter()
        .try_fold(1u64, |acc, x| acc.checked_mul(x))
        .ok_or_else(|| Error::InvalidParameter("naive witness size overflows u64".into()))
}

/// Smallest `l` with `k^l >= n`.
pub fn ceil_log(k: u64, n: u64) -> u64 {
    let mut levels = 0;
    let mut reach: u128 = 1;
    while reach < n as u128 {
        reach *= k as u128;
        levels += 1;
    }
    levels
}
