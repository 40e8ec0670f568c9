//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every expected value is computed here by an oracle that shares no code
//! path with the routine under test beyond the primitives it is defined
//! over (field arithmetic, the slot hashes, `commit`).

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use stateless_witness::algebra::{EvaluationDomain, FieldElement, Polynomial, Transcript};
use stateless_witness::backend::{batch_prove, decide, IpaBackend, MockBackend, ProverBackend};
use stateless_witness::bench::{self, BenchConfig, BenchRecord};
use stateless_witness::circuit::{assign_branch, build_branch_circuit, is_satisfied};
use stateless_witness::commitment::{multiprove, verify_multiproof, Commitment, CommitmentKey, ProverOpening};
use stateless_witness::merkle::{hash2, naive_witness_size, verify_branch, BinaryTree, MerkleBranch};
use stateless_witness::sizing::{estimate, Scheme, SizeModel};
use stateless_witness::verkle::{
    leaf_slot, map_commitment, verify_witness, LeafProof, VerkleKey, VerkleTree, VerkleValue, VerkleWitness,
    WitnessEntry, WitnessVerdict,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fe(v: u64) -> FieldElement {
    FieldElement::from_u64(v)
}

// ---------------------------------------------------------------------------
// 1, 2: closed-form size models

fn verkle_block_size() -> Outcome {
    let got = estimate(&SizeModel::verkle(5000, 10_000)).map_err(|e| e.to_string())?.total;
    let want = 2 * 5000 * 32 + 10_000 * 48 + 200;
    ensure!(got == want && want == 800_200, "estimate {got}, expected {want}");
    Ok(format!("{got} bytes"))
}

fn snark_block_size() -> Outcome {
    let got = estimate(&SizeModel::snark_merkle(5000)).map_err(|e| e.to_string())?.total;
    // Pre- and post-state branch per key, each a 192-byte proof plus a
    // 32-byte key and a 32-byte value.
    let want = 2 * 5000 * (192 + 32 + 32);
    ensure!(got == want && want == 2_560_000, "estimate {got}, expected {want}");
    Ok(format!("{got} bytes"))
}

// ---------------------------------------------------------------------------
// 3: naive sibling-path size

/// Levels of a complete arity-`k` tree over `n` leaves, by repeated ceiling
/// division.
fn levels_by_division(k: u64, n: u64) -> u64 {
    let (mut nodes, mut levels) = (n as u128, 0);
    while nodes > 1 {
        nodes = nodes.div_ceil(k as u128);
        levels += 1;
    }
    levels
}

/// Walks from each leaf to the root and counts sibling slots one by one.
fn counted_siblings(k: u64, n: u64, leaves: &[u64]) -> u64 {
    let levels = levels_by_division(k, n);
    let mut total = 0u64;
    for &leaf in leaves {
        let mut idx = leaf as u128;
        for _ in 0..levels {
            let first = idx - idx % k as u128;
            total += (first..first + k as u128).filter(|s| *s != idx).count() as u64;
            idx /= k as u128;
        }
    }
    total
}

fn naive_size_shape() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (t, b) = (5000u64, 32u64);
    let mut checked = 0;
    for k in [2u64, 16, 256] {
        let mut per_level = None;
        for log_n in 10..=28 {
            let n = 1u64 << log_n;
            let size = naive_witness_size(t, b, k, n).map_err(|e| e.to_string())?;
            let levels = levels_by_division(k, n);
            ensure!(size % ((k - 1) * levels) == 0, "k={k} N=2^{log_n}: {size} not a multiple of (k-1)*levels");
            let unit = size / ((k - 1) * levels);
            ensure!(*per_level.get_or_insert(unit) == unit, "k={k}: per-level size changed at N=2^{log_n}");
            ensure!(unit == t * b, "k={k}: per-level unit {unit} != t*b");
            checked += 1;
        }
    }
    // Direct counting on trees of depth at most 8.
    for k in [2u64, 16, 256] {
        let max_n = (k as u128).pow(8).min(u64::MAX as u128) as u64;
        let mut sizes: Vec<u64> = (1..=64).collect();
        sizes.extend((0..200).map(|_| rng.gen_range(1..=max_n)));
        sizes.push(max_n);
        for n in sizes {
            ensure!(levels_by_division(k, n) <= 8, "depth above 8");
            let t = rng.gen_range(1..=20u64);
            let leaves: Vec<u64> = (0..t).map(|_| rng.gen_range(0..n)).collect();
            let want = counted_siblings(k, n, &leaves) * b;
            let got = naive_witness_size(t, b, k, n).map_err(|e| e.to_string())?;
            ensure!(got == want, "k={k} n={n} t={t}: formula {got}, counted {want}");
            checked += 1;
        }
    }
    // Materialized binary trees: real branches carry exactly that many
    // sibling hashes.
    for n in 2..=256u64 {
        let depth = levels_by_division(2, n) as u32;
        let leaves: Vec<(u64, FieldElement)> = (0..n).map(|i| (i, fe(i + 1))).collect();
        let tree = BinaryTree::from_leaves(depth, &leaves).map_err(|e| e.to_string())?;
        let idx = rng.gen_range(0..n);
        let branch = tree.branch(idx).map_err(|e| e.to_string())?;
        let expected = naive_witness_size(1, 32, 2, n).map_err(|e| e.to_string())?;
        ensure!(branch.siblings.len() as u64 * 32 == expected, "n={n}: branch has {} siblings", branch.siblings.len());
        checked += 1;
    }
    Ok(format!("{checked} configurations"))
}

// ---------------------------------------------------------------------------
// 4: verkle round trip and mutations

fn random_tree(n: usize, rng: &mut ChaCha20Rng) -> (VerkleTree, Vec<(VerkleKey, VerkleValue)>) {
    let mut tree = VerkleTree::new();
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let k: VerkleKey = rng.gen();
        if tree.get(&k).is_none() {
            let v: VerkleValue = rng.gen();
            tree.insert(k, v);
            pairs.push((k, v));
        }
    }
    tree.root_commitment();
    (tree, pairs)
}

fn rejects(root: &Commitment, keys: &[VerkleKey], bytes: &[u8]) -> bool {
    match VerkleWitness::from_bytes(bytes) {
        Err(_) => true,
        Ok(w) => !matches!(verify_witness(root, keys, &w), Ok(WitnessVerdict::Accepted(_))),
    }
}

fn verkle_round_trip() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut witnesses = 0;
    let mut mutation_pool: Vec<(Commitment, Vec<VerkleKey>, Vec<u8>)> = Vec::new();
    for log_n in (10..=20).step_by(2) {
        let n = 1usize << log_n;
        let (tree, pairs) = random_tree(n, &mut rng);
        let root = tree.cached_root().map_err(|e| e.to_string())?;
        for budget in [1usize, 100, 5000] {
            let picks = sample(&mut rng, n, budget.min(n));
            let keys: Vec<VerkleKey> = picks.iter().map(|i| pairs[i].0).collect();
            let w = tree.make_witness(&keys).map_err(|e| e.to_string())?;
            let bytes = w.to_bytes();
            let decoded = VerkleWitness::from_bytes(&bytes).map_err(|e| e.to_string())?;
            match verify_witness(&root, &keys, &decoded).map_err(|e| e.to_string())? {
                WitnessVerdict::Accepted(map) => {
                    ensure!(map.len() == keys.len(), "N=2^{log_n} K={budget}: {} values for {} keys", map.len(), keys.len());
                    for i in picks.iter() {
                        ensure!(map.get(&pairs[i].0) == Some(&Some(pairs[i].1)), "N=2^{log_n}: wrong value bound");
                    }
                }
                WitnessVerdict::Rejected => return Err(format!("honest witness rejected at N=2^{log_n} K={budget}")),
            }
            witnesses += 1;
            if log_n <= 12 && budget <= 100 {
                mutation_pool.push((root, keys, bytes));
            }
        }
    }
    let mut mutations = 0;
    while mutations < 600 {
        let (root, keys, bytes) = &mutation_pool[mutations % mutation_pool.len()];
        let mut m = bytes.clone();
        let pos = rng.gen_range(0..m.len());
        m[pos] ^= rng.gen_range(1..=255u8);
        ensure!(rejects(root, keys, &m), "mutation at byte {pos} of {} was accepted", m.len());
        mutations += 1;
    }
    Ok(format!("{witnesses} witnesses verified, {mutations} single-byte mutations rejected"))
}

// ---------------------------------------------------------------------------
// 5: multiproof size

fn multiproof_constancy() -> Outcome {
    let ck = CommitmentKey::shared();
    let domain = ck.domain();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let polys: Vec<Polynomial> = (0..20)
        .map(|_| Polynomial::from_evaluations(domain, (0..domain.size()).map(|_| FieldElement::random(&mut rng)).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let coms: Vec<Commitment> = polys.iter().map(|p| ck.commit(p)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut lens = Vec::new();
    for count in [1usize, 100, 5000] {
        // Distinct (polynomial, point) pairs: 20 polynomials x up to 250 points.
        let pairs: Vec<(usize, usize)> = (0..count).map(|i| (i % 20, i / 20)).collect();
        let openings: Vec<ProverOpening<'_>> = pairs
            .iter()
            .map(|&(p, x)| ProverOpening {
                commitment: &coms[p],
                poly: &polys[p],
                point: domain.point(x),
                value: polys[p].evaluations()[x],
            })
            .collect();
        let proof = multiprove(ck, &openings, &mut Transcript::new(b"acceptance")).map_err(|e| e.to_string())?;
        let c: Vec<Commitment> = openings.iter().map(|o| *o.commitment).collect();
        let points: Vec<(FieldElement, FieldElement)> = openings.iter().map(|o| (o.point, o.value)).collect();
        let ok = verify_multiproof(ck, &c, &points, &proof, &mut Transcript::new(b"acceptance")).map_err(|e| e.to_string())?;
        ensure!(ok, "multiproof over {count} openings does not verify");
        ensure!(proof.to_bytes().len() == proof.serialized_len(), "serialized length disagrees with encoding");
        lens.push(proof.to_bytes().len());
    }
    ensure!(lens.windows(2).all(|w| w[0] == w[1]), "lengths differ: {lens:?}");
    Ok(format!("{} bytes for 1, 100 and 5000 openings", lens[0]))
}

// ---------------------------------------------------------------------------
// 6: logarithmic witness growth, on harness output

fn logarithmic_growth() -> Outcome {
    let config = BenchConfig {
        leaf_counts: vec![1 << 14, 1 << 16, 1 << 18, 1 << 20],
        keys: 5000,
        reps: 3,
        seed: 6,
        ..BenchConfig::new(Scheme::Verkle)
    };
    let records = bench::run(&config).map_err(|e| e.to_string())?;
    ensure!(records.len() == 4 && !bench::is_truncated(&records), "sweep incomplete");
    let bytes: Vec<u64> = records.iter().map(|r| r.witness_bytes_mean).collect();
    let steps: Vec<i128> = bytes.windows(2).map(|w| w[1] as i128 - w[0] as i128).collect();
    ensure!(steps.iter().all(|d| *d >= 0), "bytes decrease: {bytes:?}");
    ensure!(steps.windows(2).all(|w| w[1] <= w[0]), "increments grow: {steps:?} (bytes {bytes:?})");
    Ok(format!("mean bytes {bytes:?}, increments {steps:?}"))
}

// ---------------------------------------------------------------------------
// 7: circuit against the native verifier

#[derive(Clone, Copy, Debug)]
enum Tamper {
    None,
    Leaf,
    Sibling,
    IndexBit,
    Root,
}

const TAMPERS: [Tamper; 5] = [Tamper::None, Tamper::Leaf, Tamper::Sibling, Tamper::IndexBit, Tamper::Root];

/// A random sparse tree of `depth`, one branch of it, and possibly a
/// tampered copy of the branch or root.
fn instance(depth: u32, tamper: Tamper, rng: &mut ChaCha20Rng) -> (MerkleBranch, FieldElement) {
    let mut tree = BinaryTree::new(depth).unwrap();
    let cap = if depth >= 64 { u64::MAX } else { (1u64 << depth) - 1 };
    for _ in 0..rng.gen_range(1..6) {
        tree.set_leaf(rng.gen_range(0..=cap), FieldElement::random(rng)).unwrap();
    }
    let mut branch = tree.branch(rng.gen_range(0..=cap)).unwrap();
    let mut root = tree.root();
    let level = rng.gen_range(0..depth as usize);
    match tamper {
        Tamper::None => {}
        Tamper::Leaf => branch.leaf += FieldElement::ONE,
        Tamper::Sibling => branch.siblings[level] = FieldElement::random(rng),
        Tamper::IndexBit => branch.index ^= 1u64 << level,
        Tamper::Root => root += FieldElement::ONE,
    }
    (branch, root)
}

fn circuit_equivalence() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let (mut total, mut accepted) = (0, 0);
    for depth in [1u32, 4, 8, 16] {
        let cs = build_branch_circuit(depth as usize).map_err(|e| e.to_string())?;
        for i in 0..130 {
            let tamper = TAMPERS[i % TAMPERS.len()];
            let (branch, root) = instance(depth, tamper, &mut rng);
            let native = verify_branch(&root, depth, &branch).map_err(|e| e.to_string())?;
            let asg = assign_branch(&cs, &branch, &root).map_err(|e| e.to_string())?;
            let circuit = is_satisfied(&cs, &asg).map_err(|e| e.to_string())?;
            ensure!(native == circuit, "depth {depth} {tamper:?}: native {native}, circuit {circuit}");
            total += 1;
            accepted += native as usize;
        }
    }
    Ok(format!("{total} instances agree ({accepted} accepting, {} rejecting)", total - accepted))
}

// ---------------------------------------------------------------------------
// 8: backends

fn flip(bytes: &[u8], rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut out = bytes.to_vec();
    let pos = rng.gen_range(0..out.len());
    out[pos] ^= rng.gen_range(1..=255u8);
    out
}

fn verdict<B: ProverBackend>(backend: &B, m: &B::Material, public: &[FieldElement], proof: &[u8]) -> bool {
    backend.verify(m, public, proof).unwrap_or(false)
}

fn backend_agreement() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mut decisions = 0;
    for depth in [1u32, 2, 4] {
        let cs = build_branch_circuit(depth as usize).map_err(|e| e.to_string())?;
        let ipa_m = IpaBackend.setup(&cs).map_err(|e| e.to_string())?;
        let mock_m = MockBackend.setup(&cs).map_err(|e| e.to_string())?;
        for i in 0..100 {
            let tamper = if i % 2 == 0 { Tamper::None } else { TAMPERS[1 + (i / 2) % 4] };
            let (branch, root) = instance(depth, tamper, &mut rng);
            let asg = assign_branch(&cs, &branch, &root).map_err(|e| e.to_string())?;
            let a = decide(&IpaBackend, &ipa_m, &asg).map_err(|e| e.to_string())?;
            let b = decide(&MockBackend, &mock_m, &asg).map_err(|e| e.to_string())?;
            ensure!(a == b, "depth {depth} {tamper:?}: ipa {a}, mock {b}");
            decisions += 1;
            if !a {
                continue;
            }
            // Honest proofs against wrong public inputs and with a flipped byte.
            let ipa_p = IpaBackend.prove(&ipa_m, &asg).map_err(|e| e.to_string())?;
            let mock_p = MockBackend.prove(&mock_m, &asg).map_err(|e| e.to_string())?;
            // Only root and leaf: bumping an index bit can leave the
            // statement true when both subtrees at that level are empty.
            let mut public = asg.public_inputs().to_vec();
            let j = rng.gen_range(0..2);
            public[j] += FieldElement::ONE;
            let (a, b) = (verdict(&IpaBackend, &ipa_m, &public, &ipa_p.proof), verdict(&MockBackend, &mock_m, &public, &mock_p.proof));
            ensure!(a == b, "depth {depth}: tampered public input {j}: ipa {a}, mock {b}");
            let public = asg.public_inputs();
            let (a, b) = (
                verdict(&IpaBackend, &ipa_m, public, &flip(&ipa_p.proof, &mut rng)),
                verdict(&MockBackend, &mock_m, public, &flip(&mock_p.proof, &mut rng)),
            );
            ensure!(a == b, "depth {depth}: flipped proof byte: ipa {a}, mock {b}");
            decisions += 2;
        }
    }
    ensure!(decisions >= 500, "only {decisions} decisions");

    // Depth 16: 100 branches of one tree.
    let mut tree = BinaryTree::new(16).map_err(|e| e.to_string())?;
    for i in 0..100u64 {
        tree.set_leaf(i * 613, FieldElement::random(&mut rng)).map_err(|e| e.to_string())?;
    }
    let root = tree.root();
    let branches: Vec<(MerkleBranch, FieldElement)> =
        (0..100u64).map(|i| Ok((tree.branch(i * 613)?, root))).collect::<Result<_, stateless_witness::Error>>().map_err(|e| e.to_string())?;
    let (ipa_m, ipa_proofs) = batch_prove(&IpaBackend, &branches).map_err(|e| e.to_string())?;
    let (_, mock_proofs) = batch_prove(&MockBackend, &branches[..1]).map_err(|e| e.to_string())?;
    let ipa_m = ipa_m.ok_or("no material")?;
    let sizes: HashSet<usize> = ipa_proofs.iter().map(|p| p.proof.len()).collect();
    ensure!(sizes.len() == 1, "ipa proof sizes differ: {sizes:?}");
    for p in &ipa_proofs {
        ensure!(IpaBackend.verify_proof(&ipa_m, p).map_err(|e| e.to_string())?, "depth-16 proof does not verify");
    }
    let ipa_len = ipa_proofs[0].proof.len();
    let mock_len = mock_proofs[0].proof.len();
    ensure!(ipa_len * 10 < mock_len, "ipa {ipa_len} bytes is not below 10% of mock {mock_len} bytes");
    Ok(format!(
        "{decisions} decisions agree; depth-16 ipa proof {ipa_len} bytes for all 100 branches vs mock {mock_len} ({:.2}%)",
        100.0 * ipa_len as f64 / mock_len as f64
    ))
}

// ---------------------------------------------------------------------------
// 9: harness determinism and schema

fn csv_bytes(records: &[BenchRecord]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    bench::write_csv(records, &mut out).map_err(|e| e.to_string())?;
    Ok(out)
}

fn harness_determinism() -> Outcome {
    let mut rows = 0;
    for (scheme, max_log, keys) in [(Scheme::Verkle, 12, 100), (Scheme::NaiveMerkle, 12, 100), (Scheme::SnarkMerkle, 6, 3)] {
        let config = BenchConfig {
            leaf_counts: bench::default_schedule(5, max_log),
            keys,
            reps: 2,
            seed: 9,
            ..BenchConfig::new(scheme)
        };
        let a = bench::run(&config).map_err(|e| e.to_string())?;
        let b = bench::run(&config).map_err(|e| e.to_string())?;
        let strip = |v: &[BenchRecord]| v.iter().map(BenchRecord::without_timings).collect::<Vec<_>>();
        ensure!(csv_bytes(&strip(&a))? == csv_bytes(&strip(&b))?, "{scheme}: non-timing columns differ between runs");
        let text = csv_bytes(&a)?;
        let header = String::from_utf8_lossy(&text).lines().next().unwrap_or_default().to_string();
        ensure!(header == bench::CSV_HEADER.join(","), "{scheme}: header {header}");
        ensure!(bench::read_csv(&text[..]).map_err(|e| e.to_string())? == a, "{scheme}: csv round trip lost data");
        for r in &a {
            ensure!(r.keys_proven == (keys as u64).min(r.leaves), "{scheme} N={}: keys_proven {}", r.leaves, r.keys_proven);
        }
        rows += a.len();
    }
    Ok(format!("{rows} rows across three schemes"))
}

// ---------------------------------------------------------------------------
// 10: brute-force oracles on small instances

/// Full recomputation of a verkle tree from its leaves.
enum OracleNode {
    Leaf(VerkleKey, VerkleValue),
    Internal(Commitment, BTreeMap<u8, OracleNode>),
}

fn oracle_build(ck: &CommitmentKey, depth: usize, leaves: &[(VerkleKey, VerkleValue)]) -> OracleNode {
    let mut groups: BTreeMap<u8, Vec<(VerkleKey, VerkleValue)>> = BTreeMap::new();
    for (k, v) in leaves {
        groups.entry(k[depth]).or_default().push((*k, *v));
    }
    let mut evals = vec![FieldElement::ZERO; ck.domain().size()];
    let mut children = BTreeMap::new();
    for (idx, group) in groups {
        let child = if group.len() == 1 {
            evals[idx as usize] = leaf_slot(&group[0].0, &group[0].1);
            OracleNode::Leaf(group[0].0, group[0].1)
        } else {
            let node = oracle_build(ck, depth + 1, &group);
            if let OracleNode::Internal(c, _) = &node {
                evals[idx as usize] = map_commitment(c);
            }
            node
        };
        children.insert(idx, child);
    }
    let c = ck.commit(&Polynomial::from_evaluations(ck.domain(), evals).unwrap()).unwrap();
    OracleNode::Internal(c, children)
}

/// The only entries and path commitments consistent with the tree.
fn oracle_claims(root: &OracleNode, keys: &[VerkleKey]) -> (Vec<WitnessEntry>, Vec<Commitment>) {
    let mut keys = keys.to_vec();
    keys.sort();
    keys.dedup();
    let (mut entries, mut coms, mut seen) = (Vec::new(), Vec::new(), HashSet::new());
    for key in keys {
        let mut node = root;
        let mut depth = 0;
        let proof = loop {
            let OracleNode::Internal(_, children) = node else { unreachable!() };
            match children.get(&key[depth]) {
                None => break LeafProof::Absent,
                Some(OracleNode::Leaf(k, v)) if *k == key => break LeafProof::Present(*v),
                Some(OracleNode::Leaf(k, v)) => break LeafProof::Diverging { key: *k, value: *v },
                Some(child @ OracleNode::Internal(c, _)) => {
                    depth += 1;
                    if seen.insert(key[..depth].to_vec()) {
                        coms.push(*c);
                    }
                    node = child;
                }
            }
        };
        entries.push(WitnessEntry { key, depth: depth as u8, proof });
    }
    (entries, coms)
}

fn accepts(root: &Commitment, keys: &[VerkleKey], w: &VerkleWitness) -> bool {
    matches!(verify_witness(root, keys, w), Ok(WitnessVerdict::Accepted(_)))
}

/// Keys over a tiny alphabet in the first three bytes, so small trees
/// still have deep shared prefixes.
fn clustered_key(rng: &mut ChaCha20Rng) -> VerkleKey {
    let mut k: VerkleKey = rng.gen();
    for b in k.iter_mut().take(3) {
        *b = rng.gen_range(0..2);
    }
    k
}

fn claim_mutations(w: &VerkleWitness, rng: &mut ChaCha20Rng) -> Vec<VerkleWitness> {
    let mut out = Vec::new();
    for i in 0..w.entries.len() {
        let e = &w.entries[i];
        let mut alt = Vec::new();
        match &e.proof {
            LeafProof::Present(v) => {
                let mut v2 = *v;
                v2[rng.gen_range(0..32)] ^= 1;
                alt.push(LeafProof::Present(v2));
                alt.push(LeafProof::Absent);
            }
            LeafProof::Absent => alt.push(LeafProof::Present(rng.gen())),
            LeafProof::Diverging { .. } => alt.push(LeafProof::Absent),
        }
        for p in alt {
            let mut m = w.clone();
            m.entries[i].proof = p;
            out.push(m);
        }
        for d in [e.depth.wrapping_sub(1), e.depth + 1] {
            if d < 32 {
                let mut m = w.clone();
                m.entries[i].depth = d;
                out.push(m);
            }
        }
    }
    for i in 0..w.path_commitments.len() {
        let mut m = w.clone();
        m.path_commitments[i] = Commitment::identity();
        out.push(m);
        let mut m = w.clone();
        m.path_commitments.remove(i);
        out.push(m);
    }
    if w.path_commitments.len() >= 2 {
        let mut m = w.clone();
        m.path_commitments.swap(0, 1);
        out.push(m);
    }
    out
}

fn small_verkle_oracle(rng: &mut ChaCha20Rng) -> Result<usize, String> {
    let ck = CommitmentKey::shared();
    let mut decisions = 0;
    for size in 0..=8usize {
        for _ in 0..6 {
            let mut leaves = BTreeMap::new();
            while leaves.len() < size {
                leaves.insert(clustered_key(rng), rng.gen::<VerkleValue>());
            }
            let leaves: Vec<(VerkleKey, VerkleValue)> = leaves.into_iter().collect();
            let mut tree = VerkleTree::new();
            for (k, v) in &leaves {
                tree.insert(*k, *v);
            }
            let root = tree.root_commitment();
            let oracle = oracle_build(ck, 0, &leaves);
            let OracleNode::Internal(oracle_root, _) = &oracle else { unreachable!() };
            ensure!(*oracle_root == root, "size {size}: root differs from recomputation");

            let mut queries: Vec<Vec<VerkleKey>> = vec![leaves.iter().map(|(k, _)| *k).collect()];
            queries[0].extend([clustered_key(rng), clustered_key(rng)]);
            for _ in 0..2 {
                queries.push(queries[0].iter().copied().filter(|_| rng.gen_bool(0.5)).collect());
            }
            for keys in queries.iter().filter(|q| !q.is_empty()) {
                let honest = tree.make_witness(keys).map_err(|e| e.to_string())?;
                let (entries, coms) = oracle_claims(&oracle, keys);
                let consistent = |w: &VerkleWitness| w.entries == entries && w.path_commitments == coms;
                ensure!(consistent(&honest), "size {size}: honest witness disagrees with recomputed claims");
                ensure!(accepts(&root, keys, &honest), "size {size}: honest witness rejected");
                decisions += 1;
                for m in claim_mutations(&honest, rng) {
                    ensure!(accepts(&root, keys, &m) == consistent(&m), "size {size}: decision differs from oracle");
                    decisions += 1;
                }
            }

            // Witnesses from a neighbouring tree that differs at a queried key.
            let mut other = VerkleTree::new();
            let mut changed = leaves.clone();
            let target = match rng.gen_range(0..3) {
                0 if !changed.is_empty() => {
                    let i = rng.gen_range(0..changed.len());
                    changed[i].1[0] ^= 0x80;
                    changed[i].0
                }
                1 if !changed.is_empty() => changed.remove(rng.gen_range(0..changed.len())).0,
                _ => {
                    let k = clustered_key(rng);
                    changed.retain(|(x, _)| *x != k);
                    changed.push((k, rng.gen()));
                    k
                }
            };
            for (k, v) in &changed {
                other.insert(*k, *v);
            }
            other.root_commitment();
            let mut keys: Vec<VerkleKey> = leaves.iter().map(|(k, _)| *k).filter(|_| rng.gen_bool(0.5)).collect();
            keys.push(target);
            let foreign = other.make_witness(&keys).map_err(|e| e.to_string())?;
            let (entries, coms) = oracle_claims(&oracle, &keys);
            let consistent = foreign.entries == entries && foreign.path_commitments == coms;
            ensure!(!consistent, "size {size}: neighbouring tree produced the same claims");
            ensure!(!accepts(&root, &keys, &foreign), "size {size}: foreign witness accepted");
            decisions += 1;
        }
    }
    Ok(decisions)
}

fn small_merkle_oracle(rng: &mut ChaCha20Rng) -> Result<usize, String> {
    let mut trees = 0;
    for depth in 1..=8u32 {
        for _ in 0..12 {
            let width = 1usize << depth;
            let mut dense = vec![FieldElement::ZERO; width];
            let mut sparse = BinaryTree::new(depth).map_err(|e| e.to_string())?;
            for _ in 0..rng.gen_range(0..=width.min(20)) {
                let i = rng.gen_range(0..width);
                let v = if rng.gen_bool(0.2) { FieldElement::ZERO } else { FieldElement::random(rng) };
                dense[i] = v;
                sparse.set_leaf(i as u64, v).map_err(|e| e.to_string())?;
            }
            let mut level = dense.clone();
            while level.len() > 1 {
                level = level.chunks(2).map(|p| hash2(p[0], p[1])).collect();
            }
            ensure!(sparse.root() == level[0], "depth {depth}: sparse root differs from dense");
            let listed: Vec<(u64, FieldElement)> =
                dense.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i as u64, *v)).collect();
            let bulk = BinaryTree::from_leaves(depth, &listed).map_err(|e| e.to_string())?;
            ensure!(bulk.root() == level[0], "depth {depth}: bulk-built root differs from dense");
            let idx = rng.gen_range(0..width as u64);
            ensure!(sparse.branch(idx).map_err(|e| e.to_string())?.compute_root() == level[0], "depth {depth}: branch root");
            trees += 1;
        }
    }
    Ok(trees)
}

fn horner(coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    coeffs.iter().rev().fold(FieldElement::ZERO, |acc, c| acc * x + *c)
}

/// `(f - y) / (X - z)` by synthetic division; panics on a remainder.
fn divide(coeffs: &[FieldElement], z: FieldElement, y: FieldElement) -> Vec<FieldElement> {
    let mut f = coeffs.to_vec();
    f[0] -= y;
    let mut q = vec![FieldElement::ZERO; f.len().saturating_sub(1)];
    let mut carry = FieldElement::ZERO;
    for i in (1..f.len()).rev() {
        carry = f[i] + carry * z;
        q[i - 1] = carry;
    }
    assert!((f[0] + carry * z).is_zero(), "non-zero remainder");
    q
}

fn small_quotient_oracle(rng: &mut ChaCha20Rng) -> Result<usize, String> {
    let mut cases = 0;
    for log in 0..=4u32 {
        let n = 1usize << log;
        let domain = EvaluationDomain::new(n).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let coeffs: Vec<FieldElement> = (0..n).map(|_| FieldElement::random(rng)).collect();
            let evals: Vec<FieldElement> = domain.points().iter().map(|x| horner(&coeffs, *x)).collect();
            let mut points: Vec<FieldElement> = domain.points().to_vec();
            points.push(FieldElement::random(rng));
            for z in points {
                let y = horner(&coeffs, z);
                let q = divide(&coeffs, z, y);
                let want: Vec<FieldElement> = domain.points().iter().map(|x| horner(&q, *x)).collect();
                let got = domain.quotient(&evals, &z, &y).map_err(|e| e.to_string())?;
                ensure!(got == want, "n={n}: quotient differs at z={z:?}");
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn small_instance_oracles() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let verkle = small_verkle_oracle(&mut rng)?;
    let merkle = small_merkle_oracle(&mut rng)?;
    let quotients = small_quotient_oracle(&mut rng)?;
    Ok(format!("{verkle} verkle decisions, {merkle} sparse trees, {quotients} quotients"))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("verkle block size model", verkle_block_size),
        ("snark-merkle block size model", snark_block_size),
        ("naive witness size shape", naive_size_shape),
        ("verkle round trip and mutations", verkle_round_trip),
        ("multiproof size is constant", multiproof_constancy),
        ("verkle witness growth is concave in log N", logarithmic_growth),
        ("branch circuit matches native verifier", circuit_equivalence),
        ("ipa and mock backends agree; ipa is succinct", backend_agreement),
        ("harness determinism and csv schema", harness_determinism),
        ("small-instance brute-force oracles", small_instance_oracles),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
