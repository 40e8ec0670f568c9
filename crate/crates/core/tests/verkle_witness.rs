use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use stateless_witness::verkle::{
    verify_witness, witness_size_bytes, VerkleKey, VerkleTree, VerkleValue, VerkleWitness, WitnessVerdict,
};
use stateless_witness::Error;

fn tree_with(pairs: &[(VerkleKey, VerkleValue)]) -> VerkleTree {
    let mut t = VerkleTree::new();
    for (k, v) in pairs {
        t.insert(*k, *v);
    }
    t.root_commitment();
    t
}

#[test]
fn present_and_absent_keys_round_trip() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let pairs: Vec<(VerkleKey, VerkleValue)> = (0..300).map(|_| (rng.gen(), rng.gen())).collect();
    let tree = tree_with(&pairs);
    let root = tree.cached_root().unwrap();
    let absent: Vec<VerkleKey> = (0..20).map(|_| rng.gen()).collect();
    let mut keys: Vec<VerkleKey> = pairs.iter().step_by(7).map(|(k, _)| *k).collect();
    keys.extend(&absent);

    let w = tree.make_witness(&keys).unwrap();
    let bytes = w.to_bytes();
    assert_eq!(bytes.len(), witness_size_bytes(&w).total());
    let decoded = VerkleWitness::from_bytes(&bytes).unwrap();
    assert_eq!(decoded, w);
    let WitnessVerdict::Accepted(map) = verify_witness(&root, &keys, &decoded).unwrap() else {
        panic!("rejected")
    };
    for (k, v) in pairs.iter().step_by(7) {
        assert_eq!(map[k], Some(*v));
    }
    for k in &absent {
        assert_eq!(map[k], None);
    }
}

#[test]
fn stale_witness_fails_after_update() {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let pairs: Vec<(VerkleKey, VerkleValue)> = (0..50).map(|_| (rng.gen(), rng.gen())).collect();
    let mut tree = tree_with(&pairs);
    let keys = [pairs[3].0];
    let old = tree.make_witness(&keys).unwrap();
    tree.insert(pairs[3].0, [9; 32]);
    assert!(matches!(tree.make_witness(&keys), Err(Error::DirtyTree)));
    let root = tree.root_commitment();
    assert_eq!(verify_witness(&root, &keys, &old).unwrap(), WitnessVerdict::Rejected);
    let fresh = tree.make_witness(&keys).unwrap();
    assert!(verify_witness(&root, &keys, &fresh).unwrap().is_accepted());
}

#[test]
fn query_must_match_entries() {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let pairs: Vec<(VerkleKey, VerkleValue)> = (0..10).map(|_| (rng.gen(), rng.gen())).collect();
    let tree = tree_with(&pairs);
    let w = tree.make_witness(&[pairs[0].0]).unwrap();
    assert!(verify_witness(&tree.cached_root().unwrap(), &[pairs[1].0], &w).is_err());
}

#[test]
fn empty_query_is_one_byte() {
    let tree = tree_with(&[([1; 32], [2; 32])]);
    let w = tree.make_witness(&[]).unwrap();
    assert_eq!(w.to_bytes(), vec![0]);
    assert!(verify_witness(&tree.cached_root().unwrap(), &[], &w).unwrap().is_accepted());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_trees_verify(seed in any::<u64>(), n in 0usize..40, q in 1usize..12, prefix in 0usize..4) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        // Shared prefixes of up to three bytes make paths deeper.
        let key = |rng: &mut ChaCha20Rng| {
            let mut k: VerkleKey = rng.gen();
            for b in k.iter_mut().take(prefix) {
                *b %= 2;
            }
            k
        };
        let pairs: Vec<(VerkleKey, VerkleValue)> = (0..n).map(|_| (key(&mut rng), rng.gen())).collect();
        let tree = tree_with(&pairs);
        let keys: Vec<VerkleKey> = (0..q).map(|i| if i % 2 == 0 && n > 0 { pairs[i % n].0 } else { key(&mut rng) }).collect();
        let w = tree.make_witness(&keys).unwrap();
        let decoded = VerkleWitness::from_bytes(&w.to_bytes()).unwrap();
        let verdict = verify_witness(&tree.cached_root().unwrap(), &keys, &decoded).unwrap();
        let WitnessVerdict::Accepted(map) = verdict else { panic!("honest witness rejected") };
        for k in &keys {
            prop_assert_eq!(map[k], tree.get(k));
        }
    }
}
