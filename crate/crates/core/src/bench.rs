//! Tree-size sweep harness.
//!
//! For each leaf count the harness builds one tree from seeded random
//! pairs, then for every repetition draws `min(K, N)` distinct keys, times
//! witness generation and verification, and records witness bytes. Every
//! witness is verified; a verification failure aborts the sweep.
//!
//! Timings use a monotonic clock around the prove and verify calls only.
//! Tree construction, key sampling and record emission are excluded.
//! What "prove" covers per scheme:
//!
//! - verkle: `make_witness` for the key set; verify decodes the serialized
//!   witness and runs `verify_witness`;
//! - merkle-naive: extracting the branches; verify checks each branch;
//! - merkle-snark: extracting, assigning and proving each branch; verify
//!   checks each proof.
//!
//! Only `prove_ns_*`, `verify_ns_*` and `timestamp` depend on the clock.
//! With no time budget every other column is a function of the
//! configuration alone.

use std::io::{Read, Write};
use std::path::Path;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FieldElement;
use crate::backend::{IpaBackend, IpaMaterial, ProverBackend, MODELED_PROOF_BYTES};
use crate::circuit::{assign_branch, build_branch_circuit, ConstraintSystem};
use crate::merkle::{ceil_log, verify_branch, BinaryTree, MerkleBranch};
use crate::sizing::{estimate, Scheme, SizeModel};
use crate::verkle::{verify_witness, witness_size_bytes, VerkleKey, VerkleTree, VerkleWitness};
use crate::{parallel, Error, Result};

/// Default number of proven keys per block.
pub const DEFAULT_KEYS: usize = 5000;
/// Default repetitions per leaf count.
pub const DEFAULT_REPS: usize = 10;
pub const DEFAULT_MIN_LOG_LEAVES: u32 = 5;
pub const DEFAULT_MAX_LOG_LEAVES: u32 = 20;

/// Leaf counts `2^5 .. 2^13` at every power of two, then every second
/// power from `2^14`, restricted to `[2^min_log, 2^max_log]`.
pub fn default_schedule(min_log: u32, max_log: u32) -> Vec<u64> {
    (min_log..=max_log.min(62)).filter(|l| *l <= 13 || l % 2 == 0).map(|l| 1u64 << l).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub scheme: Scheme,
    /// Strictly increasing leaf counts.
    pub leaf_counts: Vec<u64>,
    pub keys: usize,
    pub reps: usize,
    pub seed: u64,
    /// Abort the sweep once a single repetition takes longer than this.
    pub time_budget: Option<Duration>,
    /// Skip leaf counts whose modeled memory exceeds this many bytes.
    pub mem_budget: Option<u64>,
    /// Worker threads for the whole sweep. With 1 (the default) repetitions
    /// run one after another and no library routine spawns work, so the
    /// numbers are single-threaded. Larger values run repetitions, and the
    /// parallel loops inside them, on a pool of that size.
    pub parallelism: usize,
}

impl BenchConfig {
    pub fn new(scheme: Scheme) -> Self {
        BenchConfig {
            scheme,
            leaf_counts: default_schedule(DEFAULT_MIN_LOG_LEAVES, DEFAULT_MAX_LOG_LEAVES),
            keys: DEFAULT_KEYS,
            reps: DEFAULT_REPS,
            seed: 0,
            time_budget: None,
            mem_budget: None,
            parallelism: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.keys == 0 || self.reps == 0 || self.parallelism == 0 {
            return Err(Error::InvalidParameter("keys, reps and parallelism must be at least 1".into()));
        }
        if self.leaf_counts.is_empty() || self.leaf_counts.windows(2).any(|w| w[0] >= w[1]) || self.leaf_counts[0] == 0 {
            return Err(Error::InvalidParameter("leaf-count schedule must be non-empty, positive and strictly increasing".into()));
        }
        if self.scheme != Scheme::Verkle && self.leaf_counts.iter().any(|n| ceil_log(2, *n) > 62) {
            return Err(Error::InvalidParameter("binary trees are limited to 2^62 leaves".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    Complete,
    /// A repetition exceeded the time budget; later leaf counts were skipped.
    TimeBudget,
    /// The modeled memory exceeded the memory budget; nothing was run.
    MemoryBudget,
}

impl RecordStatus {
    pub fn is_complete(&self) -> bool {
        *self == RecordStatus::Complete
    }
}

/// One row per (scheme, leaf count).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub scheme: Scheme,
    pub leaves: u64,
    pub keys_proven: u64,
    pub reps: u64,
    pub status: RecordStatus,
    pub prove_ns_mean: u64,
    pub prove_ns: Vec<u64>,
    pub verify_ns_mean: u64,
    pub verify_ns: Vec<u64>,
    pub witness_bytes_mean: u64,
    pub witness_bytes: Vec<u64>,
    pub modeled_bytes: u64,
    pub peak_memory_bytes: u64,
    pub seed: u64,
    /// Seconds since the Unix epoch when the row was produced.
    pub timestamp: u64,
}

impl BenchRecord {
    /// Copy with clock-dependent fields zeroed, for determinism checks.
    pub fn without_timings(&self) -> BenchRecord {
        BenchRecord {
            prove_ns_mean: 0,
            prove_ns: vec![0; self.prove_ns.len()],
            verify_ns_mean: 0,
            verify_ns: vec![0; self.verify_ns.len()],
            timestamp: 0,
            ..self.clone()
        }
    }
}

pub fn is_truncated(records: &[BenchRecord]) -> bool {
    records.iter().any(|r| !r.status.is_complete())
}

/// Modeled resident bytes of the tree for `n` leaves. An estimate from
/// node sizes, not a measurement, so that it is deterministic.
pub fn memory_model(scheme: Scheme, n: u64) -> u64 {
    match scheme {
        // Leaf node in its parent's child list plus amortized internal
        // nodes, and the fixed-base tables of the commitment key.
        Scheme::Verkle => n.saturating_mul(192).saturating_add(72 << 20),
        // Two hash-map entries per leaf (the leaf and its share of parents).
        Scheme::NaiveMerkle => n.saturating_mul(2 * 64),
        // As above, plus generators and constraint rows for one circuit.
        Scheme::SnarkMerkle => {
            let depth = ceil_log(2, n).max(1);
            n.saturating_mul(2 * 64).saturating_add(depth * 512 * 1024)
        }
    }
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over the three words.
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

enum Prepared {
    Verkle { tree: VerkleTree, keys: Vec<VerkleKey> },
    Naive { tree: BinaryTree },
    Snark { tree: BinaryTree, cs: ConstraintSystem, material: IpaMaterial },
}

struct RunResult {
    prove_ns: u64,
    verify_ns: u64,
    bytes: u64,
    /// Intermediate commitments (verkle only).
    commitments: u64,
}

fn prepare(scheme: Scheme, n: u64, seed: u64) -> Result<Prepared> {
    let mut rng = ChaCha20Rng::seed_from_u64(mix(seed, n, 0));
    match scheme {
        Scheme::Verkle => {
            let mut tree = VerkleTree::new();
            let mut keys = Vec::with_capacity(n as usize);
            while (keys.len() as u64) < n {
                let key: VerkleKey = rng.gen();
                let value = rng.gen();
                if tree.get(&key).is_none() {
                    tree.insert(key, value);
                    keys.push(key);
                }
            }
            tree.root_commitment();
            Ok(Prepared::Verkle { tree, keys })
        }
        Scheme::NaiveMerkle | Scheme::SnarkMerkle => {
            let depth = ceil_log(2, n).max(1) as u32;
            let leaves: Vec<(u64, FieldElement)> = (0..n).map(|i| (i, FieldElement::random(&mut rng))).collect();
            let tree = BinaryTree::from_leaves(depth, &leaves)?;
            if scheme == Scheme::NaiveMerkle {
                return Ok(Prepared::Naive { tree });
            }
            let cs = build_branch_circuit(depth as usize)?;
            let material = IpaBackend.setup(&cs)?;
            Ok(Prepared::Snark { tree, cs, material })
        }
    }
}

fn elapsed_ns(start: Instant) -> u64 {
    start.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// One repetition; `Ok(None)` if the deadline passed mid-run.
fn run_once(p: &Prepared, n: u64, picks: &[usize], deadline: Option<Instant>) -> Result<Option<RunResult>> {
    let past = || deadline.is_some_and(|d| Instant::now() > d);
    match p {
        Prepared::Verkle { tree, keys } => {
            let query: Vec<VerkleKey> = picks.iter().map(|i| keys[*i]).collect();
            let root = tree.cached_root()?;
            let start = Instant::now();
            let witness = tree.make_witness(&query)?;
            let prove_ns = elapsed_ns(start);
            let bytes = witness.to_bytes();
            debug_assert_eq!(bytes.len(), witness_size_bytes(&witness).total());
            let start = Instant::now();
            let decoded = VerkleWitness::from_bytes(&bytes)?;
            let verdict = verify_witness(&root, &query, &decoded)?;
            let verify_ns = elapsed_ns(start);
            if !verdict.is_accepted() {
                return Err(Error::VerificationFailed(format!("verkle witness rejected at N = {n}")));
            }
            Ok(Some(RunResult {
                prove_ns,
                verify_ns,
                bytes: bytes.len() as u64,
                commitments: witness.path_commitments.len() as u64,
            }))
        }
        Prepared::Naive { tree } => {
            let root = tree.root();
            let start = Instant::now();
            let branches: Vec<MerkleBranch> = picks.iter().map(|i| tree.branch(*i as u64)).collect::<Result<_>>()?;
            let prove_ns = elapsed_ns(start);
            let bytes: usize = branches.iter().map(MerkleBranch::serialized_len).sum();
            let start = Instant::now();
            for b in &branches {
                if !verify_branch(&root, tree.depth(), b)? {
                    return Err(Error::VerificationFailed(format!("branch {} rejected at N = {n}", b.index)));
                }
            }
            Ok(Some(RunResult { prove_ns, verify_ns: elapsed_ns(start), bytes: bytes as u64, commitments: 0 }))
        }
        Prepared::Snark { tree, cs, material } => {
            let root = tree.root();
            let mut prove_ns = 0u64;
            let mut proofs = Vec::with_capacity(picks.len());
            for i in picks {
                let start = Instant::now();
                let branch = tree.branch(*i as u64)?;
                let assignment = assign_branch(cs, &branch, &root)?;
                proofs.push(IpaBackend.prove(material, &assignment)?);
                prove_ns += elapsed_ns(start);
                if past() {
                    return Ok(None);
                }
            }
            let mut verify_ns = 0u64;
            for p in &proofs {
                let start = Instant::now();
                let ok = IpaBackend.verify_proof(material, p)?;
                verify_ns += elapsed_ns(start);
                if !ok {
                    return Err(Error::VerificationFailed(format!("branch proof rejected at N = {n}")));
                }
                if past() {
                    return Ok(None);
                }
            }
            // Proof plus 32-byte key and value per branch; public inputs
            // are counted separately from the witness.
            let bytes = proofs.iter().map(|p| p.proof.len() as u64 + 64).sum();
            Ok(Some(RunResult { prove_ns, verify_ns, bytes, commitments: 0 }))
        }
    }
}

fn mean(v: &[u64]) -> u64 {
    if v.is_empty() {
        return 0;
    }
    (v.iter().map(|x| *x as u128).sum::<u128>() / v.len() as u128) as u64
}

fn modeled(scheme: Scheme, keys: u64, n: u64, commitments: u64) -> Result<u64> {
    // One snapshot, matching what the harness measures.
    let model = match scheme {
        Scheme::Verkle => SizeModel::verkle(keys, commitments),
        Scheme::NaiveMerkle => SizeModel::naive_merkle(keys, 2, n),
        Scheme::SnarkMerkle => SizeModel::snark_merkle(keys).with_pre_post(false),
    };
    debug_assert_eq!(MODELED_PROOF_BYTES as u64, model.proof_bytes);
    Ok(estimate(&model)?.total)
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs the sweep. Budget overruns end the sweep early with a marked
/// record instead of an error.
pub fn run(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    run_with_progress(config, |_| {})
}

/// [`run`], calling `progress` after each record.
pub fn run_with_progress(config: &BenchConfig, progress: impl FnMut(&BenchRecord) + Send) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    parallel::with_threads(config.parallelism, || sweep(config, progress))
}

fn sweep(config: &BenchConfig, mut progress: impl FnMut(&BenchRecord)) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &n in &config.leaf_counts {
        let keys_proven = (config.keys as u64).min(n);
        let peak_memory_bytes = memory_model(config.scheme, n);
        let mut record = BenchRecord {
            scheme: config.scheme,
            leaves: n,
            keys_proven,
            reps: 0,
            status: RecordStatus::Complete,
            prove_ns_mean: 0,
            prove_ns: Vec::new(),
            verify_ns_mean: 0,
            verify_ns: Vec::new(),
            witness_bytes_mean: 0,
            witness_bytes: Vec::new(),
            modeled_bytes: 0,
            peak_memory_bytes,
            seed: config.seed,
            timestamp: 0,
        };
        if config.mem_budget.is_some_and(|b| peak_memory_bytes > b) {
            record.status = RecordStatus::MemoryBudget;
            record.timestamp = now_secs();
            progress(&record);
            records.push(record);
            break;
        }

        let prepared = prepare(config.scheme, n, config.seed)?;
        let picks: Vec<Vec<usize>> = (0..config.reps)
            .map(|r| {
                let mut rng = ChaCha20Rng::seed_from_u64(mix(config.seed, n, 1 + r as u64));
                let mut v = sample(&mut rng, n as usize, keys_proven as usize).into_vec();
                v.sort_unstable();
                v
            })
            .collect();

        let one = |r: usize| -> Result<Option<RunResult>> {
            let start = Instant::now();
            let deadline = config.time_budget.map(|b| start + b);
            let out = run_once(&prepared, n, &picks[r], deadline)?;
            Ok(out.filter(|_| config.time_budget.is_none_or(|b| start.elapsed() <= b)))
        };
        let results: Vec<Result<Option<RunResult>>> = if config.parallelism > 1 {
            parallel::map_range(config.reps, one)
        } else {
            let mut out = Vec::with_capacity(config.reps);
            for r in 0..config.reps {
                let res = one(r);
                let stop = matches!(res, Ok(None) | Err(_));
                out.push(res);
                if stop {
                    break;
                }
            }
            out
        };

        let mut commitments = Vec::new();
        for res in results {
            match res? {
                Some(run) => {
                    record.prove_ns.push(run.prove_ns);
                    record.verify_ns.push(run.verify_ns);
                    record.witness_bytes.push(run.bytes);
                    commitments.push(run.commitments);
                }
                None => record.status = RecordStatus::TimeBudget,
            }
        }
        record.reps = record.prove_ns.len() as u64;
        record.prove_ns_mean = mean(&record.prove_ns);
        record.verify_ns_mean = mean(&record.verify_ns);
        record.witness_bytes_mean = mean(&record.witness_bytes);
        record.modeled_bytes = modeled(config.scheme, keys_proven, n, mean(&commitments))?;
        record.timestamp = now_secs();
        progress(&record);
        let stop = !record.status.is_complete();
        records.push(record);
        if stop {
            break;
        }
    }
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter(format!("unknown format {s:?}"))),
        }
    }
}

/// CSV columns, in order. List columns hold `;`-separated integers.
pub const CSV_HEADER: [&str; 15] = [
    "scheme",
    "leaves",
    "keys_proven",
    "reps",
    "status",
    "prove_ns_mean",
    "prove_ns",
    "verify_ns_mean",
    "verify_ns",
    "witness_bytes_mean",
    "witness_bytes",
    "modeled_bytes",
    "peak_memory_bytes",
    "seed",
    "timestamp",
];

#[derive(Serialize, Deserialize)]
struct CsvRow {
    scheme: Scheme,
    leaves: u64,
    keys_proven: u64,
    reps: u64,
    status: RecordStatus,
    prove_ns_mean: u64,
    prove_ns: String,
    verify_ns_mean: u64,
    verify_ns: String,
    witness_bytes_mean: u64,
    witness_bytes: String,
    modeled_bytes: u64,
    peak_memory_bytes: u64,
    seed: u64,
    timestamp: u64,
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn split(s: &str) -> Result<Vec<u64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|x| x.parse().map_err(|_| Error::malformed("bench csv", format!("bad integer list {s:?}"))))
        .collect()
}

impl From<&BenchRecord> for CsvRow {
    fn from(r: &BenchRecord) -> Self {
        CsvRow {
            scheme: r.scheme,
            leaves: r.leaves,
            keys_proven: r.keys_proven,
            reps: r.reps,
            status: r.status,
            prove_ns_mean: r.prove_ns_mean,
            prove_ns: join(&r.prove_ns),
            verify_ns_mean: r.verify_ns_mean,
            verify_ns: join(&r.verify_ns),
            witness_bytes_mean: r.witness_bytes_mean,
            witness_bytes: join(&r.witness_bytes),
            modeled_bytes: r.modeled_bytes,
            peak_memory_bytes: r.peak_memory_bytes,
            seed: r.seed,
            timestamp: r.timestamp,
        }
    }
}

impl TryFrom<CsvRow> for BenchRecord {
    type Error = Error;

    fn try_from(r: CsvRow) -> Result<Self> {
        Ok(BenchRecord {
            scheme: r.scheme,
            leaves: r.leaves,
            keys_proven: r.keys_proven,
            reps: r.reps,
            status: r.status,
            prove_ns_mean: r.prove_ns_mean,
            prove_ns: split(&r.prove_ns)?,
            verify_ns_mean: r.verify_ns_mean,
            verify_ns: split(&r.verify_ns)?,
            witness_bytes_mean: r.witness_bytes_mean,
            witness_bytes: split(&r.witness_bytes)?,
            modeled_bytes: r.modeled_bytes,
            peak_memory_bytes: r.peak_memory_bytes,
            seed: r.seed,
            timestamp: r.timestamp,
        })
    }
}

pub fn write_csv(records: &[BenchRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::malformed("bench csv", format!("unexpected header {header:?}")));
    }
    r.deserialize::<CsvRow>().map(|row| BenchRecord::try_from(row?)).collect()
}

pub fn write_json(records: &[BenchRecord], out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_json(input: impl Read) -> Result<Vec<BenchRecord>> {
    Ok(serde_json::from_reader(input)?)
}

/// Writes `records` to `path` in `format`.
pub fn emit(records: &[BenchRecord], format: OutputFormat, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(records, file),
        OutputFormat::Json => write_json(records, file),
    }
}

/// Reads records written by [`emit`].
pub fn parse(format: OutputFormat, path: &Path) -> Result<Vec<BenchRecord>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    match format {
        OutputFormat::Csv => read_csv(file),
        OutputFormat::Json => read_json(file),
    }
}
