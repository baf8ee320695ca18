//! Deterministic simulation of a server fleet storing an array code.
//!
//! Each server holds the GF(2) combinations of its column applied chunk-wise
//! to a seeded random database. A retrieval session reads every server of
//! every recovery set for one part, solves each set independently, and
//! compares the answers. Time is simulated: requests go out at tick 0 and
//! responses are replayed in `(tick, server)` order, so identical inputs
//! always give identical transcripts.
//!
//! This covers only the recovery step behind k-server PIR emulation; no
//! query privacy is modelled.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{solve_combination, PartVector};
use crate::model::{ArrayCode, RecoveryPlan};
use crate::verify::verify_plan;

pub const DEFAULT_CHUNK_BITS: usize = 64;

/// A fixed-width binary value: one database part or one stored cell.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chunk {
    words: Vec<u64>,
    bits: usize,
}

impl Chunk {
    pub fn zeros(bits: usize) -> Self {
        Self {
            words: vec![0; bits.div_ceil(64)],
            bits,
        }
    }

    pub fn random<R: RngCore>(bits: usize, rng: &mut R) -> Self {
        let mut c = Self::zeros(bits);
        for w in &mut c.words {
            *w = rng.next_u64();
        }
        c.mask_top();
        c
    }

    pub fn from_words(bits: usize, words: Vec<u64>) -> Result<Self> {
        if words.len() != bits.div_ceil(64) {
            return Err(Error::Parameter(format!(
                "{} words cannot hold exactly {bits} bits",
                words.len()
            )));
        }
        let mut c = Self { words, bits };
        c.mask_top();
        Ok(c)
    }

    fn mask_top(&mut self) {
        let rem = self.bits % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &Chunk) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// Lower-case hex, most significant word first, zero-padded to the width.
impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.bits.div_ceil(4).max(1);
        let mut out = alloc::string::String::new();
        for w in self.words.iter().rev() {
            out.push_str(&format!("{w:016x}"));
        }
        let start = out.len().saturating_sub(digits);
        f.write_str(&out[start..])
    }
}

impl fmt::Debug for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chunk({self})")
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Chunk {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Fleet-wide simulation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct FleetConfig {
    pub seed: u64,
    pub chunk_bits: usize,
    /// Fixed per-server latency in ticks; missing entries use `default_latency`.
    pub base_latency: Vec<u64>,
    pub default_latency: u64,
    /// Uniform jitter added to each response, in `0..=jitter` ticks.
    pub jitter: u64,
    /// Per-server probability that a response is lost; missing entries use
    /// `default_drop_probability`.
    pub drop_probability: Vec<f64>,
    pub default_drop_probability: f64,
    /// Servers that never answer (0-based).
    pub failed: BTreeSet<usize>,
    /// Tick at which a missing response is declared lost.
    pub timeout: u64,
}

impl Default for FleetConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            chunk_bits: DEFAULT_CHUNK_BITS,
            base_latency: Vec::new(),
            default_latency: 10,
            jitter: 5,
            drop_probability: Vec::new(),
            default_drop_probability: 0.0,
            failed: BTreeSet::new(),
            timeout: 1_000,
        }
    }
}

impl FleetConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
struct Server {
    cells: Vec<Chunk>,
    base_latency: u64,
    drop_probability: f64,
    failed: bool,
}

/// `m` simulated servers holding a code applied to a database.
#[derive(Clone, Debug)]
pub struct Fleet {
    code: ArrayCode,
    database: Vec<Chunk>,
    servers: Vec<Server>,
    config: FleetConfig,
}

impl Fleet {
    /// Fleet over a database drawn from `config.seed`.
    pub fn new(code: ArrayCode, config: FleetConfig) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let database = (0..code.p())
            .map(|_| Chunk::random(config.chunk_bits, &mut rng))
            .collect();
        Self::with_database(code, database, config)
    }

    pub fn with_database(code: ArrayCode, database: Vec<Chunk>, config: FleetConfig) -> Result<Self> {
        if database.len() != code.p() {
            return Err(Error::Parameter(format!(
                "database has {} parts, code has p={}",
                database.len(),
                code.p()
            )));
        }
        if database.iter().any(|c| c.bits != config.chunk_bits) {
            return Err(Error::Parameter("database chunks must all be chunk_bits wide".into()));
        }
        let probabilities = (0..code.m()).map(|j| {
            config
                .drop_probability
                .get(j)
                .copied()
                .unwrap_or(config.default_drop_probability)
        });
        for p in probabilities.clone() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("drop probability {p} outside [0, 1]")));
            }
        }
        if let Some(&j) = config.failed.iter().find(|&&j| j >= code.m()) {
            return Err(Error::Parameter(format!("failed server {} does not exist", j + 1)));
        }
        let servers = code
            .columns()
            .iter()
            .zip(probabilities)
            .enumerate()
            .map(|(j, (col, drop_probability))| Server {
                cells: col
                    .cells()
                    .iter()
                    .map(|cell| combine(&database, cell, config.chunk_bits))
                    .collect(),
                base_latency: config.base_latency.get(j).copied().unwrap_or(config.default_latency),
                drop_probability,
                failed: config.failed.contains(&j),
            })
            .collect();
        Ok(Self {
            code,
            database,
            servers,
            config,
        })
    }

    pub fn code(&self) -> &ArrayCode {
        &self.code
    }

    pub fn config(&self) -> &FleetConfig {
        &self.config
    }

    /// The stored value of part `part` (0-based).
    pub fn part(&self, part: usize) -> &Chunk {
        &self.database[part]
    }

    /// The values server `server` holds, in cell order.
    pub fn server_cells(&self, server: usize) -> &[Chunk] {
        &self.servers[server].cells
    }

    /// A copy of this fleet with exactly `failed` servers down.
    pub fn with_failed(&self, failed: BTreeSet<usize>) -> Result<Self> {
        let mut config = self.config.clone();
        config.failed = failed;
        Self::with_database(self.code.clone(), self.database.clone(), config)
    }
}

fn combine(database: &[Chunk], cell: &PartVector, bits: usize) -> Chunk {
    let mut acc = Chunk::zeros(bits);
    for i in cell.support() {
        acc.xor_assign(&database[i]);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FaultKind {
    /// The server is down for the whole session.
    ServerFailed,
    /// The response was lost in transit.
    Dropped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SessionStatus {
    Recovered,
    RetrievalFailed,
}

/// One transcript line. Part, set, and server numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "event", rename_all = "snake_case"))]
pub enum Event {
    Request {
        time: u64,
        part: usize,
        set: usize,
        server: usize,
    },
    Response {
        time: u64,
        part: usize,
        set: usize,
        server: usize,
        cells: Vec<Chunk>,
    },
    Fault {
        time: u64,
        part: usize,
        set: usize,
        server: usize,
        kind: FaultKind,
    },
    Solve {
        time: u64,
        part: usize,
        set: usize,
        value: Option<Chunk>,
    },
    Verdict {
        time: u64,
        part: usize,
        status: SessionStatus,
        agreement: bool,
        surviving_sets: usize,
        value: Option<Chunk>,
    },
}

/// What happened to one recovery set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetOutcome {
    /// 0-based columns.
    pub columns: Vec<usize>,
    pub value: Option<Chunk>,
    pub completed_at: Option<u64>,
}

impl SetOutcome {
    pub fn faulted(&self) -> bool {
        self.value.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionTranscript {
    /// 0-based part.
    pub part: usize,
    pub sets: Vec<SetOutcome>,
    pub events: Vec<Event>,
    pub value: Option<Chunk>,
    /// All surviving sets agree with each other and with the stored part.
    pub agreement: bool,
    pub status: SessionStatus,
}

impl SessionTranscript {
    pub fn surviving_sets(&self) -> usize {
        self.sets.iter().filter(|s| !s.faulted()).count()
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    time: u64,
    server: usize,
    set: usize,
    fault: Option<FaultKindOrd>,
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum FaultKindOrd {
    ServerFailed,
    Dropped,
}

impl From<FaultKindOrd> for FaultKind {
    fn from(k: FaultKindOrd) -> Self {
        match k {
            FaultKindOrd::ServerFailed => FaultKind::ServerFailed,
            FaultKindOrd::Dropped => FaultKind::Dropped,
        }
    }
}

/// Runs one retrieval session for 0-based `part` over the plan's sets.
pub fn retrieve(fleet: &Fleet, plan: &RecoveryPlan, part: usize) -> Result<SessionTranscript> {
    let code = &fleet.code;
    if part >= code.p() {
        return Err(Error::Contract(format!("part {} outside 1..={}", part + 1, code.p())));
    }
    verify_plan(code, plan).map_err(|v| Error::Contract(format!("invalid plan: {v}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(fleet.config.seed);
    rng.set_stream(part as u64 + 1);

    let sets = plan.sets_for(part);
    let mut events = Vec::new();
    let mut queue = BinaryHeap::new();
    let mut outstanding: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let mut lost = vec![false; sets.len()];
    for (si, set) in sets.iter().enumerate() {
        for server in set.iter() {
            let state = &fleet.servers[server];
            // Draw jitter and drop for every request so the stream stays
            // aligned regardless of faults.
            let jitter = rng.random_range(0..=fleet.config.jitter);
            let dropped = rng.random_bool(state.drop_probability);
            events.push(Event::Request {
                time: 0,
                part: part + 1,
                set: si + 1,
                server: server + 1,
            });
            let pending = if state.failed {
                Pending {
                    time: fleet.config.timeout,
                    server,
                    set: si,
                    fault: Some(FaultKindOrd::ServerFailed),
                }
            } else if dropped {
                Pending {
                    time: fleet.config.timeout,
                    server,
                    set: si,
                    fault: Some(FaultKindOrd::Dropped),
                }
            } else {
                Pending {
                    time: state.base_latency + jitter,
                    server,
                    set: si,
                    fault: None,
                }
            };
            queue.push(Reverse(pending));
        }
    }

    let mut outcomes: Vec<SetOutcome> = sets
        .iter()
        .map(|s| SetOutcome {
            columns: s.as_slice().to_vec(),
            value: None,
            completed_at: None,
        })
        .collect();
    let mut clock = 0;
    while let Some(Reverse(ev)) = queue.pop() {
        clock = ev.time;
        let si = ev.set;
        match ev.fault {
            Some(kind) => {
                events.push(Event::Fault {
                    time: ev.time,
                    part: part + 1,
                    set: si + 1,
                    server: ev.server + 1,
                    kind: kind.into(),
                });
                lost[si] = true;
            }
            None => events.push(Event::Response {
                time: ev.time,
                part: part + 1,
                set: si + 1,
                server: ev.server + 1,
                cells: fleet.servers[ev.server].cells.clone(),
            }),
        }
        outstanding[si] -= 1;
        if outstanding[si] == 0 {
            let value = if lost[si] {
                None
            } else {
                Some(solve_set(fleet, &outcomes[si].columns, part)?)
            };
            events.push(Event::Solve {
                time: ev.time,
                part: part + 1,
                set: si + 1,
                value: value.clone(),
            });
            outcomes[si].value = value;
            outcomes[si].completed_at = Some(ev.time);
        }
    }

    let truth = &fleet.database[part];
    let values: Vec<&Chunk> = outcomes.iter().filter_map(|o| o.value.as_ref()).collect();
    let status = if values.is_empty() {
        SessionStatus::RetrievalFailed
    } else {
        SessionStatus::Recovered
    };
    let agreement = !values.is_empty() && values.iter().all(|v| *v == truth);
    let value = values.first().map(|v| (*v).clone());
    events.push(Event::Verdict {
        time: clock,
        part: part + 1,
        status,
        agreement,
        surviving_sets: values.len(),
        value: value.clone(),
    });
    Ok(SessionTranscript {
        part,
        sets: outcomes,
        events,
        value,
        agreement,
        status,
    })
}

fn solve_set(fleet: &Fleet, columns: &[usize], part: usize) -> Result<Chunk> {
    let code = &fleet.code;
    let mut cells = Vec::new();
    let mut values = Vec::new();
    for &j in columns {
        cells.extend(code.column(j).cells().iter().cloned());
        values.extend(fleet.servers[j].cells.iter());
    }
    let target = PartVector::unit(code.p(), part);
    let picks = solve_combination(&cells, &target)?
        .ok_or_else(|| Error::Contract(format!("set {columns:?} does not span x_{}", part + 1)))?;
    let mut acc = Chunk::zeros(fleet.config.chunk_bits);
    for i in picks {
        acc.xor_assign(values[i]);
    }
    Ok(acc)
}

/// Sessions for every part in order.
pub fn retrieve_all(fleet: &Fleet, plan: &RecoveryPlan) -> Result<Vec<SessionTranscript>> {
    (0..fleet.code.p()).map(|i| retrieve(fleet, plan, i)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartAvailability {
    /// Sets the plan gives this part.
    pub planned: usize,
    pub min_surviving: usize,
    pub mean_surviving: f64,
    /// Trials in which no set survived.
    pub failed_trials: usize,
    /// Trials in which the surviving sets disagreed or were wrong.
    pub disagreements: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub trials: usize,
    pub failures_per_trial: usize,
    pub per_part: Vec<PartAvailability>,
}

impl SweepSummary {
    pub fn min_surviving(&self) -> usize {
        self.per_part.iter().map(|p| p.min_surviving).min().unwrap_or(0)
    }

    /// Every part kept at least `k_i - f` sets in every trial.
    pub fn guarantee_holds(&self) -> bool {
        self.per_part
            .iter()
            .all(|p| p.min_surviving >= p.planned.saturating_sub(self.failures_per_trial))
    }

    pub fn retrieval_failed(&self) -> bool {
        self.per_part.iter().any(|p| p.failed_trials > 0)
    }
}

/// Fails `failures` random servers per trial and runs a session for every
/// part, counting recovery sets that still answer.
pub fn availability_sweep(fleet: &Fleet, plan: &RecoveryPlan, trials: usize, failures: usize) -> Result<SweepSummary> {
    let m = fleet.code.m();
    if failures > m {
        return Err(Error::Parameter(format!("cannot fail {failures} of {m} servers")));
    }
    verify_plan(&fleet.code, plan).map_err(|v| Error::Contract(format!("invalid plan: {v}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(fleet.config.seed);
    rng.set_stream(0);
    let p = fleet.code.p();
    let mut min = vec![usize::MAX; p];
    let mut total = vec![0usize; p];
    let mut failed_trials = vec![0usize; p];
    let mut disagreements = vec![0usize; p];
    for _ in 0..trials {
        let failed: BTreeSet<usize> = sample(&mut rng, m, failures).into_iter().collect();
        let trial_fleet = fleet.with_failed(failed)?;
        for part in 0..p {
            let session = retrieve(&trial_fleet, plan, part)?;
            let surviving = session.surviving_sets();
            min[part] = min[part].min(surviving);
            total[part] += surviving;
            if session.status == SessionStatus::RetrievalFailed {
                failed_trials[part] += 1;
            } else if !session.agreement {
                disagreements[part] += 1;
            }
        }
    }
    let per_part = (0..p)
        .map(|i| PartAvailability {
            planned: plan.sets_for(i).len(),
            min_surviving: if trials == 0 { plan.sets_for(i).len() } else { min[i] },
            mean_surviving: if trials == 0 {
                plan.sets_for(i).len() as f64
            } else {
                total[i] as f64 / trials as f64
            },
            failed_trials: failed_trials[i],
            disagreements: disagreements[i],
        })
        .collect();
    Ok(SweepSummary {
        trials,
        failures_per_trial: failures,
        per_part,
    })
}
