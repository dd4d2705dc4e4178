//! The single pass over all cycle types of Sym(n) that builds a
//! [`WeightTable`].
//!
//! Partitions are enumerated depth-first, largest part first, one
//! `(part, multiplicity)` level at a time. Each level carries the running
//! class size and the running truncated product `prod (1 + x^i)^(c_i)`, so a
//! leaf costs one big-integer addition. The search space is cut into chunks
//! keyed by the largest part and its multiplicity; chunks reduce
//! independently and merge by per-key addition, so the result does not depend
//! on scheduling.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::basesize::{check_table_args, WeightTable};
use crate::checkpoint::{save_atomically, write_parts, Checkpoint, ChunkId};
use crate::error::{Error, Result};
use crate::fixcount::{fixed_subsets, TruncatedProduct};
use crate::partitions::{cycle_block_count, CycleType};
use crate::store::Accumulator;

/// Knobs for the weight-table pass.
#[derive(Clone, Debug)]
pub struct PassOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Where to persist progress while the pass runs.
    pub checkpoint: Option<PathBuf>,
    /// A checkpoint to resume from.
    pub resume: Option<PathBuf>,
    /// Minimum time between checkpoint writes. Writes are also spaced at
    /// least ten times their own duration apart.
    pub checkpoint_interval: Duration,
}

impl Default for PassOptions {
    fn default() -> Self {
        PassOptions {
            threads: None,
            checkpoint: None,
            resume: None,
            checkpoint_interval: Duration::from_secs(60),
        }
    }
}

impl PassOptions {
    pub fn with_threads(threads: usize) -> Self {
        PassOptions {
            threads: Some(threads),
            ..Default::default()
        }
    }
}

/// What the pass did, for benchmarking.
#[derive(Clone, Debug, Default)]
pub struct PassReport {
    /// Partitions visited in this run (excludes resumed chunks).
    pub partitions: u64,
    /// Partitions covered by the resumed checkpoint.
    pub resumed_partitions: u64,
    pub chunks_total: usize,
    pub chunks_resumed: usize,
    pub elapsed: Duration,
}

/// Chunks of the partitions of `n`, in reverse-lex order of the
/// partitions they contain.
pub fn chunks(n: u32) -> Vec<ChunkId> {
    (1..=n)
        .rev()
        .flat_map(|largest| {
            (1..=n / largest)
                .rev()
                .filter(move |&mult| largest > 1 || mult == n)
                .map(move |mult| ChunkId { largest, mult })
        })
        .collect()
}

/// `cycle_block_count(r, i, c)` for every `r <= n`, `i*c <= r`.
struct BlockFactors {
    table: Vec<Vec<Vec<BigUint>>>,
}

impl BlockFactors {
    fn new(n: u32) -> Self {
        let table = (0..=n)
            .map(|r| {
                (0..=r)
                    .map(|i| match r.checked_div(i) {
                        Some(most) => (1..=most).map(|c| cycle_block_count(r, i, c)).collect(),
                        None => Vec::new(),
                    })
                    .collect()
            })
            .collect();
        BlockFactors { table }
    }

    fn get(&self, remaining: u32, part: u32, mult: u32) -> &BigUint {
        &self.table[remaining as usize][part as usize][mult as usize - 1]
    }
}

struct ChunkWalker<'a> {
    ks: &'a [u32],
    factors: &'a BlockFactors,
    /// `polys[d]` is the truncated product after `d` levels; `None` once
    /// a coefficient overflowed 64 bits.
    polys: Vec<Option<TruncatedProduct>>,
    sizes: Vec<BigUint>,
    stack: Vec<(u32, u32)>,
    acc: Vec<Accumulator>,
    leaves: u64,
}

impl<'a> ChunkWalker<'a> {
    fn new(n: u32, ks: &'a [u32], factors: &'a BlockFactors) -> Self {
        let depth = n as usize + 2;
        let cap = ks.iter().copied().max().unwrap_or(0);
        let mut polys = vec![None; depth];
        polys[0] = Some(TruncatedProduct::new(cap));
        let mut sizes = vec![BigUint::default(); depth];
        sizes[0] = BigUint::from(1u32);
        ChunkWalker {
            ks,
            factors,
            polys,
            sizes,
            stack: Vec::with_capacity(depth),
            acc: ks.iter().map(|_| Accumulator::new(n)).collect(),
            leaves: 0,
        }
    }

    /// One partial per requested k, plus the number of partitions visited.
    fn run(mut self, n: u32, chunk: ChunkId) -> (Vec<Accumulator>, u64) {
        self.descend(0, n, chunk.largest, chunk.mult, false);
        (self.acc, self.leaves)
    }

    /// Pushes level `depth` with `mult` cycles of length `part`, then
    /// recurses over all smaller parts.
    fn descend(&mut self, depth: usize, remaining: u32, part: u32, mult: u32, odd: bool) {
        let (lower, upper) = self.polys.split_at_mut(depth + 1);
        match (&lower[depth], &mut upper[0]) {
            (Some(p), slot) => {
                match slot {
                    Some(q) => q.clone_from(p),
                    None => *slot = Some(p.clone()),
                }
                if !slot
                    .as_mut()
                    .is_some_and(|q| q.mul_binomial_power(part, mult))
                {
                    *slot = None;
                }
            }
            (None, slot) => *slot = None,
        }
        let (lower, upper) = self.sizes.split_at_mut(depth + 1);
        upper[0] = &lower[depth] * self.factors.get(remaining, part, mult);
        let odd = odd ^ ((part - 1) * mult % 2 == 1);
        self.stack.push((part, mult));

        let rest = remaining - part * mult;
        if rest == 0 {
            self.leaf(depth + 1, odd);
        } else {
            for next in (2..=rest.min(part - 1)).rev() {
                for c in (1..=rest / next).rev() {
                    self.descend(depth + 1, rest, next, c, odd);
                }
            }
            if part > 1 {
                self.descend(depth + 1, rest, 1, rest, odd);
            }
        }
        self.stack.pop();
    }

    fn leaf(&mut self, depth: usize, odd: bool) {
        self.leaves += 1;
        let size = &self.sizes[depth];
        match &self.polys[depth] {
            Some(p) => {
                for (acc, &k) in self.acc.iter_mut().zip(self.ks) {
                    acc.add_class(p.coeff(k), size, odd);
                }
            }
            None => {
                let parts: Vec<u32> = self
                    .stack
                    .iter()
                    .flat_map(|&(p, m)| std::iter::repeat_n(p, m as usize))
                    .collect();
                let ct = CycleType::from_parts(&parts).expect("walker builds valid partitions");
                for (acc, &k) in self.acc.iter_mut().zip(self.ks) {
                    let m = fixed_subsets(&ct, k).expect("k <= n").0;
                    acc.add_class_big(m, size, odd);
                }
            }
        }
    }
}

struct Shared {
    entries: Vec<Accumulator>,
    completed: BTreeSet<ChunkId>,
    partitions: u64,
    last_save: Instant,
    /// Duration of the most recent checkpoint write.
    save_cost: Duration,
}

/// Builds the weight table for `(n, k)` with `1 <= k <= n/2`.
pub fn weight_table_with(n: u32, k: u32, opts: &PassOptions) -> Result<(WeightTable, PassReport)> {
    let (mut tables, report) = run_pass(n, &[k], opts)?;
    Ok((tables.pop().expect("one table per k"), report))
}

/// Builds weight tables for several `k` in one pass over the partitions of
/// `n`. Checkpointing is only supported for a single `k`.
pub fn weight_tables_with(
    n: u32,
    ks: &[u32],
    opts: &PassOptions,
) -> Result<(Vec<WeightTable>, PassReport)> {
    if ks.len() != 1 && (opts.checkpoint.is_some() || opts.resume.is_some()) {
        return Err(Error::invalid("checkpoints cover exactly one k"));
    }
    run_pass(n, ks, opts)
}

fn run_pass(n: u32, ks: &[u32], opts: &PassOptions) -> Result<(Vec<WeightTable>, PassReport)> {
    if ks.is_empty() {
        return Err(Error::invalid("no k requested"));
    }
    for &k in ks {
        check_table_args(n, k)?;
    }
    let start = Instant::now();
    let all = chunks(n);

    let mut shared = Shared {
        entries: ks.iter().map(|_| Accumulator::new(n)).collect(),
        completed: BTreeSet::new(),
        partitions: 0,
        last_save: Instant::now(),
        save_cost: Duration::ZERO,
    };
    if let Some(path) = &opts.resume {
        let k = ks[0];
        let cp = Checkpoint::load(path)?;
        if cp.n() != n || cp.k() != k {
            return Err(Error::Checkpoint {
                path: path.clone(),
                reason: format!(
                    "checkpoint is for n = {}, k = {}, not n = {n}, k = {k}",
                    cp.n(),
                    cp.k()
                ),
            });
        }
        if let Some(bad) = cp.completed.iter().find(|c| !all.contains(c)) {
            return Err(Error::Checkpoint {
                path: path.clone(),
                reason: format!("unknown chunk {}:{} for n = {n}", bad.largest, bad.mult),
            });
        }
        shared.entries = vec![Accumulator::from_store(cp.weights.into_store())];
        shared.completed = cp.completed;
        shared.partitions = cp.partitions;
    }
    let resumed_partitions = shared.partitions;
    let chunks_resumed = shared.completed.len();
    let todo: Vec<ChunkId> = all
        .iter()
        .copied()
        .filter(|c| !shared.completed.contains(c))
        .collect();

    let factors = BlockFactors::new(n);
    let shared = Mutex::new(shared);

    let work = || -> Result<()> {
        todo.par_iter().try_for_each(|&chunk| -> Result<()> {
            let (partials, leaves) = ChunkWalker::new(n, ks, &factors).run(n, chunk);
            let mut guard = shared.lock().expect("pass state poisoned");
            for (acc, partial) in guard.entries.iter_mut().zip(&partials) {
                acc.merge(partial);
            }
            drop(partials);
            guard.completed.insert(chunk);
            guard.partitions += leaves;
            if let Some(path) = &opts.checkpoint {
                let wait = opts.checkpoint_interval.max(guard.save_cost * 10);
                if guard.last_save.elapsed() >= wait {
                    let started = Instant::now();
                    save_snapshot(path, n, ks[0], &guard)?;
                    guard.save_cost = started.elapsed();
                    guard.last_save = Instant::now();
                }
            }
            Ok(())
        })
    };
    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("cannot start {t} workers: {e}")))?
            .install(work)?,
        None => work()?,
    }

    let state = shared.into_inner().expect("pass state poisoned");
    if let Some(path) = &opts.checkpoint {
        save_snapshot(path, n, ks[0], &state)?;
    }
    let report = PassReport {
        partitions: state.partitions - resumed_partitions,
        resumed_partitions,
        chunks_total: all.len(),
        chunks_resumed,
        elapsed: start.elapsed(),
    };
    let tables = state
        .entries
        .into_iter()
        .zip(ks)
        .map(|(acc, &k)| WeightTable::from_store(n, k, acc.into_store()))
        .collect();
    Ok((tables, report))
}

fn save_snapshot(path: &Path, n: u32, k: u32, state: &Shared) -> Result<()> {
    save_atomically(path, |out| {
        write_parts(
            out,
            n,
            k,
            &state.completed,
            state.partitions,
            state.entries[0].sorted_entries(),
        )
    })
}
