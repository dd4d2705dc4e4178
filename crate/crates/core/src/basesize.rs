//! Base size of Sym(n) on k-subsets from the signed sum over cycle types.
//!
//! `h_l`, the number of l-tuples of k-subsets fixed only by the identity, is
//!
//! ```text
//! h_l = sum over cycle types ct of n:  sign(ct) * |class(ct)| * fix(ct, k)^l
//! ```
//!
//! and `b(n, k)` is the least `l >= 1` with `h_l != 0`. Only `fix(ct, k)`
//! enters through the power, so the engine groups the signed class sizes by
//! fix count once ([`WeightTable`]) and then evaluates every `l` against the
//! grouped table.

use std::collections::VecDeque;
use std::fmt;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fixcount::binomial_big;
use crate::pass::{weight_table_with, PassOptions, PassReport};
use crate::store::{split_sign, Accumulator, Store};

/// Signed class weight per fixed-subset count: `h_l = sum_m w_m * m^l`.
///
/// Entries are kept sorted by `m` with zero weights removed, so two tables
/// with the same contents compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    n: u32,
    k: u32,
    store: Store,
}

/// Consecutive `l` evaluated per sweep over the table.
const H_BATCH: u32 = 4;

impl WeightTable {
    pub(crate) fn from_store(n: u32, k: u32, store: Store) -> Self {
        WeightTable { n, k, store }
    }

    pub(crate) fn into_store(self) -> Store {
        self.store
    }

    /// Builds a table from `(m, w_m)` pairs, summing repeated `m`. Fails if
    /// a weight exceeds `n!` in magnitude.
    pub fn from_entries(
        n: u32,
        k: u32,
        entries: impl IntoIterator<Item = (BigUint, BigInt)>,
    ) -> Result<Self> {
        let mut acc = Accumulator::new(n);
        for (m, w) in entries {
            acc.add_weight(m, &w).map_err(Error::InvalidArgument)?;
        }
        Ok(Self::from_store(n, k, acc.into_store()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Nonzero weights in ascending order of fix count.
    pub fn entries(&self) -> impl Iterator<Item = (BigUint, BigInt)> + '_ {
        self.store.iter()
    }

    pub fn weight(&self, m: &BigUint) -> BigInt {
        self.store.get(m)
    }

    pub fn distinct_counts(&self) -> usize {
        self.store.len()
    }

    pub fn h_value(&self, l: u32) -> BigInt {
        self.h_batch(l, 1).pop().expect("one value")
    }

    /// `h_l` for `l = first, ..., first + count - 1` in one sweep, keeping
    /// `m^l` per entry and multiplying once per step.
    pub fn h_batch(&self, first: u32, count: u32) -> Vec<BigInt> {
        let count = count as usize;
        let mut pos = vec![BigUint::zero(); count];
        let mut neg = vec![BigUint::zero(); count];
        let mut add = |negative: bool, weight: &BigUint, m: &BigUint| {
            let mut power = m.pow(first);
            for j in 0..count {
                if j > 0 {
                    power *= m;
                }
                let term = weight * &power;
                if negative {
                    neg[j] += term;
                } else {
                    pos[j] += term;
                }
            }
        };
        for (m, limbs) in self.store.small() {
            if m == 0 && first > 0 {
                continue;
            }
            let (negative, weight) = split_sign(limbs);
            add(negative, &weight, &BigUint::from(m));
        }
        for (m, w) in self.store.wide() {
            add(w.sign() == Sign::Minus, w.magnitude(), m);
        }
        pos.into_iter()
            .zip(neg)
            .map(|(p, q)| BigInt::from_biguint(Sign::Plus, p) - BigInt::from_biguint(Sign::Plus, q))
            .collect()
    }

    /// `(l, h_l)` for `l = 1, 2, ...`, computed a few `l` at a time.
    pub fn h_values(&self) -> HValues<'_> {
        HValues {
            table: self,
            next: 1,
            ready: VecDeque::new(),
        }
    }
}

impl fmt::Display for WeightTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, w) in self.entries() {
            writeln!(f, "{m}\t{w}")?;
        }
        Ok(())
    }
}

pub struct HValues<'a> {
    table: &'a WeightTable,
    next: u32,
    ready: VecDeque<(u32, BigInt)>,
}

impl Iterator for HValues<'_> {
    type Item = (u32, BigInt);

    fn next(&mut self) -> Option<(u32, BigInt)> {
        if self.ready.is_empty() {
            let count = H_BATCH.min(u32::MAX - self.next);
            if count == 0 {
                return None;
            }
            let first = self.next;
            self.ready
                .extend((first..).zip(self.table.h_batch(first, count)));
            self.next += count;
        }
        self.ready.pop_front()
    }
}

/// `h_l` from a finished table.
pub fn h_value(table: &WeightTable, l: u32) -> BigInt {
    table.h_value(l)
}

pub(crate) fn check_table_args(n: u32, k: u32) -> Result<()> {
    if k == 0 || 2 * u64::from(k) > u64::from(n) {
        return Err(Error::invalid(format!(
            "weight tables need 1 <= k <= n/2, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Weight table for `1 <= k <= n/2` using the global thread pool.
pub fn weight_table(n: u32, k: u32) -> Result<WeightTable> {
    Ok(weight_table_with(n, k, &PassOptions::default())?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    PartitionFormula,
    HalasiClosedForm,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PartitionFormula => "partition-formula",
            Method::HalasiClosedForm => "halasi-closed-form",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSizeResult {
    pub n: u32,
    /// `k` as requested, before folding onto `min(k, n - k)`.
    pub k: u32,
    pub b: u32,
    pub method: Method,
    /// Every `(l, h_l)` evaluated, from `l = 1` through `l = b`.
    pub trace: Option<Vec<(u32, BigInt)>>,
}

/// Least `l >= 1` with `n! <= C(n, k)^l`.
///
/// A base of size `l` makes `g -> (image of the base)` injective from
/// Sym(n) into l-tuples of k-subsets, so this never exceeds `b(n, k)`.
pub fn scan_lower_bound(n: u32, k: u32) -> u32 {
    let order: BigUint = (1..=n).map(BigUint::from).product();
    let points = binomial_big(n, k);
    if points <= BigUint::one() {
        return 1;
    }
    let mut l = 1;
    let mut reach = points.clone();
    while reach < order {
        reach *= &points;
        l += 1;
    }
    l
}

fn normalize(n: u32, k: u32) -> Result<u32> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "base size needs n >= 2, got n = {n}"
        )));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds n = {n}")));
    }
    if k == 0 || k == n {
        return Err(Error::NoBase { n, k });
    }
    Ok(k.min(n - k))
}

/// `b(n, k)` via the grouped signed sum.
pub fn base_size(n: u32, k: u32) -> Result<BaseSizeResult> {
    Ok(base_size_with(n, k, &PassOptions::default())?.0)
}

pub fn base_size_with(n: u32, k: u32, opts: &PassOptions) -> Result<(BaseSizeResult, PassReport)> {
    let kk = normalize(n, k)?;
    let (table, report) = weight_table_with(n, kk, opts)?;
    let (b, trace) = scan(&table)?;
    Ok((
        BaseSizeResult {
            n,
            k,
            b,
            method: Method::PartitionFormula,
            trace: Some(trace),
        },
        report,
    ))
}

/// Finds the least `l` with `h_l != 0`. Values below the counting lower
/// bound are still evaluated and must all vanish.
pub fn scan(table: &WeightTable) -> Result<(u32, Vec<(u32, BigInt)>)> {
    scan_timed(table, |_, _| {})
}

/// [`scan`], reporting the time spent on each sweep of consecutive `l`.
pub fn scan_timed(
    table: &WeightTable,
    mut on_sweep: impl FnMut(RangeInclusive<u32>, Duration),
) -> Result<(u32, Vec<(u32, BigInt)>)> {
    let (n, k) = (table.n, table.k);
    let bound = scan_lower_bound(n, k);
    let mut trace = Vec::new();
    let mut first = 1u32;
    loop {
        let start = Instant::now();
        let hs = table.h_batch(first, H_BATCH);
        on_sweep(first..=first + H_BATCH - 1, start.elapsed());
        for (l, h) in (first..).zip(hs) {
            let nonzero = !h.is_zero();
            if nonzero && l < bound {
                return Err(Error::LowerBoundViolated {
                    n,
                    k,
                    l,
                    bound,
                    h: h.to_string(),
                });
            }
            trace.push((l, h));
            if nonzero {
                return Ok((l, trace));
            }
            // the full tuple of all k-subsets is always a base
            if l > n.max(64) && BigUint::from(l) > binomial_big(n, k) {
                return Err(Error::ResourceLimit(format!(
                    "no nonzero h_l found for n = {n}, k = {k}"
                )));
            }
        }
        first += H_BATCH;
    }
}

/// `ceil(2(n-1)/(k+1))` and whether `n >= floor(k(k+1)/2) + 1`, the range in
/// which this closed form equals `b(n, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub b: u32,
    pub valid: bool,
}

pub fn halasi_formula(n: u32, k: u32) -> Result<ClosedForm> {
    if n < 2 || k == 0 || 2 * u64::from(k) > u64::from(n) {
        return Err(Error::invalid(format!(
            "closed form needs n >= 2 and 1 <= k <= n/2, got n = {n}, k = {k}"
        )));
    }
    let (n64, k64) = (u64::from(n), u64::from(k));
    let b = (2 * (n64 - 1) + k64) / (k64 + 1);
    Ok(ClosedForm {
        b: b as u32,
        valid: n64 >= closed_form_threshold(k),
    })
}

/// `floor(k(k+1)/2) + 1`.
pub fn closed_form_threshold(k: u32) -> u64 {
    let k = u64::from(k);
    k * (k + 1) / 2 + 1
}
