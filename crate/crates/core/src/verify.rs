//! Equivalence suites between the engine and the brute-force oracle, sized
//! by a maximum degree.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::basesize::{base_size, closed_form_threshold, halasi_formula, weight_table};
use crate::error::Result;
use crate::fixcount::{fixed_subsets, fixed_subsets_reference};
use crate::oracle::{self, Budget, LabelledGraph};
use crate::partitions::{class_size, partitions_of, sign};

/// Suite names accepted by [`run_suite`], in execution order.
pub const SUITES: &[&str] = &[
    "partitions",
    "fixcount",
    "h",
    "base",
    "reduction",
    "generation",
    "graphs",
    "closed-form",
];

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    /// Individual comparisons that were made.
    pub checked: u64,
    /// Degrees in `1..=nmax` left out because they exceed the suite's limit.
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Degrees `lo..=nmax` within `cap`; the rest are counted as skipped.
fn degrees(
    report: &mut SuiteReport,
    lo: u32,
    nmax: u32,
    cap: u32,
) -> std::ops::RangeInclusive<u32> {
    if nmax > cap {
        report.skipped += u64::from(nmax - cap.max(lo - 1));
    }
    lo..=nmax.min(cap)
}

pub fn run_suite(name: &str, nmax: u32, budget: &Budget) -> Result<SuiteReport> {
    let mut r = SuiteReport {
        name: name.to_string(),
        ..Default::default()
    };
    match name {
        "partitions" => partitions_suite(&mut r, nmax)?,
        "fixcount" => fixcount_suite(&mut r, nmax)?,
        "h" => h_suite(&mut r, nmax, budget)?,
        "base" => base_suite(&mut r, nmax, budget)?,
        "reduction" => reduction_suite(&mut r, nmax, budget),
        "generation" => generation_suite(&mut r, nmax)?,
        "graphs" => graphs_suite(&mut r, nmax, budget)?,
        "closed-form" => closed_form_suite(&mut r, nmax)?,
        other => {
            return Err(crate::Error::InvalidArgument(format!(
                "unknown suite {other:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    }
    Ok(r)
}

fn partitions_suite(r: &mut SuiteReport, nmax: u32) -> Result<()> {
    for n in degrees(r, 1, nmax, 40) {
        let mut count = 0u128;
        let mut total = BigUint::zero();
        let mut signed = BigInt::zero();
        for ct in partitions_of(n)? {
            count += 1;
            let size = class_size(&ct);
            signed += BigInt::from(sign(&ct)) * BigInt::from(size.clone());
            total += size;
        }
        let p = oracle::partition_count(n);
        r.check(count == p, || {
            format!("n = {n}: streamed {count} partitions, p(n) = {p}")
        });
        let fact: BigUint = (1..=n).map(BigUint::from).product();
        r.check(total == fact, || {
            format!("n = {n}: class sizes sum to {total}")
        });
        if n >= 2 {
            r.check(signed.is_zero(), || {
                format!("n = {n}: signed class sizes sum to {signed}")
            });
        }
    }
    Ok(())
}

fn fixcount_suite(r: &mut SuiteReport, nmax: u32) -> Result<()> {
    for n in degrees(r, 1, nmax, 14) {
        for ct in partitions_of(n)? {
            for k in 0..=n {
                let fast = fixed_subsets(&ct, k)?;
                let slow = fixed_subsets_reference(&ct, k)?;
                r.check(fast == slow, || {
                    format!("{ct}, k = {k}: polynomial {fast}, partition sum {slow}")
                });
            }
        }
        if n <= 7 {
            for g in oracle::all_permutations(n) {
                let ct = g.cycle_type();
                for k in 0..=n {
                    let direct = oracle::fixed_subsets_of_permutation(&g, k);
                    let formula = fixed_subsets(&ct, k)?;
                    r.check(formula.to_u64() == Some(direct), || {
                        format!(
                            "{g} on {n} points, k = {k}: enumerated {direct}, formula {formula}"
                        )
                    });
                }
            }
        }
    }
    Ok(())
}

fn h_suite(r: &mut SuiteReport, nmax: u32, budget: &Budget) -> Result<()> {
    for n in degrees(r, 2, nmax, 7.min(budget.max_degree)) {
        for k in 1..=n / 2 {
            let table = weight_table(n, k)?;
            for l in 1..=3 {
                let brute = BigInt::from(oracle::brute_h(n, k, l, budget)?);
                let h = table.h_value(l);
                r.check(brute == h, || {
                    format!("n = {n}, k = {k}, l = {l}: brute {brute}, formula {h}")
                });
            }
        }
    }
    Ok(())
}

fn base_suite(r: &mut SuiteReport, nmax: u32, budget: &Budget) -> Result<()> {
    for n in degrees(r, 2, nmax, 8.min(budget.max_degree)) {
        for k in 1..=n / 2 {
            let brute = oracle::brute_base_size(n, k, budget)?;
            let b = base_size(n, k)?.b;
            r.check(brute == b, || {
                format!("b({n},{k}): brute {brute}, formula {b}")
            });
        }
    }
    Ok(())
}

fn reduction_suite(r: &mut SuiteReport, nmax: u32, budget: &Budget) {
    for n in degrees(r, 1, nmax, 8.min(budget.max_degree)) {
        for g in oracle::all_permutations(n).iter().skip(1) {
            let ok = matches!(oracle::transposition_reduction_check(g), Ok(true));
            r.check(ok, || {
                format!("{g} on {n} points has no dominating transposition")
            });
        }
    }
}

fn generation_suite(r: &mut SuiteReport, nmax: u32) -> Result<()> {
    for n in degrees(r, 1, nmax, 5) {
        for mask in 0u64..1 << (n * (n - 1) / 2) {
            let g = LabelledGraph::from_pair_mask(n, mask);
            let ok = oracle::transposition_generation_check(&g)?;
            r.check(ok, || format!("edge mask {mask:#x} on {n} vertices"));
        }
    }
    Ok(())
}

fn graphs_suite(r: &mut SuiteReport, nmax: u32, budget: &Budget) -> Result<()> {
    for n in degrees(r, 1, nmax, budget.max_graph_vertices.min(6)) {
        for ct in partitions_of(n)? {
            let sum = oracle::signed_graph_sum(n, &ct, budget)?;
            let expected = BigInt::from(sign(&ct)) * BigInt::from(class_size(&ct));
            r.check(BigInt::from(sum) == expected, || {
                format!("{ct}: graph sum {sum}, signed class size {expected}")
            });
        }
    }
    Ok(())
}

fn closed_form_suite(r: &mut SuiteReport, nmax: u32) -> Result<()> {
    for n in degrees(r, 2, nmax, 30) {
        for k in 1..=6u32.min(n / 2) {
            if u64::from(n) < closed_form_threshold(k) {
                continue;
            }
            let closed = halasi_formula(n, k)?.b;
            let b = base_size(n, k)?.b;
            r.check(closed == b, || {
                format!("b({n},{k}) = {b}, closed form {closed}")
            });
        }
    }
    Ok(())
}

/// Runs the named suites (all of them when `names` is empty).
pub fn run_all(names: &[String], nmax: u32, budget: &Budget) -> Result<Vec<SuiteReport>> {
    let selected: Vec<&str> = if names.is_empty() {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    selected
        .into_iter()
        .map(|s| run_suite(s, nmax, budget))
        .collect()
}
