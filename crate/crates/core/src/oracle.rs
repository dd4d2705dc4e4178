//! Brute-force group computations used to check the engine.
//!
//! Nothing here touches partitions, class sizes or fix-count polynomials.
//! Permutations are enumerated outright, k-subsets are bit masks, and a
//! permutation fixes a subset when it maps the mask to itself. Everything
//! is exponential and guarded by explicit limits.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::partitions::CycleType;

/// Limits for exhaustive enumeration. Exceeding one is an error, never a
/// silent truncation.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Largest degree for searches over all of Sym(n).
    pub max_degree: u32,
    /// Largest vertex count for searches over all labelled graphs.
    pub max_graph_vertices: u32,
    /// Cap on `C(n,k)^l * n!` for [`brute_h`].
    pub max_work: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_degree: 8,
            max_graph_vertices: 6,
            max_work: 20_000_000_000,
        }
    }
}

/// Hard ceiling for single-tuple and single-permutation checks.
pub const MAX_CHECK_DEGREE: u32 = 10;
/// Hard ceiling for subgroup closure.
pub const MAX_CLOSURE_DEGREE: u32 = 7;

fn limit(what: &str, n: u32, max: u32) -> Result<()> {
    if n > max {
        return Err(Error::ResourceLimit(format!(
            "{what} is limited to n <= {max}, got n = {n}"
        )));
    }
    Ok(())
}

/// A bijection on `{1..n}`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    /// From 1-based images: `images[i - 1]` is the image of `i`.
    pub fn from_images(images: &[u32]) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > 64 {
            return Err(Error::invalid("permutation degree must be in 1..=64"));
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x == 0 || x as usize > n || seen[x as usize - 1] {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
            seen[x as usize - 1] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|&x| (x - 1) as u8).collect(),
        })
    }

    /// From disjoint cycles on 1-based points, e.g. `&[&[1, 2, 3]]`.
    pub fn from_cycles(n: u32, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (1..=n).collect();
        let mut used = BTreeSet::new();
        for cycle in cycles {
            for (idx, &a) in cycle.iter().enumerate() {
                if a == 0 || a > n || !used.insert(a) {
                    return Err(Error::invalid(format!("bad cycle {cycle:?} on {n} points")));
                }
                images[a as usize - 1] = cycle[(idx + 1) % cycle.len()];
            }
        }
        Self::from_images(&images)
    }

    pub fn identity(n: u32) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    /// The transposition `(i j)` on 1-based points.
    pub fn transposition(n: u32, i: u32, j: u32) -> Result<Self> {
        if i == j {
            return Err(Error::invalid("a transposition needs two distinct points"));
        }
        Self::from_cycles(n, &[&[i, j]])
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<u32> {
        self.images.iter().map(|&x| u32::from(x) + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &x)| i == x as usize)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    /// Image of a subset mask (bit `i` stands for point `i + 1`).
    pub fn apply_mask(&self, mask: u64) -> u64 {
        let mut out = 0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros();
            out |= 1 << self.images[i as usize];
            rest &= rest - 1;
        }
        out
    }

    pub fn fixes(&self, mask: u64) -> bool {
        self.apply_mask(mask) == mask
    }

    pub fn cycle_lengths(&self) -> Vec<u32> {
        let mut seen = vec![false; self.images.len()];
        let mut lengths = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_parts(&self.cycle_lengths()).expect("degree >= 1")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation without fixed points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("()");
        }
        let mut seen = vec![false; self.images.len()];
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x] as usize;
            }
            write!(f, "({})", cycle.iter().join(" "))?;
        }
        Ok(())
    }
}

/// All of Sym(n), identity first.
pub fn all_permutations(n: u32) -> Vec<Permutation> {
    (0..n as u8)
        .permutations(n as usize)
        .map(|images| Permutation { images })
        .collect()
}

/// All k-subsets of `{1..n}` as masks in colex order.
pub fn k_subsets(n: u32, k: u32) -> Vec<u64> {
    assert!(n <= 32, "subset masks are limited to n <= 32");
    (0u64..1 << n).filter(|m| m.count_ones() == k).collect()
}

pub fn mask_of(points: &[u32]) -> u64 {
    points.iter().fold(0, |m, &p| m | 1 << (p - 1))
}

/// An l-tuple of k-subsets of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetTuple {
    n: u32,
    k: u32,
    subsets: Vec<u64>,
}

impl SubsetTuple {
    pub fn new(n: u32, k: u32, subsets: &[&[u32]]) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::invalid("subset tuples support 1 <= n <= 32"));
        }
        let mut masks = Vec::with_capacity(subsets.len());
        for s in subsets {
            if s.iter().any(|&p| p == 0 || p > n) {
                return Err(Error::invalid(format!("{s:?} is not a subset of 1..={n}")));
            }
            let mask = mask_of(s);
            if mask.count_ones() != k || s.len() != k as usize {
                return Err(Error::invalid(format!(
                    "{s:?} does not have {k} distinct points"
                )));
            }
            masks.push(mask);
        }
        Ok(SubsetTuple {
            n,
            k,
            subsets: masks,
        })
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

/// True iff only the identity of Sym(n) fixes every member of `t` setwise.
pub fn pointwise_stabilizer_is_trivial(t: &SubsetTuple) -> Result<bool> {
    limit("pointwise stabilizer search", t.n, MAX_CHECK_DEGREE)?;
    Ok(all_permutations(t.n)
        .iter()
        .skip(1)
        .all(|g| !t.subsets.iter().all(|&s| g.fixes(s))))
}

/// For each non-identity permutation, the set of subset indices it fixes.
struct FixSets {
    subsets: usize,
    rows: Vec<Vec<u64>>,
}

impl FixSets {
    fn new(n: u32, k: u32) -> Self {
        let subsets = k_subsets(n, k);
        let words = subsets.len().div_ceil(64);
        let rows = all_permutations(n)
            .iter()
            .skip(1)
            .map(|g| {
                let mut row = vec![0u64; words];
                for (idx, &s) in subsets.iter().enumerate() {
                    if g.fixes(s) {
                        row[idx / 64] |= 1 << (idx % 64);
                    }
                }
                row
            })
            .collect();
        FixSets {
            subsets: subsets.len(),
            rows,
        }
    }

    fn fixes(&self, g: usize, subset: usize) -> bool {
        self.rows[g][subset / 64] >> (subset % 64) & 1 == 1
    }

    /// Tuples of length `remaining` more that extend a prefix still fixed by
    /// `survivors` and end up fixed by nothing.
    fn count_bases(&self, survivors: &[usize], remaining: u32) -> u128 {
        if survivors.is_empty() {
            return (self.subsets as u128).pow(remaining);
        }
        if remaining == 0 {
            return 0;
        }
        (0..self.subsets)
            .map(|s| {
                let next: Vec<usize> = survivors
                    .iter()
                    .copied()
                    .filter(|&g| self.fixes(g, s))
                    .collect();
                self.count_bases(&next, remaining - 1)
            })
            .sum()
    }

    fn base_exists(&self, survivors: &[usize], remaining: u32) -> bool {
        if survivors.is_empty() {
            return true;
        }
        if remaining == 0 {
            return false;
        }
        (0..self.subsets).any(|s| {
            let next: Vec<usize> = survivors
                .iter()
                .copied()
                .filter(|&g| self.fixes(g, s))
                .collect();
            next.len() < survivors.len() && self.base_exists(&next, remaining - 1)
        })
    }
}

/// Number of l-tuples of k-subsets fixed only by the identity, by
/// exhaustive search.
pub fn brute_h(n: u32, k: u32, l: u32, budget: &Budget) -> Result<u128> {
    if n == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 0 <= k <= n, n >= 1; got n = {n}, k = {k}"
        )));
    }
    limit("brute-force h", n, budget.max_degree.min(MAX_CHECK_DEGREE))?;
    let points = k_subsets(n, k).len() as u128;
    let order: u128 = (1..=u128::from(n)).product();
    let work = points
        .checked_pow(l)
        .and_then(|p| p.checked_mul(order))
        .filter(|&w| w <= budget.max_work);
    if work.is_none() {
        return Err(Error::ResourceLimit(format!(
            "C({n},{k})^{l} * {n}! exceeds the work budget {}",
            budget.max_work
        )));
    }
    let fix = FixSets::new(n, k);
    let all: Vec<usize> = (0..fix.rows.len()).collect();
    Ok(fix.count_bases(&all, l))
}

/// Smallest l such that some l-tuple of k-subsets has trivial pointwise
/// stabilizer.
pub fn brute_base_size(n: u32, k: u32, budget: &Budget) -> Result<u32> {
    if n == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 0 <= k <= n, n >= 1; got n = {n}, k = {k}"
        )));
    }
    if k == 0 || k == n {
        return Err(Error::NoBase { n, k });
    }
    limit(
        "brute-force base size",
        n,
        budget.max_degree.min(MAX_CHECK_DEGREE),
    )?;
    let fix = FixSets::new(n, k);
    let all: Vec<usize> = (0..fix.rows.len()).collect();
    for l in 1..=fix.subsets as u32 {
        if fix.base_exists(&all, l) {
            return Ok(l);
        }
    }
    unreachable!("the tuple of all k-subsets is a base for 1 <= k < n")
}

/// Number of k-subsets fixed setwise by `g`.
pub fn fixed_subsets_of_permutation(g: &Permutation, k: u32) -> u64 {
    k_subsets(g.degree(), k)
        .into_iter()
        .filter(|&s| g.fixes(s))
        .count() as u64
}

/// A transposition `(i j)`, 1-based with `i < j`, fixing every subset of
/// `{1..n}` that `g` fixes.
pub fn transposition_reduction_witness(g: &Permutation) -> Result<Option<(u32, u32)>> {
    let n = g.degree();
    limit("transposition reduction", n, MAX_CHECK_DEGREE)?;
    if g.is_identity() {
        return Err(Error::invalid(
            "transposition reduction needs a non-identity permutation",
        ));
    }
    let fixed: Vec<u64> = (0u64..1 << n).filter(|&s| g.fixes(s)).collect();
    Ok((0..n).tuple_combinations().find_map(|(i, j)| {
        let tau = Permutation::transposition(n, i + 1, j + 1).expect("distinct points");
        fixed
            .iter()
            .all(|&s| tau.fixes(s))
            .then_some((i + 1, j + 1))
    }))
}

pub fn transposition_reduction_check(g: &Permutation) -> Result<bool> {
    Ok(transposition_reduction_witness(g)?.is_some())
}

/// A simple graph on `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledGraph {
    n: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl LabelledGraph {
    pub fn new(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::invalid(format!("edge ({a}, {b}) leaves 1..={n}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::invalid(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(LabelledGraph { n, edges: set })
    }

    /// The graph whose edges are the set bits of `mask` over the pairs
    /// `(1,2), (1,3), ..., (n-1,n)`.
    pub fn from_pair_mask(n: u32, mask: u64) -> Self {
        let edges = (1..=n)
            .tuple_combinations()
            .enumerate()
            .filter(|(idx, _)| mask >> idx & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        LabelledGraph { n, edges }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n as usize + 1];
        let mut out = Vec::new();
        for start in 1..=self.n {
            if seen[start as usize] {
                continue;
            }
            seen[start as usize] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(a, b) in &self.edges {
                    let other = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        continue;
                    };
                    if !seen[other as usize] {
                        seen[other as usize] = true;
                        comp.push(other);
                        queue.push_back(other);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Partition of `n` formed by the component sizes.
    pub fn component_partition(&self) -> CycleType {
        let sizes: Vec<u32> = self.components().iter().map(|c| c.len() as u32).collect();
        CycleType::from_parts(&sizes).expect("n >= 1")
    }
}

/// Checks that the transpositions along the edges of `graph` generate
/// exactly the permutations that preserve each connected component.
pub fn transposition_generation_check(graph: &LabelledGraph) -> Result<bool> {
    let n = graph.n;
    limit("transposition closure", n, MAX_CLOSURE_DEGREE)?;
    let gens: Vec<Permutation> = graph
        .edges
        .iter()
        .map(|&(a, b)| Permutation::transposition(n, a, b))
        .collect::<Result<_>>()?;

    let id = Permutation::identity(n);
    let mut closure: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let q = p.then(g);
            if closure.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }

    let comps: Vec<u64> = graph.components().iter().map(|c| mask_of(c)).collect();
    let expected: HashSet<Permutation> = all_permutations(n)
        .into_iter()
        .filter(|p| comps.iter().all(|&c| p.fixes(c)))
        .collect();
    Ok(closure == expected)
}

/// Sum of `(-1)^|edges|` over all graphs on `{1..n}` whose component sizes
/// form `partition`.
pub fn signed_graph_sum(n: u32, partition: &CycleType, budget: &Budget) -> Result<i64> {
    if partition.n() != n {
        return Err(Error::invalid(format!(
            "{partition} is not a partition of {n}"
        )));
    }
    limit("graph enumeration", n, budget.max_graph_vertices.min(8))?;
    let pairs = n * (n - 1) / 2;
    let mut total = 0i64;
    for mask in 0u64..1 << pairs {
        let g = LabelledGraph::from_pair_mask(n, mask);
        if g.component_partition() == *partition {
            total += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}

/// `p(n)` by Euler's pentagonal-number recurrence.
pub fn partition_count(n: u32) -> u128 {
    let n = n as usize;
    let mut p = vec![0i128; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc = 0i128;
        for j in 1.. {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > m {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1];
            let g2 = j * (3 * j + 1) / 2;
            if g2 <= m {
                acc += sign * p[m - g2];
            }
        }
        p[m] = acc;
    }
    p[n] as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_basics() {
        let g = Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap();
        assert_eq!(g.images(), vec![2, 3, 1, 4]);
        assert_eq!(g.to_string(), "(1 2 3)");
        assert_eq!(g.cycle_type(), CycleType::from_parts(&[3, 1]).unwrap());
        assert!(g.then(&g).then(&g).is_identity());
        assert!(Permutation::from_images(&[1, 1]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 2], &[2, 3]]).is_err());
        assert_eq!(g.apply_mask(mask_of(&[1, 4])), mask_of(&[2, 4]));
    }

    #[test]
    fn stabilizer_examples() {
        let t = SubsetTuple::new(2, 1, &[&[1]]).unwrap();
        assert!(pointwise_stabilizer_is_trivial(&t).unwrap());
        let t = SubsetTuple::new(3, 1, &[&[1]]).unwrap();
        assert!(!pointwise_stabilizer_is_trivial(&t).unwrap());
        assert!(SubsetTuple::new(3, 2, &[&[1]]).is_err());
        assert!(SubsetTuple::new(3, 2, &[&[1, 1]]).is_err());
        let t = SubsetTuple::new(11, 1, &[&[1]]).unwrap();
        assert!(matches!(
            pointwise_stabilizer_is_trivial(&t),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn six_three_witness() {
        // decided by full Sym(6) enumeration
        let t = SubsetTuple::new(6, 3, &[&[1, 2, 3], &[1, 4, 5], &[2, 4, 6]]).unwrap();
        assert!(pointwise_stabilizer_is_trivial(&t).unwrap());
        let pair = SubsetTuple::new(6, 3, &[&[1, 2, 3], &[1, 4, 5]]).unwrap();
        assert!(!pointwise_stabilizer_is_trivial(&pair).unwrap());
    }

    #[test]
    fn brute_h_examples() {
        let b = Budget::default();
        assert_eq!(brute_h(2, 1, 1, &b).unwrap(), 2);
        assert_eq!(brute_h(3, 1, 1, &b).unwrap(), 0);
        assert_eq!(brute_h(3, 1, 2, &b).unwrap(), 6);
        let tight = Budget { max_work: 10, ..b };
        assert!(matches!(
            brute_h(4, 2, 2, &tight),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn brute_base_examples() {
        let b = Budget::default();
        assert_eq!(brute_base_size(2, 1, &b).unwrap(), 1);
        // ({1,2},{1,3}) is already a base
        assert_eq!(brute_base_size(4, 2, &b).unwrap(), 2);
        assert_eq!(brute_base_size(6, 3, &b).unwrap(), 3);
        assert!(matches!(
            brute_base_size(4, 4, &b),
            Err(Error::NoBase { .. })
        ));
        assert!(matches!(
            brute_base_size(9, 2, &b),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn reduction_examples() {
        let g = Permutation::transposition(3, 1, 2).unwrap();
        assert_eq!(transposition_reduction_witness(&g).unwrap(), Some((1, 2)));
        let g = Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap();
        assert_eq!(transposition_reduction_witness(&g).unwrap(), Some((1, 2)));
        assert!(transposition_reduction_check(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn generation_examples() {
        let path = LabelledGraph::new(3, &[(1, 2), (2, 3)]).unwrap();
        assert!(transposition_generation_check(&path).unwrap());
        let edge = LabelledGraph::new(4, &[(1, 2)]).unwrap();
        assert!(transposition_generation_check(&edge).unwrap());
        assert!(transposition_generation_check(&LabelledGraph::new(3, &[]).unwrap()).unwrap());
        assert!(LabelledGraph::new(3, &[(1, 1)]).is_err());
        assert!(LabelledGraph::new(3, &[(1, 2), (2, 1)]).is_err());
    }

    #[test]
    fn signed_sums() {
        let b = Budget::default();
        let ct = |p: &[u32]| CycleType::from_parts(p).unwrap();
        assert_eq!(signed_graph_sum(1, &ct(&[1]), &b).unwrap(), 1);
        assert_eq!(signed_graph_sum(3, &ct(&[3]), &b).unwrap(), 2);
        assert_eq!(signed_graph_sum(4, &ct(&[2, 2]), &b).unwrap(), 3);
        assert!(signed_graph_sum(7, &ct(&[7]), &b).is_err());
    }

    #[test]
    fn pentagonal_counts() {
        let known = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &p) in known.iter().enumerate() {
            assert_eq!(partition_count(n as u32), p);
        }
        assert_eq!(partition_count(60), 966_467);
        assert_eq!(partition_count(105), 342_325_709);
    }
}
