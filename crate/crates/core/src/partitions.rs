//! Integer partitions of `n` in exponential notation, read as cycle types of
//! permutations in Sym(n).
//!
//! Partitions are streamed in reverse-lexicographic order of their part
//! multisets, largest part first: for n = 4 the order is
//! `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`. The stream can be split into
//! disjoint sub-streams by the value of the largest part.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// A partition of `n` stored as `(part, multiplicity)` pairs with nonzero
/// multiplicities, sorted by strictly decreasing part.
///
/// Semantically this is the dense vector `c_1..c_n` where `c_i` counts the
/// cycles of length `i`; [`CycleType::multiplicity`] and
/// [`CycleType::dense`] expose that view.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType {
    n: u32,
    parts: Vec<(u32, u32)>,
}

impl CycleType {
    /// Builds a cycle type from `c[i - 1] = c_i`.
    pub fn from_multiplicities(c: &[u32]) -> Result<Self> {
        let mut n: u64 = 0;
        let mut parts = Vec::new();
        for (idx, &mult) in c.iter().enumerate().rev() {
            if mult > 0 {
                let part = idx as u32 + 1;
                n += u64::from(part) * u64::from(mult);
                parts.push((part, mult));
            }
        }
        Self::checked(n, parts)
    }

    /// Builds a cycle type from a list of parts in any order.
    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::invalid("partition parts must be positive"));
        }
        let mut sorted = parts.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let n: u64 = sorted.iter().map(|&p| u64::from(p)).sum();
        let mut sparse: Vec<(u32, u32)> = Vec::new();
        for p in sorted {
            match sparse.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => sparse.push((p, 1)),
            }
        }
        Self::checked(n, sparse)
    }

    fn checked(n: u64, parts: Vec<(u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a cycle type needs degree n >= 1"));
        }
        let n = u32::try_from(n).map_err(|_| Error::invalid("degree does not fit in 32 bits"))?;
        Ok(CycleType { n, parts })
    }

    /// Cycle type of the identity, `(1^n)`.
    pub fn identity(n: u32) -> Result<Self> {
        Self::from_parts(&vec![1; n as usize])
    }

    /// Cycle type of an n-cycle, `(n^1)`.
    pub fn full_cycle(n: u32) -> Result<Self> {
        Self::from_parts(&[n])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `(part, multiplicity)` pairs, largest part first.
    pub fn sparse(&self) -> &[(u32, u32)] {
        &self.parts
    }

    /// `c_i`, the number of parts equal to `i`.
    pub fn multiplicity(&self, i: u32) -> u32 {
        self.parts
            .iter()
            .find(|(p, _)| *p == i)
            .map_or(0, |&(_, m)| m)
    }

    /// Dense `c_1..c_n`.
    pub fn dense(&self) -> Vec<u32> {
        let mut c = vec![0; self.n as usize];
        for &(p, m) in &self.parts {
            c[p as usize - 1] = m;
        }
        c
    }

    /// Parts in decreasing order, repeated by multiplicity.
    pub fn parts(&self) -> impl Iterator<Item = u32> + '_ {
        self.parts
            .iter()
            .flat_map(|&(p, m)| std::iter::repeat_n(p, m as usize))
    }

    /// Number of cycles, `sum_i c_i`.
    pub fn num_cycles(&self) -> u32 {
        self.parts.iter().map(|&(_, m)| m).sum()
    }

    pub fn largest_part(&self) -> u32 {
        self.parts[0].0
    }
}

impl fmt::Display for CycleType {
    /// Exponential notation in increasing part order, e.g. `(1^2,2^2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (idx, &(p, m)) in self.parts.iter().rev().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            if m == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{m}")?;
            }
        }
        f.write_str(")")
    }
}

/// Streams every partition of `n` exactly once in reverse-lexicographic
/// order.
pub fn partitions_of(n: u32) -> Result<Partitions> {
    if n == 0 {
        return Err(Error::invalid("partitions_of requires n >= 1"));
    }
    Ok(Partitions::starting_at(n, n))
}

/// Iterator over partitions of `n`, optionally confined to a single largest
/// part value.
#[derive(Clone, Debug)]
pub struct Partitions {
    n: u32,
    state: Vec<(u32, u32)>,
    fixed_largest: Option<u32>,
    done: bool,
}

impl Partitions {
    /// The sub-stream of partitions of `n` whose largest part equals
    /// `largest`. Concatenating these for `largest = n, n-1, ..., 1`
    /// reproduces [`partitions_of`].
    pub fn with_largest_part(n: u32, largest: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("partitions require n >= 1"));
        }
        if largest == 0 || largest > n {
            return Err(Error::invalid(format!(
                "largest part {largest} outside 1..={n}"
            )));
        }
        let mut it = Self::starting_at(n, largest);
        it.fixed_largest = Some(largest);
        Ok(it)
    }

    fn starting_at(n: u32, largest: u32) -> Self {
        let mut state = vec![(largest, n / largest)];
        let rem = n % largest;
        if rem > 0 {
            state.push((rem, 1));
        }
        Partitions {
            n,
            state,
            fixed_largest: None,
            done: false,
        }
    }

    /// Moves `state` to its reverse-lex successor; false once exhausted.
    fn advance(&mut self) -> bool {
        let ones = match self.state.last() {
            Some(&(1, m)) => {
                self.state.pop();
                m
            }
            _ => 0,
        };
        let Some(last) = self.state.last_mut() else {
            return false;
        };
        let x = last.0;
        last.1 -= 1;
        if last.1 == 0 {
            self.state.pop();
        }
        let mass = x + ones;
        let y = x - 1;
        self.state.push((y, mass / y));
        let rem = mass % y;
        if rem > 0 {
            self.state.push((rem, 1));
        }
        true
    }
}

impl Iterator for Partitions {
    type Item = CycleType;

    fn next(&mut self) -> Option<CycleType> {
        if self.done {
            return None;
        }
        let current = CycleType {
            n: self.n,
            parts: self.state.clone(),
        };
        if !self.advance() {
            self.done = true;
        } else if let Some(p) = self.fixed_largest {
            if self.state[0].0 != p {
                self.done = true;
            }
        }
        Some(current)
    }
}

/// Number of ways to pick `mult` disjoint cycles of length `part` from
/// `remaining` labelled points: `remaining! / ((remaining - part*mult)! *
/// part^mult * mult!)`.
///
/// Multiplying these factors over the `(part, mult)` pairs of a cycle type,
/// with `remaining` decreasing from `n`, yields the class size.
pub fn cycle_block_count(remaining: u32, part: u32, mult: u32) -> BigUint {
    let used = u64::from(part) * u64::from(mult);
    assert!(
        used <= u64::from(remaining),
        "cycles exceed remaining points"
    );
    let mut num = BigUint::one();
    for x in (u64::from(remaining) - used + 1)..=u64::from(remaining) {
        num *= x;
    }
    let mut den = BigUint::one();
    for j in 1..=u64::from(mult) {
        den *= j * u64::from(part);
    }
    debug_assert!((&num % &den) == BigUint::ZERO);
    num / den
}

/// Number of permutations of cycle type `ct`: `n! / prod_i (i^c_i * c_i!)`.
pub fn class_size(ct: &CycleType) -> BigUint {
    let mut remaining = ct.n;
    let mut size = BigUint::one();
    for &(p, m) in &ct.parts {
        size *= cycle_block_count(remaining, p, m);
        remaining -= p * m;
    }
    size
}

/// `(-1)^(n - sum_i c_i)`, the parity of any permutation of type `ct`.
pub fn sign(ct: &CycleType) -> i32 {
    if (ct.n - ct.num_cycles()).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts_of(it: impl Iterator<Item = CycleType>) -> Vec<Vec<u32>> {
        it.map(|ct| ct.parts().collect()).collect()
    }

    #[test]
    fn partitions_of_one() {
        let all: Vec<_> = partitions_of(1).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].dense(), vec![1]);
        assert_eq!(all[0].to_string(), "(1)");
    }

    #[test]
    fn reverse_lex_order_for_four() {
        assert_eq!(
            parts_of(partitions_of(4).unwrap()),
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
    }

    #[test]
    fn zero_is_rejected() {
        assert!(matches!(partitions_of(0), Err(Error::InvalidArgument(_))));
        assert!(CycleType::from_parts(&[]).is_err());
        assert!(CycleType::from_parts(&[2, 0]).is_err());
        assert!(Partitions::with_largest_part(5, 6).is_err());
        assert!(Partitions::with_largest_part(5, 0).is_err());
    }

    #[test]
    fn largest_part_chunks_concatenate_to_full_stream() {
        for n in 1..=15 {
            let full = parts_of(partitions_of(n).unwrap());
            let chunked: Vec<_> = (1..=n)
                .rev()
                .flat_map(|p| parts_of(Partitions::with_largest_part(n, p).unwrap()))
                .collect();
            assert_eq!(full, chunked, "n = {n}");
        }
    }

    #[test]
    fn display_and_dense_views() {
        let ct = CycleType::from_multiplicities(&[2, 2, 0, 0, 0, 0]).unwrap();
        assert_eq!(ct.n(), 6);
        assert_eq!(ct.to_string(), "(1^2,2^2)");
        assert_eq!(ct.dense(), vec![2, 2, 0, 0, 0, 0]);
        assert_eq!(ct.multiplicity(2), 2);
        assert_eq!(ct.multiplicity(5), 0);
        assert_eq!(ct, CycleType::from_parts(&[1, 2, 1, 2]).unwrap());
    }

    #[test]
    fn class_sizes() {
        for n in 1..=10 {
            assert_eq!(class_size(&CycleType::identity(n).unwrap()), BigUint::one());
            let fact: BigUint = (1..n).map(BigUint::from).product();
            assert_eq!(class_size(&CycleType::full_cycle(n).unwrap()), fact);
        }
        let ct = CycleType::from_parts(&[1, 1, 2, 2]).unwrap();
        assert_eq!(class_size(&ct), BigUint::from(45u32));
    }

    #[test]
    fn signs() {
        for n in 2..=9 {
            assert_eq!(sign(&CycleType::identity(n).unwrap()), 1);
            let mut parts = vec![1; n as usize - 2];
            parts.push(2);
            assert_eq!(sign(&CycleType::from_parts(&parts).unwrap()), -1);
        }
        assert_eq!(sign(&CycleType::from_parts(&[3]).unwrap()), 1);
    }
}
