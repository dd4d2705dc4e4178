//! Number of k-subsets of `{1..n}` fixed setwise by a permutation of a given
//! cycle type.
//!
//! A subset is fixed exactly when it is a union of whole cycles, so the count
//! is the number of ways to reach total size `k` by picking `b_j` of the `c_j`
//! cycles of each length `j`. [`fixed_subsets_reference`] sums that over the
//! partitions of `k` directly; [`fixed_subsets`] reads it off as the
//! coefficient of `x^k` in `prod_i (1 + x^i)^(c_i)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::partitions::{partitions_of, CycleType};

/// A fixed-subset count, `0 <= value <= C(n, k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixCount(pub BigUint);

impl FixCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for FixCount {
    fn from(v: u64) -> Self {
        FixCount(BigUint::from(v))
    }
}

impl fmt::Display for FixCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_k(ct: &CycleType, k: u32) -> Result<()> {
    if k > ct.n() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the degree n = {}",
            ct.n()
        )));
    }
    Ok(())
}

/// Sum over partitions `eta = (1^b_1, ..., k^b_k)` of `k` of
/// `prod_j C(c_j, b_j)`, with `C(c, b) = 0` for `b > c`.
pub fn fixed_subsets_reference(ct: &CycleType, k: u32) -> Result<FixCount> {
    check_k(ct, k)?;
    if k == 0 {
        return Ok(FixCount(BigUint::one()));
    }
    let c = ct.dense();
    let mut total = BigUint::zero();
    for eta in partitions_of(k)? {
        let mut term = BigUint::one();
        for &(j, b) in eta.sparse() {
            let cj = c.get(j as usize - 1).copied().unwrap_or(0);
            term *= binomial_big(cj, b);
            if term.is_zero() {
                break;
            }
        }
        total += term;
    }
    Ok(FixCount(total))
}

/// Coefficient of `x^k` in `prod_i (1 + x^i)^(c_i)`, truncated at degree `k`.
///
/// Runs in machine words while the coefficients fit and switches to
/// arbitrary precision on the first overflow.
pub fn fixed_subsets(ct: &CycleType, k: u32) -> Result<FixCount> {
    check_k(ct, k)?;
    Ok(match fixed_subsets_u64(ct, k) {
        Some(v) => FixCount::from(v),
        None => FixCount(fixed_subsets_big(ct, k)),
    })
}

/// Machine-word path of [`fixed_subsets`]; `None` on overflow.
pub(crate) fn fixed_subsets_u64(ct: &CycleType, k: u32) -> Option<u64> {
    let mut poly = TruncatedProduct::new(k);
    for &(part, mult) in ct.sparse() {
        if !poly.mul_binomial_power(part, mult) {
            return None;
        }
    }
    Some(poly.top())
}

fn fixed_subsets_big(ct: &CycleType, k: u32) -> BigUint {
    let k = k as usize;
    let mut coeffs = vec![BigUint::zero(); k + 1];
    coeffs[0] = BigUint::one();
    for &(part, mult) in ct.sparse() {
        let step = part as usize;
        if step > k {
            continue;
        }
        let binoms: Vec<BigUint> = (0..=mult.min((k / step) as u32))
            .map(|j| binomial_big(mult, j))
            .collect();
        for d in (0..=k).rev() {
            let mut acc = BigUint::zero();
            for (j, b) in binoms.iter().enumerate().skip(1) {
                let Some(src) = d.checked_sub(j * step) else {
                    break;
                };
                acc += b * &coeffs[src];
            }
            coeffs[d] += acc;
        }
    }
    coeffs.swap_remove(k)
}

/// The polynomial `prod (1 + x^part)^mult` truncated at degree `cap`, with
/// `u64` coefficients and overflow detection.
#[derive(Clone, Debug)]
pub(crate) struct TruncatedProduct {
    coeffs: Vec<u64>,
}

impl TruncatedProduct {
    pub(crate) fn new(cap: u32) -> Self {
        let mut coeffs = vec![0; cap as usize + 1];
        coeffs[0] = 1;
        TruncatedProduct { coeffs }
    }

    /// Multiplies in `(1 + x^part)^mult`. Returns false if a coefficient
    /// overflowed, leaving `self` unspecified.
    pub(crate) fn mul_binomial_power(&mut self, part: u32, mult: u32) -> bool {
        let cap = self.coeffs.len() - 1;
        let step = part as usize;
        if step > cap {
            return true;
        }
        let max_j = mult.min((cap / step) as u32);
        let mut binoms = [0u64; 128];
        let binoms: &mut [u64] = if (max_j as usize) < binoms.len() {
            &mut binoms[..=max_j as usize]
        } else {
            return self.mul_binomial_power_slow(part, mult);
        };
        for (j, slot) in binoms.iter_mut().enumerate() {
            match binomial_u64(mult, j as u32) {
                Some(b) => *slot = b,
                None => return false,
            }
        }
        for d in (step..=cap).rev() {
            let mut acc = self.coeffs[d];
            for (j, &b) in binoms.iter().enumerate().skip(1) {
                let Some(src) = d.checked_sub(j * step) else {
                    break;
                };
                let Some(t) = b.checked_mul(self.coeffs[src]) else {
                    return false;
                };
                let Some(s) = acc.checked_add(t) else {
                    return false;
                };
                acc = s;
            }
            self.coeffs[d] = acc;
        }
        true
    }

    fn mul_binomial_power_slow(&mut self, part: u32, mult: u32) -> bool {
        // (1 + x^part)^mult as mult repeated factors
        let step = part as usize;
        for _ in 0..mult {
            for d in (step..self.coeffs.len()).rev() {
                match self.coeffs[d].checked_add(self.coeffs[d - step]) {
                    Some(s) => self.coeffs[d] = s,
                    None => return false,
                }
            }
        }
        true
    }

    pub(crate) fn top(&self) -> u64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub(crate) fn coeff(&self, degree: u32) -> u64 {
        self.coeffs[degree as usize]
    }
}

/// `C(n, k)` in 64 bits, `None` on overflow.
pub fn binomial_u64(n: u32, k: u32) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..u128::from(k) {
        r = r * (u128::from(n) - i) / (i + 1);
        if r > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(r as u64)
}

/// `C(n, k)` exactly.
pub fn binomial_big(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r *= n - i;
        r /= i + 1;
    }
    r
}
