//! Fixed-width storage for signed weights.
//!
//! Every partial sum of signed class sizes of Sym(n) lies in `[-n!, n!]`, so
//! a weight fits in [`weight_width`] 64-bit limbs in two's complement. Fix
//! counts below 2^64 index a flat limb arena through a hash table of slot
//! numbers; larger fix counts fall back to a big-integer map.

use std::collections::BTreeMap;
use std::hash::BuildHasher;

use hashbrown::{DefaultHashBuilder, HashTable};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

/// Limbs per weight for degree `n`: the bits of `n!` plus a sign bit.
pub(crate) fn weight_width(n: u32) -> usize {
    let fact: BigUint = (2..=n).map(BigUint::from).product();
    fact.bits() as usize / 64 + 1
}

fn add_magnitude(dst: &mut [u64], mag: &BigUint, negate: bool) {
    let mut carry = false;
    let mut digits = mag.iter_u64_digits();
    for limb in dst.iter_mut() {
        let d = digits.next().unwrap_or(0);
        if d == 0 && !carry && digits.len() == 0 {
            break;
        }
        if negate {
            let (v, b1) = limb.overflowing_sub(d);
            let (v, b2) = v.overflowing_sub(u64::from(carry));
            *limb = v;
            carry = b1 || b2;
        } else {
            let (v, c1) = limb.overflowing_add(d);
            let (v, c2) = v.overflowing_add(u64::from(carry));
            *limb = v;
            carry = c1 || c2;
        }
    }
}

fn add_limbs(dst: &mut [u64], src: &[u64]) {
    let mut carry = false;
    for (a, &b) in dst.iter_mut().zip(src) {
        let (v, c1) = a.overflowing_add(b);
        let (v, c2) = v.overflowing_add(u64::from(carry));
        *a = v;
        carry = c1 || c2;
    }
}

fn is_zero(limbs: &[u64]) -> bool {
    limbs.iter().all(|&l| l == 0)
}

/// Sign and magnitude of a two's-complement limb string.
pub(crate) fn split_sign(limbs: &[u64]) -> (bool, BigUint) {
    let negative = limbs.last().is_some_and(|&top| top >> 63 == 1);
    let digits: Vec<u32> = if negative {
        let mut carry = true;
        limbs
            .iter()
            .flat_map(|&l| {
                let (v, c) = (!l).overflowing_add(u64::from(carry));
                carry = c;
                [v as u32, (v >> 32) as u32]
            })
            .collect()
    } else {
        limbs
            .iter()
            .flat_map(|&l| [l as u32, (l >> 32) as u32])
            .collect()
    };
    (negative, BigUint::new(digits))
}

pub(crate) fn to_bigint(limbs: &[u64]) -> BigInt {
    let (negative, mag) = split_sign(limbs);
    BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, mag)
}

/// `w` as `width` limbs, or `None` if it does not fit.
fn from_bigint(w: &BigInt, width: usize) -> Option<Vec<u64>> {
    if w.magnitude().bits() >= 64 * width as u64 - 1 {
        return None;
    }
    let mut limbs = vec![0; width];
    add_magnitude(&mut limbs, w.magnitude(), w.sign() == Sign::Minus);
    Some(limbs)
}

/// A growing map from fix count to signed weight.
pub(crate) struct Accumulator {
    width: usize,
    hasher: DefaultHashBuilder,
    index: HashTable<u32>,
    keys: Vec<u64>,
    limbs: Vec<u64>,
    wide: BTreeMap<BigUint, BigInt>,
}

impl Accumulator {
    pub(crate) fn new(n: u32) -> Self {
        Accumulator {
            width: weight_width(n),
            hasher: DefaultHashBuilder::default(),
            index: HashTable::new(),
            keys: Vec::new(),
            limbs: Vec::new(),
            wide: BTreeMap::new(),
        }
    }

    fn slot(&mut self, m: u64) -> &mut [u64] {
        let hash = self.hasher.hash_one(m);
        let keys = &self.keys;
        let i = match self.index.find(hash, |&i| keys[i as usize] == m) {
            Some(&i) => i as usize,
            None => {
                let i = self.keys.len();
                let slot = u32::try_from(i).expect("fewer than 2^32 distinct fix counts");
                let (hasher, keys) = (&self.hasher, &self.keys);
                self.index
                    .insert_unique(hash, slot, |&j| hasher.hash_one(keys[j as usize]));
                self.keys.push(m);
                self.limbs.resize(self.limbs.len() + self.width, 0);
                i
            }
        };
        &mut self.limbs[i * self.width..(i + 1) * self.width]
    }

    /// Adds `size` (subtracts it when `negative`) at fix count `m`.
    pub(crate) fn add_class(&mut self, m: u64, size: &BigUint, negative: bool) {
        add_magnitude(self.slot(m), size, negative);
    }

    pub(crate) fn add_class_big(&mut self, m: BigUint, size: &BigUint, negative: bool) {
        match u64::try_from(&m) {
            Ok(small) => self.add_class(small, size, negative),
            Err(_) => {
                let w = self.wide.entry(m).or_default();
                let size = BigInt::from_biguint(Sign::Plus, size.clone());
                if negative {
                    *w -= size;
                } else {
                    *w += size;
                }
            }
        }
    }

    /// Adds an arbitrary weight; fails if it is out of range for the degree.
    pub(crate) fn add_weight(&mut self, m: BigUint, w: &BigInt) -> Result<(), String> {
        match u64::try_from(&m) {
            Ok(small) => {
                let limbs = from_bigint(w, self.width)
                    .ok_or_else(|| format!("weight {w} at fix count {m} is out of range"))?;
                add_limbs(self.slot(small), &limbs);
            }
            Err(_) => *self.wide.entry(m).or_default() += w,
        }
        Ok(())
    }

    pub(crate) fn merge(&mut self, other: &Accumulator) {
        debug_assert_eq!(self.width, other.width);
        for (i, &m) in other.keys.iter().enumerate() {
            let src = &other.limbs[i * other.width..(i + 1) * other.width];
            if !is_zero(src) {
                add_limbs(self.slot(m), src);
            }
        }
        for (m, w) in &other.wide {
            *self.wide.entry(m.clone()).or_default() += w;
        }
    }

    /// Nonzero entries in ascending fix-count order.
    pub(crate) fn sorted_entries(&self) -> impl Iterator<Item = (BigUint, BigInt)> + '_ {
        let w = self.width;
        let mut order: Vec<u32> = (0..self.keys.len() as u32)
            .filter(|&i| !is_zero(&self.limbs[i as usize * w..(i as usize + 1) * w]))
            .collect();
        order.sort_unstable_by_key(|&i| self.keys[i as usize]);
        let small = order.into_iter().map(move |i| {
            let i = i as usize;
            (
                BigUint::from(self.keys[i]),
                to_bigint(&self.limbs[i * w..(i + 1) * w]),
            )
        });
        let wide = self
            .wide
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(m, w)| (m.clone(), w.clone()));
        small.chain(wide)
    }

    /// Sorts in place, drops zero weights, and freezes.
    pub(crate) fn into_store(self) -> Store {
        let Accumulator {
            width,
            index,
            mut keys,
            mut limbs,
            mut wide,
            ..
        } = self;
        drop(index);
        let mut order: Vec<u32> = (0..keys.len() as u32).collect();
        order.sort_unstable_by_key(|&i| {
            let i = i as usize;
            (is_zero(&limbs[i * width..(i + 1) * width]), keys[i])
        });
        let live = order
            .iter()
            .take_while(|&&i| !is_zero(&limbs[i as usize * width..(i as usize + 1) * width]))
            .count();
        permute(&mut order, &mut keys, &mut limbs, width);
        keys.truncate(live);
        keys.shrink_to_fit();
        limbs.truncate(live * width);
        limbs.shrink_to_fit();
        wide.retain(|_, w| !w.is_zero());
        Store {
            width,
            keys,
            limbs,
            wide,
        }
    }

    /// Reopens a frozen store for further accumulation.
    pub(crate) fn from_store(store: Store) -> Self {
        let hasher = DefaultHashBuilder::default();
        let mut index = HashTable::with_capacity(store.keys.len());
        for (i, &m) in store.keys.iter().enumerate() {
            index.insert_unique(hasher.hash_one(m), i as u32, |&j| {
                hasher.hash_one(store.keys[j as usize])
            });
        }
        Accumulator {
            width: store.width,
            hasher,
            index,
            keys: store.keys,
            limbs: store.limbs,
            wide: store.wide,
        }
    }
}

/// Rearranges entries so that position `j` holds what was at `order[j]`.
/// Consumes `order` as scratch.
fn permute(order: &mut [u32], keys: &mut [u64], limbs: &mut [u64], width: usize) {
    let mut tmp = vec![0u64; width];
    for start in 0..order.len() {
        if order[start] as usize == start {
            continue;
        }
        let held_key = keys[start];
        tmp.copy_from_slice(&limbs[start * width..(start + 1) * width]);
        let mut cur = start;
        loop {
            let next = order[cur] as usize;
            order[cur] = cur as u32;
            if next == start {
                keys[cur] = held_key;
                limbs[cur * width..(cur + 1) * width].copy_from_slice(&tmp);
                break;
            }
            keys[cur] = keys[next];
            limbs.copy_within(next * width..(next + 1) * width, cur * width);
            cur = next;
        }
    }
}

/// Frozen, sorted, zero-free weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Store {
    width: usize,
    keys: Vec<u64>,
    limbs: Vec<u64>,
    wide: BTreeMap<BigUint, BigInt>,
}

impl Store {
    pub(crate) fn len(&self) -> usize {
        self.keys.len() + self.wide.len()
    }

    /// Entries with fix count below 2^64, as `(m, limbs)`.
    pub(crate) fn small(&self) -> impl Iterator<Item = (u64, &[u64])> + '_ {
        self.keys
            .iter()
            .copied()
            .zip(self.limbs.chunks_exact(self.width))
    }

    pub(crate) fn wide(&self) -> &BTreeMap<BigUint, BigInt> {
        &self.wide
    }

    pub(crate) fn get(&self, m: &BigUint) -> BigInt {
        match u64::try_from(m) {
            Ok(small) => match self.keys.binary_search(&small) {
                Ok(i) => to_bigint(&self.limbs[i * self.width..(i + 1) * self.width]),
                Err(_) => BigInt::zero(),
            },
            Err(_) => self.wide.get(m).cloned().unwrap_or_default(),
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (BigUint, BigInt)> + '_ {
        self.small()
            .map(|(m, l)| (BigUint::from(m), to_bigint(l)))
            .chain(self.wide.iter().map(|(m, w)| (m.clone(), w.clone())))
    }
}
