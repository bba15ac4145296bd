use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Fixed-length binary genotype.
///
/// Positions are 0-indexed. The number of one-bits is cached and kept in sync
/// by every mutating method, so unitation functions evaluate in O(1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString {
            words: vec![0; n.div_ceil(64)],
            len: n,
            ones: 0,
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut x = BitString::zeros(n);
        for w in x.words.iter_mut() {
            *w = u64::MAX;
        }
        x.mask_tail();
        x.ones = n;
        x
    }

    /// Uniformly random string of length `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut x = BitString::zeros(n);
        for w in x.words.iter_mut() {
            *w = rng.gen();
        }
        x.mask_tail();
        x.ones = x.words.iter().map(|w| w.count_ones() as usize).sum();
        x
    }

    /// Uniformly random string with exactly `k` one-bits.
    pub fn random_with_ones<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k > n {
            return Err(Error::Argument(format!("cannot place {k} ones in {n} bits")));
        }
        let mut x = BitString::zeros(n);
        for i in rand::seq::index::sample(rng, n, k) {
            x.toggle(i);
        }
        Ok(x)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = BitString::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.toggle(i);
            }
        }
        x
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// Flip position `i` in place. Panics in debug builds when out of range.
    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        let w = &mut self.words[i >> 6];
        if *w & mask == 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
        *w ^= mask;
    }

    /// Copy of `self` with position `i` flipped.
    pub fn flip_bit(&self, i: usize) -> Result<BitString> {
        if i >= self.len {
            return Err(Error::Argument(format!(
                "bit index {i} out of range for length {}",
                self.len
            )));
        }
        let mut y = self.clone();
        y.toggle(i);
        Ok(y)
    }

    #[inline]
    pub fn ones_count(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn zeros_count(&self) -> usize {
        self.len - self.ones
    }

    /// Length of the maximal all-ones prefix.
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for &w in &self.words {
            let t = w.trailing_ones() as usize;
            total += t;
            if t < 64 {
                break;
            }
        }
        total.min(self.len)
    }

    pub fn complement(&self) -> BitString {
        let mut y = self.clone();
        y.complement_in_place();
        y
    }

    pub fn complement_in_place(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        self.mask_tail();
        self.ones = self.len - self.ones;
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions holding a one-bit, ascending.
    pub fn one_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

/// Number of positions where `x` and `y` differ.
pub fn hamming(x: &BitString, y: &BitString) -> Result<usize> {
    if x.len != y.len {
        return Err(Error::Argument(format!(
            "length mismatch: {} vs {}",
            x.len, y.len
        )));
    }
    Ok(x
        .words
        .iter()
        .zip(&y.words)
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum())
}

/// Uniformly random permutation of `0..n` (Fisher-Yates).
pub fn sample_flip_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..n.saturating_sub(1) {
        let j = rng.gen_range(i..n);
        perm.swap(i, j);
    }
    perm
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Argument(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bits(&bits))
    }
}
