//! Plain bit strings for messages, common randomness, and decoder output.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("bit strings may contain only '0' and '1'")]
pub struct BitsParseError;

/// Word-packed bit string indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// The low `len` bits of `value`, index 0 at the least significant bit.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64);
        let mut b = Bits::new(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1 << len) - 1 };
            if !b.words.is_empty() {
                b.words[0] = value & mask;
            }
        }
        b
    }

    pub fn from_str01(s: &str) -> Result<Self, BitsParseError> {
        let mut b = Bits::new(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => b.set(i, true),
                _ => return Err(BitsParseError),
            }
        }
        Ok(b)
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut b = Bits::new(len);
        for w in &mut b.words {
            *w = rng.gen();
        }
        b.mask_top();
        b
    }

    fn mask_top(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn xor_bit(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] ^= 1 << (i % 64);
        }
    }

    pub fn count_mismatches(&self, other: &Bits) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    pub fn clear(&mut self) {
        for w in &mut self.words {
            *w = 0;
        }
    }
}

impl std::fmt::Display for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_string_form() {
        let b = Bits::from_str01("01101").unwrap();
        assert_eq!(b.to_string(), "01101");
        assert_eq!(b.len(), 5);
        assert!(!b.get(0));
        assert!(b.get(1));
        assert!(Bits::from_str01("01x").is_err());
    }

    #[test]
    fn from_u64_is_lsb_first() {
        let b = Bits::from_u64(4, 0b0110);
        assert_eq!(b.to_string(), "0110");
    }

    #[test]
    fn mismatch_count() {
        let a = Bits::from_str01("0110").unwrap();
        let b = Bits::from_str01("0011").unwrap();
        assert_eq!(a.count_mismatches(&b), 2);
    }
}
