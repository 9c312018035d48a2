//! Fixed-length bit strings. Index `k = 1` is the leftmost, most significant bit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite string over `{0,1}`.
///
/// The derived ordering is lexicographic, which for equal-length strings is the
/// same as unsigned numeric order with the leftmost bit most significant.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    /// The `len`-bit big-endian encoding of `value`. Bits of `value` above `len` are dropped.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString(
            (0..len)
                .map(|i| {
                    let shift = len - 1 - i;
                    shift < 64 && (value >> shift) & 1 == 1
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit `k`, 1-based from the left.
    pub fn get(&self, k: usize) -> Result<bool> {
        if k == 0 || k > self.0.len() {
            return Err(Error::BitIndex {
                index: k,
                len: self.0.len(),
            });
        }
        Ok(self.0[k - 1])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Splits into consecutive blocks of `width` bits. `len` must be a multiple of `width`.
    pub fn chunks(&self, width: usize) -> impl Iterator<Item = BitString> + '_ {
        self.0.chunks(width).map(|c| BitString(c.to_vec()))
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: BitString = "0110".parse().unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_string(), "0110");
        assert!("01a".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().unwrap().is_empty());
    }

    #[test]
    fn one_based_indexing() {
        let s: BitString = "10".parse().unwrap();
        assert_eq!(s.get(1), Ok(true));
        assert_eq!(s.get(2), Ok(false));
        assert!(s.get(0).is_err());
        assert!(s.get(3).is_err());
    }

    #[test]
    fn order_matches_numeric_order() {
        for width in 1..=4 {
            for a in 0..(1u64 << width) {
                for b in 0..(1u64 << width) {
                    let (sa, sb) = (BitString::from_u64(a, width), BitString::from_u64(b, width));
                    assert_eq!(sa.cmp(&sb), a.cmp(&b), "{sa} vs {sb}");
                }
            }
        }
    }

    #[test]
    fn from_u64_is_big_endian() {
        assert_eq!(BitString::from_u64(2, 2).to_string(), "10");
        assert_eq!(BitString::from_u64(1, 3).to_string(), "001");
    }
}
