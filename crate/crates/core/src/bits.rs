//! Fixed-length bit strings. Bit `i` of a string is the input variable `x_i`;
//! the textual form lists `x_0` first.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len {
            b.set(i, true);
        }
        b
    }

    /// Low `len` bits of `value`, bit 0 first. `len` may not exceed 64.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 holds at most 64 bits");
        let mut b = Self::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            b.words[0] = value & mask;
        }
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            b.set(i, v);
        }
        b
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
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// The whole string as an integer; only for strings of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 needs at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Little-endian unsigned integer stored in `width ≤ 64` bits from `start`.
    pub fn read_uint(&self, start: usize, width: usize) -> u64 {
        debug_assert!(width <= 64 && start + width <= self.len);
        let mut v = 0u64;
        for t in 0..width {
            if self.get(start + t) {
                v |= 1 << t;
            }
        }
        v
    }

    pub fn write_uint(&mut self, start: usize, width: usize, value: u64) {
        debug_assert!(width <= 64 && start + width <= self.len);
        for t in 0..width {
            self.set(start + t, (value >> t) & 1 == 1);
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> Bits {
        let mut out = Bits::zeros(len);
        for t in 0..len {
            out.set(t, self.get(start + t));
        }
        out
    }

    pub fn write_slice(&mut self, start: usize, src: &Bits) {
        for t in 0..src.len() {
            self.set(start + t, src.get(t));
        }
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Bits::zeros(self.len + other.len);
        out.write_slice(0, self);
        out.write_slice(self.len, other);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Hex dump of the packed bytes, byte 0 (bits 0..8) first.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8).max(1);
        let mut s = String::with_capacity(2 * nbytes);
        for byte in 0..nbytes {
            let mut v = 0u8;
            for t in 0..8 {
                let i = byte * 8 + t;
                if i < self.len && self.get(i) {
                    v |= 1 << t;
                }
            }
            s.push_str(&format!("{v:02x}"));
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Bits, BitsParseError> {
        let hex = hex.trim();
        if !hex.len().is_multiple_of(2) {
            return Err(BitsParseError::OddHexLength);
        }
        let nbytes = len.div_ceil(8).max(1);
        if hex.len() != 2 * nbytes {
            return Err(BitsParseError::Length { expected: 2 * nbytes, got: hex.len() });
        }
        let mut out = Bits::zeros(len);
        for byte in 0..nbytes {
            let v = u8::from_str_radix(&hex[2 * byte..2 * byte + 2], 16)
                .map_err(|_| BitsParseError::BadDigit)?;
            for t in 0..8 {
                let i = byte * 8 + t;
                if (v >> t) & 1 == 1 {
                    if i >= len {
                        return Err(BitsParseError::TrailingBits);
                    }
                    out.set(i, true);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BitsParseError {
    #[error("bit string may contain only 0 and 1")]
    BadBit,
    #[error("invalid hex digit")]
    BadDigit,
    #[error("hex string has odd length")]
    OddHexLength,
    #[error("expected {expected} hex digits, got {got}")]
    Length { expected: usize, got: usize },
    #[error("hex string sets bits beyond the declared length")]
    TrailingBits,
}

impl FromStr for Bits {
    type Err = BitsParseError;

    /// Accepts `0`/`1` characters; spaces and underscores are separators.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        let mut b = Bits::zeros(chars.len());
        for (i, c) in chars.iter().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(i, true),
                _ => return Err(BitsParseError::BadBit),
            }
        }
        Ok(b)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.iter() {
            f.write_str(if v { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}
