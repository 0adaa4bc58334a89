//! Bit-packed points of the Hamming cube and their on-disk form.
//!
//! Bit `j` of a code lives in word `j / 64` at bit position `j % 64`; bits past
//! `len` in the last word are always zero, so whole-word XOR + popcount gives
//! the Hamming count directly.
//!
//! Binary layout of a [`CodeSet`]:
//!
//! | bytes   | content                                  |
//! |---------|------------------------------------------|
//! | 0..4    | magic `OB1J`                             |
//! | 4       | format version (1)                       |
//! | 5..13   | `n`, u64 little-endian                   |
//! | 13..21  | `m`, u64 little-endian                   |
//! | 21..    | `n · ⌈m/64⌉` words, u64 little-endian    |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use rand::RngCore;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OB1J";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 8 + 8;

#[inline]
pub fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

#[inline]
fn last_word_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// An element of `{0,1}^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitCode {
    words: Vec<u64>,
    len: usize,
}

impl BitCode {
    pub fn zeros(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(BitCode {
            words: vec![0; words_for(len)],
            len,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut code = BitCode::zeros(bits.len())?;
        for (j, &b) in bits.iter().enumerate() {
            code.set(j, b);
        }
        Ok(code)
    }

    /// Parses a string of `0`/`1` characters, bit 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitCode::from_bits(&bits)
    }

    /// Wraps raw storage words; padding bits must be zero.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        check_len(len)?;
        if words.len() != words_for(len) {
            return Err(Error::Format(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        if words[words.len() - 1] & !last_word_mask(len) != 0 {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        Ok(BitCode { words, len })
    }

    /// Uniformly random code: every bit an independent fair coin.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        check_len(len)?;
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.next_u64()).collect();
        *words.last_mut().unwrap() &= last_word_mask(len);
        Ok(BitCode { words, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "bit {j} out of range for length {}", self.len);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, j: usize, value: bool) {
        let mask = 1u64 << (j % 64);
        if value {
            self.words[j / 64] |= mask;
        } else {
            self.words[j / 64] &= !mask;
        }
    }

    pub fn complement(&self) -> BitCode {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        *words.last_mut().unwrap() &= last_word_mask(self.len);
        BitCode { words, len: self.len }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|j| if self.get(j) { '1' } else { '0' }).collect()
    }
}

/// Number of differing positions, `#{i : a_i ≠ b_i}`.
#[inline]
pub fn hamming_count(a: &BitCode, b: &BitCode) -> Result<usize> {
    if a.len != b.len {
        return Err(Error::LengthMismatch {
            left: a.len,
            right: b.len,
        });
    }
    Ok(xor_popcount(&a.words, &b.words))
}

#[inline]
pub(crate) fn xor_popcount(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
}

/// Normalized Hamming distance `#{i : a_i ≠ b_i} / m`.
pub fn hamming_distance(a: &BitCode, b: &BitCode) -> Result<f64> {
    Ok(hamming_count(a, b)? as f64 / a.len as f64)
}

/// The images of an ordered point set, all of one length `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSet {
    codes: Vec<BitCode>,
    m: usize,
}

impl CodeSet {
    pub fn new(codes: Vec<BitCode>) -> Result<Self> {
        let m = codes
            .first()
            .map(BitCode::len)
            .ok_or_else(|| Error::Format("empty code set".into()))?;
        if let Some(c) = codes.iter().find(|c| c.len() != m) {
            return Err(Error::LengthMismatch { left: m, right: c.len() });
        }
        Ok(CodeSet { codes, m })
    }

    /// `n` iid uniform codes of length `m`.
    pub fn random<R: RngCore + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        check_len(m)?;
        if n == 0 {
            return Err(Error::param("n", "need at least one code"));
        }
        let codes = (0..n).map(|_| BitCode::random(m, rng)).collect::<Result<_>>()?;
        Ok(CodeSet { codes, m })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn codes(&self) -> &[BitCode] {
        &self.codes
    }

    pub fn get(&self, i: usize) -> Option<&BitCode> {
        self.codes.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BitCode> {
        self.codes.iter()
    }

    /// True iff all codes are pairwise distinct.
    pub fn is_injective(&self) -> bool {
        let mut sorted: Vec<&[u64]> = self.codes.iter().map(|c| c.words()).collect();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Every pair `(i, j)`, `i < j`, with equal codes, in lexicographic order.
    pub fn collisions(&self) -> Vec<(usize, usize)> {
        let mut groups: HashMap<&[u64], Vec<usize>> = HashMap::new();
        for (i, c) in self.codes.iter().enumerate() {
            groups.entry(c.words()).or_default().push(i);
        }
        let mut pairs: Vec<(usize, usize)> = groups
            .values()
            .filter(|g| g.len() > 1)
            .flat_map(|g| {
                g.iter()
                    .enumerate()
                    .flat_map(move |(k, &i)| g[k + 1..].iter().map(move |&j| (i, j)))
            })
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn write_binary<W: Write>(&self, mut sink: W) -> Result<()> {
        sink.write_all(MAGIC)?;
        sink.write_all(&[FORMAT_VERSION])?;
        sink.write_all(&(self.codes.len() as u64).to_le_bytes())?;
        sink.write_all(&(self.m as u64).to_le_bytes())?;
        for code in &self.codes {
            for w in code.words() {
                sink.write_all(&w.to_le_bytes())?;
            }
        }
        sink.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.codes.len() * words_for(self.m) * 8);
        self.write_binary(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_binary<R: Read>(mut source: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        source
            .read_exact(&mut header)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if &header[0..4] != MAGIC {
            return Err(Error::Format("bad magic, expected OB1J".into()));
        }
        if header[4] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", header[4])));
        }
        let n = u64::from_le_bytes(header[5..13].try_into().unwrap()) as usize;
        let m = u64::from_le_bytes(header[13..21].try_into().unwrap()) as usize;
        if n == 0 || m == 0 {
            return Err(Error::Format(format!("degenerate header n={n} m={m}")));
        }

        let per_code = words_for(m);
        let mut body = Vec::new();
        source.read_to_end(&mut body)?;
        let expected = n
            .checked_mul(per_code)
            .and_then(|w| w.checked_mul(8))
            .ok_or_else(|| Error::Format("header sizes overflow".into()))?;
        if body.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} payload bytes for n={n} m={m}, found {}",
                body.len()
            )));
        }

        let codes = body
            .chunks_exact(per_code * 8)
            .map(|chunk| {
                let words = chunk
                    .chunks_exact(8)
                    .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
                    .collect();
                BitCode::from_words(words, m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CodeSet { codes, m })
    }

    /// Human-readable dump: a header line, then one line per code with its
    /// storage words in hex, word 0 first.
    pub fn to_hex(&self) -> String {
        let mut out = format!("OB1J v{FORMAT_VERSION} n={} m={}\n", self.codes.len(), self.m);
        for (i, code) in self.codes.iter().enumerate() {
            let _ = write!(out, "{i}:");
            for w in code.words() {
                let _ = write!(out, " {w:016x}");
            }
            out.push('\n');
        }
        out
    }
}

impl<'a> IntoIterator for &'a CodeSet {
    type Item = &'a BitCode;
    type IntoIter = std::slice::Iter<'a, BitCode>;

    fn into_iter(self) -> Self::IntoIter {
        self.codes.iter()
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::param("m", "code length must be at least 1"));
    }
    Ok(())
}
