//! Fixed-width bitstring arithmetic and the canonical encodings that turn
//! identities, passwords, counters, and timestamps into XOR-able words.
//!
//! Every quantity the card schemes hash or XOR lives in a [`Word`] of exactly
//! `W` bits, where `W` is a scenario-wide configuration knob (default 256).
//! Operations on mixed widths are rejected before any computation happens.

use std::fmt;

use rand::RngCore;
use sha2::{Digest, Sha256};

/// Errors raised by word arithmetic and the canonical encoders.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("word width mismatch: {left} bits vs {right} bits")]
    WidthMismatch { left: usize, right: usize },
    #[error("unsupported word width {bits}: must be a multiple of 8 and at least 64")]
    UnsupportedWidth { bits: usize },
    #[error("identity must be 1..={max} bytes at this width, got {len}")]
    IdentityLength { len: usize, max: usize },
    #[error("identity must not end with a zero byte")]
    IdentityTrailingZero,
    #[error("password must be 1..={max} bytes at this width, got {len}")]
    PasswordLength { len: usize, max: usize },
    #[error("password must not end with a zero byte")]
    PasswordTrailingZero,
}

/// Scenario-wide word width in bits.
///
/// Widths are byte-aligned and at least 64 bits so that the timestamp and
/// extended-identity layouts always fit. Exhaustive tests run at
/// [`Width::W64`]; realistic scenarios use the default [`Width::W256`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Width(usize);

impl Width {
    pub const W64: Width = Width(64);
    pub const W256: Width = Width(256);

    pub fn new(bits: usize) -> Result<Width, WordError> {
        if bits % 8 != 0 || bits < 64 {
            return Err(WordError::UnsupportedWidth { bits });
        }
        Ok(Width(bits))
    }

    pub fn bits(self) -> usize {
        self.0
    }

    pub fn bytes(self) -> usize {
        self.0 / 8
    }

    /// Longest identity that still leaves room for the 4-byte counter tail.
    pub fn max_identity_len(self) -> usize {
        self.bytes() - 4
    }

    pub fn max_password_len(self) -> usize {
        self.bytes()
    }
}

impl Default for Width {
    fn default() -> Self {
        Width::W256
    }
}

/// A fixed-width bitstring; the universal operand of the scheme formulas.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    bytes: Box<[u8]>,
}

impl Word {
    /// All-zero word of the given width.
    pub fn zero(width: Width) -> Word {
        Word {
            bytes: vec![0u8; width.bytes()].into(),
        }
    }

    /// Word over raw bytes; the width is implied by the byte length.
    pub fn from_bytes(bytes: impl Into<Vec<u8>>) -> Word {
        Word {
            bytes: bytes.into().into(),
        }
    }

    pub fn width_bits(&self) -> usize {
        self.bytes.len() * 8
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Bitwise exclusive-or; rejects operands of different widths.
    pub fn xor(&self, other: &Word) -> Result<Word, WordError> {
        if self.bytes.len() != other.bytes.len() {
            return Err(WordError::WidthMismatch {
                left: self.width_bits(),
                right: other.width_bits(),
            });
        }
        let bytes = self
            .bytes
            .iter()
            .zip(other.bytes.iter())
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Word { bytes })
    }

    /// Lowercase hex, always `2 * width_bytes` characters.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.bytes.len() * 2);
        for b in self.bytes.iter() {
            use fmt::Write;
            write!(s, "{b:02x}").expect("writing to a String cannot fail");
        }
        s
    }

    pub fn count_ones(&self) -> u32 {
        self.bytes.iter().map(|b| b.count_ones()).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.to_hex())
    }
}

/// The schemes' one-way function: a SHA-256 digest of the word, truncated or
/// zero-extended to the operand's width.
///
/// Deterministic by construction; at 256 bits this is plain SHA-256.
pub fn one_way(w: &Word) -> Word {
    let digest = Sha256::digest(w.as_bytes());
    let n = w.as_bytes().len();
    let mut out = vec![0u8; n];
    let take = n.min(digest.len());
    out[..take].copy_from_slice(&digest[..take]);
    Word { bytes: out.into() }
}

/// A user identity. Legality (length, no trailing zero byte) is checked when
/// the identity is encoded at a concrete width.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity(Vec<u8>);

impl Identity {
    pub fn new(name: impl Into<Vec<u8>>) -> Identity {
        Identity(name.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for Identity {
    fn from(name: &str) -> Identity {
        Identity(name.as_bytes().to_vec())
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Identity({})", self)
    }
}

/// A user password, kept as raw bytes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Password(Vec<u8>);

impl Password {
    pub fn new(secret: impl Into<Vec<u8>>) -> Password {
        Password(secret.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for Password {
    fn from(secret: &str) -> Password {
        Password(secret.as_bytes().to_vec())
    }
}

impl fmt::Display for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Password({})", self)
    }
}

/// Per-identity registration counter; 0 on first registration, +1 per
/// re-registration.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct RegCounter(pub u32);

impl RegCounter {
    pub fn initial() -> RegCounter {
        RegCounter(0)
    }

    pub fn next(self) -> RegCounter {
        RegCounter(self.0 + 1)
    }
}

/// Logical time in simulation ticks.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub fn ticks(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Extended identity: the identity bytes, a zero-padding run, then the
/// registration counter as 4 big-endian bytes.
///
/// Injective over legal identities (nonempty, not ending in 0x00, at most
/// `width_bytes - 4` long).
pub fn encode_eid(id: &Identity, n: RegCounter, width: Width) -> Result<Word, WordError> {
    let name = id.as_bytes();
    let max = width.max_identity_len();
    if name.is_empty() || name.len() > max {
        return Err(WordError::IdentityLength {
            len: name.len(),
            max,
        });
    }
    if name.ends_with(&[0]) {
        return Err(WordError::IdentityTrailingZero);
    }
    let mut bytes = vec![0u8; width.bytes()];
    bytes[..name.len()].copy_from_slice(name);
    let tail = width.bytes() - 4;
    bytes[tail..].copy_from_slice(&n.0.to_be_bytes());
    Ok(Word {
        bytes: bytes.into(),
    })
}

/// Password bytes left-justified and zero-padded to the full width.
///
/// Injective over legal passwords (nonempty, not ending in 0x00, at most
/// `width_bytes` long); stripping trailing zero bytes recovers the password.
pub fn encode_password(pw: &Password, width: Width) -> Result<Word, WordError> {
    let secret = pw.as_bytes();
    let max = width.max_password_len();
    if secret.is_empty() || secret.len() > max {
        return Err(WordError::PasswordLength {
            len: secret.len(),
            max,
        });
    }
    if secret.ends_with(&[0]) {
        return Err(WordError::PasswordTrailingZero);
    }
    let mut bytes = vec![0u8; width.bytes()];
    bytes[..secret.len()].copy_from_slice(secret);
    Ok(Word {
        bytes: bytes.into(),
    })
}

/// Tick count as 8 big-endian bytes, zero-extended at the front to the full
/// width, so the word ends with the low-order byte of the tick count.
pub fn encode_timestamp(t: Timestamp, width: Width) -> Word {
    let mut bytes = vec![0u8; width.bytes()];
    let tail = width.bytes() - 8;
    bytes[tail..].copy_from_slice(&t.0.to_be_bytes());
    Word {
        bytes: bytes.into(),
    }
}

/// Uniform pseudo-random word, fully determined by the generator state.
pub fn random_word(rng: &mut impl RngCore, width: Width) -> Word {
    let mut bytes = vec![0u8; width.bytes()];
    rng.fill_bytes(&mut bytes);
    Word {
        bytes: bytes.into(),
    }
}
