//! Systematic BCH encoding and full algebraic decoding: syndromes,
//! Berlekamp-Massey, Chien search, correction, re-verification.
//!
//! Bits are kept as 0/1 bytes; bit `i` of a word is the coefficient of
//! x^i. Codewords are systematic with the n-k parity bits in the
//! low-order positions and the k message bits above them.

use crate::galois::{BinaryPoly, Element, FieldError, FieldTables};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BchError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("message has {actual} bits, code expects {expected}")]
    MessageLength { expected: usize, actual: usize },
    #[error("received word has {actual} bits, code expects {expected}")]
    WordLength { expected: usize, actual: usize },
    #[error("more than t errors: {0}")]
    DecodeFailure(&'static str),
}

/// A t-error-correcting binary BCH code over GF(2^m), n = 2^m - 1.
#[derive(Debug, Clone)]
pub struct BchCode {
    field: FieldTables,
    n: usize,
    k: usize,
    t: usize,
    g: BinaryPoly,
}

impl BchCode {
    pub fn new(field: FieldTables, t: usize) -> Result<Self, BchError> {
        let g = field.generator_polynomial(t)?;
        let n = field.n();
        let k = n - g.degree().expect("generator is nonzero") as usize;
        Ok(BchCode { field, n, k, t, g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn generator(&self) -> BinaryPoly {
        self.g
    }

    pub fn field(&self) -> &FieldTables {
        &self.field
    }

    /// Systematic encode: parity = (message(x) * x^(n-k)) mod g(x), placed
    /// in positions 0..n-k; message bits occupy positions n-k..n.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, BchError> {
        if message.len() != self.k {
            return Err(BchError::MessageLength { expected: self.k, actual: message.len() });
        }
        let mut msg_poly: u64 = 0;
        for (i, &b) in message.iter().enumerate() {
            msg_poly |= ((b & 1) as u64) << i;
        }
        let shift = self.n - self.k;
        let parity = BinaryPoly(msg_poly << shift).rem(self.g).0;
        let mut word = vec![0u8; self.n];
        for (i, slot) in word.iter_mut().enumerate().take(shift) {
            *slot = (parity >> i & 1) as u8;
        }
        for (j, &b) in message.iter().enumerate() {
            word[shift + j] = b & 1;
        }
        Ok(word)
    }

    /// S_i = r(alpha^i) for i = 1..2t.
    pub fn syndromes(&self, received: &[u8]) -> Result<Vec<Element>, BchError> {
        if received.len() != self.n {
            return Err(BchError::WordLength { expected: self.n, actual: received.len() });
        }
        let mut s = Vec::with_capacity(2 * self.t);
        for i in 1..=2 * self.t {
            let mut acc: Element = 0;
            for (j, &b) in received.iter().enumerate() {
                if b & 1 != 0 {
                    acc ^= self.field.alpha_pow(i * j);
                }
            }
            s.push(acc);
        }
        Ok(s)
    }

    /// Berlekamp-Massey over the full 2t syndromes. Returns the error
    /// locator sigma as coefficients sigma_0..sigma_v with sigma_0 = 1.
    pub fn berlekamp_massey(&self, s: &[Element]) -> Result<Vec<Element>, BchError> {
        let f = &self.field;
        let mut sigma: Vec<Element> = vec![1];
        let mut prev: Vec<Element> = vec![1]; // B(x), last copy before a length change
        let mut l = 0usize;
        let mut shift = 1usize; // x-power applied to B each round
        let mut b_disc: Element = 1; // discrepancy at the last length change
        for r in 0..s.len() {
            // discrepancy d = sum sigma_j * S_{r+1-j}
            let mut d: Element = 0;
            for (j, &c) in sigma.iter().enumerate().take(l + 1) {
                if r >= j {
                    d ^= f.mul(c, s[r - j]);
                }
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = f.div(d, b_disc)?;
            let mut next = sigma.clone();
            if next.len() < prev.len() + shift {
                next.resize(prev.len() + shift, 0);
            }
            for (j, &c) in prev.iter().enumerate() {
                next[j + shift] ^= f.mul(coef, c);
            }
            if 2 * l <= r {
                prev = sigma;
                b_disc = d;
                l = r + 1 - l;
                shift = 1;
            } else {
                shift += 1;
            }
            sigma = next;
        }
        while sigma.last() == Some(&0) {
            sigma.pop();
        }
        if sigma.len() - 1 > self.t {
            return Err(BchError::DecodeFailure("locator degree exceeds t"));
        }
        Ok(sigma)
    }

    /// Error positions j such that sigma(alpha^-j) = 0: the locator's roots
    /// are the reciprocals of the error locators alpha^j.
    pub fn chien_search(&self, sigma: &[Element]) -> Result<Vec<usize>, BchError> {
        let f = &self.field;
        let deg = sigma.len() - 1;
        let mut positions = Vec::with_capacity(deg);
        for j in 0..self.n {
            let x = f.alpha_pow((self.n - j) % self.n); // alpha^-j
            let mut acc: Element = 0;
            for &c in sigma.iter().rev() {
                acc = f.mul(acc, x) ^ c;
            }
            if acc == 0 {
                positions.push(j);
            }
        }
        if positions.len() != deg {
            return Err(BchError::DecodeFailure("locator has too few distinct roots"));
        }
        Ok(positions)
    }

    /// Full decode. Returns the message and the number of corrected bits;
    /// fails (rather than silently miscorrecting) when the syndromes do
    /// not re-verify to zero after correction.
    pub fn decode(&self, received: &[u8]) -> Result<(Vec<u8>, usize), BchError> {
        let s = self.syndromes(received)?;
        let shift = self.n - self.k;
        if s.iter().all(|&x| x == 0) {
            return Ok((received[shift..].to_vec(), 0));
        }
        let sigma = self.berlekamp_massey(&s)?;
        let positions = self.chien_search(&sigma)?;
        let mut corrected = received.to_vec();
        for &j in &positions {
            corrected[j] ^= 1;
        }
        let s2 = self.syndromes(&corrected)?;
        if s2.iter().any(|&x| x != 0) {
            return Err(BchError::DecodeFailure("residual syndromes after correction"));
        }
        Ok((corrected[shift..].to_vec(), positions.len()))
    }
}
