//! Syndrome-coding embedder: given n cover bits and a target pair of
//! field-element syndromes (S1, S3), find a flip pattern of weight <= 3
//! whose syndrome difference realizes the pair.
//!
//! The parity-check rows are the odd exponents {1, 3} of the t = 2
//! narrow-sense binary BCH code; even rows are Frobenius squares of odd
//! ones and carry no payload. Extraction is one matrix product, blind by
//! construction. Two flip searches share the same contract: the LUT
//! variant answers root queries from [`RootTables`] in O(1), the Chien
//! variant evaluates each candidate locator at every field element.

use crate::galois::{Element, FieldTables};
use crate::root_lut::RootTables;

/// Parity-check matrix with rows (alpha^1)^j and (alpha^3)^j.
#[derive(Debug, Clone)]
pub struct ParityCheck {
    field: FieldTables,
    n: usize,
    row1: Vec<Element>,
    row3: Vec<Element>,
}

/// A 2m-bit payload chunk, i.e. a target pair of syndromes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyndromePair {
    pub s1: Element,
    pub s3: Element,
}

impl SyndromePair {
    pub const ZERO: SyndromePair = SyndromePair { s1: 0, s3: 0 };

    pub fn is_zero(&self) -> bool {
        self.s1 == 0 && self.s3 == 0
    }

    /// Componentwise XOR (char-2 subtraction and addition coincide).
    pub fn xor(self, other: SyndromePair) -> SyndromePair {
        SyndromePair { s1: self.s1 ^ other.s1, s3: self.s3 ^ other.s3 }
    }

    /// Packs into 2m bits, low half s1, high half s3, LSB first.
    pub fn to_bits(self, m: u32) -> Vec<u8> {
        let mut bits = Vec::with_capacity(2 * m as usize);
        for w in 0..m {
            bits.push((self.s1 >> w & 1) as u8);
        }
        for w in 0..m {
            bits.push((self.s3 >> w & 1) as u8);
        }
        bits
    }

    pub fn from_bits(bits: &[u8], m: u32) -> SyndromePair {
        let mut s1: Element = 0;
        let mut s3: Element = 0;
        for w in 0..m as usize {
            s1 |= ((bits[w] & 1) as Element) << w;
            s3 |= ((bits[m as usize + w] & 1) as Element) << w;
        }
        SyndromePair { s1, s3 }
    }
}

/// The positions flipped in a cover block, all distinct and < n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipPattern {
    positions: Vec<usize>,
}

impl FlipPattern {
    pub fn empty() -> Self {
        FlipPattern { positions: Vec::new() }
    }

    fn new(mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        FlipPattern { positions }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn weight(&self) -> usize {
        self.positions.len()
    }
}

/// Toggles the listed bits; applying the same pattern twice is the identity.
pub fn apply_flips(bits: &mut [u8], pattern: &FlipPattern) {
    for &j in pattern.positions() {
        bits[j] ^= 1;
    }
}

impl ParityCheck {
    pub fn new(field: FieldTables) -> Self {
        let n = field.n();
        let row1 = (0..n).map(|j| field.alpha_pow(j)).collect();
        let row3 = (0..n).map(|j| field.alpha_pow(3 * j)).collect();
        ParityCheck { field, n, row1, row3 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldTables {
        &self.field
    }

    /// H entry at (row index in {1, 3}, column j).
    pub fn entry(&self, row: usize, col: usize) -> Element {
        match row {
            1 => self.row1[col],
            3 => self.row3[col],
            _ => panic!("parity-check rows are 1 and 3"),
        }
    }

    /// r . H^T: the blind extraction function.
    pub fn extract_syndrome(&self, bits: &[u8]) -> SyndromePair {
        assert_eq!(bits.len(), self.n);
        let mut s1: Element = 0;
        let mut s3: Element = 0;
        for (j, &b) in bits.iter().enumerate() {
            if b & 1 != 0 {
                s1 ^= self.row1[j];
                s3 ^= self.row3[j];
            }
        }
        SyndromePair { s1, s3 }
    }

    /// The syndrome the flip pattern must realize: chunk - cover . H^T.
    pub fn target_syndrome(&self, cover: &[u8], chunk: SyndromePair) -> SyndromePair {
        chunk.xor(self.extract_syndrome(cover))
    }

    fn syndrome_of_pattern(&self, pattern: &FlipPattern) -> SyndromePair {
        let mut s = SyndromePair::ZERO;
        for &j in pattern.positions() {
            s.s1 ^= self.row1[j];
            s.s3 ^= self.row3[j];
        }
        s
    }

    fn checked(&self, pattern: FlipPattern, target: SyndromePair) -> FlipPattern {
        assert_eq!(
            self.syndrome_of_pattern(&pattern),
            target,
            "flip pattern fails its own syndrome equation"
        );
        pattern
    }

    /// Turns a set of candidate locators beta into a pattern, requiring
    /// exactly `want` distinct nonzero locators.
    fn pattern_from_locators(&self, locators: &[Element], want: usize) -> Option<FlipPattern> {
        let mut positions = Vec::with_capacity(want);
        for &b in locators {
            positions.push(self.field.log(b)?);
        }
        positions.sort_unstable();
        positions.dedup();
        if positions.len() != want {
            return None;
        }
        Some(FlipPattern { positions })
    }

    /// Minimal-weight flip search, answering root queries from the tables.
    ///
    /// Weights are tried in order 0, 1, 2, 3. The weight-3 locator
    /// x^3 + e1 x^2 + e2 x + e3 has e1 = S1 fixed, e2 free and
    /// e3 = S1^3 + S3 + S1 e2 from the Newton identities over the power
    /// sums, so candidates sweep e2 until a row with three usable roots
    /// appears. Returns `None` when no weight <= 3 pattern exists.
    pub fn find_flip_pattern_lut(&self, lut: &RootTables, s: SyndromePair) -> Option<FlipPattern> {
        self.find_flip_pattern(
            s,
            &mut |e1, e2, e3| crate::root_lut::solve_cubic(&self.field, lut, e1, e2, e3),
            &mut |e1, e2| crate::root_lut::solve_quadratic(&self.field, lut, e1, e2),
        )
    }

    /// Same contract as [`Self::find_flip_pattern_lut`], but every root
    /// query walks the whole field evaluating the candidate locator.
    pub fn find_flip_pattern_chien(&self, s: SyndromePair) -> Option<FlipPattern> {
        self.find_flip_pattern(
            s,
            &mut |e1, e2, e3| {
                let f = &self.field;
                (1..=self.n as Element)
                    .filter(|&x| f.pow(x, 3) ^ f.mul(e1, f.mul(x, x)) ^ f.mul(e2, x) ^ e3 == 0)
                    .collect()
            },
            &mut |e1, e2| {
                let f = &self.field;
                (1..=self.n as Element).filter(|&x| f.mul(x, x) ^ f.mul(e1, x) ^ e2 == 0).collect()
            },
        )
    }

    fn find_flip_pattern(
        &self,
        s: SyndromePair,
        cubic_roots: &mut dyn FnMut(Element, Element, Element) -> Vec<Element>,
        quad_roots: &mut dyn FnMut(Element, Element) -> Vec<Element>,
    ) -> Option<FlipPattern> {
        let f = &self.field;
        // weight 0: zero syndrome is realized by the empty pattern
        if s.is_zero() {
            return Some(FlipPattern::empty());
        }
        let s1_cubed = f.pow(s.s1, 3);
        // weight 1: S3 = S1^3 with S1 != 0
        if s.s1 != 0 && s.s3 == s1_cubed {
            let pattern = FlipPattern::new(vec![f.log(s.s1).expect("nonzero")]);
            return Some(self.checked(pattern, s));
        }
        // weight 2: sigma = x^2 + S1 x + (S3 + S1^3)/S1, roots must be
        // two distinct nonzero locators
        if s.s1 != 0 {
            let e2 = f.div(s1_cubed ^ s.s3, s.s1).expect("nonzero");
            let roots = quad_roots(s.s1, e2);
            if roots.len() == 2 {
                if let Some(p) = self.pattern_from_locators(&roots, 2) {
                    return Some(self.checked(p, s));
                }
            }
        }
        // weight 3: e1 = S1, e3 = S1^3 + S3 + S1 e2, sweep e2
        let b = s1_cubed ^ s.s3; // nonzero here, or weight <= 1 would have hit
        for e2 in 0..=self.n as Element {
            let e3 = b ^ f.mul(s.s1, e2);
            let roots = cubic_roots(s.s1, e2, e3);
            if roots.len() == 3 {
                if let Some(p) = self.pattern_from_locators(&roots, 3) {
                    return Some(self.checked(p, s));
                }
            }
        }
        None
    }
}
