//! Arithmetic in GF(2^m) for m in {4, 5}.
//!
//! Elements are integer bitmasks in the polynomial basis. Multiplication,
//! inversion and powers go through log/antilog tables built eagerly at
//! field construction, so all per-element operations are O(1) lookups.

use thiserror::Error;

/// A field element, stored as a bitmask in the polynomial basis.
pub type Element = u16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension degree m = {0} is unsupported (expected 4 or 5)")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} has degree {actual}, expected {expected}")]
    WrongDegree { poly: u32, expected: u32, actual: u32 },
    #[error("polynomial {0:#x} is not primitive: powers of its root repeat before 2^m - 1")]
    NotPrimitive(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("t = {t} is too large for GF(2^{m})")]
    TooManyErrors { t: usize, m: u32 },
}

/// Conventional primitive polynomial for a given degree: x^4+x+1, x^5+x^2+1.
pub fn default_primitive_poly(m: u32) -> Result<u32, FieldError> {
    match m {
        4 => Ok(0b1_0011),
        5 => Ok(0b10_0101),
        _ => Err(FieldError::UnsupportedDegree(m)),
    }
}

/// Log/antilog tables for GF(2^m). Immutable after construction and safe
/// to share across threads; every operation is a pure function.
#[derive(Debug, Clone)]
pub struct FieldTables {
    m: u32,
    primitive_poly: u32,
    n: usize,
    antilog: Vec<Element>,
    /// `log[0]` is `None`: zero has no discrete log.
    log: Vec<Option<u16>>,
}

impl FieldTables {
    /// Builds the tables for GF(2^m) with the default primitive polynomial.
    pub fn new(m: u32) -> Result<Self, FieldError> {
        Self::with_poly(m, default_primitive_poly(m)?)
    }

    /// Builds the tables for GF(2^m) from an explicit primitive polynomial.
    ///
    /// Rejects polynomials of the wrong degree and polynomials whose root
    /// is not primitive (the generated powers repeat before 2^m - 1).
    pub fn with_poly(m: u32, primitive_poly: u32) -> Result<Self, FieldError> {
        if !(4..=5).contains(&m) {
            return Err(FieldError::UnsupportedDegree(m));
        }
        let deg = 31 - primitive_poly.leading_zeros();
        if deg != m {
            return Err(FieldError::WrongDegree { poly: primitive_poly, expected: m, actual: deg });
        }
        let n = (1usize << m) - 1;
        let mut antilog = vec![0 as Element; n];
        let mut log = vec![None; 1 << m];
        let mut x: u32 = 1;
        for (i, slot) in antilog.iter_mut().enumerate() {
            if log[x as usize].is_some() {
                return Err(FieldError::NotPrimitive(primitive_poly));
            }
            *slot = x as Element;
            log[x as usize] = Some(i as u16);
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(FieldError::NotPrimitive(primitive_poly));
        }
        Ok(FieldTables { m, primitive_poly, n, antilog, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Multiplicative group order, n = 2^m - 1.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// alpha^i for i in [0, 2^m - 2].
    pub fn alpha_pow(&self, i: usize) -> Element {
        self.antilog[i % self.n]
    }

    /// Discrete log of a nonzero element; `None` for zero.
    pub fn log(&self, a: Element) -> Option<usize> {
        self.log[a as usize].map(|l| l as usize)
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        a ^ b
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        match (self.log[a as usize], self.log[b as usize]) {
            (Some(la), Some(lb)) => self.antilog[(la as usize + lb as usize) % self.n],
            _ => 0,
        }
    }

    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        match self.log[a as usize] {
            Some(la) => Ok(self.antilog[(self.n - la as usize) % self.n]),
            None => Err(FieldError::ZeroInverse),
        }
    }

    /// Division a/b; `Err` when b = 0.
    pub fn div(&self, a: Element, b: Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e with exponent arithmetic mod 2^m - 1. By convention 0^0 = 1.
    pub fn pow(&self, a: Element, e: i64) -> Element {
        match self.log[a as usize] {
            None => {
                if e == 0 {
                    1
                } else {
                    0
                }
            }
            Some(la) => {
                let exp = (la as i64 * e).rem_euclid(self.n as i64);
                self.antilog[exp as usize]
            }
        }
    }

    /// The unique square root: a^(2^(m-1)). Squaring is the Frobenius map,
    /// a bijection in characteristic 2.
    pub fn sqrt(&self, a: Element) -> Element {
        self.pow(a, 1 << (self.m - 1))
    }

    /// All cube roots of `a`, as a (possibly empty) sorted list.
    ///
    /// When gcd(3, 2^m - 1) = 1 (m = 5) every element has exactly one cube
    /// root; when gcd = 3 (m = 4) an element has zero or three.
    pub fn cbrt(&self, a: Element) -> Vec<Element> {
        let la = match self.log[a as usize] {
            None => return vec![0],
            Some(l) => l as usize,
        };
        if !self.n.is_multiple_of(3) {
            // cubing is a bijection; invert the exponent map
            let inv3 = mod_inverse(3, self.n as i64) as usize;
            vec![self.antilog[(la * inv3) % self.n]]
        } else if la % 3 == 0 {
            let step = self.n / 3;
            let mut roots: Vec<Element> =
                (0..3).map(|k| self.antilog[(la / 3 + k * step) % self.n]).collect();
            roots.sort_unstable();
            roots
        } else {
            Vec::new()
        }
    }

    /// Minimal polynomial of alpha^i: the product over the conjugacy class
    /// {i*2^j mod n} of (x - alpha^(i*2^j)), which has GF(2) coefficients.
    pub fn minimal_polynomial(&self, i: usize) -> BinaryPoly {
        let class = self.conjugacy_class(i);
        // multiply out with coefficients in the field
        let mut coeffs: Vec<Element> = vec![1];
        for &c in &class {
            let root = self.alpha_pow(c);
            let mut next = vec![0; coeffs.len() + 1];
            for (d, &co) in coeffs.iter().enumerate() {
                next[d + 1] ^= co;
                next[d] ^= self.mul(co, root);
            }
            coeffs = next;
        }
        let mut bits: u64 = 0;
        for (d, &co) in coeffs.iter().enumerate() {
            debug_assert!(co <= 1, "minimal polynomial coefficient outside GF(2)");
            bits |= (co as u64) << d;
        }
        BinaryPoly(bits)
    }

    fn conjugacy_class(&self, i: usize) -> Vec<usize> {
        let mut class = vec![i % self.n];
        let mut c = (i * 2) % self.n;
        while c != i % self.n {
            class.push(c);
            c = (c * 2) % self.n;
        }
        class
    }

    /// Generator polynomial of the t-error-correcting BCH code:
    /// lcm of the minimal polynomials of alpha^1 .. alpha^(2t).
    pub fn generator_polynomial(&self, t: usize) -> Result<BinaryPoly, FieldError> {
        if t == 0 {
            return Err(FieldError::TooManyErrors { t, m: self.m });
        }
        let mut seen_reps: Vec<usize> = Vec::new();
        let mut g = BinaryPoly(1);
        for i in 1..=2 * t {
            let class = self.conjugacy_class(i);
            let rep = *class.iter().min().unwrap();
            if seen_reps.contains(&rep) {
                continue;
            }
            seen_reps.push(rep);
            g = g.mul(self.minimal_polynomial(i));
        }
        if g.degree().unwrap_or(0) as usize >= self.n {
            return Err(FieldError::TooManyErrors { t, m: self.m });
        }
        Ok(g)
    }
}

/// Modular inverse of a mod n for gcd(a, n) = 1.
fn mod_inverse(a: i64, n: i64) -> i64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (n, a.rem_euclid(n));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(n)
}

/// A polynomial over GF(2), stored as a coefficient bitmask (bit d = x^d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryPoly(pub u64);

// `mul`/`rem` are deliberate names: GF(2)[x] arithmetic, not the
// std::ops traits (which would suggest wrapping integer semantics).
#[allow(clippy::should_implement_trait)]
impl BinaryPoly {
    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    /// Carry-less multiplication over GF(2).
    pub fn mul(self, other: BinaryPoly) -> BinaryPoly {
        let mut out: u64 = 0;
        let mut a = self.0;
        let mut shift = 0;
        while a != 0 {
            if a & 1 != 0 {
                out ^= other.0 << shift;
            }
            a >>= 1;
            shift += 1;
        }
        BinaryPoly(out)
    }

    /// Remainder of self divided by `divisor` over GF(2).
    pub fn rem(self, divisor: BinaryPoly) -> BinaryPoly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut r = self.0;
        while let Some(rd) = BinaryPoly(r).degree() {
            if rd < dd {
                break;
            }
            r ^= divisor.0 << (rd - dd);
        }
        BinaryPoly(r)
    }

    pub fn divides(self, other: BinaryPoly) -> bool {
        other.rem(self).0 == 0
    }

    /// Evaluates the polynomial at a field element (Horner).
    pub fn eval(&self, field: &FieldTables, x: Element) -> Element {
        let mut acc: Element = 0;
        let deg = match self.degree() {
            None => return 0,
            Some(d) => d,
        };
        for d in (0..=deg).rev() {
            acc = field.mul(acc, x);
            if self.0 >> d & 1 != 0 {
                acc ^= 1;
            }
        }
        acc
    }
}
