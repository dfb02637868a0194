//! Signed N-qubit Pauli strings in bit-packed symplectic form.
//!
//! A string is stored as `i^phase · P_1 ⊗ … ⊗ P_n` where each `P_j` is one of
//! the Hermitian letters I, X, Y, Z. Site `j` is encoded by the bit pair
//! `(x_j, z_j)`: `(0,0) = I`, `(1,0) = X`, `(1,1) = Y`, `(0,1) = Z`.
//!
//! Sites are 1-based in every public method; storage is 0-based.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_site, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Signed Pauli operator on `n` qubits with an exact phase in `{1, i, -1, -i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Exponent of `i`, always reduced mod 4.
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// A single letter on a 1-based site.
    pub fn single(n: usize, site: usize, letter: Pauli) -> Result<Self> {
        let mut p = PauliString::identity(n);
        p.set(site, letter)?;
        Ok(p)
    }

    /// Builds `+P` from `(letter, site)` pairs. Repeated sites are rejected.
    pub fn from_letters(n: usize, letters: &[(Pauli, usize)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(letter, site) in letters {
            if p.letter(site)? != Pauli::I {
                return Err(Error::InvalidParameter(format!("site {site} given twice")));
            }
            p.set(site, letter)?;
        }
        Ok(p)
    }

    /// Builds `+P` from a dense letter sequence; the first letter is site 1.
    pub fn from_dense(letters: &[Pauli]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_q(q, l);
        }
        p
    }

    /// Parses the signed Pauli-word format (e.g. `-Y8 Z9 Y10`, `X1Z2X3`, `I`)
    /// for an `n`-qubit register.
    pub fn parse(n: usize, input: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let mut s = input.trim();
        let mut phase = 0u8;
        if let Some(rest) = s.strip_prefix('-') {
            phase = 2;
            s = rest.trim_start();
        } else if let Some(rest) = s.strip_prefix('+') {
            s = rest.trim_start();
        }
        if let Some(rest) = s.strip_prefix('i') {
            phase = (phase + 1) % 4;
            s = rest.trim_start();
        }
        if s.is_empty() {
            return Err(fail("empty word"));
        }
        let mut p = PauliString::identity(n);
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            let c = chars[pos];
            if c.is_whitespace() {
                pos += 1;
                continue;
            }
            let letter = match c.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(fail(&format!("unexpected character {c:?}"))),
            };
            pos += 1;
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                if letter == Pauli::I {
                    continue;
                }
                return Err(fail("letter without a site index"));
            }
            let digits: String = chars[start..pos].iter().collect();
            let site: usize = digits.parse().map_err(|_| fail("bad site index"))?;
            if letter == Pauli::I {
                check_site(site, n)?;
                continue;
            }
            if p.letter(site)? != Pauli::I {
                return Err(fail(&format!("site {site} given twice")));
            }
            p.set(site, letter)?;
        }
        p.phase = phase;
        Ok(p)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Phase exponent `k` in `i^k`.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    pub fn negated(mut self) -> Self {
        self.negate();
        self
    }

    /// Multiplies the phase by `i^k`.
    pub fn mul_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) % 4;
    }

    /// The same letters with phase `+1`.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    pub fn letter(&self, site: usize) -> Result<Pauli> {
        let q = check_site(site, self.n)?;
        Ok(self.letter_q(q))
    }

    pub fn set(&mut self, site: usize, letter: Pauli) -> Result<()> {
        let q = check_site(site, self.n)?;
        self.set_q(q, letter);
        Ok(())
    }

    #[inline]
    pub(crate) fn letter_q(&self, q: usize) -> Pauli {
        let (w, b) = (q >> 6, q & 63);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    #[inline]
    pub(crate) fn set_q(&mut self, q: usize, letter: Pauli) {
        let (w, b) = (q >> 6, q & 63);
        let (x, z) = letter.bits();
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((z as u64) << b);
    }

    /// Dense letters, site 1 first.
    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.letter_q(q)).collect()
    }

    /// 1-based sites carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.letter_q(q) != Pauli::I)
            .map(|q| q + 1)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    /// `self · other` with the exact mod-4 phase.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        let mut out = self.clone();
        out.mul_assign(other)?;
        Ok(out)
    }

    /// In-place right multiplication: `self ← self · other`.
    pub fn mul_assign(&mut self, other: &PauliString) -> Result<()> {
        self.check_len(other)?;
        self.mul_assign_unchecked(other);
        Ok(())
    }

    pub(crate) fn mul_assign_unchecked(&mut self, other: &PauliString) {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..self.x.len() {
            let (ax, az, bx, bz) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            // XY = iZ, YZ = iX, ZX = iY; reversed orders give -i.
            let p = (ax & !az & bx & bz) | (ax & az & !bx & bz) | (!ax & az & bx & !bz);
            let m = (ax & !az & !bx & bz) | (ax & az & bx & !bz) | (!ax & az & bx & bz);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[w] = ax ^ bx;
            self.z[w] = az ^ bz;
        }
        let delta = (plus + 4 * minus - minus) % 4;
        self.phase = ((self.phase as u32 + other.phase as u32 + delta) % 4) as u8;
    }

    /// True iff the symplectic inner product vanishes.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let mut acc = 0u64;
        for w in 0..self.x.len() {
            acc ^= (self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w]);
        }
        acc.count_ones().is_multiple_of(2)
    }

    /// Letters restricted to the given 1-based sites, as a symplectic bit vector
    /// `[x_{s_1}, z_{s_1}, x_{s_2}, z_{s_2}, …]`.
    pub(crate) fn restriction_bits(&self, sites0: &[usize]) -> Vec<bool> {
        let mut v = Vec::with_capacity(2 * sites0.len());
        for &q in sites0 {
            let (x, z) = self.letter_q(q).bits();
            v.push(x);
            v.push(z);
        }
        v
    }

    /// Number of `Y` letters; converts between the letter convention and the
    /// `X^x Z^z` convention (`Y = i X Z`).
    pub(crate) fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        let mut first = true;
        for q in 0..self.n {
            let l = self.letter_q(q);
            if l == Pauli::I {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", l.symbol(), q + 1)?;
        }
        if first {
            write!(f, "I")?;
        }
        Ok(())
    }
}

/// Parses a word whose register size is the largest site mentioned.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let max_site = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|d| d.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        PauliString::parse(max_site, s)
    }
}
