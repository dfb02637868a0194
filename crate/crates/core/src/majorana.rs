//! Majorana-mode view of the encoder.
//!
//! Modes follow the Jordan–Wigner convention `γ_i = Z_1⋯Z_{i−1} X_i`,
//! `ξ_i = Z_1⋯Z_{i−1} Y_i`. Operators are tracked as signed monomials in the
//! `2n` modes, kept in the canonical order `γ_1 ξ_1 γ_2 ξ_2 ⋯`.
//!
//! A TFIM gate is written as `U = (A + C)/√2` with `A = −iγ_iξ_i` and
//! `C = −iξ_iγ_{i+1}`. On the wrap bond `(n, 1)` the Jordan–Wigner string
//! leaves a factor of the global parity `P = Z_1⋯Z_n`, so `C = P·(−iγ_1ξ_n)`.
//! That gate is Gaussian only inside a parity sector, which is why single
//! modes of the periodic encoder evolve into longer monomials while check
//! bilinears stay bilinear up to a factor of `P`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::{round_schedule, CodeInstance, Variant};
use crate::error::{check_site, Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MajoranaKind {
    Gamma,
    Xi,
}

/// A single signed mode `±γ_i` or `±ξ_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MajoranaMode {
    pub kind: MajoranaKind,
    /// 1-based site.
    pub site: usize,
    pub sign: i8,
}

impl MajoranaMode {
    pub fn gamma(site: usize) -> Self {
        MajoranaMode {
            kind: MajoranaKind::Gamma,
            site,
            sign: 1,
        }
    }

    pub fn xi(site: usize) -> Self {
        MajoranaMode {
            kind: MajoranaKind::Xi,
            site,
            sign: 1,
        }
    }

    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    fn index0(&self, n: usize) -> Result<usize> {
        let q = check_site(self.site, n)?;
        Ok(2 * q + (self.kind == MajoranaKind::Xi) as usize)
    }
}

impl fmt::Display for MajoranaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { "-" } else { "" };
        let k = match self.kind {
            MajoranaKind::Gamma => "γ",
            MajoranaKind::Xi => "ξ",
        };
        write!(f, "{s}{k}{}", self.site)
    }
}

/// Jordan–Wigner image of a mode.
pub fn mode_to_pauli(m: MajoranaMode, n: usize) -> Result<PauliString> {
    let q = check_site(m.site, n)?;
    let mut p = PauliString::identity(n);
    for j in 0..q {
        p.set_q(j, Pauli::Z);
    }
    p.set_q(
        q,
        match m.kind {
            MajoranaKind::Gamma => Pauli::X,
            MajoranaKind::Xi => Pauli::Y,
        },
    );
    if m.sign < 0 {
        p.negate();
    }
    Ok(p)
}

/// `i^phase` times an ordered product of distinct modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MajoranaMonomial {
    n: usize,
    words: Vec<u64>,
    phase: u8,
}

impl MajoranaMonomial {
    pub fn identity(n: usize) -> Self {
        MajoranaMonomial {
            n,
            words: vec![0; (2 * n).div_ceil(64)],
            phase: 0,
        }
    }

    pub fn from_mode(m: MajoranaMode, n: usize) -> Result<Self> {
        let mut out = Self::identity(n);
        out.toggle(m.index0(n)?);
        if m.sign < 0 {
            out.phase = 2;
        }
        Ok(out)
    }

    /// Product of modes in the given order.
    pub fn product(n: usize, modes: &[MajoranaMode]) -> Result<Self> {
        let mut out = Self::identity(n);
        for &m in modes {
            out = out.mul(&Self::from_mode(m, n)?)?;
        }
        Ok(out)
    }

    /// The global parity `Z_1⋯Z_n = ∏_k (−iγ_kξ_k)`.
    pub fn parity(n: usize) -> Self {
        let mut out = Self::identity(n);
        for i in 0..2 * n {
            out.toggle(i);
        }
        out.phase = ((3 * n) % 4) as u8;
        out
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn mul_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) % 4;
    }

    pub fn negated(mut self) -> Self {
        self.mul_phase(2);
        self
    }

    fn toggle(&mut self, i: usize) {
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    fn contains(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn degree(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Modes in canonical order, each with sign `+1`.
    pub fn modes(&self) -> Vec<MajoranaMode> {
        (0..2 * self.n)
            .filter(|&i| self.contains(i))
            .map(|i| MajoranaMode {
                kind: if i % 2 == 0 {
                    MajoranaKind::Gamma
                } else {
                    MajoranaKind::Xi
                },
                site: i / 2 + 1,
                sign: 1,
            })
            .collect()
    }

    /// Number of modes in `self` with canonical index above `i`.
    fn count_above(&self, i: usize) -> u32 {
        let w = i >> 6;
        let b = i & 63;
        let mut c = if b == 63 {
            0
        } else {
            (self.words[w] >> (b + 1)).count_ones()
        };
        for word in &self.words[w + 1..] {
            c += word.count_ones();
        }
        c
    }

    pub fn mul(&self, other: &MajoranaMonomial) -> Result<MajoranaMonomial> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        // each mode of `other` moves left past the larger modes of `self`
        let mut swaps = 0u32;
        for i in 0..2 * self.n {
            if other.contains(i) {
                swaps += self.count_above(i);
            }
        }
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        out.phase = ((self.phase as u32 + other.phase as u32 + 2 * (swaps & 1)) % 4) as u8;
        Ok(out)
    }

    pub fn commutes(&self, other: &MajoranaMonomial) -> bool {
        let overlap: usize = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum();
        (self.degree() * other.degree() - overlap).is_multiple_of(2)
    }

    /// Single signed mode, if the monomial is one.
    pub fn as_mode(&self) -> Option<MajoranaMode> {
        if self.degree() != 1 || self.phase % 2 == 1 {
            return None;
        }
        let mut m = self.modes()[0];
        m.sign = if self.phase == 0 { 1 } else { -1 };
        Some(m)
    }

    pub fn to_pauli(&self) -> PauliString {
        let mut out = PauliString::identity(self.n);
        out.mul_phase(self.phase);
        for m in self.modes() {
            let p = mode_to_pauli(m, self.n).expect("site in range");
            out.mul_assign_unchecked(&p);
        }
        out
    }

    /// Inverse Jordan–Wigner map. A mode appears in the monomial of a Pauli
    /// string of degree `d` exactly when their commutation sign differs from
    /// `(−1)^d`; the phase is then fixed by comparison.
    pub fn from_pauli(p: &PauliString) -> MajoranaMonomial {
        let n = p.num_qubits();
        let degree_odd = p.letters().iter().filter(|l| l.bits().0).count() % 2 == 1;
        let mut out = Self::identity(n);
        for site in 1..=n {
            for m in [MajoranaMode::gamma(site), MajoranaMode::xi(site)] {
                let mp = mode_to_pauli(m, n).expect("site in range");
                let anti = !p.commutes_unchecked(&mp);
                if anti != degree_odd {
                    out.toggle(m.index0(n).expect("site in range"));
                }
            }
        }
        let bare = out.to_pauli();
        debug_assert_eq!(bare.letters(), p.letters());
        out.phase = (p.phase() + 4 - bare.phase()) % 4;
        out
    }
}

impl fmt::Display for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        let modes = self.modes();
        if modes.is_empty() {
            return write!(f, "{}1", prefix);
        }
        f.write_str(prefix)?;
        for (k, m) in modes.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// The two anticommuting terms of a TFIM gate, `U = (A + C)/√2`.
fn gate_terms(gate: CliffordGate, n: usize) -> Result<(MajoranaMonomial, MajoranaMonomial)> {
    let site = match gate {
        CliffordGate::Tfim { site } => site,
        CliffordGate::Hadamard { .. } => {
            return Err(Error::UnsupportedSchedule(
                "Majorana tracking is defined for TFIM gates only".into(),
            ))
        }
    };
    gate.validate(n)?;
    let a = MajoranaMonomial::product(n, &[MajoranaMode::gamma(site), MajoranaMode::xi(site)])?
        .negated_i();
    let c = if site < n {
        MajoranaMonomial::product(n, &[MajoranaMode::xi(site), MajoranaMode::gamma(site + 1)])?
            .negated_i()
    } else {
        let pair = MajoranaMonomial::product(n, &[MajoranaMode::gamma(1), MajoranaMode::xi(n)])?
            .negated_i();
        MajoranaMonomial::parity(n).mul(&pair)?
    };
    Ok((a, c))
}

impl MajoranaMonomial {
    fn negated_i(mut self) -> Self {
        self.mul_phase(3);
        self
    }
}

/// `U μ U†` for `U = (A + C)/√2`.
fn conjugate_by_terms(
    mu: &MajoranaMonomial,
    a: &MajoranaMonomial,
    c: &MajoranaMonomial,
) -> MajoranaMonomial {
    match (mu.commutes(a), mu.commutes(c)) {
        (true, true) => mu.clone(),
        (false, false) => mu.clone().negated(),
        (true, false) => mu.mul(a).and_then(|x| x.mul(c)).expect("same size"),
        (false, true) => mu.mul(c).and_then(|x| x.mul(a)).expect("same size"),
    }
}

/// Heisenberg image of a monomial under a TFIM-only gate list.
pub fn evolve_monomial(
    mu: &MajoranaMonomial,
    schedule: &[CliffordGate],
) -> Result<MajoranaMonomial> {
    let mut out = mu.clone();
    for &g in schedule {
        let (a, c) = gate_terms(g, mu.n)?;
        out = conjugate_by_terms(&out, &a, &c);
    }
    Ok(out)
}

/// Images of all `2n` single modes under one encoder round, applied
/// repeatedly by multiplying images.
#[derive(Debug, Clone)]
pub struct RoundMap {
    n: usize,
    images: Vec<MajoranaMonomial>,
}

impl RoundMap {
    pub fn new(n: usize, variant: Variant) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
        }
        let schedule = round_schedule(n, variant);
        let mut images = Vec::with_capacity(2 * n);
        for site in 1..=n {
            for m in [MajoranaMode::gamma(site), MajoranaMode::xi(site)] {
                images.push(evolve_monomial(
                    &MajoranaMonomial::from_mode(m, n)?,
                    &schedule,
                )?);
            }
        }
        Ok(RoundMap { n, images })
    }

    pub fn image(&self, m: MajoranaMode) -> Result<MajoranaMonomial> {
        let mut out = self.images[m.index0(self.n)?].clone();
        if m.sign < 0 {
            out.mul_phase(2);
        }
        Ok(out)
    }

    pub fn apply(&self, mu: &MajoranaMonomial) -> Result<MajoranaMonomial> {
        let mut out = MajoranaMonomial::identity(self.n);
        out.phase = mu.phase;
        for m in mu.modes() {
            out = out.mul(&self.image(m)?)?;
        }
        Ok(out)
    }

    pub fn apply_rounds(&self, mu: &MajoranaMonomial, rounds: usize) -> Result<MajoranaMonomial> {
        let mut out = mu.clone();
        for _ in 0..rounds {
            out = self.apply(&out)?;
        }
        Ok(out)
    }
}

fn require_pure_tfim(code: &CodeInstance) -> Result<()> {
    if code.has_hadamards() {
        return Err(Error::UnsupportedSchedule(
            "Majorana tracking needs a schedule without Hadamard layers".into(),
        ));
    }
    Ok(())
}

/// Image of a mode under the full encoder of `code`.
///
/// For the open variant this is always a single mode, see
/// [`MajoranaMonomial::as_mode`]. For the periodic variant it is in general a
/// longer monomial.
pub fn evolve_mode(m: MajoranaMode, code: &CodeInstance) -> Result<MajoranaMonomial> {
    require_pure_tfim(code)?;
    let map = RoundMap::new(code.n(), code.variant())?;
    map.apply_rounds(&MajoranaMonomial::from_mode(m, code.n())?, code.rounds())
}

/// Splits `±P^t · i^s γ_a ξ_b` into its parts.
fn split_bilinear(mu: &MajoranaMonomial) -> Option<(MajoranaMonomial, bool)> {
    let is_pair = |x: &MajoranaMonomial| {
        let modes = x.modes();
        modes.len() == 2
            && modes
                .iter()
                .filter(|m| m.kind == MajoranaKind::Gamma)
                .count()
                == 1
    };
    if is_pair(mu) {
        return Some((mu.clone(), false));
    }
    let twisted = MajoranaMonomial::parity(mu.n).mul(mu).ok()?;
    is_pair(&twisted).then_some((twisted, true))
}

/// A check written as `±[P]·iγ_aξ_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePair {
    pub gamma_site: usize,
    pub xi_site: usize,
    /// The pair carries an extra factor of the global parity.
    pub parity_twist: bool,
    /// The bilinear, without the parity factor.
    pub bilinear: MajoranaMonomial,
    /// The full operator as a Pauli string.
    pub pauli: PauliString,
}

/// The evolved stabilizer `Z̃_k = −iŨγ_kξ_kŨ†` computed in the Majorana
/// picture.
pub fn check_as_mode_pair(k: usize, code: &CodeInstance) -> Result<ModePair> {
    require_pure_tfim(code)?;
    let n = code.n();
    check_site(k, n)?;
    if code.logical_sites().contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "site {k} carries a logical qubit"
        )));
    }
    let z =
        MajoranaMonomial::product(n, &[MajoranaMode::gamma(k), MajoranaMode::xi(k)])?.negated_i();
    let map = RoundMap::new(n, code.variant())?;
    let image = map.apply_rounds(&z, code.rounds())?;
    let (bilinear, parity_twist) = split_bilinear(&image).ok_or_else(|| {
        Error::BrokenFrame(format!(
            "check {k} did not evolve into a mode pair: {image}"
        ))
    })?;
    let modes = bilinear.modes();
    let gamma_site = modes
        .iter()
        .find(|m| m.kind == MajoranaKind::Gamma)
        .unwrap()
        .site;
    let xi_site = modes
        .iter()
        .find(|m| m.kind == MajoranaKind::Xi)
        .unwrap()
        .site;
    Ok(ModePair {
        gamma_site,
        xi_site,
        parity_twist,
        bilinear,
        pauli: image.to_pauli(),
    })
}

/// A bijection on `{1..n}` with its cycle decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SitePermutation {
    map: Vec<usize>,
    #[serde(skip)]
    cycles: Vec<Vec<usize>>,
}

impl SitePermutation {
    pub fn identity(n: usize) -> Self {
        Self::from_map((1..=n).collect()).expect("identity is a bijection")
    }

    /// `map[i−1] = σ(i)`.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            let q = check_site(v, n)?;
            if seen[q] {
                return Err(Error::InvalidParameter(format!(
                    "{v} appears twice in permutation"
                )));
            }
            seen[q] = true;
        }
        let cycles = decompose(&map);
        Ok(SitePermutation { map, cycles })
    }

    /// Builds from cycle notation; unlisted sites are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut map: Vec<usize> = (1..=n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let q = check_site(a, n)?;
                if used[q] {
                    return Err(Error::InvalidParameter(format!(
                        "{a} appears twice in cycles"
                    )));
                }
                used[q] = true;
                map[q] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_map(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `σ(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> Result<usize> {
        Ok(self.map[check_site(i, self.map.len())?])
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    /// Cycles of length ≥ 2, each starting at its smallest element, ordered
    /// by that element.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// The cycle through `i`, starting at `i`.
    pub fn orbit(&self, i: usize) -> Result<Vec<usize>> {
        let mut out = vec![i];
        let mut j = self.apply(i)?;
        while j != i {
            out.push(j);
            j = self.map[j - 1];
        }
        Ok(out)
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &SitePermutation) -> Result<SitePermutation> {
        if self.len() != next.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: next.len(),
            });
        }
        Self::from_map(self.map.iter().map(|&v| next.map[v - 1]).collect())
    }

    pub fn power(&self, r: usize) -> SitePermutation {
        let mut out = Self::identity(self.len());
        for _ in 0..r {
            out = out.then(self).expect("same size");
        }
        out
    }

    pub fn inverse(&self) -> SitePermutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Self::from_map(inv).expect("inverse of a bijection")
    }
}

fn decompose(map: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; map.len()];
    let mut cycles = Vec::new();
    for start in 0..map.len() {
        if seen[start] || map[start] == start + 1 {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cycle.push(j + 1);
            j = map[j] - 1;
        }
        cycles.push(cycle);
    }
    cycles
}

impl fmt::Display for SitePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for c in &self.cycles {
            let body: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// The permutation of `γ` sites induced by one encoder round.
///
/// Derived by evolving each check bilinear `−iγ_kξ_k` through one round and
/// reading off the `γ` site. This works for both variants, including the
/// periodic one where single modes do not stay single.
pub fn encoder_permutation(n: usize, variant: Variant) -> Result<SitePermutation> {
    let map = RoundMap::new(n, variant)?;
    let mut sigma = Vec::with_capacity(n);
    for k in 1..=n {
        let z = MajoranaMonomial::product(n, &[MajoranaMode::gamma(k), MajoranaMode::xi(k)])?
            .negated_i();
        let image = map.apply(&z)?;
        let (pair, _) = split_bilinear(&image).ok_or_else(|| {
            Error::BrokenFrame(format!("site {k} did not evolve into a mode pair: {image}"))
        })?;
        let modes = pair.modes();
        let xi = modes
            .iter()
            .find(|m| m.kind == MajoranaKind::Xi)
            .unwrap()
            .site;
        if xi != k {
            return Err(Error::BrokenFrame(format!(
                "ξ_{k} moved to site {xi} under one round"
            )));
        }
        sigma.push(
            modes
                .iter()
                .find(|m| m.kind == MajoranaKind::Gamma)
                .unwrap()
                .site,
        );
    }
    SitePermutation::from_map(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;

    fn p(n: usize, s: &str) -> PauliString {
        PauliString::parse(n, s).unwrap()
    }

    #[test]
    fn jordan_wigner_strings() {
        assert_eq!(
            mode_to_pauli(MajoranaMode::gamma(1), 4).unwrap(),
            p(4, "X1")
        );
        assert_eq!(
            mode_to_pauli(MajoranaMode::gamma(3), 4).unwrap(),
            p(4, "Z1 Z2 X3")
        );
        assert_eq!(
            mode_to_pauli(MajoranaMode::xi(2), 4).unwrap(),
            p(4, "Z1 Y2")
        );
        assert_eq!(
            mode_to_pauli(MajoranaMode::xi(2).negated(), 4).unwrap(),
            p(4, "-Z1 Y2")
        );
        assert!(mode_to_pauli(MajoranaMode::gamma(5), 4).is_err());
    }

    #[test]
    fn pauli_round_trip() {
        for n in 1..6 {
            for site in 1..=n {
                for m in [MajoranaMode::gamma(site), MajoranaMode::xi(site).negated()] {
                    let pm = mode_to_pauli(m, n).unwrap();
                    assert_eq!(MajoranaMonomial::from_pauli(&pm).as_mode(), Some(m));
                }
            }
        }
        for s in ["X1 X2", "-Y1 Z2 X3 Y6", "iZ4", "I", "-Z1 Z2 Z3 Z4 Z5 Z6"] {
            let w = p(6, s);
            assert_eq!(MajoranaMonomial::from_pauli(&w).to_pauli(), w, "{s}");
        }
    }

    #[test]
    fn parity_monomial_is_product_of_z() {
        for n in 1..8 {
            let all_z = PauliString::from_dense(&vec![Pauli::Z; n]);
            assert_eq!(MajoranaMonomial::parity(n).to_pauli(), all_z);
        }
    }

    #[test]
    fn gate_terms_match_pauli_form() {
        let n = 5;
        for site in 1..=n {
            let (a, c) = gate_terms(CliffordGate::tfim(site), n).unwrap();
            let j = site % n + 1;
            assert_eq!(a.to_pauli(), p(n, &format!("Z{site}")));
            assert_eq!(c.to_pauli(), p(n, &format!("X{site} X{j}")));
        }
    }

    #[test]
    fn single_gate_action() {
        let n = 6;
        let g = [CliffordGate::tfim(3)];
        let ev = |m| {
            evolve_monomial(&MajoranaMonomial::from_mode(m, n).unwrap(), &g)
                .unwrap()
                .as_mode()
                .unwrap()
        };
        assert_eq!(ev(MajoranaMode::gamma(3)), MajoranaMode::gamma(4));
        assert_eq!(ev(MajoranaMode::gamma(4)), MajoranaMode::gamma(3));
        assert_eq!(ev(MajoranaMode::xi(3)), MajoranaMode::xi(3).negated());
        assert_eq!(ev(MajoranaMode::xi(4)), MajoranaMode::xi(4));
        assert_eq!(ev(MajoranaMode::gamma(1)), MajoranaMode::gamma(1));
    }

    #[test]
    fn anticommutation_algebra() {
        let n = 5;
        let mut modes = Vec::new();
        for s in 1..=n {
            modes.push(MajoranaMode::gamma(s));
            modes.push(MajoranaMode::xi(s));
        }
        for (i, &a) in modes.iter().enumerate() {
            for (j, &b) in modes.iter().enumerate() {
                let pa = mode_to_pauli(a, n).unwrap();
                let pb = mode_to_pauli(b, n).unwrap();
                let ab = pa.mul(&pb).unwrap();
                let ba = pb.mul(&pa).unwrap();
                if i == j {
                    assert!(ab.is_identity_letters() && ab.phase() == 0);
                } else {
                    assert_eq!(ab, ba.negated());
                }
            }
        }
    }

    #[test]
    fn open_round_permutes_modes() {
        let n = 10;
        let code = CodeSpec::new(n, Variant::Open, 1).build().unwrap();
        let sigma = encoder_permutation(n, Variant::Open).unwrap();
        for i in 1..=n {
            let g = evolve_mode(MajoranaMode::gamma(i), &code)
                .unwrap()
                .as_mode()
                .unwrap();
            assert_eq!(g.kind, MajoranaKind::Gamma);
            assert_eq!(g.site, sigma.apply(i).unwrap());
            let x = evolve_mode(MajoranaMode::xi(i), &code)
                .unwrap()
                .as_mode()
                .unwrap();
            let expect = if i == n {
                MajoranaMode::xi(i)
            } else {
                MajoranaMode::xi(i).negated()
            };
            assert_eq!(x, expect);
        }
    }

    #[test]
    fn permutation_cycles() {
        let open = encoder_permutation(10, Variant::Open).unwrap();
        assert_eq!(open.to_string(), "(1 3 5 7 9 10 8 6 4 2)");
        let periodic = encoder_permutation(10, Variant::Periodic).unwrap();
        let expect =
            SitePermutation::from_cycles(10, &[vec![1, 3, 5, 7, 9], vec![10, 8, 6, 4, 2]]).unwrap();
        assert_eq!(periodic, expect);
        let odd_open = encoder_permutation(5, Variant::Open).unwrap();
        assert_eq!(
            odd_open,
            SitePermutation::from_cycles(5, &[vec![1, 3, 5, 4, 2]]).unwrap()
        );
        let odd_periodic = encoder_permutation(5, Variant::Periodic).unwrap();
        assert_eq!(
            odd_periodic,
            SitePermutation::from_cycles(5, &[vec![1, 3, 5], vec![4, 2]]).unwrap()
        );
    }

    #[test]
    fn permutation_algebra() {
        let s = SitePermutation::from_cycles(6, &[vec![1, 3, 5, 6, 4, 2]]).unwrap();
        assert_eq!(s.power(6), SitePermutation::identity(6));
        assert_eq!(s.then(&s.inverse()).unwrap(), SitePermutation::identity(6));
        assert_eq!(s.power(2).to_string(), "(1 5 4)(2 3 6)");
        assert_eq!(s.orbit(6).unwrap(), vec![6, 4, 2, 1, 3, 5]);
        assert!(SitePermutation::from_map(vec![1, 1, 2]).is_err());
        assert!(SitePermutation::from_cycles(3, &[vec![1, 4]]).is_err());
    }

    #[test]
    fn check_pairs_match_table() {
        let code = CodeSpec::new(10, Variant::Open, 1).build().unwrap();
        let pair = check_as_mode_pair(2, &code).unwrap();
        assert_eq!((pair.gamma_site, pair.xi_site), (1, 2));
        assert_eq!(pair.pauli, p(10, "Y1 Y2"));
        assert_eq!(check_as_mode_pair(9, &code).unwrap().pauli, p(10, "X9 X10"));
        assert_eq!(
            check_as_mode_pair(10, &code).unwrap().pauli,
            p(10, "-Y8 Z9 Y10")
        );
        assert!(check_as_mode_pair(1, &code).is_err());
        assert!(check_as_mode_pair(11, &code).is_err());
    }

    #[test]
    fn hadamards_are_rejected() {
        let code = CodeSpec::new(6, Variant::Open, 2)
            .with_hadamard_layers(vec![vec![2]])
            .build()
            .unwrap();
        assert!(matches!(
            evolve_mode(MajoranaMode::gamma(1), &code),
            Err(Error::UnsupportedSchedule(_))
        ));
    }
}
