//! Syndromes and the three decoders: single-error lookup, repetition-style
//! Z decoding along the encoder cycle, and erasure recovery over GF(2).

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{Check, CodeInstance};
use crate::error::{check_site, Error, Result};
use crate::frame::StabilizerFrame;
use crate::gf2::{BitVec, RowSpan};
use crate::pauli::{Pauli, PauliString};

/// Measured check values: `true` means the check returned `−1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syndrome {
    bits: BTreeMap<usize, bool>,
}

impl Syndrome {
    pub fn from_bits(bits: impl IntoIterator<Item = (usize, bool)>) -> Self {
        Syndrome {
            bits: bits.into_iter().collect(),
        }
    }

    /// Trivial syndrome on the given checks.
    pub fn zeros(available: impl IntoIterator<Item = usize>) -> Self {
        Self::from_bits(available.into_iter().map(|k| (k, false)))
    }

    pub fn get(&self, k: usize) -> Option<bool> {
        self.bits.get(&k).copied()
    }

    pub fn available(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.keys().copied()
    }

    /// Indices of checks that returned `−1`.
    pub fn flagged(&self) -> Vec<usize> {
        self.bits
            .iter()
            .filter(|(_, &b)| b)
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.bits.values().all(|&b| !b)
    }

    /// Drops the listed check columns.
    pub fn without(&self, removed: &[usize]) -> Syndrome {
        Syndrome {
            bits: self
                .bits
                .iter()
                .filter(|(k, _)| !removed.contains(k))
                .map(|(&k, &b)| (k, b))
                .collect(),
        }
    }

    /// Bits as a `0`/`1` string in check-index order.
    pub fn to_bit_string(&self) -> String {
        self.bits
            .values()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Bit `k` is set iff `error` anticommutes with check `k`.
pub fn syndrome_of(error: &PauliString, checks: &[Check]) -> Result<Syndrome> {
    let mut bits = BTreeMap::new();
    for c in checks {
        bits.insert(c.index, !error.commutes(&c.op)?);
    }
    Ok(Syndrome { bits })
}

/// The identity and all `3n` single-site Paulis.
pub fn weight_one_candidates(n: usize) -> Vec<PauliString> {
    let mut out = vec![PauliString::identity(n)];
    for site in 1..=n {
        for l in Pauli::NON_IDENTITY {
            out.push(PauliString::single(n, site, l).expect("site in range"));
        }
    }
    out
}

fn syndrome_matches(error: &PauliString, s: &Syndrome, code: &CodeInstance) -> Result<bool> {
    for k in s.available() {
        let check = code
            .check(k)?
            .ok_or_else(|| Error::InvalidParameter(format!("check {k} is a logical operator")))?;
        if error.commutes(check)? == s.get(k).unwrap() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds the unique weight ≤ 1 Pauli consistent with `s` by trying all
/// `3n + 1` candidates. The correction is that Pauli itself.
pub fn decode_single_error(s: &Syndrome, code: &CodeInstance) -> Result<PauliString> {
    let mut matches = Vec::new();
    for cand in weight_one_candidates(code.n()) {
        if syndrome_matches(&cand, s, code)? {
            matches.push(cand);
        }
    }
    match matches.len() {
        0 => Err(Error::Uncorrectable),
        1 => Ok(matches.pop().unwrap()),
        _ => Err(Error::Ambiguous {
            candidates: matches.iter().map(|p| p.to_string()).collect(),
        }),
    }
}

/// Sites in the order they are linked by checks, for each independent
/// chain of the one-round code. Check `k` has `X` or `Y` on exactly two
/// sites, `k` and `σ(k)`, so a `Z` error flips the two checks on either
/// side of it along the chain.
fn z_chains(code: &CodeInstance) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = code.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for c in code.checks() {
        let sites: Vec<usize> =
            c.op.support()
                .into_iter()
                .filter(|&s| c.op.letter(s).map(|l| l.bits().0).unwrap_or(false))
                .collect();
        if sites.len() != 2 {
            return Err(Error::UnsupportedSchedule(format!(
                "check {} has X/Y on {} sites; Z decoding needs a one-round code",
                c.index,
                sites.len()
            )));
        }
        adj[sites[0] - 1].push((sites[1], c.index));
        adj[sites[1] - 1].push((sites[0], c.index));
    }
    let mut seen = vec![false; n];
    let mut chains = Vec::new();
    for start in 1..=n {
        if seen[start - 1] || adj[start - 1].len() > 1 {
            continue;
        }
        // walk from an endpoint
        let mut sites = vec![start];
        let mut edges = Vec::new();
        seen[start - 1] = true;
        let mut cur = start;
        loop {
            let next = adj[cur - 1].iter().find(|(s, _)| !seen[s - 1]).copied();
            let Some((s, k)) = next else { break };
            seen[s - 1] = true;
            sites.push(s);
            edges.push(k);
            cur = s;
        }
        chains.push((sites, edges));
    }
    if seen.iter().any(|&v| !v) {
        return Err(Error::UnsupportedSchedule(
            "check graph has a closed cycle; no logical breaks it".into(),
        ));
    }
    Ok(chains)
}

/// Repetition-code decoding of Z errors for a one-round code. Each chain of
/// sites yields two complementary candidates; the lighter one wins and a
/// tie is reported as [`Error::DecodeTie`].
pub fn decode_z_errors(s: &Syndrome, code: &CodeInstance) -> Result<PauliString> {
    if code.rounds() != 1 || code.has_hadamards() {
        return Err(Error::UnsupportedSchedule(
            "Z decoding is defined for the one-round code".into(),
        ));
    }
    let n = code.n();
    let mut correction = PauliString::identity(n);
    for (sites, edges) in z_chains(code)? {
        let mut flips = vec![false; sites.len()];
        for (m, k) in edges.iter().enumerate() {
            let bit = s
                .get(*k)
                .ok_or_else(|| Error::InvalidParameter(format!("syndrome lacks check {k}")))?;
            flips[m + 1] = flips[m] ^ bit;
        }
        let w = flips.iter().filter(|&&f| f).count();
        let len = sites.len();
        if 2 * w == len {
            return Err(Error::DecodeTie { weight: w });
        }
        let complement = 2 * w > len;
        for (site, f) in sites.iter().zip(flips) {
            if f != complement {
                correction.set(*site, Pauli::Z)?;
            }
        }
    }
    Ok(correction)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ErasureModel {
    /// Each site independently with probability `p`.
    Bernoulli { p: f64 },
    /// A uniformly random subset of `count` sites.
    FixedCount { count: usize },
}

impl ErasureModel {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            ErasureModel::Bernoulli { p } if !(0.0..=1.0).contains(&p) => Err(
                Error::InvalidParameter(format!("erasure probability {p} outside [0, 1]")),
            ),
            ErasureModel::FixedCount { count } if count > n => Err(Error::InvalidParameter(
                format!("cannot erase {count} of {n} sites"),
            )),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<ErasurePattern> {
        self.validate(n)?;
        let mut sites: Vec<usize> = match *self {
            ErasureModel::Bernoulli { p } => (1..=n).filter(|_| rng.random::<f64>() < p).collect(),
            ErasureModel::FixedCount { count } => index::sample(rng, n, count)
                .into_iter()
                .map(|q| q + 1)
                .collect(),
        };
        sites.sort_unstable();
        Ok(ErasurePattern {
            erased_sites: sites,
            model: Some(*self),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErasurePattern {
    /// Sorted 1-based sites.
    pub erased_sites: Vec<usize>,
    pub model: Option<ErasureModel>,
}

impl ErasurePattern {
    pub fn new(n: usize, sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut erased_sites: Vec<usize> = sites.into_iter().collect();
        for &s in &erased_sites {
            check_site(s, n)?;
        }
        erased_sites.sort_unstable();
        erased_sites.dedup();
        Ok(ErasurePattern {
            erased_sites,
            model: None,
        })
    }

    pub fn len(&self) -> usize {
        self.erased_sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased_sites.is_empty()
    }
}

/// A logical generator rewritten to act trivially on the erased sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedLogical {
    pub original: PauliString,
    /// Indices into the frame's stabilizer list.
    pub stabilizers: Vec<usize>,
    pub cleaned: PauliString,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureOutcome {
    pub success: bool,
    /// One entry per logical generator that could be cleaned, `X̄` first.
    pub cleaned: Vec<CleanedLogical>,
}

/// Decides whether every logical generator has a representative that is
/// the identity on the erased sites.
pub fn erasure_recoverable(
    frame: &StabilizerFrame,
    erasure: &ErasurePattern,
) -> Result<ErasureOutcome> {
    let n = frame.num_qubits();
    let sites0: Vec<usize> = erasure
        .erased_sites
        .iter()
        .map(|&s| check_site(s, n))
        .collect::<Result<_>>()?;
    let restrict = |p: &PauliString| BitVec::from_bools(&p.restriction_bits(&sites0));
    let rows: Vec<BitVec> = frame.stabilizers().iter().map(restrict).collect();
    let span = RowSpan::new(&rows);
    let mut cleaned = Vec::new();
    let mut success = true;
    for logical in frame.logical_x().iter().chain(frame.logical_z()) {
        match span.solve(&restrict(logical)) {
            Some(subset) => {
                let mut op = logical.clone();
                for &j in &subset {
                    op.mul_assign_unchecked(&frame.stabilizers()[j]);
                }
                debug_assert!(sites0.iter().all(|&q| op.letter_q(q) == Pauli::I));
                cleaned.push(CleanedLogical {
                    original: logical.clone(),
                    stabilizers: subset,
                    cleaned: op,
                });
            }
            None => success = false,
        }
    }
    Ok(ErasureOutcome { success, cleaned })
}

/// Exhaustive version of [`erasure_recoverable`]: scans the whole stabilizer
/// group. Only for small codes.
pub fn erasure_recoverable_brute_force(
    frame: &StabilizerFrame,
    erasure: &ErasurePattern,
) -> Result<bool> {
    let stabs = frame.stabilizers();
    if stabs.len() > 20 {
        return Err(Error::InvalidParameter(
            "stabilizer group too large to enumerate".into(),
        ));
    }
    let sites0: Vec<usize> = erasure
        .erased_sites
        .iter()
        .map(|&s| check_site(s, frame.num_qubits()))
        .collect::<Result<_>>()?;
    let mut group = Vec::with_capacity(1 << stabs.len());
    for mask in 0u32..(1 << stabs.len()) {
        let mut g = PauliString::identity(frame.num_qubits());
        for (j, s) in stabs.iter().enumerate() {
            if mask >> j & 1 == 1 {
                g.mul_assign_unchecked(s);
            }
        }
        group.push(g);
    }
    Ok(frame.logical_x().iter().chain(frame.logical_z()).all(|l| {
        group.iter().any(|g| {
            let prod = l.mul(g).expect("same size");
            sites0.iter().all(|&q| prod.letter_q(q) == Pauli::I)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;
    use crate::Variant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: usize, s: &str) -> PauliString {
        PauliString::parse(n, s).unwrap()
    }

    fn two_round(n: usize) -> CodeInstance {
        CodeSpec::new(n, Variant::Periodic, 2).build().unwrap()
    }

    #[test]
    fn table_one_rows() {
        // k = 3: columns Z'_3, Z'_5, Z'_7, Z'_6, Z'_8, Z'_10 at N = 10
        let code = two_round(10);
        let cols = [3, 5, 7, 6, 8, 10];
        let rows = [
            ("X6", "110111"),
            ("X7", "010011"),
            ("Y6", "110010"),
            ("Y7", "111011"),
            ("Z6", "000101"),
            ("Z7", "101000"),
        ];
        for (err, expect) in rows {
            let s = syndrome_of(&p(10, err), &code.checks()).unwrap();
            let got: String = cols
                .iter()
                .map(|&k| if s.get(k).unwrap() { '1' } else { '0' })
                .collect();
            assert_eq!(got, expect, "{err}");
        }
    }

    #[test]
    fn single_error_decoding() {
        let code = two_round(10);
        let trivial = Syndrome::zeros(code.checks().iter().map(|c| c.index));
        assert_eq!(
            decode_single_error(&trivial, &code).unwrap(),
            PauliString::identity(10)
        );
        // Z_{2k+1} row, k = 3
        let s = syndrome_of(&p(10, "Z7"), &code.checks()).unwrap();
        assert_eq!(decode_single_error(&s, &code).unwrap(), p(10, "Z7"));
        let two = syndrome_of(&p(10, "X2 X6"), &code.checks()).unwrap();
        assert!(decode_single_error(&two, &code).is_err());
    }

    #[test]
    fn small_rings_collide() {
        for n in [6, 8] {
            let code = two_round(n);
            let mut found = false;
            for e in weight_one_candidates(n).into_iter().skip(1) {
                let s = syndrome_of(&e, &code.checks()).unwrap();
                if matches!(decode_single_error(&s, &code), Err(Error::Ambiguous { .. })) {
                    found = true;
                }
            }
            assert!(found, "n={n}");
        }
    }

    #[test]
    fn z_decoder_single_errors() {
        let code = CodeSpec::new(12, Variant::Open, 1).build().unwrap();
        let checks = code.checks();
        let trivial = syndrome_of(&PauliString::identity(12), &checks).unwrap();
        assert_eq!(
            decode_z_errors(&trivial, &code).unwrap(),
            PauliString::identity(12)
        );
        for site in 1..=12 {
            let e = PauliString::single(12, site, Pauli::Z).unwrap();
            let s = syndrome_of(&e, &checks).unwrap();
            assert_eq!(decode_z_errors(&s, &code).unwrap(), e);
        }
        let half = p(12, "Z1 Z2 Z3 Z4 Z5 Z6");
        let s = syndrome_of(&half, &checks).unwrap();
        assert_eq!(
            decode_z_errors(&s, &code),
            Err(Error::DecodeTie { weight: 6 })
        );
    }

    #[test]
    fn z_decoder_handles_two_chains() {
        let code = CodeSpec::new(10, Variant::Periodic, 1)
            .with_logical_sites(vec![1, 2])
            .build()
            .unwrap();
        let e = p(10, "Z3 Z8");
        let s = syndrome_of(&e, &code.checks()).unwrap();
        assert_eq!(decode_z_errors(&s, &code).unwrap(), e);
    }

    #[test]
    fn erasure_examples() {
        let code = CodeSpec::new(8, Variant::Open, 1).build().unwrap();
        let frame = code.frame();
        let none = ErasurePattern::new(8, []).unwrap();
        assert!(erasure_recoverable(frame, &none).unwrap().success);
        let all = ErasurePattern::new(8, 1..=8).unwrap();
        assert!(!erasure_recoverable(frame, &all).unwrap().success);
        let three = ErasurePattern::new(8, [3]).unwrap();
        let out = erasure_recoverable(frame, &three).unwrap();
        assert!(out.success);
        // X̄ = Z1 Z2 X3 is cleaned by the check X3 Z4 X5
        let x = &out.cleaned[0];
        assert_eq!(x.original, p(8, "Z1 Z2 X3"));
        assert_eq!(x.cleaned, p(8, "Z1 Z2 Z4 X5"));
        assert_eq!(x.stabilizers.len(), 1);
        assert_eq!(frame.stabilizers()[x.stabilizers[0]], p(8, "X3 Z4 X5"));
    }

    #[test]
    fn erasure_matches_brute_force_small() {
        let code = CodeSpec::new(6, Variant::Periodic, 2).build().unwrap();
        for mask in 0u32..64 {
            let e = ErasurePattern::new(6, (1..=6).filter(|s| mask >> (s - 1) & 1 == 1)).unwrap();
            assert_eq!(
                erasure_recoverable(code.frame(), &e).unwrap().success,
                erasure_recoverable_brute_force(code.frame(), &e).unwrap(),
                "{:?}",
                e.erased_sites
            );
        }
    }

    #[test]
    fn erasure_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = ErasureModel::FixedCount { count: 4 }
            .sample(16, &mut rng)
            .unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.erased_sites.windows(2).all(|w| w[0] < w[1]));
        assert!(ErasureModel::Bernoulli { p: 1.5 }
            .sample(4, &mut rng)
            .is_err());
        let all = ErasureModel::Bernoulli { p: 1.0 }
            .sample(5, &mut rng)
            .unwrap();
        assert_eq!(all.erased_sites, vec![1, 2, 3, 4, 5]);
    }
}
