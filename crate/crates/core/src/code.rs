//! TFIM encoder circuits and the check/logical operators they induce.
//!
//! One round of the encoder applies TFIM gates on the odd bonds
//! `(1,2), (3,4), …` and then on the even bonds `(2,3), (4,5), …`. The
//! periodic variant adds the bond `(n,1)` to the second sub-layer. Optional
//! Hadamard layers sit between consecutive rounds.
//!
//! Operators are tracked in the Heisenberg picture: the check `Z̃_k` is
//! `Ũ Z_k Ũ†` for every non-logical site `k`, and the logical pair is
//! `(Ũ X_l Ũ†, Ũ Z_l Ũ†)` for each logical site `l`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_site, Error, Result};
use crate::frame::StabilizerFrame;
use crate::gate::CliffordGate;
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Open,
    Periodic,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Open => "open",
            Variant::Periodic => "periodic",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(Variant::Open),
            "periodic" => Ok(Variant::Periodic),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant {other:?}"
            ))),
        }
    }
}

/// Gate sub-layers of a single round. Works for any `n ≥ 2`. The periodic
/// bond `(n, 1)` joins the even sub-layer for even `n`; for odd `n` it starts
/// on an odd site but overlaps bond `(1, 2)`, so it gets its own sub-layer
/// right after the odd one.
pub(crate) fn round_sublayers(n: usize, variant: Variant) -> Vec<Vec<CliffordGate>> {
    let odd: Vec<_> = (1..n).step_by(2).map(CliffordGate::tfim).collect();
    let mut even: Vec<_> = (2..n).step_by(2).map(CliffordGate::tfim).collect();
    if variant == Variant::Periodic && n > 2 {
        if n.is_multiple_of(2) {
            even.push(CliffordGate::tfim(n));
        } else {
            return vec![odd, vec![CliffordGate::tfim(n)], even];
        }
    }
    vec![odd, even]
}

/// One round of gates, odd bonds first.
pub fn round_schedule(n: usize, variant: Variant) -> Vec<CliffordGate> {
    round_sublayers(n, variant).into_iter().flatten().collect()
}

/// The full gate list: `rounds` encoder rounds with `hadamard_layers[r]`
/// applied after round `r + 1`. At most `rounds - 1` Hadamard layers are
/// accepted; missing trailing layers are empty.
pub fn build_encoder(
    n: usize,
    variant: Variant,
    rounds: usize,
    hadamard_layers: &[Vec<usize>],
) -> Result<Vec<CliffordGate>> {
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::InvalidParameter(format!(
            "encoder needs an even qubit count n >= 4, got {n}"
        )));
    }
    if rounds < 1 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    if hadamard_layers.len() > rounds - 1 {
        return Err(Error::InvalidParameter(format!(
            "{} Hadamard layers given for {} inter-round slots",
            hadamard_layers.len(),
            rounds - 1
        )));
    }
    let one_round = round_schedule(n, variant);
    let mut gates = Vec::with_capacity(rounds * one_round.len());
    for r in 0..rounds {
        gates.extend_from_slice(&one_round);
        if let Some(layer) = hadamard_layers.get(r) {
            for &site in layer {
                check_site(site, n)?;
                gates.push(CliffordGate::hadamard(site));
            }
        }
    }
    Ok(gates)
}

/// Draws `rounds - 1` inter-round Hadamard layers, each site included
/// independently with probability `p_h`.
pub fn sample_hadamard_layers<R: Rng + ?Sized>(
    n: usize,
    rounds: usize,
    p_h: f64,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    sample_hadamard_layers_excluding(n, rounds, p_h, &[], rng)
}

/// Like [`sample_hadamard_layers`] but never places a Hadamard on `exclude`.
/// Excluded sites still consume a random draw, so the remaining sites see the
/// same randomness as without exclusion.
pub fn sample_hadamard_layers_excluding<R: Rng + ?Sized>(
    n: usize,
    rounds: usize,
    p_h: f64,
    exclude: &[usize],
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if !(0.0..=1.0).contains(&p_h) {
        return Err(Error::InvalidParameter(format!(
            "p_H = {p_h} outside [0, 1]"
        )));
    }
    let slots = rounds.saturating_sub(1);
    Ok((0..slots)
        .map(|_| {
            (1..=n)
                .filter(|site| {
                    let hit = rng.random::<f64>() < p_h;
                    hit && !exclude.contains(site)
                })
                .collect()
        })
        .collect())
}

/// `Ũ p Ũ†` for the gate list applied in order.
pub fn conjugate_by_schedule(p: &PauliString, schedule: &[CliffordGate]) -> Result<PauliString> {
    let mut out = p.clone();
    for g in schedule {
        g.conjugate(&mut out)?;
    }
    Ok(out)
}

/// Evolved stabilizer generator at site `index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    /// 1-based site whose initial `Z` evolved into this check.
    pub index: usize,
    pub op: PauliString,
}

fn validate_logical_sites(n: usize, logical_sites: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &l in logical_sites {
        let q = check_site(l, n)?;
        if mask[q] {
            return Err(Error::InvalidParameter(format!(
                "logical site {l} repeated"
            )));
        }
        mask[q] = true;
    }
    Ok(mask)
}

/// Conjugates of `Z_k` for every `k` not in `logical_sites`, ordered by `k`.
pub fn derive_check_operators(
    n: usize,
    schedule: &[CliffordGate],
    logical_sites: &[usize],
) -> Result<Vec<Check>> {
    let mask = validate_logical_sites(n, logical_sites)?;
    (1..=n)
        .filter(|k| !mask[k - 1])
        .map(|k| {
            let z = PauliString::single(n, k, Pauli::Z)?;
            Ok(Check {
                index: k,
                op: conjugate_by_schedule(&z, schedule)?,
            })
        })
        .collect()
}

/// Conjugates of `X_l` and `Z_l` for each logical site, in the given order.
pub fn derive_logical_operators(
    n: usize,
    schedule: &[CliffordGate],
    logical_sites: &[usize],
) -> Result<(Vec<PauliString>, Vec<PauliString>)> {
    validate_logical_sites(n, logical_sites)?;
    let mut xs = Vec::with_capacity(logical_sites.len());
    let mut zs = Vec::with_capacity(logical_sites.len());
    for &l in logical_sites {
        xs.push(conjugate_by_schedule(
            &PauliString::single(n, l, Pauli::X)?,
            schedule,
        )?);
        zs.push(conjugate_by_schedule(
            &PauliString::single(n, l, Pauli::Z)?,
            schedule,
        )?);
    }
    Ok((xs, zs))
}

/// Default placement of `count` logical qubits: odd sites `1, 3, 5, …`, then
/// even sites if more are requested.
pub fn default_logical_sites(n: usize, count: usize) -> Result<Vec<usize>> {
    if count > n {
        return Err(Error::InvalidParameter(format!(
            "{count} logical qubits do not fit in {n} sites"
        )));
    }
    Ok((1..=n)
        .step_by(2)
        .chain((2..=n).step_by(2))
        .take(count)
        .collect())
}

/// Parameters of a TFIM code; see [`CodeInstance::build`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub variant: Variant,
    pub rounds: usize,
    pub hadamard_layers: Vec<Vec<usize>>,
    pub logical_sites: Vec<usize>,
}

impl CodeSpec {
    /// A single logical qubit on site 1 with no Hadamard layers.
    pub fn new(n: usize, variant: Variant, rounds: usize) -> Self {
        CodeSpec {
            n,
            variant,
            rounds,
            hadamard_layers: Vec::new(),
            logical_sites: vec![1],
        }
    }

    pub fn with_logical_sites(mut self, sites: Vec<usize>) -> Self {
        self.logical_sites = sites;
        self
    }

    pub fn with_hadamard_layers(mut self, layers: Vec<Vec<usize>>) -> Self {
        self.hadamard_layers = layers;
        self
    }

    pub fn build(self) -> Result<CodeInstance> {
        CodeInstance::build(self)
    }
}

/// An encoded TFIM code: schedule plus the evolved stabilizer frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeInstance {
    spec: CodeSpec,
    schedule: Vec<CliffordGate>,
    frame: StabilizerFrame,
}

impl CodeInstance {
    pub fn build(spec: CodeSpec) -> Result<Self> {
        let schedule = build_encoder(spec.n, spec.variant, spec.rounds, &spec.hadamard_layers)?;
        validate_logical_sites(spec.n, &spec.logical_sites)?;
        let mut frame = StabilizerFrame::product_state(spec.n, &spec.logical_sites)?;
        frame.apply_gates(&schedule)?;
        #[cfg(debug_assertions)]
        frame.verify()?;
        Ok(CodeInstance {
            spec,
            schedule,
            frame,
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn variant(&self) -> Variant {
        self.spec.variant
    }

    pub fn rounds(&self) -> usize {
        self.spec.rounds
    }

    /// Circuit depth counted in gate sub-layers: two per round.
    pub fn depth(&self) -> usize {
        2 * self.spec.rounds
    }

    pub fn hadamard_layers(&self) -> &[Vec<usize>] {
        &self.spec.hadamard_layers
    }

    pub fn has_hadamards(&self) -> bool {
        self.spec.hadamard_layers.iter().any(|l| !l.is_empty())
    }

    pub fn logical_sites(&self) -> &[usize] {
        &self.spec.logical_sites
    }

    pub fn schedule(&self) -> &[CliffordGate] {
        &self.schedule
    }

    /// The encoded frame: stabilizers are the checks, in site order.
    pub fn frame(&self) -> &StabilizerFrame {
        &self.frame
    }

    pub fn checks(&self) -> Vec<Check> {
        let logical = &self.spec.logical_sites;
        (1..=self.spec.n)
            .filter(|k| !logical.contains(k))
            .zip(self.frame.stabilizers())
            .map(|(index, op)| Check {
                index,
                op: op.clone(),
            })
            .collect()
    }

    /// The check `Z̃_k`, or `None` if `k` is a logical site.
    pub fn check(&self, k: usize) -> Result<Option<&PauliString>> {
        check_site(k, self.spec.n)?;
        let logical = &self.spec.logical_sites;
        if logical.contains(&k) {
            return Ok(None);
        }
        let pos = (1..k).filter(|s| !logical.contains(s)).count();
        Ok(self.frame.stabilizers().get(pos))
    }

    pub fn logical_x(&self) -> &[PauliString] {
        self.frame.logical_x()
    }

    pub fn logical_z(&self) -> &[PauliString] {
        self.frame.logical_z()
    }

    /// `Ũ p Ũ†` under this code's schedule.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.spec.n {
            return Err(Error::SizeMismatch {
                left: self.spec.n,
                right: p.num_qubits(),
            });
        }
        conjugate_by_schedule(p, &self.schedule)
    }
}
