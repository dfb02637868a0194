//! Protocols and Monte Carlo experiments built on the code, decoders and
//! oracle: state transfer by measurement, check-support statistics, and
//! erasure recovery versus circuit depth.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by the master
//! seed plus a few integer tags, so trials can run in any order or thread and
//! still reproduce bit for bit.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{
    default_logical_sites, round_sublayers, sample_hadamard_layers_excluding, CodeInstance,
    CodeSpec, Variant,
};
use crate::decode::{erasure_recoverable, ErasureModel, ErasurePattern};
use crate::error::{check_site, Error, Result};
use crate::frame::StabilizerFrame;
use crate::gate::CliffordGate;
use crate::majorana::encoder_permutation;
use crate::oracle::DenseState;
use crate::pauli::{Pauli, PauliString};

const TAG_HADAMARD: u64 = 1;
const TAG_ERASURE: u64 = 2;
const TAG_STATS: u64 = 3;
const TAG_RUNS: u64 = 4;

/// Independent stream for `(seed, tags)`: the four words form the ChaCha key.
pub fn substream(seed: u64, tags: [u64; 3]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    for (k, t) in tags.iter().enumerate() {
        key[8 * (k + 1)..8 * (k + 2)].copy_from_slice(&t.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Wilson score interval at 95 % confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

// ---------------------------------------------------------------------------
// State transfer

/// Measurement-based transfer of the logical qubit from `source` to `target`
/// on the one-round open code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TeleportPlan {
    pub n: usize,
    pub source: usize,
    pub target: usize,
    /// The evolved logical `X̄` times the check chain: `±Z…Z X_target`.
    pub transfer_logical: PauliString,
    /// Check indices multiplied in, in cycle order.
    pub chain: Vec<usize>,
    /// Sites whose outcome parity decides the `X` correction.
    pub x_parity_sites: Vec<usize>,
    /// Sites whose outcome parity, times the sign of the transfer logical,
    /// decides the `Z` correction.
    pub z_parity_sites: Vec<usize>,
}

pub fn plan_teleport(source: usize, target: usize, code: &CodeInstance) -> Result<TeleportPlan> {
    let n = code.n();
    check_site(source, n)?;
    check_site(target, n)?;
    if source == target {
        return Err(Error::InvalidParameter("source and target coincide".into()));
    }
    if code.variant() != Variant::Open || code.rounds() != 1 || code.has_hadamards() {
        return Err(Error::UnsupportedSchedule(
            "state transfer is defined on the one-round open code".into(),
        ));
    }
    if code.logical_sites() != [source] {
        return Err(Error::InvalidParameter(format!(
            "code must carry a single logical qubit at site {source}"
        )));
    }
    let sigma = encoder_permutation(n, Variant::Open)?;
    // X̄ = γ_σ(i); the check at k = σ^m(i) moves the γ one step further
    let mut transfer = code.logical_x()[0].clone();
    let mut chain = Vec::new();
    let mut at = sigma.apply(source)?;
    while at != target {
        let check = code.check(at)?.expect("chain avoids the logical site");
        transfer.mul_assign(check)?;
        chain.push(at);
        at = sigma.apply(at)?;
    }
    let measured: Vec<usize> = (1..=n).filter(|&s| s != target).collect();
    let mut z_parity_sites = Vec::new();
    for &s in &measured {
        match transfer.letter(s)? {
            Pauli::I => {}
            Pauli::Z => z_parity_sites.push(s),
            other => {
                return Err(Error::BrokenFrame(format!(
                    "transfer logical has {} on measured site {s}",
                    other.symbol()
                )))
            }
        }
    }
    if transfer.letter(target)? != Pauli::X || transfer.sign().is_none() {
        return Err(Error::BrokenFrame(format!(
            "unexpected transfer logical {transfer}"
        )));
    }
    Ok(TeleportPlan {
        n,
        source,
        target,
        transfer_logical: transfer,
        chain,
        x_parity_sites: measured,
        z_parity_sites,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Tableau,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportOutcome {
    /// `(site, ±1)` in measurement order.
    pub outcomes: Vec<(usize, i8)>,
    pub applied_x: bool,
    pub applied_z: bool,
    pub fidelity: f64,
    /// Tableau backend only: the final logical pair equals `(X_j, Z_j)` up
    /// to stabilizers, signs included.
    pub logical_pair_restored: Option<bool>,
}

impl TeleportPlan {
    /// Corrections `(apply X, apply Z)` for the given outcomes.
    pub fn corrections(&self, outcomes: &[(usize, i8)]) -> (bool, bool) {
        let minus = |sites: &[usize]| {
            outcomes
                .iter()
                .filter(|(s, o)| *o < 0 && sites.contains(s))
                .count()
                % 2
                == 1
        };
        let x = minus(&self.x_parity_sites);
        let sign_flip = self.transfer_logical.sign() == Some(-1);
        let z = minus(&self.z_parity_sites) != sign_flip;
        (x, z)
    }
}

fn normalized(alpha: Complex64, beta: Complex64) -> Result<(Complex64, Complex64)> {
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if norm < 1e-12 {
        return Err(Error::InvalidParameter("zero input state".into()));
    }
    Ok((alpha / norm, beta / norm))
}

/// Encodes `α|0⟩ + β|1⟩` at the source, measures every other site in `Z`,
/// applies the parity corrections on the target and compares.
pub fn run_teleport<R: rand::Rng + ?Sized>(
    plan: &TeleportPlan,
    code: &CodeInstance,
    alpha: Complex64,
    beta: Complex64,
    rng: &mut R,
    backend: Backend,
) -> Result<TeleportOutcome> {
    let (alpha, beta) = normalized(alpha, beta)?;
    let n = plan.n;
    let xj = PauliString::single(n, plan.target, Pauli::X)?;
    let zj = PauliString::single(n, plan.target, Pauli::Z)?;
    match backend {
        Backend::Oracle => {
            let mut state = DenseState::product_state(n, &[plan.source], alpha, beta)?;
            state.apply_gates(code.schedule())?;
            let mut outcomes = Vec::with_capacity(n - 1);
            for &s in &plan.x_parity_sites {
                outcomes.push((s, state.born_measure(s, rng)?));
            }
            let (ax, az) = plan.corrections(&outcomes);
            if ax {
                state.apply_pauli(&xj)?;
            }
            if az {
                state.apply_pauli(&zj)?;
            }
            // expected: measured bits ⊗ (α|0⟩ + β|1⟩) on the target
            let mut base = 0usize;
            for &(s, o) in &outcomes {
                if o < 0 {
                    base |= 1 << (s - 1);
                }
            }
            let t = 1usize << (plan.target - 1);
            let amps = state.amplitudes();
            let overlap = alpha.conj() * amps[base] + beta.conj() * amps[base | t];
            Ok(TeleportOutcome {
                outcomes,
                applied_x: ax,
                applied_z: az,
                fidelity: overlap.norm_sqr(),
                logical_pair_restored: None,
            })
        }
        Backend::Tableau => {
            let mut frame = code.frame().clone();
            let mut outcomes = Vec::with_capacity(n - 1);
            for &s in &plan.x_parity_sites {
                let z = PauliString::single(n, s, Pauli::Z)?;
                outcomes.push((s, frame.measure(&z, rng)?.outcome));
            }
            let (ax, az) = plan.corrections(&outcomes);
            if ax {
                frame.apply_pauli(&xj)?;
            }
            if az {
                frame.apply_pauli(&zj)?;
            }
            let sx = logical_sign(&frame, &frame.logical_x()[0], &xj)?;
            let sz = logical_sign(&frame, &frame.logical_z()[0], &zj)?;
            // the target holds Qψ with Q ∈ {I, Z, X, Y} fixed by the signs
            let ez = alpha.norm_sqr() - beta.norm_sqr();
            let exy = alpha.conj() * beta;
            let fidelity = match (sx, sz) {
                (1, 1) => 1.0,
                (-1, 1) => ez * ez,
                (1, -1) => (2.0 * exy.re).powi(2),
                _ => (2.0 * exy.im).powi(2),
            };
            Ok(TeleportOutcome {
                outcomes,
                applied_x: ax,
                applied_z: az,
                fidelity,
                logical_pair_restored: Some(sx == 1 && sz == 1),
            })
        }
    }
}

/// `s` such that `logical ≡ s·target` modulo the stabilizer group.
fn logical_sign(
    frame: &StabilizerFrame,
    logical: &PauliString,
    target: &PauliString,
) -> Result<i8> {
    if frame.equivalent(logical, target)? {
        Ok(1)
    } else if frame.equivalent(logical, &target.clone().negated())? {
        Ok(-1)
    } else {
        Err(Error::BrokenFrame(format!(
            "logical {logical} is not equivalent to ±{target}"
        )))
    }
}

// ---------------------------------------------------------------------------
// Check-support statistics

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LetterCounts {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Checks with any non-identity letter.
    pub any: f64,
}

impl LetterCounts {
    fn add(&mut self, other: &LetterCounts) {
        self.x += other.x;
        self.y += other.y;
        self.z += other.z;
        self.any += other.any;
    }

    fn scaled(mut self, f: f64) -> Self {
        self.x *= f;
        self.y *= f;
        self.z *= f;
        self.any *= f;
        self
    }
}

/// Averages over sampled encoders of how many evolved `Z_k` (all `n` of
/// them, no site reserved as logical) carry each letter on a site.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportStats {
    pub n: usize,
    pub variant: Variant,
    pub rounds: usize,
    pub p_h: f64,
    pub samples: usize,
    pub even: LetterCounts,
    pub odd: LetterCounts,
    /// Sample standard deviation of the per-sample even/odd averages.
    pub even_std: LetterCounts,
    pub odd_std: LetterCounts,
    pub central_site: usize,
    /// Mean number of operators touching the central site after each round.
    pub central_overlap_by_round: Vec<f64>,
    /// The same after each gate sub-layer.
    pub central_overlap_by_sublayer: Vec<f64>,
}

struct SampleStats {
    even: LetterCounts,
    odd: LetterCounts,
    by_round: Vec<f64>,
    by_sublayer: Vec<f64>,
}

fn letter_counts(ops: &[PauliString], site: usize) -> LetterCounts {
    let mut c = LetterCounts::default();
    for op in ops {
        match op.letter(site).expect("site in range") {
            Pauli::I => continue,
            Pauli::X => c.x += 1.0,
            Pauli::Y => c.y += 1.0,
            Pauli::Z => c.z += 1.0,
        }
        c.any += 1.0;
    }
    c
}

fn touching(ops: &[PauliString], site: usize) -> f64 {
    ops.iter()
        .filter(|op| op.letter(site).expect("site in range") != Pauli::I)
        .count() as f64
}

pub fn check_support_stats(
    n: usize,
    variant: Variant,
    rounds: usize,
    p_h: f64,
    samples: usize,
    seed: u64,
) -> Result<SupportStats> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    CodeSpec::new(n, variant, rounds).build()?;
    let central = n / 2;
    let layers = round_sublayers(n, variant);
    let per_sample: Vec<SampleStats> = (0..samples as u64)
        .into_par_iter()
        .map(|s| -> Result<SampleStats> {
            let mut rng = substream(seed, [TAG_STATS, n as u64, s]);
            let mut ops: Vec<PauliString> = (1..=n)
                .map(|k| PauliString::single(n, k, Pauli::Z))
                .collect::<Result<_>>()?;
            let mut by_round = Vec::with_capacity(rounds);
            let mut by_sublayer = Vec::with_capacity(2 * rounds);
            for r in 0..rounds {
                if r > 0 {
                    let layer = sample_hadamard_layers_excluding(n, 2, p_h, &[], &mut rng)?;
                    for &site in &layer[0] {
                        let h = CliffordGate::hadamard(site);
                        for op in ops.iter_mut() {
                            h.conjugate(op)?;
                        }
                    }
                }
                for sub in &layers {
                    for g in sub {
                        for op in ops.iter_mut() {
                            g.conjugate(op)?;
                        }
                    }
                    by_sublayer.push(touching(&ops, central));
                }
                by_round.push(touching(&ops, central));
            }
            let mut even = LetterCounts::default();
            let mut odd = LetterCounts::default();
            for site in 1..=n {
                let c = letter_counts(&ops, site);
                if site % 2 == 0 {
                    even.add(&c);
                } else {
                    odd.add(&c);
                }
            }
            let half = 1.0 / (n / 2) as f64;
            Ok(SampleStats {
                even: even.scaled(half),
                odd: odd.scaled(1.0 / n.div_ceil(2) as f64),
                by_round,
                by_sublayer,
            })
        })
        .collect::<Result<_>>()?;

    let inv = 1.0 / samples as f64;
    let mean = |f: &dyn Fn(&SampleStats) -> LetterCounts| {
        let mut acc = LetterCounts::default();
        for s in &per_sample {
            acc.add(&f(s));
        }
        acc.scaled(inv)
    };
    let even = mean(&|s| s.even);
    let odd = mean(&|s| s.odd);
    let std = |f: &dyn Fn(&SampleStats) -> LetterCounts, m: LetterCounts| {
        if samples < 2 {
            return LetterCounts::default();
        }
        let mut acc = LetterCounts::default();
        for s in &per_sample {
            let v = f(s);
            acc.add(&LetterCounts {
                x: (v.x - m.x).powi(2),
                y: (v.y - m.y).powi(2),
                z: (v.z - m.z).powi(2),
                any: (v.any - m.any).powi(2),
            });
        }
        let mut out = acc.scaled(1.0 / (samples - 1) as f64);
        out.x = out.x.sqrt();
        out.y = out.y.sqrt();
        out.z = out.z.sqrt();
        out.any = out.any.sqrt();
        out
    };
    let column_mean = |f: &dyn Fn(&SampleStats) -> &Vec<f64>, len: usize| -> Vec<f64> {
        (0..len)
            .map(|i| per_sample.iter().map(|s| f(s)[i]).sum::<f64>() * inv)
            .collect()
    };
    Ok(SupportStats {
        n,
        variant,
        rounds,
        p_h,
        samples,
        even_std: std(&|s| s.even, even),
        odd_std: std(&|s| s.odd, odd),
        even,
        odd,
        central_site: central,
        central_overlap_by_round: column_mean(&|s| &s.by_round, rounds),
        central_overlap_by_sublayer: column_mean(&|s| &s.by_sublayer, 2 * rounds),
    })
}

// ---------------------------------------------------------------------------
// Erasure recovery

/// Encoder family shared by all erasure experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderSetup {
    pub n: usize,
    pub variant: Variant,
    pub p_h: f64,
    /// Fraction of sites that start as logical qubits.
    pub logical_fraction: f64,
    /// Never place Hadamards on initial logical sites.
    pub spare_logical_sites: bool,
}

impl EncoderSetup {
    pub fn new(n: usize, variant: Variant, p_h: f64, logical_fraction: f64) -> Self {
        EncoderSetup {
            n,
            variant,
            p_h,
            logical_fraction,
            spare_logical_sites: false,
        }
    }

    pub fn logical_count(&self) -> Result<usize> {
        let exact = self.logical_fraction * self.n as f64;
        let k = exact.round();
        if !(0.0..=1.0).contains(&self.logical_fraction) || (exact - k).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "logical fraction {} of {} sites is not a whole number of qubits",
                self.logical_fraction, self.n
            )));
        }
        Ok(k as usize)
    }

    pub fn logical_sites(&self) -> Result<Vec<usize>> {
        default_logical_sites(self.n, self.logical_count()?)
    }

    pub fn validate(&self) -> Result<()> {
        CodeSpec::new(self.n, self.variant, 1).build()?;
        if !(0.0..=1.0).contains(&self.p_h) {
            return Err(Error::InvalidParameter(format!(
                "p_H = {} outside [0, 1]",
                self.p_h
            )));
        }
        self.logical_sites().map(|_| ())
    }
}

/// One trial's encoder, grown a round at a time. Hadamard layers come from
/// their own stream, so the code after `r` rounds is the same whatever the
/// final depth.
struct GrowingEncoder {
    n: usize,
    sublayers: Vec<Vec<CliffordGate>>,
    p_h: f64,
    spare: Vec<usize>,
    rng: ChaCha8Rng,
    frame: StabilizerFrame,
    rounds: usize,
    hadamard_layers: Vec<Vec<usize>>,
}

impl GrowingEncoder {
    fn new(setup: &EncoderSetup, seed: u64, trial: u64) -> Result<Self> {
        let logical = setup.logical_sites()?;
        Ok(GrowingEncoder {
            n: setup.n,
            sublayers: round_sublayers(setup.n, setup.variant),
            p_h: setup.p_h,
            spare: if setup.spare_logical_sites {
                logical.clone()
            } else {
                Vec::new()
            },
            rng: substream(seed, [TAG_HADAMARD, setup.n as u64, trial]),
            frame: StabilizerFrame::product_state(setup.n, &logical)?,
            rounds: 0,
            hadamard_layers: Vec::new(),
        })
    }

    fn advance(&mut self) -> Result<()> {
        if self.rounds > 0 {
            let layer =
                sample_hadamard_layers_excluding(self.n, 2, self.p_h, &self.spare, &mut self.rng)?
                    .pop()
                    .unwrap_or_default();
            for &site in &layer {
                self.frame.apply_gate(&CliffordGate::hadamard(site))?;
            }
            self.hadamard_layers.push(layer);
        }
        for sub in &self.sublayers {
            self.frame.apply_gates(sub)?;
        }
        self.rounds += 1;
        Ok(())
    }
}

/// Per-site uniforms for Bernoulli erasure, or a fixed-count subset; drawn
/// once per trial so every `p_E` and depth sees the same randomness.
fn trial_erasure_rng(seed: u64, n: usize, trial: u64) -> ChaCha8Rng {
    substream(seed, [TAG_ERASURE, n as u64, trial])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    /// Master seed; with `trial` and the parameters it reproduces the record.
    pub seed: u64,
    pub trial: u64,
    pub n: usize,
    pub variant: Variant,
    pub rounds: usize,
    pub depth: usize,
    pub p_h: f64,
    pub logical_count: usize,
    pub hadamard_layers: Vec<Vec<usize>>,
    pub erasure: ErasurePattern,
    pub success: bool,
}

/// Builds the encoder for `trial`, samples an erasure and checks recovery of
/// every logical pair.
pub fn erasure_trial(
    setup: &EncoderSetup,
    rounds: usize,
    model: ErasureModel,
    seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    setup.validate()?;
    if rounds < 1 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    let mut enc = GrowingEncoder::new(setup, seed, trial)?;
    for _ in 0..rounds {
        enc.advance()?;
    }
    let erasure = model.sample(setup.n, &mut trial_erasure_rng(seed, setup.n, trial))?;
    let success = erasure_recoverable(&enc.frame, &erasure)?.success;
    Ok(TrialRecord {
        seed,
        trial,
        n: setup.n,
        variant: setup.variant,
        rounds,
        depth: 2 * rounds,
        p_h: setup.p_h,
        logical_count: setup.logical_count()?,
        hadamard_layers: enc.hadamard_layers,
        erasure,
        success,
    })
}

/// The code that [`erasure_trial`] uses for `(seed, trial)` at `rounds`.
pub fn trial_code(
    setup: &EncoderSetup,
    rounds: usize,
    seed: u64,
    trial: u64,
) -> Result<CodeInstance> {
    let mut enc = GrowingEncoder::new(setup, seed, trial)?;
    for _ in 0..rounds {
        enc.advance()?;
    }
    CodeSpec::new(setup.n, setup.variant, rounds)
        .with_logical_sites(setup.logical_sites()?)
        .with_hadamard_layers(enc.hadamard_layers)
        .build()
}

/// Success flags of one trial at each requested round count (ascending) and
/// erasure model.
fn trial_grid(
    setup: &EncoderSetup,
    rounds: &[usize],
    models: &[ErasureModel],
    seed: u64,
    trial: u64,
) -> Result<Vec<Vec<bool>>> {
    let mut enc = GrowingEncoder::new(setup, seed, trial)?;
    let erasures: Vec<ErasurePattern> = models
        .iter()
        .map(|m| m.sample(setup.n, &mut trial_erasure_rng(seed, setup.n, trial)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(rounds.len());
    for &r in rounds {
        while enc.rounds < r {
            enc.advance()?;
        }
        out.push(
            erasures
                .iter()
                .map(|e| erasure_recoverable(&enc.frame, e).map(|o| o.success))
                .collect::<Result<_>>()?,
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub rounds: usize,
    pub depth: usize,
    pub erasure: ErasureModel,
    pub trials: usize,
    pub successes: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryCurve {
    pub setup: EncoderSetup,
    pub points: Vec<CurvePoint>,
    /// Largest erasure probability allowed by the quantum Hamming bound for
    /// this logical fraction, `(1 − f)/2`.
    pub hamming_limit: f64,
}

fn sorted_rounds(rounds: &[usize]) -> Result<Vec<usize>> {
    let mut r = rounds.to_vec();
    r.sort_unstable();
    r.dedup();
    if r.is_empty() || r[0] == 0 {
        return Err(Error::InvalidParameter(
            "round counts must be positive".into(),
        ));
    }
    Ok(r)
}

/// Mean recovery success for every `(rounds, model)` pair; rows ordered by
/// rounds, then by model as given.
pub fn recovery_curve(
    setup: &EncoderSetup,
    rounds: &[usize],
    models: &[ErasureModel],
    trials: usize,
    seed: u64,
) -> Result<RecoveryCurve> {
    setup.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    for m in models {
        m.validate(setup.n)?;
    }
    let rounds = sorted_rounds(rounds)?;
    let grids: Vec<Vec<Vec<bool>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_grid(setup, &rounds, models, seed, t))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(rounds.len() * models.len());
    for (ri, &r) in rounds.iter().enumerate() {
        for (mi, &model) in models.iter().enumerate() {
            let successes = grids.iter().filter(|g| g[ri][mi]).count();
            let (lo, hi) = wilson_interval(successes, trials);
            points.push(CurvePoint {
                n: setup.n,
                rounds: r,
                depth: 2 * r,
                erasure: model,
                trials,
                successes,
                mean: successes as f64 / trials as f64,
                ci_low: lo,
                ci_high: hi,
            });
        }
    }
    Ok(RecoveryCurve {
        setup: setup.clone(),
        points,
        hamming_limit: (1.0 - setup.logical_fraction) / 2.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthPoint {
    pub n: usize,
    /// Smallest depth reaching the target, `None` if censored at the cap.
    pub depth: Option<usize>,
    /// Mean success at depths `2, 4, …` up to where the search stopped.
    pub success_by_depth: Vec<f64>,
    /// `log n / log q⁻¹` for Bernoulli erasure at rate `q`.
    pub longest_run_estimate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub variant: Variant,
    pub p_h: f64,
    pub logical_fraction: f64,
    pub erasure: ErasureModel,
    pub target: f64,
    pub trials: usize,
    pub max_rounds: usize,
    pub points: Vec<DepthPoint>,
    /// Depth against natural `log n` over the uncensored points.
    pub fit: Option<LinearFit>,
}

/// For each `n`, the smallest depth whose mean success reaches `target`.
pub fn depth_to_target(
    ns: &[usize],
    template: &EncoderSetup,
    model: ErasureModel,
    target: f64,
    trials: usize,
    max_rounds: usize,
    seed: u64,
) -> Result<ScalingFit> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target {target} outside (0, 1)"
        )));
    }
    let mut distinct = ns.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InvalidParameter(
            "a scaling fit needs at least four distinct sizes".into(),
        ));
    }
    if trials == 0 || max_rounds == 0 {
        return Err(Error::InvalidParameter(
            "trials and max rounds must be positive".into(),
        ));
    }
    let mut points = Vec::with_capacity(distinct.len());
    for &n in &distinct {
        let setup = EncoderSetup {
            n,
            ..template.clone()
        };
        setup.validate()?;
        model.validate(n)?;
        let erasures: Vec<ErasurePattern> = (0..trials as u64)
            .map(|t| model.sample(n, &mut trial_erasure_rng(seed, n, t)))
            .collect::<Result<_>>()?;
        let mut encoders: Vec<GrowingEncoder> = (0..trials as u64)
            .map(|t| GrowingEncoder::new(&setup, seed, t))
            .collect::<Result<_>>()?;
        let mut success_by_depth = Vec::new();
        let mut depth = None;
        for r in 1..=max_rounds {
            let hits: usize = encoders
                .par_iter_mut()
                .zip(&erasures)
                .map(|(enc, e)| -> Result<usize> {
                    enc.advance()?;
                    Ok(erasure_recoverable(&enc.frame, e)?.success as usize)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum();
            let mean = hits as f64 / trials as f64;
            success_by_depth.push(mean);
            if mean >= target {
                depth = Some(2 * r);
                break;
            }
        }
        let longest_run_estimate = match model {
            ErasureModel::Bernoulli { p } if p > 0.0 && p < 1.0 => {
                Some((n as f64).ln() / (1.0 / p).ln())
            }
            _ => None,
        };
        points.push(DepthPoint {
            n,
            depth,
            success_by_depth,
            longest_run_estimate,
        });
    }
    let fit_points: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.depth.map(|d| ((p.n as f64).ln(), d as f64)))
        .collect();
    Ok(ScalingFit {
        variant: template.variant,
        p_h: template.p_h,
        logical_fraction: template.logical_fraction,
        erasure: model,
        target,
        trials,
        max_rounds,
        fit: linear_fit(&fit_points),
        points,
    })
}

/// Longest run of consecutive erased sites on an open chain, one value per
/// sample.
pub fn longest_erased_runs(n: usize, q: f64, samples: usize, seed: u64) -> Result<Vec<usize>> {
    let model = ErasureModel::Bernoulli { p: q };
    model.validate(n)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let e = model.sample(n, &mut substream(seed, [TAG_RUNS, n as u64, s]))?;
            let (mut best, mut run, mut prev) = (0, 0, 0);
            for &site in &e.erased_sites {
                run = if site == prev + 1 && run > 0 {
                    run + 1
                } else {
                    1
                };
                best = best.max(run);
                prev = site;
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn open_code(n: usize, source: usize) -> CodeInstance {
        CodeSpec::new(n, Variant::Open, 1)
            .with_logical_sites(vec![source])
            .build()
            .unwrap()
    }

    #[test]
    fn transfer_logical_for_eight_sites() {
        let code = open_code(8, 1);
        let plan = plan_teleport(1, 8, &code).unwrap();
        assert_eq!(
            plan.transfer_logical,
            PauliString::parse(8, "Z1 Z2 Z4 Z6 X8").unwrap()
        );
        assert_eq!(plan.chain, vec![3, 5, 7]);
        assert_eq!(plan.z_parity_sites, vec![1, 2, 4, 6]);
        assert_eq!(plan.x_parity_sites, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn transfer_logical_for_four_sites() {
        let code = open_code(4, 1);
        let plan = plan_teleport(1, 4, &code).unwrap();
        assert_eq!(
            plan.transfer_logical,
            PauliString::parse(4, "Z1 Z2 X4").unwrap()
        );
        assert_eq!(plan.chain.len(), 1);
        assert!(plan_teleport(1, 1, &code).is_err());
    }

    #[test]
    fn teleport_basis_state_and_random_state() {
        let mut rng = substream(1, [0, 0, 0]);
        for n in [4, 6, 8] {
            let code = open_code(n, 1);
            let plan = plan_teleport(1, n, &code).unwrap();
            for backend in [Backend::Oracle, Backend::Tableau] {
                for (a, b) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.6, 0.1), c(-0.2, 0.7))] {
                    let out = run_teleport(&plan, &code, a, b, &mut rng, backend).unwrap();
                    assert!((out.fidelity - 1.0).abs() < 1e-10, "n={n} {backend:?}");
                    if backend == Backend::Tableau {
                        assert_eq!(out.logical_pair_restored, Some(true));
                    }
                }
            }
        }
    }

    #[test]
    fn wilson_interval_brackets_the_mean() {
        let (lo, hi) = wilson_interval(90, 100);
        assert!(lo < 0.9 && 0.9 < hi);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert!((wilson_interval(10, 10).1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_exact_line() {
        let f = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erasure_trial_edges() {
        let setup = EncoderSetup::new(8, Variant::Periodic, 0.5, 0.5);
        for t in 0..5 {
            let none = erasure_trial(&setup, 2, ErasureModel::Bernoulli { p: 0.0 }, 4, t).unwrap();
            assert!(none.success);
            let all = erasure_trial(&setup, 2, ErasureModel::Bernoulli { p: 1.0 }, 4, t).unwrap();
            assert!(!all.success);
        }
        assert!(EncoderSetup::new(10, Variant::Open, 0.0, 0.25)
            .validate()
            .is_err());
    }

    #[test]
    fn trial_code_matches_growing_encoder() {
        let setup = EncoderSetup::new(10, Variant::Periodic, 0.4, 0.2);
        let code = trial_code(&setup, 3, 17, 2).unwrap();
        let mut enc = GrowingEncoder::new(&setup, 17, 2).unwrap();
        for _ in 0..3 {
            enc.advance().unwrap();
        }
        assert_eq!(code.frame(), &enc.frame);
    }

    #[test]
    fn support_stats_without_hadamards_are_exact() {
        let s = check_support_stats(12, Variant::Periodic, 2, 0.0, 3, 5).unwrap();
        assert_eq!(s.odd_std, LetterCounts::default());
        assert_eq!((s.odd.x, s.odd.y, s.odd.z), (2.0, 0.0, 3.0));
        assert_eq!((s.even.x, s.even.y, s.even.z), (0.0, 2.0, 3.0));
    }

    #[test]
    fn longest_runs_are_deterministic() {
        let a = longest_erased_runs(64, 0.25, 10, 3).unwrap();
        let b = longest_erased_runs(64, 0.25, 10, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(longest_erased_runs(8, 1.0, 1, 0).unwrap(), vec![8]);
    }
}
