//! Dense state-vector reference simulator for small registers.
//!
//! Basis index bit `q` holds the computational value of site `q + 1`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_site, Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::PauliString;

pub const MAX_QUBITS: usize = 14;
const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    Ok(())
}

impl DenseState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range"
            )));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// `α|0⟩ + β|1⟩` on each of `sites`, every other site in `|0⟩`. The pair
    /// is normalized.
    pub fn product_state(
        n: usize,
        sites: &[usize],
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm < TOL {
            return Err(Error::InvalidParameter("zero amplitude pair".into()));
        }
        let (a, b) = (alpha / norm, beta / norm);
        let mut s = Self::zero(n)?;
        for &site in sites {
            let q = check_site(site, n)?;
            let bit = 1usize << q;
            let mut next = vec![Complex64::new(0.0, 0.0); s.amps.len()];
            for (idx, amp) in s.amps.iter().enumerate() {
                if idx & bit == 0 {
                    next[idx] += amp * a;
                    next[idx | bit] += amp * b;
                }
            }
            s.amps = next;
        }
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameter(
                "length is not a power of two".into(),
            ));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_size(n)?;
        let mut s = DenseState { n, amps };
        let norm = s.norm();
        if norm < TOL {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn scale(&mut self, f: f64) {
        for a in &mut self.amps {
            *a *= f;
        }
    }

    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        let sites = gate.sites0(self.n)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match gate {
            CliffordGate::Tfim { .. } => {
                // U|s⟩ = ((−1)^{s_a}|s⟩ + |s ⊕ a ⊕ b⟩)/√2, and U is symmetric
                let a = 1usize << sites[0];
                let flip = a | (1usize << sites[1]);
                let old = self.amps.clone();
                for (t, amp) in self.amps.iter_mut().enumerate() {
                    let z = if t & a == 0 { old[t] } else { -old[t] };
                    *amp = (z + old[t ^ flip]) * h;
                }
            }
            CliffordGate::Hadamard { .. } => {
                let bit = 1usize << sites[0];
                for t in 0..self.amps.len() {
                    if t & bit == 0 {
                        let (u, v) = (self.amps[t], self.amps[t | bit]);
                        self.amps[t] = (u + v) * h;
                        self.amps[t | bit] = (u - v) * h;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_gates<'a>(
        &mut self,
        gates: impl IntoIterator<Item = &'a CliffordGate>,
    ) -> Result<()> {
        for g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// `|ψ⟩ ← P|ψ⟩` for any Pauli string, phase included.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.amps = self.pauli_image(p)?;
        Ok(())
    }

    fn pauli_image(&self, p: &PauliString) -> Result<Vec<Complex64>> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: p.num_qubits(),
            });
        }
        let (mut xmask, mut zmask) = (0usize, 0usize);
        let mut ys = 0u32;
        for (q, l) in p.letters().iter().enumerate() {
            let (x, z) = l.bits();
            xmask |= (x as usize) << q;
            zmask |= (z as usize) << q;
            ys += (x && z) as u32;
        }
        // P = i^{phase + #Y} X^x Z^z
        let global = Complex64::i().powu((p.phase() as u32 + ys) % 4);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (s, amp) in self.amps.iter().enumerate() {
            let sign = if (s & zmask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[s ^ xmask] = amp * global * sign;
        }
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩`. Real for Hermitian `P`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        let image = self.pauli_image(p)?;
        Ok(self
            .amps
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Projects onto the `outcome` eigenspace of a Hermitian Pauli and
    /// renormalizes. Returns the Born probability of that outcome.
    pub fn collapse(&mut self, obs: &PauliString, outcome: i8) -> Result<f64> {
        if !obs.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let image = self.pauli_image(obs)?;
        let s = outcome as f64;
        for (a, b) in self.amps.iter_mut().zip(&image) {
            *a = (*a + b * s) * 0.5;
        }
        let norm = self.norm();
        if norm < TOL {
            return Err(Error::InvalidParameter(format!(
                "outcome {outcome} has zero probability"
            )));
        }
        self.scale(1.0 / norm);
        Ok(norm * norm)
    }

    /// Born-rule measurement of a Hermitian Pauli observable.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, obs: &PauliString, rng: &mut R) -> Result<i8> {
        if !obs.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let p_plus = ((1.0 + self.expectation(obs)?.re) / 2.0).clamp(0.0, 1.0);
        let outcome = if p_plus >= 1.0 - TOL {
            1
        } else if p_plus <= TOL {
            -1
        } else if rng.random::<f64>() < p_plus {
            1
        } else {
            -1
        };
        self.collapse(obs, outcome)?;
        Ok(outcome)
    }

    /// Measures `Z` on a 1-based site.
    pub fn born_measure<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<i8> {
        let z = PauliString::single(self.n, site, crate::pauli::Pauli::Z)?;
        self.measure_pauli(&z, rng)
    }

    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// `|⟨a|b⟩|²`.
pub fn overlap_fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::round_schedule;
    use crate::Variant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DenseState {
        let amps = (0..1 << n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        DenseState::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn tfim_on_zero_makes_bell_pair() {
        let mut s = DenseState::zero(2).unwrap();
        s.apply_gate(&CliffordGate::tfim(1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect =
            DenseState::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
                .unwrap();
        assert!((overlap_fidelity(&s, &expect).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.amplitudes()[0] - c(h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gates_are_unitary_involutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [
            CliffordGate::tfim(2),
            CliffordGate::tfim(4),
            CliffordGate::hadamard(3),
        ] {
            let s0 = random_state(4, &mut rng);
            let mut s = s0.clone();
            s.apply_gate(&g).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
            s.apply_gate(&g).unwrap();
            let diff: f64 = s
                .amplitudes()
                .iter()
                .zip(s0.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .sum();
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn heisenberg_convention_matches_tableau() {
        // ⟨Uψ| U P U† |Uψ⟩ = ⟨ψ|P|ψ⟩
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sched = round_schedule(4, Variant::Periodic);
        for s in ["X1", "Z2 Y3", "-Y4", "X1 X2 X3 X4"] {
            let p = PauliString::parse(4, s).unwrap();
            let psi = random_state(4, &mut rng);
            let mut phi = psi.clone();
            phi.apply_gates(&sched).unwrap();
            let evolved = crate::code::conjugate_by_schedule(&p, &sched).unwrap();
            let a = psi.expectation(&p).unwrap();
            let b = phi.expectation(&evolved).unwrap();
            assert!((a - b).norm() < 1e-10, "{s}");
        }
    }

    #[test]
    fn pauli_action_with_phase() {
        let mut s = DenseState::zero(1).unwrap();
        s.apply_pauli(&PauliString::parse(1, "Y1").unwrap())
            .unwrap();
        assert!((s.amplitudes()[1] - c(0.0, 1.0)).norm() < 1e-12);
        s.apply_pauli(&PauliString::parse(1, "-iZ1").unwrap())
            .unwrap();
        assert!((s.amplitudes()[1] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bell_measurement_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shots = 10_000;
        let mut plus = 0;
        for _ in 0..shots {
            let mut s = DenseState::zero(2).unwrap();
            s.apply_gate(&CliffordGate::tfim(1)).unwrap();
            let a = s.born_measure(1, &mut rng).unwrap();
            let b = s.born_measure(2, &mut rng).unwrap();
            assert_eq!(a, b);
            plus += (a == 1) as usize;
        }
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((plus as f64 - shots as f64 / 2.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn deterministic_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = DenseState::zero(2).unwrap();
        assert_eq!(s.born_measure(2, &mut rng).unwrap(), 1);
        assert!(s
            .collapse(&PauliString::parse(2, "Z2").unwrap(), -1)
            .is_err());
    }

    #[test]
    fn fidelity_edges_and_limits() {
        let a = DenseState::basis(3, 0).unwrap();
        let b = DenseState::basis(3, 5).unwrap();
        assert_eq!(overlap_fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(overlap_fidelity(&a, &b).unwrap(), 0.0);
        assert!(overlap_fidelity(&a, &DenseState::zero(2).unwrap()).is_err());
        assert!(matches!(
            DenseState::zero(15),
            Err(Error::TooManyQubits { .. })
        ));
    }
}
