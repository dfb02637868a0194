//! Stabilizer tableau with destabilizers and explicit logical pairs.
//!
//! A frame on `n` qubits holds `n - k` stabilizers `S_j`, their conjugate
//! destabilizers `D_j`, and `k` logical pairs `(X̄_m, Z̄_m)`. Together they form
//! a symplectic basis of the Pauli group: `D_j` anticommutes only with `S_j`,
//! `X̄_m` anticommutes only with `Z̄_m`, and every other pair commutes.

use rand::Rng;

use crate::error::{check_site, Error, Result};
use crate::gate::CliffordGate;
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerFrame {
    n: usize,
    stabilizers: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
    logical_x: Vec<PauliString>,
    logical_z: Vec<PauliString>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// The observable (up to sign) was already in the stabilizer group.
    Deterministic,
    /// The observable anticommuted with a stabilizer: fair coin.
    Random,
    /// The observable was a logical operator of pair `pair`; that pair is
    /// consumed and the frame loses one logical qubit.
    LogicalCollapse { pair: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    /// `+1` or `-1`.
    pub outcome: i8,
    pub kind: MeasurementKind,
}

impl StabilizerFrame {
    /// The product state `|0…0⟩` with the qubits at `logical_sites` left free:
    /// stabilizers `Z_s` and destabilizers `X_s` for the other sites, logical
    /// pairs `(X_l, Z_l)` in the order given.
    pub fn product_state(n: usize, logical_sites: &[usize]) -> Result<Self> {
        let mut is_logical = vec![false; n];
        for &l in logical_sites {
            let q = check_site(l, n)?;
            if is_logical[q] {
                return Err(Error::InvalidParameter(format!(
                    "logical site {l} repeated"
                )));
            }
            is_logical[q] = true;
        }
        let mut frame = StabilizerFrame {
            n,
            stabilizers: Vec::with_capacity(n - logical_sites.len()),
            destabilizers: Vec::with_capacity(n - logical_sites.len()),
            logical_x: Vec::with_capacity(logical_sites.len()),
            logical_z: Vec::with_capacity(logical_sites.len()),
        };
        for site in 1..=n {
            if !is_logical[site - 1] {
                frame
                    .stabilizers
                    .push(PauliString::single(n, site, Pauli::Z)?);
                frame
                    .destabilizers
                    .push(PauliString::single(n, site, Pauli::X)?);
            }
        }
        for &l in logical_sites {
            frame.logical_x.push(PauliString::single(n, l, Pauli::X)?);
            frame.logical_z.push(PauliString::single(n, l, Pauli::Z)?);
        }
        Ok(frame)
    }

    /// Assembles a frame from explicit rows and checks every commutation
    /// relation.
    pub fn from_parts(
        stabilizers: Vec<PauliString>,
        destabilizers: Vec<PauliString>,
        logical_x: Vec<PauliString>,
        logical_z: Vec<PauliString>,
    ) -> Result<Self> {
        let n = stabilizers
            .first()
            .or(logical_x.first())
            .map(PauliString::num_qubits)
            .ok_or_else(|| Error::InvalidParameter("empty frame".into()))?;
        let frame = StabilizerFrame {
            n,
            stabilizers,
            destabilizers,
            logical_x,
            logical_z,
        };
        frame.verify()?;
        Ok(frame)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_logical(&self) -> usize {
        self.logical_x.len()
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    pub fn logical_x(&self) -> &[PauliString] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliString] {
        &self.logical_z
    }

    fn rows_mut(&mut self) -> impl Iterator<Item = &mut PauliString> {
        self.stabilizers
            .iter_mut()
            .chain(self.destabilizers.iter_mut())
            .chain(self.logical_x.iter_mut())
            .chain(self.logical_z.iter_mut())
    }

    /// Replaces every row `R` by `g R g†`.
    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        let sites = gate.sites0(self.n)?;
        for row in self.rows_mut() {
            gate.conjugate_at(row, &sites);
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

    /// Consuming variant of [`apply_gate`](Self::apply_gate).
    pub fn conjugated(mut self, gate: &CliffordGate) -> Result<Self> {
        self.apply_gate(gate)?;
        Ok(self)
    }

    /// Conjugation by a Pauli operator (an error or a correction).
    pub fn apply_pauli(&mut self, pauli: &PauliString) -> Result<()> {
        if pauli.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: pauli.num_qubits(),
            });
        }
        for row in self.rows_mut() {
            if !row.commutes_unchecked(pauli) {
                row.negate();
            }
        }
        Ok(())
    }

    /// Checks Hermiticity and the full set of symplectic relations.
    pub fn verify(&self) -> Result<()> {
        let m = self.stabilizers.len();
        let k = self.logical_x.len();
        if self.destabilizers.len() != m || self.logical_z.len() != k {
            return Err(Error::BrokenFrame("row counts disagree".into()));
        }
        if m + k != self.n {
            return Err(Error::BrokenFrame(format!(
                "{m} stabilizers + {k} logicals != {} qubits",
                self.n
            )));
        }
        let all: Vec<(&str, usize, &PauliString)> = self
            .stabilizers
            .iter()
            .enumerate()
            .map(|(i, p)| ("S", i, p))
            .chain(
                self.destabilizers
                    .iter()
                    .enumerate()
                    .map(|(i, p)| ("D", i, p)),
            )
            .chain(self.logical_x.iter().enumerate().map(|(i, p)| ("X", i, p)))
            .chain(self.logical_z.iter().enumerate().map(|(i, p)| ("Z", i, p)))
            .collect();
        for &(kind, i, p) in &all {
            if p.num_qubits() != self.n {
                return Err(Error::BrokenFrame(format!("{kind}{i} has wrong length")));
            }
            if !p.is_hermitian() {
                return Err(Error::BrokenFrame(format!("{kind}{i} is not Hermitian")));
            }
        }
        let partners =
            |a: &str, b: &str| matches!((a, b), ("S", "D") | ("D", "S") | ("X", "Z") | ("Z", "X"));
        for (ai, &(ka, ia, pa)) in all.iter().enumerate() {
            for &(kb, ib, pb) in &all[ai + 1..] {
                let should_anticommute = ia == ib && partners(ka, kb);
                if pa.commutes_unchecked(pb) == should_anticommute {
                    return Err(Error::BrokenFrame(format!(
                        "{ka}{ia} and {kb}{ib} have the wrong commutation relation"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `Some(±1)` if `±q` belongs to the stabilizer group, `None` otherwise.
    pub fn stabilizer_group_sign(&self, q: &PauliString) -> Result<Option<i8>> {
        if q.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: q.num_qubits(),
            });
        }
        if self.stabilizers.iter().any(|s| !s.commutes_unchecked(q))
            || self
                .logical_x
                .iter()
                .chain(&self.logical_z)
                .any(|l| !l.commutes_unchecked(q))
        {
            return Ok(None);
        }
        let mut product = PauliString::identity(self.n);
        for (s, d) in self.stabilizers.iter().zip(&self.destabilizers) {
            if !d.commutes_unchecked(q) {
                product.mul_assign_unchecked(s);
            }
        }
        if product.unsigned() != q.unsigned() {
            return Err(Error::BrokenFrame(
                "observable commutes with the full basis but is not generated".into(),
            ));
        }
        Ok(match (q.phase() + 4 - product.phase()) % 4 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        })
    }

    /// True if `a` and `b` act identically on the code space, i.e. `a·b`
    /// is `+1` times a stabilizer group element.
    pub fn equivalent(&self, a: &PauliString, b: &PauliString) -> Result<bool> {
        let q = a.mul(b)?;
        Ok(self.stabilizer_group_sign(&q)? == Some(1))
    }

    /// The deterministic outcome of measuring `obs`, if it has one.
    pub fn peek(&self, obs: &PauliString) -> Result<Option<i8>> {
        if !obs.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        self.stabilizer_group_sign(obs)
    }

    /// Projective measurement of a Hermitian Pauli observable.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        obs: &PauliString,
        rng: &mut R,
    ) -> Result<Measurement> {
        if obs.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: obs.num_qubits(),
            });
        }
        if !obs.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        if let Some(p) = self
            .stabilizers
            .iter()
            .position(|s| !s.commutes_unchecked(obs))
        {
            let outcome: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let pivot = self.stabilizers[p].clone();
            for (j, row) in self.stabilizers.iter_mut().enumerate() {
                if j != p && !row.commutes_unchecked(obs) {
                    row.mul_assign_unchecked(&pivot);
                }
            }
            for (j, row) in self.destabilizers.iter_mut().enumerate() {
                if j != p && !row.commutes_unchecked(obs) {
                    row.mul_assign_unchecked(&pivot);
                }
            }
            for row in self.logical_x.iter_mut().chain(self.logical_z.iter_mut()) {
                if !row.commutes_unchecked(obs) {
                    row.mul_assign_unchecked(&pivot);
                }
            }
            self.destabilizers[p] = pivot;
            self.stabilizers[p] = signed(obs, outcome);
            return Ok(Measurement {
                outcome,
                kind: MeasurementKind::Random,
            });
        }

        let pair = (0..self.logical_x.len()).find(|&m| {
            !self.logical_x[m].commutes_unchecked(obs) || !self.logical_z[m].commutes_unchecked(obs)
        });
        let Some(m) = pair else {
            let outcome = self.stabilizer_group_sign(obs)?.ok_or_else(|| {
                Error::BrokenFrame("deterministic observable with imaginary sign".into())
            })?;
            return Ok(Measurement {
                outcome,
                kind: MeasurementKind::Deterministic,
            });
        };

        // Logical collapse: the anticommuting member of pair m becomes the
        // destabilizer of the new stabilizer ±obs.
        let outcome: i8 = if rng.random::<bool>() { 1 } else { -1 };
        let lx = self.logical_x.remove(m);
        let lz = self.logical_z.remove(m);
        let pivot = if !lx.commutes_unchecked(obs) { lx } else { lz };
        for row in self
            .destabilizers
            .iter_mut()
            .chain(self.logical_x.iter_mut())
            .chain(self.logical_z.iter_mut())
        {
            if !row.commutes_unchecked(obs) {
                row.mul_assign_unchecked(&pivot);
            }
        }
        self.stabilizers.push(signed(obs, outcome));
        self.destabilizers.push(pivot);
        Ok(Measurement {
            outcome,
            kind: MeasurementKind::LogicalCollapse { pair: m },
        })
    }
}

fn signed(obs: &PauliString, outcome: i8) -> PauliString {
    if outcome == 1 {
        obs.clone()
    } else {
        obs.clone().negated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: usize, s: &str) -> PauliString {
        PauliString::parse(n, s).unwrap()
    }

    #[test]
    fn product_state_layout() {
        let f = StabilizerFrame::product_state(4, &[1]).unwrap();
        f.verify().unwrap();
        assert_eq!(f.stabilizers()[0], p(4, "Z2"));
        assert_eq!(f.logical_x()[0], p(4, "X1"));
        assert_eq!(f.logical_z()[0], p(4, "Z1"));
        assert!(StabilizerFrame::product_state(4, &[5]).is_err());
        assert!(StabilizerFrame::product_state(4, &[2, 2]).is_err());
    }

    #[test]
    fn deterministic_measurement_leaves_frame_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut f = StabilizerFrame::product_state(3, &[1]).unwrap();
        let before = f.clone();
        let m = f.measure(&p(3, "Z2"), &mut rng).unwrap();
        assert_eq!(
            m,
            Measurement {
                outcome: 1,
                kind: MeasurementKind::Deterministic
            }
        );
        assert_eq!(f, before);
        let m = f.measure(&p(3, "-Z2 Z3"), &mut rng).unwrap();
        assert_eq!(m.outcome, -1);
    }

    #[test]
    fn random_measurement_updates_stabilizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut f = StabilizerFrame::product_state(2, &[]).unwrap();
        let m = f.measure(&p(2, "X1"), &mut rng).unwrap();
        assert_eq!(m.kind, MeasurementKind::Random);
        f.verify().unwrap();
        assert_eq!(f.peek(&p(2, "X1")).unwrap(), Some(m.outcome));
        // repeated measurement is now deterministic
        let again = f.measure(&p(2, "X1"), &mut rng).unwrap();
        assert_eq!(again.outcome, m.outcome);
        assert_eq!(again.kind, MeasurementKind::Deterministic);
    }

    #[test]
    fn logical_measurement_collapses_a_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut f = StabilizerFrame::product_state(3, &[1, 3]).unwrap();
        let m = f.measure(&p(3, "X1 Z3"), &mut rng).unwrap();
        assert_eq!(m.kind, MeasurementKind::LogicalCollapse { pair: 0 });
        assert_eq!(f.num_logical(), 1);
        f.verify().unwrap();
        assert_eq!(f.peek(&p(3, "X1 Z3")).unwrap(), Some(m.outcome));
    }

    #[test]
    fn rejects_bad_observables() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut f = StabilizerFrame::product_state(2, &[]).unwrap();
        assert_eq!(
            f.measure(&p(2, "iX1"), &mut rng).unwrap_err(),
            Error::NonHermitian
        );
        assert!(f.measure(&p(3, "X1"), &mut rng).is_err());
    }

    #[test]
    fn pauli_error_flips_anticommuting_rows() {
        let mut f = StabilizerFrame::product_state(2, &[1]).unwrap();
        f.apply_pauli(&p(2, "X2")).unwrap();
        assert_eq!(f.stabilizers()[0], p(2, "-Z2"));
        assert_eq!(f.logical_x()[0], p(2, "X1"));
    }

    #[test]
    fn equivalence_modulo_stabilizers() {
        let f = StabilizerFrame::product_state(3, &[1]).unwrap();
        assert!(f.equivalent(&p(3, "X1"), &p(3, "X1 Z2 Z3")).unwrap());
        assert!(!f.equivalent(&p(3, "X1"), &p(3, "-X1 Z2")).unwrap());
        assert!(!f.equivalent(&p(3, "X1"), &p(3, "Z1")).unwrap());
    }
}
