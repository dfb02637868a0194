//! The two Clifford gates used by the encoder and their Heisenberg action.
//!
//! `Tfim { site: i }` is `U_i = (Z_i + X_i X_{i+1}) / √2` on the bond
//! `(i, i+1)`, with `i = n` wrapping to the bond `(n, 1)`. Both gates are
//! Hermitian and involutory, so `g P g†` and `g† P g` coincide.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_site, Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordGate {
    /// Two-site TFIM gate on the bond starting at 1-based `site`.
    Tfim {
        site: usize,
    },
    Hadamard {
        site: usize,
    },
}

/// Image of a two-site letter pair: new letters and whether the sign flips.
type LocalImage = (Pauli, Pauli, bool);

fn letter_index(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Extends generator images to the full 16-entry table by multiplication.
fn table_from_generators(
    xa: &PauliString,
    za: &PauliString,
    xb: &PauliString,
    zb: &PauliString,
) -> [[LocalImage; 4]; 4] {
    let mut table = [[(Pauli::I, Pauli::I, false); 4]; 4];
    for la in LETTERS {
        for lb in LETTERS {
            let (ax, az) = la.bits();
            let (bx, bz) = lb.bits();
            let mut img = PauliString::identity(2);
            // la ⊗ lb = i^{#Y} X_a^ax Z_a^az X_b^bx Z_b^bz
            img.mul_phase(((ax && az) as u8) + ((bx && bz) as u8));
            for (on, g) in [(ax, xa), (az, za), (bx, xb), (bz, zb)] {
                if on {
                    img.mul_assign_unchecked(g);
                }
            }
            debug_assert!(img.is_hermitian());
            table[letter_index(la)][letter_index(lb)] =
                (img.letter_q(0), img.letter_q(1), img.phase() == 2);
        }
    }
    table
}

fn tfim_table() -> &'static [[LocalImage; 4]; 4] {
    static TABLE: OnceLock<[[LocalImage; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let w = |s: &str| PauliString::parse(2, s).expect("static word");
        // U X_i U = Z_i X_{i+1}, U Z_i U = X_i X_{i+1},
        // U X_{i+1} U = X_{i+1}, U Z_{i+1} U = -Y_i Y_{i+1}
        table_from_generators(&w("Z1 X2"), &w("X1 X2"), &w("X2"), &w("-Y1 Y2"))
    })
}

fn hadamard_image(l: Pauli) -> (Pauli, bool) {
    match l {
        Pauli::I => (Pauli::I, false),
        Pauli::X => (Pauli::Z, false),
        Pauli::Y => (Pauli::Y, true),
        Pauli::Z => (Pauli::X, false),
    }
}

impl CliffordGate {
    pub fn tfim(site: usize) -> Self {
        CliffordGate::Tfim { site }
    }

    pub fn hadamard(site: usize) -> Self {
        CliffordGate::Hadamard { site }
    }

    /// 0-based sites touched by the gate on an `n`-qubit register.
    pub fn sites0(&self, n: usize) -> Result<Vec<usize>> {
        match *self {
            CliffordGate::Tfim { site } => {
                let a = check_site(site, n)?;
                if n < 2 {
                    return Err(Error::InvalidParameter(
                        "TFIM gate needs at least two qubits".into(),
                    ));
                }
                Ok(vec![a, (a + 1) % n])
            }
            CliffordGate::Hadamard { site } => Ok(vec![check_site(site, n)?]),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.sites0(n).map(|_| ())
    }

    /// `p ← g p g†`.
    pub fn conjugate(&self, p: &mut PauliString) -> Result<()> {
        let sites = self.sites0(p.num_qubits())?;
        self.conjugate_at(p, &sites);
        Ok(())
    }

    pub fn conjugated(&self, p: &PauliString) -> Result<PauliString> {
        let mut out = p.clone();
        self.conjugate(&mut out)?;
        Ok(out)
    }

    #[inline]
    pub(crate) fn conjugate_at(&self, p: &mut PauliString, sites0: &[usize]) {
        match self {
            CliffordGate::Tfim { .. } => {
                let (a, b) = (sites0[0], sites0[1]);
                let (la, lb) = (p.letter_q(a), p.letter_q(b));
                if la == Pauli::I && lb == Pauli::I {
                    return;
                }
                let (na, nb, flip) = tfim_table()[letter_index(la)][letter_index(lb)];
                p.set_q(a, na);
                p.set_q(b, nb);
                if flip {
                    p.negate();
                }
            }
            CliffordGate::Hadamard { .. } => {
                let q = sites0[0];
                let (l, flip) = hadamard_image(p.letter_q(q));
                p.set_q(q, l);
                if flip {
                    p.negate();
                }
            }
        }
    }
}

/// Conjugation by a Pauli operator: flips the sign of anticommuting rows.
pub fn conjugate_by_pauli(p: &mut PauliString, by: &PauliString) -> Result<()> {
    if !p.commutes(by)? {
        p.negate();
    }
    Ok(())
}

/// A Clifford unitary stored by the images of the generators `X_j`, `Z_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordMap {
    n: usize,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl CliffordMap {
    pub fn identity(n: usize) -> Self {
        let single = |l| {
            (0..n)
                .map(|q| PauliString::single(n, q + 1, l).expect("in range"))
                .collect()
        };
        CliffordMap {
            n,
            x_images: single(Pauli::X),
            z_images: single(Pauli::Z),
        }
    }

    pub fn from_gate(n: usize, gate: CliffordGate) -> Result<Self> {
        let mut map = CliffordMap::identity(n);
        for img in map.x_images.iter_mut().chain(map.z_images.iter_mut()) {
            gate.conjugate(img)?;
        }
        Ok(map)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// `C p C†`, expanded generator by generator.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: p.num_qubits(),
            });
        }
        let mut out = PauliString::identity(self.n);
        out.mul_phase(((p.phase() as u32 + p.y_count()) % 4) as u8);
        for q in 0..self.n {
            let (x, z) = p.letter_q(q).bits();
            if x {
                out.mul_assign_unchecked(&self.x_images[q]);
            }
            if z {
                out.mul_assign_unchecked(&self.z_images[q]);
            }
        }
        Ok(out)
    }

    /// The map that applies `self` first and `next` second.
    pub fn then(&self, next: &CliffordMap) -> Result<CliffordMap> {
        let x_images = self
            .x_images
            .iter()
            .map(|g| next.conjugate(g))
            .collect::<Result<_>>()?;
        let z_images = self
            .z_images
            .iter()
            .map(|g| next.conjugate(g))
            .collect::<Result<_>>()?;
        Ok(CliffordMap {
            n: self.n,
            x_images,
            z_images,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> PauliString {
        PauliString::parse(n, s).unwrap()
    }

    #[test]
    fn single_gate_conjugation_table() {
        let g = CliffordGate::tfim(1);
        let cases = [
            ("X1", "Z1 X2"),
            ("Y1", "-Y1"),
            ("Z1", "X1 X2"),
            ("X2", "X2"),
            ("Y2", "Y1 Z2"),
            ("Z2", "-Y1 Y2"),
        ];
        for (input, expect) in cases {
            assert_eq!(g.conjugated(&p(2, input)).unwrap(), p(2, expect), "{input}");
        }
    }

    #[test]
    fn tfim_gate_is_involutory_on_all_two_site_letters() {
        for la in LETTERS {
            for lb in LETTERS {
                let word = PauliString::from_dense(&[la, lb, Pauli::X]);
                for site in 1..=3 {
                    let g = CliffordGate::tfim(site);
                    let twice = g.conjugated(&g.conjugated(&word).unwrap()).unwrap();
                    assert_eq!(twice, word);
                }
            }
        }
    }

    #[test]
    fn wraparound_bond() {
        // U_3 on a 3-site ring acts on (3, 1): Z_1 plays the role of Z_{i+1}.
        let g = CliffordGate::tfim(3);
        assert_eq!(g.conjugated(&p(3, "Z1")).unwrap(), p(3, "-Y1 Y3"));
        assert_eq!(g.conjugated(&p(3, "X3")).unwrap(), p(3, "X1 Z3"));
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let h = CliffordGate::hadamard(1);
        assert_eq!(h.conjugated(&p(1, "X1")).unwrap(), p(1, "Z1"));
        assert_eq!(h.conjugated(&p(1, "Y1")).unwrap(), p(1, "-Y1"));
    }

    #[test]
    fn out_of_range_sites() {
        assert!(CliffordGate::tfim(5).conjugated(&p(4, "X1")).is_err());
        assert!(CliffordGate::hadamard(0).conjugated(&p(4, "X1")).is_err());
        assert!(CliffordGate::tfim(1).conjugated(&p(1, "X1")).is_err());
    }

    #[test]
    fn clifford_map_matches_direct_conjugation() {
        let g = CliffordGate::tfim(2);
        let map = CliffordMap::from_gate(4, g).unwrap();
        for s in ["X2 Y3", "-Z3 X4", "iY1 Y2 Y3 Y4", "I"] {
            let w = p(4, s);
            assert_eq!(map.conjugate(&w).unwrap(), g.conjugated(&w).unwrap());
        }
    }
}
