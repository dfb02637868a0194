use num_complex::Complex64;
use proptest::prelude::*;
use tfim_qec::gate::CliffordMap;
use tfim_qec::majorana::MajoranaMode;
use tfim_qec::oracle::DenseState;
use tfim_qec::{CliffordGate, MajoranaMonomial, Pauli, PauliString, StabilizerFrame};

type Matrix = Vec<Vec<Complex64>>;

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn letter_matrix(l: Pauli) -> Matrix {
    let (o, z, i) = (
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match l {
        Pauli::I => vec![vec![o, z], vec![z, o]],
        Pauli::X => vec![vec![z, o], vec![o, z]],
        Pauli::Y => vec![vec![z, -i], vec![i, z]],
        Pauli::Z => vec![vec![o, z], vec![z, -o]],
    }
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Site 1 is the least significant bit, so it is the rightmost factor.
fn dense(p: &PauliString) -> Matrix {
    let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
    for site in (1..=p.num_qubits()).rev() {
        m = kron(&m, &letter_matrix(p.letter(site).unwrap()));
    }
    let phase = Complex64::new(0.0, 1.0).powu(p.phase() as u32);
    m.iter()
        .map(|row| row.iter().map(|v| v * phase).collect())
        .collect()
}

fn close(a: &Matrix, b: &Matrix) -> bool {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .all(|(x, y)| (x - y).norm() < 1e-12)
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0..4usize, n), 0..4u8).prop_map(|(ls, ph)| {
        let letters: Vec<Pauli> = ls.into_iter().map(|i| LETTERS[i]).collect();
        PauliString::from_dense(&letters).with_phase(ph)
    })
}

fn gate(n: usize) -> impl Strategy<Value = CliffordGate> {
    prop_oneof![
        (1..=n).prop_map(CliffordGate::tfim),
        (1..=n).prop_map(CliffordGate::hadamard),
    ]
}

fn schedule(n: usize, len: usize) -> impl Strategy<Value = Vec<CliffordGate>> {
    prop::collection::vec(gate(n), 0..len)
}

fn conjugated(p: &PauliString, gates: &[CliffordGate]) -> PauliString {
    let mut q = p.clone();
    for g in gates {
        g.conjugate(&mut q).unwrap();
    }
    q
}

proptest! {
    #[test]
    fn product_matches_kronecker(
        (a, b) in (1..=3usize).prop_flat_map(|n| (pauli(n), pauli(n)))
    ) {
        let ab = a.mul(&b).unwrap();
        prop_assert!(close(&dense(&ab), &matmul(&dense(&a), &dense(&b))));
        let commute = close(&matmul(&dense(&a), &dense(&b)), &matmul(&dense(&b), &dense(&a)));
        prop_assert_eq!(a.commutes(&b).unwrap(), commute);
    }

    #[test]
    fn product_is_associative(
        (a, b, c) in (1..=12usize).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
    ) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn text_round_trip(p in (1..=12usize).prop_flat_map(pauli)) {
        prop_assume!(p.is_hermitian());
        let back = PauliString::parse(p.num_qubits(), &p.to_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    /// ⟨Ub| U P U† |Ub⟩ = ⟨b|P|b⟩ for every basis state b.
    #[test]
    fn conjugation_matches_statevector(
        (p, gates, b) in (2..=5usize).prop_flat_map(|n| (pauli(n), schedule(n, 12), 0..(1usize << n)))
    ) {
        let n = p.num_qubits();
        let q = conjugated(&p, &gates);
        let before = DenseState::basis(n, b).unwrap().expectation(&p).unwrap();
        let mut s = DenseState::basis(n, b).unwrap();
        s.apply_gates(&gates).unwrap();
        let after = s.expectation(&q).unwrap();
        prop_assert!((before - after).norm() < 1e-10, "{} -> {}", p, q);
    }

    #[test]
    fn clifford_maps_compose(
        (p, first, second) in (2..=8usize).prop_flat_map(|n| (pauli(n), schedule(n, 6), schedule(n, 6)))
    ) {
        let n = p.num_qubits();
        let build = |gates: &[CliffordGate]| {
            gates.iter().try_fold(CliffordMap::identity(n), |m, &g| {
                m.then(&CliffordMap::from_gate(n, g)?)
            }).unwrap()
        };
        let composed = build(&first).then(&build(&second)).unwrap();
        let mut all = first.clone();
        all.extend(second.iter().copied());
        prop_assert_eq!(composed.conjugate(&p).unwrap(), conjugated(&p, &all));
    }

    /// A Pauli has expectation ±1 on a stabilizer state when the frame says
    /// it is determined and 0 otherwise.
    #[test]
    fn frame_predictions_match_statevector(
        (obs, gates) in (2..=6usize).prop_flat_map(|n| (pauli(n), schedule(n, 16)))
    ) {
        prop_assume!(obs.is_hermitian() && !obs.is_identity_letters());
        let n = obs.num_qubits();
        let mut frame = StabilizerFrame::product_state(n, &[]).unwrap();
        frame.apply_gates(&gates).unwrap();
        let mut s = DenseState::zero(n).unwrap();
        s.apply_gates(&gates).unwrap();
        let e = s.expectation(&obs).unwrap();
        match frame.peek(&obs).unwrap() {
            Some(sign) => prop_assert!((e - Complex64::new(sign as f64, 0.0)).norm() < 1e-10),
            None => prop_assert!(e.norm() < 1e-10),
        }
    }

    #[test]
    fn majorana_products_follow_pauli_products(
        (n, a, b) in (1..=8usize).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec((any::<bool>(), 1..=n), 0..5),
            prop::collection::vec((any::<bool>(), 1..=n), 0..5),
        ))
    ) {
        let modes = |v: &[(bool, usize)]| -> Vec<MajoranaMode> {
            v.iter()
                .map(|&(g, s)| if g { MajoranaMode::gamma(s) } else { MajoranaMode::xi(s) })
                .collect()
        };
        let ma = MajoranaMonomial::product(n, &modes(&a)).unwrap();
        let mb = MajoranaMonomial::product(n, &modes(&b)).unwrap();
        let prod = ma.mul(&mb).unwrap();
        prop_assert_eq!(prod.to_pauli(), ma.to_pauli().mul(&mb.to_pauli()).unwrap());
        prop_assert_eq!(MajoranaMonomial::from_pauli(&prod.to_pauli()), prod);
        prop_assert_eq!(ma.commutes(&mb), ma.to_pauli().commutes(&mb.to_pauli()).unwrap());
    }
}
