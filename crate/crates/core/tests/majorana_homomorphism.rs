use tfim_qec::code::{conjugate_by_schedule, round_schedule};
use tfim_qec::majorana::{
    check_as_mode_pair, encoder_permutation, evolve_mode, mode_to_pauli, MajoranaMonomial, RoundMap,
};
use tfim_qec::{CodeSpec, MajoranaMode, Variant};

fn all_modes(n: usize) -> Vec<MajoranaMode> {
    (1..=n)
        .flat_map(|s| [MajoranaMode::gamma(s), MajoranaMode::xi(s)])
        .collect()
}

#[test]
fn mode_evolution_agrees_with_pauli_conjugation() {
    for n in 4..=16 {
        for variant in [Variant::Open, Variant::Periodic] {
            let map = RoundMap::new(n, variant).unwrap();
            let round = round_schedule(n, variant);
            for rounds in 1..=3 {
                let schedule: Vec<_> = round
                    .iter()
                    .copied()
                    .cycle()
                    .take(rounds * round.len())
                    .collect();
                for m in all_modes(n) {
                    let via_modes = map
                        .apply_rounds(&MajoranaMonomial::from_mode(m, n).unwrap(), rounds)
                        .unwrap()
                        .to_pauli();
                    let via_paulis =
                        conjugate_by_schedule(&mode_to_pauli(m, n).unwrap(), &schedule).unwrap();
                    assert_eq!(via_modes, via_paulis, "n={n} {variant} r={rounds} {m}");
                }
            }
        }
    }
}

#[test]
fn open_encoder_is_a_signed_permutation() {
    for n in (4..=16).step_by(2) {
        let sigma = encoder_permutation(n, Variant::Open).unwrap();
        for rounds in 1..=3 {
            let code = CodeSpec::new(n, Variant::Open, rounds).build().unwrap();
            let sr = sigma.power(rounds);
            for site in 1..=n {
                let g = evolve_mode(MajoranaMode::gamma(site), &code)
                    .unwrap()
                    .as_mode()
                    .expect("single mode");
                assert_eq!(g.site, sr.apply(site).unwrap());
                let x = evolve_mode(MajoranaMode::xi(site), &code)
                    .unwrap()
                    .as_mode()
                    .unwrap();
                assert_eq!(x.site, site);
                let expect = if site == n || rounds % 2 == 0 { 1 } else { -1 };
                assert_eq!(x.sign, expect, "n={n} r={rounds} ξ{site}");
            }
        }
    }
}

#[test]
fn check_pairs_follow_cycle_powers() {
    for n in (4..=16).step_by(2) {
        for variant in [Variant::Open, Variant::Periodic] {
            let sigma = encoder_permutation(n, variant).unwrap();
            for rounds in 1..=3 {
                let code = CodeSpec::new(n, variant, rounds).build().unwrap();
                let sr = sigma.power(rounds);
                for check in code.checks() {
                    let pair = check_as_mode_pair(check.index, &code).unwrap();
                    assert_eq!(
                        pair.pauli, check.op,
                        "n={n} {variant} r={rounds} k={}",
                        check.index
                    );
                    assert_eq!(pair.xi_site, check.index);
                    assert_eq!(pair.gamma_site, sr.apply(check.index).unwrap());
                }
            }
        }
    }
}

#[test]
fn odd_sizes_follow_the_odd_cycle_forms() {
    for n in [5usize, 7, 9, 11] {
        let odd: Vec<usize> = (1..=n).step_by(2).collect();
        let even_down: Vec<usize> = (2..n).step_by(2).rev().collect();
        let open = encoder_permutation(n, Variant::Open).unwrap();
        let mut cycle = odd.clone();
        cycle.extend(&even_down);
        assert_eq!(open.orbit(1).unwrap(), cycle);
        let periodic = encoder_permutation(n, Variant::Periodic).unwrap();
        assert_eq!(periodic.orbit(1).unwrap(), odd);
        assert_eq!(periodic.orbit(n - 1).unwrap(), even_down);
    }
}
