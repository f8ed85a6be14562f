use proptest::prelude::*;
use twirlkit::ensembles::{pauli_operator, sample_gue_spectrum, sample_haar_unitary, unitary_from_spectrum, Spectrum};
use twirlkit::form_factors::form_factors_at;
use twirlkit::parallel::RngSeed;
use twirlkit::perm_algebra::TwirledChannel;
use twirlkit::probes::{
    balanced_split, frame_potential_closed_k1, loschmidt_exact, loschmidt_twirled_closed, otoc4_exact,
    otoc4_permutation_form, otoc4_twirled_closed, reduced_purity, renyi2_twirled_bound, tmi_renyi2,
    twirled_purity, PureState,
};
use twirlkit::DenseOperator;

fn spectrum(seed: u64, d: usize) -> Spectrum {
    sample_gue_spectrum(d, &mut RngSeed(seed).stream(0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn form_factors_are_bounded_and_shift_invariant(seed in any::<u64>(), t in 0.0f64..50.0, shift in -5.0f64..5.0) {
        let s = spectrum(seed, 32);
        let p = form_factors_at(&s, t);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p.c2));
        prop_assert!((p.c4 - p.c2 * p.c2).abs() < 1e-15);
        prop_assert!(p.c3.norm() <= 1.0 + 1e-12);
        let shifted = Spectrum::new(s.energies().iter().map(|e| e + shift).collect()).unwrap();
        let q = form_factors_at(&shifted, t);
        prop_assert!((p.c2 - q.c2).abs() < 1e-10 && (p.c3 - q.c3).norm() < 1e-10);
    }

    #[test]
    fn otoc_permutation_form_equals_definition(seed in any::<u64>()) {
        let u = sample_haar_unitary(4, &mut RngSeed(seed).stream(0));
        let (a, b) = (pauli_operator("XI").unwrap(), pauli_operator("IZ").unwrap());
        let via_perm = otoc4_permutation_form(&u, &a, &b).unwrap();
        prop_assert!((via_perm.re - otoc4_exact(&u, &a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn twirled_values_stay_in_physical_ranges(seed in any::<u64>(), t in 0.0f64..20.0) {
        let s = spectrum(seed, 16);
        let ch = TwirledChannel::from_spectrum(&s, t, 2).unwrap();
        let (a, b) = (pauli_operator("XIII").unwrap(), pauli_operator("IXII").unwrap());
        let otoc = otoc4_twirled_closed(&ch, &a, &b).unwrap();
        prop_assert!(otoc.abs() <= 1.0 + 1e-9);
        let echo = loschmidt_twirled_closed(&ch, &a).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&echo));
        let split = balanced_split(16).unwrap();
        let purity = twirled_purity(&ch, &PureState::basis(16, 0).unwrap(), split).unwrap();
        prop_assert!((0.25 - 1e-9..=1.0 + 1e-9).contains(&purity), "{}", purity);
        let p = form_factors_at(&s, t);
        prop_assert!(frame_potential_closed_k1(&p).unwrap() >= 1.0 - 1e-9);
        prop_assert!(renyi2_twirled_bound(&p, 1.0, split).unwrap() >= -1e-12);
    }

    #[test]
    fn exact_probes_respect_bounds(seed in any::<u64>(), t in 0.0f64..10.0) {
        let s = spectrum(seed, 16);
        let u = unitary_from_spectrum(&s, t).unwrap();
        let split = balanced_split(16).unwrap();
        let tmi = tmi_renyi2(&u, split).unwrap();
        prop_assert!(tmi >= -2.0 * 2.0 - 1e-9 && tmi <= 1e-9, "{}", tmi);
        let psi = PureState::basis(16, 3).unwrap().evolve(&u).unwrap();
        let purity = reduced_purity(&psi, split).unwrap();
        prop_assert!((0.25 - 1e-12..=1.0).contains(&purity));
        let echo = loschmidt_exact(&u, &pauli_operator("ZIII").unwrap()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&echo));
    }
}

#[test]
fn identity_perturbation_gives_unit_echo() {
    for t in [0.0, 0.7, 3.0, 40.0] {
        let s = spectrum(5, 16);
        let ch = TwirledChannel::from_spectrum(&s, t, 2).unwrap();
        let one = DenseOperator::identity(16);
        assert!((loschmidt_twirled_closed(&ch, &one).unwrap() - 1.0).abs() < 1e-10);
        let u = unitary_from_spectrum(&s, t).unwrap();
        assert!((loschmidt_exact(&u, &one).unwrap() - 1.0).abs() < 1e-12);
    }
}
