use proptest::prelude::*;
use qbm::bath::{discretize_bath, BathGrid};
use qbm::dynamics::{symplectic_defect, QuadraticHamiltonian};
use qbm::imaginary_time::{effective_action_fourier, PathGrid};
use qbm::oscillator::{second_moments, susceptibility, OscillatorSpec};
use qbm::response::{current_noise, Admittance};
use qbm::{DampingModel, ThermalParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_nonnegative_and_shift_invariant(
        samples in prop::collection::vec(-2.0f64..2.0, 16),
        shift in -5.0f64..5.0,
        gamma in 0.0f64..3.0,
        cutoff in 0.5f64..50.0,
        temp in 0.05f64..5.0,
    ) {
        let th = ThermalParams::new(temp).unwrap();
        let damp = DampingModel::drude(gamma, cutoff).unwrap();
        let path = PathGrid::new(th.hbar_beta(), samples.clone()).unwrap();
        let moved = PathGrid::new(th.hbar_beta(), samples.iter().map(|q| q + shift).collect()).unwrap();
        let a = effective_action_fourier(&path, &damp, 1.0);
        let b = effective_action_fourier(&moved, &damp, 1.0);
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn heisenberg_bound_in_equilibrium(
        gamma in 0.0f64..3.0,
        cutoff in 1.0f64..100.0,
        temp in 0.01f64..20.0,
        omega0 in 0.3f64..3.0,
    ) {
        let spec = OscillatorSpec::new(1.0, omega0).unwrap();
        let m = second_moments(&spec, &DampingModel::drude(gamma, cutoff).unwrap(), &ThermalParams::new(temp).unwrap(), None).unwrap();
        prop_assert!(m.satisfies_uncertainty(1.0, 1e-9), "{:?}", m);
    }

    #[test]
    fn noise_decomposition_is_exact(omega in -50.0f64..50.0, temp in 0.01f64..100.0, r in 0.1f64..10.0) {
        let adm = Admittance::resistor(r).unwrap();
        let n = current_noise(&adm, &ThermalParams::new(temp).unwrap(), omega);
        prop_assert!(n.total > 0.0);
        prop_assert!((n.total - n.decomposed_total()).abs() <= 1e-12 * n.total);
    }

    #[test]
    fn susceptibility_is_causal(omega in 0.01f64..20.0, gamma in 0.01f64..3.0, cutoff in 0.5f64..50.0) {
        let spec = OscillatorSpec::new(1.0, 1.0).unwrap();
        let d = DampingModel::drude(gamma, cutoff).unwrap();
        let pos = susceptibility(&spec, &d, omega);
        let neg = susceptibility(&spec, &d, -omega);
        prop_assert!(pos.im > 0.0);
        prop_assert!((pos - neg.conj()).norm() <= 1e-12 * pos.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn propagator_is_symplectic(gamma in 0.05f64..1.5, cutoff in 1.0f64..10.0, t in 0.0f64..30.0) {
        let bath = discretize_bath(&DampingModel::drude(gamma, cutoff).unwrap(), 30, BathGrid::Tangent, 1.0).unwrap();
        let h = QuadraticHamiltonian::new(&OscillatorSpec::new(1.0, 1.0).unwrap(), Some(&bath));
        prop_assert!(symplectic_defect(&h.propagator(t).unwrap()) < 1e-10);
    }
}
