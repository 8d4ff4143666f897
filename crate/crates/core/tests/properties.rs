//! Property tests over randomized inputs: structural invariants that should
//! hold for every spin, axis, state, and seed.

use proptest::prelude::*;

use spinfisher::dynamics::evolve_oat;
use spinfisher::interferometer::{likelihood_table, uniform_grid};
use spinfisher::io;
use spinfisher::rotation::rotate;
use spinfisher::spinspace::{
    angular_momentum, coherent_spin_state, random_separable_density, Direction, Spin,
};
use spinfisher::witness::{chi2, qfi};
use spinfisher::{CVector, C64};

fn arb_direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(z, phi)| Direction::from_polar(z.acos(), phi))
}

fn arb_state(two_j: u32) -> impl Strategy<Value = spinfisher::DickeState> {
    let dim = two_j as usize + 1;
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(move |pairs| {
        let mut v = CVector::from_iterator(dim, pairs.iter().map(|&(re, im)| C64::new(re, im)));
        let norm = v.norm().max(1e-9);
        v /= C64::new(norm, 0.0);
        spinfisher::DickeState::new(Spin::from_two_j(two_j), v.iter().cloned().collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coherent_states_are_maximal_eigenvectors(two_j in 1u32..20, axis in arb_direction()) {
        let spin = Spin::from_two_j(two_j);
        let css = coherent_spin_state(spin, axis);
        let op = angular_momentum(spin, axis);
        let residual = op.matrix() * css.amplitudes()
            - css.amplitudes() * C64::new(spin.j(), 0.0);
        prop_assert!(residual.norm() < 1e-10);
    }

    #[test]
    fn rotations_unitary_and_additive(
        state in arb_state(9),
        axis in arb_direction(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let once = rotate(&state, axis, a + b);
        let twice = rotate(&rotate(&state, axis, b), axis, a);
        prop_assert!((once.amplitudes() - twice.amplitudes()).norm() < 1e-10);
        prop_assert!((once.amplitudes().norm() - 1.0).abs() < 1e-12);
        let back = rotate(&rotate(&state, axis, a), axis, -a);
        prop_assert!((back.amplitudes() - state.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn twisting_only_moves_phases(state in arb_state(11), tau in -4.0f64..4.0) {
        let out = evolve_oat(&state, tau);
        for i in 0..state.spin().dim() {
            prop_assert!((out.amplitude(i).norm() - state.amplitude(i).norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn state_serialization_round_trips(state in arb_state(7)) {
        let json = io::state_to_json(&state);
        let back = io::state_from_json(json.as_bytes()).unwrap();
        prop_assert!((back.amplitudes() - state.amplitudes()).norm() < 1e-14);
    }

    #[test]
    fn separable_inputs_are_never_certified(
        n in prop::sample::select(vec![2u32, 3, 5, 8]),
        k in 1u32..6,
        seed in 0u64..5000,
        axis in arb_direction(),
    ) {
        let rho = random_separable_density(n, k, seed).unwrap();
        prop_assert!(qfi(&rho, axis) <= f64::from(n) + 1e-8);
        prop_assert!(chi2(&rho, axis) >= 1.0 - 1e-9);
    }

    #[test]
    fn density_serialization_round_trips(n in 1u32..7, k in 1u32..4, seed in 0u64..1000) {
        let rho = random_separable_density(n, k, seed).unwrap();
        let json = io::density_to_json(&rho);
        let back = io::density_from_json(json.as_bytes()).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn likelihood_tables_always_normalize(
        n in 1u32..12,
        tau in 0.0f64..1.6,
        len in 16usize..80,
    ) {
        let spin = Spin::from_particles(n).unwrap();
        let table = likelihood_table(spin, tau, &uniform_grid(len)).unwrap();
        prop_assert!(table.max_normalization_defect() < 1e-10);
    }
}
