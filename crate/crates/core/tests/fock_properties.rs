mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use sqzmem::fock::entanglement::log_negativity;
use sqzmem::fock::{
    add_vacuum_units_to_dim, entanglement_potential, fidelity, make_squeezed_thermal, min_max_variance, quad_variance,
    quadrature_pdf, split_on_beamsplitter, DensityMatrix, GaussianStateOracle, LogBase, SqueezedThermalParams,
};

fn params() -> impl Strategy<Value = SqueezedThermalParams> {
    (0.0..0.6f64, 0.0..0.5f64, 0.0..PI).prop_map(|(r, nbar, phase)| SqueezedThermalParams { r, nbar, phase })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn squeezed_thermal_states_are_physical(p in params()) {
        let rho = make_squeezed_thermal(&p, 40).unwrap();
        common::assert_physical(&rho);
        rho.rotated(1.3).validate().unwrap();
    }

    #[test]
    fn variances_match_the_gaussian_oracle(p in params(), theta in 0.0..PI) {
        // r = 0.6, nbar = 0.5 needs about 50 levels for 1e-5.
        let rho = make_squeezed_thermal(&p, 60).unwrap();
        let oracle = GaussianStateOracle::squeezed_thermal(&p);
        prop_assert!((quad_variance(&rho, theta) - oracle.variance_snl(theta)).abs() < 1e-5);
    }

    #[test]
    fn quadrature_density_matches_the_gaussian_oracle(p in params(), theta in 0.0..PI) {
        let rho = make_squeezed_thermal(&p, 40).unwrap();
        let oracle = GaussianStateOracle::squeezed_thermal(&p);
        let grid: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
        let pdf = quadrature_pdf(&rho, theta, &grid).unwrap();
        for (x, v) in grid.iter().zip(pdf) {
            prop_assert!((v - oracle.quadrature_pdf(theta, *x)).abs() < 1e-5);
        }
    }

    #[test]
    fn variance_is_phase_covariant(p in params(), theta in 0.0..PI, delta in -PI..PI) {
        let rho = make_squeezed_thermal(&p, 30).unwrap();
        let turned = rho.rotated(delta);
        prop_assert!((quad_variance(&rho, theta) - quad_variance(&turned, theta + delta)).abs() < 1e-9);
    }

    #[test]
    fn uncertainty_product_bound(p in params()) {
        let e = min_max_variance(&make_squeezed_thermal(&p, 30).unwrap());
        prop_assert!(e.vmin * e.vmax >= 1.0 - 1e-6);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in params(), b in params()) {
        let ra = make_squeezed_thermal(&a, 30).unwrap();
        let rb = make_squeezed_thermal(&b, 30).unwrap();
        let f_ab = fidelity(&ra, &rb).unwrap();
        prop_assert!((0.0..=1.0).contains(&f_ab));
        prop_assert!((f_ab - fidelity(&rb, &ra).unwrap()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn log_negativity_ignores_local_rotations(r in 0.05..0.3f64, phase in 0.0..PI, a in -PI..PI, b in -PI..PI) {
        let p = SqueezedThermalParams { r, nbar: 0.05, phase };
        let rho = make_squeezed_thermal(&p, 14).unwrap();
        let split = split_on_beamsplitter(&rho).unwrap();
        let base = log_negativity(&split, LogBase::E);
        prop_assert!((log_negativity(&split.locally_rotated(a, b), LogBase::E) - base).abs() < 1e-9);
    }
}

#[test]
fn fidelity_decreases_with_added_noise() {
    let rho = common::input_fit(20);
    let big = rho.embed(32).unwrap();
    let f: Vec<f64> = [0.0, 1.0, 2.0, 3.0]
        .iter()
        .map(|&u| fidelity(&big, &add_vacuum_units_to_dim(&rho, u, 32).unwrap()).unwrap())
        .collect();
    assert!((f[0] - 1.0).abs() < 1e-9);
    assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
}

#[test]
fn entanglement_potential_is_zero_for_classical_states() {
    for rho in [DensityMatrix::vacuum(12), DensityMatrix::thermal(0.3, 12).unwrap()] {
        assert!(entanglement_potential(&rho, LogBase::Two).unwrap() < 1e-6);
    }
}
