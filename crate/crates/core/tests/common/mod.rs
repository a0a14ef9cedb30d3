#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqzmem::fock::{fit_squeezed_thermal, make_squeezed_thermal, DensityMatrix};
use sqzmem::timedomain::{QuadratureRecord, QuadratureSampler};

/// Records at uniformly random phases, drawn straight from the state.
pub fn draw_records(rho: &DensityMatrix, n: usize, seed: u64) -> Vec<QuadratureRecord> {
    let sampler = QuadratureSampler::new(rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let theta = rng.random::<f64>() * PI;
            QuadratureRecord::new(theta, sampler.sample(theta, rng.random(), rng.random()))
        })
        .collect()
}

pub fn input_fit(dim: usize) -> DensityMatrix {
    make_squeezed_thermal(&fit_squeezed_thermal(0.65, 3.45, 0.0).unwrap(), dim).unwrap()
}

pub fn assert_physical(rho: &DensityMatrix) {
    assert!(rho.hermiticity_error() < 1e-12, "hermiticity {}", rho.hermiticity_error());
    assert!((rho.trace() - 1.0).abs() < 1e-9, "trace {}", rho.trace());
    assert!(rho.min_eigenvalue() > -1e-10, "min eigenvalue {}", rho.min_eigenvalue());
}
