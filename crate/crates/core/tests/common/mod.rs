#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotorfe::*;

pub const STEEL_E: f64 = 200e9;
pub const STEEL_RHO: f64 = 7850.0;

/// Overhung-disk rotor: 10 mm × 610 mm shaft, bearings at 0.03 m and 0.43 m,
/// disk at the free end.
pub fn overhung_disk() -> RotorModel64 {
    let nodes = vec![0.0, 0.03, 0.08, 0.13, 0.18, 0.23, 0.28, 0.33, 0.38, 0.43, 0.49, 0.55, 0.61];
    let mut m = RotorModel::uniform_shaft(0.61, 0.01, MaterialSpec::default(), 1);
    m.segments = (0..nodes.len() - 1)
        .map(|i| Segment { start: i, end: i + 1, outer_diameter: 0.01, inner_diameter: 0.0, material: 0 })
        .collect();
    m.nodes = nodes;
    m.bearings.push(Bearing::isotropic(1, 1e6, 0.0));
    m.bearings.push(Bearing::isotropic(9, 1e6, 0.0));
    m.disks.push(Disk { node: 12, mass: 1.6, diametral_inertia: 6.5e-4, polar_inertia: 1.17e-3 });
    m
}

pub fn pinned_shaft(elements: usize) -> RotorModel64 {
    let mut m = RotorModel::uniform_shaft(0.61, 0.01, MaterialSpec::default(), elements);
    m.pin(0);
    m.pin(elements);
    m
}

/// Euler–Bernoulli first pinned-pinned frequency of the 10 mm × 610 mm shaft.
pub fn euler_bernoulli_first() -> f64 {
    let (l, d) = (0.61_f64, 0.01_f64);
    let area = std::f64::consts::PI * d * d / 4.0;
    let i = std::f64::consts::PI * d.powi(4) / 64.0;
    (std::f64::consts::PI / l).powi(2) * (STEEL_E * i / (STEEL_RHO * area)).sqrt()
}

pub fn euler_load() -> f64 {
    let (l, d) = (0.61_f64, 0.01_f64);
    let i = std::f64::consts::PI * d.powi(4) / 64.0;
    std::f64::consts::PI.powi(2) * STEEL_E * i / (l * l)
}

/// Single translational DOF: mass `mass` on a spring `k`, everything else fixed.
pub fn jeffcott(k: f64, mass: f64) -> RotorModel64 {
    let soft = MaterialSpec { youngs_modulus: 1e-3, density: 1e-6, thermal_expansion: 1e-6 };
    let mut m = RotorModel::uniform_shaft(1.0, 0.01, soft, 1);
    m.disks.push(Disk { node: 0, mass, diametral_inertia: 1e-6, polar_inertia: 1e-9 });
    m.bearings.push(Bearing::isotropic(0, k, 0.0));
    for dof in ["node:0:z", "node:0:ty", "node:0:tz", "node:1:y", "node:1:z", "node:1:ty", "node:1:tz"] {
        m.constraints.push(dof.parse().unwrap());
    }
    m
}

pub fn first_pair(sol: &ModalSolution64) -> (f64, f64) {
    let w: Vec<f64> = sol.active_modes().map(|m| m.omega).collect();
    (w[0], w[1])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let a = random_matrix(rng, n);
    &a * a.transpose() + DMatrix::identity(n, n) * shift
}

/// Random `(M, C + ΩG, K)` with symmetric positive definite M and K.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, damping: f64, spin: f64) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let m = random_spd(rng, n, 0.5);
    let k = random_spd(rng, n, 1.0) * 10.0;
    let d = random_matrix(rng, n);
    let c = &d * d.transpose() * damping;
    let e = random_matrix(rng, n);
    let g = (&e - e.transpose()) * 0.5;
    (m, c + g * spin, k)
}

pub fn max_abs(a: &DMatrix<Complex64>) -> f64 {
    a.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
