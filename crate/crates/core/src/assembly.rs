//! Global assembly of the rotor equations of motion
//! `M q̈ + (C + Ω G) q̇ + (K + N K_g) q = F`.

use nalgebra::DMatrix;

use crate::element::{bearing_matrices, disk_matrices, shaft_element_matrices};
use crate::error::{Result, RotorError};
use crate::model::{validate_model, Direction, DofIndex, RotorModel, ThermalLoad, ThermalMode};
use crate::num::Real;

pub const DOF_PER_NODE: usize = 4;

/// Correspondence between model coordinates and columns of the constrained system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    node_count: usize,
    /// Indexed by `node * 4 + direction offset`.
    to_column: Vec<Option<usize>>,
    columns: Vec<DofIndex>,
}

impl DofMap {
    fn new(node_count: usize, constraints: &[DofIndex]) -> Self {
        let mut to_column = vec![None; node_count * DOF_PER_NODE];
        let mut columns = Vec::new();
        for node in 0..node_count {
            for dir in Direction::ALL {
                let dof = DofIndex::new(node, dir);
                if !constraints.contains(&dof) {
                    to_column[node * DOF_PER_NODE + dir.offset()] = Some(columns.len());
                    columns.push(dof);
                }
            }
        }
        Self { node_count, to_column, columns }
    }

    /// Column of `dof` in the constrained system, `None` if it is constrained
    /// or outside the model.
    pub fn column(&self, dof: DofIndex) -> Option<usize> {
        if dof.node >= self.node_count {
            return None;
        }
        self.to_column[dof.node * DOF_PER_NODE + dof.direction.offset()]
    }

    pub fn require(&self, dof: DofIndex) -> Result<usize> {
        self.column(dof).ok_or_else(|| RotorError::InactiveDof(dof.to_string()))
    }

    pub fn dof(&self, column: usize) -> DofIndex {
        self.columns[column]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }
}

/// Constrained global matrices of a rotor at one spin speed.
///
/// `m_global`, `k_elastic` and `k_geo_unit_global` are symmetric (stiffness
/// only when the bearings are), `g_unit_global` is skew-symmetric.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T: Real> {
    pub n: usize,
    pub dof_map: DofMap,
    pub m_global: DMatrix<T>,
    pub c_damp: DMatrix<T>,
    pub g_unit_global: DMatrix<T>,
    pub k_elastic: DMatrix<T>,
    pub k_geo_unit_global: DMatrix<T>,
    /// Signed axial force, tension positive (N).
    pub axial_force: T,
    /// rad/s
    pub spin_speed: T,
    /// Lumped translational mass at each node (half of each adjoining
    /// segment plus disks), used to weight whirl orbits.
    pub node_mass: Vec<T>,
}

impl<T: Real> AssembledSystem<T> {
    /// Damping-side matrix `C + Ω G`, non-symmetric whenever Ω ≠ 0.
    pub fn c_total(&self) -> DMatrix<T> {
        &self.c_damp + &self.g_unit_global * self.spin_speed
    }

    /// Stiffness including stress stiffening, `K + N K_g`.
    pub fn k_eff(&self) -> DMatrix<T> {
        &self.k_elastic + &self.k_geo_unit_global * self.axial_force
    }

    pub fn with_spin_speed(&self, spin_speed: T) -> Self {
        Self { spin_speed, ..self.clone() }
    }

    pub fn with_axial_force(&self, axial_force: T) -> Self {
        Self { axial_force, ..self.clone() }
    }
}

/// Axial force carried by the whole shaft under `load`.
///
/// For axially fixed ends the segments act as springs in series, so the force
/// is `−ΔT Σ αᵢLᵢ / Σ Lᵢ/(EᵢAᵢ)`, which reduces to `−E A α ΔT` for a uniform
/// shaft.
pub fn shaft_axial_force<T: Real>(model: &RotorModel<T>, load: &ThermalLoad<T>) -> T {
    match load.mode {
        ThermalMode::PrescribedForce => load.prescribed_force,
        ThermalMode::FullyConstrainedAxial => {
            let mut free_expansion = T::zero();
            let mut compliance = T::zero();
            for s in &model.segments {
                let mat = &model.materials[s.material];
                let len = model.nodes[s.end] - model.nodes[s.start];
                free_expansion += mat.thermal_expansion * len;
                compliance += len / (mat.youngs_modulus * s.area());
            }
            -load.delta_t * free_expansion / compliance
        }
    }
}

/// Assembles and constrains the global system of `model` at `spin_speed` (rad/s).
pub fn assemble<T: Real>(model: &RotorModel<T>, spin_speed: T) -> Result<AssembledSystem<T>> {
    let report = validate_model(model);
    if !report.is_valid() {
        return Err(RotorError::InvalidModel(report));
    }
    let nn = model.nodes.len();
    let full = nn * DOF_PER_NODE;
    let mut m = DMatrix::<T>::zeros(full, full);
    let mut c = DMatrix::<T>::zeros(full, full);
    let mut g = DMatrix::<T>::zeros(full, full);
    let mut k = DMatrix::<T>::zeros(full, full);
    let mut kg = DMatrix::<T>::zeros(full, full);
    let mut node_mass = vec![T::zero(); nn];

    // Fixed element order keeps the scatter-add bit-reproducible.
    for s in &model.segments {
        let len = model.nodes[s.end] - model.nodes[s.start];
        let mat = &model.materials[s.material];
        let e = shaft_element_matrices(len, s.outer_diameter, s.inner_diameter, mat)?;
        let half_mass = mat.density * s.area() * len * T::lit(0.5);
        node_mass[s.start] += half_mass;
        node_mass[s.end] += half_mass;
        let map: [usize; 8] = std::array::from_fn(|i| {
            let node = if i < 4 { s.start } else { s.end };
            node * DOF_PER_NODE + i % 4
        });
        for (a, &ga) in map.iter().enumerate() {
            for (b, &gb) in map.iter().enumerate() {
                m[(ga, gb)] += e.m[(a, b)];
                g[(ga, gb)] += e.g_unit[(a, b)];
                k[(ga, gb)] += e.k[(a, b)];
                kg[(ga, gb)] += e.k_geo_unit[(a, b)];
            }
        }
    }
    for d in &model.disks {
        let (dm, dg) = disk_matrices(d)?;
        node_mass[d.node] += d.mass;
        let base = d.node * DOF_PER_NODE;
        for a in 0..4 {
            for b in 0..4 {
                m[(base + a, base + b)] += dm[(a, b)];
                g[(base + a, base + b)] += dg[(a, b)];
            }
        }
    }
    for b in &model.bearings {
        let (bk, bc) = bearing_matrices(b);
        let base = b.node * DOF_PER_NODE;
        for r in 0..4 {
            for s in 0..4 {
                k[(base + r, base + s)] += bk[(r, s)];
                c[(base + r, base + s)] += bc[(r, s)];
            }
        }
    }

    let dof_map = DofMap::new(nn, &model.constraints);
    if dof_map.is_empty() {
        return Err(RotorError::NoActiveDofs);
    }
    let keep: Vec<usize> = (0..dof_map.len())
        .map(|col| {
            let d = dof_map.dof(col);
            d.node * DOF_PER_NODE + d.direction.offset()
        })
        .collect();
    let reduce = |a: &DMatrix<T>| DMatrix::from_fn(keep.len(), keep.len(), |i, j| a[(keep[i], keep[j])]);

    let axial_force = model.thermal.as_ref().map_or(T::zero(), |t| shaft_axial_force(model, t));

    Ok(AssembledSystem {
        n: keep.len(),
        m_global: reduce(&m),
        c_damp: reduce(&c),
        g_unit_global: reduce(&g),
        k_elastic: reduce(&k),
        k_geo_unit_global: reduce(&kg),
        dof_map,
        axial_force,
        spin_speed,
        node_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bearing, Disk, MaterialSpec};

    fn overhung() -> RotorModel<f64> {
        let mut m = RotorModel::uniform_shaft(0.5, 0.012, MaterialSpec::default(), 5);
        m.bearings.push(Bearing::isotropic(0, 2e5, 10.0));
        m.bearings.push(Bearing::isotropic(3, 2e5, 10.0));
        m.disks.push(Disk { node: 5, mass: 0.8, diametral_inertia: 3e-4, polar_inertia: 5e-4 });
        m
    }

    #[test]
    fn pinned_single_element_dof_count() {
        let mut m = RotorModel::uniform_shaft(0.1, 0.01, MaterialSpec::default(), 1);
        m.pin(0);
        m.pin(1);
        let sys = assemble(&m, 0.0).unwrap();
        assert_eq!(sys.n, 4);
        assert!(sys.dof_map.column(DofIndex::new(0, Direction::Y)).is_none());
        assert_eq!(sys.dof_map.column(DofIndex::new(0, Direction::ThetaY)), Some(0));
        assert_eq!(sys.dof_map.dof(3), DofIndex::new(1, Direction::ThetaZ));
    }

    #[test]
    fn free_element_has_four_rigid_modes() {
        let m = RotorModel::uniform_shaft(0.2, 0.01, MaterialSpec::default(), 1);
        let sys = assemble(&m, 0.0).unwrap();
        assert_eq!(sys.n, 8);
        // Generalized eigenvalues of (K, M) through the Cholesky factor of M.
        let l = sys.m_global.clone().cholesky().unwrap();
        let linv = l.l().try_inverse().unwrap();
        let a = &linv * &sys.k_elastic * linv.transpose();
        let eig = a.symmetric_eigen();
        let top = eig.eigenvalues.amax();
        let zeros = eig.eigenvalues.iter().filter(|v| v.abs() <= 1e-10 * top).count();
        assert_eq!(zeros, 4);
    }

    #[test]
    fn global_symmetries() {
        let sys = assemble(&overhung(), 300.0).unwrap();
        assert_eq!(&sys.m_global, &sys.m_global.transpose());
        let k = &sys.k_elastic;
        assert!((k - k.transpose()).norm() <= 1e-12 * k.norm());
        let g = &sys.g_unit_global;
        assert!((g + g.transpose()).norm() <= 1e-12 * g.norm());
        let kg = &sys.k_geo_unit_global;
        assert!((kg - kg.transpose()).norm() <= 1e-12 * kg.norm());
        let ct = sys.c_total();
        assert!((&ct - ct.transpose()).norm() > 1e-3 * ct.norm());
        assert!(sys.m_global.clone().cholesky().is_some());
    }

    #[test]
    fn cross_coupled_bearing_kept_exactly() {
        let mut m = overhung();
        m.bearings[0].stiffness = [[1e6, 5e4], [-5e4, 1e6]];
        let sys = assemble(&m, 0.0).unwrap();
        let y = sys.dof_map.column(DofIndex::new(0, Direction::Y)).unwrap();
        let z = sys.dof_map.column(DofIndex::new(0, Direction::Z)).unwrap();
        let base = assemble(&overhung(), 0.0).unwrap();
        assert_eq!(sys.k_elastic[(y, z)] - base.k_elastic[(y, z)], 5e4);
        assert_eq!(sys.k_elastic[(z, y)] - base.k_elastic[(z, y)], -5e4);
    }

    #[test]
    fn all_constrained_is_an_error() {
        let mut m = RotorModel::uniform_shaft(0.1, 0.01, MaterialSpec::default(), 1);
        for node in 0..2 {
            for dir in Direction::ALL {
                m.constraints.push(DofIndex::new(node, dir));
            }
        }
        assert!(matches!(assemble(&m, 0.0), Err(RotorError::NoActiveDofs)));
    }

    #[test]
    fn invalid_model_is_rejected() {
        let mut m = overhung();
        m.segments[0].inner_diameter = 0.02;
        assert!(matches!(assemble(&m, 0.0), Err(RotorError::InvalidModel(_))));
    }

    #[test]
    fn thermal_axial_force_on_assembly() {
        let mut m = RotorModel::uniform_shaft(0.61, 0.01, MaterialSpec::default(), 4);
        m.thermal = Some(ThermalLoad::constrained(100.0));
        let sys = assemble(&m, 0.0).unwrap();
        assert!((sys.axial_force + 18_849.556).abs() < 1e-2);
        m.thermal = Some(ThermalLoad::prescribed(500.0));
        assert_eq!(assemble(&m, 0.0).unwrap().axial_force, 500.0);
        m.thermal = None;
        assert_eq!(assemble(&m, 0.0).unwrap().axial_force, 0.0);
    }

    #[test]
    fn stepped_shaft_series_force() {
        // Two halves with areas A and 2A: N = −E α ΔT · 2 / (1/A + 1/(2A)) = −(4/3) E A α ΔT.
        let mut m = RotorModel::uniform_shaft(0.2, 0.01, MaterialSpec::default(), 2);
        m.segments[1].outer_diameter = 0.01 * 2f64.sqrt();
        m.thermal = Some(ThermalLoad::constrained(10.0));
        let sys = assemble(&m, 0.0).unwrap();
        let a = crate::model::section_area(0.01, 0.0);
        let expected = -4.0 / 3.0 * 200e9 * a * 1.2e-5 * 10.0;
        assert!((sys.axial_force - expected).abs() <= 1e-9 * expected.abs());
    }

    #[test]
    fn node_mass_lumping() {
        let sys = assemble(&overhung(), 0.0).unwrap();
        let total: f64 = sys.node_mass.iter().sum();
        let shaft = 7850.0 * crate::model::section_area(0.012, 0.0) * 0.5;
        assert!((total - shaft - 0.8).abs() < 1e-12);
    }
}
