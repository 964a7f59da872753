//! Element matrices for the rotating shaft, rigid disks and linear bearings.
//!
//! Each node carries four lateral DOFs ordered `(y, z, θy, θz)`. Bending in
//! the x–y plane uses `θz = dv/dx`; bending in the x–z plane uses
//! `θy = −dw/dx`, so both planes share one right-handed rotation convention.

use nalgebra::{SMatrix, SVector};

use crate::error::{Result, RotorError};
use crate::model::{section_area, section_second_moment, Bearing, Disk, MaterialSpec, ThermalLoad, ThermalMode};
use crate::num::Real;

pub type Matrix8<T> = SMatrix<T, 8, 8>;
pub type Matrix4<T> = SMatrix<T, 4, 4>;
type Row8<T> = SVector<T, 8>;

/// Matrices of one two-node shaft element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices<T: Real> {
    /// Consistent mass, translational and rotary inertia.
    pub m: Matrix8<T>,
    /// Gyroscopic matrix per unit spin speed; element gyroscopic = Ω·g_unit.
    pub g_unit: Matrix8<T>,
    /// Elastic bending stiffness.
    pub k: Matrix8<T>,
    /// Geometric stiffness per unit axial force (tension positive).
    pub k_geo_unit: Matrix8<T>,
}

/// Gauss–Legendre rule with four points on `[0, 1]`; exact for degree ≤ 7.
fn gauss4<T: Real>() -> [(T, T); 4] {
    let a = 0.339_981_043_584_856_3;
    let b = 0.861_136_311_594_052_6;
    let wa = 0.652_145_154_862_546_1;
    let wb = 0.347_854_845_137_453_9;
    [(-b, wb), (-a, wa), (a, wa), (b, wb)].map(|(x, w)| (T::lit(0.5 * (x + 1.0)), T::lit(0.5 * w)))
}

/// Hermite cubic shape functions and their first and second x-derivatives at `xi`.
fn hermite<T: Real>(xi: T, len: T) -> [[T; 4]; 3] {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let six = T::lit(6.0);
    let x2 = xi * xi;
    let x3 = x2 * xi;
    let value = [
        one - three * x2 + two * x3,
        len * (xi - two * x2 + x3),
        three * x2 - two * x3,
        len * (x3 - x2),
    ];
    let slope = [
        six * (x2 - xi) / len,
        one - four * xi + three * x2,
        six * (xi - x2) / len,
        three * x2 - two * xi,
    ];
    let l2 = len * len;
    let curvature = [
        (T::lit(12.0) * xi - six) / l2,
        (six * xi - four) / len,
        (six - T::lit(12.0) * xi) / l2,
        (six * xi - two) / len,
    ];
    [value, slope, curvature]
}

/// Interpolation rows for `v` (y-plane) and `w` (z-plane) fields from a
/// four-term Hermite basis.
fn plane_rows<T: Real>(h: &[T; 4]) -> (Row8<T>, Row8<T>) {
    let z = T::zero();
    let v = Row8::from([h[0], z, z, h[1], h[2], z, z, h[3]]);
    let w = Row8::from([z, h[0], -h[1], z, z, h[2], -h[3], z]);
    (v, w)
}

/// Rayleigh-beam rotating shaft element with cubic Hermite interpolation in
/// both lateral planes.
pub fn shaft_element_matrices<T: Real>(
    length: T,
    outer_diameter: T,
    inner_diameter: T,
    material: &MaterialSpec<T>,
) -> Result<ElementMatrices<T>> {
    if !(length.is_finite() && length > T::zero()) {
        return Err(RotorError::InvalidElement(format!("element length must be positive, got {length}")));
    }
    if !(inner_diameter >= T::zero() && outer_diameter > inner_diameter && outer_diameter.is_finite()) {
        return Err(RotorError::InvalidElement(format!(
            "degenerate section: outer {outer_diameter}, inner {inner_diameter}"
        )));
    }
    let area = section_area(outer_diameter, inner_diameter);
    let inertia = section_second_moment(outer_diameter, inner_diameter);
    let rho_a = material.density * area;
    let rho_i = material.density * inertia;
    let ei = material.youngs_modulus * inertia;
    // Polar second moment is 2I for a circular section.
    let rho_j = T::lit(2.0) * rho_i;

    let mut m = Matrix8::zeros();
    let mut g = Matrix8::zeros();
    let mut k = Matrix8::zeros();
    let mut kg = Matrix8::zeros();
    for (xi, weight) in gauss4::<T>() {
        let w = weight * length;
        let [val, slope, curv] = hermite(xi, length);
        let (nv, nw) = plane_rows(&val);
        let (dv, dw) = plane_rows(&slope);
        let (cv, cw) = plane_rows(&curv);
        let theta_z = dv;
        let theta_y = -dw;

        m += (nv * nv.transpose() + nw * nw.transpose()) * (rho_a * w)
            + (theta_y * theta_y.transpose() + theta_z * theta_z.transpose()) * (rho_i * w);
        g += (theta_y * theta_z.transpose() - theta_z * theta_y.transpose()) * (rho_j * w);
        k += (cv * cv.transpose() + cw * cw.transpose()) * (ei * w);
        kg += (dv * dv.transpose() + dw * dw.transpose()) * w;
    }
    Ok(ElementMatrices { m, g_unit: g, k, k_geo_unit: kg })
}

/// Mass block `diag(m, m, I_d, I_d)` and gyroscopic-per-unit-speed block of a
/// rigid disk, both over `(y, z, θy, θz)`.
pub fn disk_matrices<T: Real>(disk: &Disk<T>) -> Result<(Matrix4<T>, Matrix4<T>)> {
    let ok = disk.mass > T::zero()
        && disk.diametral_inertia > T::zero()
        && disk.polar_inertia > T::zero()
        && disk.polar_inertia <= T::lit(2.0) * disk.diametral_inertia;
    if !ok {
        return Err(RotorError::InvalidElement(format!(
            "non-physical disk: m = {}, I_d = {}, I_p = {}",
            disk.mass, disk.diametral_inertia, disk.polar_inertia
        )));
    }
    let mut mass = Matrix4::zeros();
    mass[(0, 0)] = disk.mass;
    mass[(1, 1)] = disk.mass;
    mass[(2, 2)] = disk.diametral_inertia;
    mass[(3, 3)] = disk.diametral_inertia;

    // Angular momentum I_p·Ω along the tilted spin axis gives
    // I_d θ̈y + I_p Ω θ̇z = M_y and I_d θ̈z − I_p Ω θ̇y = M_z.
    let mut gyro = Matrix4::zeros();
    gyro[(2, 3)] = disk.polar_inertia;
    gyro[(3, 2)] = -disk.polar_inertia;
    Ok((mass, gyro))
}

/// Stiffness and damping blocks of a bearing over `(y, z, θy, θz)`.
pub fn bearing_matrices<T: Real>(bearing: &Bearing<T>) -> (Matrix4<T>, Matrix4<T>) {
    let mut k = Matrix4::zeros();
    let mut c = Matrix4::zeros();
    for r in 0..2 {
        for s in 0..2 {
            k[(r, s)] = bearing.stiffness[r][s];
            c[(r, s)] = bearing.damping[r][s];
        }
    }
    (k, c)
}

/// Axial force in a single uniform segment produced by a thermal load.
///
/// With both ends axially fixed, a temperature rise gives `N = −E·A·α·ΔT`
/// (compression). In prescribed-force mode the given force is returned.
pub fn thermal_axial_force<T: Real>(material: &MaterialSpec<T>, area: T, load: &ThermalLoad<T>) -> T {
    match load.mode {
        ThermalMode::FullyConstrainedAxial => {
            -material.youngs_modulus * area * material.thermal_expansion * load.delta_t
        }
        ThermalMode::PrescribedForce => load.prescribed_force,
    }
}
