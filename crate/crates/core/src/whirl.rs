//! Whirl direction of complex mode shapes and the modal assurance criterion.

use std::fmt;

use nalgebra::DVector;

use crate::assembly::DofMap;
use crate::error::{Result, RotorError};
use crate::linalg::dot_h;
use crate::model::{Direction, DofIndex};
use crate::num::{Complex, Real};

/// Relative size of the weighted orbit indicator below which a mode is planar.
pub const PLANAR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Whirl {
    /// Orbit turns with the spin (about +x).
    Forward,
    /// Orbit turns against the spin.
    Backward,
    PlanarMixed,
}

impl Whirl {
    pub fn label(self) -> &'static str {
        match self {
            Whirl::Forward => "FW",
            Whirl::Backward => "BW",
            Whirl::PlanarMixed => "planar",
        }
    }
}

impl fmt::Display for Whirl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Orbit indicator `Im(ū_y · conj(ū_z))` of one node. Positive means the
/// orbit `(Re ū_y e^{iωt}, Re ū_z e^{iωt})` turns from +y toward +z.
#[inline]
pub fn orbit_indicator<T: Real>(uy: Complex<T>, uz: Complex<T>) -> T {
    (uy * uz.conj()).im
}

/// Classifies the whirl of a displacement vector by the weighted sum of
/// per-node orbit indicators. A constrained translation counts as zero
/// motion; at least one node must keep both `y` and `z`.
pub fn classify_whirl<T: Real>(shape: &DVector<Complex<T>>, dof_map: &DofMap, weights: &[T]) -> Result<Whirl> {
    if shape.len() != dof_map.len() {
        return Err(RotorError::InvalidArgument(format!(
            "mode shape has {} entries, DOF map has {}",
            shape.len(),
            dof_map.len()
        )));
    }
    if weights.len() != dof_map.node_count() {
        return Err(RotorError::InvalidArgument(format!(
            "{} node weights for {} nodes",
            weights.len(),
            dof_map.node_count()
        )));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut paired = false;
    let mut sum = T::zero();
    let mut scale = T::zero();
    for (node, &w) in weights.iter().enumerate() {
        let cy = dof_map.column(DofIndex::new(node, Direction::Y));
        let cz = dof_map.column(DofIndex::new(node, Direction::Z));
        paired |= cy.is_some() && cz.is_some();
        let uy = cy.map_or(zero, |c| shape[c]);
        let uz = cz.map_or(zero, |c| shape[c]);
        sum += w * orbit_indicator(uy, uz);
        scale += w * (uy.norm_sqr() + uz.norm_sqr()) * T::lit(0.5);
    }
    if !paired {
        return Err(RotorError::InvalidArgument("no node keeps both lateral translations".into()));
    }
    Ok(if sum.abs() <= T::lit(PLANAR_TOL) * scale {
        Whirl::PlanarMixed
    } else if sum > T::zero() {
        Whirl::Forward
    } else {
        Whirl::Backward
    })
}

/// Modal assurance criterion `|φ1ᴴφ2|² / ((φ1ᴴφ1)(φ2ᴴφ2))`.
pub fn mac<T: Real>(phi1: &DVector<Complex<T>>, phi2: &DVector<Complex<T>>) -> Result<T> {
    if phi1.len() != phi2.len() {
        return Err(RotorError::InvalidArgument("MAC of vectors with different lengths".into()));
    }
    let n1 = dot_h(phi1, phi1).re;
    let n2 = dot_h(phi2, phi2).re;
    if n1 == T::zero() || n2 == T::zero() {
        return Err(RotorError::InvalidArgument("MAC of a zero vector".into()));
    }
    Ok((dot_h(phi1, phi2).norm_sqr() / (n1 * n2)).min(T::one()))
}
