//! Receptance synthesis from bi-orthogonal modal data, plus direct inversion
//! of the dynamic stiffness as an independent reference.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::assembly::{AssembledSystem, DofMap};
use crate::error::{Result, RotorError};
use crate::linalg::ComplexLu;
use crate::modal::{ModalSolution, Mode};
use crate::model::{rad_s_to_hz, DofIndex};
use crate::num::{cabs, cplx, creal, Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrfMethod {
    /// Pole–residue sum over conjugate mode pairs.
    ModalSum,
    /// Real/imaginary decomposed form in terms of ω_r, ζ_r and the residue.
    RealForm,
    /// `[K − ω²M + iωC]⁻¹`, frequency by frequency.
    Direct,
}

impl FrfMethod {
    pub fn label(self) -> &'static str {
        match self {
            FrfMethod::ModalSum => "modal",
            FrfMethod::RealForm => "real13",
            FrfMethod::Direct => "direct",
        }
    }
}

impl fmt::Display for FrfMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Residue `rG_jk = φR_j · φL_k` of one mode; its conjugate belongs to `s_r*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueTerm<T: Real> {
    pub mode: usize,
    pub value: Complex<T>,
}

#[derive(Debug, Clone)]
pub struct FrfResult<T: Real> {
    /// rad/s, ascending
    pub omega: Vec<T>,
    /// Receptance, m/N (rad/N for rotations).
    pub h: Vec<Complex<T>>,
    pub response: Option<DofIndex>,
    pub excitation: Option<DofIndex>,
    pub method: FrfMethod,
}

impl<T: Real> FrfResult<T> {
    /// `max |self − other| / max |other|` over the shared grid.
    pub fn max_relative_deviation(&self, reference: &FrfResult<T>) -> T {
        let peak = reference.h.iter().fold(T::zero(), |a, z| a.max(cabs(*z)));
        let diff = self.h.iter().zip(&reference.h).fold(T::zero(), |a, (x, y)| a.max(cabs(*x - *y)));
        if peak > T::zero() {
            diff / peak
        } else {
            diff
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrfOptions {
    /// Also sum zero-frequency modes; they must then be normalizable.
    pub include_zero_modes: bool,
}

fn check_grid<T: Real>(omega: &[T]) -> Result<()> {
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(RotorError::InvalidArgument("frequency grid contains non-finite values".into()));
    }
    if omega.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(RotorError::InvalidArgument("frequency grid must be strictly ascending".into()));
    }
    Ok(())
}

fn synthesis_modes<'a, T: Real>(modal: &'a ModalSolution<T>, opts: FrfOptions) -> Result<Vec<&'a Mode<T>>> {
    if !modal.normalized {
        return Err(RotorError::NotNormalized);
    }
    let mut used = Vec::new();
    for (i, m) in modal.modes.iter().enumerate() {
        if m.zero_mode && !opts.include_zero_modes {
            continue;
        }
        if !m.normalized {
            return Err(RotorError::ZeroModeNotNormalized(i));
        }
        used.push(m);
    }
    Ok(used)
}

/// Residues of every stored mode for response column `j`, excitation column `k`.
pub fn residues<T: Real>(modal: &ModalSolution<T>, j: usize, k: usize) -> Vec<ResidueTerm<T>> {
    modal
        .modes
        .iter()
        .enumerate()
        .map(|(mode, m)| ResidueTerm { mode, value: m.right[j] * m.left[k] })
        .collect()
}

fn pole_hit<T: Real>(iw: Complex<T>, s: Complex<T>) -> bool {
    cabs(iw - s) <= T::machine_eps() * cabs(s)
}

/// `H_jk(ω) = Σ_r [ rG_jk/(iω − s_r) + rG*_jk/(iω − s_r*) ]` on columns of the constrained system.
pub fn receptance_modal_columns<T: Real>(
    modal: &ModalSolution<T>,
    j: usize,
    k: usize,
    omega: &[T],
    opts: FrfOptions,
) -> Result<FrfResult<T>> {
    check_grid(omega)?;
    let modes = synthesis_modes(modal, opts)?;
    let mut h = Vec::with_capacity(omega.len());
    for &w in omega {
        let iw = cplx(T::zero(), w);
        let mut acc = creal(T::zero());
        for m in &modes {
            let g = m.right[j] * m.left[k];
            if pole_hit(iw, m.s) || (!m.is_real() && pole_hit(iw, m.s.conj())) {
                return Err(RotorError::SingularDynamicStiffness { frequency_hz: rad_s_to_hz(w).to_f64_lossy() });
            }
            acc += g / (iw - m.s);
            if !m.is_real() {
                acc += g.conj() / (iw - m.s.conj());
            }
        }
        h.push(acc);
    }
    Ok(FrfResult { omega: omega.to_vec(), h, response: None, excitation: None, method: FrfMethod::ModalSum })
}

/// The decomposed real form
/// `Σ_r [2ω_r(ζ_r Re G − √(1−ζ_r²) Im G) + i·2ω_r Re G] / (ω_r² − ω² + 2iωω_rζ_r)`,
/// evaluated exactly as written. Its imaginary numerator carries `ω_r` where
/// the pole–residue sum produces the excitation frequency `ω`, so it departs
/// from [`receptance_modal_columns`] away from resonance; callers report the
/// deviation rather than rely on equality. Real poles have no conjugate
/// partner and contribute their single pole term.
pub fn receptance_real_form_columns<T: Real>(
    modal: &ModalSolution<T>,
    j: usize,
    k: usize,
    omega: &[T],
    opts: FrfOptions,
) -> Result<FrfResult<T>> {
    check_grid(omega)?;
    let modes = synthesis_modes(modal, opts)?;
    let two = T::lit(2.0);
    let mut h = Vec::with_capacity(omega.len());
    for &w in omega {
        let mut acc = creal(T::zero());
        for m in &modes {
            let g = m.right[j] * m.left[k];
            if m.is_real() {
                let iw = cplx(T::zero(), w);
                if pole_hit(iw, m.s) {
                    return Err(RotorError::SingularDynamicStiffness { frequency_hz: rad_s_to_hz(w).to_f64_lossy() });
                }
                acc += g / (iw - m.s);
                continue;
            }
            let (wr, zr) = (m.omega, m.zeta);
            let root = (T::one() - zr * zr).max(T::zero()).sqrt();
            let num = cplx(two * wr * (zr * g.re - root * g.im), two * wr * g.re);
            let den = cplx(wr * wr - w * w, two * w * wr * zr);
            if cabs(den) == T::zero() {
                return Err(RotorError::SingularDynamicStiffness { frequency_hz: rad_s_to_hz(w).to_f64_lossy() });
            }
            acc += num / den;
        }
        h.push(acc);
    }
    Ok(FrfResult { omega: omega.to_vec(), h, response: None, excitation: None, method: FrfMethod::RealForm })
}

/// Entry `(j, k)` of `[K_eff − ω²M + iωC_total]⁻¹` on columns of the constrained system.
pub fn receptance_direct_matrices<T: Real>(
    m: &DMatrix<T>,
    c: &DMatrix<T>,
    k_eff: &DMatrix<T>,
    j: usize,
    k: usize,
    omega: &[T],
) -> Result<FrfResult<T>> {
    check_grid(omega)?;
    let n = m.nrows();
    let rhs = DVector::from_fn(n, |i, _| creal(if i == k { T::one() } else { T::zero() }));
    let cut = T::lit(10.0) * T::machine_eps();
    let mut h = Vec::with_capacity(omega.len());
    for &w in omega {
        let z = DMatrix::from_fn(n, n, |r, s| cplx(k_eff[(r, s)] - w * w * m[(r, s)], w * c[(r, s)]));
        // Pivots are judged against the size of the terms that were summed,
        // so cancellation at a pole is detected even for a 1×1 system.
        let scale = (0..n)
            .flat_map(|r| (0..n).map(move |s| (r, s)))
            .fold(T::zero(), |a, (r, s)| {
                a.max(k_eff[(r, s)].abs() + w * w * m[(r, s)].abs() + w.abs() * c[(r, s)].abs())
            });
        let lu = ComplexLu::new(z);
        let singular = || RotorError::SingularDynamicStiffness { frequency_hz: rad_s_to_hz(w).to_f64_lossy() };
        if lu.min_pivot <= cut * scale {
            return Err(singular());
        }
        let x = lu.solve(&rhs).ok_or_else(singular)?;
        h.push(x[j]);
    }
    Ok(FrfResult { omega: omega.to_vec(), h, response: None, excitation: None, method: FrfMethod::Direct })
}

fn columns(map: &DofMap, j: DofIndex, k: DofIndex) -> Result<(usize, usize)> {
    Ok((map.require(j)?, map.require(k)?))
}

/// Cross receptance between response `j` and excitation `k` by modal summation.
pub fn receptance_modal<T: Real>(
    modal: &ModalSolution<T>,
    dof_map: &DofMap,
    j: DofIndex,
    k: DofIndex,
    omega: &[T],
    opts: FrfOptions,
) -> Result<FrfResult<T>> {
    let (cj, ck) = columns(dof_map, j, k)?;
    let mut r = receptance_modal_columns(modal, cj, ck, omega, opts)?;
    r.response = Some(j);
    r.excitation = Some(k);
    Ok(r)
}

pub fn receptance_real_form<T: Real>(
    modal: &ModalSolution<T>,
    dof_map: &DofMap,
    j: DofIndex,
    k: DofIndex,
    omega: &[T],
    opts: FrfOptions,
) -> Result<FrfResult<T>> {
    let (cj, ck) = columns(dof_map, j, k)?;
    let mut r = receptance_real_form_columns(modal, cj, ck, omega, opts)?;
    r.response = Some(j);
    r.excitation = Some(k);
    Ok(r)
}

pub fn receptance_direct<T: Real>(
    system: &AssembledSystem<T>,
    j: DofIndex,
    k: DofIndex,
    omega: &[T],
) -> Result<FrfResult<T>> {
    let (cj, ck) = columns(&system.dof_map, j, k)?;
    let mut r = receptance_direct_matrices(&system.m_global, &system.c_total(), &system.k_eff(), cj, ck, omega)?;
    r.response = Some(j);
    r.excitation = Some(k);
    Ok(r)
}
