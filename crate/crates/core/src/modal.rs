//! Complex modal analysis of the non-symmetric rotor equations.
//!
//! The second-order system is written in the first-order form
//! `A u̇ + B u = {F; 0}` with `u = {q; q̇}`,
//! `A = [[C, M], [M, 0]]` and `B = [[K, 0], [0, −M]]`. Right state
//! eigenvectors solve `(sA + B)Ψ = 0`, left ones `(sAᵀ + Bᵀ)Φ = 0`; both have
//! the structure `{ψ; sψ}` so only displacement partitions are stored.

use nalgebra::{DMatrix, DVector};

use crate::assembly::AssembledSystem;
use crate::error::{Result, RotorError};
use crate::linalg::{
    cnorm, dot_t, fnorm, quadratic_roots, real_eigen, real_times_complex, ComplexLu,
};
use crate::num::{cabs, cexp, creal, Complex, Real};
use crate::whirl::{classify_whirl, Whirl};

/// Relative distance under which two eigenvalues are treated as the same
/// (or as conjugates): `|s − s'| ≤ 1e-6·max(1, |s|)`.
pub const PAIRING_TOL: f64 = 1e-6;

/// Eigenvalues with `|s| ≤ ZERO_MODE_TOL·max|s|` are rigid-body / zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-6;

/// Admissible relative residual of the internal state-structure check.
pub const STRUCTURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct StateSpacePair<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub n: usize,
    /// Spin speed the pair was linearized at (rad/s).
    pub spin_speed: T,
}

impl<T: Real> StateSpacePair<T> {
    /// Builds the pair directly from second-order matrices.
    pub fn from_matrices(m: &DMatrix<T>, c: &DMatrix<T>, k: &DMatrix<T>, spin_speed: T) -> Self {
        let n = m.nrows();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        let mut b = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, 0), (n, n)).copy_from(c);
        a.view_mut((0, n), (n, n)).copy_from(m);
        a.view_mut((n, 0), (n, n)).copy_from(m);
        b.view_mut((0, 0), (n, n)).copy_from(k);
        b.view_mut((n, n), (n, n)).copy_from(&(-m));
        Self { a, b, n, spin_speed }
    }

    pub fn mass(&self) -> DMatrix<T> {
        self.a.view((0, self.n), (self.n, self.n)).into_owned()
    }

    pub fn damping(&self) -> DMatrix<T> {
        self.a.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn stiffness(&self) -> DMatrix<T> {
        self.b.view((0, 0), (self.n, self.n)).into_owned()
    }

    /// Full state vector `{ψ; sψ}`.
    pub fn state_vector(&self, psi: &DVector<Complex<T>>, s: Complex<T>) -> DVector<Complex<T>> {
        let n = self.n;
        DVector::from_fn(2 * n, |i, _| if i < n { psi[i] } else { psi[i - n] * s })
    }
}

/// Places `C + Ω G` and `K + N K_g` into the first-order block layout.
pub fn linearize<T: Real>(system: &AssembledSystem<T>) -> StateSpacePair<T> {
    StateSpacePair::from_matrices(&system.m_global, &system.c_total(), &system.k_eff(), system.spin_speed)
}

#[derive(Debug, Clone)]
pub struct Mode<T: Real> {
    /// Eigenvalue with `Im(s) ≥ 0`; for complex values the conjugate is implied.
    pub s: Complex<T>,
    /// rad/s, `|s|`
    pub omega: T,
    pub zeta: T,
    /// Displacement partition of the right state eigenvector.
    pub right: DVector<Complex<T>>,
    /// Displacement partition of the left state eigenvector.
    pub left: DVector<Complex<T>>,
    pub whirl: Option<Whirl>,
    /// `|s|` below the zero-mode threshold.
    pub zero_mode: bool,
    /// Left vector scaled so that `Φᵀ A Ψ = 1`.
    pub normalized: bool,
}

impl<T: Real> Mode<T> {
    /// Real eigenvalue without a distinct conjugate partner.
    pub fn is_real(&self) -> bool {
        self.s.im == T::zero()
    }

    pub fn frequency_hz(&self) -> T {
        self.omega / T::two_pi()
    }
}

#[derive(Debug, Clone)]
pub struct ModalSolution<T: Real> {
    /// Sorted by ascending `|Im s|`, then ascending `Re s`.
    pub modes: Vec<Mode<T>>,
    pub n: usize,
    pub spin_speed: T,
    /// Every one of the 2n state eigenvalues.
    pub all_eigenvalues: Vec<Complex<T>>,
    pub normalized: bool,
}

impl<T: Real> ModalSolution<T> {
    /// Modes that take part in synthesis (non-zero, normalized).
    pub fn active_modes(&self) -> impl Iterator<Item = &Mode<T>> {
        self.modes.iter().filter(|m| !m.zero_mode)
    }
}

/// Natural frequency and damping ratio of a pole `s = −ζω ± iω√(1−ζ²)`.
pub fn extract_modal_params<T: Real>(s: Complex<T>) -> (T, T) {
    let omega = cabs(s);
    if omega == T::zero() {
        return (T::zero(), T::zero());
    }
    (omega, -s.re / omega)
}

/// Mass-scaled first-order matrix and the factors needed to undo the scaling.
struct ScaledState<T: Real> {
    s: DMatrix<T>,
    /// Velocity scale: the scaled state is `{D⁻¹q; D⁻¹q̇/ws}`.
    ws: T,
    d: DVector<T>,
    chol: nalgebra::Cholesky<T, nalgebra::Dyn>,
}

fn scaled_state<T: Real>(m: &DMatrix<T>, c: &DMatrix<T>, k: &DMatrix<T>) -> Result<ScaledState<T>> {
    let n = m.nrows();
    if (0..n).any(|i| !(m[(i, i)] > T::zero())) {
        return Err(RotorError::MassNotPositiveDefinite);
    }
    let d = DVector::from_fn(n, |i, _| T::one() / m[(i, i)].sqrt());
    let scale = |a: &DMatrix<T>| DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[i] * d[j]);
    let chol = scale(m).cholesky().ok_or(RotorError::MassNotPositiveDefinite)?;
    let mk = chol.solve(&scale(k));
    let mc = chol.solve(&scale(c));
    let kmax = mk.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let cmax = mc.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    // Velocity scaling keeps both halves of the state comparable.
    let ws = if kmax > T::zero() {
        kmax.sqrt()
    } else if cmax > T::zero() {
        cmax
    } else {
        T::one()
    };
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        s[(i, n + i)] = ws;
        for j in 0..n {
            s[(n + i, j)] = -mk[(i, j)] / ws;
            s[(n + i, n + j)] = -mc[(i, j)];
        }
    }
    Ok(ScaledState { s, ws, d, chol })
}

/// A double-precision tolerance widened to what the scalar type can resolve.
pub fn scalar_tol<T: Real>(base: f64) -> T {
    T::lit(base).max(T::lit(1e3) * T::machine_eps())
}

fn normalize_max_component<T: Real>(v: &mut DVector<Complex<T>>) {
    let mut best = (0, T::zero());
    for (i, z) in v.iter().enumerate() {
        let a = cabs(*z);
        // Strict comparison with a small margin keeps the pick stable.
        if a > best.1 * (T::one() + T::lit(1e-9)) {
            best = (i, a);
        }
    }
    if best.1 > T::zero() {
        let pivot = v[best.0];
        for z in v.iter_mut() {
            *z /= pivot;
        }
    }
}

fn total_cmp<T: Real>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

/// Solves the right and left eigenproblems of the pair. The returned
/// solution is not yet bi-orthogonally scaled and carries no whirl tags.
pub fn solve_eigen<T: Real>(pair: &StateSpacePair<T>) -> Result<ModalSolution<T>> {
    let n = pair.n;
    let m = pair.mass();
    let c = pair.damping();
    let k = pair.stiffness();
    let scaled = scaled_state(&m, &c, &k)?;
    let eig = real_eigen(scaled.s)?;

    let smax = eig.all_values.iter().fold(T::zero(), |a, v| a.max(cabs(*v)));
    let zero_cut = T::lit(ZERO_MODE_TOL) * smax;
    let tol = scalar_tol::<T>(PAIRING_TOL);

    // Undamped gyroscopic systems (skew C, symmetric K) have purely
    // imaginary spectra; rounding noise in Re(s) is removed for them.
    let conservative = (0..n).all(|i| (0..n).all(|j| c[(i, j)] == -c[(j, i)] && k[(i, j)] == k[(j, i)]));
    let snap = scalar_tol::<T>(STRUCTURE_TOL);

    let mut modes = Vec::with_capacity(eig.kept.len());
    for (idx, triple) in eig.kept.iter().enumerate() {
        let lambda = triple.value;
        let y1 = DVector::from_fn(n, |i, _| triple.right[i]);
        let y2 = DVector::from_fn(n, |i, _| triple.right[n + i]);
        let zero_mode = cabs(lambda) <= zero_cut;

        // Velocity partition must equal s times displacement partition.
        if !zero_mode {
            let lhs = y2.map(|v| v * creal(scaled.ws));
            let rhs = y1.map(|v| v * lambda);
            let denom = cnorm(&lhs).max(cnorm(&rhs));
            let res = if denom > T::zero() { cnorm(&(lhs - rhs)) / denom } else { T::zero() };
            if !(res <= scalar_tol(STRUCTURE_TOL)) {
                return Err(RotorError::EigenResidual { mode: idx, residual: res.to_f64_lossy() });
            }
        }

        let mut right = DVector::from_fn(n, |i, _| y1[i] * creal(scaled.d[i]));
        let z2 = DVector::from_fn(n, |i, _| triple.left[n + i]);
        let sol_re = scaled.chol.solve(&z2.map(|v| v.re));
        let sol_im = scaled.chol.solve(&z2.map(|v| v.im));
        let mut left = DVector::from_fn(n, |i, _| Complex::new(sol_re[i], sol_im[i]) * creal(scaled.d[i]));
        normalize_max_component(&mut right);
        normalize_max_component(&mut left);

        // Two-sided Rayleigh functional: refine the eigenvalue against the
        // unscaled matrices.
        let mut s = lambda;
        if !zero_mode && lambda.im != T::zero() {
            let qa = dot_t(&left, &real_times_complex(&m, &right));
            let qb = dot_t(&left, &real_times_complex(&c, &right));
            let qc = dot_t(&left, &real_times_complex(&k, &right));
            if cabs(qa) > T::zero() {
                let roots = quadratic_roots(qa, qb, qc);
                let near = if cabs(roots[0] - lambda) <= cabs(roots[1] - lambda) { roots[0] } else { roots[1] };
                if cabs(near - lambda) <= tol * cabs(lambda).max(T::one()) && near.im > T::zero() {
                    s = near;
                }
            }
        }

        if conservative && s.im != T::zero() && s.re.abs() <= snap * cabs(s) {
            s.re = T::zero();
        }
        let (omega, zeta) = if zero_mode { (T::zero(), T::zero()) } else { extract_modal_params(s) };
        modes.push(Mode { s, omega, zeta, right, left, whirl: None, zero_mode, normalized: false });
    }

    modes.sort_by(|a, b| total_cmp(a.s.im.abs(), b.s.im.abs()).then(total_cmp(a.s.re, b.s.re)));

    let mut all = eig.all_values;
    all.sort_by(|a, b| total_cmp(a.im.abs(), b.im.abs()).then(total_cmp(a.re, b.re)).then(total_cmp(a.im, b.im)));
    Ok(ModalSolution { modes, n, spin_speed: pair.spin_speed, all_eigenvalues: all, normalized: false })
}

/// `Φ_rᵀ A Ψ_s = ψL_rᵀ (C + (s_r + s_s) M) ψR_s` for state vectors `{ψ; sψ}`.
pub fn state_product<T: Real>(
    m: &DMatrix<T>,
    c: &DMatrix<T>,
    left: &DVector<Complex<T>>,
    s_left: Complex<T>,
    right: &DVector<Complex<T>>,
    s_right: Complex<T>,
) -> Complex<T> {
    let cr = real_times_complex(c, right);
    let mr = real_times_complex(m, right);
    dot_t(left, &cr) + dot_t(left, &mr) * (s_left + s_right)
}

/// Magnitude of the same product with every term taken in absolute value;
/// measures cancellation in [`state_product`].
fn state_product_scale<T: Real>(
    m: &DMatrix<T>,
    c: &DMatrix<T>,
    left: &DVector<Complex<T>>,
    right: &DVector<Complex<T>>,
    s: Complex<T>,
) -> T {
    let l = left.map(cabs);
    let r = right.map(cabs);
    let two_s = T::lit(2.0) * cabs(s);
    let mut acc = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += l[i] * (c[(i, j)].abs() + two_s * m[(i, j)].abs()) * r[j];
        }
    }
    acc
}

/// Scales left vectors so that `Φ_rᵀ A Ψ_s = δ_rs`. Modes whose eigenvalues
/// coincide within [`PAIRING_TOL`] are bi-orthogonalized as a block.
pub fn normalize_biorthogonal<T: Real>(
    modal: &ModalSolution<T>,
    pair: &StateSpacePair<T>,
) -> Result<ModalSolution<T>> {
    let m = pair.mass();
    let c = pair.damping();
    let mut out = modal.clone();
    let count = out.modes.len();
    let tol = scalar_tol::<T>(PAIRING_TOL);

    // Union of coincident eigenvalues into clusters.
    let mut cluster = (0..count).collect::<Vec<_>>();
    fn root(c: &mut [usize], mut i: usize) -> usize {
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for a in 0..count {
        for b in a + 1..count {
            let (sa, sb) = (out.modes[a].s, out.modes[b].s);
            if out.modes[a].zero_mode != out.modes[b].zero_mode {
                continue;
            }
            if cabs(sa - sb) <= tol * cabs(sa).max(T::one()) {
                let (ra, rb) = (root(&mut cluster, a), root(&mut cluster, b));
                cluster[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        let r = root(&mut cluster, i);
        match groups.iter_mut().find(|g| g[0] == r) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }

    for group in groups {
        let zero = out.modes[group[0]].zero_mode;
        let p = DMatrix::from_fn(group.len(), group.len(), |a, b| {
            let (ma, mb) = (&out.modes[group[a]], &out.modes[group[b]]);
            state_product(&m, &c, &ma.left, ma.s, &mb.right, mb.s)
        });
        let diag_ok = group.iter().enumerate().all(|(a, &idx)| {
            let md = &out.modes[idx];
            cabs(p[(a, a)]) > tol * state_product_scale(&m, &c, &md.left, &md.right, md.s)
        });
        let lu = ComplexLu::new(p.clone());
        let well_posed = if group.len() == 1 { diag_ok } else { lu.min_pivot_ratio > tol };
        if !well_posed {
            if zero {
                continue;
            }
            let md = &out.modes[group[0]];
            return Err(RotorError::DefectivePair {
                mode: group[0],
                s_re: md.s.re.to_f64_lossy(),
                s_im: md.s.im.to_f64_lossy(),
            });
        }
        // L ← L P⁻ᵀ, column a of the new block is Σ_c L_c (P⁻¹)_{a c}.
        let k = group.len();
        let mut inv = DMatrix::from_element(k, k, creal(T::zero()));
        for col in 0..k {
            let e = DVector::from_fn(k, |i, _| creal(if i == col { T::one() } else { T::zero() }));
            let x = lu.solve(&e).ok_or(RotorError::DefectivePair {
                mode: group[0],
                s_re: f64::NAN,
                s_im: f64::NAN,
            })?;
            inv.set_column(col, &x);
        }
        let old: Vec<DVector<Complex<T>>> = group.iter().map(|&i| out.modes[i].left.clone()).collect();
        for (a, &idx) in group.iter().enumerate() {
            let mut acc = DVector::from_element(out.n, creal(T::zero()));
            for (cidx, l) in old.iter().enumerate() {
                acc += l * inv[(a, cidx)];
            }
            out.modes[idx].left = acc;
            out.modes[idx].normalized = true;
        }
    }
    out.normalized = true;
    Ok(out)
}

/// Matrix of `Φ_rᵀ A Ψ_s` over the non-zero modes, identity after normalization.
pub fn biorthogonality_matrix<T: Real>(modal: &ModalSolution<T>, pair: &StateSpacePair<T>) -> DMatrix<Complex<T>> {
    let m = pair.mass();
    let c = pair.damping();
    let modes: Vec<&Mode<T>> = modal.active_modes().collect();
    DMatrix::from_fn(modes.len(), modes.len(), |r, s| {
        state_product(&m, &c, &modes[r].left, modes[r].s, &modes[s].right, modes[s].s)
    })
}

/// Largest relative residuals `‖(sA + B)Ψ‖ / (‖B‖‖Ψ‖)` and
/// `‖(sAᵀ + Bᵀ)Φ‖ / (‖B‖‖Φ‖)` over the non-zero modes.
pub fn eigen_residuals<T: Real>(modal: &ModalSolution<T>, pair: &StateSpacePair<T>) -> (T, T) {
    let bnorm = fnorm(&pair.b);
    let at = pair.a.transpose();
    let bt = pair.b.transpose();
    let mut worst = (T::zero(), T::zero());
    for mode in modal.active_modes() {
        let psi = pair.state_vector(&mode.right, mode.s);
        let phi = pair.state_vector(&mode.left, mode.s);
        let r = real_times_complex(&pair.a, &psi).map(|v| v * mode.s) + real_times_complex(&pair.b, &psi);
        let l = real_times_complex(&at, &phi).map(|v| v * mode.s) + real_times_complex(&bt, &phi);
        worst.0 = worst.0.max(cnorm(&r) / (bnorm * cnorm(&psi)));
        worst.1 = worst.1.max(cnorm(&l) / (bnorm * cnorm(&phi)));
    }
    worst
}

/// Linearizes, solves, normalizes and classifies whirl of an assembled system.
pub fn modal_analysis<T: Real>(system: &AssembledSystem<T>) -> Result<ModalSolution<T>> {
    let pair = linearize(system);
    let raw = solve_eigen(&pair)?;
    let mut modal = normalize_biorthogonal(&raw, &pair)?;
    classify_modes(&mut modal, system);
    Ok(modal)
}

/// Tags every mode with its whirl direction. Models without any node that
/// keeps both lateral translations are planar by construction.
pub fn classify_modes<T: Real>(modal: &mut ModalSolution<T>, system: &AssembledSystem<T>) {
    for mode in &mut modal.modes {
        mode.whirl = Some(classify_whirl(&mode.right, &system.dof_map, &system.node_mass).unwrap_or(Whirl::PlanarMixed));
    }
}

/// Displacement history from initial state `(q0, q̇0)` at each of `times`.
/// Column `i` of the result is `q(times[i])`.
///
/// Modal coordinates are the left projections `c_r = Φ_rᵀ A u(0)`.
pub fn free_response<T: Real>(
    modal: &ModalSolution<T>,
    pair: &StateSpacePair<T>,
    q0: &DVector<T>,
    qdot0: &DVector<T>,
    times: &[T],
) -> Result<DMatrix<T>> {
    free_state_response(modal, pair, q0, qdot0, times).map(|(q, _)| q)
}

/// Like [`free_response`] but also returns the velocity history `q̇`.
pub fn free_state_response<T: Real>(
    modal: &ModalSolution<T>,
    pair: &StateSpacePair<T>,
    q0: &DVector<T>,
    qdot0: &DVector<T>,
    times: &[T],
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    if !modal.normalized {
        return Err(RotorError::NotNormalized);
    }
    if let Some((i, _)) = modal.modes.iter().enumerate().find(|(_, m)| m.zero_mode || !m.normalized) {
        return Err(RotorError::ZeroModeNotNormalized(i));
    }
    let n = pair.n;
    if q0.len() != n || qdot0.len() != n {
        return Err(RotorError::InvalidArgument(format!("initial state must have length {n}")));
    }
    let m = pair.mass();
    let c = pair.damping();
    let top = (&c * q0 + &m * qdot0).map(creal);
    let mq0 = (&m * q0).map(creal);
    let coeffs: Vec<Complex<T>> = modal
        .modes
        .iter()
        .map(|md| dot_t(&md.left, &top) + dot_t(&md.left, &mq0) * md.s)
        .collect();

    let mut q = DMatrix::zeros(n, times.len());
    let mut v = DMatrix::zeros(n, times.len());
    for (col, &t) in times.iter().enumerate() {
        for (md, &cr) in modal.modes.iter().zip(&coeffs) {
            let amp = cr * cexp(md.s * creal(t));
            // Conjugate partners add the complex conjugate term, i.e. twice the real part.
            let factor = if md.is_real() { T::one() } else { T::lit(2.0) };
            for i in 0..n {
                let x = amp * md.right[i];
                q[(i, col)] += x.re * factor;
                v[(i, col)] += (x * md.s).re * factor;
            }
        }
    }
    Ok((q, v))
}
