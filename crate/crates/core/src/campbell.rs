//! Speed sweeps, branch tracking and critical-speed location.

use std::cmp::Ordering;

use nalgebra::DVector;

use crate::assembly::{assemble, AssembledSystem};
use crate::error::{Result, RotorError};
use crate::linalg::{cnorm, dot_h};
use crate::modal::{modal_analysis, ModalSolution, PAIRING_TOL};
use crate::model::{RotorModel, ThermalLoad};
use crate::num::{cabs, creal, Complex, Real};
use crate::whirl::{mac, Whirl};

/// Minimum MAC between consecutive speeds for a branch to keep its identity.
pub const MAC_THRESHOLD: f64 = 0.6;

/// Relative bracket width at which critical-speed bisection stops.
pub const CRITICAL_REL_WIDTH: f64 = 1e-3;

/// Which axial pre-stress to apply during a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalCondition<T> {
    /// Whatever thermal load the model carries.
    Model,
    NoPrestress,
    Load(ThermalLoad<T>),
}

impl<T: Real> ThermalCondition<T> {
    pub fn apply(&self, model: &RotorModel<T>) -> RotorModel<T> {
        let mut m = model.clone();
        match self {
            ThermalCondition::Model => {}
            ThermalCondition::NoPrestress => m.thermal = None,
            ThermalCondition::Load(l) => m.thermal = Some(*l),
        }
        m
    }

    pub fn label(&self, model: &RotorModel<T>) -> String {
        let thermal = match self {
            ThermalCondition::Model => model.thermal,
            ThermalCondition::NoPrestress => None,
            ThermalCondition::Load(l) => Some(*l),
        };
        match thermal {
            None => "no pre-stress".to_string(),
            Some(l) => match l.mode {
                crate::model::ThermalMode::FullyConstrainedAxial => {
                    format!("axially constrained, delta_t = {} K", l.delta_t)
                }
                crate::model::ThermalMode::PrescribedForce => {
                    format!("prescribed axial force {} N", l.prescribed_force)
                }
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct BranchPoint<T: Real> {
    pub s: Complex<T>,
    /// rad/s
    pub omega: T,
    pub zeta: T,
    pub whirl: Whirl,
    /// MAC against the same branch at the neighbouring speed it was tracked from.
    pub mac: T,
    pub shape: DVector<Complex<T>>,
}

#[derive(Debug, Clone)]
pub struct Branch<T: Real> {
    pub id: usize,
    /// One entry per grid speed; `None` only after truncation.
    pub points: Vec<Option<BranchPoint<T>>>,
    /// Grid index where tracking was lost.
    pub truncated_at: Option<usize>,
}

impl<T: Real> Branch<T> {
    pub fn omega_at(&self, i: usize) -> Option<T> {
        self.points[i].as_ref().map(|p| p.omega)
    }
}

#[derive(Debug, Clone)]
pub struct CampbellData<T: Real> {
    /// rad/s, ascending
    pub speeds: Vec<T>,
    pub branches: Vec<Branch<T>>,
    pub thermal_label: String,
    pub warnings: Vec<String>,
}

/// Orthonormal basis (Gram–Schmidt) of a set of complex vectors.
fn orthonormal_basis<T: Real>(vectors: &[&DVector<Complex<T>>]) -> Vec<DVector<Complex<T>>> {
    let mut basis: Vec<DVector<Complex<T>>> = Vec::new();
    for v in vectors {
        let mut w = (*v).clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = dot_h(b, &w);
                w -= b.map(|x| x * proj);
            }
        }
        let nrm = cnorm(&w);
        if nrm > T::lit(1e-8) * cnorm(v) {
            basis.push(w.map(|x| x / creal(nrm)));
        }
    }
    basis
}

/// Candidate target at the next speed: a mode, or a set of modes sharing one
/// (degenerate) eigenvalue.
struct Cluster<T: Real> {
    members: Vec<usize>,
    basis: Vec<DVector<Complex<T>>>,
    omega: T,
}

fn clusters<T: Real>(modal: &ModalSolution<T>) -> Vec<Cluster<T>> {
    let tol = crate::modal::scalar_tol::<T>(PAIRING_TOL);
    let modes: Vec<usize> = (0..modal.modes.len()).filter(|&i| !modal.modes[i].zero_mode).collect();
    let mut out: Vec<Cluster<T>> = Vec::new();
    let mut used = vec![false; modal.modes.len()];
    for &i in &modes {
        if used[i] {
            continue;
        }
        let si = modal.modes[i].s;
        let members: Vec<usize> = modes
            .iter()
            .copied()
            .filter(|&j| !used[j] && cabs(modal.modes[j].s - si) <= tol * cabs(si).max(T::one()))
            .collect();
        for &j in &members {
            used[j] = true;
        }
        let vecs: Vec<&DVector<Complex<T>>> = members.iter().map(|&j| &modal.modes[j].right).collect();
        out.push(Cluster { basis: orthonormal_basis(&vecs), omega: modal.modes[i].omega, members });
    }
    out
}

/// Fraction of `shape` lying in the span of the cluster (MAC for a single mode).
fn subspace_mac<T: Real>(shape: &DVector<Complex<T>>, c: &Cluster<T>) -> T {
    let total = dot_h(shape, shape).re;
    if total == T::zero() {
        return T::zero();
    }
    let inside = c.basis.iter().fold(T::zero(), |a, b| a + dot_h(b, shape).norm_sqr());
    (inside / total).min(T::one())
}

fn project<T: Real>(shape: &DVector<Complex<T>>, c: &Cluster<T>) -> DVector<Complex<T>> {
    let mut out = DVector::from_element(shape.len(), creal(T::zero()));
    for b in &c.basis {
        let coef = dot_h(b, shape);
        out += b.map(|x| x * coef);
    }
    out
}

/// Matches the branches alive at `prev` to the modes solved at `next`
/// greedily by descending MAC, ties broken by the smaller frequency jump.
fn track_step<T: Real>(branches: &mut [Branch<T>], prev: usize, next: usize, modal: &ModalSolution<T>, warnings: &mut Vec<String>) {
    let threshold = T::lit(MAC_THRESHOLD);
    let cl = clusters(modal);
    let mut candidates: Vec<(T, T, usize, usize)> = Vec::new();
    for (bi, b) in branches.iter().enumerate() {
        let Some(p) = &b.points[prev] else { continue };
        for (ci, c) in cl.iter().enumerate() {
            let score = if c.members.len() == 1 {
                mac(&p.shape, &modal.modes[c.members[0]].right).unwrap_or(T::zero())
            } else {
                subspace_mac(&p.shape, c)
            };
            if score >= threshold {
                candidates.push((score, (c.omega - p.omega).abs(), bi, ci));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });

    let mut assigned = vec![false; branches.len()];
    let mut taken = vec![0usize; cl.len()];
    for (score, _, bi, ci) in candidates {
        if assigned[bi] || taken[ci] >= cl[ci].members.len() {
            continue;
        }
        let c = &cl[ci];
        let mode = &modal.modes[c.members[taken[ci]]];
        taken[ci] += 1;
        assigned[bi] = true;
        let prev_shape = &branches[bi].points[prev].as_ref().expect("alive").shape;
        let (shape, whirl) = if c.members.len() == 1 {
            (mode.right.clone(), mode.whirl.unwrap_or(Whirl::PlanarMixed))
        } else {
            // Whirl direction is undefined inside a degenerate pair.
            (project(prev_shape, c), Whirl::PlanarMixed)
        };
        branches[bi].points[next] =
            Some(BranchPoint { s: mode.s, omega: mode.omega, zeta: mode.zeta, whirl, mac: score, shape });
    }
    for (bi, b) in branches.iter_mut().enumerate() {
        if b.points[prev].is_some() && !assigned[bi] && b.truncated_at.is_none() {
            b.truncated_at = Some(next);
            warnings.push(format!("branch {} lost track at grid index {next}", b.id));
        }
    }
    let unmatched: usize = cl.iter().zip(&taken).map(|(c, &t)| c.members.len() - t).sum();
    if unmatched > 0 {
        warnings.push(format!("{unmatched} mode(s) at grid index {next} not attached to any branch"));
    }
}

/// Solves every grid speed, using scoped threads. Output order follows the grid.
fn solve_grid<T: Real>(base: &AssembledSystem<T>, speeds: &[T]) -> Result<Vec<ModalSolution<T>>> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(speeds.len()).max(1);
    let mut results: Vec<Option<Result<ModalSolution<T>>>> = (0..speeds.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, chunk) in results.chunks_mut(speeds.len().div_ceil(workers)).enumerate() {
            let start = w * speeds.len().div_ceil(workers);
            scope.spawn(move || {
                for (off, slot) in chunk.iter_mut().enumerate() {
                    let speed = speeds[start + off];
                    *slot = Some(modal_analysis(&base.with_spin_speed(speed)));
                }
            });
        }
    });
    results
        .into_iter()
        .zip(speeds)
        .map(|(r, &speed)| {
            r.expect("every slot solved").map_err(|e| RotorError::SweepFailure {
                speed_rad_s: speed.to_f64_lossy(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// Campbell diagram data over `speeds` (rad/s, strictly ascending, ≥ 2 points).
///
/// When the grid starts at zero spin, branch identity is seeded at the second
/// speed and propagated back to the first, since degenerate pairs at rest have
/// no preferred basis.
pub fn sweep<T: Real>(model: &RotorModel<T>, speeds: &[T], thermal: ThermalCondition<T>) -> Result<CampbellData<T>> {
    if speeds.len() < 2 {
        return Err(RotorError::InvalidArgument("speed grid needs at least two points".into()));
    }
    if speeds.windows(2).any(|w| !(w[1] > w[0])) || speeds.iter().any(|s| !s.is_finite()) {
        return Err(RotorError::InvalidArgument("speed grid must be finite and strictly ascending".into()));
    }
    let effective = thermal.apply(model);
    let base = assemble(&effective, speeds[0])?;
    let solutions = solve_grid(&base, speeds)?;

    let seed = if speeds[0] == T::zero() { 1 } else { 0 };
    let mut branches: Vec<Branch<T>> = solutions[seed]
        .modes
        .iter()
        .filter(|m| !m.zero_mode)
        .enumerate()
        .map(|(id, m)| {
            let mut points = vec![None; speeds.len()];
            points[seed] = Some(BranchPoint {
                s: m.s,
                omega: m.omega,
                zeta: m.zeta,
                whirl: m.whirl.unwrap_or(Whirl::PlanarMixed),
                mac: T::one(),
                shape: m.right.clone(),
            });
            Branch { id, points, truncated_at: None }
        })
        .collect();

    let mut warnings = Vec::new();
    for i in seed + 1..speeds.len() {
        track_step(&mut branches, i - 1, i, &solutions[i], &mut warnings);
    }
    for i in (0..seed).rev() {
        track_step(&mut branches, i + 1, i, &solutions[i], &mut warnings);
    }

    Ok(CampbellData { speeds: speeds.to_vec(), branches, thermal_label: thermal.label(model), warnings })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSpeed<T> {
    /// rad/s
    pub speed: T,
    pub branch: usize,
    pub excitation_order: T,
    /// `|ω_branch(Ω*) − s_e·Ω*|`, rad/s
    pub residual: T,
}

/// Branch frequency at `speed`, picked from a fresh solve by best MAC to `shape`.
fn branch_value<T: Real>(
    resolver: &dyn Fn(T) -> Result<ModalSolution<T>>,
    speed: T,
    shape: &DVector<Complex<T>>,
    omega_hint: T,
) -> Result<(T, DVector<Complex<T>>)> {
    let modal = resolver(speed)?;
    let mut best: Option<(T, T, usize)> = None;
    for (i, m) in modal.modes.iter().enumerate().filter(|(_, m)| !m.zero_mode) {
        let score = mac(shape, &m.right).unwrap_or(T::zero());
        let jump = (m.omega - omega_hint).abs();
        let better = match best {
            None => true,
            Some((bs, bj, _)) => score > bs || (score == bs && jump < bj),
        };
        if better {
            best = Some((score, jump, i));
        }
    }
    let (_, _, i) = best.ok_or_else(|| RotorError::InvalidArgument("no vibration modes at this speed".into()))?;
    Ok((modal.modes[i].omega, modal.modes[i].right.clone()))
}

/// Speeds where a branch crosses the excitation line `ω = s_e·Ω`.
///
/// Sign changes of `ω_branch(Ω) − s_e·Ω` between grid points are refined by
/// bisection with fresh eigensolves from `resolver` until the bracket is
/// narrower than [`CRITICAL_REL_WIDTH`] relative, then finished with one
/// secant step inside the final bracket.
pub fn find_critical_speeds<T: Real>(
    campbell: &CampbellData<T>,
    excitation_order: T,
    resolver: &dyn Fn(T) -> Result<ModalSolution<T>>,
) -> Result<Vec<CriticalSpeed<T>>> {
    if !(excitation_order > T::zero()) {
        return Err(RotorError::InvalidArgument("excitation order must be positive".into()));
    }
    if campbell.speeds.len() < 2 {
        return Err(RotorError::InvalidArgument("need at least two speeds".into()));
    }
    let se = excitation_order;
    let width = T::lit(CRITICAL_REL_WIDTH);
    let mut found = Vec::new();
    for branch in &campbell.branches {
        for i in 0..campbell.speeds.len() {
            let Some(pa) = &branch.points[i] else { continue };
            let ga = pa.omega - se * campbell.speeds[i];
            if ga == T::zero() {
                found.push(CriticalSpeed { speed: campbell.speeds[i], branch: branch.id, excitation_order: se, residual: T::zero() });
                continue;
            }
            let Some(pb) = branch.points.get(i + 1).and_then(|p| p.as_ref()) else { continue };
            let gb = pb.omega - se * campbell.speeds[i + 1];
            if gb == T::zero() || (ga > T::zero()) == (gb > T::zero()) {
                continue;
            }
            let (mut a, mut b) = (campbell.speeds[i], campbell.speeds[i + 1]);
            let (mut fa, mut fb) = (ga, gb);
            let mut shape = pa.shape.clone();
            let mut omega_a = pa.omega;
            let half = T::lit(0.5);
            while (b - a) > width * (a + b) * half {
                let mid = (a + b) * half;
                let (w, v) = branch_value(resolver, mid, &shape, omega_a)?;
                let fm = w - se * mid;
                if fm == T::zero() {
                    a = mid;
                    b = mid;
                    fa = fm;
                    fb = fm;
                    break;
                }
                if (fm > T::zero()) == (fa > T::zero()) {
                    a = mid;
                    fa = fm;
                    shape = v;
                    omega_a = w;
                } else {
                    b = mid;
                    fb = fm;
                }
            }
            let mid = (a + b) * half;
            let secant = if fb != fa { a - fa * (b - a) / (fb - fa) } else { mid };
            let (w_sec, _) = branch_value(resolver, secant, &shape, omega_a)?;
            let r_sec = (w_sec - se * secant).abs();
            let (w_mid, _) = branch_value(resolver, mid, &shape, omega_a)?;
            let r_mid = (w_mid - se * mid).abs();
            let (speed, residual) = if r_sec <= r_mid { (secant, r_sec) } else { (mid, r_mid) };
            found.push(CriticalSpeed { speed, branch: branch.id, excitation_order: se, residual });
        }
    }
    found.sort_by(|x, y| {
        x.speed.partial_cmp(&y.speed).unwrap_or(Ordering::Equal).then(x.branch.cmp(&y.branch))
    });
    Ok(found)
}

/// Resolver that re-assembles `model` under `thermal` at any spin speed.
pub fn model_resolver<T: Real>(
    model: &RotorModel<T>,
    thermal: ThermalCondition<T>,
) -> Result<impl Fn(T) -> Result<ModalSolution<T>>> {
    let base = assemble(&thermal.apply(model), T::zero())?;
    Ok(move |speed: T| modal_analysis(&base.with_spin_speed(speed)))
}
