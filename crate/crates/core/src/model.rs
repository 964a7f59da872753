//! Rotor-bearing system description and input validation.
//!
//! All quantities are SI: metres, kilograms, seconds, radians per second,
//! newtons, pascals and kelvin. RPM and Hz only appear through the
//! conversion helpers at the bottom of this module.

use std::fmt;
use std::str::FromStr;

use crate::num::Real;

/// Lateral degree of freedom at a node. The spin axis is `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Y,
    Z,
    ThetaY,
    ThetaZ,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Y, Direction::Z, Direction::ThetaY, Direction::ThetaZ];

    /// Offset of this direction within a node's four DOFs.
    #[inline]
    pub fn offset(self) -> usize {
        match self {
            Direction::Y => 0,
            Direction::Z => 1,
            Direction::ThetaY => 2,
            Direction::ThetaZ => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Y => "y",
            Direction::Z => "z",
            Direction::ThetaY => "ty",
            Direction::ThetaZ => "tz",
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "y" => Ok(Direction::Y),
            "z" => Ok(Direction::Z),
            "ty" => Ok(Direction::ThetaY),
            "tz" => Ok(Direction::ThetaZ),
            other => Err(format!("unknown direction '{other}' (expected y, z, ty or tz)")),
        }
    }
}

/// A single coordinate of the rotor, written `node:<id>:<y|z|ty|tz>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DofIndex {
    pub node: usize,
    pub direction: Direction,
}

impl DofIndex {
    pub fn new(node: usize, direction: Direction) -> Self {
        Self { node, direction }
    }
}

impl fmt::Display for DofIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node:{}:{}", self.node, self.direction.label())
    }
}

impl FromStr for DofIndex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some("node"), Some(id), Some(dir), None) => {
                let node = id.parse::<usize>().map_err(|e| format!("bad node id '{id}': {e}"))?;
                Ok(DofIndex { node, direction: dir.parse()? })
            }
            _ => Err(format!("malformed DOF '{s}' (expected node:<id>:<y|z|ty|tz>)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSpec<T> {
    /// Pa
    pub youngs_modulus: T,
    /// kg/m³
    pub density: T,
    /// 1/K
    pub thermal_expansion: T,
}

/// Structural steel defaults.
impl Default for MaterialSpec<f64> {
    fn default() -> Self {
        Self { youngs_modulus: 200e9, density: 7850.0, thermal_expansion: 1.2e-5 }
    }
}

/// Uniform circular (possibly hollow) shaft segment between two adjacent nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub start: usize,
    pub end: usize,
    pub outer_diameter: T,
    pub inner_diameter: T,
    /// Index into [`RotorModel::materials`].
    pub material: usize,
}

impl<T: Real> Segment<T> {
    pub fn area(&self) -> T {
        section_area(self.outer_diameter, self.inner_diameter)
    }

    pub fn second_moment(&self) -> T {
        section_second_moment(self.outer_diameter, self.inner_diameter)
    }
}

pub fn section_area<T: Real>(outer: T, inner: T) -> T {
    T::pi() * (outer * outer - inner * inner) / T::lit(4.0)
}

/// Diametral second moment of area, π(D⁴ − d⁴)/64.
pub fn section_second_moment<T: Real>(outer: T, inner: T) -> T {
    let d2 = outer * outer;
    let i2 = inner * inner;
    T::pi() * (d2 * d2 - i2 * i2) / T::lit(64.0)
}

/// Rigid thin disk lumped at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    pub node: usize,
    pub mass: T,
    pub diametral_inertia: T,
    pub polar_inertia: T,
}

/// Linear translational support. Matrices are indexed `[row][col]` over `(y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bearing<T> {
    pub node: usize,
    pub stiffness: [[T; 2]; 2],
    pub damping: [[T; 2]; 2],
}

impl<T: Real> Bearing<T> {
    pub fn isotropic(node: usize, stiffness: T, damping: T) -> Self {
        let z = T::zero();
        Self { node, stiffness: [[stiffness, z], [z, stiffness]], damping: [[damping, z], [z, damping]] }
    }

    pub fn is_symmetric(&self) -> bool {
        self.stiffness[0][1] == self.stiffness[1][0] && self.damping[0][1] == self.damping[1][0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalMode {
    /// Both shaft ends fixed axially; a temperature rise produces compression.
    FullyConstrainedAxial,
    /// The signed axial force is given directly (tension positive).
    PrescribedForce,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalLoad<T> {
    /// Uniform temperature rise, K.
    pub delta_t: T,
    pub mode: ThermalMode,
    /// N, tension positive. Only read in [`ThermalMode::PrescribedForce`].
    pub prescribed_force: T,
}

impl<T: Real> ThermalLoad<T> {
    pub fn constrained(delta_t: T) -> Self {
        Self { delta_t, mode: ThermalMode::FullyConstrainedAxial, prescribed_force: T::zero() }
    }

    pub fn prescribed(force: T) -> Self {
        Self { delta_t: T::zero(), mode: ThermalMode::PrescribedForce, prescribed_force: force }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotorModel<T> {
    /// Axial node positions along the spin axis, strictly increasing.
    pub nodes: Vec<T>,
    pub materials: Vec<MaterialSpec<T>>,
    pub segments: Vec<Segment<T>>,
    pub disks: Vec<Disk<T>>,
    pub bearings: Vec<Bearing<T>>,
    /// Fixed DOFs, eliminated from the global system.
    pub constraints: Vec<DofIndex>,
    pub thermal: Option<ThermalLoad<T>>,
}

impl<T: Real> RotorModel<T> {
    /// Uniform shaft of `elements` equal segments on `[0, length]` with one material.
    pub fn uniform_shaft(length: T, diameter: T, material: MaterialSpec<T>, elements: usize) -> Self {
        let nodes = (0..=elements)
            .map(|i| length * T::from_usize_lossy(i) / T::from_usize_lossy(elements))
            .collect();
        let segments = (0..elements)
            .map(|i| Segment { start: i, end: i + 1, outer_diameter: diameter, inner_diameter: T::zero(), material: 0 })
            .collect();
        Self {
            nodes,
            materials: vec![material],
            segments,
            disks: Vec::new(),
            bearings: Vec::new(),
            constraints: Vec::new(),
            thermal: None,
        }
    }

    /// Fixes both lateral translations at `node`.
    pub fn pin(&mut self, node: usize) {
        self.constraints.push(DofIndex::new(node, Direction::Y));
        self.constraints.push(DofIndex::new(node, Direction::Z));
    }

    pub fn is_constrained(&self, dof: DofIndex) -> bool {
        self.constraints.contains(&dof)
    }

    pub fn length(&self) -> T {
        match (self.nodes.first(), self.nodes.last()) {
            (Some(&a), Some(&b)) => b - a,
            _ => T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    /// Where the problem sits, e.g. `segments[2]`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub errors: Vec<ValidationIssue>,
    pub warnings: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ValidationIssue { location: location.into(), message: message.into() });
    }

    fn warn(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(ValidationIssue { location: location.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a [`RotorModel`]. Problems are
/// returned as data; this never fails.
pub fn validate_model<T: Real>(model: &RotorModel<T>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n_nodes = model.nodes.len();

    if n_nodes < 2 {
        report.error("nodes", "at least two nodes required");
    }
    for (i, x) in model.nodes.iter().enumerate() {
        if !x.is_finite() {
            report.error(format!("nodes[{i}]"), "position is not finite");
        }
    }
    for (i, w) in model.nodes.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            report.error(format!("nodes[{}]", i + 1), "node positions must be strictly increasing");
        }
    }

    for (i, m) in model.materials.iter().enumerate() {
        let loc = format!("materials[{i}]");
        for (name, v) in [
            ("youngs_modulus", m.youngs_modulus),
            ("density", m.density),
            ("thermal_expansion", m.thermal_expansion),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                report.error(&loc, format!("{name} must be strictly positive"));
            }
        }
    }

    if model.segments.is_empty() {
        report.error("segments", "at least one shaft segment required");
    }
    let mut covered = vec![false; n_nodes];
    for (i, s) in model.segments.iter().enumerate() {
        let loc = format!("segments[{i}]");
        if s.start >= n_nodes || s.end >= n_nodes {
            report.error(&loc, "references a node that does not exist");
        } else {
            if s.end != s.start + 1 {
                report.error(&loc, "segment must span adjacent nodes");
            } else {
                covered[s.start] = true;
                covered[s.end] = true;
                let len = model.nodes[s.end] - model.nodes[s.start];
                if len > T::zero() && len < s.outer_diameter {
                    report.warn(&loc, "segment shorter than its diameter; slender-beam assumption is weak");
                }
            }
        }
        if s.material >= model.materials.len() {
            report.error(&loc, "references a material that does not exist");
        }
        if !(s.outer_diameter.is_finite() && s.inner_diameter.is_finite())
            || s.inner_diameter < T::zero()
            || s.outer_diameter <= s.inner_diameter
        {
            report.error(&loc, "hollow section invalid (need outer diameter > inner diameter >= 0)");
        }
    }
    for (i, c) in covered.iter().enumerate() {
        if !c && n_nodes >= 2 && !model.segments.is_empty() {
            report.warn(format!("nodes[{i}]"), "node is not connected to any segment");
        }
    }

    for (i, d) in model.disks.iter().enumerate() {
        let loc = format!("disks[{i}]");
        if d.node >= n_nodes {
            report.error(&loc, "references a node that does not exist");
        }
        if !(d.mass.is_finite() && d.mass > T::zero()) {
            report.error(&loc, "mass must be strictly positive");
        }
        if !(d.diametral_inertia.is_finite() && d.diametral_inertia > T::zero()) {
            report.error(&loc, "diametral inertia must be strictly positive");
        }
        if !(d.polar_inertia.is_finite() && d.polar_inertia > T::zero()) {
            report.error(&loc, "polar inertia must be strictly positive");
        } else if d.polar_inertia > T::lit(2.0) * d.diametral_inertia {
            report.error(&loc, "polar inertia exceeds perpendicular-axis bound (I_p <= 2 I_d)");
        } else if d.polar_inertia == T::lit(2.0) * d.diametral_inertia {
            report.warn(&loc, "polar inertia equals 2 I_d exactly (infinitely thin disk)");
        }
    }

    for (i, b) in model.bearings.iter().enumerate() {
        let loc = format!("bearings[{i}]");
        if b.node >= n_nodes {
            report.error(&loc, "references a node that does not exist");
            continue;
        }
        let finite = b.stiffness.iter().chain(b.damping.iter()).flatten().all(|v| v.is_finite());
        if !finite {
            report.error(&loc, "stiffness and damping entries must be finite");
        }
        for (a, dir) in [Direction::Y, Direction::Z].into_iter().enumerate() {
            let acts = (0..2).any(|o| {
                [b.stiffness, b.damping].iter().any(|m| m[a][o] != T::zero() || m[o][a] != T::zero())
            });
            if acts && model.is_constrained(DofIndex::new(b.node, dir)) {
                report.warn(
                    &loc,
                    format!("acts on constrained DOF node:{}:{}; its row is discarded", b.node, dir.label()),
                );
            }
        }
    }

    let mut seen = Vec::new();
    for (i, c) in model.constraints.iter().enumerate() {
        let loc = format!("constraints[{i}]");
        if c.node >= n_nodes {
            report.error(&loc, "references a node that does not exist");
        }
        if seen.contains(c) {
            report.warn(&loc, format!("duplicate constraint on {c}"));
        }
        seen.push(*c);
    }

    if let Some(t) = &model.thermal {
        if !t.delta_t.is_finite() {
            report.error("thermal.delta_t", "must be finite");
        }
        if !t.prescribed_force.is_finite() {
            report.error("thermal.prescribed_force", "must be finite");
        }
    }

    report
}

/// Revolutions per minute to rad/s.
#[inline]
pub fn rpm_to_rad_s<T: Real>(rpm: T) -> T {
    rpm * T::two_pi() / T::lit(60.0)
}

#[inline]
pub fn rad_s_to_rpm<T: Real>(omega: T) -> T {
    omega * T::lit(60.0) / T::two_pi()
}

#[inline]
pub fn hz_to_rad_s<T: Real>(hz: T) -> T {
    hz * T::two_pi()
}

#[inline]
pub fn rad_s_to_hz<T: Real>(omega: T) -> T {
    omega / T::two_pi()
}

/// Temperature difference in °F to the same difference in K.
#[inline]
pub fn fahrenheit_difference_to_kelvin<T: Real>(delta_f: T) -> T {
    delta_f * T::lit(5.0) / T::lit(9.0)
}
