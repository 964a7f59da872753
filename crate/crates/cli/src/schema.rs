//! JSON model documents. Every key carries its unit; unknown keys are rejected.

use rotorfe::{Bearing, Disk, DofIndex, MaterialSpec, RotorModel64, Segment, ThermalLoad};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default)]
    pub description: Option<String>,
    pub nodes_m: Vec<f64>,
    pub materials: Vec<MaterialDocument>,
    pub segments: Vec<SegmentDocument>,
    #[serde(default)]
    pub disks: Vec<DiskDocument>,
    #[serde(default)]
    pub bearings: Vec<BearingDocument>,
    /// DOFs in `node:<id>:<y|z|ty|tz>` form.
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub thermal: Option<ThermalDocument>,
    /// Default spin speed for single-speed analyses.
    #[serde(default)]
    pub speed_rpm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub youngs_modulus_pa: f64,
    pub density_kg_per_m3: f64,
    pub thermal_expansion_per_k: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDocument {
    pub start_node: usize,
    pub end_node: usize,
    pub outer_diameter_m: f64,
    #[serde(default)]
    pub inner_diameter_m: f64,
    #[serde(default)]
    pub material: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskDocument {
    pub node: usize,
    pub mass_kg: f64,
    pub diametral_inertia_kg_m2: f64,
    pub polar_inertia_kg_m2: f64,
}

/// Either one isotropic coefficient or a full `[[yy, yz], [zy, zz]]` block.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Isotropic(f64),
    Matrix([[f64; 2]; 2]),
}

impl Coefficient {
    fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            Coefficient::Isotropic(v) => [[v, 0.0], [0.0, v]],
            Coefficient::Matrix(m) => m,
        }
    }
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::Isotropic(0.0)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BearingDocument {
    pub node: usize,
    pub stiffness_n_per_m: Coefficient,
    #[serde(default)]
    pub damping_n_s_per_m: Coefficient,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThermalDocument {
    /// Shaft ends held axially; uniform heating by `delta_t_k`.
    Fixed { delta_t_k: f64 },
    /// Axial force given directly, tension positive.
    Force { axial_force_n: f64 },
}

impl ThermalDocument {
    pub fn load(self) -> ThermalLoad<f64> {
        match self {
            ThermalDocument::Fixed { delta_t_k } => ThermalLoad::constrained(delta_t_k),
            ThermalDocument::Force { axial_force_n } => ThermalLoad::prescribed(axial_force_n),
        }
    }
}

impl ModelDocument {
    pub fn to_model(&self) -> Result<RotorModel64, CliError> {
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, s)| s.parse::<DofIndex>().map_err(|e| CliError::Input(format!("constraints[{i}]: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RotorModel64 {
            nodes: self.nodes_m.clone(),
            materials: self
                .materials
                .iter()
                .map(|m| MaterialSpec {
                    youngs_modulus: m.youngs_modulus_pa,
                    density: m.density_kg_per_m3,
                    thermal_expansion: m.thermal_expansion_per_k,
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    start: s.start_node,
                    end: s.end_node,
                    outer_diameter: s.outer_diameter_m,
                    inner_diameter: s.inner_diameter_m,
                    material: s.material,
                })
                .collect(),
            disks: self
                .disks
                .iter()
                .map(|d| Disk {
                    node: d.node,
                    mass: d.mass_kg,
                    diametral_inertia: d.diametral_inertia_kg_m2,
                    polar_inertia: d.polar_inertia_kg_m2,
                })
                .collect(),
            bearings: self
                .bearings
                .iter()
                .map(|b| Bearing {
                    node: b.node,
                    stiffness: b.stiffness_n_per_m.matrix(),
                    damping: b.damping_n_s_per_m.matrix(),
                })
                .collect(),
            constraints,
            thermal: self.thermal.map(ThermalDocument::load),
        })
    }
}

/// Parses and validates a model document. Warnings are returned alongside
/// the model; any validation error rejects the document.
pub fn parse_model_file(text: &str) -> Result<(ModelDocument, RotorModel64, Vec<String>), CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ModelDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        let path = e.path().to_string();
        CliError::Input(format!(
            "model document, at '{path}' (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })?;
    let model = doc.to_model()?;
    let report = rotorfe::validate_model(&model);
    if !report.is_valid() {
        return Err(CliError::Input(format!("model validation failed:\n{report}")));
    }
    let warnings = report.warnings.iter().map(|w| w.to_string()).collect();
    Ok((doc, model, warnings))
}
