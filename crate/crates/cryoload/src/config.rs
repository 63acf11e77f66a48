//! Run configuration: one TOML file describing the fridge, cable, lines,
//! processor, and budget knobs.
//!
//! Keys carry explicit unit suffixes (`length_m`, `area_mm2`, `current_mA`,
//! `power_dBm`, ...) and are converted to SI exactly once, at resolve time.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attenuators::{FixedLoad, LineKind, LineSpec};
use crate::cables::{CableLayer, CableSpec, StaticConvention};
use crate::error::{Error, Result};
use crate::materials::{self, MaterialLibrary};
use crate::system::{BudgetOptions, FridgeModel, ProcessorModel, Stage};

/// dBm -> W
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// W -> dBm
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageConfig {
    pub name: String,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    #[serde(rename = "cooling_power_W", skip_serializing_if = "Option::is_none")]
    pub cooling_power_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incoming_length_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FridgeConfig {
    pub name: String,
    pub below_mxc_length_m: f64,
    pub line_capacity: usize,
    pub z0_ohm: f64,
    pub stages: Vec<StageConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerConfig {
    pub name: String,
    pub area_mm2: f64,
    /// Material name resolved against the library.
    pub material: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CableConfig {
    pub name: String,
    /// Resistivity model of the inner conductor.
    pub resistivity_material: String,
    pub layers: Vec<LayerConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineConfig {
    pub kind: LineKind,
    #[serde(rename = "current_mA", skip_serializing_if = "Option::is_none")]
    pub current_ma: Option<f64>,
    #[serde(rename = "power_dBm", skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attenuation_db: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedLoadConfig {
    pub stage: String,
    #[serde(rename = "power_W")]
    pub power_w: f64,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessorConfig {
    pub n: u32,
    pub readout_multiplex: u32,
}

fn default_margin() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetConfig {
    #[serde(default)]
    pub static_convention: StaticConvention,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_space_limit: Option<usize>,
    #[serde(default)]
    pub include_below_mxc_ohmic: bool,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            static_convention: StaticConvention::Net,
            margin: 1.0,
            readout_space_limit: Some(24),
            include_below_mxc_ohmic: false,
        }
    }
}

/// The whole run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub fridge: FridgeConfig,
    pub cable: CableConfig,
    pub processor: ProcessorConfig,
    pub lines: Vec<LineConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed_loads: Vec<FixedLoadConfig>,
    #[serde(default)]
    pub budget: BudgetConfig,
    /// Extra material definition files to load on top of the built-ins.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub material_files: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::default_xld1000sl()
    }
}

/// The SC-086/50-SCN-CN cable with the published layer areas and built-in
/// property models.
pub fn sc086_cable() -> CableSpec {
    CableSpec {
        name: "SC-086/50-SCN-CN".to_owned(),
        layers: vec![
            CableLayer {
                name: "outer".to_owned(),
                area_m2: 0.2389e-6,
                conductivity: materials::outer_k(),
            },
            CableLayer {
                name: "dielectric".to_owned(),
                area_m2: 0.3098e-6,
                conductivity: materials::ptfe_k(),
            },
            CableLayer {
                name: "inner".to_owned(),
                area_m2: 0.0324e-6,
                conductivity: materials::inner_k(),
            },
        ],
        inner_area_m2: 0.0324e-6,
        resistivity: materials::inner_rho(),
    }
}

/// Everything a budget run needs, resolved to SI.
#[derive(Debug, Clone)]
pub struct SystemInputs {
    pub fridge: FridgeModel,
    pub cable: CableSpec,
    pub processor: ProcessorModel,
    pub fixed_per_readout: Vec<FixedLoad>,
    pub options: BudgetOptions,
    pub library: MaterialLibrary,
}

impl RunConfig {
    /// Default model: XLD1000-SL fridge, SC-086 cable, 12 x 12 processor,
    /// 20 dB flux-line pads at 4K, the standard TWPA pump chain, and one
    /// 7.8 mW LNA per readout circuit at the 4K stage.
    pub fn default_xld1000sl() -> Self {
        let fridge = FridgeModel::xld1000sl();
        let stages = fridge
            .stages
            .iter()
            .map(|s| StageConfig {
                name: s.name.clone(),
                temperature_k: s.temperature_k,
                cooling_power_w: s.cooling_power_w,
                incoming_length_m: s.incoming_length_m,
            })
            .collect();
        let pad_4k: BTreeMap<String, f64> = [("4K".to_owned(), 20.0)].into();
        let pump_pads: BTreeMap<String, f64> = [
            ("4K".to_owned(), 10.0),
            ("Still".to_owned(), 10.0),
            ("CP".to_owned(), 10.0),
        ]
        .into();
        Self {
            fridge: FridgeConfig {
                name: fridge.name.clone(),
                below_mxc_length_m: fridge.below_mxc_length_m,
                line_capacity: fridge.line_capacity,
                z0_ohm: fridge.z0_ohm,
                stages,
            },
            cable: CableConfig {
                name: "SC-086/50-SCN-CN".to_owned(),
                resistivity_material: materials::INNER_RHO_NAME.to_owned(),
                layers: vec![
                    LayerConfig {
                        name: "outer".to_owned(),
                        area_mm2: 0.2389,
                        material: materials::OUTER_K_NAME.to_owned(),
                    },
                    LayerConfig {
                        name: "dielectric".to_owned(),
                        area_mm2: 0.3098,
                        material: materials::PTFE_K_NAME.to_owned(),
                    },
                    LayerConfig {
                        name: "inner".to_owned(),
                        area_mm2: 0.0324,
                        material: materials::INNER_K_NAME.to_owned(),
                    },
                ],
            },
            processor: ProcessorConfig {
                n: 12,
                readout_multiplex: 6,
            },
            lines: vec![
                LineConfig {
                    kind: LineKind::QubitXy,
                    current_ma: None,
                    power_dbm: None,
                    attenuation_db: BTreeMap::new(),
                },
                LineConfig {
                    kind: LineKind::QubitFlux,
                    current_ma: Some(0.4),
                    power_dbm: None,
                    attenuation_db: pad_4k.clone(),
                },
                LineConfig {
                    kind: LineKind::CouplerFlux,
                    current_ma: Some(0.4),
                    power_dbm: None,
                    attenuation_db: pad_4k,
                },
                LineConfig {
                    kind: LineKind::ReadIn,
                    current_ma: None,
                    power_dbm: None,
                    attenuation_db: BTreeMap::new(),
                },
                LineConfig {
                    kind: LineKind::ReadOut,
                    current_ma: None,
                    power_dbm: None,
                    attenuation_db: BTreeMap::new(),
                },
                LineConfig {
                    kind: LineKind::TwpaPump,
                    current_ma: None,
                    power_dbm: Some(-40.0),
                    attenuation_db: pump_pads,
                },
            ],
            fixed_loads: vec![FixedLoadConfig {
                stage: "4K".to_owned(),
                power_w: 7.8e-3,
                label: "LNA".to_owned(),
            }],
            budget: BudgetConfig::default(),
            material_files: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::from_toml(&text)?;
        // material file paths are relative to the config file
        if let Some(dir) = path.parent() {
            for f in &mut config.material_files {
                let p = Path::new(f);
                if p.is_relative() {
                    *f = dir.join(p).display().to_string();
                }
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Validate and convert to SI model inputs.
    pub fn resolve(&self) -> Result<SystemInputs> {
        let fridge = FridgeModel {
            name: self.fridge.name.clone(),
            stages: self
                .fridge
                .stages
                .iter()
                .map(|s| Stage {
                    name: s.name.clone(),
                    temperature_k: s.temperature_k,
                    cooling_power_w: s.cooling_power_w,
                    incoming_length_m: s.incoming_length_m,
                })
                .collect(),
            below_mxc_length_m: self.fridge.below_mxc_length_m,
            line_capacity: self.fridge.line_capacity,
            z0_ohm: self.fridge.z0_ohm,
        };
        fridge.validate()?;

        let mut library = MaterialLibrary::builtin();
        for file in &self.material_files {
            let text = std::fs::read_to_string(file)?;
            library.insert(materials::from_material_file(&text)?);
        }

        let layers = self
            .cable
            .layers
            .iter()
            .map(|l| {
                Ok(CableLayer {
                    name: l.name.clone(),
                    area_m2: l.area_mm2 * 1e-6,
                    conductivity: library.get(&l.material)?.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let inner_area_m2 = layers
            .iter()
            .find(|l| l.name == "inner")
            .map(|l| l.area_m2)
            .ok_or_else(|| {
                Error::Config(format!(
                    "cable {}: needs a layer named `inner` for the resistance model",
                    self.cable.name
                ))
            })?;
        let cable = CableSpec {
            name: self.cable.name.clone(),
            layers,
            inner_area_m2,
            resistivity: library.get(&self.cable.resistivity_material)?.clone(),
        };
        cable.validate()?;

        let line_templates = self
            .lines
            .iter()
            .map(|l| {
                let spec = LineSpec {
                    kind: l.kind,
                    attenuation_db: l
                        .attenuation_db
                        .iter()
                        .map(|(s, db)| (s.clone(), *db))
                        .collect(),
                    target_current_a: l.current_ma.map(|ma| ma * 1e-3),
                    pump_power_w: l.power_dbm.map(dbm_to_watts),
                    include_below_mxc_ohmic: self.budget.include_below_mxc_ohmic,
                };
                spec.validate(&fridge)?;
                if spec.kind.carries_dc_current() && spec.target_current_a.is_none() {
                    return Err(Error::Config(format!(
                        "line {}: DC flux lines need current_mA",
                        spec.kind
                    )));
                }
                if spec.kind == LineKind::TwpaPump && spec.pump_power_w.is_none() {
                    return Err(Error::Config("line twpa_pump: needs power_dBm".to_owned()));
                }
                Ok(spec)
            })
            .collect::<Result<Vec<_>>>()?;

        let processor = ProcessorModel {
            n: self.processor.n,
            readout_multiplex: self.processor.readout_multiplex,
            line_templates,
        };
        processor.validate()?;

        let fixed_per_readout = self
            .fixed_loads
            .iter()
            .map(|f| {
                fridge.stage_index(&f.stage)?;
                if f.power_w < 0.0 {
                    return Err(Error::Config(format!(
                        "fixed load {}: negative power",
                        f.label
                    )));
                }
                Ok(FixedLoad {
                    stage: f.stage.clone(),
                    power_w: f.power_w,
                    label: f.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        if !(self.budget.margin > 0.0 && self.budget.margin <= 1.0) {
            return Err(Error::Config(format!(
                "margin must be in (0, 1], got {}",
                self.budget.margin
            )));
        }

        Ok(SystemInputs {
            fridge,
            cable,
            processor,
            fixed_per_readout,
            options: BudgetOptions {
                static_convention: self.budget.static_convention,
                margin: self.budget.margin,
                readout_space_limit: self.budget.readout_space_limit,
            },
            library,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversion_round_trips() {
        assert!((dbm_to_watts(-40.0) - 1e-7).abs() < 1e-20);
        assert!((watts_to_dbm(1e-7) - -40.0).abs() < 1e-12);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn default_config_resolves() {
        let inputs = RunConfig::default_xld1000sl().resolve().unwrap();
        assert_eq!(inputs.fridge.stages.len(), 6);
        assert_eq!(inputs.cable.layers.len(), 3);
        assert_eq!(inputs.processor.line_templates.len(), 6);
        assert_eq!(inputs.fixed_per_readout.len(), 1);
        let flux = inputs.processor.template(LineKind::QubitFlux).unwrap();
        assert_eq!(flux.target_current_a, Some(0.4e-3));
        let pump = inputs.processor.template(LineKind::TwpaPump).unwrap();
        assert!((pump.pump_power_w.unwrap() - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn toml_round_trip_preserves_the_model() {
        let config = RunConfig::default_xld1000sl();
        let text = config.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        let a = config.resolve().unwrap();
        let b = back.resolve().unwrap();
        assert_eq!(a.fridge.stages.len(), b.fridge.stages.len());
        for (x, y) in a.fridge.stages.iter().zip(b.fridge.stages.iter()) {
            assert_eq!(x.temperature_k.to_bits(), y.temperature_k.to_bits());
        }
        for (x, y) in a.cable.layers.iter().zip(b.cable.layers.iter()) {
            assert_eq!(x.area_m2.to_bits(), y.area_m2.to_bits());
        }
    }

    #[test]
    fn bad_references_are_caught() {
        let mut config = RunConfig::default_xld1000sl();
        config.cable.layers[0].material = "nonsense".to_owned();
        assert!(matches!(config.resolve(), Err(Error::UnknownMaterial(_))));

        let mut config = RunConfig::default_xld1000sl();
        config.fixed_loads[0].stage = "40K".to_owned();
        assert!(matches!(config.resolve(), Err(Error::UnknownStage(_))));

        let mut config = RunConfig::default_xld1000sl();
        config.budget.margin = 0.0;
        assert!(config.resolve().is_err());
    }

    #[test]
    fn flux_line_without_current_is_rejected() {
        let mut config = RunConfig::default_xld1000sl();
        for line in &mut config.lines {
            if line.kind == LineKind::QubitFlux {
                line.current_ma = None;
            }
        }
        assert!(config.resolve().is_err());
    }
}
