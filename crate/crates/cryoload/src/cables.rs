//! Static conduction loads of a multi-layer coaxial cable.
//!
//! Each cable layer is an independent parallel thermal path (radial transfer
//! between layers is ignored); the per-segment load is
//!
//! ```text
//! q_layer = (A / L) * ∫ k(T) dT      over the segment's temperature span
//! ```
//!
//! and the cable load is the sum over layers. Per-stage loads are the net of
//! incoming and outgoing segment loads, with the incoming-only reading
//! available behind [`StaticConvention`] for diagnosis.

use crate::error::{Error, Result};
use crate::materials::PolyLogModel;
use crate::system::FridgeModel;

/// One material layer of a coaxial cable.
#[derive(Debug, Clone)]
pub struct CableLayer {
    pub name: String,
    /// Cross-sectional area of the material in this layer, m² (annular areas
    /// already have the inner layers subtracted).
    pub area_m2: f64,
    pub conductivity: PolyLogModel,
}

/// Cable geometry plus the inner-conductor resistivity model.
#[derive(Debug, Clone)]
pub struct CableSpec {
    pub name: String,
    pub layers: Vec<CableLayer>,
    pub inner_area_m2: f64,
    pub resistivity: PolyLogModel,
}

impl CableSpec {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config(format!("cable {}: no layers", self.name)));
        }
        for layer in &self.layers {
            if !(layer.area_m2 > 0.0) {
                return Err(Error::Config(format!(
                    "cable {}: layer {} has non-positive area",
                    self.name, layer.name
                )));
            }
        }
        if !(self.inner_area_m2 > 0.0) {
            return Err(Error::Config(format!(
                "cable {}: inner conductor area must be positive",
                self.name
            )));
        }
        Ok(())
    }
}

/// A cable run between two thermally anchored stages.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub upper_stage: String,
    pub lower_stage: String,
    pub length_m: f64,
    pub t_high_k: f64,
    pub t_low_k: f64,
}

impl Segment {
    pub fn new(
        upper_stage: impl Into<String>,
        lower_stage: impl Into<String>,
        length_m: f64,
        t_high_k: f64,
        t_low_k: f64,
    ) -> Result<Self> {
        if !(length_m > 0.0) {
            return Err(Error::Config(format!(
                "segment length {length_m} m must be positive"
            )));
        }
        if !(t_high_k > t_low_k) {
            return Err(Error::Config(format!(
                "segment needs t_high > t_low, got {t_high_k} <= {t_low_k}"
            )));
        }
        Ok(Self {
            upper_stage: upper_stage.into(),
            lower_stage: lower_stage.into(),
            length_m,
            t_high_k,
            t_low_k,
        })
    }
}

/// Conduction load of a single layer across a segment, W.
pub fn layer_static_load(layer: &CableLayer, segment: &Segment) -> Result<f64> {
    let integral = layer
        .conductivity
        .integrate(segment.t_low_k, segment.t_high_k)?;
    Ok(layer.area_m2 / segment.length_m * integral)
}

/// Conduction load of the whole cable across a segment: sum over layers, W.
pub fn cable_static_load(cable: &CableSpec, segment: &Segment) -> Result<f64> {
    let mut total = 0.0;
    for layer in &cable.layers {
        total += layer_static_load(layer, segment)?;
    }
    Ok(total)
}

/// Which per-stage static reading to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticConvention {
    /// Incoming minus outgoing segment load; matches the published per-stage
    /// table. Default.
    #[default]
    Net,
    /// Incoming segment load only, for diagnosis.
    Incoming,
}

/// Per-stage static load for `count` identical cables, W.
///
/// The lowest cabled stage has no outgoing term, and the isothermal
/// below-MXC run contributes no static load at all. The topmost plate is a
/// heat source, not a cooled stage; its load is reported as zero.
pub fn stage_static_load(
    cable: &CableSpec,
    fridge: &FridgeModel,
    stage: &str,
    count: usize,
    convention: StaticConvention,
) -> Result<f64> {
    let idx = fridge.stage_index(stage)?;
    if idx == 0 {
        return Ok(0.0);
    }
    let segments = fridge.segments();
    // segments[i] ends at stage i+1
    let incoming = cable_static_load(cable, &segments[idx - 1])?;
    let outgoing = match convention {
        StaticConvention::Incoming => 0.0,
        StaticConvention::Net => {
            if idx < segments.len() {
                cable_static_load(cable, &segments[idx])?
            } else {
                0.0
            }
        }
    };
    Ok(count as f64 * (incoming - outgoing))
}

/// Shorthand for the default (net) reading.
pub fn stage_net_static(
    cable: &CableSpec,
    fridge: &FridgeModel,
    stage: &str,
    count: usize,
) -> Result<f64> {
    stage_static_load(cable, fridge, stage, count, StaticConvention::Net)
}
