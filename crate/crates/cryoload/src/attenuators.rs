//! Attenuator synthesis and active (Ohmic) heat loads.
//!
//! DC flux-bias lines carry a constant current that is set at the processor
//! and back-propagated upward: each T-pad needs a larger input current to
//! deliver its output current into the series resistance below it. Ohmic and
//! resistor dissipation is charged to the fridge stage the heat sinks into.
//! The TWPA pump line is a matched microwave tone and is modeled as RF power
//! flow instead.

use crate::cables::{CableSpec, Segment};
use crate::error::{Error, Result};
use crate::system::FridgeModel;

/// Matched three-resistor T attenuator: series r1, shunt r3, series r2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TPad {
    pub attenuation_db: f64,
    pub z0_ohm: f64,
    pub r1_ohm: f64,
    pub r2_ohm: f64,
    pub r3_ohm: f64,
}

/// Resistor values matching impedance `z0` at the given attenuation:
/// r1 = r2 = z0·(a-1)/(a+1), r3 = 2·z0·a/(a²-1) with a = 10^(dB/20).
pub fn synthesize_tpad(db: f64, z0: f64) -> Result<TPad> {
    if !(db > 0.0) {
        return Err(Error::InvalidAttenuation(db));
    }
    if !(z0 > 0.0) {
        return Err(Error::Config(format!("z0 must be positive, got {z0}")));
    }
    let a = 10f64.powf(db / 20.0);
    let series = z0 * (a - 1.0) / (a + 1.0);
    let shunt = 2.0 * z0 * a / (a * a - 1.0);
    Ok(TPad {
        attenuation_db: db,
        z0_ohm: z0,
        r1_ohm: series,
        r2_ohm: series,
        r3_ohm: shunt,
    })
}

/// Functional role of a signal line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    QubitXy,
    QubitFlux,
    CouplerFlux,
    ReadIn,
    ReadOut,
    TwpaPump,
}

impl LineKind {
    pub fn carries_dc_current(self) -> bool {
        matches!(self, LineKind::QubitFlux | LineKind::CouplerFlux)
    }

    pub fn label(self) -> &'static str {
        match self {
            LineKind::QubitXy => "qubit_xy",
            LineKind::QubitFlux => "qubit_flux",
            LineKind::CouplerFlux => "coupler_flux",
            LineKind::ReadIn => "read_in",
            LineKind::ReadOut => "read_out",
            LineKind::TwpaPump => "twpa_pump",
        }
    }
}

impl std::fmt::Display for LineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One signal line template: attenuation per stage plus its drive level.
#[derive(Debug, Clone)]
pub struct LineSpec {
    pub kind: LineKind,
    /// Stage name -> attenuation in dB. Zero entries mean no pad installed.
    pub attenuation_db: Vec<(String, f64)>,
    /// Required DC current at the MXC, A. DC flux lines only.
    pub target_current_a: Option<f64>,
    /// RF power at the directional-coupler input, W. TWPA pump only.
    pub pump_power_w: Option<f64>,
    /// Charge the isothermal below-MXC run's Ohmic load to the MXC stage.
    /// The published per-line table excludes it; kept as a flag for diagnosis.
    pub include_below_mxc_ohmic: bool,
}

impl LineSpec {
    pub fn dc(kind: LineKind, target_current_a: f64, attenuation_db: Vec<(String, f64)>) -> Self {
        Self {
            kind,
            attenuation_db,
            target_current_a: Some(target_current_a),
            pump_power_w: None,
            include_below_mxc_ohmic: false,
        }
    }

    pub fn rf(kind: LineKind, attenuation_db: Vec<(String, f64)>) -> Self {
        Self {
            kind,
            attenuation_db,
            target_current_a: None,
            pump_power_w: None,
            include_below_mxc_ohmic: false,
        }
    }

    pub fn twpa_pump(pump_power_w: f64, attenuation_db: Vec<(String, f64)>) -> Self {
        Self {
            kind: LineKind::TwpaPump,
            attenuation_db,
            target_current_a: None,
            pump_power_w: Some(pump_power_w),
            include_below_mxc_ohmic: false,
        }
    }

    fn attenuation_at(&self, stage: &str) -> f64 {
        self.attenuation_db
            .iter()
            .find(|(s, _)| s == stage)
            .map(|&(_, db)| db)
            .unwrap_or(0.0)
    }

    pub fn validate(&self, fridge: &FridgeModel) -> Result<()> {
        for (stage, db) in &self.attenuation_db {
            fridge.stage_index(stage)?;
            if *db < 0.0 {
                return Err(Error::InvalidAttenuation(*db));
            }
        }
        if let Some(i) = self.target_current_a {
            if i < 0.0 {
                return Err(Error::Config(format!("negative target current {i} A")));
            }
        }
        if let Some(p) = self.pump_power_w {
            if p < 0.0 {
                return Err(Error::Config(format!("negative pump power {p} W")));
            }
        }
        Ok(())
    }
}

/// A fixed dissipator bolted to one stage (e.g. an LNA).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FixedLoad {
    pub stage: String,
    pub power_w: f64,
    pub label: String,
}

/// Inner-conductor resistance of a run of cable between `t_low` and `t_high`.
///
/// Assumes the temperature varies linearly along the cable, so the resistance
/// is the length-weighted mean resistivity: (L/A)·(1/ΔT)·∫ρ(T)dT. Isothermal
/// runs use ρ at that temperature; zero length is zero resistance.
pub fn inner_resistance(
    cable: &CableSpec,
    length_m: f64,
    t_low_k: f64,
    t_high_k: f64,
) -> Result<f64> {
    if length_m == 0.0 {
        return Ok(0.0);
    }
    let geometry = length_m / cable.inner_area_m2;
    if t_low_k == t_high_k {
        return Ok(geometry * cable.resistivity.eval(t_low_k)?);
    }
    let integral = cable.resistivity.integrate(t_low_k, t_high_k)?;
    Ok(geometry * integral / (t_high_k - t_low_k))
}

/// Resistance of one stage-to-stage segment, Ω.
pub fn segment_resistance(cable: &CableSpec, segment: &Segment) -> Result<f64> {
    inner_resistance(cable, segment.length_m, segment.t_low_k, segment.t_high_k)
}

/// DC current entering each segment of a line, top of the fridge downward.
#[derive(Debug, Clone)]
pub struct CurrentProfile {
    /// Entry current of each fridge segment, A, aligned with
    /// [`FridgeModel::segments`].
    pub segment_currents_a: Vec<f64>,
    /// Current in the isothermal below-MXC run, A.
    pub below_mxc_a: f64,
}

/// Walk the line upward from the MXC and compute the input current each
/// attenuator needs: I_in = I_out·(r2 + r3 + R_load)/r3, where R_load is the
/// series cable resistance from the pad output down to the MXC plate (the
/// chip is a short; the below-MXC run is excluded).
pub fn back_propagate_current(
    line: &LineSpec,
    fridge: &FridgeModel,
    cable: &CableSpec,
) -> Result<CurrentProfile> {
    if !line.kind.carries_dc_current() {
        return Err(Error::NoTargetCurrent(line.kind.label().to_owned()));
    }
    let target = line
        .target_current_a
        .ok_or_else(|| Error::NoTargetCurrent(line.kind.label().to_owned()))?;

    let segments = fridge.segments();
    let n_seg = segments.len();
    let resistances: Vec<f64> = segments
        .iter()
        .map(|s| segment_resistance(cable, s))
        .collect::<Result<_>>()?;

    let mut currents = vec![0.0; n_seg];
    let mut current = target;
    // r_below: series resistance strictly below the stage under consideration
    let mut r_below = 0.0;
    // segment i hangs between stage i and stage i+1; walk bottom-up
    for i in (0..n_seg).rev() {
        let lower_stage = &fridge.stages[i + 1].name;
        let db = line.attenuation_at(lower_stage);
        if db > 0.0 {
            let pad = synthesize_tpad(db, fridge.z0_ohm)?;
            current *= (pad.r2_ohm + pad.r3_ohm + r_below) / pad.r3_ohm;
        }
        currents[i] = current;
        r_below += resistances[i];
    }
    Ok(CurrentProfile {
        segment_currents_a: currents,
        below_mxc_a: target,
    })
}

/// Active load of one line split into coax and attenuator parts, W, aligned
/// with the fridge stage list.
#[derive(Debug, Clone)]
pub struct LineActiveLoads {
    pub coax_w: Vec<f64>,
    pub attenuator_w: Vec<f64>,
}

impl LineActiveLoads {
    fn zeros(n: usize) -> Self {
        Self {
            coax_w: vec![0.0; n],
            attenuator_w: vec![0.0; n],
        }
    }

    pub fn total_at(&self, idx: usize) -> f64 {
        self.coax_w[idx] + self.attenuator_w[idx]
    }
}

/// Ohmic loads of a DC line: per-segment I²R charged to the segment's lower
/// stage, plus the three-resistor dissipation of each pad at its stage.
/// RF lines with negligible current (XY, read-in/out) are all zeros.
pub fn line_active_loads(
    line: &LineSpec,
    fridge: &FridgeModel,
    cable: &CableSpec,
) -> Result<LineActiveLoads> {
    let n_stages = fridge.stages.len();
    match line.kind {
        LineKind::QubitXy | LineKind::ReadIn | LineKind::ReadOut => {
            return Ok(LineActiveLoads::zeros(n_stages));
        }
        LineKind::TwpaPump => {
            return Err(Error::NoTargetCurrent(line.kind.label().to_owned()));
        }
        LineKind::QubitFlux | LineKind::CouplerFlux => {}
    }
    if line.target_current_a == Some(0.0) {
        return Ok(LineActiveLoads::zeros(n_stages));
    }

    let profile = back_propagate_current(line, fridge, cable)?;
    let segments = fridge.segments();
    let mut loads = LineActiveLoads::zeros(n_stages);

    for (i, seg) in segments.iter().enumerate() {
        let r = segment_resistance(cable, seg)?;
        let current = profile.segment_currents_a[i];
        loads.coax_w[i + 1] += current * current * r;
    }

    // pad at stage s: the incoming segment carries I_in, the outgoing I_out
    for (i, stage) in fridge.stages.iter().enumerate() {
        let db = line.attenuation_at(&stage.name);
        if db <= 0.0 {
            continue;
        }
        let pad = synthesize_tpad(db, fridge.z0_ohm)?;
        let i_in = if i >= 1 {
            profile.segment_currents_a[i - 1]
        } else {
            // pad above the topmost segment sees the first segment's current
            // scaled back up; not part of any shipped configuration
            profile.segment_currents_a.first().copied().unwrap_or(0.0)
        };
        let i_out = profile
            .segment_currents_a
            .get(i)
            .copied()
            .unwrap_or(profile.below_mxc_a);
        let shunt = i_in - i_out;
        loads.attenuator_w[i] +=
            i_in * i_in * pad.r1_ohm + shunt * shunt * pad.r3_ohm + i_out * i_out * pad.r2_ohm;
    }

    if line.include_below_mxc_ohmic {
        let t_mxc = fridge.stages[n_stages - 1].temperature_k;
        let r = inner_resistance(cable, fridge.below_mxc_length_m, t_mxc, t_mxc)?;
        loads.coax_w[n_stages - 1] += profile.below_mxc_a * profile.below_mxc_a * r;
    }

    Ok(loads)
}

/// TWPA pump loads per stage: pad dissipation from matched power flow, the
/// 50 Ω termination at the MXC, and the (negligible) coax Ohmic loads from
/// the pump RMS current.
#[derive(Debug, Clone)]
pub struct TwpaLoads {
    pub coax_w: Vec<f64>,
    pub pad_w: Vec<f64>,
    pub termination_w: Vec<f64>,
    /// RMS current at the directional-coupler input, A.
    pub coupler_current_a: f64,
}

impl TwpaLoads {
    pub fn total_at(&self, idx: usize) -> f64 {
        self.coax_w[idx] + self.pad_w[idx] + self.termination_w[idx]
    }
}

/// Matched power-flow model of the pump line. Each pad's output power is
/// fixed by the downstream requirement, so it dissipates P_in − P_out at its
/// stage; the full coupler-input power lands in the termination at the MXC.
/// Segment RMS currents scale by √(P_in/P_out) across each pad.
pub fn twpa_pump_loads(
    line: &LineSpec,
    fridge: &FridgeModel,
    cable: &CableSpec,
) -> Result<TwpaLoads> {
    if line.kind != LineKind::TwpaPump {
        return Err(Error::Config(format!(
            "twpa_pump_loads called on a {} line",
            line.kind
        )));
    }
    let n_stages = fridge.stages.len();
    let mut loads = TwpaLoads {
        coax_w: vec![0.0; n_stages],
        pad_w: vec![0.0; n_stages],
        termination_w: vec![0.0; n_stages],
        coupler_current_a: 0.0,
    };
    let p_coupler = line.pump_power_w.unwrap_or(0.0);
    if p_coupler == 0.0 {
        return Ok(loads);
    }

    loads.termination_w[n_stages - 1] = p_coupler;
    loads.coupler_current_a = (p_coupler / fridge.z0_ohm).sqrt();

    let segments = fridge.segments();
    let mut power = p_coupler;
    let mut current = loads.coupler_current_a;
    for i in (0..segments.len()).rev() {
        let stage_idx = i + 1;
        let db = line.attenuation_at(&fridge.stages[stage_idx].name);
        if db > 0.0 {
            let p_in = power * 10f64.powf(db / 10.0);
            loads.pad_w[stage_idx] = p_in - power;
            current *= (p_in / power).sqrt();
            power = p_in;
        }
        let r = segment_resistance(cable, &segments[i])?;
        loads.coax_w[stage_idx] += current * current * r;
    }
    Ok(loads)
}
