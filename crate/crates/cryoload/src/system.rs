//! Fridge model, processor sizing, and per-stage budget assembly.
//!
//! A budget run takes a processor size, multiplies the per-line static and
//! active loads by the line counts the processor needs, adds fixed
//! dissipators (LNAs), and compares each stage total against its cooling
//! power. Sweeps over processor sizes are embarrassingly parallel and run on
//! rayon when the `parallel` feature (default) is enabled, merging results in
//! index order.

use crate::attenuators::{line_active_loads, twpa_pump_loads, FixedLoad, LineKind, LineSpec};
use crate::cables::{stage_static_load, CableSpec, Segment, StaticConvention};
use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One thermally anchored stage of the dilution refrigerator.
#[derive(Debug, Clone)]
pub struct Stage {
    pub name: String,
    pub temperature_k: f64,
    /// Absent for the room-temperature plate.
    pub cooling_power_w: Option<f64>,
    /// Length of the cable run arriving from the stage above; absent for the
    /// topmost stage.
    pub incoming_length_m: Option<f64>,
}

/// Ordered stage list (hottest first) plus fridge-wide wiring constants.
#[derive(Debug, Clone)]
pub struct FridgeModel {
    pub name: String,
    pub stages: Vec<Stage>,
    /// Isothermal run from the MXC plate to the processor package, m.
    pub below_mxc_length_m: f64,
    /// Number of cables the wiring option can hold.
    pub line_capacity: usize,
    /// Characteristic impedance of the signal lines, Ω.
    pub z0_ohm: f64,
}

impl FridgeModel {
    /// Bluefors XLD1000-SL with two PT-420 pulse tubes and HDW wiring.
    pub fn xld1000sl() -> Self {
        let stage = |name: &str, t: f64, p: Option<f64>, len: Option<f64>| Stage {
            name: name.to_owned(),
            temperature_k: t,
            cooling_power_w: p,
            incoming_length_m: len,
        };
        Self {
            name: "XLD1000-SL".to_owned(),
            stages: vec![
                stage("300K", 297.0, None, None),
                stage("50K", 40.0, Some(30.0), Some(0.3053)),
                stage("4K", 3.5, Some(0.7), Some(0.3155)),
                stage("Still", 1.4, Some(7e-3), Some(0.2775)),
                stage("CP", 0.2, Some(1e-3), Some(0.1965)),
                stage("MXC", 0.02, Some(30e-6), Some(0.1965)),
            ],
            below_mxc_length_m: 0.1965,
            line_capacity: 1008,
            z0_ohm: 50.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.len() < 2 {
            return Err(Error::Config("fridge needs at least two stages".into()));
        }
        for pair in self.stages.windows(2) {
            if pair[1].temperature_k >= pair[0].temperature_k {
                return Err(Error::Config(format!(
                    "stage temperatures must strictly decrease: {} ({} K) -> {} ({} K)",
                    pair[0].name, pair[0].temperature_k, pair[1].name, pair[1].temperature_k
                )));
            }
        }
        for (i, s) in self.stages.iter().enumerate() {
            if let Some(p) = s.cooling_power_w {
                if !(p > 0.0) {
                    return Err(Error::Config(format!(
                        "stage {}: cooling power must be positive",
                        s.name
                    )));
                }
            }
            if i > 0 {
                match s.incoming_length_m {
                    Some(l) if l > 0.0 => {}
                    _ => {
                        return Err(Error::Config(format!(
                            "stage {}: needs a positive incoming cable length",
                            s.name
                        )));
                    }
                }
            }
        }
        if self.line_capacity == 0 {
            return Err(Error::Config("line capacity must be positive".into()));
        }
        if !(self.below_mxc_length_m >= 0.0) {
            return Err(Error::Config(
                "below-MXC length must be non-negative".into(),
            ));
        }
        if !(self.z0_ohm > 0.0) {
            return Err(Error::Config("z0 must be positive".into()));
        }
        Ok(())
    }

    pub fn stage_index(&self, name: &str) -> Result<usize> {
        self.stages
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownStage(name.to_owned()))
    }

    /// Stage-to-stage cable segments, top of the fridge downward.
    /// `segments()[i]` hangs between `stages[i]` and `stages[i + 1]`.
    pub fn segments(&self) -> Vec<Segment> {
        self.stages
            .windows(2)
            .map(|pair| Segment {
                upper_stage: pair[0].name.clone(),
                lower_stage: pair[1].name.clone(),
                length_m: pair[1].incoming_length_m.expect("validated"),
                t_high_k: pair[0].temperature_k,
                t_low_k: pair[1].temperature_k,
            })
            .collect()
    }
}

/// An n x n flux-tunable transmon array with tunable couplers and multiplexed
/// readout, plus the line templates each line kind uses.
#[derive(Debug, Clone)]
pub struct ProcessorModel {
    pub n: u32,
    pub readout_multiplex: u32,
    pub line_templates: Vec<LineSpec>,
}

impl ProcessorModel {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("processor edge n must be >= 1".into()));
        }
        if self.readout_multiplex < 1 {
            return Err(Error::Config(
                "readout multiplex factor must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn template(&self, kind: LineKind) -> Option<&LineSpec> {
        self.line_templates.iter().find(|l| l.kind == kind)
    }
}

/// Signal-line counts a processor needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct LineCounts {
    pub qubits: usize,
    pub couplers: usize,
    pub readout_circuits: usize,
    pub qubit_xy: usize,
    pub qubit_flux: usize,
    pub coupler_flux: usize,
    pub read_in: usize,
    pub read_out: usize,
    pub twpa_pump: usize,
    pub total: usize,
}

impl LineCounts {
    pub fn for_kind(&self, kind: LineKind) -> usize {
        match kind {
            LineKind::QubitXy => self.qubit_xy,
            LineKind::QubitFlux => self.qubit_flux,
            LineKind::CouplerFlux => self.coupler_flux,
            LineKind::ReadIn => self.read_in,
            LineKind::ReadOut => self.read_out,
            LineKind::TwpaPump => self.twpa_pump,
        }
    }
}

/// Line counts for an n x n array: n² qubits with XY + flux lines each,
/// 2n(n-1) coupler flux lines, and three lines per ceil(n²/m) readout chain.
pub fn processor_line_counts(p: &ProcessorModel) -> LineCounts {
    let n = p.n as usize;
    let qubits = n * n;
    let couplers = 2 * n * n.saturating_sub(1);
    let m = p.readout_multiplex as usize;
    let readout_circuits = qubits.div_ceil(m);
    LineCounts {
        qubits,
        couplers,
        readout_circuits,
        qubit_xy: qubits,
        qubit_flux: qubits,
        coupler_flux: couplers,
        read_in: readout_circuits,
        read_out: readout_circuits,
        twpa_pump: readout_circuits,
        total: 2 * qubits + couplers + 3 * readout_circuits,
    }
}

/// Budget evaluation knobs.
#[derive(Debug, Clone)]
pub struct BudgetOptions {
    pub static_convention: StaticConvention,
    /// A stage passes when fraction <= margin. 1.0 means no engineering margin.
    pub margin: f64,
    /// Annotate (not enforce) when the readout chain count exceeds what fits
    /// at the MXC.
    pub readout_space_limit: Option<usize>,
}

impl Default for BudgetOptions {
    fn default() -> Self {
        Self {
            static_convention: StaticConvention::Net,
            margin: 1.0,
            readout_space_limit: Some(24),
        }
    }
}

/// Per-stage slice of a budget.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StageBudget {
    pub stage: String,
    pub temperature_k: f64,
    pub static_w: f64,
    pub active_w: f64,
    pub fixed_w: f64,
    pub total_w: f64,
    pub cooling_power_w: Option<f64>,
    /// total / cooling power; absent for the room-temperature plate.
    pub fraction: Option<f64>,
    pub pass: bool,
}

/// Full budget for one processor size.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BudgetReport {
    pub n: u32,
    pub counts: LineCounts,
    pub line_capacity: usize,
    pub within_capacity: bool,
    pub stages: Vec<StageBudget>,
    pub all_pass: bool,
    pub margin: f64,
    pub notes: Vec<String>,
}

impl BudgetReport {
    /// Stage with the largest cooling-power fraction.
    pub fn max_fraction_stage(&self) -> Option<&StageBudget> {
        self.stages
            .iter()
            .filter(|s| s.fraction.is_some())
            .max_by(|a, b| a.fraction.partial_cmp(&b.fraction).expect("finite"))
    }
}

/// Assemble the per-stage budget for one processor size.
///
/// static = total lines x per-cable stage load; active = flux-line Ohmic and
/// attenuator loads plus TWPA pump loads; fixed = per-readout-circuit
/// dissipators. Errors with `CapacityExceeded` when the processor needs more
/// lines than the fridge holds.
pub fn system_budget(
    processor: &ProcessorModel,
    fridge: &FridgeModel,
    cable: &CableSpec,
    fixed_per_readout: &[FixedLoad],
    options: &BudgetOptions,
) -> Result<BudgetReport> {
    processor.validate()?;
    let counts = processor_line_counts(processor);
    if counts.total > fridge.line_capacity {
        return Err(Error::CapacityExceeded {
            required: counts.total,
            capacity: fridge.line_capacity,
        });
    }

    let n_stages = fridge.stages.len();
    let mut static_w = vec![0.0; n_stages];
    let mut active_w = vec![0.0; n_stages];
    let mut fixed_w = vec![0.0; n_stages];

    for (i, stage) in fridge.stages.iter().enumerate() {
        static_w[i] = stage_static_load(
            cable,
            fridge,
            &stage.name,
            counts.total,
            options.static_convention,
        )?;
    }

    for line in &processor.line_templates {
        let count = counts.for_kind(line.kind) as f64;
        if count == 0.0 {
            continue;
        }
        match line.kind {
            LineKind::TwpaPump => {
                let loads = twpa_pump_loads(line, fridge, cable)?;
                for (i, w) in active_w.iter_mut().enumerate() {
                    *w += count * loads.total_at(i);
                }
            }
            _ => {
                let loads = line_active_loads(line, fridge, cable)?;
                for (i, w) in active_w.iter_mut().enumerate() {
                    *w += count * loads.total_at(i);
                }
            }
        }
    }

    for load in fixed_per_readout {
        let idx = fridge.stage_index(&load.stage)?;
        fixed_w[idx] += counts.readout_circuits as f64 * load.power_w;
    }

    let mut stages = Vec::with_capacity(n_stages);
    let mut all_pass = true;
    for (i, stage) in fridge.stages.iter().enumerate() {
        let total = static_w[i] + active_w[i] + fixed_w[i];
        let fraction = stage.cooling_power_w.map(|p| total / p);
        let pass = fraction.map(|f| f <= options.margin).unwrap_or(true);
        all_pass &= pass;
        stages.push(StageBudget {
            stage: stage.name.clone(),
            temperature_k: stage.temperature_k,
            static_w: static_w[i],
            active_w: active_w[i],
            fixed_w: fixed_w[i],
            total_w: total,
            cooling_power_w: stage.cooling_power_w,
            fraction,
            pass,
        });
    }

    let mut notes = Vec::new();
    if let Some(limit) = options.readout_space_limit {
        if counts.readout_circuits > limit {
            notes.push(format!(
                "{} readout chains exceed the ~{limit} that fit at the MXC plate",
                counts.readout_circuits
            ));
        }
    }

    Ok(BudgetReport {
        n: processor.n,
        counts,
        line_capacity: fridge.line_capacity,
        within_capacity: true,
        stages,
        all_pass,
        margin: options.margin,
        notes,
    })
}

/// One sweep entry; capacity failures are flagged and the sweep continues.
#[derive(Debug)]
pub struct SweepEntry {
    pub n: u32,
    pub counts: LineCounts,
    pub result: Result<BudgetReport>,
}

fn sweep_one(
    n: u32,
    template: &ProcessorModel,
    fridge: &FridgeModel,
    cable: &CableSpec,
    fixed_per_readout: &[FixedLoad],
    options: &BudgetOptions,
) -> SweepEntry {
    let processor = ProcessorModel {
        n,
        readout_multiplex: template.readout_multiplex,
        line_templates: template.line_templates.clone(),
    };
    let counts = processor_line_counts(&processor);
    SweepEntry {
        n,
        counts,
        result: system_budget(&processor, fridge, cable, fixed_per_readout, options),
    }
}

/// Sequential sweep over processor edge sizes, in index order.
pub fn sweep_sizes_serial(
    n_range: std::ops::RangeInclusive<u32>,
    template: &ProcessorModel,
    fridge: &FridgeModel,
    cable: &CableSpec,
    fixed_per_readout: &[FixedLoad],
    options: &BudgetOptions,
) -> Vec<SweepEntry> {
    n_range
        .map(|n| sweep_one(n, template, fridge, cable, fixed_per_readout, options))
        .collect()
}

/// Sweep over processor edge sizes; data-parallel over n with results merged
/// in index order.
#[cfg(feature = "parallel")]
pub fn sweep_sizes(
    n_range: std::ops::RangeInclusive<u32>,
    template: &ProcessorModel,
    fridge: &FridgeModel,
    cable: &CableSpec,
    fixed_per_readout: &[FixedLoad],
    options: &BudgetOptions,
) -> Vec<SweepEntry> {
    n_range
        .into_par_iter()
        .map(|n| sweep_one(n, template, fridge, cable, fixed_per_readout, options))
        .collect()
}

/// Sweep over processor edge sizes (sequential fallback).
#[cfg(not(feature = "parallel"))]
pub fn sweep_sizes(
    n_range: std::ops::RangeInclusive<u32>,
    template: &ProcessorModel,
    fridge: &FridgeModel,
    cable: &CableSpec,
    fixed_per_readout: &[FixedLoad],
    options: &BudgetOptions,
) -> Vec<SweepEntry> {
    sweep_sizes_serial(n_range, template, fridge, cable, fixed_per_readout, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config;

    fn counts_for(n: u32) -> LineCounts {
        processor_line_counts(&ProcessorModel {
            n,
            readout_multiplex: 6,
            line_templates: vec![],
        })
    }

    #[test]
    fn line_counts_match_the_size_table() {
        let expected = [
            (10, 100, 180, 17, 431),
            (11, 121, 220, 21, 525),
            (12, 144, 264, 24, 624),
            (13, 169, 312, 29, 737),
            (14, 196, 364, 33, 855),
            (15, 225, 420, 38, 984),
            (16, 256, 480, 43, 1121),
        ];
        for (n, qubits, couplers, readout, total) in expected {
            let c = counts_for(n);
            assert_eq!(c.qubits, qubits, "n={n}");
            assert_eq!(c.couplers, couplers, "n={n}");
            assert_eq!(c.readout_circuits, readout, "n={n}");
            assert_eq!(c.total, total, "n={n}");
        }
    }

    #[test]
    fn single_qubit_processor() {
        let c = counts_for(1);
        assert_eq!(c.qubits, 1);
        assert_eq!(c.couplers, 0);
        assert_eq!(c.readout_circuits, 1);
        assert_eq!(c.total, 5);
    }

    #[test]
    fn capacity_is_enforced() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        let mut processor = inputs.processor.clone();
        processor.n = 16;
        match system_budget(
            &processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        ) {
            Err(Error::CapacityExceeded { required, capacity }) => {
                assert_eq!(required, 1121);
                assert_eq!(capacity, 1008);
            }
            other => panic!("expected CapacityExceeded, got {other:?}"),
        }
    }

    #[test]
    fn budget_decomposition_is_exact() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        let report = system_budget(
            &inputs.processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        )
        .unwrap();
        for s in &report.stages {
            assert_eq!(
                s.total_w,
                s.static_w + s.active_w + s.fixed_w,
                "{}",
                s.stage
            );
        }
        // LNA belongs to the 4K stage only
        for s in &report.stages {
            if s.stage == "4K" {
                assert!(s.fixed_w > 0.0);
            } else {
                assert_eq!(s.fixed_w, 0.0);
            }
        }
    }

    #[test]
    fn sweep_is_monotone_and_ordered() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        let entries = sweep_sizes(
            10..=15,
            &inputs.processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        );
        assert_eq!(entries.len(), 6);
        for (i, e) in entries.iter().enumerate() {
            assert_eq!(e.n, 10 + i as u32);
        }
        let mut prev: Option<Vec<f64>> = None;
        for e in &entries {
            let report = e.result.as_ref().unwrap();
            let totals: Vec<f64> = report.stages.iter().map(|s| s.total_w).collect();
            if let Some(p) = &prev {
                for (a, b) in p.iter().zip(totals.iter()) {
                    assert!(b >= a, "per-stage total decreased in n");
                }
            }
            prev = Some(totals);
        }
    }

    #[test]
    fn sweep_flags_capacity_and_continues() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        let entries = sweep_sizes(
            15..=16,
            &inputs.processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        );
        assert!(entries[0].result.is_ok());
        assert!(matches!(
            entries[1].result,
            Err(Error::CapacityExceeded { required: 1121, .. })
        ));
    }

    #[test]
    fn empty_sweep_range_is_empty() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        #[allow(clippy::reversed_empty_ranges)]
        let entries = sweep_sizes(
            12..=11,
            &inputs.processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        );
        assert!(entries.is_empty());
    }

    #[test]
    fn parallel_and_serial_sweeps_agree() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        let opts = BudgetOptions::default();
        let par = sweep_sizes(
            10..=14,
            &inputs.processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &opts,
        );
        let ser = sweep_sizes_serial(
            10..=14,
            &inputs.processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &opts,
        );
        for (a, b) in par.iter().zip(ser.iter()) {
            assert_eq!(a.n, b.n);
            let (ra, rb) = (a.result.as_ref().unwrap(), b.result.as_ref().unwrap());
            for (sa, sb) in ra.stages.iter().zip(rb.stages.iter()) {
                assert_eq!(sa.total_w.to_bits(), sb.total_w.to_bits());
            }
        }
    }

    #[test]
    fn fridge_validation_catches_bad_ordering() {
        let mut fridge = FridgeModel::xld1000sl();
        fridge.stages.swap(1, 2);
        assert!(fridge.validate().is_err());
        assert!(FridgeModel::xld1000sl().validate().is_ok());
    }

    #[test]
    fn readout_space_note_appears_beyond_the_limit() {
        let inputs = config::RunConfig::default_xld1000sl().resolve().unwrap();
        let mut processor = inputs.processor.clone();
        processor.n = 13; // 29 readout chains
        let report = system_budget(
            &processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        )
        .unwrap();
        assert_eq!(report.notes.len(), 1);
        processor.n = 12; // 24 chains, at the limit
        let report = system_budget(
            &processor,
            &inputs.fridge,
            &inputs.cable,
            &inputs.fixed_per_readout,
            &BudgetOptions::default(),
        )
        .unwrap();
        assert!(report.notes.is_empty());
    }
}
