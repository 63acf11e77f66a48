//! Temperature-dependent material property models.
//!
//! Thermal conductivity k(T) and DC electrical resistivity rho(T) are both
//! represented as degree-8 polynomials in log10(T) whose power-sum is the
//! base-10 exponent of the property value:
//!
//! ```text
//! value(T) = 10^[ a + b·log10(T) + c·log10(T)^2 + ... + i·log10(T)^8 ]
//! ```
//!
//! Outside the fitted range a model applies its extension policies: below
//! `t_min` either a straight line from the fit value at `t_min` down to the
//! origin (conductivities) or a stored constant (resistivity); above `t_max`
//! evaluation is allowed up to an explicit ceiling or forbidden.
//!
//! All values are SI: kelvin in, W·m⁻¹·K⁻¹ or Ω·m out.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::quad;

pub const POLYLOG_COEFFS: usize = 9;

/// Unit of the property a model evaluates to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    /// W·m⁻¹·K⁻¹
    ThermalConductivity,
    /// Ω·m
    Resistivity,
}

impl UnitKind {
    pub fn symbol(self) -> &'static str {
        match self {
            UnitKind::ThermalConductivity => "W/(m·K)",
            UnitKind::Resistivity => "Ω·m",
        }
    }
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Behavior below the fitted range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowExtension {
    /// Straight line from the fit value at `t_min` down to zero at T = 0.
    LinearToOrigin,
    /// The property holds a constant value below `t_min`.
    ConstantBelow(f64),
}

/// Behavior above the fitted range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HighExtension {
    /// Evaluation above `t_max` is an error.
    Forbidden,
    /// The fit polynomial keeps being evaluated up to this temperature.
    EvaluateUpTo(f64),
}

/// A 9-coefficient log10-polynomial property model with validity range and
/// out-of-range extension policies.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyLogModel {
    pub name: String,
    pub unit_kind: UnitKind,
    /// Exponent-space coefficients a..i, lowest order first.
    pub coefficients: [f64; POLYLOG_COEFFS],
    pub t_min: f64,
    pub t_max: f64,
    pub low_extension: LowExtension,
    pub high_extension: HighExtension,
    /// Source decimal strings for the coefficients, kept when the model comes
    /// from a published table so serialization reproduces them digit for digit.
    pub canonical_coefficients: Option<[&'static str; POLYLOG_COEFFS]>,
}

impl PolyLogModel {
    pub fn new(
        name: impl Into<String>,
        unit_kind: UnitKind,
        coefficients: [f64; POLYLOG_COEFFS],
        t_min: f64,
        t_max: f64,
        low_extension: LowExtension,
        high_extension: HighExtension,
    ) -> Result<Self> {
        let model = Self {
            name: name.into(),
            unit_kind,
            coefficients,
            t_min,
            t_max,
            low_extension,
            high_extension,
            canonical_coefficients: None,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max) {
            return Err(Error::InvalidModel(format!(
                "{}: need 0 < t_min < t_max, got {}..{}",
                self.name, self.t_min, self.t_max
            )));
        }
        if let HighExtension::EvaluateUpTo(hi) = self.high_extension {
            if hi < self.t_max {
                return Err(Error::InvalidModel(format!(
                    "{}: high extension bound {hi} K is below t_max {} K",
                    self.name, self.t_max
                )));
            }
        }
        if let LowExtension::ConstantBelow(v) = self.low_extension {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "{}: constant low extension must be finite and non-negative",
                    self.name
                )));
            }
        }
        // LinearToOrigin needs a finite positive anchor, which 10^poly(t_min)
        // provides as long as the power-sum is finite.
        let anchor = self.fit_value(self.t_min);
        if !anchor.is_finite() || anchor <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "{}: fit value at t_min is not finite and positive",
                self.name
            )));
        }
        Ok(())
    }

    /// Highest temperature this model may be evaluated at.
    pub fn t_eval_max(&self) -> f64 {
        match self.high_extension {
            HighExtension::Forbidden => self.t_max,
            HighExtension::EvaluateUpTo(hi) => hi,
        }
    }

    /// Raw fit polynomial, Horner form in log10(T). No range checks.
    fn fit_value(&self, t: f64) -> f64 {
        let x = t.log10();
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        10f64.powf(acc)
    }

    fn out_of_range(&self, t: f64) -> Error {
        Error::TemperatureOutOfRange {
            material: self.name.clone(),
            t,
            lo: 0.0,
            hi: self.t_eval_max(),
        }
    }

    /// Evaluate the property at temperature `t` (kelvin).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || t > self.t_eval_max() {
            return Err(self.out_of_range(t));
        }
        Ok(self.eval_extended(t))
    }

    /// Evaluation with the low extension applied, defined down to T = 0
    /// inclusive so integrals may start at the origin.
    fn eval_extended(&self, t: f64) -> f64 {
        if t < self.t_min {
            match self.low_extension {
                LowExtension::LinearToOrigin => self.fit_value(self.t_min) * (t / self.t_min),
                LowExtension::ConstantBelow(v) => v,
            }
        } else {
            self.fit_value(t)
        }
    }

    /// Definite integral of the property over `[t_low, t_high]`, unit × K.
    ///
    /// The interval is split at `t_min` so each quadrature piece is smooth.
    /// `t_low` may be zero (the low extensions are defined at the origin);
    /// equal bounds integrate to zero.
    pub fn integrate(&self, t_low: f64, t_high: f64) -> Result<f64> {
        self.integrate_with_tol(t_low, t_high, quad::DEFAULT_REL_TOL)
    }

    pub fn integrate_with_tol(&self, t_low: f64, t_high: f64, rel_tol: f64) -> Result<f64> {
        if t_low < 0.0 || t_low > t_high {
            return Err(self.out_of_range(t_low));
        }
        if t_high > self.t_eval_max() {
            return Err(self.out_of_range(t_high));
        }
        if t_low == t_high {
            return Ok(0.0);
        }
        let mut total = 0.0;
        let knee = self.t_min;
        if t_low < knee {
            let upper = t_high.min(knee);
            total += match self.low_extension {
                // Triangle slice under the straight line: exact, no quadrature.
                LowExtension::LinearToOrigin => {
                    let slope = self.fit_value(knee) / knee;
                    0.5 * slope * (upper * upper - t_low * t_low)
                }
                LowExtension::ConstantBelow(v) => v * (upper - t_low),
            };
        }
        if t_high > knee {
            let lower = t_low.max(knee);
            total += quad::adaptive_simpson(|t| self.fit_value(t), lower, t_high, rel_tol)?;
        }
        Ok(total)
    }
}

/// Free-function forms of the model operations.
pub fn eval_property(model: &PolyLogModel, t: f64) -> Result<f64> {
    model.eval(t)
}

pub fn integrate_property(model: &PolyLogModel, t_low: f64, t_high: f64) -> Result<f64> {
    model.integrate(t_low, t_high)
}

// Published fit tables, seven significant figures. The decimal strings are
// authoritative; the f64 fields are parsed from them at build time (tested).

pub const OUTER_K_NAME: &str = "outer_k";
pub const PTFE_K_NAME: &str = "ptfe_k";
pub const INNER_K_NAME: &str = "inner_k";
pub const INNER_RHO_NAME: &str = "inner_rho";

const OUTER_K_STRS: [&str; 9] = [
    "-3.198399",
    "20.49947",
    "-66.11415",
    "117.6898",
    "-121.4773",
    "76.21467",
    "-28.74949",
    "5.984756",
    "-0.5266892",
];
const OUTER_K_COEFFS: [f64; 9] = [
    -3.198399, 20.49947, -66.11415, 117.6898, -121.4773, 76.21467, -28.74949, 5.984756, -0.5266892,
];

const PTFE_K_STRS: [&str; 9] = [
    "2.7380", "-30.677", "89.430", "-136.99", "124.69", "-69.556", "23.320", "-4.3135", "0.33829",
];
const PTFE_K_COEFFS: [f64; 9] = [
    2.7380, -30.677, 89.430, -136.99, 124.69, -69.556, 23.320, -4.3135, 0.33829,
];

const INNER_K_STRS: [&str; 9] = [
    "-2.750003",
    "25.84512",
    "-74.18405",
    "113.5856",
    "-96.84387",
    "46.38328",
    "-11.82451",
    "1.321682",
    "-0.02456645",
];
const INNER_K_COEFFS: [f64; 9] = [
    -2.750003,
    25.84512,
    -74.18405,
    113.5856,
    -96.84387,
    46.38328,
    -11.82451,
    1.321682,
    -0.02456645,
];

const INNER_RHO_STRS: [&str; 9] = [
    "-8.327474",
    "10.01214",
    "-52.83315",
    "122.5470",
    "-152.7599",
    "109.0327",
    "-44.41614",
    "9.598158",
    "-0.8539285",
];
const INNER_RHO_COEFFS: [f64; 9] = [
    -8.327474, 10.01214, -52.83315, 122.5470, -152.7599, 109.0327, -44.41614, 9.598158, -0.8539285,
];

/// Constant inner-conductor resistivity below the fit floor, Ω·m.
pub const INNER_RHO_LOW_T: f64 = 9.928e-9;

/// Conductivity fits may be extrapolated up to this temperature.
pub const K_EVAL_CEILING: f64 = 300.0;

fn builtin(
    name: &str,
    unit_kind: UnitKind,
    table: ([f64; 9], [&'static str; 9]),
    t_min: f64,
    t_max: f64,
    low_extension: LowExtension,
    high_extension: HighExtension,
) -> PolyLogModel {
    PolyLogModel {
        name: name.to_owned(),
        unit_kind,
        coefficients: table.0,
        t_min,
        t_max,
        low_extension,
        high_extension,
        canonical_coefficients: Some(table.1),
    }
}

/// Cupronickel outer-conductor thermal conductivity, 2.0–297.6 K.
pub fn outer_k() -> PolyLogModel {
    builtin(
        OUTER_K_NAME,
        UnitKind::ThermalConductivity,
        (OUTER_K_COEFFS, OUTER_K_STRS),
        2.0,
        297.6,
        LowExtension::LinearToOrigin,
        HighExtension::EvaluateUpTo(K_EVAL_CEILING),
    )
}

/// PTFE dielectric thermal conductivity (NIST), 4–300 K.
pub fn ptfe_k() -> PolyLogModel {
    builtin(
        PTFE_K_NAME,
        UnitKind::ThermalConductivity,
        (PTFE_K_COEFFS, PTFE_K_STRS),
        4.0,
        300.0,
        LowExtension::LinearToOrigin,
        HighExtension::EvaluateUpTo(K_EVAL_CEILING),
    )
}

/// Silver-plated cupronickel inner-conductor thermal conductivity, 2.3–292.6 K.
pub fn inner_k() -> PolyLogModel {
    builtin(
        INNER_K_NAME,
        UnitKind::ThermalConductivity,
        (INNER_K_COEFFS, INNER_K_STRS),
        2.3,
        292.6,
        LowExtension::LinearToOrigin,
        HighExtension::EvaluateUpTo(K_EVAL_CEILING),
    )
}

/// Inner-conductor DC resistivity, 3.8–300 K, constant 9.928e-9 Ω·m below.
pub fn inner_rho() -> PolyLogModel {
    builtin(
        INNER_RHO_NAME,
        UnitKind::Resistivity,
        (INNER_RHO_COEFFS, INNER_RHO_STRS),
        3.8,
        300.0,
        LowExtension::ConstantBelow(INNER_RHO_LOW_T),
        HighExtension::Forbidden,
    )
}

/// Named collection of property models.
#[derive(Debug, Clone, Default)]
pub struct MaterialLibrary {
    models: BTreeMap<String, PolyLogModel>,
}

impl MaterialLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Library preloaded with the four built-in SC-086/50-SCN-CN models.
    pub fn builtin() -> Self {
        let mut lib = Self::default();
        for m in [outer_k(), ptfe_k(), inner_k(), inner_rho()] {
            lib.insert(m);
        }
        lib
    }

    pub fn insert(&mut self, model: PolyLogModel) {
        self.models.insert(model.name.clone(), model);
    }

    pub fn get(&self, name: &str) -> Result<&PolyLogModel> {
        self.models
            .get(name)
            .ok_or_else(|| Error::UnknownMaterial(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }
}

/// Format a coefficient for a material definition file.
///
/// Canonical table strings are passed through untouched; computed values use
/// the shortest round-trip form, widened to 8 significant figures when that
/// form carries fewer than 7.
pub fn format_coefficient(value: f64, canonical: Option<&str>) -> String {
    if let Some(s) = canonical {
        return s.to_owned();
    }
    let shortest = format!("{value}");
    let mantissa = shortest.split(['e', 'E']).next().unwrap_or(&shortest);
    let digits: Vec<u8> = mantissa.bytes().filter(u8::is_ascii_digit).collect();
    let leading_zeros = digits.iter().take_while(|d| **d == b'0').count();
    if digits.len() - leading_zeros >= 7 {
        shortest
    } else {
        format!("{value:.7e}")
    }
}

/// Serialize a model to the material definition format (TOML key/value text).
///
/// Coefficients are written as quoted strings so published digits survive a
/// round trip exactly.
pub fn to_material_file(model: &PolyLogModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("name = \"{}\"\n", model.name));
    let unit = match model.unit_kind {
        UnitKind::ThermalConductivity => "thermal_conductivity",
        UnitKind::Resistivity => "resistivity",
    };
    out.push_str(&format!("unit_kind = \"{unit}\"\n"));
    out.push_str(&format!("t_min_K = {}\n", model.t_min));
    out.push_str(&format!("t_max_K = {}\n", model.t_max));
    match model.low_extension {
        LowExtension::LinearToOrigin => out.push_str("low_extension = \"linear_to_origin\"\n"),
        LowExtension::ConstantBelow(v) => {
            out.push_str(&format!(
                "low_extension = \"constant_below\"\nlow_extension_value = {}\n",
                format_coefficient(v, None)
            ));
        }
    }
    match model.high_extension {
        HighExtension::Forbidden => {}
        HighExtension::EvaluateUpTo(hi) => {
            out.push_str(&format!("high_extension_max_K = {hi}\n"));
        }
    }
    out.push_str("coefficients = [\n");
    for (i, &c) in model.coefficients.iter().enumerate() {
        let canon = model.canonical_coefficients.as_ref().map(|strs| strs[i]);
        out.push_str(&format!("    \"{}\",\n", format_coefficient(c, canon)));
    }
    out.push_str("]\n");
    out
}

#[derive(serde::Deserialize)]
struct MaterialFile {
    name: String,
    unit_kind: String,
    #[serde(rename = "t_min_K")]
    t_min_k: f64,
    #[serde(rename = "t_max_K")]
    t_max_k: f64,
    low_extension: String,
    low_extension_value: Option<f64>,
    #[serde(rename = "high_extension_max_K")]
    high_extension_max_k: Option<f64>,
    coefficients: Vec<toml::Value>,
}

/// Parse a material definition file produced by [`to_material_file`] (or
/// written by hand; coefficients may be numbers or quoted decimal strings).
pub fn from_material_file(text: &str) -> Result<PolyLogModel> {
    let raw: MaterialFile =
        toml::from_str(text).map_err(|e| Error::Config(format!("material file: {e}")))?;
    let unit_kind = match raw.unit_kind.as_str() {
        "thermal_conductivity" => UnitKind::ThermalConductivity,
        "resistivity" => UnitKind::Resistivity,
        other => {
            return Err(Error::Config(format!("unknown unit_kind `{other}`")));
        }
    };
    if raw.coefficients.len() != POLYLOG_COEFFS {
        return Err(Error::InvalidModel(format!(
            "{}: expected {POLYLOG_COEFFS} coefficients, got {}",
            raw.name,
            raw.coefficients.len()
        )));
    }
    let mut coefficients = [0.0; POLYLOG_COEFFS];
    for (i, v) in raw.coefficients.iter().enumerate() {
        coefficients[i] = match v {
            toml::Value::Float(f) => *f,
            toml::Value::Integer(n) => *n as f64,
            toml::Value::String(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("coefficient {i}: {e}")))?,
            other => {
                return Err(Error::Config(format!(
                    "coefficient {i}: expected number or string, got {other}"
                )));
            }
        };
    }
    let low_extension = match raw.low_extension.as_str() {
        "linear_to_origin" => LowExtension::LinearToOrigin,
        "constant_below" => {
            LowExtension::ConstantBelow(raw.low_extension_value.ok_or_else(|| {
                Error::Config("constant_below requires low_extension_value".into())
            })?)
        }
        other => {
            return Err(Error::Config(format!("unknown low_extension `{other}`")));
        }
    };
    let high_extension = match raw.high_extension_max_k {
        Some(hi) => HighExtension::EvaluateUpTo(hi),
        None => HighExtension::Forbidden,
    };
    PolyLogModel::new(
        raw.name,
        unit_kind,
        coefficients,
        raw.t_min_k,
        raw.t_max_k,
        low_extension,
        high_extension,
    )
}
