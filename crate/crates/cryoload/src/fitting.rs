//! Least-squares regeneration of property models from measurement data.
//!
//! Fits log10(value) as a polynomial in log10(T), the same functional form
//! the built-in models use, so a fit of clean synthetic data recovers the
//! generating model. The Vandermonde system is solved with an SVD rather
//! than the normal equations; degree-8 log-Vandermonde matrices are too
//! ill-conditioned for the latter.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::materials::{HighExtension, LowExtension, PolyLogModel, UnitKind, POLYLOG_COEFFS};

pub const DEFAULT_DEGREE: usize = 8;

/// One (temperature, value) measurement sequence.
#[derive(Debug, Clone)]
pub struct MeasurementSeries {
    pub label: String,
    pub unit_kind: UnitKind,
    /// (temperature K, value) pairs; order is preserved.
    pub points: Vec<(f64, f64)>,
}

impl MeasurementSeries {
    pub fn new(
        label: impl Into<String>,
        unit_kind: UnitKind,
        points: Vec<(f64, f64)>,
    ) -> Result<Self> {
        for &(t, v) in &points {
            if !(t > 0.0 && v > 0.0) {
                return Err(Error::Config(format!(
                    "measurement ({t} K, {v}) is not positive; log-space fit undefined"
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            unit_kind,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Subsequence with temperature <= `t_cap`, order preserved.
///
/// Returns the filtered series and the number of points removed. Errors if
/// nothing remains.
pub fn filter_measurements(
    series: &MeasurementSeries,
    t_cap: f64,
) -> Result<(MeasurementSeries, usize)> {
    let kept: Vec<(f64, f64)> = series
        .points
        .iter()
        .copied()
        .filter(|&(t, _)| t <= t_cap)
        .collect();
    let removed = series.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::EmptyAfterFilter { t_cap, removed });
    }
    Ok((
        MeasurementSeries {
            label: series.label.clone(),
            unit_kind: series.unit_kind,
            points: kept,
        },
        removed,
    ))
}

/// Fit diagnostics returned alongside the model.
#[derive(Debug, Clone)]
pub struct FitReport {
    /// (temperature, measured, fitted, log10 residual) per point, input order.
    pub residuals: Vec<(f64, f64, f64, f64)>,
    /// RMS of the log10 residuals.
    pub rms_log_residual: f64,
    /// Points dropped by a preceding filter step, echoed for reporting.
    pub removed_by_filter: usize,
}

/// Ordinary least squares for the log10-polynomial coefficients.
///
/// `t_min`/`t_max` of the returned model are the series' temperature extrema;
/// extensions default to linear-to-origin below and forbidden above.
pub fn fit_polylog(series: &MeasurementSeries, degree: usize) -> Result<(PolyLogModel, FitReport)> {
    if !(1..POLYLOG_COEFFS).contains(&degree) {
        return Err(Error::Config(format!(
            "degree must be in 1..={}, got {degree}",
            POLYLOG_COEFFS - 1
        )));
    }
    let n = series.len();
    let cols = degree + 1;
    if n <= degree + 1 {
        return Err(Error::InsufficientData {
            points: n,
            degree,
            needed: degree + 2,
        });
    }

    let log_t: Vec<f64> = series.points.iter().map(|&(t, _)| t.log10()).collect();
    let log_v: Vec<f64> = series.points.iter().map(|&(_, v)| v.log10()).collect();

    let mut design = DMatrix::zeros(n, cols);
    for (i, &x) in log_t.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..cols {
            design[(i, j)] = p;
            p *= x;
        }
    }
    let rhs = DVector::from_column_slice(&log_v);

    let svd = design.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rank_eps = sigma_max * f64::EPSILON * n.max(cols) as f64;
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > rank_eps)
        .count();
    if rank < cols {
        return Err(Error::SingularSystem { rank, cols });
    }
    let solution = svd
        .solve(&rhs, rank_eps)
        .map_err(|e| Error::Config(format!("SVD solve failed: {e}")))?;

    let mut coefficients = [0.0; POLYLOG_COEFFS];
    for j in 0..cols {
        coefficients[j] = solution[j];
    }

    let t_min = series
        .points
        .iter()
        .map(|&(t, _)| t)
        .fold(f64::INFINITY, f64::min);
    let t_max = series
        .points
        .iter()
        .map(|&(t, _)| t)
        .fold(f64::NEG_INFINITY, f64::max);

    let model = PolyLogModel::new(
        format!("{}_fit", series.label),
        series.unit_kind,
        coefficients,
        t_min,
        t_max,
        LowExtension::LinearToOrigin,
        HighExtension::Forbidden,
    )?;

    let mut residuals = Vec::with_capacity(n);
    let mut ssr = 0.0;
    for (&(t, v), (&x, &y)) in series.points.iter().zip(log_t.iter().zip(log_v.iter())) {
        let mut fit_log = 0.0;
        for j in (0..cols).rev() {
            fit_log = fit_log * x + coefficients[j];
        }
        let r = y - fit_log;
        ssr += r * r;
        residuals.push((t, v, 10f64.powf(fit_log), r));
    }
    let report = FitReport {
        residuals,
        rms_log_residual: (ssr / n as f64).sqrt(),
        removed_by_filter: 0,
    };
    Ok((model, report))
}

/// Read a measurement CSV: header `temperature_K,value`, `#` comments ignored.
pub fn read_measurement_csv<R: BufRead>(
    reader: R,
    path_label: &str,
    unit_kind: UnitKind,
) -> Result<MeasurementSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = rdr.headers().map_err(|e| Error::Parse {
            path: path_label.to_owned(),
            line: 1,
            message: e.to_string(),
        })?;
        let expected = ["temperature_K", "value"];
        if headers.len() < 2 || headers[0] != expected[0][..] || headers[1] != expected[1][..] {
            return Err(Error::Parse {
                path: path_label.to_owned(),
                line: 1,
                message: format!("expected header `temperature_K,value`, got `{headers:?}`"),
            });
        }
    }
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path_label.to_owned(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse = |idx: usize, what: &str| -> Result<f64> {
            record
                .get(idx)
                .ok_or_else(|| Error::Parse {
                    path: path_label.to_owned(),
                    line,
                    message: format!("missing {what} column"),
                })?
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    path: path_label.to_owned(),
                    line,
                    message: format!("bad {what}: {e}"),
                })
        };
        points.push((parse(0, "temperature_K")?, parse(1, "value")?));
    }
    MeasurementSeries::new(path_label.to_owned(), unit_kind, points)
}

pub fn read_measurement_file(path: &Path, unit_kind: UnitKind) -> Result<MeasurementSeries> {
    let file = std::fs::File::open(path)?;
    let mut series = read_measurement_csv(
        std::io::BufReader::new(file),
        &path.display().to_string(),
        unit_kind,
    )?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        series.label = stem.to_owned();
    }
    Ok(series)
}

/// Write the residual CSV: `temperature_K,measured,fitted,log10_residual`.
pub fn write_residual_csv<W: Write>(mut w: W, report: &FitReport) -> Result<()> {
    writeln!(w, "temperature_K,measured,fitted,log10_residual")?;
    for &(t, measured, fitted, r) in &report.residuals {
        writeln!(w, "{t},{measured},{fitted},{r}")?;
    }
    Ok(())
}
