//! Parameter sweeps: expansion and cascade tables, the coincidence study
//! over (gamma, eta), and the fidelity/probability grid over beamsplitter
//! deviations.

use rayon::prelude::*;
use serde::Serialize;

use crate::detection::{analytic_ratio, fourfold_coincidence, DetectorModel, SpdcSource};
use crate::error::{Error, Result};
use crate::optics::PdbsParams;
use crate::wgate::{cascade_prepare, cascade_probability, expand_w, expansion_probability};

/// Largest W state accepted by the expansion sweep.
pub const MAX_SWEEP_N: usize = 8;
/// Largest cascade depth accepted by the cascade sweep.
pub const MAX_SWEEP_K: usize = 6;
/// Largest pair amplitude for which the gamma^3 truncation is trusted.
pub const MAX_GAMMA: f64 = 0.1;

const CLOSED_FORM_TOL: f64 = 1e-12;

/// `n` evenly spaced points from `lo` to `hi` inclusive. The midpoint of a
/// symmetric range is exactly zero for odd `n`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                lo * (1.0 - t) + hi * t
            })
            .collect(),
    }
}

/// Fidelity and success probability over a (delta_h, delta_v) grid. Rows
/// follow `delta_h`, columns `delta_v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    pub delta_axis: Vec<f64>,
    #[serde(rename = "Delta_axis")]
    pub delta_v_axis: Vec<f64>,
    pub fidelity: Vec<Vec<f64>>,
    pub probability: Vec<Vec<f64>>,
}

impl ScanGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.delta_axis.len(), self.delta_v_axis.len())
    }
}

/// Default axis: [-0.15, 0.15] with 121 points.
pub fn default_axis() -> Vec<f64> {
    linspace(-0.15, 0.15, 121)
}

/// Runs the W2 -> W3 gate at each (delta_h, delta_v) with ideal-detector
/// post-selection.
pub fn scan_pdbs_deviation(delta_axis: &[f64], delta_v_axis: &[f64]) -> Result<ScanGrid> {
    for &dh in delta_axis {
        for &dv in delta_v_axis {
            PdbsParams::deviated(dh, dv).validate()?;
        }
    }
    let cells: Vec<Result<(f64, f64)>> = delta_axis
        .par_iter()
        .flat_map_iter(|&dh| {
            delta_v_axis.iter().map(move |&dv| {
                let out = expand_w(2, &PdbsParams::deviated(dh, dv))?;
                Ok((out.fidelity, out.success_prob))
            })
        })
        .collect();
    let cols = delta_v_axis.len();
    let mut fidelity = Vec::with_capacity(delta_axis.len());
    let mut probability = Vec::with_capacity(delta_axis.len());
    let mut it = cells.into_iter();
    for _ in delta_axis {
        let row: Vec<(f64, f64)> = it.by_ref().take(cols).collect::<Result<_>>()?;
        fidelity.push(row.iter().map(|c| c.0).collect());
        probability.push(row.iter().map(|c| c.1).collect());
    }
    Ok(ScanGrid {
        delta_axis: delta_axis.to_vec(),
        delta_v_axis: delta_v_axis.to_vec(),
        fidelity,
        probability,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionRow {
    pub n: usize,
    pub probability: f64,
    pub expected: f64,
    pub fidelity: f64,
}

/// Full-pipeline W_N -> W_{N+1} probability for N = 1..=n_max at ideal
/// parameters, checked against (N+1)/(5N).
pub fn sweep_expansion(n_max: usize) -> Result<Vec<ExpansionRow>> {
    if !(1..=MAX_SWEEP_N).contains(&n_max) {
        return Err(Error::InvalidArgument(format!(
            "N_max must be in 1..={MAX_SWEEP_N}, got {n_max}"
        )));
    }
    let params = PdbsParams::ideal();
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let out = expand_w(n, &params)?;
            let expected = expansion_probability(n);
            if (out.success_prob - expected).abs() > CLOSED_FORM_TOL {
                return Err(Error::Validation(format!(
                    "N = {n}: probability {} differs from {expected}",
                    out.success_prob
                )));
            }
            Ok(ExpansionRow {
                n,
                probability: out.success_prob,
                expected,
                fidelity: out.fidelity,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeRow {
    pub k: usize,
    pub probability: f64,
    pub expected: f64,
    pub fidelity: f64,
}

/// Cumulative probability and final fidelity of k-step cascades.
pub fn sweep_cascade(k_max: usize) -> Result<Vec<CascadeRow>> {
    if !(1..=MAX_SWEEP_K).contains(&k_max) {
        return Err(Error::InvalidArgument(format!(
            "k_max must be in 1..={MAX_SWEEP_K}, got {k_max}"
        )));
    }
    let params = PdbsParams::ideal();
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let c = cascade_prepare(k, &params)?;
            let expected = cascade_probability(k);
            if (c.outcome.success_prob - expected).abs() > CLOSED_FORM_TOL {
                return Err(Error::Validation(format!(
                    "k = {k}: probability {} differs from {expected}",
                    c.outcome.success_prob
                )));
            }
            Ok(CascadeRow {
                k,
                probability: c.outcome.success_prob,
                expected,
                fidelity: c.outcome.fidelity,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceRow {
    pub gamma: f64,
    pub eta: f64,
    pub p_c: f64,
    pub p_t: f64,
    pub p_f: f64,
    pub ratio: f64,
    pub analytic_ratio: f64,
    /// |ratio - analytic_ratio|
    pub residual: f64,
}

/// Coincidence study over every (gamma, eta) pair, gamma-major. A cell with
/// gamma = 0 has no coincidences at all and reports the limiting ratio 1.
pub fn sweep_coincidence(
    gammas: &[f64],
    etas: &[f64],
    response: &str,
    params: &PdbsParams,
) -> Result<Vec<CoincidenceRow>> {
    for &g in gammas {
        if !(0.0..=MAX_GAMMA).contains(&g) {
            return Err(Error::InvalidArgument(format!(
                "gamma = {g} outside [0, {MAX_GAMMA}]"
            )));
        }
    }
    let models: Vec<DetectorModel> = etas
        .iter()
        .map(|&eta| DetectorModel::by_name(response, eta))
        .collect::<Result<_>>()?;
    let cells: Vec<(f64, &DetectorModel)> = gammas
        .iter()
        .flat_map(|&g| models.iter().map(move |m| (g, m)))
        .collect();
    cells
        .par_iter()
        .map(|&(gamma, model)| {
            let src = SpdcSource::with_gamma(gamma)?;
            let r = fourfold_coincidence(&src, model, params)?;
            let ratio = match r.ratio {
                Some(x) => x,
                None if gamma == 0.0 => 1.0,
                None => return Err(Error::ZeroCoincidence),
            };
            let analytic = analytic_ratio(gamma, model.eta());
            Ok(CoincidenceRow {
                gamma,
                eta: model.eta(),
                p_c: r.p_c,
                p_t: r.p_t,
                p_f: r.p_f,
                ratio,
                analytic_ratio: analytic,
                residual: (ratio - analytic).abs(),
            })
        })
        .collect()
}

/// Grid as CSV: header row `delta\Delta` followed by the column axis, then
/// one row per `delta` value. Floats use the shortest representation that
/// parses back to the same value.
pub fn grid_to_csv(rows: &[f64], cols: &[f64], cells: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["delta\\Delta".to_owned()];
    header.extend(cols.iter().map(f64::to_string));
    w.write_record(&header)?;
    for (r, row) in rows.iter().zip(cells) {
        let mut rec = vec![r.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

/// Parsed grid: (row axis, column axis, cells).
pub type ParsedGrid = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

pub fn parse_grid_csv(text: &str) -> Result<ParsedGrid> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Csv(format!("'{s}': {e}")))
    };
    let header = records
        .next()
        .ok_or_else(|| Error::Csv("empty grid".into()))??;
    let cols: Vec<f64> = header.iter().skip(1).map(parse).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for rec in records {
        let rec = rec?;
        let mut it = rec.iter();
        let first = it.next().ok_or_else(|| Error::Csv("empty row".into()))?;
        rows.push(parse(first)?);
        let row: Vec<f64> = it.map(parse).collect::<Result<_>>()?;
        if row.len() != cols.len() {
            return Err(Error::Csv(format!(
                "row has {} cells, header has {}",
                row.len(),
                cols.len()
            )));
        }
        cells.push(row);
    }
    Ok((rows, cols, cells))
}

/// Serializes table rows as CSV with a header line.
pub fn table_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}
