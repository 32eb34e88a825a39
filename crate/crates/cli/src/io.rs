//! CSV interchange: `#`-prefixed `key = value` header comments, then a header row.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use faultloc_core::{CostCurve, FrequencyResponse, MagnitudeSpectrum, Waveform};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::output(path, e))
}

fn header(out: &mut String, comments: &[(&str, f64)], columns: &str) {
    for (key, value) in comments {
        writeln!(out, "# {key} = {value:e}").unwrap();
    }
    writeln!(out, "{columns}").unwrap();
}

pub fn waveform_csv(w: &Waveform, comments: &[(&str, f64)]) -> String {
    let mut out = String::new();
    header(&mut out, comments, "t_s,v_pu,i_pu");
    for (k, s) in w.samples().iter().enumerate() {
        writeln!(out, "{:e},{:e},{:e}", w.time(k), s[0], s[1]).unwrap();
    }
    out
}

pub fn spectrum_csv(m: &MagnitudeSpectrum) -> String {
    let mut out = String::new();
    header(&mut out, &[], "omega_rad_s,mag_v,mag_i");
    for (k, w) in m.grid.omegas().iter().enumerate() {
        writeln!(out, "{w:e},{:e},{:e}", m.channel(0)[k], m.channel(1)[k]).unwrap();
    }
    out
}

pub fn response_csv(r: &FrequencyResponse) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &[("ell", r.ell)],
        "omega_rad_s,mag_h1,mag_h2,re_h1,im_h1,re_h2,im_h2",
    );
    for ((w, h1), h2) in r.grid.omegas().iter().zip(&r.h1).zip(&r.h2) {
        writeln!(
            out,
            "{w},{},{},{},{},{},{}",
            h1.norm(),
            h2.norm(),
            h1.re,
            h1.im,
            h2.re,
            h2.im
        )
        .unwrap();
    }
    out
}

pub fn cost_curve_csv(c: &CostCurve, comments: &[(&str, f64)]) -> String {
    let mut out = String::new();
    header(&mut out, comments, "ell_m,J");
    for (l, j) in c.ells.iter().zip(&c.costs) {
        writeln!(out, "{l:e},{j:e}").unwrap();
    }
    out
}

#[derive(Debug, Deserialize)]
struct Row {
    t_s: f64,
    v_pu: f64,
    i_pu: f64,
}

/// A waveform read back from CSV with its numeric header comments.
#[derive(Debug)]
pub struct WaveformFile {
    pub waveform: Waveform,
    pub header: BTreeMap<String, f64>,
}

pub fn read_waveform(path: &Path) -> CliResult<WaveformFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let mut header = BTreeMap::new();
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((key, value)) = line.split_once('=') {
            if let Ok(v) = value.trim().parse::<f64>() {
                header.insert(key.trim().to_owned(), v);
            }
        }
    }
    let ts = *header
        .get("T_s")
        .ok_or_else(|| CliError::input(path, "missing `# T_s = ...` header comment"))?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let rows: Vec<Row> = reader
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::input(path, e))?;
    if rows.len() < 2 {
        return Err(CliError::input(
            path,
            format!("need at least 2 samples, found {}", rows.len()),
        ));
    }
    let start = rows[0].t_s;
    for (k, r) in rows.iter().enumerate() {
        let expected = start + k as f64 * ts;
        if (r.t_s - expected).abs() > 1e-6 * ts {
            return Err(CliError::input(
                path,
                format!(
                    "row {k}: t_s = {} is off the uniform grid (expected {expected})",
                    r.t_s
                ),
            ));
        }
    }
    let samples = rows.iter().map(|r| [r.v_pu, r.i_pu]).collect();
    let waveform = Waveform::new(ts, start, samples).map_err(|e| CliError::input(path, e))?;
    Ok(WaveformFile { waveform, header })
}
