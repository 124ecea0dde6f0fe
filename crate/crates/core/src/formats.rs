//! On-disk formats.
//!
//! Mic spectra CSV: `#`-prefixed `key = value` header lines echo the grid
//! length, microphone layout and air, followed by a CSV header and rows of
//! `frequency_hz, p1_re, p1_im, ..., p4_re, p4_im`.
//!
//! Band table CSV: first row `quantity,<nominal centers...>`, then one row per
//! quantity; an empty cell marks an absent band.
//!
//! Narrowband CSV: `frequency_hz,<column>...`, empty cells for invalid bins.
//!
//! Stack, scenario and material files are TOML; see the types below.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::bands::{BandTable, ThirdOctaveBand};
use crate::config::{AirSection, TubeConfig, TubeSection};
use crate::domain::{AirProperties, ComplexSpectrum, FrequencyGrid, MaterialSpec, TubeGeometry};
use crate::error::{Error, Result};
use crate::matrix::TransferMatrix;
use crate::models::LayerModel;
use crate::synth::{Sample, SynthScenario};

pub const MIC_SPECTRA_MAGIC: &str = "tubeloss mic-spectra v1";
const MIC_COLUMNS: [&str; 9] = [
    "frequency_hz",
    "p1_re",
    "p1_im",
    "p2_re",
    "p2_im",
    "p3_re",
    "p3_im",
    "p4_re",
    "p4_im",
];

fn parse_err(path: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write to a sibling temp file, then rename over the target.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// Four microphone spectra plus the configuration they were recorded under.
#[derive(Debug, Clone, PartialEq)]
pub struct MicSpectraFile {
    pub config: TubeConfig,
    pub pressures: [ComplexSpectrum; 4],
}

impl MicSpectraFile {
    pub fn grid(&self) -> &FrequencyGrid {
        self.pressures[0].grid()
    }

    pub fn pressure_refs(&self) -> [&ComplexSpectrum; 4] {
        let [a, b, c, d] = &self.pressures;
        [a, b, c, d]
    }

    pub fn to_csv_string(&self) -> String {
        let g = &self.config.geometry;
        let a = &self.config.air;
        let [x1, x2, x3, x4] = g.mic_positions();
        let mut out = String::new();
        let _ = writeln!(out, "# {MIC_SPECTRA_MAGIC}");
        let _ = writeln!(out, "# bins = {}", self.grid().len());
        for (k, v) in [
            ("x1", x1),
            ("x2", x2),
            ("x3", x3),
            ("x4", x4),
            ("sample_thickness", g.sample_thickness()),
            ("tube_diameter", g.tube_diameter()),
            ("density", a.density()),
            ("sound_speed", a.sound_speed()),
        ] {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&MIC_COLUMNS.join(","));
        out.push('\n');
        for (i, f) in self.grid().iter().enumerate() {
            let _ = write!(out, "{f}");
            for p in &self.pressures {
                let v = p.values()[i];
                let _ = write!(out, ",{},{}", v.re, v.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut header = BTreeMap::new();
        let mut comment_lines = 0u64;
        for line in text.lines() {
            let Some(rest) = line.strip_prefix('#') else { break };
            comment_lines += 1;
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), (v.trim().to_string(), comment_lines));
            }
        }
        let num = |key: &str| -> Result<f64> {
            let (v, line) = header
                .get(key)
                .ok_or_else(|| parse_err(path, comment_lines.max(1), format!("header is missing '{key}'")))?;
            v.parse::<f64>()
                .map_err(|_| parse_err(path, *line, format!("header '{key}' is not a number: '{v}'")))
        };
        let bins = num("bins")?;
        let geometry = TubeGeometry::new(
            [num("x1")?, num("x2")?, num("x3")?, num("x4")?],
            num("sample_thickness")?,
            num("tube_diameter")?,
        )?;
        let air = AirProperties::new(num("density")?, num("sound_speed")?)?;

        let body: String = text
            .lines()
            .skip(comment_lines as usize)
            .flat_map(|l| [l, "\n"])
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes());
        let hdr = reader
            .headers()
            .map_err(|e| parse_err(path, comment_lines + 1, e.to_string()))?
            .clone();
        if hdr.iter().collect::<Vec<_>>() != MIC_COLUMNS {
            return Err(parse_err(
                path,
                comment_lines + 1,
                format!("expected columns {}", MIC_COLUMNS.join(",")),
            ));
        }
        let mut freqs = Vec::new();
        let mut channels: [Vec<Complex64>; 4] = Default::default();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0) + comment_lines;
                parse_err(path, line, e.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0) + comment_lines;
            if rec.len() != 9 {
                return Err(parse_err(
                    path,
                    line,
                    format!("expected 9 columns, found {}", rec.len()),
                ));
            }
            let mut vals = [0.0; 9];
            for (j, field) in rec.iter().enumerate() {
                vals[j] = field.parse::<f64>().map_err(|_| {
                    parse_err(
                        path,
                        line,
                        format!("column '{}' is not a number: '{field}'", MIC_COLUMNS[j]),
                    )
                })?;
            }
            if let Some(&prev) = freqs.last() {
                if vals[0] <= prev {
                    return Err(parse_err(
                        path,
                        line,
                        format!("frequency {} does not increase", vals[0]),
                    ));
                }
            }
            freqs.push(vals[0]);
            for (m, ch) in channels.iter_mut().enumerate() {
                ch.push(Complex64::new(vals[1 + 2 * m], vals[2 + 2 * m]));
            }
        }
        if freqs.len() as f64 != bins {
            return Err(parse_err(
                path,
                comment_lines + 1 + freqs.len() as u64,
                format!("header announces {bins} bins but {} rows follow", freqs.len()),
            ));
        }
        let grid = FrequencyGrid::new(freqs).map_err(|e| parse_err(path, comment_lines + 2, e.to_string()))?;
        let [c1, c2, c3, c4] = channels;
        Ok(Self {
            config: TubeConfig { air, geometry },
            pressures: [
                ComplexSpectrum::new(grid.clone(), c1)?,
                ComplexSpectrum::new(grid.clone(), c2)?,
                ComplexSpectrum::new(grid.clone(), c3)?,
                ComplexSpectrum::new(grid, c4)?,
            ],
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, &path.display().to_string())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12)
}

/// Fail unless the file header describes the same tube and air as `active`.
pub fn check_geometry(file: &TubeConfig, active: &TubeConfig, path: &str) -> Result<()> {
    let mut diffs = Vec::new();
    let fm = file.geometry.mic_positions();
    let am = active.geometry.mic_positions();
    for i in 0..4 {
        if !close(fm[i], am[i]) {
            diffs.push(format!("x{} {} vs {}", i + 1, fm[i], am[i]));
        }
    }
    let pairs = [
        (
            "sample_thickness",
            file.geometry.sample_thickness(),
            active.geometry.sample_thickness(),
        ),
        (
            "tube_diameter",
            file.geometry.tube_diameter(),
            active.geometry.tube_diameter(),
        ),
        ("density", file.air.density(), active.air.density()),
        ("sound_speed", file.air.sound_speed(), active.air.sound_speed()),
    ];
    for (name, a, b) in pairs {
        if !close(a, b) {
            diffs.push(format!("{name} {a} vs {b}"));
        }
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(Error::GeometryMismatch(format!("{path}: {}", diffs.join("; "))))
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) || field.trim() != field {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write band tables sharing one band set.
pub fn band_tables_to_csv(tables: &[BandTable]) -> Result<String> {
    let first = tables.first().ok_or_else(|| Error::domain("no band tables to write"))?;
    for t in &tables[1..] {
        first.ensure_same_bands(t)?;
    }
    let mut out = String::from("quantity");
    for b in &first.bands {
        let _ = write!(out, ",{}", b.nominal_hz);
    }
    out.push('\n');
    for t in tables {
        out.push_str(&quote(&t.name));
        for v in &t.values {
            out.push(',');
            out.push_str(&fmt_opt(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn band_tables_from_csv(text: &str, path: &str) -> Result<Vec<BandTable>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let hdr = reader.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    if hdr.get(0) != Some("quantity") || hdr.len() < 2 {
        return Err(parse_err(path, 1, "expected header 'quantity,<band centers...>'"));
    }
    let bands = hdr
        .iter()
        .skip(1)
        .map(|h| {
            let f: f64 = h
                .parse()
                .map_err(|_| parse_err(path, 1, format!("band center '{h}' is not a number")))?;
            ThirdOctaveBand::from_nominal(f)
                .ok_or_else(|| parse_err(path, 1, format!("{f} Hz is not a standard one-third-octave center")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tables = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(path, e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let values = rec
            .iter()
            .skip(1)
            .map(|v| {
                if v.is_empty() {
                    Ok(None)
                } else {
                    v.parse::<f64>()
                        .map(Some)
                        .map_err(|_| parse_err(path, line, format!("'{v}' is not a number")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let table = BandTable::new(rec.get(0).unwrap_or_default(), bands.clone(), values)
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        tables.push(table);
    }
    if tables.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    Ok(tables)
}

/// Narrowband columns on a shared frequency axis.
pub fn narrowband_to_csv(frequencies: &[f64], columns: &[(&str, &[Option<f64>])]) -> String {
    let mut out = String::from("frequency_hz");
    for (name, _) in columns {
        let _ = write!(out, ",{}", quote(name));
    }
    out.push('\n');
    for (i, f) in frequencies.iter().enumerate() {
        let _ = write!(out, "{f}");
        for (_, col) in columns {
            out.push(',');
            out.push_str(&fmt_opt(col[i]));
        }
        out.push('\n');
    }
    out
}

/// Read the first value column of a narrowband CSV.
pub fn narrowband_from_csv(text: &str, path: &str) -> Result<(Vec<f64>, Vec<Option<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let hdr = reader.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    if hdr.len() < 2 {
        return Err(parse_err(path, 1, "expected 'frequency_hz,<value>' columns"));
    }
    let (mut freqs, mut vals) = (Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(path, e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let f: f64 = rec[0]
            .parse()
            .map_err(|_| parse_err(path, line, format!("frequency '{}' is not a number", &rec[0])))?;
        let v = match &rec[1] {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| parse_err(path, line, format!("'{s}' is not a number")))?,
            ),
        };
        freqs.push(f);
        vals.push(v);
    }
    FrequencyGrid::new(freqs.clone()).map_err(|e| parse_err(path, 2, e.to_string()))?;
    Ok((freqs, vals))
}

/// One `[[layer]]` record.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LayerRecord {
    LimpMass {
        surface_density: f64,
    },
    AirGap {
        thickness: Option<f64>,
        thickness_mm: Option<f64>,
    },
    Identity,
    Matrix {
        t11: [f64; 2],
        t12: [f64; 2],
        t21: [f64; 2],
        t22: [f64; 2],
        #[serde(default)]
        passive_symmetric: bool,
    },
}

impl LayerRecord {
    pub fn build(&self) -> Result<LayerModel> {
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        match self {
            LayerRecord::LimpMass { surface_density } => LayerModel::limp(*surface_density),
            LayerRecord::AirGap {
                thickness,
                thickness_mm,
            } => match (thickness, thickness_mm) {
                (Some(t), None) => LayerModel::air_gap(*t),
                (None, Some(mm)) => LayerModel::air_gap(mm / 1000.0),
                _ => Err(Error::Config(
                    "air-gap needs exactly one of thickness, thickness_mm".into(),
                )),
            },
            LayerRecord::Identity => Ok(LayerModel::Identity),
            LayerRecord::Matrix {
                t11,
                t12,
                t21,
                t22,
                passive_symmetric,
            } => LayerModel::explicit(
                TransferMatrix::new(c(*t11), c(*t12), c(*t21), c(*t22)),
                *passive_symmetric,
            ),
        }
    }
}

/// Frequency axis of a file: either explicit or a linear range.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub frequencies: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

impl GridSection {
    pub fn build(&self) -> Result<FrequencyGrid> {
        match (&self.frequencies, self.start, self.stop, self.step) {
            (Some(f), None, None, None) => FrequencyGrid::new(f.clone()),
            (None, Some(a), Some(b), Some(s)) => FrequencyGrid::linear(a, b, s),
            _ => Err(Error::Config(
                "grid needs either 'frequencies' or all of 'start', 'stop', 'step'".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct StackFileRaw {
    name: Option<String>,
    #[serde(rename = "layer")]
    layers: Vec<LayerRecord>,
}

/// An ordered layer stack, incident side first.
#[derive(Debug, Clone, PartialEq)]
pub struct StackFile {
    pub name: String,
    pub layers: Vec<LayerModel>,
}

impl StackFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: StackFileRaw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if raw.layers.is_empty() {
            return Err(Error::Config("stack has no layers".into()));
        }
        Ok(Self {
            name: raw.name.unwrap_or_else(|| "stack".to_string()),
            layers: raw.layers.iter().map(LayerRecord::build).collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct ScenarioFileRaw {
    seed: Option<u64>,
    snr_db: Option<f64>,
    incident: Option<[f64; 2]>,
    termination: Option<[f64; 2]>,
    grid: GridSection,
    air: Option<AirSection>,
    tube: Option<TubeSection>,
    #[serde(rename = "layer")]
    layers: Vec<LayerRecord>,
}

/// A synthetic measurement description.
///
/// ```toml
/// seed = 42
/// snr_db = 40.0              # omit for noiseless
/// incident = [1.0, 0.0]      # Pa, re/im
/// termination = [0.0, 0.0]   # D/C, re/im
///
/// [grid]
/// start = 100.0
/// stop = 2000.0
/// step = 10.0
///
/// [[layer]]
/// kind = "limp-mass"
/// surface_density = 1.135
/// ```
///
/// `[air]` and `[tube]` may be given here or come from the run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: SynthScenario,
    pub grid: FrequencyGrid,
}

impl ScenarioFile {
    pub fn parse(text: &str, fallback: Option<&TubeConfig>) -> Result<Self> {
        let raw: ScenarioFileRaw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let (air, geometry) = match (&raw.tube, fallback) {
            (Some(t), _) => (raw.air.clone().unwrap_or_default().build()?, t.build()?),
            (None, Some(cfg)) => match &raw.air {
                Some(a) => (a.build()?, cfg.geometry),
                None => (cfg.air, cfg.geometry),
            },
            (None, None) => {
                return Err(Error::Config(
                    "scenario has no [tube] section and no configuration was given".into(),
                ))
            }
        };
        if raw.layers.is_empty() {
            return Err(Error::Config("scenario has no layers".into()));
        }
        let c = |v: Option<[f64; 2]>, default: f64| {
            v.map(|v| Complex64::new(v[0], v[1]))
                .unwrap_or(Complex64::new(default, 0.0))
        };
        let scenario = SynthScenario {
            sample: Sample::Layers(raw.layers.iter().map(LayerRecord::build).collect::<Result<_>>()?),
            geometry,
            air,
            incident: c(raw.incident, 1.0),
            termination: c(raw.termination, 0.0),
            snr_db: raw.snr_db,
            seed: raw.seed.unwrap_or(0),
        };
        scenario.validate()?;
        Ok(Self {
            scenario,
            grid: raw.grid.build()?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialRecord {
    name: String,
    thickness_mm: f64,
    surface_density: f64,
    density: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFileRaw {
    #[serde(rename = "material")]
    materials: Vec<MaterialRecord>,
}

/// `[[material]]` records with `name`, `thickness_mm`, `surface_density` and
/// an optional bulk `density`.
pub fn parse_materials(text: &str) -> Result<Vec<MaterialSpec>> {
    let raw: MaterialFileRaw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    raw.materials
        .into_iter()
        .map(|m| MaterialSpec::new(m.name, m.thickness_mm / 1000.0, m.surface_density, m.density))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::third_octave_bands;
    use crate::synth::synth_mic_pressures;
    use proptest::prelude::*;

    fn sample_file() -> MicSpectraFile {
        let text = "[tube]\nmic_positions = [-0.25, -0.2, 0.05, 0.1]\nsample_thickness = 0.00089\ndiameter = 0.0998\n";
        let config = TubeConfig::from_toml_str(text).unwrap();
        let scenario = SynthScenario {
            sample: Sample::Layers(vec![LayerModel::limp(1.135).unwrap()]),
            geometry: config.geometry,
            air: config.air,
            incident: Complex64::new(1.0, 0.0),
            termination: Complex64::new(0.0, 0.0),
            snr_db: Some(30.0),
            seed: 3,
        };
        let grid = FrequencyGrid::linear(100.0, 400.0, 50.0).unwrap();
        let out = synth_mic_pressures(&scenario, &grid).unwrap();
        MicSpectraFile {
            config,
            pressures: out.pressures,
        }
    }

    #[test]
    fn mic_file_round_trip_is_byte_identical() {
        let f = sample_file();
        let text = f.to_csv_string();
        let back = MicSpectraFile::parse(&text, "x.csv").unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let text = sample_file().to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        // line 13 is the third data row (10 header comments + column row)
        let mut broken = lines.clone();
        broken[12] = "200,1,2,3";
        let err = MicSpectraFile::parse(&broken.join("\n"), "x.csv").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 13, "{message}");
                assert!(message.contains("9 columns"));
            }
            other => panic!("{other:?}"),
        }
        let mut nan = lines.clone();
        nan[12] = "200,1,2,3,4,5,6,7,abc";
        assert!(matches!(
            MicSpectraFile::parse(&nan.join("\n"), "x.csv"),
            Err(Error::Parse { line: 13, .. })
        ));

        let mut order = lines.clone();
        order[12] = order[11];
        assert!(matches!(
            MicSpectraFile::parse(&order.join("\n"), "x.csv"),
            Err(Error::Parse { line: 13, .. })
        ));

        let short: Vec<&str> = lines[..lines.len() - 1].to_vec();
        assert!(MicSpectraFile::parse(&short.join("\n"), "x.csv").is_err());
        let no_header: Vec<&str> = lines.iter().copied().filter(|l| !l.starts_with("# x3")).collect();
        assert!(MicSpectraFile::parse(&no_header.join("\n"), "x.csv").is_err());
    }

    #[test]
    fn geometry_check_lists_differences() {
        let f = sample_file();
        assert!(check_geometry(&f.config, &f.config, "a").is_ok());
        let mut other = f.config;
        other.geometry = TubeGeometry::new([-0.3, -0.2, 0.05, 0.1], 0.00089, 0.0998).unwrap();
        match check_geometry(&f.config, &other, "a") {
            Err(Error::GeometryMismatch(msg)) => assert!(msg.contains("x1"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn band_csv_round_trip() {
        let bands = third_octave_bands(25.0, 5000.0).unwrap();
        let n = bands.len();
        let a = BandTable::new(
            "STL",
            bands.clone(),
            (0..n)
                .map(|i| if i == 3 { None } else { Some(i as f64 * 1.1) })
                .collect(),
        )
        .unwrap();
        let b = BandTable::new("spread, \"dB\"", bands, vec![Some(0.25); n]).unwrap();
        let text = band_tables_to_csv(&[a.clone(), b.clone()]).unwrap();
        assert!(text.starts_with("quantity,25,31.5,40,"));
        let back = band_tables_from_csv(&text, "t.csv").unwrap();
        assert_eq!(back, vec![a, b]);
        assert_eq!(band_tables_to_csv(&back).unwrap(), text);
        assert!(band_tables_from_csv("quantity,1001\nx,1\n", "t.csv").is_err());
        assert!(matches!(
            band_tables_from_csv("quantity,100\nx,abc\n", "t.csv"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn stack_file_parsing() {
        let text = r#"
name = "tango sandwich"
[[layer]]
kind = "limp-mass"
surface_density = 0.224
[[layer]]
kind = "air-gap"
thickness_mm = 5
[[layer]]
kind = "limp-mass"
surface_density = 1.135
"#;
        let s = StackFile::parse(text).unwrap();
        assert_eq!(s.layers.len(), 3);
        assert_eq!(s.layers[1], LayerModel::AirGap { thickness: 0.005 });
        let bad = text.replace("air-gap", "foam");
        assert!(StackFile::parse(&bad).is_err());
        assert!(StackFile::parse("name = \"x\"\nlayer = []\n").is_err());
    }

    #[test]
    fn scenario_file_parsing() {
        let text = r#"
seed = 9
snr_db = 40.0
[grid]
start = 100.0
stop = 200.0
step = 50.0
[tube]
mic_positions = [-0.25, -0.2, 0.05, 0.1]
sample_thickness = 0.001
diameter = 0.0998
[[layer]]
kind = "identity"
"#;
        let s = ScenarioFile::parse(text, None).unwrap();
        assert_eq!(s.grid.len(), 3);
        assert_eq!(s.scenario.seed, 9);
        assert_eq!(s.scenario.snr_db, Some(40.0));
        let no_tube: String = text.split("[tube]").next().unwrap().to_string() + "[[layer]]\nkind = \"identity\"\n";
        assert!(ScenarioFile::parse(&no_tube, None).is_err());
        let cfg = TubeConfig {
            air: AirProperties::default(),
            geometry: TubeGeometry::new([-0.3, -0.2, 0.1, 0.2], 0.002, 0.1).unwrap(),
        };
        let s = ScenarioFile::parse(&no_tube, Some(&cfg)).unwrap();
        assert_eq!(s.scenario.geometry, cfg.geometry);
        let loud = text.replace("seed = 9", "seed = 9\ntermination = [1.0, 0.0]");
        assert!(ScenarioFile::parse(&loud, None).is_err());
    }

    #[test]
    fn material_file_parsing() {
        let text = "[[material]]\nname = \"pvc\"\nthickness_mm = 1.012\nsurface_density = 1.216\ndensity = 1201.6\n";
        let m = parse_materials(text).unwrap();
        assert_eq!(m[0].surface_density(), 1.216);
        let off = text.replace("1201.6", "1500");
        assert!(parse_materials(&off).is_err());
        assert!(parse_materials(&text.replace("1.216", "-1")).is_err());
    }

    proptest! {
        #[test]
        fn narrowband_round_trip(vals in proptest::collection::vec(proptest::option::of(-1e6f64..1e6), 1..40)) {
            let freqs: Vec<f64> = (0..vals.len()).map(|i| 20.0 + 7.5 * i as f64).collect();
            let text = narrowband_to_csv(&freqs, &[("stl", &vals)]);
            let (f2, v2) = narrowband_from_csv(&text, "n.csv").unwrap();
            prop_assert_eq!(&f2, &freqs);
            prop_assert_eq!(&v2, &vals);
            prop_assert_eq!(narrowband_to_csv(&f2, &[("stl", &v2)]), text);
        }
    }
}
