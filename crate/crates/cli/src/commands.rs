//! The six subcommands as library functions. Each returns a [`RunReport`];
//! nothing here writes to disk.

use std::path::{Path, PathBuf};

use tubeloss_core::bands::{
    average_repetitions, band_average, third_octave_bands, BandMode, BandTable, Quantity, RepetitionMode,
    RepetitionSet, ThirdOctaveBand,
};
use tubeloss_core::config::TubeConfig;
use tubeloss_core::domain::{curtain_materials, plane_wave_cutoff, AirProperties, FrequencyGrid, MaterialSpec};
use tubeloss_core::formats::{
    band_tables_from_csv, check_geometry, narrowband_from_csv, parse_materials, read_text, MicSpectraFile,
    ScenarioFile, StackFile,
};
use tubeloss_core::models::{cascade_stl, mass_law, LayerModel, MassLawConstant};
use tubeloss_core::pipeline::analyze;
use tubeloss_core::synth::synth_mic_pressures;
use tubeloss_core::transfer::ANECHOIC_THRESHOLD;
use tubeloss_core::{Error, Result};

use crate::report::{hash_text, now_unix, Narrowband, Provenance, RunReport, TOOL_VERSION};

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub config: Option<TubeConfig>,
    pub band_mode: BandMode,
    pub rep_mode: RepetitionMode,
    pub masslaw_constant: MassLawConstant,
    pub seed: Option<u64>,
    pub timestamp: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            config: None,
            band_mode: BandMode::default(),
            rep_mode: RepetitionMode::default(),
            masslaw_constant: MassLawConstant::Paper,
            seed: None,
            timestamp: now_unix(),
        }
    }
}

impl Options {
    pub fn with_config_file(mut self, path: &Path) -> Result<Self> {
        self.config = Some(TubeConfig::load(path)?);
        Ok(self)
    }

    fn air(&self) -> AirProperties {
        self.config.map(|c| c.air).unwrap_or_default()
    }

    fn provenance(&self, config: Option<&TubeConfig>, seed: Option<u64>, inputs: Vec<String>) -> Provenance {
        Provenance {
            tool_version: TOOL_VERSION.to_string(),
            config_hash: config
                .or(self.config.as_ref())
                .map_or("none".to_string(), |c| hash_text(&c.to_toml_string())),
            seed,
            band_mode: self.band_mode,
            rep_mode: self.rep_mode,
            masslaw_constant: self.masslaw_constant,
            inputs,
            timestamp: self.timestamp,
        }
    }
}

/// Nominal band-center range to report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRange {
    pub min_hz: f64,
    pub max_hz: f64,
}

impl Default for BandRange {
    fn default() -> Self {
        Self {
            min_hz: 100.0,
            max_hz: 5000.0,
        }
    }
}

impl BandRange {
    /// Bands inside the range whose centers also lie on the data's span.
    fn bands_for(&self, frequencies: &[f64]) -> Vec<ThirdOctaveBand> {
        let (Some(&lo), Some(&hi)) = (frequencies.first(), frequencies.last()) else {
            return Vec::new();
        };
        third_octave_bands(self.min_hz.max(lo), self.max_hz.min(hi)).unwrap_or_default()
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

pub struct SynthRun {
    pub report: RunReport,
    pub files: Vec<MicSpectraFile>,
}

/// Output paths for `n` repetitions: the path itself for one, `stem_1.ext`,
/// `stem_2.ext`, ... otherwise.
pub fn repetition_paths(output: &Path, n: usize) -> Vec<PathBuf> {
    if n == 1 {
        return vec![output.to_path_buf()];
    }
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = output
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    (1..=n)
        .map(|i| output.with_file_name(format!("{stem}_{i}{ext}")))
        .collect()
}

/// Synthesize `repetitions` spectra files; repetition i uses seed + i.
pub fn cmd_synth(scenario_path: &Path, repetitions: usize, opts: &Options) -> Result<SynthRun> {
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    let text = read_text(scenario_path)?;
    let ScenarioFile { mut scenario, grid } = ScenarioFile::parse(&text, opts.config.as_ref())?;
    if let Some(seed) = opts.seed {
        scenario.seed = seed;
    }
    let config = TubeConfig {
        air: scenario.air,
        geometry: scenario.geometry,
    };
    let base_seed = scenario.seed;
    let mut files = Vec::with_capacity(repetitions);
    for i in 0..repetitions {
        scenario.seed = base_seed.wrapping_add(i as u64);
        let out = synth_mic_pressures(&scenario, &grid)?;
        files.push(MicSpectraFile {
            config,
            pressures: out.pressures,
        });
    }
    let mut warnings = Vec::new();
    let cutoff = plane_wave_cutoff(&config.geometry, &config.air);
    if grid.iter().any(|f| f > cutoff) {
        warnings.push(format!("grid extends above the plane-wave cutoff of {cutoff:.1} Hz"));
    }
    let summary = vec![
        format!("bins = {}", grid.len()),
        format!("repetitions = {repetitions}"),
        format!(
            "snr = {}",
            scenario
                .snr_db
                .map_or("noiseless".to_string(), |s| format!("{s} dB re |A|"))
        ),
        format!("termination D/C = {}", scenario.termination),
    ];
    let report = RunReport {
        command: "synth".into(),
        provenance: opts.provenance(Some(&config), Some(base_seed), vec![display(scenario_path)]),
        summary,
        warnings,
        narrowband: None,
        bands: Vec::new(),
    };
    Ok(SynthRun { report, files })
}

/// Decompose, reconstruct and average one or more repetitions of a measurement.
pub fn cmd_stl(inputs: &[PathBuf], bands: BandRange, opts: &Options) -> Result<RunReport> {
    if inputs.is_empty() {
        return Err(Error::Config("stl needs at least one input file".into()));
    }
    let files = inputs
        .iter()
        .map(|p| MicSpectraFile::load(p))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    let active = match opts.config {
        Some(c) => c,
        None => {
            warnings.push(format!(
                "no configuration given; using the header of {}",
                display(&inputs[0])
            ));
            files[0].config
        }
    };
    let grid = files[0].grid().clone();
    for (f, p) in files.iter().zip(inputs) {
        check_geometry(&f.config, &active, &display(p))?;
        grid.ensure_same(f.grid())?;
    }
    let freqs = grid.as_slice().to_vec();
    let many = files.len() > 1;

    let mut stl_runs = RepetitionSet::new(freqs.clone());
    let mut direct_runs = RepetitionSet::new(freqs.clone());
    let mut r2_sum = vec![0.0; freqs.len()];
    let mut r2_count = vec![0usize; freqs.len()];
    for (f, p) in files.iter().zip(inputs) {
        let a = analyze(f.pressure_refs(), &active.geometry, &active.air, ANECHOIC_THRESHOLD).map_err(|e| match e {
            Error::NoValidBins(m) => Error::NoValidBins(format!("{}: {m}", display(p))),
            other => other,
        })?;
        for w in &a.warnings {
            warnings.push(if many {
                format!("{}: {w}", display(p))
            } else {
                w.to_string()
            });
        }
        for (i, b) in a.bins.iter().enumerate() {
            if let Some(r) = b.as_ref().and_then(|b| b.indicators.reflection) {
                r2_sum[i] += r.norm_sqr();
                r2_count[i] += 1;
            }
        }
        stl_runs.push(display(p), a.stl())?;
        direct_runs.push(
            display(p),
            a.bins
                .iter()
                .map(|b| b.as_ref().and_then(|b| b.direct).map(|d| d.stl_db))
                .collect(),
        )?;
    }
    let stl = average_repetitions(&stl_runs, opts.rep_mode, Quantity::Loss)?;
    let direct = average_repetitions(&direct_runs, opts.rep_mode, Quantity::Loss)?;
    let valid: Vec<Option<f64>> = (0..freqs.len())
        .map(|i| Some(stl_runs.runs().iter().filter(|r| r[i].is_some()).count() as f64))
        .collect();
    let r2: Vec<Option<f64>> = r2_sum
        .iter()
        .zip(&r2_count)
        .map(|(s, &n)| (n > 0).then(|| s / n as f64))
        .collect();

    let band_set = bands.bands_for(&freqs);
    let mut tables = Vec::new();
    if !band_set.is_empty() {
        let mean_table = band_average(&freqs, &stl.mean, &band_set, opts.band_mode, Quantity::Loss, "STL")?;
        let per_run: Vec<Option<BandTable>> = stl_runs
            .runs()
            .iter()
            .map(|r| band_average(&freqs, r, &band_set, opts.band_mode, Quantity::Loss, "run").ok())
            .collect();
        let mut band_reps = RepetitionSet::new(band_set.iter().map(|b| b.nominal_hz).collect());
        for (t, label) in per_run.iter().zip(stl_runs.labels()) {
            band_reps.push(
                label.clone(),
                t.as_ref().map_or(vec![None; band_set.len()], |t| t.values.clone()),
            )?;
        }
        let band_summary = average_repetitions(&band_reps, opts.rep_mode, Quantity::Loss)?;
        let mut spread = BandTable::new("STL_spread", band_set.clone(), band_summary.spread)?;
        spread.coverage = mean_table.coverage.clone();
        let partial: Vec<String> = mean_table
            .bands
            .iter()
            .zip(&mean_table.coverage)
            .filter(|(_, &c)| c < 1.0)
            .map(|(b, c)| format!("{} Hz ({:.0}%)", b.nominal_hz, c * 100.0))
            .collect();
        if !partial.is_empty() {
            warnings.push(format!("incomplete band coverage: {}", partial.join(", ")));
        }
        tables.push(mean_table);
        tables.push(spread);
    }

    let excluded = valid.iter().filter(|v| v.unwrap_or(0.0) < files.len() as f64).count();
    let summary = vec![
        format!("repetitions = {}", files.len()),
        format!("bins = {} ({} with at least one exclusion)", freqs.len(), excluded),
        format!(
            "plane-wave cutoff = {:.1} Hz",
            plane_wave_cutoff(&active.geometry, &active.air)
        ),
        format!(
            "sample thickness = {:.4} mm",
            active.geometry.sample_thickness() * 1000.0
        ),
    ];
    Ok(RunReport {
        command: "stl".into(),
        provenance: opts.provenance(Some(&active), opts.seed, inputs.iter().map(|p| display(p)).collect()),
        summary,
        warnings,
        narrowband: Some(Narrowband {
            frequencies: freqs,
            columns: vec![
                ("stl_mean".into(), stl.mean),
                ("stl_spread".into(), stl.spread),
                ("stl_direct".into(), direct.mean),
                ("r_a_sq".into(), r2),
                ("valid_reps".into(), valid),
            ],
        }),
        bands: tables,
    })
}

/// Where to evaluate the mass law.
#[derive(Debug, Clone, PartialEq)]
pub enum MassLawPoints {
    /// Nominal one-third-octave centers.
    Bands(BandRange),
    Frequencies(Vec<f64>),
}

pub fn load_materials(path: Option<&Path>) -> Result<Vec<MaterialSpec>> {
    match path {
        Some(p) => parse_materials(&read_text(p)?).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", display(p))),
            other => other,
        }),
        None => Ok(curtain_materials()),
    }
}

pub fn cmd_masslaw(materials: &[MaterialSpec], points: &MassLawPoints, opts: &Options) -> Result<RunReport> {
    if materials.is_empty() {
        return Err(Error::Config("no materials given".into()));
    }
    let air = opts.air();
    let constant = opts.masslaw_constant;
    let freqs: Vec<f64> = match points {
        MassLawPoints::Bands(r) => third_octave_bands(r.min_hz, r.max_hz)?
            .iter()
            .map(|b| b.nominal_hz)
            .collect(),
        MassLawPoints::Frequencies(f) => FrequencyGrid::new(f.clone())?.as_slice().to_vec(),
    };
    let mut warnings = Vec::new();
    let mut columns = Vec::new();
    for m in materials {
        let values = freqs
            .iter()
            .map(|&f| mass_law(f, m.surface_density(), constant, &air).map(Some))
            .collect::<Result<Vec<_>>>()?;
        let negative: Vec<String> = freqs
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.is_some_and(|x| x < 0.0))
            .map(|(f, _)| f.to_string())
            .collect();
        if !negative.is_empty() {
            warnings.push(format!(
                "{}: negative prediction at {} Hz; the mass law does not hold there",
                m.name(),
                negative.join(", ")
            ));
        }
        columns.push((m.name().to_string(), values));
    }
    let summary = materials
        .iter()
        .map(|m| {
            format!(
                "{}: {} mm, {} kg/m², {:.1} kg/m³",
                m.name(),
                m.thickness() * 1e3,
                m.surface_density(),
                m.implied_bulk_density()
            )
        })
        .chain(std::iter::once(format!(
            "constant = {:.4} dB ({})",
            constant.offset_db(&air),
            constant.label()
        )))
        .collect();
    let (narrowband, bands) = match points {
        MassLawPoints::Bands(r) => {
            let set = third_octave_bands(r.min_hz, r.max_hz)?;
            let tables = columns
                .into_iter()
                .map(|(name, v)| BandTable::new(name, set.clone(), v))
                .collect::<Result<Vec<_>>>()?;
            (None, tables)
        }
        MassLawPoints::Frequencies(_) => (
            Some(Narrowband {
                frequencies: freqs,
                columns,
            }),
            Vec::new(),
        ),
    };
    Ok(RunReport {
        command: "masslaw".into(),
        provenance: opts.provenance(None, opts.seed, Vec::new()),
        summary,
        warnings,
        narrowband,
        bands,
    })
}

fn first_table(path: &Path) -> Result<BandTable> {
    let mut tables = band_tables_from_csv(&read_text(path)?, &display(path))?;
    Ok(tables.swap_remove(0))
}

/// IL = L_r0 − L_rs per band from two band-table files.
pub fn cmd_il(without_sample: &Path, with_sample: &Path, opts: &Options) -> Result<RunReport> {
    let r0 = first_table(without_sample)?;
    let rs = first_table(with_sample)?;
    let il = tubeloss_core::bands::insertion_loss(&r0, &rs)?;
    let mut warnings = Vec::new();
    let neg = il.negative_bands();
    if !neg.is_empty() {
        let list: Vec<String> = neg.iter().map(|f| f.to_string()).collect();
        warnings.push(format!("negative insertion loss at {} Hz", list.join(", ")));
    }
    let missing = il.values.iter().filter(|v| v.is_none()).count();
    if missing > 0 {
        warnings.push(format!("{missing} band(s) missing in one of the inputs"));
    }
    Ok(RunReport {
        command: "il".into(),
        provenance: opts.provenance(None, opts.seed, vec![display(without_sample), display(with_sample)]),
        summary: vec![format!("bands = {}", il.bands.len())],
        warnings,
        narrowband: None,
        bands: vec![il],
    })
}

/// Cascade STL of a stack, next to each non-air layer on its own.
pub fn cmd_stack(stack_path: &Path, grid: &FrequencyGrid, bands: BandRange, opts: &Options) -> Result<RunReport> {
    let stack = StackFile::parse(&read_text(stack_path)?).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", display(stack_path))),
        other => other,
    })?;
    let air = opts.air();
    let mut columns = vec![("stack".to_string(), cascade_stl(&stack.layers, grid, &air)?)];
    let mut summary = vec![format!("stack '{}':", stack.name)];
    for (i, layer) in stack.layers.iter().enumerate() {
        summary.push(format!("  layer {} = {}", i + 1, layer.describe()));
        if matches!(layer, LayerModel::AirGap { .. } | LayerModel::Identity) {
            continue;
        }
        columns.push((
            format!("layer{}", i + 1),
            cascade_stl(std::slice::from_ref(layer), grid, &air)?,
        ));
    }
    let freqs = grid.as_slice().to_vec();
    let band_set = bands.bands_for(&freqs);
    let tables = if band_set.is_empty() {
        Vec::new()
    } else {
        columns
            .iter()
            .map(|(name, v)| band_average(&freqs, v, &band_set, opts.band_mode, Quantity::Loss, name.clone()))
            .collect::<Result<Vec<_>>>()?
    };
    let mut warnings = Vec::new();
    if let Some(stack_bands) = tables.first() {
        for t in &tables[1..] {
            let worse: Vec<String> = stack_bands
                .bands
                .iter()
                .zip(stack_bands.values.iter().zip(&t.values))
                .filter(|(_, (s, l))| matches!((s, l), (Some(s), Some(l)) if s <= l))
                .map(|(b, _)| b.nominal_hz.to_string())
                .collect();
            if !worse.is_empty() {
                warnings.push(format!("stack does not exceed {} at {} Hz", t.name, worse.join(", ")));
            }
        }
    }
    Ok(RunReport {
        command: "stack".into(),
        provenance: opts.provenance(None, opts.seed, vec![display(stack_path)]),
        summary,
        warnings,
        narrowband: Some(Narrowband {
            frequencies: freqs,
            columns,
        }),
        bands: tables,
    })
}

/// Band-average the first value column of a narrowband CSV.
pub fn cmd_bands(input: &Path, quantity: Quantity, bands: BandRange, opts: &Options) -> Result<RunReport> {
    let (freqs, values) = narrowband_from_csv(&read_text(input)?, &display(input))?;
    let band_set = bands.bands_for(&freqs);
    if band_set.is_empty() {
        return Err(Error::BandMismatch(format!(
            "no band between {} and {} Hz overlaps the data",
            bands.min_hz, bands.max_hz
        )));
    }
    let name = match quantity {
        Quantity::Loss => "loss",
        Quantity::Level => "level",
    };
    let table = band_average(&freqs, &values, &band_set, opts.band_mode, quantity, name)?;
    let partial = table.coverage.iter().filter(|&&c| c < 1.0).count();
    let warnings = if partial > 0 {
        vec![format!("{partial} band(s) with incomplete coverage")]
    } else {
        Vec::new()
    };
    Ok(RunReport {
        command: "bands".into(),
        provenance: opts.provenance(None, opts.seed, vec![display(input)]),
        summary: vec![format!("bins = {}", freqs.len())],
        warnings,
        narrowband: None,
        bands: vec![table],
    })
}
