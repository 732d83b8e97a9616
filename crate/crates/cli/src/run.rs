//! Protocol runners: call into the core, write CSVs and a manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use phononbus_core::msgate::{self, bell_state_fidelity, fitted_rate};
use phononbus_core::nuclear::swap_protocol;
use phononbus_core::pitchcatch::{mid_flight_snapshot, simulate_schrodinger, skewness};
use phononbus_core::strain::{coupling_map, StrainTensor};
use phononbus_core::transduction::{
    default_delay_range, log_grid, optimize_delay, run_transfer, sweep, DirectChainConfig, DELAY_GRID, WINDOW,
};
use phononbus_core::units::{to_khz, to_mhz};
use serde::Serialize;

use crate::config::{Protocol, RunConfig};

/// 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn floats(row: &[f64]) -> Vec<String> {
    row.iter().map(|&x| fmt_float(x)).collect()
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn column<'a>(tr: &'a phononbus_core::lindblad::Trajectory<impl Sized>, name: &str) -> Result<&'a [f64]> {
    tr.observable(name).with_context(|| format!("missing observable {name}"))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub values: BTreeMap<String, f64>,
}

impl RunSummary {
    fn file(&mut self, out: &Path, name: &str) -> PathBuf {
        let p = out.join(name);
        self.files.push(p.clone());
        p
    }

    fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    protocol: Protocol,
    files: Vec<String>,
    tool: Tool,
    summary: BTreeMap<String, String>,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

/// Run `cfg.protocol`, writing into `out`. Output bytes do not depend on
/// `workers`.
pub fn run(cfg: &RunConfig, out: &Path, workers: usize) -> Result<RunSummary> {
    cfg.validate()?;
    let protocol = cfg.protocol.context("protocol: not set")?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let integrator = cfg.integrator.to_core()?;
    let mut s = RunSummary::default();
    log::info!("running {protocol} into {}", out.display());
    match protocol {
        Protocol::Transfer => {
            let mut chain = cfg.transfer.to_core(&integrator);
            let dtau = match cfg.transfer.dtau_us {
                Some(d) => d,
                None => optimize_delay(&chain, default_delay_range(&chain), DELAY_GRID)?.dtau,
            };
            chain = chain.with_delay(dtau);
            let r = run_transfer(&chain)?;
            let tr = &r.trajectory;
            let (sc, ph, spin) = (column(tr, "pop_sc")?, column(tr, "pop_ph")?, column(tr, "pop_spin")?);
            let path = s.file(out, "populations.csv");
            write_csv(
                &path,
                &["t_us", "pop_sc", "pop_ph", "pop_spin"],
                (0..tr.times.len()).map(|k| floats(&[tr.times[k], sc[k], ph[k], spin[k]])),
            )?;
            s.value("fidelity", r.fidelity);
            s.value("dtau_us", r.dtau);
        }
        Protocol::Sweep => {
            let b = &cfg.sweep;
            let template = DirectChainConfig {
                g_scp: b.g_scp.angular(),
                gamma_sc: b.gamma_sc.angular(),
                gamma_p: b.gamma_p.angular(),
                n_max: b.n_max,
                tau_scp: WINDOW / b.g_scp.angular(),
                integrator: integrator.clone(),
                ..DirectChainConfig::default()
            };
            let g = log_grid(b.g_pe_min.angular(), b.g_pe_max.angular(), b.g_pe_points);
            let ge = log_grid(b.gamma_e_min.angular(), b.gamma_e_max.angular(), b.gamma_e_points);
            let table = sweep(&template, &g, &ge, workers)?;
            let path = s.file(out, "fidelity_grid.csv");
            write_csv(
                &path,
                &["g_pe_MHz", "gamma_e_kHz", "F", "log10_infidelity", "dtau_us"],
                table.cells.iter().map(|c| floats(&[to_mhz(c.g_pe), to_khz(c.gamma_e), c.fidelity, c.log10_infidelity, c.dtau])),
            )?;
            let f = table.cells.iter().map(|c| c.fidelity);
            s.value("cells", table.cells.len() as f64);
            s.value("f_max", f.clone().fold(f64::NEG_INFINITY, f64::max));
            s.value("f_min", f.fold(f64::INFINITY, f64::min));
        }
        Protocol::PitchCatch => {
            let wg = cfg.pitch_catch.to_core(&integrator);
            wg.validate()?;
            let tr = simulate_schrodinger(&wg)?;
            let (sc, pw, ph) = (column(&tr, "pop_sc")?, column(&tr, "pop_wg")?, column(&tr, "pop_ph")?);
            let path = s.file(out, "populations.csv");
            write_csv(
                &path,
                &["t_us", "pop_sc", "pop_wg", "pop_ph"],
                (0..tr.times.len()).map(|k| floats(&[tr.times[k], sc[k], pw[k], ph[k]])),
            )?;
            let snap = mid_flight_snapshot(&wg)?;
            let path = s.file(out, "packet.csv");
            write_csv(&path, &["x_m", "intensity"], snap.profile.iter().map(|&(x, i)| floats(&[x, i])))?;
            s.value("final_pop_ph", *ph.last().unwrap_or(&0.0));
            s.value("snapshot_t_us", snap.time);
            s.value("snapshot_pop_wg", snap.waveguide_population);
            s.value("skewness", skewness(&snap.profile));
        }
        Protocol::StrainMap => {
            let b = &cfg.strain_map;
            let input = b.input.as_ref().context("strain_map.input: a strain CSV is required")?;
            let samples = read_strain_csv(input)?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
            let map = pool.install(|| coupling_map(&samples, &b.constants(), b.normalization))?;
            let path = s.file(out, "strain_map.csv");
            write_csv(
                &path,
                &["x", "y", "z", "g_orb_MHz"],
                map.points.iter().map(|(p, g)| floats(&[p[0], p[1], p[2], to_mhz(*g)])),
            )?;
            s.value("points", map.points.len() as f64);
            s.value("max_abs_g_orb_MHz", to_mhz(map.max_abs));
        }
        Protocol::NuclearSwap => {
            let (hf, electron, timing) = cfg.nuclear_swap.to_core()?;
            let r = swap_protocol(&hf, &electron, timing)?;
            let path = s.file(out, "gates.csv");
            write_csv(
                &path,
                &["gate_index", "duration_us", "F_running"],
                r.gates.iter().map(|g| vec![g.index.to_string(), fmt_float(g.duration), fmt_float(g.f_running)]),
            )?;
            s.value("fidelity", r.fidelity);
            s.value("total_time_us", r.total_time);
        }
        Protocol::MsGate => {
            let ms = cfg.ms_gate.to_core(&integrator);
            let r = msgate::simulate(&ms)?;
            let tr = &r.trajectory;
            let (gg, ee) = (column(tr, "n_gg")?, column(tr, "n_ee")?);
            let path = s.file(out, "ms_gate.csv");
            write_csv(
                &path,
                &["t_us", "n_gg", "n_ee", "ideal"],
                (0..tr.times.len()).map(|k| floats(&[tr.times[k], gg[k], ee[k], r.ideal[k]])),
            )?;
            let bell = bell_state_fidelity(&ms, ms.bell_time()?)?;
            s.value("g_ms_kHz", to_khz(r.g_ms));
            s.value("bell_time_us", ms.bell_time()?);
            s.value("bell_fidelity", bell.fidelity);
            s.value("bell_purity", bell.purity);
            if let Some(g) = fitted_rate(&tr.times, ee) {
                s.value("fitted_g_ms_kHz", to_khz(g));
            }
        }
    }
    write_manifest(cfg, protocol, out, &mut s)?;
    Ok(s)
}

fn write_manifest(cfg: &RunConfig, protocol: Protocol, out: &Path, s: &mut RunSummary) -> Result<()> {
    // run location and worker count never reach the output
    let resolved = RunConfig { protocol: Some(protocol), out: None, workers: None, ..cfg.clone() };
    let manifest = Manifest {
        protocol,
        files: s.files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
        tool: Tool { name: "phononbus", version: env!("CARGO_PKG_VERSION") },
        summary: s.values.iter().map(|(k, &v)| (k.clone(), fmt_float(v))).collect(),
        config: &resolved,
    };
    let path = s.file(out, "manifest.toml");
    fs::write(&path, toml::to_string(&manifest).context("serializing manifest")?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

const STRAIN_COLUMNS: [&str; 9] = ["x", "y", "z", "e11", "e22", "e33", "e12", "e13", "e23"];

/// Rows of (position, strain tensor) from a headed CSV.
pub fn read_strain_csv(path: &Path) -> Result<Vec<([f64; 3], StrainTensor)>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    let mut idx = [0usize; 9];
    for (slot, name) in idx.iter_mut().zip(STRAIN_COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{}: missing column {name}", path.display()))?;
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut v = [0.0; 9];
        for (k, &j) in idx.iter().enumerate() {
            let cell = rec.get(j).unwrap_or("");
            v[k] = cell
                .parse()
                .with_context(|| format!("{} row {}: bad {} value {cell:?}", path.display(), i + 1, STRAIN_COLUMNS[k]))?;
        }
        let eps = StrainTensor::from_components(v[3], v[4], v[5], v[6], v[7], v[8])
            .with_context(|| format!("{} row {}", path.display(), i + 1))?;
        rows.push(([v[0], v[1], v[2]], eps));
    }
    if rows.is_empty() {
        bail!("{}: no strain samples", path.display());
    }
    Ok(rows)
}
