//! Output files. Every artifact is rendered to a string first, so a run
//! is a pure function of its configuration and trees can be compared
//! byte for byte.
//!
//! Floats are written as `{:.16e}` (round-trips every `f64`). CSV rows
//! are sorted ascending by their leading columns.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use ssh2d_core::analysis::{FieldProfile, StateMetrics};
use ssh2d_core::experiment::{EnsembleResult, SweepRow};
use ssh2d_core::figures::{Bundle, DoubletSummary, SpectralSummary, SweepSummary};
use ssh2d_core::fragments::{chain_fragment_energies, star_fragment_energies, FragmentReport};
use ssh2d_core::{DisorderMode, LdosResult, ModelParams};

use crate::config::{ModeName, RunConfig};

/// One file of a run, relative to the output directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

impl Artifact {
    fn new(path: impl Into<PathBuf>, contents: String) -> Self {
        Self {
            path: path.into(),
            contents,
        }
    }
}

pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn spectrum_csv(metrics: &[StateMetrics]) -> String {
    let mut s = String::from("index,energy,ipr,corner_weight,edge_weight,label\n");
    for (k, m) in metrics.iter().enumerate() {
        let _ = writeln!(
            s,
            "{k},{},{},{},{},{}",
            f(m.energy),
            f(m.ipr),
            f(m.corner_weight),
            f(m.edge_weight),
            m.label.as_str()
        );
    }
    s
}

/// Rows by energy, then by site position.
pub fn ldos_csv(ldos: &LdosResult, params: &ModelParams) -> String {
    let mut s = String::from("energy,x,y,rho\n");
    let mut order: Vec<(usize, usize, usize)> = ldos
        .sites
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let (x, y) = params.site_at(i).position();
            (x, y, k)
        })
        .collect();
    order.sort_unstable();
    for (e, &energy) in ldos.energy_grid.iter().enumerate() {
        let fe = f(energy);
        for &(x, y, k) in &order {
            let _ = writeln!(s, "{fe},{x},{y},{}", f(ldos.values[k][e]));
        }
    }
    s
}

pub fn dos_csv(grid: &[f64], dos: &[f64]) -> String {
    let mut s = String::from("energy,dos\n");
    for (e, d) in grid.iter().zip(dos) {
        let _ = writeln!(s, "{},{}", f(*e), f(*d));
    }
    s
}

pub fn profile_csv(p: &FieldProfile) -> String {
    let mut s = String::from("x,y,density\n");
    for (x, y, d) in p.entries() {
        let _ = writeln!(s, "{x},{y},{}", f(d));
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("J,index,energy,label\n");
    for r in rows {
        let (Some(e), labels) = (&r.eigenvalues, &r.labels) else {
            continue;
        };
        let fj = f(r.nnn);
        for (k, &energy) in e.iter().enumerate() {
            let label = labels.as_ref().map_or("", |l| l[k].as_str());
            let _ = writeln!(s, "{fj},{k},{},{label}", f(energy));
        }
    }
    s
}

/// Fragment-predicted corner energies per sweep point.
pub fn overlay_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("J,corner,energy\n");
    for r in rows {
        let Some(preds) = &r.predictions else { continue };
        let fj = f(r.nnn);
        let mut lines: Vec<(&str, f64)> = preds
            .iter()
            .flat_map(|c| c.energies.iter().map(move |&e| (c.corner.name(), e)))
            .collect();
        lines.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));
        for (corner, e) in lines {
            let _ = writeln!(s, "{fj},{corner},{}", f(e));
        }
    }
    s
}

pub fn ensemble_csv(result: &EnsembleResult) -> String {
    let mut s = String::from("realization,seed,weyl_bound,max_shift,weyl_holds,corner_states_retained\n");
    for r in &result.realizations {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.index,
            r.seed,
            f(r.weyl_bound),
            f(r.max_shift),
            r.weyl_holds(),
            r.corner_states_retained(&result.reference)
        );
    }
    s
}

pub fn ensemble_states_csv(result: &EnsembleResult) -> String {
    let mut s =
        String::from("realization,clean_index,index,energy,shift,overlap,corner_weight,label,in_gap\n");
    for r in &result.realizations {
        let mut partners: Vec<_> = r.partners.iter().collect();
        partners.sort_by_key(|p| p.clean_index);
        for p in partners {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.index,
                p.clean_index,
                p.index,
                f(p.energy),
                f(p.shift),
                f(p.overlap),
                f(p.corner_weight),
                p.label.as_str(),
                p.in_gap
            );
        }
    }
    s
}

fn pair(p: (f64, f64)) -> Value {
    json!([p.0, p.1])
}

fn mode_name(m: DisorderMode) -> Value {
    serde_json::to_value(ModeName::from(m)).expect("unit enum")
}

fn params_json(p: &ModelParams) -> Value {
    json!({
        "N": p.nx, "M": p.ny, "gamma": p.gamma, "J": p.nnn,
        "lambda": p.lambda, "omega": p.omega, "kappa": p.kappa,
    })
}

fn analysis_json(cfg: &RunConfig) -> Value {
    let a = &cfg.analysis;
    json!({
        "d_c": a.d_c, "w_corner": a.w_corner, "w_edge": a.w_edge,
        "degeneracy_tol": a.degeneracy_tol, "zero_tol": a.zero_tol, "g_min": a.g_min,
    })
}

fn header(cfg: &RunConfig, command: &str, figure: Option<&str>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("figure".into(), json!(figure));
    m.insert("parameters".into(), params_json(&cfg.params));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("analysis".into(), analysis_json(cfg));
    m
}

fn doublet_json(d: &DoubletSummary) -> Value {
    json!({
        "name": d.name,
        "energy": d.energy,
        "splitting": d.splitting,
        "states": d.states,
        "corner_weight": d.corner_weight,
        "gap": d.gap.map(pair),
        "in_gap": d.gap.is_some(),
        "peak": [d.peak.0, d.peak.1],
        "chain_energy": d.chain_energy,
        "prediction": d.prediction.map(|p| json!({
            "energy": p.predicted,
            "distance": p.distance,
            "ambiguous": p.ambiguous,
        })),
    })
}

pub fn zero_gap_message(s: &SpectralSummary) -> String {
    match s.zero_gap {
        Some((lo, hi)) => format!("E=0 lies in the gap [{}, {}]", f(lo), f(hi)),
        None => "no gap containing E=0".to_string(),
    }
}

pub fn spectral_summary_json(cfg: &RunConfig, command: &str, bundle: &Bundle, s: &SpectralSummary) -> Value {
    let mut m = header(cfg, command, bundle.config.figure.map(|f| f.name()));
    let p = &cfg.params;
    m.insert(
        "disorder".into(),
        json!({
            "eps_max": bundle.config.eps_max,
            "mode": mode_name(bundle.config.mode),
            "realization_seed": s.disorder_seed,
        }),
    );
    m.insert("dimension".into(), json!(p.dim()));
    m.insert("gaps".into(), Value::Array(s.gaps.iter().copied().map(pair).collect()));
    m.insert("band_gaps".into(), Value::Array(s.band_gaps.iter().copied().map(pair).collect()));
    m.insert("zero_gap".into(), json!(s.zero_gap.map(pair)));
    m.insert("zero_energy".into(), json!(zero_gap_message(s)));
    m.insert("zero_energy_corner_states".into(), json!(s.zero_energy_corner_states));
    m.insert("doublets".into(), Value::Array(s.doublets.iter().map(doublet_json).collect()));
    m.insert("chain_energies".into(), json!(chain_fragment_energies(p.nnn, p.lambda)));
    m.insert("star_energies".into(), json!(star_fragment_energies(p.nnn, p.lambda)));
    if let Some(r) = &bundle.fragments {
        m.insert("fragment_predictions".into(), corner_energies_json(r));
    }
    let labels = ["corner", "edge", "bulk"];
    let counts: Map<String, Value> = labels
        .iter()
        .map(|l| {
            let n = bundle.metrics.iter().filter(|x| x.label.as_str() == *l).count();
            (l.to_string(), json!(n))
        })
        .collect();
    m.insert("label_counts".into(), Value::Object(counts));
    m.insert(
        "profiles".into(),
        json!(bundle.profiles.iter().map(|p| p.name.as_str()).collect::<Vec<_>>()),
    );
    Value::Object(m)
}

pub fn sweep_summary_json(cfg: &RunConfig, command: &str, figure: Option<&str>, s: &SweepSummary) -> Value {
    let mut m = header(cfg, command, figure);
    m.insert("J_values".into(), json!(cfg.sweep_j));
    m.insert(
        "corner_state_counts".into(),
        Value::Array(s.corner_counts.iter().map(|&(j, n)| json!({"J": j, "count": n})).collect()),
    );
    Value::Object(m)
}

fn stats(s: &Option<ssh2d_core::experiment::Stats>) -> Value {
    match s {
        Some(s) => json!({"median": s.median, "min": s.min, "max": s.max}),
        None => Value::Null,
    }
}

pub fn ensemble_summary_json(cfg: &RunConfig, result: &EnsembleResult) -> Value {
    let mut m = header(cfg, "ensemble", None);
    let a = &result.aggregate;
    m.insert(
        "ensemble".into(),
        json!({
            "realizations": cfg.ensemble.realizations,
            "eps_max": cfg.ensemble.eps_max,
            "mode": mode_name(cfg.ensemble.mode),
            "seeds": result.realizations.iter().map(|r| r.seed).collect::<Vec<_>>(),
        }),
    );
    m.insert(
        "tracked_states".into(),
        Value::Array(
            result
                .reference
                .tracked
                .iter()
                .map(|t| {
                    json!({
                        "index": t.index, "energy": t.energy,
                        "corner_weight": t.corner_weight, "zero_energy": t.zero_energy,
                    })
                })
                .collect(),
        ),
    );
    m.insert(
        "aggregate".into(),
        json!({
            "weyl_bound": stats(&a.weyl_bound),
            "max_shift": stats(&a.max_shift),
            "corner_state_shift": stats(&a.corner_state_shift),
            "corner_state_weight": stats(&a.corner_state_weight),
            "zero_state_weight": stats(&a.zero_state_weight),
            "weyl_violations": a.weyl_violations,
            "retained": a.retained,
            "retained_fraction": result.retained_fraction(),
        }),
    );
    Value::Object(m)
}

fn corner_energies_json(r: &FragmentReport) -> Value {
    let m: Map<String, Value> = r
        .corners
        .iter()
        .map(|c| (c.corner.name().to_string(), json!(c.energies)))
        .collect();
    Value::Object(m)
}

pub fn fragments_json(cfg: &RunConfig, r: &FragmentReport) -> Value {
    let p = &cfg.params;
    let mut m = header(cfg, "fragments", None);
    m.insert("predicted_energies".into(), corner_energies_json(r));
    let corners: Vec<Value> = r
        .corners
        .iter()
        .map(|c| {
            let fragments: Vec<Value> = c
                .fragments
                .iter()
                .map(|&k| {
                    let frag = &r.fragments[k];
                    let sites: Vec<Value> = frag
                        .site_ids(p)
                        .iter()
                        .map(|s| {
                            let (x, y) = s.position();
                            json!([x, y])
                        })
                        .collect();
                    json!({"id": k, "sites": sites, "eigenvalues": frag.eigenvalues})
                })
                .collect();
            json!({"corner": c.corner.name(), "energies": c.energies, "fragments": fragments})
        })
        .collect();
    m.insert("corners".into(), Value::Array(corners));
    m.insert("fragment_count".into(), json!(r.fragments.len()));
    Value::Object(m)
}

/// Pretty JSON with every float in `{:.16e}` form.
struct SciFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(Default::default()));
    v.serialize(&mut ser).expect("in-memory JSON");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// All files of a spectral bundle.
pub fn spectral_artifacts(cfg: &RunConfig, command: &str, bundle: &Bundle) -> Vec<Artifact> {
    let s = bundle.spectral_summary().expect("spectral bundle");
    let mut out = vec![Artifact::new("spectrum.csv", spectrum_csv(&bundle.metrics))];
    if let Some(l) = &bundle.ldos {
        out.push(Artifact::new("ldos.csv", ldos_csv(l, &cfg.params)));
    }
    if let Some(d) = &bundle.dos {
        out.push(Artifact::new("dos.csv", dos_csv(bundle.config.grid.values(), d)));
    }
    for p in &bundle.profiles {
        out.push(Artifact::new(
            Path::new("profiles").join(format!("{}.csv", p.name)),
            profile_csv(&p.profile),
        ));
    }
    if let Some(r) = &bundle.fragments {
        out.push(Artifact::new("fragments.json", to_json_string(&fragments_json(cfg, r))));
    }
    out.push(Artifact::new(
        "summary.json",
        to_json_string(&spectral_summary_json(cfg, command, bundle, s)),
    ));
    out.push(Artifact::new("config.toml", cfg.to_toml()));
    out
}

pub fn sweep_artifacts(cfg: &RunConfig, command: &str, figure: Option<&str>, rows: &[SweepRow], s: &SweepSummary) -> Vec<Artifact> {
    vec![
        Artifact::new("sweep.csv", sweep_csv(rows)),
        Artifact::new("overlay.csv", overlay_csv(rows)),
        Artifact::new("summary.json", to_json_string(&sweep_summary_json(cfg, command, figure, s))),
        Artifact::new("config.toml", cfg.to_toml()),
    ]
}

pub fn ensemble_artifacts(cfg: &RunConfig, result: &EnsembleResult) -> Vec<Artifact> {
    vec![
        Artifact::new("spectrum.csv", spectrum_csv(&result.reference.metrics)),
        Artifact::new("ensemble.csv", ensemble_csv(result)),
        Artifact::new("ensemble_states.csv", ensemble_states_csv(result)),
        Artifact::new("summary.json", to_json_string(&ensemble_summary_json(cfg, result))),
        Artifact::new("config.toml", cfg.to_toml()),
    ]
}

pub fn fragment_artifacts(cfg: &RunConfig, r: &FragmentReport) -> Vec<Artifact> {
    vec![
        Artifact::new("fragments.json", to_json_string(&fragments_json(cfg, r))),
        Artifact::new("config.toml", cfg.to_toml()),
    ]
}

/// Writes every artifact under `dir`, creating directories as needed.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        let path = dir.join(&a.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, &a.contents)?;
    }
    Ok(())
}
