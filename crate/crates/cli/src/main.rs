use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use k3lines::classify::{classify, expected_classification};
use k3lines::config::{ConfigJson, PolarizedConfig};
use k3lines::error::Error;
use k3lines::golay::GolayCode;
use k3lines::lines::{LineSet, LineSetJson, LineUniverse};
use k3lines::niemeier::{self, NIEMEIER_KEYS};
use k3lines::orbits::{compute_ledger, decompose_orbits, BoundLedger, LedgerOptions, OrbitDecomposition};
use k3lines::registry::{self, NAMED_SETS};
use k3lines::search::{golay_clusters, Budget, Engine, FoundSet};
use k3lines::symmetry::Symmetry;

const EXIT_MISMATCH: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

#[derive(Parser)]
#[command(name = "k3lines", version, about = "Lines on 2-polarized K3 surfaces via Niemeier lattices")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orbit decomposition and bounds of a configuration.
    Ledger(LedgerArgs),
    /// Geometric line sets of at least `--goal` lines.
    Search(SearchArgs),
    /// Check a registered set (or `golay`, or `all`) against reference values.
    Verify {
        target: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classification report of a registered set or a line set file.
    Classify(ClassifyArgs),
    /// Statistics of the extended Golay code.
    Golay {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate the Niemeier lattices (all of them unless `--lattice`).
    NiemeierCheck {
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Niemeier lattice key, e.g. `24A1` or `4A6`.
    #[arg(long)]
    lattice: Option<String>,
    /// Built-in configuration number (1, 2 or 3 in `24A1`).
    #[arg(long)]
    config: Option<u8>,
    /// Configuration as JSON.
    #[arg(long)]
    config_file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct LedgerArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 132)]
    goal: u64,
    /// Node budget of the brute-force orbit bounds.
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Clusters {
    /// The cluster cover of the main orbit (24A1 configurations 2 and 3).
    Golay,
    /// The main orbit as a single cluster.
    Main,
    /// All lines as a single cluster.
    All,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Job file; command-line flags take precedence.
    #[arg(long)]
    job: Option<PathBuf>,
    #[arg(long)]
    goal: Option<u64>,
    /// Cluster defect; defaults to `bnd(Orb) - goal`.
    #[arg(long)]
    defect: Option<i64>,
    #[arg(long, value_enum)]
    clusters: Option<Clusters>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<f64>,
    /// JSONL output; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Registered label.
    label: Option<String>,
    /// Line set JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JobConfig {
    Builtin(u8),
    Spec(ConfigJson),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct JobSpec {
    #[serde(default)]
    command: Option<String>,
    lattice: Option<String>,
    config: Option<JobConfig>,
    clusters: Option<Clusters>,
    defect: Option<i64>,
    goal: Option<u64>,
    budget_nodes: Option<u64>,
    budget_secs: Option<f64>,
    out: Option<PathBuf>,
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())?;
            Ok(o.flush()?)
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn load_config(c: &ConfigArgs) -> Result<PolarizedConfig> {
    if let Some(path) = &c.config_file {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: ConfigJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(l) = &c.lattice {
            if *l != spec.lattice {
                bail!("--lattice {l} does not match the configuration file ({})", spec.lattice);
            }
        }
        return Ok(PolarizedConfig::from_spec(&spec)?);
    }
    match (c.lattice.as_deref(), c.config) {
        (None | Some("24A1"), Some(n)) => Ok(PolarizedConfig::builtin_24a1(n)?),
        (Some(l), Some(_)) => bail!("built-in configurations exist for 24A1 only, not {l}"),
        _ => bail!("a configuration is required: --config N or --config-file FILE"),
    }
}

struct Prepared {
    universe: Arc<LineUniverse>,
    sym: Arc<Symmetry>,
    decomposition: OrbitDecomposition,
    ledger: BoundLedger,
}

fn prepare(config: PolarizedConfig, goal: Option<u64>, budget: Option<u64>) -> Result<Prepared> {
    let universe = LineUniverse::build(Arc::new(config))?;
    let sym = Symmetry::build(universe.clone())?;
    let decomposition = decompose_orbits(&sym);
    let mut opts = LedgerOptions { goal, ..LedgerOptions::default() };
    if let Some(b) = budget {
        opts.brute_force_budget = b;
    }
    let ledger = compute_ledger(&decomposition, opts)?;
    Ok(Prepared { universe, sym, decomposition, ledger })
}

fn cmd_ledger(a: LedgerArgs) -> Result<u8> {
    let p = prepare(load_config(&a.config)?, None, a.budget_nodes)?;
    let l = &p.ledger;
    let format = a.format.unwrap_or(match a.out.as_ref().and_then(|o| o.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    });
    let text = match format {
        Format::Json => {
            let mut v = serde_json::to_value(l)?;
            v["goal"] = json!(a.goal);
            v["dismissible"] = json!(l.dismissible(a.goal));
            pretty(&v)?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(BoundLedger::CSV_HEADER)?;
            for r in l.csv_records() {
                w.write_record(&r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    write_out(a.out.as_deref(), &text)?;
    eprintln!(
        "{}: {} lines, |stab| = {}{}, cnt = {}, naive = {}, bnd(Orb) = {}{}",
        l.config,
        l.lines,
        l.stab_order,
        if l.stab_complete { "" } else { " (lower bound)" },
        l.total_cnt,
        l.naive_total,
        l.bnd_total,
        if l.dismissible(a.goal) { format!(" < {}: dismissible", a.goal) } else { String::new() },
    );
    Ok(0)
}

/// Job parameters after merging the job file with the flags.
struct Job {
    config: PolarizedConfig,
    goal: u64,
    defect: Option<i64>,
    clusters: Option<Clusters>,
    budget: Budget,
    out: Option<PathBuf>,
}

fn resolve_job(a: SearchArgs) -> Result<Job> {
    let spec: JobSpec = match &a.job {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => JobSpec::default(),
    };
    if let Some(c) = &spec.command {
        if c != "search" {
            bail!("job file is for command {c:?}, not search");
        }
    }
    let has_flags = a.config.config.is_some() || a.config.config_file.is_some();
    let config = match (&spec.config, has_flags) {
        (Some(JobConfig::Spec(s)), false) => PolarizedConfig::from_spec(s)?,
        (Some(JobConfig::Builtin(n)), false) => {
            load_config(&ConfigArgs { lattice: spec.lattice.clone(), config: Some(*n), config_file: None })?
        }
        _ => load_config(&ConfigArgs { lattice: a.config.lattice.clone().or(spec.lattice.clone()), ..a.config.clone() })?,
    };
    Ok(Job {
        config,
        goal: a.goal.or(spec.goal).unwrap_or(132),
        defect: a.defect.or(spec.defect),
        clusters: a.clusters.or(spec.clusters),
        budget: Budget { nodes: a.budget_nodes.or(spec.budget_nodes), seconds: a.budget_secs.or(spec.budget_secs) },
        out: a.out.or(spec.out),
    })
}

fn with_duals(d: &OrbitDecomposition, orbits: &[usize]) -> Vec<usize> {
    let mut c: Vec<usize> = orbits.iter().flat_map(|&o| [o, d.comb[o].dual_partner]).collect();
    c.sort_unstable();
    c.dedup();
    c
}

#[derive(Serialize)]
struct ClassLine {
    size: usize,
    rank: usize,
    saturated: bool,
    maximal: Option<bool>,
    pattern: Vec<u32>,
    set: LineSetJson,
}

fn cmd_search(a: SearchArgs) -> Result<u8> {
    let start = Instant::now();
    let job = resolve_job(a)?;
    let p = prepare(job.config, Some(job.goal), None)?;
    let d = &p.decomposition;
    let ledger = &p.ledger;
    let mut notes: Vec<String> = Vec::new();
    let mut complete = true;
    let mut nodes = 0;
    let mut classes: BTreeMap<(std::cmp::Reverse<usize>, Vec<usize>), FoundSet> = BTreeMap::new();
    let key = |s: &[usize]| p.sym.canonical(s).unwrap_or_else(|_| p.sym.canonical_r(s));
    let clusters = job.clusters.unwrap_or(if p.universe.config.golay.as_ref().is_some_and(|g| g.number >= 2) {
        Clusters::Golay
    } else {
        Clusters::All
    });
    let defect = job.defect.unwrap_or(ledger.bnd_total as i64 - job.goal as i64);
    if ledger.dismissible(job.goal) {
        notes.push(format!("bnd(Orb) = {} < {}: no search needed", ledger.bnd_total, job.goal));
    } else {
        let engine = Engine::new(d, ledger.comb_bnd.clone());
        let all: Vec<usize> = (0..d.comb.len()).collect();
        let (union, result) = match clusters {
            Clusters::Golay => {
                let cl = golay_clusters(d)?;
                let union = with_duals(d, &cl.concat());
                (union, engine.cluster_search(&cl, defect, job.budget, Some(job.goal as usize))?)
            }
            Clusters::Main => {
                let union = with_duals(d, &d.orbits[0]);
                let r = engine.search(&union, defect, job.budget)?;
                (union, r)
            }
            Clusters::All => (all.clone(), engine.search(&all, defect, job.budget)?),
        };
        complete &= result.complete;
        nodes += result.nodes;
        notes.extend(result.notes);
        let mut found = result.sets;
        if union.len() < all.len() {
            let mut extended = Vec::new();
            for f in &found {
                if f.maximal == Some(true) {
                    continue;
                }
                let set = p.universe.set(f.lines.iter().copied());
                match engine.extend_by_maximal_orbit(&set, &union, job.goal, job.budget) {
                    Ok(v) => extended.extend(v),
                    Err(Error::Hypothesis(_)) => {
                        notes.push(format!("{} lines: general extension limited to one further line", f.size));
                        complete = false;
                        extended.extend(engine.extend_general(&set, 1)?);
                    }
                    Err(Error::Budget(m)) => {
                        notes.push(m);
                        complete = false;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            found.extend(extended);
        }
        for f in found.into_iter().filter(|f| f.size as u64 >= job.goal) {
            classes.entry((std::cmp::Reverse(f.size), key(&f.lines))).or_insert(f);
        }
    }
    let mut text = String::new();
    for f in classes.into_values() {
        let set = p.universe.set(f.lines.iter().copied());
        let line = ClassLine { size: f.size, rank: f.rank, saturated: f.saturated, maximal: f.maximal, pattern: f.pattern, set: set.to_json() };
        text += &serde_json::to_string(&line)?;
        text.push('\n');
    }
    let count = text.lines().count();
    write_out(job.out.as_deref(), &text)?;
    let meta = json!({
        "config": p.universe.config.label,
        "lines": p.universe.len(),
        "bnd_total": ledger.bnd_total,
        "goal": job.goal,
        "defect": defect,
        "clusters": clusters,
        "budget": job.budget,
        "complete": complete,
        "nodes": nodes,
        "classes": count,
        "notes": notes,
        "seconds": start.elapsed().as_secs_f64(),
    });
    match &job.out {
        Some(o) => {
            let mut side = o.as_os_str().to_owned();
            side.push(".meta.json");
            fs::write(&side, pretty(&meta)?)?;
        }
        None => eprintln!("{meta}"),
    }
    if !complete {
        eprintln!("search incomplete");
        return Ok(EXIT_INCOMPLETE);
    }
    Ok(0)
}

fn golay_report() -> serde_json::Value {
    let g = GolayCode::new();
    let dist: BTreeMap<String, usize> =
        g.weight_distribution().iter().enumerate().filter(|e| *e.1 > 0).map(|(w, &n)| (w.to_string(), n)).collect();
    json!({
        "words": g.words.len(),
        "octads": g.octads.len(),
        "dodecads": g.dodecads.len(),
        "weight_distribution": dist,
    })
}

fn verify_label(label: &str) -> Result<(serde_json::Value, Vec<String>)> {
    let set = registry::named_set(label)?;
    let report = classify(label, &set)?;
    let mut bad = Vec::new();
    if let Some(n) = registry::expected_size(label) {
        if report.size != n {
            bad.push(format!("size {} != {n}", report.size));
        }
    }
    if report.rank != 20 {
        bad.push(format!("rank {} != 20", report.rank));
    }
    if !set.is_geometric()? {
        bad.push("not geometric".into());
    }
    if let Some((t, aut)) = expected_classification(label) {
        if report.t_classes != t {
            bad.push(format!("T classes {:?} != {t:?}", report.t_classes));
        }
        if let Some(a) = aut {
            if report.aut_order != a {
                bad.push(format!("|Aut| {} != {a}", report.aut_order));
            }
        }
    }
    if report.aut_surjective == Some(false) {
        bad.push("Aut does not surject onto the isometries of discr NS".into());
    }
    let mut v = serde_json::to_value(&report)?;
    v["mismatches"] = json!(bad);
    Ok((v, bad))
}

fn cmd_verify(target: &str, out: Option<&Path>) -> Result<u8> {
    let (value, bad) = match target {
        "golay" => {
            let r = golay_report();
            let mut bad = Vec::new();
            for (k, n) in [("octads", 759), ("dodecads", 2576), ("words", 4096)] {
                if r[k] != json!(n) {
                    bad.push(format!("{k} {} != {n}", r[k]));
                }
            }
            let mut r = r;
            r["mismatches"] = json!(bad);
            (r, bad)
        }
        "all" => {
            let mut reports = Vec::new();
            let mut bad = Vec::new();
            for (label, _, _) in NAMED_SETS {
                let (v, b) = verify_label(label)?;
                bad.extend(b.into_iter().map(|m| format!("{label}: {m}")));
                reports.push(v);
            }
            (json!(reports), bad)
        }
        label => verify_label(label)?,
    };
    write_out(out, &pretty(&value)?)?;
    if bad.is_empty() {
        Ok(0)
    } else {
        for m in &bad {
            eprintln!("mismatch: {m}");
        }
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_classify(a: ClassifyArgs) -> Result<u8> {
    let (label, set): (String, LineSet) = match (&a.label, &a.input) {
        (Some(l), None) => (l.clone(), registry::named_set(l)?),
        (None, Some(path)) => {
            let j: LineSetJson = serde_json::from_str(&fs::read_to_string(path)?).with_context(|| format!("parsing {}", path.display()))?;
            let mut c = a.config.clone();
            if c.config.is_none() && c.config_file.is_none() {
                let n = j
                    .config_label
                    .strip_prefix("24A1-config")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| anyhow!("cannot infer the configuration of {}; pass --config or --config-file", path.display()))?;
                c.config = Some(n);
            }
            let u = LineUniverse::build(Arc::new(load_config(&c)?))?;
            (path.display().to_string(), LineSet::from_json(&u, &j)?)
        }
        _ => bail!("give either a registered label or --input"),
    };
    let report = classify(&label, &set)?;
    write_out(a.out.as_deref(), &pretty(&report)?)?;
    Ok(0)
}

fn cmd_niemeier(lattice: Option<&str>, out: Option<&Path>) -> Result<u8> {
    let keys: Vec<&str> = match lattice {
        Some(k) => vec![k],
        None => NIEMEIER_KEYS.to_vec(),
    };
    let checks = keys.iter().map(|k| niemeier::check(k)).collect::<k3lines::error::Result<Vec<_>>>()?;
    write_out(out, &pretty(&checks)?)?;
    let bad: Vec<&str> = checks.iter().filter(|c| !c.ok).map(|c| c.key.as_str()).collect();
    if bad.is_empty() {
        Ok(0)
    } else {
        eprintln!("failed: {}", bad.join(", "));
        Ok(EXIT_MISMATCH)
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Ledger(a) => cmd_ledger(a),
        Command::Search(a) => cmd_search(a),
        Command::Verify { target, out } => cmd_verify(&target, out.as_deref()),
        Command::Classify(a) => cmd_classify(a),
        Command::Golay { out } => {
            write_out(out.as_deref(), &pretty(&golay_report())?)?;
            Ok(0)
        }
        Command::NiemeierCheck { lattice, out } => cmd_niemeier(lattice.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
