use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use k3lines::orbits::{compute_ledger, decompose_orbits, LedgerOptions};
use k3lines::search::{Budget, Engine};
use k3lines::symmetry::Symmetry;
use k3lines::toy::{toy_config, toy_universe, ToyOptions};

fn k3lines(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3lines")).args(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("k3lines-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn toy_file(seed: u64) -> PathBuf {
    let p = tmp(&format!("toy{seed}.json"));
    fs::write(&p, toy_config(seed, ToyOptions::default()).unwrap().to_json().to_string()).unwrap();
    p
}

#[test]
fn golay_and_verify() {
    let o = k3lines(&["golay"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!((v["octads"].as_u64(), v["dodecads"].as_u64(), v["words"].as_u64()), (Some(759), Some(2576), Some(4096)));
    assert_eq!(k3lines(&["verify", "golay"]).status.code(), Some(0));
    let o = k3lines(&["verify", "Lmax3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["size"], 144);
    assert_eq!(v["t_classes"], serde_json::json!([[12, 6, 12]]));
    assert_eq!(v["ambiguous_flags"], serde_json::json!([true]));
    let o = k3lines(&["verify", "Lsub4"]);
    assert_eq!(json(&o)["real_structures"], 1);
    assert_eq!(k3lines(&["verify", "Lnone"]).status.code(), Some(1));
}

#[test]
fn niemeier_check() {
    let o = k3lines(&["niemeier-check", "--lattice", "12A2"]);
    assert!(o.status.success());
    assert_eq!(json(&o)[0]["roots"], 72);
}

#[test]
fn ledger_outputs() {
    let o = k3lines(&["ledger", "--config", "3"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(&o.stdout[..]);
    let (mut lines, mut bnd) = (0u64, 0u64);
    for rec in r.records() {
        let rec = rec.unwrap();
        let m: u64 = rec[1].parse().unwrap();
        lines += m * rec[5].parse::<u64>().unwrap();
        bnd += m * rec[7].parse::<u64>().unwrap();
    }
    assert_eq!((lines, bnd), (440, 220));
    let o = k3lines(&["ledger", "--config", "1", "--format", "json", "--goal", "200"]);
    let v = json(&o);
    assert_eq!(v["stab_order"], 5760);
    assert_eq!(v["dismissible"], true);
}

#[test]
fn search_above_the_bound_is_empty() {
    let out = tmp("empty.jsonl");
    let o = k3lines(&["search", "--config", "1", "--goal", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&out).unwrap().is_empty());
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp("empty.jsonl.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["complete"], true);
    assert_eq!(meta["classes"], 0);
}

#[test]
fn budget_exhaustion_exits_3() {
    let out = tmp("budget.jsonl");
    let o = k3lines(&["search", "--config", "3", "--budget-nodes", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp("budget.jsonl.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["complete"], false);
}

#[test]
fn toy_search_matches_library_and_is_deterministic() {
    let seed = 11;
    let cfg = toy_file(seed);
    let run = |out: &str| {
        let p = tmp(out);
        let o = k3lines(&["search", "--config-file", cfg.to_str().unwrap(), "--goal", "1", "--clusters", "all", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(p).unwrap()
    };
    let a = run("toy-a.jsonl");
    assert_eq!(a, run("toy-b.jsonl"));

    let u = toy_universe(seed, ToyOptions::default()).unwrap();
    let sym = Symmetry::build(u.clone()).unwrap();
    let d = decompose_orbits(&sym);
    let ledger = compute_ledger(&d, LedgerOptions::default()).unwrap();
    let all: Vec<usize> = (0..d.comb.len()).collect();
    let r = Engine::new(&d, ledger.comb_bnd.clone()).search(&all, ledger.bnd_total as i64, Budget::default()).unwrap();
    assert_eq!(a.lines().count(), r.sets.len());
    let first: serde_json::Value = serde_json::from_str(a.lines().next().unwrap()).unwrap();
    assert_eq!(first["size"], r.sets.iter().map(|f| f.size).max().unwrap());

    // the same job from a job file
    let job = tmp("job.json");
    let spec = serde_json::json!({
        "command": "search",
        "config": toy_config(seed, ToyOptions::default()).unwrap().to_json(),
        "clusters": "all",
        "goal": 1,
        "out": tmp("toy-c.jsonl"),
    });
    fs::write(&job, spec.to_string()).unwrap();
    assert_eq!(k3lines(&["search", "--job", job.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(tmp("toy-c.jsonl")).unwrap(), a);
}

#[test]
fn classify_a_line_set_file() {
    let v = json(&k3lines(&["verify", "Lsub7"]));
    assert_eq!(v["t_classes"], serde_json::json!([[4, 0, 32]]));
    let set = k3lines::registry::named_set("Lsub7").unwrap();
    let p = tmp("lsub7.json");
    fs::write(&p, serde_json::to_string(&set.to_json()).unwrap()).unwrap();
    let o = k3lines(&["classify", "--input", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["size"], 132);
    assert_eq!(r["t_classes"], v["t_classes"]);
}
