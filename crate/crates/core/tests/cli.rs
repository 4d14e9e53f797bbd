use std::path::Path;
use std::process::{Command, Output};

use genuslab::campaign::{run_campaign, CampaignConfig, Z99};
use genuslab::sampler::nonseparating_two_cycles;
use genuslab::{codec, oracle};

fn genuslab(args: &[&str], workers: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_genuslab"));
    c.args(args);
    match workers {
        Some(w) => c.env("GENUSLAB_WORKERS", w),
        None => c.env_remove("GENUSLAB_WORKERS"),
    };
    c.output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = genuslab(args, Some("2"));
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn sample_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let maps = path(dir.path(), "maps.ndjson");
    let stats = path(dir.path(), "stats.csv");
    ok(&["sample", "--n", "12", "--g", "2", "--method", "exact", "--count", "7", "--seed", "4", "--out", &maps]);
    let parsed = codec::read_ndjson(std::io::BufReader::new(std::fs::File::open(&maps).unwrap())).unwrap();
    assert_eq!(parsed.len(), 7);
    assert!(parsed.iter().all(|m| m.face_count() == 12 && m.genus() == 2));

    ok(&["analyze", "--in", &maps, "--metrics", "pr,two-cycles,ct", "--search-cap", "6", "--out", &stats]);
    let csv = std::fs::read_to_string(&stats).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "map_index,n,g,pr,ball_planar_radius,systole,x_nonsep_2cycles,ct_lower,ct_upper,diameter,flags"
    );
    assert_eq!(lines.count(), 7);

    let again = path(dir.path(), "again.ndjson");
    ok(&["sample", "--n", "12", "--g", "2", "--count", "7", "--seed", "4", "--out", &again]);
    assert_eq!(std::fs::read(&maps).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn oracle_and_enumerate_agree() {
    let dir = tempfile::tempdir().unwrap();
    let list = path(dir.path(), "list.ndjson");
    ok(&["oracle", "--n", "3", "--g", "1", "--out", &list]);
    assert_eq!(std::fs::read_to_string(&list).unwrap().lines().count(), 20);

    let table = path(dir.path(), "table.json");
    ok(&["enumerate", "--n-max", "4", "--g-max", "2", "--out", &table]);
    let text = std::fs::read_to_string(&table).unwrap();
    for q in ["\"20\"", "\"21\"", "\"1\""] {
        assert!(text.contains(q), "{q} missing from {text}");
    }
}

#[test]
fn campaign_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "campaign.json");
    let csv = path(dir.path(), "rows.csv");
    let summary = path(dir.path(), "summary.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"theta":0.2,"pairs":[{{"n":10}},{{"n":15}}],"samples":5,"seed":9,
                "out_csv":{csv:?},"out_summary":{summary:?}}}"#
        ),
    )
    .unwrap();
    ok(&["campaign", "--config", &cfg]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 11);
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["pairs"][1]["g"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(genuslab(&["verify", "--level", "fast", "--only", "2"], None).status.code(), Some(0));
    let out = genuslab(&["verify", "--level", "fast", "--only", "1", "--variant", "printed"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert_eq!(genuslab(&["verify", "--only", "2"], Some("0")).status.code(), Some(2));
    assert_eq!(genuslab(&["campaign", "--config", "/nonexistent.json"], None).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bad.json");
    std::fs::write(&cfg, r#"{"theta":0.7,"pairs":[{"n":10}]}"#).unwrap();
    assert_eq!(genuslab(&["campaign", "--config", &cfg], None).status.code(), Some(2));
}

#[test]
fn mean_x_matches_oracle_ratio() {
    for (n, g) in [(2, 1), (3, 1), (4, 1), (4, 2)] {
        let list = oracle::quadrangulations(n).unwrap();
        let maps = list.genus(g);
        let exact = maps.iter().map(|m| nonseparating_two_cycles(m).len()).sum::<usize>() as f64
            / maps.len() as f64;
        let cfg = CampaignConfig::from_json(&format!(
            r#"{{"pairs":[{{"n":{n},"g":{g}}}],"samples":2000,"seed":1,"metrics":"two-cycles"}}"#
        ))
        .unwrap();
        let rec = run_campaign(&cfg, 2).unwrap();
        let x = rec.pairs[0].x.clone().unwrap();
        let se = ((x.mean_x2 - x.mean_x * x.mean_x).max(0.0) / x.samples as f64).sqrt();
        assert!(
            (x.mean_x - exact).abs() <= Z99 * se + 1e-12,
            "({n},{g}): estimate {} vs exact {exact}",
            x.mean_x
        );
    }
}
