use std::path::Path;
use std::process::{Command, Output};

fn swcrdsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swcrdsa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analytic_prints_equal_probabilities() {
    let o = swcrdsa(&["analytic", "3", "200", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("P_UinS FR = 0.015000000000000"), "{text}");
    assert!(text.contains("P_UinS SW = 0.015000000000000"), "{text}");
    assert!(text.trim_end().ends_with("equal: true"));
}

#[test]
fn analytic_rejects_bad_triple() {
    let o = swcrdsa(&["analytic", "5", "100", "4"]);
    assert!(!o.status.success());
}

#[test]
fn sweep_is_reproducible_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.cfg",
        "mode = FR,SW\nwindow = 40\nn_rx = 120\ndist = crdsa2,irsa4\n\
         lambda = 0.2:0.6:0.2\ntotal_slots = 5000\nseed = 7\nseeds = 2\n",
    );
    let a = swcrdsa(&["sweep", &cfg, "--no-timestamp"]);
    let b = swcrdsa(&["sweep", &cfg, "--no-timestamp"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("lambda,mode,dist,"));
    // 2 modes x 2 distributions x 3 rates
    assert_eq!(lines.len(), 1 + 12);
    assert!(lines[1].starts_with("0.2,FR,crdsa2,40,40,2,"));
    assert!(lines[12].starts_with("0.6,SW,irsa4,40,120,2,"));

    let stamped = swcrdsa(&["sweep", &cfg]);
    assert!(stdout(&stamped).starts_with("# generated_unix="));
}

#[test]
fn sweep_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("summary.csv");
    let json = dir.path().join("summary.json");
    let hist = dir.path().join("hist");
    let cfg = write(
        dir.path(),
        "sweep.cfg",
        &format!(
            "mode = SW\nwindow = 30\nn_rx = 90\ndist = irsa8\nlambda = 0.5\n\
             total_slots = 3000\nseed = 1,2\noutput = {}\njson = {}\nhistograms = {}\n",
            out.display(),
            json.display(),
            hist.display()
        ),
    );
    let o = swcrdsa(&["sweep", &cfg, "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
    assert_eq!(std::fs::read_dir(&hist).unwrap().count(), 2);
}

#[test]
fn run_then_oracle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("events.csv");
    let placements = dir.path().join("placements.csv");
    let hist = dir.path().join("hist.csv");
    let cfg = write(
        dir.path(),
        "run.cfg",
        &format!(
            "mode = SW\nwindow = 50\nn_rx = 10000\ndist = crdsa2\nlambda = 0.55\n\
             total_slots = 4000\nwarmup = 0\nseed = 3\ntrace = {}\nplacements = {}\nhistograms = {}\n",
            trace.display(),
            placements.display(),
            hist.display()
        ),
    );
    let o = swcrdsa(&["run", &cfg, "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout(&o);
    assert_eq!(summary.lines().count(), 2);
    assert!(std::fs::read_to_string(&hist).unwrap().starts_with("delay_ms,count,pdf,cdf"));

    // memory longer than the whole run: the decoder must match the oracle
    let o = swcrdsa(&[
        "oracle",
        placements.to_str().unwrap(),
        "--events",
        trace.to_str().unwrap(),
    ]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("residual is a stopping set: true"));
    assert!(text.contains("agree: true"), "{text}");

    let o = swcrdsa(&["oracle", placements.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("agree: true"));
}

#[test]
fn oracle_flags_decoder_claims_the_oracle_rejects() {
    let dir = tempfile::tempdir().unwrap();
    // two packets sharing both slots: a stopping set
    let placements = write(
        dir.path(),
        "p.csv",
        "packet_id,arrival_slot,replica_slots\n0,0,0;1\n1,0,0;1\n",
    );
    let events = write(
        dir.path(),
        "e.csv",
        "slot_index,packet_id,event,cause\n1,0,decoded,clean\n",
    );
    let o = swcrdsa(&["oracle", &placements, "--events", &events]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("+ 0 decoded by decoder only"));
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "mode = SW\nwindow = 10\nbogus = 3\n");
    let o = swcrdsa(&["sweep", &cfg]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}
