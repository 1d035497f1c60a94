use std::process::{Command, Output};

fn pairwise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairwise")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = pairwise(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(text: &str) -> Vec<csv::StringRecord> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

fn theory_value(text: &str, quantity: &str) -> f64 {
    rows(text).iter().find(|r| &r[0] == quantity).unwrap()[2].parse().unwrap()
}

#[test]
fn sweep_schema_and_row_count() {
    let text = stdout(&["sweep", "--n", "1000", "--k", "1..20", "--gamma", "0.2,0.4,0.6,0.8", "--trials", "20"]);
    assert_eq!(text.lines().next().unwrap(), "kind,gamma,K,n,trials,successes,p_hat,ci_low,ci_high");
    let rows = rows(&text);
    assert_eq!(rows.len(), 160);
    assert_eq!(rows.iter().filter(|r| &r[0] == "connected").count(), 80);
    assert_eq!(rows.iter().filter(|r| &r[0] == "no_isolated").count(), 80);
}

#[test]
fn sweep_is_deterministic_per_seed() {
    let args = ["sweep", "--n", "300", "--k", "3..6", "--gamma", "0.5,1", "--trials", "30", "--seed", "7"];
    assert_eq!(stdout(&args), stdout(&args));
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "2"]);
    assert_eq!(stdout(&args), stdout(&with_workers));
    let other = stdout(&["sweep", "--n", "300", "--k", "3..6", "--gamma", "0.5,1", "--trials", "30", "--seed", "8"]);
    assert_ne!(stdout(&args), other);
}

#[test]
fn full_deployment_connects_at_k2() {
    let text = stdout(&["sweep", "--n", "1000", "--k", "2", "--gamma", "1", "--trials", "100"]);
    let conn = rows(&text).into_iter().find(|r| &r[0] == "connected").unwrap();
    assert!(conn[6].parse::<f64>().unwrap() >= 0.99);
}

#[test]
fn sweep_json_mirrors_csv() {
    let text = stdout(&["sweep", "--n", "200", "--k", "2..3", "--gamma", "1", "--trials", "10", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert_eq!(doc["rows"][0]["kind"], "connected");
    assert_eq!(doc["rows"][0]["K"], 2);
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    let out = pairwise(&["phased", "--n", "100", "--k", "5", "--schedule", "0.5,0.25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));

    let out = pairwise(&["sweep", "--n", "10", "--k", "20", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pairwise(&["theory", "--r-gamma", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_runtime_code() {
    let out = pairwise(&["pairing", "--n", "5", "--k", "1", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn phased_joint_never_exceeds_phases() {
    let text = stdout(&["phased", "--n", "500", "--k", "8", "--schedule", "0.25,0.5,1.0", "--trials", "100"]);
    assert_eq!(text.lines().next().unwrap(), "n,K,schedule,trials,successes,p_hat,ci_low,ci_high");
    let rows = rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][2], "0.25,0.5,1");
    let joint: u64 = rows[0][4].parse().unwrap();
    for r in &rows[1..] {
        assert!(joint <= r[4].parse::<u64>().unwrap());
    }
}

#[test]
fn census_counts_every_ring() {
    let (n, k, trials) = (1000usize, 21usize, 50usize);
    let text = stdout(&["census", "--n", &n.to_string(), "--k", &k.to_string(), "--trials", &trials.to_string()]);
    assert_eq!(text.lines().next().unwrap(), "size,count,is_max_histogram");
    let rows = rows(&text);
    let (mut rings, mut maxima, mut size_sum) = (0u64, 0u64, 0u64);
    for r in &rows {
        let (size, count): (u64, u64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        if &r[2] == "true" {
            maxima += count;
        } else {
            rings += count;
            size_sum += size * count;
        }
    }
    assert_eq!(rings, (n * trials) as u64);
    assert_eq!(maxima, trials as u64);
    let mean = size_sum as f64 / rings as f64;
    assert!((mean - 2.0 * k as f64).abs() < 0.01 * 2.0 * k as f64);

    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("# summary,"));
    let frac: f64 = summary
        .split(',')
        .find_map(|f| f.strip_prefix("frac_over_3k="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(frac < 0.02, "{frac}");
}

#[test]
fn theory_reference_values() {
    let r = theory_value(&stdout(&["theory", "--r-gamma", "0.5"]), "r_gamma");
    assert!((r - 0.419060).abs() < 1e-6);
    let l = theory_value(&stdout(&["theory", "--lambda-star"]), "lambda_star");
    assert!((l - 2.588699450).abs() < 1e-9);
    let c = theory_value(&stdout(&["theory", "--c-of-lambda", "5"]), "c_of_lambda");
    assert!((c - 3.4805).abs() < 1e-4);
    let h = theory_value(&stdout(&["theory", "--tail", "3:2.9"]), "h");
    assert!(h > 0.0);
}

#[test]
fn theory_defaults_and_finite_n() {
    let text = stdout(&["theory"]);
    let rows = rows(&text);
    assert_eq!(rows.iter().filter(|r| &r[0] == "r_gamma").count(), 9);
    assert!(rows.iter().any(|r| &r[0] == "lambda_star"));

    let text = stdout(&["theory", "--n", "1000", "--k", "10", "--gamma", "0.5"]);
    let p = theory_value(&text, "isolation_prob");
    let e = theory_value(&text, "expected_isolated");
    assert!((e - 500.0 * p).abs() < 1e-12);
    assert!(theory_value(&text, "connectivity_union_bound") >= e);
}

#[test]
fn pairing_dump_shape() {
    let text = stdout(&["pairing", "--n", "6", "--k", "2", "--seed", "3"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["n"], 6);
    assert_eq!(doc["k"], 2);
    assert_eq!(doc["seed"], 3);
    let gamma = doc["gamma"].as_array().unwrap();
    assert_eq!(gamma.len(), 6);
    for (i, row) in gamma.iter().enumerate() {
        let row: Vec<u64> = row.as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert_eq!(row.len(), 2);
        assert!(row.windows(2).all(|w| w[0] < w[1]));
        assert!(row.iter().all(|&j| (1..=6).contains(&j) && j != i as u64 + 1));
    }
}

#[test]
fn edge_list_format() {
    let text = stdout(&["edges", "--n", "50", "--k", "3", "--gamma", "0.5", "--seed", "11"]);
    let mut prev = (0u64, 0u64);
    for line in text.lines() {
        let (i, j) = line.split_once(' ').unwrap();
        let e: (u64, u64) = (i.parse().unwrap(), j.parse().unwrap());
        assert!(e.0 < e.1 && e.1 <= 25);
        assert!(e > prev);
        prev = e;
    }
    // Each retained node chose three partners, so the edge count is bounded.
    let count = text.lines().count();
    assert!(count > 0 && count <= 25 * 3);
}
