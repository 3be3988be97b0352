use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use xychain::state::rho3_for;
use xychain::{ModelParams, QuadratureConfig, TripleGeometry};
use xychain_cli::{emit, run, OutputFormat, Table};

static COUNTER: AtomicUsize = AtomicUsize::new(0);

fn scratch(ext: &str) -> PathBuf {
    let n = COUNTER.fetch_add(1, Ordering::SeqCst);
    std::env::temp_dir().join(format!("xychain-cli-{}-{n}.{ext}", std::process::id()))
}

/// Runs the CLI writing to a scratch file and returns (exit code, output).
fn invoke(args: &str) -> (i32, String) {
    let out = scratch("out");
    let mut argv = vec!["xychain".to_string()];
    argv.extend(args.split_whitespace().map(String::from));
    argv.push("--out".into());
    argv.push(out.to_string_lossy().into_owned());
    let code = run(argv);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let _ = std::fs::remove_file(&out);
    (code, text)
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn g_at_zero_field_ising() {
    let (code, text) = invoke("g --h 0 --gamma 1 --T 0 --k -3:3");
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["k", "g"]);
    assert_eq!(rows.len(), 7);
    for row in rows {
        if row[0] == "-1" {
            assert_eq!(row[1], "1.000000000000");
        } else {
            assert!(row[1].parse::<f64>().unwrap().abs() < 1e-10, "{row:?}");
        }
    }
}

#[test]
fn analyze_nearest_neighbour_concurrence() {
    let (code, text) = invoke("analyze --gamma 1 --h 0.5 --T 0 --alpha 1 --beta 1");
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    for name in ["conc_ij", "conc_jk"] {
        assert!(rows[0][column(&header, name)].parse::<f64>().unwrap() > 0.01);
    }
    assert_eq!(rows[0][column(&header, "class_label")], "pairwise_entangled");
}

#[test]
fn scan_thermal_rows_are_ordered() {
    let (code, text) = invoke("scan-thermal --gamma 1 --grid 0:1.5:20");
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 20);
    let cols: Vec<usize> = ["t_c2", "t_c1", "t_n_ext", "t_n_centr"].iter().map(|n| column(&header, n)).collect();
    let mut complete = 0;
    for row in &rows {
        let t: Vec<Option<f64>> = cols.iter().map(|&c| row[c].parse().ok()).collect();
        if t.iter().all(Option::is_some) {
            complete += 1;
            let t: Vec<f64> = t.into_iter().flatten().collect();
            assert!(t.windows(2).all(|w| w[0] <= w[1]), "{row:?}");
        }
        assert_eq!(row[column(&header, "ordering_holds")], "true");
    }
    assert!(complete >= 19);
}

#[test]
fn rho_round_trip() {
    let (code, text) = invoke("rho --h 0.85 --gamma 0.5 --T 0.05 --alpha 2 --beta 3");
    assert_eq!(code, 0);
    let rho = rho3_for(
        &TripleGeometry::new(2, 3).unwrap(),
        &ModelParams::new(0.85, 0.5, 0.05).unwrap(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    let (_, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 64);
    for row in rows {
        let (r, c): (usize, usize) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let printed: f64 = row[2].parse().unwrap();
        let exact = rho.matrix()[(r, c)];
        // 12 decimals in fixed notation, 12 significant digits otherwise
        let tol = (5e-13f64).max(exact.abs() * 5e-12);
        assert!((printed - exact).abs() <= tol, "({r},{c}) {printed} {exact}");
    }
}

#[test]
fn json_mirrors_csv_fields() {
    for cmd in [
        "g --k 0:2",
        "correlators --alpha 2",
        "analyze",
        "range --dmax 4",
        "scan-field --grid 0.8:0.9:3 --gamma 0.5",
        "oracle-compare --N 6",
    ] {
        let (code, csv) = invoke(&format!("{cmd} --format csv"));
        assert_eq!(code, 0, "{cmd}");
        let (code, json) = invoke(&format!("{cmd} --format json"));
        assert_eq!(code, 0, "{cmd}");
        let (header, rows) = csv_rows(&csv);
        let records: serde_json::Value = serde_json::from_str(&json).unwrap();
        let records = records.as_array().unwrap();
        assert_eq!(records.len(), rows.len(), "{cmd}");
        for (rec, row) in records.iter().zip(&rows) {
            let keys: Vec<&String> = rec.as_object().unwrap().keys().collect();
            assert_eq!(keys, header.iter().collect::<Vec<_>>(), "{cmd}");
            for (k, cell) in header.iter().zip(row) {
                if let Some(x) = rec[k].as_f64() {
                    let y: f64 = cell.parse().unwrap();
                    assert!((x - y).abs() <= 1e-11 * x.abs().max(1e-1), "{cmd} {k}: {x} {cell}");
                }
            }
        }
    }
}

#[test]
fn scan_output_is_deterministic_and_order_free() {
    let args = "scan-field --gamma 0.5 --config b:3 --grid 0.75:1:5";
    let (code, first) = invoke(args);
    assert_eq!(code, 0);
    assert_eq!(invoke(args).1, first);

    // the same grid evaluated point by point in reverse order
    let mut lines: Vec<String> = ["1", "0.9375", "0.875", "0.8125", "0.75"]
        .iter()
        .map(|h| {
            let (code, text) = invoke(&format!("scan-field --gamma 0.5 --config b:3 --grid {h}:{h}:1"));
            assert_eq!(code, 0);
            text.lines().nth(1).unwrap().to_string()
        })
        .collect();
    lines.reverse();
    let header = first.lines().next().unwrap();
    assert_eq!(first, format!("{header}\n{}\n", lines.join("\n")));
}

#[test]
fn empty_and_single_row_tables() {
    let mut t = Table::new(vec!["h", "t", "alpha"]);
    let mut buf = Vec::new();
    emit(&t, OutputFormat::CsvHeadered, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "h,t,alpha\n");
    t.push(vec![0.5.into(), 0.0.into(), 1usize.into()]);
    let mut buf = Vec::new();
    emit(&t, OutputFormat::CsvHeadered, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(invoke("analyze --bogus 1").0, 1);
    assert_eq!(invoke("frobnicate").0, 1);
    assert_eq!(invoke("analyze --h -0.5").0, 1);
    assert_eq!(invoke("analyze --gamma 1.5").0, 1);
    assert_eq!(invoke("scan-field --grid 1:0:4").0, 1);
    assert_eq!(invoke("scan-field --grid 0:1").0, 1);
    assert_eq!(invoke("oracle-compare --N 15").0, 1);
    assert_eq!(invoke("oracle-compare --sites 3,2,5").0, 1);
    // the scouting window ends before the pair concurrence dies
    assert_eq!(invoke("scan-thermal --gamma 1 --grid 1.1:1.1:1 --T 0.01").0, 2);

    let mut argv = vec!["xychain", "analyze", "--out"];
    argv.push("/nonexistent-dir/out.csv");
    assert_eq!(run(argv), 2);
}

#[test]
fn binary_reports_usage_on_unknown_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_xychain"))
        .args(["range", "--nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage:"), "{err}");

    let out = Command::new(env!("CARGO_BIN_EXE_xychain"))
        .args(["g", "--h", "0", "--k", "-1:-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "k,g\n-1,1.000000000000\n");
}
