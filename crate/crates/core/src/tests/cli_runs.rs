use crate::cli::{execute, fmt_sig, render, run, Cli, Format, Output};
use clap::Parser;

fn output(args: &[&str]) -> Output {
    let cli = Cli::try_parse_from(std::iter::once("lln").chain(args.iter().copied())).unwrap();
    execute(&cli).unwrap()
}

fn field(out: &Output, key: &str) -> f64 {
    let Output::Fields(fields) = out else { panic!("expected fields") };
    match &fields.iter().find(|(k, _)| k == key).unwrap().1 {
        crate::cli::Value::Num(x) => *x,
        crate::cli::Value::Int(i) => *i as f64,
        other => panic!("{other:?}"),
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(["lln", "prob", "-n", "10", "-p", "0.3", "--pmf", "3", "--out", "/dev/null"]), 0);
    assert_eq!(run(["lln", "prob", "-n", "10", "-p", "1.3", "--pmf", "3"]), 2);
    assert_eq!(run(["lln", "prob", "-n", "10", "-p", "0.3"]), 2);
    assert_eq!(run(["lln", "no-such-command"]), 2);
    assert_eq!(run(["lln", "approx", "uspensky", "-n", "99", "-p", "1/2", "--t1", "-1", "--t2", "1"]), 3);
    assert_eq!(run(["lln", "bayes", "bernstein", "-n", "10", "--n0", "10", "-w", "0.1"]), 3);
    let scan = ["lln", "bayes", "consistency", "--ratio-s", "1", "--ratio-f", "1", "-w", "0.01", "--delta", "0.01", "--max-k", "2"];
    assert_eq!(run(scan), 3);
}

#[test]
fn prob_flagship_values() {
    let out = output(&["prob", "-n", "14000", "-p", "18/35", "--lo", "7037", "--hi", "7363", "--oracle"]);
    assert!((field(&out, "probability") - 0.9943058).abs() < 5e-7);
    assert!((field(&out, "probability") - field(&out, "oracle")).abs() < 1e-13);
    let dev = output(&["prob", "-n", "6520", "-p", "0.6", "-e", "1/50"]);
    assert!((field(&dev, "probability") - 0.9990309).abs() < 1e-6);
}

#[test]
fn invert_and_bounds() {
    let out = output(&["invert", "-p", "0.6", "-e", "0.02", "--odds", "1000", "--clt", "--worst-case", "--chebyshev"]);
    assert_eq!(field(&out, "clt.n_min"), 6498.0);
    assert_eq!(field(&out, "chebyshev.n_min"), 12243.0);
    let b = output(&["bound", "bernoulli", "--r", "30", "--s", "20", "--odds", "1000"]);
    assert_eq!(field(&b, "n"), 25502.0);
}

#[test]
fn simulate_is_seeded() {
    let args = ["simulate", "--scheme", "persistence", "--probs", "0.3,0.5,0.7", "--block-len", "50", "--size", "2000", "--replicates", "50", "-e", "0.05"];
    assert_eq!(output(&args), output(&args));
    let json = r#"{"scheme":"iid_bernoulli","p":0.25}"#;
    let out = output(&["simulate", "--spec", json, "--size", "4000", "--replicates", "20", "--seed", "7"]);
    assert!((field(&out, "mean") - 0.25).abs() < 0.02);
}

#[test]
fn report_formats() {
    let rows = match output(&["reproduce"]) {
        Output::Rows(rows) => rows,
        _ => panic!(),
    };
    let ids: Vec<&str> = rows.iter().map(|r| r.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let out = Output::Rows(rows.clone());
    let csv = render(&out, Format::Csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "id,method,computed,reference,tolerance,status");
    assert_eq!(csv.lines().count(), rows.len() + 1);

    let json: serde_json::Value = serde_json::from_str(&render(&out, Format::Json).unwrap()).unwrap();
    let first = json.as_array().unwrap()[0].as_object().unwrap();
    let mut keys: Vec<&str> = first.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["computed", "id", "method", "reference", "status", "tolerance"]);

    assert_eq!(render(&out, Format::Table).unwrap(), render(&output(&["reproduce"]), Format::Table).unwrap());
}

#[test]
fn significant_digits() {
    assert_eq!(fmt_sig(6491.0), "6491");
    assert_eq!(fmt_sig(0.99903092578), "0.9990309258");
    assert_eq!(fmt_sig(12242.394731), "12242.39473");
    assert_eq!(fmt_sig(1e-6), "1e-6");
    assert_eq!(fmt_sig(0.5), "0.5");
    assert_eq!(fmt_sig(-0.25), "-0.25");
}
