use std::path::PathBuf;
use std::process::{Command, Output};

use annostream::oracle::{oracle_is_acyclic, DenseGraph};
use annostream::stream::parse_stream;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_annostream"));
    c.env_remove("ANNOSTREAM_MODULUS");
    c
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn read_golden(name: &str) -> String {
    std::fs::read_to_string(golden(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("annostream-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_clique_matches_golden() {
    let o = run(&["gen", "clique", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), read_golden("k5.stream"));
}

#[test]
fn gen_is_reproducible() {
    let a = run(&["gen", "gnp", "30", "--seed", "4"]);
    let b = run(&["gen", "gnp", "30", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "gnp", "30", "--seed", "5"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_dag_is_acyclic() {
    for seed in ["0", "1", "2"] {
        let o = run(&["gen", "dag", "16", "--seed", seed, "--p", "0.5"]);
        let g = parse_stream(&stdout(&o)).unwrap();
        assert!(oracle_is_acyclic(&DenseGraph::from_instance(&g)));
    }
}

#[test]
fn gen_unknown_kind_is_a_config_error() {
    assert_eq!(run(&["gen", "petersen", "10"]).status.code(), Some(2));
}

#[test]
fn run_k5_matches_golden() {
    let input = golden("k5.stream");
    let o = run(&["run", "--scheme", "tri-laconic", "--t", "4", "--input", input.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), read_golden("run_k5.txt"));
}

#[test]
fn run_malformed_input_exits_2() {
    let bad = tmp("bad.stream");
    std::fs::write(&bad, "not a stream\n").unwrap();
    let o = run(&["run", "--scheme", "tri-laconic", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_bad_shape_exits_2() {
    let input = golden("k5.stream");
    let o = run(&["run", "--scheme", "tri-laconic", "--t", "1", "--s", "2", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mutated_transcript_replay_exits_1() {
    let input = golden("k5.stream");
    let input = input.to_str().unwrap();
    let tr = tmp("mutated.tr");
    let o = run(&["run", "--scheme", "tri-laconic", "--input", input, "--mutate", "coeff-flip", "--output", tr.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["run", "--scheme", "tri-laconic", "--input", input, "--transcript", tr.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("reject="));
}

#[test]
fn honest_transcript_replay_accepts() {
    let input = golden("k5.stream");
    let input = input.to_str().unwrap();
    let tr = tmp("honest.tr");
    assert_eq!(run(&["run", "--scheme", "tri-frugal", "--input", input, "--output", tr.to_str().unwrap()]).status.code(), Some(0));
    let o = run(&["run", "--scheme", "tri-frugal", "--input", input, "--transcript", tr.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("output=10"));
}

#[test]
fn attack_matches_golden() {
    let input = golden("k5.stream");
    let o = run(&["attack", "--scheme", "tri-laconic", "--input", input.to_str().unwrap(), "--trials", "50", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), read_golden("attack_k5.csv"));
}

#[test]
fn attack_edgecount_coeff_flip() {
    let o = run(&["attack", "--scheme", "edgecount-induced", "--n", "16", "--trials", "500", "--policy", "coeff-flip"]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "500");
    let wrong: usize = row[4].parse().unwrap();
    assert!(wrong <= 5, "{text}");
}

#[test]
fn attack_zero_trials_exits_2() {
    assert_eq!(run(&["attack", "--scheme", "mis", "--n", "8", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn sweep_matches_golden() {
    let input = golden("k5.stream");
    let o = run(&["sweep", "--scheme", "tri-laconic", "--input", input.to_str().unwrap(), "--ts", "1,2,5"]);
    assert_eq!(stdout(&o), read_golden("sweep_k5.csv"));
}

#[test]
fn sweep_laconic_hcost_is_2t_minus_1() {
    let plot = tmp("sweep.svg");
    let o = run(&["sweep", "--scheme", "tri-laconic", "--n", "64", "--plot", plot.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        let cols: Vec<usize> = line.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[3], 2 * cols[1] - 1, "{line}");
    }
    assert_eq!(text.lines().count(), 8);
    assert!(std::fs::read_to_string(plot).unwrap().starts_with("<svg"));
}

#[test]
fn sweep_empty_grid_is_header_only() {
    let o = run(&["sweep", "--scheme", "edgecount-cross", "--n", "8", "--ts", ""]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "scheme,n,t,s,hcost_elems,vcost_elems,hbits,vbits,product_bits\n");
}

#[test]
fn modulus_env_override() {
    let input = golden("k5.stream");
    let o = bin().env("ANNOSTREAM_MODULUS", "101").args(["run", "--scheme", "tri-laconic", "--input", input.to_str().unwrap()]).output().unwrap();
    assert!(stdout(&o).contains("modulus=101"));
    let o = bin().env("ANNOSTREAM_MODULUS", "100").args(["run", "--scheme", "tri-laconic", "--input", input.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sets_flag_feeds_edgecount() {
    let input = golden("k5.stream");
    let sets = tmp("k5.sets");
    std::fs::write(&sets, "1 2 3\n4 5\n").unwrap();
    let o = run(&["run", "--scheme", "edgecount-induced", "--input", input.to_str().unwrap(), "--sets", sets.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("output=4"));
}
