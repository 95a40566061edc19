//! Behavior tests for the `husp` binary: exit codes, output framing and
//! determinism, checked through real process invocations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use husp_core::io;
use husp_core::miner::{mine, MinerConfig};
use husp_core::model::QSequenceDatabase;

const DATA: &str = "\
1:2 3:1 -1 3:2 -1 2:10 6:3 -1 1:2 5:1 -2
6:2 -1 1:5 4:2 -1 3:2 -1 2:4 -1 1:4 4:1 -2
1:4 -1 2:4 -1 6:5 -1 1:1 2:2 5:1 -2
1:3 2:4 4:5 -1 3:2 5:1 -2
2:1 5:1 -1 3:1 -1 6:2 -1 4:2 -1 1:4 5:2 -2
";
const PROFITS: &str = "1\t3\n2\t2\n3\t10\n4\t4\n5\t6\n6\t1\n";

struct Fixture {
    _dir: tempfile::TempDir,
    data: PathBuf,
    profits: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.txt");
    let profits = dir.path().join("profits.txt");
    std::fs::write(&data, DATA).unwrap();
    std::fs::write(&profits, PROFITS).unwrap();
    Fixture {
        _dir: dir,
        data,
        profits,
    }
}

fn husp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_husp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn data_args(f: &Fixture) -> Vec<String> {
    vec![
        "--data".into(),
        f.data.display().to_string(),
        "--profits".into(),
        f.profits.display().to_string(),
    ]
}

fn run(subcommand: &str, f: &Fixture, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec![subcommand.into()];
    args.extend(data_args(f));
    args.extend(extra.iter().map(|s| s.to_string()));
    husp(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn mine_stdout_matches_the_library() {
    let f = fixture();
    let out = run("mine", &f, &["--min-util", "25%"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let db = QSequenceDatabase::new(
        io::parse_dataset(DATA).unwrap(),
        io::parse_profits(PROFITS).unwrap(),
    )
    .unwrap();
    let expected = io::write_results(
        &mine(&db, &MinerConfig::new("25%".parse().unwrap())).unwrap(),
    );
    assert_eq!(stdout(&out), expected);
    assert!(stdout(&out).contains("1 -1 3 -1 2 -1 1 -1\t107"));
    assert!(!stdout(&out).contains("\n1 -1 2 -1\t"));
}

#[test]
fn mine_writes_byte_identical_files() {
    let f = fixture();
    let out_a = f.data.parent().unwrap().join("a.txt");
    let out_b = f.data.parent().unwrap().join("b.txt");
    for (path, parallel) in [(&out_a, false), (&out_b, true)] {
        let mut extra = vec!["--min-util", "25%", "--out"];
        let p = path.display().to_string();
        extra.push(&p);
        if parallel {
            extra.push("--parallel-roots");
        }
        let out = run("mine", &f, &extra);
        assert!(out.status.success());
        assert!(stdout(&out).is_empty());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn mine_stats_go_to_stderr_only() {
    let f = fixture();
    let quiet = run("mine", &f, &["--min-util", "25%"]);
    let chatty = run("mine", &f, &["--min-util", "25%", "--stats"]);
    assert_eq!(stdout(&quiet), stdout(&chatty));
    assert!(stderr(&quiet).is_empty());
    assert!(stderr(&chatty).contains("elapsed_ms="));
    assert!(stderr(&chatty).contains("nodes_visited=25"));
}

#[test]
fn usage_errors_exit_2() {
    let f = fixture();
    let unknown_flag = run("mine", &f, &["--min-util", "25%", "--frobnicate"]);
    assert_eq!(unknown_flag.status.code(), Some(2));
    let missing_flag = run("mine", &f, &[]);
    assert_eq!(missing_flag.status.code(), Some(2));
    let zero_threshold = run("mine", &f, &["--min-util", "0%"]);
    assert_eq!(zero_threshold.status.code(), Some(2));
    assert!(stderr(&zero_threshold).contains("threshold"));
    let over_one = run("mine", &f, &["--min-util", "1.5"]);
    assert_eq!(over_one.status.code(), Some(2));
    let no_command = husp(&[]);
    assert_eq!(no_command.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let f = fixture();
    let missing_file = husp(&[
        "mine",
        "--data",
        "/nonexistent/data.txt",
        "--profits",
        f.profits.display().to_string().as_str(),
        "--min-util",
        "25%",
    ]);
    assert_eq!(missing_file.status.code(), Some(1));
    assert!(stderr(&missing_file).contains("cannot read"));

    let bad = f.data.parent().unwrap().join("bad.txt");
    std::fs::write(&bad, "1:0 -2\n").unwrap();
    let malformed = husp(&[
        "mine",
        "--data",
        bad.display().to_string().as_str(),
        "--profits",
        f.profits.display().to_string().as_str(),
        "--min-util",
        "25%",
    ]);
    assert_eq!(malformed.status.code(), Some(1));
    assert!(stderr(&malformed).contains("line 1"));
}

#[test]
fn verify_confirms_the_running_example() {
    let f = fixture();
    let out = run("verify", &f, &["--min-util", "25%"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).starts_with("MATCH: 9 patterns"));
}

#[test]
fn dump_array_prints_the_golden_table() {
    let f = fixture();
    let out = run("dump-array", &f, &["--sid", "1"]);
    assert!(out.status.success());
    let expected = "\
pos\teid\titem\tu\tru\tnext_pos\tnext_eid
1\t1\t1\t6\t65\t6\t3
2\t1\t3\t10\t55\t3\t3
3\t2\t3\t20\t35\t-\t4
4\t3\t2\t20\t15\t-\t6
5\t3\t6\t3\t12\t-\t6
6\t4\t1\t6\t6\t-\t-
7\t4\t5\t6\t0\t-\t-
";
    assert_eq!(stdout(&out), expected);

    let missing = run("dump-array", &f, &["--sid", "99"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("no sequence with sid 99"));
}

#[test]
fn gen_produces_identical_files_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let gen_into = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = husp(&[
            "gen",
            "--out-dir",
            out_dir.display().to_string().as_str(),
            "--sequences",
            "50",
            "--items",
            "10",
            "--seed",
            "42",
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        (
            std::fs::read(out_dir.join("data.txt")).unwrap(),
            std::fs::read(out_dir.join("profits.txt")).unwrap(),
        )
    };
    let (data_a, profits_a) = gen_into("a");
    let (data_b, profits_b) = gen_into("b");
    assert_eq!(data_a, data_b);
    assert_eq!(profits_a, profits_b);

    // The files parse back into a valid database of the requested shape.
    let sequences = io::parse_dataset(std::str::from_utf8(&data_a).unwrap()).unwrap();
    assert_eq!(sequences.len(), 50);
    let profits = io::parse_profits(std::str::from_utf8(&profits_a).unwrap()).unwrap();
    assert_eq!(profits.len(), 10);
    QSequenceDatabase::new(sequences, profits).unwrap();

    let degenerate = husp(&[
        "gen",
        "--out-dir",
        dir.path().join("c").display().to_string().as_str(),
        "--sequences",
        "5",
        "--items",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(degenerate.status.code(), Some(1));
}

#[test]
fn bench_emits_a_full_table() {
    let f = fixture();
    let out = run(
        "bench",
        &f,
        &["--min-util-list", "25%,10%", "--repeat", "2"],
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "threshold\tconfig\tnodes_visited\tprojections_built\thusp_count\tavg_ms"
    );
    assert_eq!(lines.len(), 1 + 2 * 4);
    for (idx, config) in ["full", "no-puk", "no-puo", "none"].iter().enumerate() {
        assert!(lines[1 + idx].starts_with(&format!("25%\t{config}\t")));
        assert!(lines[5 + idx].starts_with(&format!("10%\t{config}\t")));
    }
    // Pruning only removes work: within a threshold, full visits no more
    // nodes than any other configuration.
    let nodes = |line: &str| {
        line.split('\t')
            .nth(2)
            .unwrap()
            .parse::<u64>()
            .unwrap()
    };
    for base in [1, 5] {
        let full = nodes(lines[base]);
        for (row, line) in lines.iter().enumerate().skip(base + 1).take(3) {
            assert!(full <= nodes(line), "row {row}");
        }
    }
}

fn write_fixture(dir: &Path, data: &str, profits: &str) -> (PathBuf, PathBuf) {
    let data_path = dir.join("data.txt");
    let profits_path = dir.join("profits.txt");
    std::fs::write(&data_path, data).unwrap();
    std::fs::write(&profits_path, profits).unwrap();
    (data_path, profits_path)
}

#[test]
fn mine_handles_an_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let (data, profits) = write_fixture(dir.path(), "", "1\t1\n");
    let out = husp(&[
        "mine",
        "--data",
        data.display().to_string().as_str(),
        "--profits",
        profits.display().to_string().as_str(),
        "--min-util",
        "50%",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# nodes_visited=0"));
    assert!(text.contains("# husp_count=0"));
}
