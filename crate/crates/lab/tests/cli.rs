use std::fs;
use std::path::Path;

use cur_core::rng::{stream, Purpose};
use cur_core::sampling::{min_sample_size_rv, sample_size_length_via_lev, sample_size_leverage};
use cur_core::synth::LowRankSpec;
use cur_lab::{cli, mtx};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = cli::run(std::iter::once("cur-lab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"))
}

fn rank_file(dir: &Path, m: usize, n: usize, k: usize, seed: u64) -> String {
    let a = LowRankSpec::new(m, n, k).generate(&mut stream(seed, 0, 0, Purpose::Matrix)).unwrap();
    let p = dir.join(format!("a{m}x{n}r{k}.mtx"));
    mtx::save(&p, &a).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn no_arguments_is_a_usage_error() {
    assert_eq!(run(&[]).0, 2);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run(&["svd", "--bogus"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn sample_size_matches_library() {
    let (code, out) = run(&["sample-size", "--r", "5", "--eps", "0.5", "--delta", "0.5", "--c", "1"]);
    assert_eq!(code, 0);
    let expected = min_sample_size_rv(5.0, 0.5, 0.5, 1.0).unwrap();
    assert_eq!(field(&out, "stable_rank_bound"), expected.to_string());

    let (code, out) = run(&[
        "sample-size",
        "--r",
        "3",
        "--k",
        "3",
        "--kappa",
        "2",
        "--eps",
        "0.5",
        "--delta",
        "0.1",
        "--beta",
        "0.5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "leverage_bound"), sample_size_leverage(3, 0.5, 0.1).unwrap().to_string());
    assert_eq!(
        field(&out, "length_via_leverage_bound"),
        sample_size_length_via_lev(3.0, 2.0, 3, 0.1).unwrap().to_string()
    );
}

#[test]
fn sample_size_out_of_domain_is_a_runtime_error() {
    assert_eq!(run(&["sample-size", "--r", "5", "--eps", "1.5", "--delta", "0.5"]).0, 1);
}

#[test]
fn deim_on_exact_rank_three_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = rank_file(dir.path(), 30, 20, 3, 4);
    let (code, out) = run(&["deim", "--in", &path, "--k", "3"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(field(&out, "rows").split(',').count(), 3);
    assert_eq!(field(&out, "cols").split(',').count(), 3);
    let residual: f64 = field(&out, "residual").parse().unwrap();
    assert!(residual <= 1e-8, "{residual}");
}

#[test]
fn svd_reports_rank() {
    let dir = tempfile::tempdir().unwrap();
    let path = rank_file(dir.path(), 12, 9, 4, 1);
    let (code, out) = run(&["svd", "--in", &path]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "rank"), "4");
    assert_eq!(out.lines().filter(|l| l.starts_with("sigma[")).count(), 9);
}

#[test]
fn cur_with_explicit_indices() {
    let dir = tempfile::tempdir().unwrap();
    let path = rank_file(dir.path(), 10, 8, 2, 2);
    let (code, out) = run(&["cur", "--in", &path, "--rows", "0,1,2", "--cols", "3,4"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(field(&out, "exact"), "true");
    let (code, out) = run(&["cur", "--in", &path, "--rows", "0", "--cols", "3"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "exact"), "false");
    // out-of-range index
    assert_eq!(run(&["cur", "--in", &path, "--rows", "99", "--cols", "0"]).0, 1);
}

#[test]
fn cur_sampled_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let path = rank_file(dir.path(), 40, 30, 3, 3);
    let a = run(&["--seed", "9", "cur", "--in", &path, "--scheme", "leverage", "--d1", "12", "--d2", "12"]);
    let b = run(&["cur", "--in", &path, "--scheme", "leverage", "--d1", "12", "--d2", "12", "--seed", "9"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    assert_eq!(field(&a.1, "rows").split(',').count(), 12);
    assert_eq!(run(&["cur", "--in", &path, "--scheme", "sideways"]).0, 2);
}

#[test]
fn missing_matrix_file_is_a_runtime_error() {
    assert_eq!(run(&["svd", "--in", "/nonexistent/a.mtx"]).0, 1);
}

#[test]
fn experiment_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "kind = success_prob\ntrials = 0\nd_grid = 4\n").unwrap();
    assert_eq!(run(&["experiment", "--config", cfg.to_str().unwrap()]).0, 2);

    fs::write(&cfg, "d_grid = 4\n").unwrap();
    assert_eq!(run(&["experiment", "--config", cfg.to_str().unwrap(), "--set", "sigma=-1"]).0, 2);
    assert_eq!(run(&["experiment", "--config", cfg.to_str().unwrap(), "--set", "nonsense"]).0, 2);
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "m = 12\nn = 10\nk = 2\nd_grid = 2, 6\ntrials = 5\nschemes = uniform, length\n").unwrap();
    let csv = dir.path().join("out.csv");
    let (code, _) =
        run(&["--out", csv.to_str().unwrap(), "--seed", "3", "experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "trial,scheme,d1,d2,success,rel_err_2,rel_err_F,ms");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5 * 2 * 2);

    // without --out the CSV goes to stdout
    let (code, out) = run(&["--seed", "3", "experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, text);
}

#[test]
fn cluster_from_model_block() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.txt");
    fs::write(&model, "ambient_dim = 20\ndims = 2, 3, 4\npoints = 10, 10, 10\nseed = 5\n").unwrap();
    let (code, out) = run(&["cluster", "--model", model.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(field(&out, "rank"), "9");
    if field(&out, "exact") == "true" {
        assert_eq!(field(&out, "clusters"), "3");
        assert_eq!(field(&out, "accuracy").parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn cluster_from_file_needs_d_max() {
    let dir = tempfile::tempdir().unwrap();
    let path = rank_file(dir.path(), 6, 8, 2, 1);
    assert_eq!(run(&["cluster", "--in", &path]).0, 2);
    assert_eq!(run(&["cluster", "--in", &path, "--d-max", "2"]).0, 0);
}

#[test]
fn generate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.mtx");
    assert_eq!(
        run(&["--seed", "2", "--out", p.to_str().unwrap(), "generate", "--m", "7", "--n", "5", "--k", "2"]).0,
        0
    );
    let a = mtx::load(&p).unwrap();
    assert_eq!(a.shape(), (7, 5));
    assert_eq!(cur_core::linalg::numerical_rank(&a, None), 2);
}
