use std::process::Command;

use epdyn_cli::output::{read_sweep_csv, sweep_table};
use epdyn_cli::{parse_config, run_with, Format};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("epdyn").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// Data rows of a CSV output, split into fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const SUBCOMMANDS: [&str; 6] = ["spectrum", "eps", "evolve", "sweep", "critical", "jordan"];

#[test]
fn help_exits_zero_for_every_subcommand() {
    for sub in SUBCOMMANDS {
        let (code, out, _) = run(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        assert!(out.contains("Usage: epdyn"), "{sub}: {out}");
        assert!(!out.contains("# epdyn"), "{sub} computed something");
    }
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in SUBCOMMANDS {
        assert!(out.contains(sub));
    }
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["eps"]).0, 2);
    assert_eq!(run(&["eps", "--preset", "nope"]).0, 2);
    assert_eq!(run(&["spectrum", "--preset", "paper"]).0, 2);
    assert_eq!(
        run(&["spectrum", "--preset", "paper", "--lambda", "1,2,3"]).0,
        2
    );
    assert_eq!(
        run(&["evolve", "--preset", "paper", "--lambda", "0.5", "--psi0", "1,2,3"]).0,
        2
    );
    assert_eq!(
        run(&["evolve", "--preset", "paper", "--lambda", "0.5", "--steps", "1"]).0,
        2
    );
    assert_eq!(
        run(&["evolve", "--preset", "paper", "--lambda", "0.5", "--tmax", "-1"]).0,
        2
    );
    assert_eq!(
        run(&["sweep", "--preset", "paper", "--from", "0.6", "--to", "0.5"]).0,
        2
    );
    assert_eq!(run(&["jordan", "--preset", "paper", "--ep", "3"]).0, 2);
    // computation
    let degenerate = [
        "eps",
        "--omega1",
        "1,0",
        "--omega2",
        "1,0",
        "--epsilon1",
        "0,0",
        "--epsilon2",
        "0,0",
        "--delta",
        "0,0",
    ];
    let (code, _, err) = run(&degenerate);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: "));
    assert_eq!(run(&["sweep", "--preset", "paper", "--n", "5"]).0, 1);
    // the located EP is defective only to rounding, so a tolerance this tight refuses it
    assert_eq!(run(&["jordan", "--preset", "paper", "--tol", "1e-15"]).0, 1);
}

#[test]
fn missing_parameters_are_listed() {
    let (code, _, err) = run(&["eps", "--omega1", "1,0", "--delta", "0,0.1"]);
    assert_eq!(code, 2);
    assert_eq!(
        err.trim(),
        "error: missing required keys: omega2, epsilon1, epsilon2"
    );
}

#[test]
fn evolve_starts_from_the_initial_state() {
    let (code, out, _) = run(&[
        "evolve", "--preset", "paper", "--lambda", "0.563", "--psi0", "0,1", "--tmax", "300",
        "--steps", "2000",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], format!("# epdyn {}", env!("CARGO_PKG_VERSION")));
    assert_eq!(lines[1], "t,re_z1,im_z1,re_z2,im_z2,abs_z1,abs_z2");
    let data = rows(&out);
    assert_eq!(data.len(), 2000);
    let first: Vec<f64> = data[0].iter().map(|s| num(s)).collect();
    assert_eq!(first, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    assert_eq!(num(&data[1999][0]), 300.0);
}

#[test]
fn eps_match_the_root_finding_oracle() {
    let (code, out, _) = run(&["eps", "--preset", "paper"]);
    assert_eq!(code, 0);
    let data = rows(&out);
    let find = |name: &str| {
        let r = data.iter().find(|r| r[0] == name).unwrap();
        (num(&r[1]), num(&r[2]))
    };
    let (re, im) = find("ep1");
    assert!((re - 0.5791494184132345).abs() < 1e-13 && (im + 0.0008199026515502676).abs() < 1e-13);
    let (re, im) = find("ep2");
    assert!((re - 0.5467790961221114).abs() < 1e-13 && (im + 0.0007308104565423116).abs() < 1e-13);
}

#[test]
fn critical_coupling_and_widths() {
    let (code, out, _) = run(&[
        "critical", "--preset", "paper", "--from", "0.53", "--to", "0.59",
    ]);
    assert_eq!(code, 0);
    let r = &rows(&out)[0];
    assert!((num(&r[0]) - 0.563).abs() <= 0.001);
    assert!((num(&r[1]) - 0.00054933).abs() < 1e-7);
    assert!((num(&r[2]) - 0.01350697).abs() < 1e-7);
}

#[test]
fn spectrum_matches_oracle_eigenvalues() {
    let (_, out, _) = run(&["spectrum", "--preset", "paper", "--lambda", "0.53"]);
    let data = rows(&out);
    let e1 = (num(&data[1][1]), num(&data[1][2]));
    let e2 = (num(&data[2][1]), num(&data[2][2]));
    assert!((e1.0 - 1.31351632).abs() < 1e-8 && (e1.1 + 0.00669651).abs() < 1e-8);
    assert!((e2.0 - 1.33648368).abs() < 1e-8 && (e2.1 + 0.00735649).abs() < 1e-8);
}

#[test]
fn sweep_csv_round_trips_byte_for_byte() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..5 {
        let lo: f64 = rng.gen_range(0.3..0.55);
        let hi: f64 = rng.gen_range(0.56..0.8);
        let n = rng.gen_range(300..800).to_string();
        let (code, out, err) = run(&[
            "sweep",
            "--preset",
            "paper",
            "--from",
            &lo.to_string(),
            "--to",
            &hi.to_string(),
            "--n",
            &n,
        ]);
        assert_eq!(code, 0, "{err}");
        let parsed = read_sweep_csv(&out).unwrap();
        let mut again = Vec::new();
        sweep_table(&parsed).write(Format::Csv, &mut again).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), out);
    }
}

#[test]
fn json_mirrors_csv_fields() {
    let (_, csv, _) = run(&["spectrum", "--preset", "paper", "--lambda", "0.53"]);
    let (_, json, _) = run(&[
        "spectrum", "--preset", "paper", "--lambda", "0.53", "--format", "json",
    ]);
    let lines: Vec<&str> = json.lines().collect();
    assert_eq!(lines.first(), Some(&"["));
    assert_eq!(lines.last(), Some(&"]"));
    for (row, line) in rows(&csv).iter().zip(&lines[1..]) {
        let want = format!(
            "{{\"quantity\": \"{}\", \"re\": {}, \"im\": {}}}",
            row[0], row[1], row[2]
        );
        assert!(line.trim_start().starts_with(&want), "{line} vs {want}");
    }
}

#[test]
fn config_file_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "preset = \"paper\"\ndelta = [0, 0.0115]\nlambda = 0.53\npsi0 = [1, 0]\ntmax = 50\ngrid = 11\n",
    )
    .unwrap();
    let out_path = dir.path().join("series.csv");
    let (code, out, err) = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&out_path).unwrap();
    let data = rows(&written);
    assert_eq!(data.len(), 11);
    assert_eq!(num(&data[10][0]), 50.0);
    assert_eq!(num(&data[0][1]), 1.0);

    // flags override the file
    let (_, out, _) = run(&["evolve", "--config", cfg.to_str().unwrap(), "--steps", "3"]);
    assert_eq!(rows(&out).len(), 3);

    std::fs::write(&cfg, "omega1 = [1, 0]\nbogus = 1\n").unwrap();
    let (code, _, err) = run(&["eps", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2: unknown key `bogus`"), "{err}");
}

#[test]
fn config_parsing_examples() {
    assert!(parse_config("preset = \"paper\"").is_ok());
    assert_eq!(
        parse_config("").unwrap_err().to_string(),
        "missing required keys: omega1, omega2, epsilon1, epsilon2, delta"
    );
    let free = "omega1 = [1.55, -0.007]\nomega2 = [1.1, -0.007]\nepsilon1 = [-0.4, 0]\nepsilon2 = [0.4, 0]\ndelta = [0, 0]\n";
    assert!(parse_config(free).is_ok());
}

#[test]
fn original_basis_rotates_input_and_output() {
    let base = [
        "evolve", "--preset", "paper", "--lambda", "0.53", "--tmax", "100", "--steps", "5",
    ];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut rotated_args = base.to_vec();
    // (1, 0) in the original basis is (cos, sin)(π/4) in the rotated one
    let psi = format!("{s},{s}");
    rotated_args.extend(["--psi0", &psi]);
    let (_, rotated, _) = run(&rotated_args);
    let mut original_args = base.to_vec();
    original_args.extend(["--psi0", "1,0", "--basis", "original"]);
    let (_, original, _) = run(&original_args);
    for (r, o) in rows(&rotated).iter().zip(rows(&original)) {
        let r: Vec<f64> = r[1..5].iter().map(|x| num(x)).collect();
        let o: Vec<f64> = o[1..5].iter().map(|x| num(x)).collect();
        // canonical = Rᵀ · observational with R = [[c, −s], [s, c]]
        let want = [
            s * (r[0] + r[2]),
            s * (r[1] + r[3]),
            s * (r[2] - r[0]),
            s * (r[3] - r[1]),
        ];
        for (g, w) in o.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{o:?} vs {want:?}");
        }
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let bin = env!("CARGO_BIN_EXE_epdyn");
    let args = [
        "evolve", "--preset", "paper", "--lambda", "0.53", "--steps", "3000",
    ];
    let plain = Command::new(bin)
        .args(args)
        .env_remove("EPDYN_THREADS")
        .output()
        .unwrap();
    let capped = Command::new(bin)
        .args(args)
        .env("EPDYN_THREADS", "2")
        .output()
        .unwrap();
    assert!(plain.status.success() && capped.status.success());
    assert_eq!(plain.stdout, capped.stdout);
    let bad = Command::new(bin)
        .args(args)
        .env("EPDYN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
