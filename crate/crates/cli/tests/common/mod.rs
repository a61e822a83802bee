//! Golden-file cases shared by the golden and acceptance tests.

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Files written into the output directory.
    pub outputs: &'static [&'static str],
    pub exit: i32,
}

/// `{in}` expands to the fixture directory, `{out}` to the run's output
/// directory.
pub const CASES: &[Case] = &[
    Case {
        name: "ph_square",
        args: &[
            "ph",
            "--input",
            "{in}/square4.xyz",
            "--output",
            "{out}/ph_square.csv",
            "--svg",
            "{out}/ph_square.svg",
            "--barcode-svg",
            "{out}/ph_square_barcode.svg",
        ],
        outputs: &["ph_square.csv", "ph_square.svg", "ph_square_barcode.svg"],
        exit: 0,
    },
    Case {
        name: "ph_tetra",
        args: &[
            "ph",
            "--input",
            "{in}/tetra.ply",
            "--output",
            "{out}/ph_tetra.csv",
            "--barcode-svg",
            "{out}/ph_tetra_barcode.svg",
        ],
        outputs: &["ph_tetra.csv", "ph_tetra_barcode.svg"],
        exit: 0,
    },
    Case {
        name: "ph_sphere",
        args: &["ph", "--input", "{in}/sphere200.xyz", "--output", "{out}/ph_sphere.csv"],
        outputs: &["ph_sphere.csv"],
        exit: 0,
    },
    Case {
        name: "lpvi_sphere",
        args: &[
            "lpvi",
            "--input",
            "{in}/sphere200.xyz",
            "--output",
            "{out}/lpvi_sphere.xyz",
            "--report",
            "{out}/lpvi_sphere.csv",
        ],
        outputs: &["lpvi_sphere.xyz", "lpvi_sphere.csv"],
        exit: 0,
    },
    Case {
        name: "lpvi_grid",
        args: &[
            "lpvi",
            "--input",
            "{in}/grid.xyz",
            "--output",
            "{out}/lpvi_grid.xyz",
            "--report",
            "{out}/lpvi_grid.csv",
        ],
        outputs: &["lpvi_grid.xyz", "lpvi_grid.csv"],
        exit: 0,
    },
    Case {
        name: "persloss_rect",
        args: &[
            "persloss",
            "--rendered",
            "{in}/rect_rendered.ppm",
            "--gt",
            "{in}/rect_gt.ppm",
            "--k0",
            "1",
            "--k1",
            "1",
            "--k2",
            "0",
            "--output",
            "{out}/persloss_rect.json",
            "--gradient",
            "{out}/persloss_rect_grad.csv",
        ],
        outputs: &["persloss_rect.json", "persloss_rect_grad.csv"],
        exit: 0,
    },
    Case {
        name: "persloss_noise",
        args: &[
            "persloss",
            "--rendered",
            "{in}/noise_a.ppm",
            "--gt",
            "{in}/noise_b.ppm",
            "--output",
            "{out}/persloss_noise.json",
            "--gradient",
            "{out}/persloss_noise_grad.csv",
        ],
        outputs: &["persloss_noise.json", "persloss_noise_grad.csv"],
        exit: 0,
    },
    Case {
        name: "optimize_converged",
        args: &["optimize", "--problem", "{in}/converged.problem", "--trace", "{out}/optimize_converged.csv"],
        outputs: &["optimize_converged.csv"],
        exit: 0,
    },
    Case {
        name: "optimize_cycle",
        args: &[
            "optimize",
            "--problem",
            "{in}/cycle.problem",
            "--epsilon",
            "0.05",
            "--refresh-period",
            "1",
            "--trace",
            "{out}/optimize_cycle.csv",
            "--svg",
            "{out}/optimize_cycle.svg",
        ],
        outputs: &["optimize_cycle.csv", "optimize_cycle.svg"],
        exit: 0,
    },
    Case {
        // η = 100/(2·C2) with C2 = 2·1000 + 5·4
        name: "optimize_cycle_forced",
        args: &[
            "optimize",
            "--problem",
            "{in}/cycle.problem",
            "--eta",
            "0.024752475247524754",
            "--max-iters",
            "50",
            "--refresh-period",
            "1",
            "--trace",
            "{out}/optimize_cycle_forced.csv",
        ],
        outputs: &["optimize_cycle_forced.csv"],
        exit: 6,
    },
    Case {
        name: "optimize_path",
        args: &[
            "optimize",
            "--problem",
            "{in}/path.problem",
            "--seed",
            "3",
            "--eta",
            "0.004",
            "--refresh-period",
            "5",
            "--trace",
            "{out}/optimize_path.csv",
            "--svg",
            "{out}/optimize_path.svg",
        ],
        outputs: &["optimize_path.csv", "optimize_path.svg"],
        exit: 0,
    },
];

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct RunOutput {
    pub exit: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
    /// `(file name, contents)` of every declared output, in order.
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn run_case(case: &Case, out: &Path) -> RunOutput {
    let fixtures = fixture_dir();
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| a.replace("{in}", fixtures.to_str().unwrap()).replace("{out}", out.to_str().unwrap()))
        .collect();
    let o = Command::new(env!("CARGO_BIN_EXE_topokit")).args(&args).output().expect("binary runs");
    let files = case.outputs.iter().map(|f| (f.to_string(), std::fs::read(out.join(f)).unwrap_or_default())).collect();
    RunOutput {
        exit: o.status.code().unwrap_or(-1),
        stdout: o.stdout,
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        files,
    }
}

/// Golden files of a case: its outputs plus its standard output.
pub fn golden_files(case: &Case, run: &RunOutput) -> Vec<(String, Vec<u8>)> {
    let mut files = run.files.clone();
    files.push((format!("{}.stdout", case.name), run.stdout.clone()));
    files
}

/// Runs every case twice and compares both runs with the committed golden
/// files. Returns one message per mismatch. With `TOPOKIT_BLESS` set the
/// golden files are rewritten from the first run instead.
pub fn check_goldens() -> Vec<String> {
    let bless = std::env::var_os("TOPOKIT_BLESS").is_some();
    let mut problems = Vec::new();
    for case in CASES {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_case(case, a.path());
        let second = run_case(case, b.path());
        if first.exit != case.exit {
            problems.push(format!(
                "{}: exit {} (expected {}): {}",
                case.name,
                first.exit,
                case.exit,
                first.stderr.trim()
            ));
            continue;
        }
        let (g1, g2) = (golden_files(case, &first), golden_files(case, &second));
        for ((name, x), (_, y)) in g1.iter().zip(&g2) {
            if x != y {
                problems.push(format!("{}: {name} differs between runs", case.name));
            }
            let path = golden_dir().join(name);
            if bless {
                std::fs::write(&path, x).unwrap();
            } else {
                match std::fs::read(&path) {
                    Ok(g) if &g == x => {}
                    Ok(_) => problems.push(format!("{}: {name} differs from golden", case.name)),
                    Err(_) => problems.push(format!("{}: golden {name} missing", case.name)),
                }
            }
        }
    }
    problems
}
