use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use regfall::cz_local::{self, SymmetricPath, SymmetricPathJson};
use regfall::hamiltonian::{self};
use regfall::lagrangian::{self, MorseMode};
use regfall::regularization;
use regfall::spectral::SpectrumEntry;
use regfall::verify::{run_suite, Suite, VerifyConfig};

/// Spectral computations for the regularized one-dimensional free fall.
#[derive(Parser)]
#[command(name = "regfall", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Lagrangian,
    Hamiltonian,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Lag,
    Ham,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the mode-k critical point of either action.
    CriticalPoint {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "lagrangian")]
        space: Space,
    },
    /// Emit the Hessian spectrum at the mode-k critical point.
    Spectrum {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        side: Side,
        /// Use the Fourier-discretized Hessian instead of the closed forms.
        #[arg(long)]
        numeric: bool,
        /// Galerkin truncation; defaults to max(16, 4k).
        #[arg(long)]
        modes: Option<usize>,
        /// Highest mode reported by the closed forms; defaults to 10k.
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Emit the index report (Morse, alpha, parity, CZ, CZ^can) at mode k.
    Index {
        #[arg(long)]
        k: usize,
    },
    /// Sample the physical trajectory of the mode-k critical point.
    Physical {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2048)]
        samples: usize,
        /// Neighbourhood of each collision flagged in the CSV.
        #[arg(long, default_value_t = 0.05)]
        exclusion: f64,
        /// CSV output path; a JSON sidecar goes next to it.
        #[arg(long, default_value = "orbit.csv")]
        out: PathBuf,
    },
    /// Winding-number index of a path of symmetric 2x2 matrices.
    CzLocal {
        /// JSON file {"grid": [...], "S": [[[s11,s12],[s12,s22]], ...]}.
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 16)]
        modes: usize,
    },
    /// Run the acceptance criteria; nonzero exit on failure.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        /// Seed for the randomized criteria (reproducible output).
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Evaluate a loop stored as JSON on a uniform grid (CSV to stdout).
    Eval(EvalArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// JSON file {"constant": a0, "cos": [...], "sin": [...]}.
    #[arg(long)]
    loop_file: PathBuf,
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

/// 17 significant digits, enough to round-trip an f64 through text.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn require_mode(k: usize) -> Result<(), String> {
    if k < 1 {
        Err("--k must be a positive integer".into())
    } else {
        Ok(())
    }
}

fn spectrum_rows(entries: &[SpectrumEntry]) -> Vec<serde_json::Value> {
    entries
        .iter()
        .map(|e| {
            let mut row = json!({
                "lambda": e.lambda,
                "mult": e.multiplicity,
                "label": e.family,
            });
            if let Some(n) = e.mode {
                row["n"] = json!(n);
            }
            if let Some(w) = e.winding {
                row["winding"] = json!(w);
            }
            row
        })
        .collect()
}

fn spectrum_csv(entries: &[SpectrumEntry]) -> String {
    let mut out = String::from("family,n,lambda,mult,winding\n");
    for e in entries {
        let n = e.mode.map(|n| n.to_string()).unwrap_or_default();
        let w = e.winding.map(|w| w.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.family,
            n,
            fmt17(e.lambda),
            e.multiplicity,
            w
        ));
    }
    out
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::CriticalPoint { k, space } => {
            require_mode(k)?;
            match space {
                Space::Lagrangian => {
                    let cp = lagrangian::critical_point(k).map_err(|e| e.to_string())?;
                    let out = json!({
                        "k": k,
                        "c_k": cp.c_k,
                        "critical_value": lagrangian::critical_value(k)
                            .map_err(|e| e.to_string())?,
                        "morse_index": lagrangian::morse_index(k, MorseMode::ClosedForm)
                            .map_err(|e| e.to_string())?,
                    });
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                }
                Space::Hamiltonian => {
                    let cp = hamiltonian::critical_point_ham(k).map_err(|e| e.to_string())?;
                    let out = json!({
                        "k": k,
                        "c_k": cp.c_k,
                        "a": cp.a,
                        "b": cp.b,
                        "norm_x_sq": cp.x.norm_sq(),
                        "norm_y_sq": cp.y.norm_sq(),
                        "x": cp.x,
                        "y": cp.y,
                    });
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum {
            k,
            side,
            numeric,
            modes,
            n_max,
            format,
        } => {
            require_mode(k)?;
            let n_modes = modes.unwrap_or((4 * k).max(16));
            if n_modes < k {
                return Err("--modes must be at least k".into());
            }
            let n_max = n_max.unwrap_or(10 * k);
            if n_max < k {
                return Err("--n-max must be at least k".into());
            }
            let entries: Vec<SpectrumEntry> = match (side, numeric) {
                (Side::Lag, false) => {
                    lagrangian::lag_spectrum(k, n_max).map_err(|e| e.to_string())?
                }
                (Side::Lag, true) => lagrangian::lag_spectrum_numeric(k, n_modes)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .map(|(lambda, mult)| SpectrumEntry {
                        lambda,
                        multiplicity: mult,
                        winding: None,
                        family: "numeric".into(),
                        mode: None,
                        eigenvectors: vec![],
                    })
                    .collect(),
                (Side::Ham, false) => {
                    hamiltonian::ham_spectrum_closed(k, n_max).map_err(|e| e.to_string())?
                }
                (Side::Ham, true) => hamiltonian::ham_spectrum_numeric(k, n_modes)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .map(|e| SpectrumEntry {
                        lambda: e.lambda,
                        multiplicity: e.multiplicity,
                        winding: Some(e.winding),
                        family: "numeric".into(),
                        mode: None,
                        eigenvectors: vec![],
                    })
                    .collect(),
            };
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&spectrum_rows(&entries)).unwrap()
                ),
                Format::Csv => print!("{}", spectrum_csv(&entries)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Index { k } => {
            require_mode(k)?;
            let report = hamiltonian::cz_index(k).map_err(|e| e.to_string())?;
            let out = json!({
                "k": report.k,
                "alpha": report.alpha_s,
                "parity": report.parity,
                "cz": report.cz,
                "cz_can": report.cz_can,
                "morse": report.morse,
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            if report.cz_can != report.morse {
                return Err("cz_can does not equal the Morse index".into());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Physical {
            k,
            samples,
            exclusion,
            out,
        } => {
            require_mode(k)?;
            if samples < 2 {
                return Err("--samples must be at least 2".into());
            }
            if exclusion <= 0.0 {
                return Err("--exclusion must be positive".into());
            }
            let cp = lagrangian::critical_point(k).map_err(|e| e.to_string())?;
            let orbit =
                regularization::rescale_square(&cp.x, samples).map_err(|e| e.to_string())?;
            let mut csv = String::from("t,q,q_dot,is_near_collision\n");
            for j in 0..orbit.grid.len() {
                let t = orbit.grid[j];
                let near = orbit.collision_times.iter().any(|&tc| {
                    let d = (t - tc).rem_euclid(1.0);
                    d.min(1.0 - d) <= exclusion
                });
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt17(t),
                    fmt17(orbit.q[j]),
                    fmt17(orbit.q_dot[j]),
                    near
                ));
            }
            fs::write(&out, csv).map_err(|e| format!("writing {}: {e}", out.display()))?;
            let sidecar = out.with_extension("json");
            let meta = json!({
                "collision_times": orbit.collision_times,
                "norm_x_sq": orbit.source_norm_sq,
            });
            fs::write(&sidecar, serde_json::to_string_pretty(&meta).unwrap())
                .map_err(|e| format!("writing {}: {e}", sidecar.display()))?;
            eprintln!("wrote {} and {}", out.display(), sidecar.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::CzLocal { path, modes } => {
            if modes < 1 {
                return Err("--modes must be at least 1".into());
            }
            let text = fs::read_to_string(&path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            let parsed: SymmetricPathJson =
                serde_json::from_str(&text).map_err(|e| format!("parsing --path: {e}"))?;
            let s = SymmetricPath::from_json(&parsed).map_err(|e| e.to_string())?;
            let (alpha, parity, cz) = cz_local::cz_of_path(&s, modes).map_err(|e| e.to_string())?;
            let window = cz_local::default_window(modes);
            let entries =
                cz_local::spectrum_with_winding(&s, modes, window).map_err(|e| e.to_string())?;
            let out = json!({
                "alpha": alpha,
                "parity": parity,
                "cz": cz,
                "window": [window.0, window.1],
                "spectrum": spectrum_rows(&entries),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, kmax, seed } => {
            let suite = Suite::parse(&suite)
                .ok_or("--suite must be one of core|spectra|regularization|all")?;
            if kmax < 1 {
                return Err("--kmax must be at least 1".into());
            }
            let threads = std::env::var("REGFALL_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .unwrap_or_else(|| {
                    std::thread::available_parallelism()
                        .map(|n| n.get())
                        .unwrap_or(1)
                });
            let cfg = VerifyConfig {
                kmax,
                seed,
                threads,
            };
            let results = run_suite(suite, cfg);
            let passed = results.iter().filter(|r| r.passed).count();
            for r in &results {
                println!("{}", r.line());
            }
            println!("{passed}/{} criteria passed", results.len());
            if passed == results.len() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Eval(args) => {
            if args.samples < 1 {
                return Err("--samples must be at least 1".into());
            }
            let text = fs::read_to_string(&args.loop_file)
                .map_err(|e| format!("reading {}: {e}", args.loop_file.display()))?;
            let poly: regfall::TrigPoly =
                serde_json::from_str(&text).map_err(|e| format!("parsing --loop-file: {e}"))?;
            println!("tau,value");
            for j in 0..args.samples {
                let tau = j as f64 / args.samples as f64;
                println!("{},{}", fmt17(tau), fmt17(poly.eval(tau)));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => usage_error(&msg),
    }
}
