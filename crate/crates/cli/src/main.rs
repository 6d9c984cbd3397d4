use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mobius_lab::analyzer::entropy_estimate;
use mobius_lab::arithmetic::{CorrelationQuery, MobiusTable};
use mobius_lab::systems::DynSystem;

use mobius_lab_cli::config::{ExperimentConfig, KNOWN_SYSTEM_TAGS};
use mobius_lab_cli::{exit_code, runner, EXIT_INVALID};

/// Environment variable naming the default data directory.
const DATA_DIR_ENV: &str = "MOBIUS_LAB_DATA";

#[derive(Parser)]
#[command(
    name = "mobius-lab",
    version,
    about = "Numerical experiments on Möbius disjointness over tree and graph dynamical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve μ and λ up to a limit and dump the table to a binary file.
    Sieve {
        #[arg(long)]
        limit: u64,
        /// Output path; defaults to `<data dir>/mobius-<limit>.mbtb`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        segment_size: Option<usize>,
    },
    /// Run the jobs and checks of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the worker count.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the sieve limit.
        #[arg(long)]
        sieve_limit: Option<u64>,
        /// Load a previously dumped μ/λ table instead of re-sieving.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Re-run on a single worker and require byte-identical artifacts.
        #[arg(long)]
        verify_determinism: bool,
    },
    /// Estimate topological entropy through separated-set growth.
    Entropy {
        /// System tag: tent, rotation or periodic.
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 2.0)]
        slope: f64,
        #[arg(long, default_value_t = 0.6180339887498949)]
        theta: f64,
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 14)]
        n_max: u32,
        /// Comma-separated separation scales.
        #[arg(long, default_value = "0.2,0.1,0.05")]
        eps: String,
        /// Write the cell table as CSV here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized multiple autocorrelation of μ.
    Chowla {
        #[arg(long)]
        limit: u64,
        /// Comma-separated shifts a_1 < a_2 < …
        #[arg(long, default_value = "")]
        shifts: String,
        /// Comma-separated exponents i_0..i_r (each 1 or 2).
        #[arg(long, default_value = "1")]
        exponents: String,
    },
    /// Print the verdict table of a run summary.
    Report { summary: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("mobius-lab-out"))
}

fn dispatch(cli: Cli) -> mobius_lab::Result<ExitCode> {
    match cli.command {
        Command::Sieve {
            limit,
            out,
            segment_size,
        } => sieve_command(limit, out, segment_size),
        Command::Run {
            config,
            workers,
            out_dir,
            seed,
            sieve_limit,
            table,
            verify_determinism,
        } => run_command(
            config,
            workers,
            out_dir,
            seed,
            sieve_limit,
            table,
            verify_determinism,
        ),
        Command::Entropy {
            system,
            slope,
            theta,
            m,
            grid,
            n_max,
            eps,
            out,
        } => entropy_command(&system, slope, theta, m, grid, n_max, &eps, out),
        Command::Chowla {
            limit,
            shifts,
            exponents,
        } => chowla_command(limit, &shifts, &exponents),
        Command::Report { summary } => report_command(&summary),
    }
}

fn sieve_command(
    limit: u64,
    out: Option<PathBuf>,
    segment_size: Option<usize>,
) -> mobius_lab::Result<ExitCode> {
    let started = std::time::Instant::now();
    let table = match segment_size {
        Some(segment) => MobiusTable::sieve_with_segment(limit, segment)?,
        None => MobiusTable::sieve(limit)?,
    };
    let path = out.unwrap_or_else(|| data_dir().join(format!("mobius-{limit}.mbtb")));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(&path)?;
    table.write_to(std::io::BufWriter::new(file))?;

    // Reload and verify the round trip.
    let reloaded = MobiusTable::read_from(std::io::BufReader::new(std::fs::File::open(&path)?))?;
    if reloaded.checksum() != table.checksum() {
        return Err(mobius_lab::Error::Io(
            "reloaded table does not match the sieved one".into(),
        ));
    }
    println!(
        "{} n={} checksum={:016x} elapsed={:?}",
        path.display(),
        limit,
        table.checksum(),
        started.elapsed()
    );
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_command(
    config_path: PathBuf,
    workers: Option<usize>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    sieve_limit: Option<u64>,
    table_path: Option<PathBuf>,
    verify_determinism: bool,
) -> mobius_lab::Result<ExitCode> {
    let text = std::fs::read_to_string(&config_path)?;
    let mut config = match ExperimentConfig::from_toml(&text) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("invalid config {}: {message}", config_path.display());
            eprintln!("known system tags: {}", KNOWN_SYSTEM_TAGS.join(", "));
            return Ok(ExitCode::from(EXIT_INVALID as u8));
        }
    };
    if let Some(w) = workers {
        config.workers = w.max(1);
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(limit) = sieve_limit {
        config.sieve_limit = limit;
    }

    let preloaded = match &table_path {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            let table = MobiusTable::read_from(std::io::BufReader::new(file))?;
            eprintln!(
                "loaded table up to {} from {}",
                table.limit(),
                path.display()
            );
            Some(std::sync::Arc::new(table))
        }
        None => None,
    };

    let started = std::time::Instant::now();
    let artifacts = runner::execute_with_table(&config, preloaded.clone())?;

    if verify_determinism {
        let mut single = config.clone();
        single.workers = 1;
        let again = runner::execute_with_table(&single, preloaded)?;
        if again.files != artifacts.files {
            eprintln!("determinism violation: single-worker run produced different bytes");
            return Ok(ExitCode::FAILURE);
        }
        eprintln!(
            "determinism verified across {} and 1 workers",
            config.workers
        );
    }

    let dir = out_dir
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(data_dir);
    let paths = runner::write_artifacts(&dir, &artifacts)?;
    eprintln!(
        "wrote {} files to {} in {:?}",
        paths.len(),
        dir.display(),
        started.elapsed()
    );
    for job in &artifacts.summary.jobs {
        eprintln!(
            "  job {}: {}",
            job.name,
            if job.passed { "pass" } else { "FAIL" }
        );
    }
    for check in &artifacts.summary.checks {
        eprintln!(
            "  check {}: {} ({})",
            check.name,
            if check.passed { "pass" } else { "FAIL" },
            check.details
        );
    }
    if artifacts.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

#[allow(clippy::too_many_arguments)]
fn entropy_command(
    system: &str,
    slope: f64,
    theta: f64,
    m: usize,
    grid_size: usize,
    n_max: u32,
    eps: &str,
    out: Option<PathBuf>,
) -> mobius_lab::Result<ExitCode> {
    let eps_list: Vec<f64> = eps
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| mobius_lab::Error::InvalidArgument(format!("bad epsilon `{s}`")))
        })
        .collect::<mobius_lab::Result<_>>()?;
    let (sys, grid) = match system {
        "tent" => {
            let sys = DynSystem::tent(slope)?;
            let tent = match &sys {
                DynSystem::Tent(t) => t.clone(),
                _ => unreachable!(),
            };
            let grid = (0..grid_size)
                .map(|i| tent.point_at((i as f64 + 0.5) / grid_size as f64))
                .collect::<mobius_lab::Result<Vec<_>>>()?;
            (sys, grid)
        }
        "rotation" => {
            let sys = DynSystem::rotation(theta)?;
            let rot = match &sys {
                DynSystem::Rotation(r) => r.clone(),
                _ => unreachable!(),
            };
            let grid = (0..grid_size)
                .map(|i| rot.point_at((i as f64 + 0.5) / grid_size as f64))
                .collect();
            (sys, grid)
        }
        "periodic" => {
            let sys = DynSystem::periodic_interval(m)?;
            let grid = sys.sample_points(grid_size, 17);
            (sys, grid)
        }
        other => {
            eprintln!("unknown system tag `{other}`; entropy supports: tent, rotation, periodic");
            return Ok(ExitCode::from(EXIT_INVALID as u8));
        }
    };
    let ns: Vec<u32> = (1..=n_max).collect();
    let report = entropy_estimate(&sys, &ns, &eps_list, &grid)?;
    let mut csv = String::from("n,epsilon,count\n");
    for cell in &report.cells {
        csv.push_str(&format!("{},{},{}\n", cell.n, cell.epsilon, cell.count));
    }
    csv.push_str(&format!("estimate,,{}\n", report.estimate));
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&path, csv)?;
            println!("estimate {} written to {}", report.estimate, path.display());
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn chowla_command(limit: u64, shifts: &str, exponents: &str) -> mobius_lab::Result<ExitCode> {
    let shifts: Vec<u64> = shifts
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| mobius_lab::Error::InvalidArgument(format!("bad shift `{s}`")))
        })
        .collect::<mobius_lab::Result<_>>()?;
    let exponents: Vec<u8> = exponents
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u8>()
                .map_err(|_| mobius_lab::Error::InvalidArgument(format!("bad exponent `{s}`")))
        })
        .collect::<mobius_lab::Result<_>>()?;
    let max_shift = shifts.last().copied().unwrap_or(0);
    let query = CorrelationQuery::new(shifts, exponents, limit)?;
    let table = MobiusTable::sieve(limit + max_shift)?;
    let value = table.chowla_sum(&query)?;
    println!(
        "N={} shifts=[{}] exponents=[{}] value={}",
        limit,
        query
            .shifts()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
        query
            .exponents()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(","),
        value
    );
    Ok(ExitCode::SUCCESS)
}

fn report_command(summary_path: &PathBuf) -> mobius_lab::Result<ExitCode> {
    let text = std::fs::read_to_string(summary_path)?;
    let summary: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| mobius_lab::Error::Malformed(format!("summary parse: {e}")))?;
    let jobs = summary["jobs"].as_array().cloned().unwrap_or_default();
    let checks = summary["checks"].as_array().cloned().unwrap_or_default();
    println!("{:<28} {:<8} details", "name", "verdict");
    for job in &jobs {
        println!(
            "{:<28} {:<8} final={}",
            job["name"].as_str().unwrap_or("?"),
            if job["passed"].as_bool().unwrap_or(false) {
                "pass"
            } else {
                "FAIL"
            },
            job["final_values"]
                .as_array()
                .map(|v| v
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" "))
                .unwrap_or_default()
        );
    }
    for check in &checks {
        println!(
            "{:<28} {:<8} {}",
            check["name"].as_str().unwrap_or("?"),
            if check["passed"].as_bool().unwrap_or(false) {
                "pass"
            } else {
                "FAIL"
            },
            check["details"].as_str().unwrap_or("")
        );
    }
    let all = summary["all_passed"].as_bool().unwrap_or(false);
    println!("overall: {}", if all { "pass" } else { "FAIL" });
    Ok(if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
