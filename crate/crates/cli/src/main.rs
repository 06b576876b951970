use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twistlab::bohr::{rational_spectrum_check, BohrFile, Window};
use twistlab::harness::{
    all_passed, error_exit_code, exit, output_dir, run, verify_suite, write_outputs, ExperimentConfig, Kind, Level,
    RunOptions,
};
use twistlab::Error;

#[derive(Parser)]
#[command(name = "twistlab", version, about = "Twisted patterns, Bohr sets and random walks on tori")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every stochastic step (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Binary precision for irrational coordinates.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cesàro averages of a random walk on a torus character.
    Equidist { config: PathBuf },
    /// Span-closure irreducibility certificates.
    Irred { config: PathBuf },
    /// Describe a Bohr set: measure, rational spectrum, members in a window.
    Bohr {
        /// Bohr file, or one of golden-arc, golden-cube, two-frequency-arc.
        bohr: String,
        #[arg(long, default_value_t = 20)]
        radius: i64,
        #[arg(long, default_value_t = 50)]
        spectrum_bound: u64,
    },
    /// Window densities of a Bohr set.
    Density { config: PathBuf },
    /// Twisted pattern search.
    Pattern { config: PathBuf },
    /// Bohr_0 surjectivity of an invariant map.
    Surject { config: PathBuf },
    /// Twisted recurrence search and window-density comparison.
    Recur { config: PathBuf },
    /// Galois labels of characteristic polynomials.
    Galois { config: PathBuf },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value = "smoke")]
        level: Level,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: cannot set worker count: {e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    }
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(cli: &Cli) -> Result<i32, Error> {
    let (path, kind) = match &cli.command {
        Command::Equidist { config } => (config, Kind::Equidistribution),
        Command::Irred { config } => (config, Kind::Irreducibility),
        Command::Density { config } => (config, Kind::BohrDensity),
        Command::Pattern { config } => (config, Kind::Pattern),
        Command::Surject { config } => (config, Kind::Surjectivity),
        Command::Recur { config } => (config, Kind::Recurrence),
        Command::Galois { config } => (config, Kind::Galois),
        Command::Bohr { bohr, radius, spectrum_bound } => return describe_bohr(cli, bohr, *radius, *spectrum_bound),
        Command::Verify { level } => {
            let results = verify_suite(*level, |r| println!("{}", r.line()));
            if let Some(dir) = &cli.global.out {
                std::fs::create_dir_all(dir)?;
                let json = serde_json::to_string_pretty(&results).expect("results serialize");
                std::fs::write(dir.join("verify.json"), json + "\n")?;
            }
            let passed = results.iter().filter(|r| r.passed).count();
            println!("{passed}/{} criteria passed", results.len());
            return Ok(if all_passed(&results) { exit::OK } else { exit::INVARIANT_VIOLATED });
        }
    };
    run_config(cli, path, kind)
}

fn run_config(cli: &Cli, path: &Path, kind: Kind) -> Result<i32, Error> {
    let loaded = ExperimentConfig::load(path)?;
    if loaded.config.kind != kind {
        return Err(Error::Config {
            file: path.display().to_string(),
            message: format!("kind is {}, this subcommand runs {}", loaded.config.kind.name(), kind.name()),
        });
    }
    let opts = RunOptions {
        seed: cli.global.seed,
        precision_bits: cli.global.precision_bits,
        workers: cli.global.workers,
        out: cli.global.out.clone(),
    };
    let outcome = run(&loaded, &opts)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    let dir = output_dir(&loaded, &opts);
    write_outputs(&outcome, &dir)?;
    println!("status: {:?}; reports in {}", outcome.status, dir.display());
    Ok(outcome.status.exit_code())
}

fn describe_bohr(cli: &Cli, reference: &str, radius: i64, bound: u64) -> Result<i32, Error> {
    let spec = match reference {
        "golden-arc" => twistlab::bohr::BohrSetSpec::golden_arc(),
        "golden-cube" => twistlab::bohr::BohrSetSpec::golden_cube(),
        "two-frequency-arc" => twistlab::harness::two_frequency_arc(),
        path => BohrFile::load(Path::new(path))?.build(cli.global.precision_bits)?,
    };
    println!("rank {}, torus dimension {}", spec.rank(), spec.system().torus_dim());
    println!("measure of U: {}", spec.measure());
    println!("contains 0: {}", spec.contains_zero());
    match rational_spectrum_check(spec.system(), bound) {
        Ok(v) => println!("rational spectrum up to height {bound}: {v:?}"),
        Err(e) => println!("rational spectrum up to height {bound}: {e}"),
    }
    let window = Window::cube(&vec![0; spec.rank()], radius);
    let found = spec.enumerate(&window)?;
    println!(
        "{} members and {} boundary points in [-{radius}, {radius}]^{}",
        found.members.len(),
        found.boundary.len(),
        spec.rank()
    );
    if let Some(dir) = &cli.global.out {
        std::fs::create_dir_all(dir)?;
        let mut text = String::from("point\n");
        for m in &found.members {
            text.push_str(&format!("\"{m:?}\"\n"));
        }
        std::fs::write(dir.join("members.csv"), text)?;
    }
    Ok(exit::OK)
}
