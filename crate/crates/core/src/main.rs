use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wavecraft::experiment::{
    Severity,
    cat_config, cps_config, cps_panel_for, fock_config, fourcat_config, resolve_out_dir, run, sweep_config, validate,
    write_artifacts, ExperimentConfig, ExperimentKind, FitFamily, RunError,
};
use wavecraft::states::StateSpec;

#[derive(Parser)]
#[command(name = "wavecraft", version, about = "Conditional-teleportation wave-function engineering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Squeezed-cat generation from squeezed vacuum (k = 1, l = 0, m = 0).
    Cat(Common),
    /// Four-component cats from vacuum with f_{1,1}.
    Fourcat(Common),
    /// Fock superpositions from vacuum with reference outcome vectors.
    Fock {
        /// Target such as 0+1, 0+3, 0+1+2+3, 2+3.
        #[arg(long)]
        target: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cubic phase state approximations.
    Cps {
        #[arg(long, default_value = "order1")]
        variant: String,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long)]
        p0: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Success probability versus threshold fidelity for S(±r)|0⟩ and S(±r)|1⟩.
    SuccessSweep {
        /// Comma-separated threshold fidelities.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        /// Half-width of the outcome region.
        #[arg(long)]
        sweep_region: Option<f64>,
        /// Lattice points per axis on every window level.
        #[arg(long)]
        sweep_resolution: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Analytic teleport step against the two-mode brute-force oracle.
    OracleCheck {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cases: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check a TOML config file without running it.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FitArg {
    None,
    SqueezedCat,
    FourCat,
    Displacement,
}

#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    grid_extent: Option<f64>,
    #[arg(long)]
    r_tele: Option<f64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    /// Input squeezing (the swept ±r for success-sweep).
    #[arg(long, allow_hyphen_values = true)]
    r_in: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    /// Comma-separated m_x per step.
    #[arg(long, allow_hyphen_values = true)]
    mx: Option<String>,
    /// Comma-separated m_p per step.
    #[arg(long, allow_hyphen_values = true)]
    mp: Option<String>,
    /// Rotate by 90° after every step.
    #[arg(long)]
    rotate_each_step: bool,
    /// Offset added to every m_x.
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<f64>,
    #[arg(long, value_enum)]
    fit: Option<FitArg>,
    #[arg(long)]
    label: Option<String>,
    /// Skip the Wigner map.
    #[arg(long)]
    no_wigner: bool,
    /// Output directory (default: $WAVECRAFT_OUT, else wavecraft-out/<kind>).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, RunError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| RunError::Config(format!("--{flag}: cannot parse {v:?}"))))
        .collect()
}

impl Common {
    fn apply(&self, c: &mut ExperimentConfig) -> Result<(), RunError> {
        if let Some(v) = self.grid_points {
            c.grid.n_points = v;
        }
        if let Some(v) = self.grid_extent {
            c.grid.extent = v;
        }
        if let Some(v) = self.r_tele {
            c.teleport.r_tele = v;
        }
        if let Some(v) = self.k {
            c.teleport.k = v;
        }
        if let Some(v) = self.l {
            c.teleport.l = v;
        }
        if let Some(r) = self.r_in {
            c.input = match &c.input {
                StateSpec::Fock { n, .. } => StateSpec::Fock { n: *n, r },
                _ => StateSpec::Squeezed { r },
            };
        }
        if let Some(n) = self.iters {
            c.plan.iterations = n;
            c.plan.m_x.clear();
            c.plan.m_p.clear();
            c.plan.rotate.clear();
        }
        if let Some(s) = &self.mx {
            c.plan.m_x = parse_list("mx", s)?;
        }
        if let Some(s) = &self.mp {
            c.plan.m_p = parse_list("mp", s)?;
        }
        if self.rotate_each_step {
            c.plan.rotate_each_step = true;
        }
        if let Some(v) = self.shift {
            c.plan.shift = v;
        }
        if let Some(f) = self.fit {
            c.fit = match f {
                FitArg::None => FitFamily::None,
                FitArg::SqueezedCat => FitFamily::SqueezedCat,
                FitArg::FourCat => FitFamily::FourCat,
                FitArg::Displacement => FitFamily::Displacement,
            };
        }
        if self.label.is_some() {
            c.label = self.label.clone();
        }
        if self.no_wigner {
            c.wigner.enabled = false;
        }
        if self.out_dir.is_some() {
            c.out_dir = self.out_dir.clone();
        }
        Ok(())
    }
}

fn read_config(path: &PathBuf) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}

fn preset(command: &Command) -> Result<(ExperimentConfig, &Common), RunError> {
    Ok(match command {
        Command::Cat(common) => (cat_config(-1.0, 4), common),
        Command::Fourcat(common) => (fourcat_config(4), common),
        Command::Fock { target, common } => (fock_config(target)?, common),
        Command::Cps { variant, gamma, p0, common } => {
            let mut c = cps_config(cps_panel_for(variant, *p0, *gamma)?);
            c.label = Some(format!("cps {variant}"));
            (c, common)
        }
        Command::SuccessSweep { thresholds, sweep_region, sweep_resolution, common } => {
            let mut c = sweep_config(common.r_in.unwrap_or(1.0));
            if let Some(t) = thresholds {
                c.sweep.thresholds = t.clone();
            }
            if let Some(r) = sweep_region {
                c.sweep.region = *r;
            }
            if let Some(n) = sweep_resolution {
                c.sweep.resolution = *n;
                c.sweep.window_resolution = *n;
            }
            (c, common)
        }
        Command::OracleCheck { seed, cases, common } => {
            let mut c = ExperimentConfig::new(ExperimentKind::OracleCheck);
            if let Some(s) = seed {
                c.oracle.seed = *s;
            }
            if let Some(n) = cases {
                c.oracle.cases_per_pair = *n;
            }
            if let Some(n) = common.grid_points {
                c.oracle.grid.n_points = n;
            }
            if let Some(e) = common.grid_extent {
                c.oracle.grid.extent = e;
            }
            (c, common)
        }
        Command::Run { config, common } | Command::Validate { config, common } => (read_config(config)?, common),
    })
}

fn resolve(command: &Command) -> Result<ExperimentConfig, RunError> {
    let (mut c, common) = preset(command)?;
    let sweep_r_in = matches!(command, Command::SuccessSweep { .. });
    let saved_input = c.input.clone();
    common.apply(&mut c)?;
    if sweep_r_in {
        c.input = saved_input;
    }
    Ok(c)
}

fn execute(command: &Command) -> Result<(), RunError> {
    let config = resolve(command)?;
    if let Command::Validate { .. } = command {
        let diag = validate(&config);
        println!("{}", serde_json::to_string_pretty(&diag).expect("diagnostics serialize"));
        if let Some(f) = diag.findings.iter().find(|f| f.severity == Severity::Error) {
            return Err(RunError::Config(format!("{}: {}", f.code, f.message)));
        }
        return Ok(());
    }
    let mut config = config;
    config.out_dir = Some(resolve_out_dir(&config));
    println!("# resolved config (sha256 {})", config.hash());
    print!("{}", config.to_toml());
    let output = run(&config)?;
    let dir = config.out_dir.clone().expect("resolved above");
    let files = write_artifacts(&output, &dir)?;
    let s = &output.summary;
    println!("# eta = {:.6}", s.eta);
    if !s.step_weights.is_empty() {
        println!("# step weights = {:?}", s.step_weights);
    }
    if let Some(f) = s.fidelity {
        println!("# fidelity = {f:.6}");
    }
    if let Some(f) = s.raw_displacement_fidelity {
        println!("# raw fidelity to unshifted output = {f:.6}");
    }
    if let Some(fit) = &s.fit {
        println!("# fit = {}", serde_json::to_string(fit).expect("fit serializes"));
    }
    for rec in &s.sweeps {
        println!("# sweep {:?}: {:?}", rec.input, rec.curve.probabilities);
    }
    if let Some(o) = &s.oracle {
        println!("# oracle: min fidelity {:.12}, max weight-ratio deviation {:.3e}", o.min_fidelity, o.max_ratio_deviation);
    }
    for f in files {
        println!("# wrote {}", f.display());
    }
    println!("# wall clock {:.2} s", s.wall_clock_seconds);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

