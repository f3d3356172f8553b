use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toml::{Table, Value};

use nsvlab::harness::{self, Overrides};

#[derive(Parser)]
#[command(name = "nsvlab", version, about = "Navier–Stokes–Voight simulation and dimension-bound toolkit")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also settable through NSVLAB_OUTPUT_DIR.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the flow and write diagnostics.
    Simulate(SimArgs),
    /// Co-evolve a tangent frame and estimate the trace functional.
    Lyapunov {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        burn_in: Option<f64>,
        #[arg(long)]
        reorth_every: Option<u64>,
        /// random | eigenmodes
        #[arg(long)]
        frame: Option<String>,
    },
    /// Evaluate every dimension bound for one parameter set.
    Bounds {
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        nu: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        gnorm: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        measure: Option<f64>,
        /// torus | bounded-domain
        #[arg(long)]
        geometry: Option<String>,
    },
    /// Check an inequality: spectrum | liyau | lt | rho-l2 | rho-linf.
    Verify {
        target: String,
        #[arg(long)]
        j_max: Option<u64>,
        #[arg(long)]
        e_max: Option<u64>,
        #[arg(long)]
        m_max: Option<u64>,
        #[arg(long)]
        families: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        resolution: Option<u64>,
        #[arg(long)]
        lambda_max: Option<u64>,
    },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    resolution: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long)]
    sample_every: Option<u64>,
    /// auto | rk4 | if-rk4
    #[arg(long)]
    scheme: Option<String>,
    /// velocity | vorticity
    #[arg(long)]
    formulation: Option<String>,
}

#[derive(Default)]
struct Section(Table);

impl Section {
    fn f(&mut self, key: &str, v: Option<f64>) {
        if let Some(v) = v {
            self.0.insert(key.into(), Value::Float(v));
        }
    }

    fn i(&mut self, key: &str, v: Option<u64>) {
        if let Some(v) = v {
            self.0.insert(key.into(), Value::Integer(v as i64));
        }
    }

    fn s(&mut self, key: &str, v: Option<String>) {
        if let Some(v) = v {
            self.0.insert(key.into(), Value::String(v));
        }
    }

    fn sim(&mut self, a: SimArgs) {
        self.f("nu", a.nu);
        self.f("alpha", a.alpha);
        self.i("resolution", a.resolution);
        self.f("dt", a.dt);
        self.f("t_end", a.t_end);
        self.i("sample_every", a.sample_every);
        self.s("scheme", a.scheme);
        self.s("formulation", a.formulation);
    }
}

fn overrides(cli: Cli) -> Overrides {
    let mut sec = Section::default();
    let name = match cli.command {
        Cmd::Simulate(a) => {
            sec.sim(a);
            "simulate"
        }
        Cmd::Lyapunov {
            sim,
            n,
            burn_in,
            reorth_every,
            frame,
        } => {
            sec.sim(sim);
            sec.i("n", n);
            sec.f("burn_in", burn_in);
            sec.i("reorth_every", reorth_every);
            sec.s("frame", frame);
            "lyapunov"
        }
        Cmd::Bounds {
            d,
            nu,
            alpha,
            gnorm,
            lambda1,
            measure,
            geometry,
        } => {
            sec.i("d", d);
            sec.f("nu", nu);
            sec.f("alpha", alpha);
            sec.f("gnorm", gnorm);
            sec.f("lambda1", lambda1);
            sec.f("measure", measure);
            sec.s("geometry", geometry);
            "bounds"
        }
        Cmd::Verify {
            target,
            j_max,
            e_max,
            m_max,
            families,
            n_max,
            resolution,
            lambda_max,
        } => {
            sec.s("target", Some(target));
            sec.i("j_max", j_max);
            sec.i("e_max", e_max);
            sec.i("m_max", m_max);
            sec.i("families", families);
            sec.i("n_max", n_max);
            sec.i("resolution", resolution);
            sec.i("lambda_max", lambda_max);
            "verify"
        }
    };
    Overrides {
        command: Some(name.into()),
        seed: cli.seed,
        output_dir: cli.output_dir,
        section: sec.0,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let cfg = match harness::parse_config(text.as_deref(), &overrides(cli)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(harness::exit_code_for(&e) as u8);
        }
    };
    match harness::run(&cfg) {
        Ok(m) => {
            if let Some(err) = &m.error {
                eprintln!("error: {err}");
            }
            println!(
                "{}: {} ({} artifacts in {})",
                m.command,
                if m.pass { "PASS" } else { "FAIL" },
                m.artifacts.len(),
                cfg.output_dir.display()
            );
            ExitCode::from(m.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
