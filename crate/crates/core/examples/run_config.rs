//! Drives the harness from a TOML string, as the `nsvlab` binary does,
//! and prints the resulting manifest.
//!
//! ```bash
//! cargo run --release --example run_config
//! ```

use nsvlab::harness::{parse_config, run, Overrides};

const CONFIG: &str = r#"
command = "verify"
seed = 42
formats = ["json"]

[verify]
target = "rho-l2"
families = 12
n_max = 4
resolution = 16
"#;

fn main() -> nsvlab::Result<()> {
    let dir = std::env::temp_dir().join("nsvlab-run-config-example");
    let overrides = Overrides {
        output_dir: Some(dir),
        ..Overrides::default()
    };
    let cfg = parse_config(Some(CONFIG), &overrides)?;
    println!("{}", cfg.to_toml());
    let manifest = run(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    std::process::exit(manifest.exit_code());
}
