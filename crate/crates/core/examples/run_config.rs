//! Drive the same configuration pipeline as the `timeleak` binary from code.
//!
//! Run: cargo run --release --example run_config -- [config] [out_dir] [key=value ...]

use std::path::PathBuf;

use timeleak::config::parse_config;
use timeleak::run::run;

fn main() -> timeleak::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| [env!("CARGO_MANIFEST_DIR"), "examples", "configs", "width_sweep.cfg"].iter().collect());
    let out = args.next().map_or_else(|| std::env::temp_dir().join("timeleak-run"), PathBuf::from);
    let overrides: Vec<(String, String)> = args
        .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect();

    let cfg = parse_config(&std::fs::read_to_string(&config)?, &overrides)?;
    println!("{} with {} resolved keys", cfg.subcommand, cfg.resolved.len());
    for path in run(&cfg, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
