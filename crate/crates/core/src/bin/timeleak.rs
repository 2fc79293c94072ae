use std::path::PathBuf;
use std::process::ExitCode;

use timeleak::config::parse_config;
use timeleak::run::run;

const USAGE: &str = "usage: timeleak <sweep|simulate|compensate|figure> [--config <path>] [--key value ...] --out <dir>";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "-h" || args[0] == "--help" {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    }

    let mut overrides = vec![("subcommand".to_string(), args[0].clone())];
    let mut config_path: Option<PathBuf> = None;
    let mut out: Option<PathBuf> = None;
    let mut rest = args[1..].iter();
    while let Some(flag) = rest.next() {
        let Some(key) = flag.strip_prefix("--") else {
            eprintln!("unexpected argument `{flag}`\n{USAGE}");
            return ExitCode::from(2);
        };
        let Some(value) = rest.next() else {
            eprintln!("flag `{flag}` needs a value\n{USAGE}");
            return ExitCode::from(2);
        };
        match key {
            "config" => config_path = Some(value.into()),
            "out" => out = Some(value.into()),
            _ => overrides.push((key.to_string(), value.clone())),
        }
    }
    let Some(out) = out else {
        eprintln!("missing --out\n{USAGE}");
        return ExitCode::from(2);
    };

    let text = match &config_path {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::FAILURE;
            }
        },
        None => String::new(),
    };

    let result = parse_config(&text, &overrides).and_then(|cfg| run(&cfg, &out));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
