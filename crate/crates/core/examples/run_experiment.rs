//! Runs a shipped experiment config through the library API and writes its
//! report. Usage: `run_experiment [kind] [out_dir]`.

use std::path::PathBuf;

use awplab::experiments::{emit_report, run, ExperimentSpec, Kind};

fn main() -> awplab::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = match args.next().as_deref() {
        None | Some("mogulskii") => Kind::Mogulskii,
        Some(name) => Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == name)
            .ok_or_else(|| awplab::Error::Config(format!("unknown kind {name}")))?,
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out").join(kind.as_str()));
    let result = run(&ExperimentSpec::default_for(kind))?;
    for path in emit_report(&result, &out)? {
        println!("wrote {}", path.display());
    }
    for c in &result.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
