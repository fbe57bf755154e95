use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use tennisball::commands;
use tennisball::config::{Cli, RunConfig};
use tennisball::report;
use tennisball::runner::Runner;

const INVARIANT_VIOLATION: u8 = 1;
const CONFIG_ERROR: u8 = 2;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("tbl: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(&cli.common) {
        Ok(c) => c,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    let runner = match Runner::new(cfg.threads) {
        Ok(r) => r,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    let start = Instant::now();
    let outcome = match commands::run(&cli.command, &cfg, &runner) {
        Ok(o) => o,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    let name = cli.command.name();
    let summary = report::summary(name, &cfg, &outcome);
    let written = match &cfg.output {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            report::write(cfg.format, &mut w, &outcome.records, &summary)?;
            w.flush()
        }),
        None => {
            let mut w = io::stdout().lock();
            report::write(cfg.format, &mut w, &outcome.records, &summary).and_then(|()| w.flush())
        }
    };
    if let Err(e) = written {
        return fail(CONFIG_ERROR, format!("cannot write report: {e}"));
    }
    eprintln!("tbl {name}: {:.3} s on {} threads", start.elapsed().as_secs_f64(), runner.threads());
    let mut code = ExitCode::SUCCESS;
    for c in outcome.failures() {
        eprintln!("tbl: invariant violated: {} ({}): {}", c.name, c.lemma, c.detail);
        code = ExitCode::from(INVARIANT_VIOLATION);
    }
    code
}
