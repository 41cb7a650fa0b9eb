//! `vbx`: command-line front end.

mod args;
mod commands;
mod failure;
mod inputs;
mod report;

use args::{Cli, Command};
use clap::Parser;
use commands::Ctx;
use failure::Failure;
use report::{Report, Settings};
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

fn command_name(c: &Command) -> (&'static str, &str) {
    match c {
        Command::Check(s) => ("check", &s.system),
        Command::Linearize(s) => ("linearize", &s.system),
        Command::Invariants(s) => ("invariants", &s.system),
        Command::Transform(a) => ("transform", &a.sys.system),
        Command::Indices(a) => ("indices", &a.sys.system),
        Command::Adjoint(s) => ("adjoint", &s.system),
        Command::Coframe(a) => ("coframe", &a.sys.system),
        Command::Conslaw(a) => ("conslaw", &a.sys.system),
        Command::Verify(a) => ("verify", &a.sys.system),
        Command::Darboux(a) => ("darboux", &a.sys.system),
        Command::Generate(a) => ("generate", &a.sys.system),
        Command::Classify(s) => ("classify", &s.system),
    }
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut seed = cli.common.seed;
    if let Ok(v) = std::env::var("VBX_SEED") {
        seed = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("VBX_SEED={v:?} is not an unsigned integer")))?;
    }
    if !(cli.common.tol.is_finite() && cli.common.tol > 0.0) {
        return Err(Failure::Input(format!(
            "--tol must be positive, got {}",
            cli.common.tol
        )));
    }
    if cli.common.samples == 0 {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    Ok(Settings {
        seed,
        tol: cli.common.tol,
        samples: cli.common.samples,
        json: cli.common.json,
    })
}

fn dispatch(cli: &Cli, s: &Settings, r: &mut Report) -> Result<(), Failure> {
    let c = &cli.common;
    let load = |system: &str| Ctx::load(system, s, &c.mu, c.budget);
    match &cli.command {
        Command::Check(a) => commands::check(&load(&a.system)?, r),
        Command::Linearize(a) => commands::linearize_cmd(&load(&a.system)?, r),
        Command::Invariants(a) => commands::invariants(&load(&a.system)?, r),
        Command::Transform(a) => {
            if a.times == 0 {
                return Err(Failure::Input("--times must be at least 1".into()));
            }
            commands::transform(&load(&a.sys.system)?, a, r)
        }
        Command::Indices(a) => commands::indices(&load(&a.sys.system)?, a, r),
        Command::Adjoint(a) => commands::adjoint(&load(&a.system)?, r),
        Command::Coframe(a) => {
            if a.order == 0 {
                return Err(Failure::Input("--order must be at least 1".into()));
            }
            commands::coframe(&load(&a.sys.system)?, a, r)
        }
        Command::Conslaw(a) => commands::conslaw(&load(&a.sys.system)?, a, r),
        Command::Verify(a) => commands::verify(&load(&a.sys.system)?, a, r),
        Command::Darboux(a) => commands::darboux(&load(&a.sys.system)?, a, r),
        Command::Generate(a) => commands::generate(&load(&a.sys.system)?, a, r),
        Command::Classify(a) => commands::classify(&a.system, s, r),
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, input) = command_name(&cli.command);
    let s = match settings(&cli) {
        Ok(s) => s,
        Err(Failure::Input(msg)) | Err(Failure::Computation { message: msg, .. }) => {
            eprintln!("vbx: error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut r = Report::new(name, input);
    match dispatch(&cli, &s, &mut r) {
        Ok(()) => {
            emit(&r.render(&s));
            ExitCode::from(if r.pass() { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("vbx: error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Computation { kind, message }) => {
            r.fail();
            r.set("error", json!({"kind": kind, "message": message}));
            emit(&r.render(&s));
            eprintln!("vbx: {kind}: {message}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        let msg = info
            .payload()
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| info.payload().downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown failure".into());
        eprintln!("vbx: internal error: {msg}");
    }));
    match std::panic::catch_unwind(run) {
        Ok(code) => code,
        Err(_) => ExitCode::from(1),
    }
}
