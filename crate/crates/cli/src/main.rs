//! `fracnir`: command-line experiment runner. Each subcommand writes JSON
//! and CSV artifacts to the output directory and prints one
//! PASS/FAIL/INCONCLUSIVE line per check. Exit status is 0 when every check
//! passes, 1 on failed or inconclusive checks and numerical errors, and 2
//! on configuration errors.

mod commands;
mod kspec;
mod opts;
mod output;

use clap::{Parser, Subcommand};
use opts::Opts;
use output::{ConfigError, Output, Status};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(
    name = "fracnir",
    version,
    about = "Fractional conformal operator and Nirenberg-problem experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of P_σ against their closed form and recurrence.
    EigCheck(Opts),
    /// Spectral, singular-integral and Riesz realizations of P_σ on random fields.
    OpXcheck(Opts),
    /// Invariance of the energy and the critical norm under T_φ.
    ConformalCheck(Opts),
    /// Bubble equation residual and critical norm.
    BubbleCheck(Opts),
    /// Antipodal bubble interaction against its limiting constant.
    InteractionScan(Opts),
    /// Subcritical minimization for a prescribed curvature.
    Solve(Opts),
    /// Continuation of minimizers along a schedule of exponents.
    Continue(Opts),
    /// Kazdan–Warner residual of a computed solution.
    KwCheck(Opts),
    /// Two-bubble test-function quotient against its threshold.
    QuotientCheck(Opts),
    /// Improved Sobolev inequality on the centred slice.
    Aubin(Opts),
    /// Sobolev-type inequality with constant a on the centred slice.
    AubinSobolev(Opts),
    /// Moment map G(P,t) over poles and dilations.
    GScan(Opts),
    /// Brouwer degree of G on a sphere in the ball.
    Degree(Opts),
    /// Index count of a list of critical-point models.
    IndexCount(Opts),
    /// Ratios ‖K∘φ − K(P)‖² / |∫K∘φ x| over poles and dilations.
    OmegaScan(Opts),
}

impl Command {
    fn parts(self) -> (&'static str, Opts) {
        use Command::*;
        match self {
            EigCheck(o) => ("eig-check", o),
            OpXcheck(o) => ("op-xcheck", o),
            ConformalCheck(o) => ("conformal-check", o),
            BubbleCheck(o) => ("bubble-check", o),
            InteractionScan(o) => ("interaction-scan", o),
            Solve(o) => ("solve", o),
            Continue(o) => ("continue", o),
            KwCheck(o) => ("kw-check", o),
            QuotientCheck(o) => ("quotient-check", o),
            Aubin(o) => ("aubin", o),
            AubinSobolev(o) => ("aubin-sobolev", o),
            GScan(o) => ("g-scan", o),
            Degree(o) => ("degree", o),
            IndexCount(o) => ("index-count", o),
            OmegaScan(o) => ("omega-scan", o),
        }
    }
}

fn main() -> ExitCode {
    let (name, flags) = Cli::parse().command.parts();
    let opts = match flags.config.clone() {
        Some(path) => match kspec::read_json::<Opts>(&path) {
            Ok(cfg) => flags.overlay(cfg),
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        },
        None => flags,
    };
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let out = match Output::new(&dir, name) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cannot create {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    };
    let start = Instant::now();
    let result = commands::run(name, &opts, &out);
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = out.text(
        ".log",
        &format!(
            "started {stamp} (unix seconds)\nelapsed {:.3} s\n",
            start.elapsed().as_secs_f64()
        ),
    );
    match result {
        Ok(checks) => {
            for c in &checks {
                println!("{}", c.line());
            }
            if checks.iter().all(|c| c.status == Status::Pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            let body = format!("{name} failed\n{e:?}\n");
            match out.text(".diagnostics.txt", &body) {
                Ok(p) => eprintln!("error: {e} (details in {})", p.display()),
                Err(_) => eprintln!("error: {e:?}"),
            }
            ExitCode::from(1)
        }
    }
}
