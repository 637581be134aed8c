//! Command-line front end: experiment runs with CSV/JSON outputs, the
//! property suites and the bound calculator.

mod args;
mod bounds;
mod error;
mod run;
mod verify;

pub use args::{BoundsArgs, Cli, Command, RunArgs, VerifyArgs};
pub use bounds::{bounds_digest, cmd_bounds, BoundInputs, BoundsReport};
pub use error::CliError;
pub use run::{
    cmd_run, load_config, regret_csv, run_digest, summary_json, trajectory_csv, RunManifest, RunOutputs,
    MANIFEST_FILE, REGRET_FILE, SUMMARY_FILE, TRAJECTORY_FILE,
};
pub use verify::{cmd_verify, verify_digest, verify_outcome, verify_plan, VERIFY_FILE};

/// Runs one parsed command, printing its report to stdout.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => {
            let outputs = cmd_run(args)?;
            print!("{}", run_digest(&outputs));
            Ok(())
        }
        Command::Verify(args) => {
            let report = cmd_verify(args)?;
            print!("{}", verify_digest(&report));
            verify_outcome(&report)
        }
        Command::Bounds(args) => {
            let report = cmd_bounds(args)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", bounds_digest(&report));
            }
            report.outcome()
        }
    }
}
