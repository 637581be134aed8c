use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "onm", version, about = "Online Newton benchmark: experiments, property suites and regret bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo experiment and write regret, trajectory and summary files.
    Run(RunArgs),
    /// Run the randomized property suites.
    Verify(VerifyArgs),
    /// Evaluate both regret bounds from explicit constants or from a config.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "onm-out")]
    pub out: PathBuf,
    /// Overrides the config's replication count.
    #[arg(long)]
    pub replications: Option<usize>,
    /// Worker threads; 0 picks one per core, 1 runs serially.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// lemma1, lemma2, lemma3, lemma4, derivatives, newton or all.
    /// Overrides the config's suite.
    pub suite: Option<String>,
    /// Verify config (JSON): `{"suite": ..., "settings": {...}}`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the suite seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for `verify.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Estimate the constants from one replication of this experiment config.
    #[arg(long, conflicts_with_all = ["h", "hessian_lipschitz", "value_lipschitz", "beta"])]
    pub config: Option<PathBuf>,
    /// Replication used with `--config`.
    #[arg(long, default_value_t = 0, requires = "config")]
    pub index: usize,
    /// Overrides the config's master seed.
    #[arg(long, requires = "config")]
    pub seed: Option<u64>,

    /// Smallest Hessian singular value at the optima.
    #[arg(long = "h")]
    pub h: Option<f64>,
    /// Hessian Lipschitz constant `L`.
    #[arg(long, visible_alias = "L")]
    pub hessian_lipschitz: Option<f64>,
    /// Loss Lipschitz constant `ell`.
    #[arg(long, visible_alias = "ell")]
    pub value_lipschitz: Option<f64>,
    /// Radius on which `L` holds; the basin radius is `min(beta, 2h/3L)`.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Largest per-round optimum displacement `v_bar`.
    #[arg(long, visible_alias = "v-bar", default_value_t = 0.0)]
    pub max_step: f64,
    /// Bound `V_bar` on the total optimum displacement.
    #[arg(long, visible_alias = "V-bar", default_value_t = 0.0)]
    pub max_total: f64,
    /// Initial error `||x_0 - x_0*||`.
    #[arg(long, default_value_t = 0.0)]
    pub e0: f64,
    /// Final error; defaults to `e0`.
    #[arg(long)]
    pub e_final: Option<f64>,
    /// Realized total variation `V_T`; defaults to `V_bar`.
    #[arg(long, visible_alias = "V-T")]
    pub variation: Option<f64>,

    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}
