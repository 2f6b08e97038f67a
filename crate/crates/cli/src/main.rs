use clap::Parser;

use sgdpaths_cli::args::{Cli, Command};
use sgdpaths_cli::commands;

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => commands::cmd_train(args),
        Command::Simulate(args) => commands::cmd_simulate(args),
        Command::Embed(args) => commands::cmd_embed(args),
        Command::Mds(args) => commands::cmd_mds(args),
        Command::Plot(args) => commands::cmd_plot(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
