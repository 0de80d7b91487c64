use clap::Parser;
use frontier_lab::commands;
use frontier_lab::config::{Cli, RunConfig};

fn main() {
    let (command, flags) = Cli::parse().command.split();
    let result = RunConfig::from_flags(command, flags).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
