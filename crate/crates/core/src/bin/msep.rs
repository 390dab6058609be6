use clap::Parser;
use msep::cli::{run_cli, Args};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(run_cli(Args::parse()));
}
