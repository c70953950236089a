use clap::Parser;
use oag::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("OAG_LOG")).init();
    let cli = Cli::parse();
    let (code, out, err) = run(&cli);
    print!("{out}");
    eprint!("{err}");
    std::process::exit(code);
}
