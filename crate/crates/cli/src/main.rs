use std::io;

use clap::Parser;
use strnim_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let code = run(cli, stdin.lock(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code as i32);
}
