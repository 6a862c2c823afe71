use clap::Parser;
use hyperlip_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(failure) = run(cli, &mut stdout.lock()) {
        eprintln!("{}", failure.render());
        std::process::exit(failure.code);
    }
}
