use clap::Parser;

fn main() {
    let cli = pearcey_cli::Cli::parse();
    let code = pearcey_cli::run(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
