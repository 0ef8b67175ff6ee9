use clap::Parser;

fn main() {
    let cli = cllr::Cli::parse();
    if let Err(e) = cllr::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
