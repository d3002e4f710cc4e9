use clap::Parser;

fn main() {
    let cli = cropseg::cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(err) = cropseg::cli::run(cli, &mut stdout.lock()) {
        eprintln!("cropseg: {err}");
        std::process::exit(cropseg::cli::exit_code(&err));
    }
}
