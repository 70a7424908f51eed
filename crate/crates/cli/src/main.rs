use clap::Parser;

fn main() {
    let cli = birkhoff_cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = birkhoff_cli::run(&cli, &mut stdout.lock()) {
        eprintln!("birkhoff: {e}");
        std::process::exit(e.exit_code());
    }
}
