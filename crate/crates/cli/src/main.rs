use clap::Parser;

fn main() {
    let cli = spinfisher_cli::Cli::parse();
    match spinfisher_cli::run(&cli) {
        Ok(_) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
