use qmetro_cli::{run, CliError};

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            std::process::exit(2);
        }
        Err(err @ CliError::Numerical(_)) => {
            eprintln!("{err}");
            std::process::exit(3);
        }
    }
}
