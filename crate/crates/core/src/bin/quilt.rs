use std::io::Write;

use clap::Parser;

fn main() {
    let cli = quilt::cli::Cli::parse();
    match quilt::cli::run(cli) {
        Ok(Some(text)) => {
            // a closed pipe (`quilt export schema | head`) is not an error
            let _ = writeln!(std::io::stdout(), "{}", text.trim_end());
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(quilt::cli::exit_code(&e));
        }
    }
}
