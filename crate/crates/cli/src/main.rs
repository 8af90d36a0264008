use std::process::ExitCode;

fn main() -> ExitCode {
    let mut out = std::io::stdout();
    match outlift_cli::run(std::env::args_os(), &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(outlift_cli::EXIT_BAD_INPUT as u8)
        }
    }
}
