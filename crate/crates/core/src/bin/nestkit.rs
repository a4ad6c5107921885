use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = nestkit::cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(result.report.as_bytes());
    let _ = stdout.flush();
    eprint!("{}", result.diagnostics);
    ExitCode::from(result.code as u8)
}
