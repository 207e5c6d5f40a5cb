use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    match confound_cli::run(std::env::args_os()) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(report.stdout.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(confound_cli::exit::INPUT as u8);
            }
            ExitCode::from(report.code as u8)
        }
        Err(e) => {
            eprintln!("confound: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
