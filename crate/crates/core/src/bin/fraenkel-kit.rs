use std::io::Write;

fn main() {
    let out = fraenkel_core::cli::run_command(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.report.as_bytes());
    let _ = stdout.flush();
    std::process::exit(out.code);
}
