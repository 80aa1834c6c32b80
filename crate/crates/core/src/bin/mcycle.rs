use std::io::Write;

fn main() {
    let (code, out) = mcycle::cli::run(std::env::args_os());
    // a closed pipe is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", out.trim_end());
    std::process::exit(code);
}
