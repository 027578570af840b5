fn main() {
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    let code = folim::cli::run(std::env::args_os(), &mut input, &mut out, &mut err);
    std::process::exit(code);
}
