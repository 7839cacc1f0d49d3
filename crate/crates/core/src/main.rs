fn main() {
    let code = potentialist::cli::run(std::env::args_os());
    std::process::exit(code);
}
