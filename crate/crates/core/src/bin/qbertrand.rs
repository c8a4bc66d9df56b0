fn main() {
    std::process::exit(quantum_bertrand::cli::run(std::env::args_os()));
}
