fn main() {
    std::process::exit(neurofield::cli::run(std::env::args_os()));
}
