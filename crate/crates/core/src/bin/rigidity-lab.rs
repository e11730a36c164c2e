fn main() {
    std::process::exit(rigidity_lab::cli::run(std::env::args_os()));
}
