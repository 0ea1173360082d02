fn main() {
    std::process::exit(qdyn_cli::run(std::env::args_os()));
}
