fn main() {
    std::process::exit(finmok::cli::run(std::env::args_os()));
}
