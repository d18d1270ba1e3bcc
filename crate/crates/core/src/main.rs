fn main() {
    std::process::exit(rbgame::cli::run(std::env::args_os()));
}
