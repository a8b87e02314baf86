fn main() {
    std::process::exit(realign::cli::run(std::env::args_os()));
}
