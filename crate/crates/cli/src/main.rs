fn main() {
    std::process::exit(epdyn_cli::run(std::env::args_os()));
}
