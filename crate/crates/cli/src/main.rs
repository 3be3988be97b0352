fn main() {
    std::process::exit(xychain_cli::run(std::env::args_os()));
}
