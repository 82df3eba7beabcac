fn main() {
    std::process::exit(lssd_cli::run(std::env::args_os()));
}
