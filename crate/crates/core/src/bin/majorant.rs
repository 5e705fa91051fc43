fn main() {
    std::process::exit(majorant::cli::run(std::env::args_os()));
}
