fn main() {
    std::process::exit(supplynet::cli::run(std::env::args_os()));
}
