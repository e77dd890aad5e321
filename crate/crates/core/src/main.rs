fn main() {
    std::process::exit(dkwaves::cli::run(std::env::args()));
}
