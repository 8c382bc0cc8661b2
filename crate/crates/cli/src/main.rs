fn main() {
    std::process::exit(fracsim_cli::run(std::env::args().collect()));
}
