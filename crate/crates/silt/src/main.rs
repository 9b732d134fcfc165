fn main() { std::process::exit(silt::cli::run_cli(std::env::args().skip(1).collect())) }
