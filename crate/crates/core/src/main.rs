fn main() {
    std::process::exit(rankcurve::cli::run_from(std::env::args_os()));
}
