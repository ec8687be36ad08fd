fn main() {
    std::process::exit(fourier_ratio::harness::cli::run(std::env::args_os()));
}
