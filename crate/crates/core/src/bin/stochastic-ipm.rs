fn main() {
    std::process::exit(stochastic_ipm::cli::run(std::env::args_os()));
}
