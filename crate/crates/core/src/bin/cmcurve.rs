fn main() {
    std::process::exit(cmcurve::cli::main_with_args(std::env::args_os()));
}
