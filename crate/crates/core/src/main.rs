fn main() {
    std::process::exit(quadtomo::cli::main_with_args(std::env::args_os()));
}
