fn main() {
    std::process::exit(gnmf::cli::main_with_args(std::env::args_os()));
}
