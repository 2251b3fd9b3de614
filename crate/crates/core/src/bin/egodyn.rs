fn main() {
    std::process::exit(egodyn::cli::main_with_args(std::env::args_os()));
}
