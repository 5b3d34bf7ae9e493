fn main() {
    std::process::exit(ptssh_cli::main_with_args(std::env::args_os()));
}
