fn main() {
    std::process::exit(qsw_cli::main_with_args(std::env::args_os()));
}
