fn main() {
    std::process::exit(arfspin::cli::main_with_args(std::env::args_os()));
}
