fn main() {
    std::process::exit(heunrwe_cli::main_with(std::env::args_os().collect()));
}
