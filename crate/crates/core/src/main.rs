fn main() {
    std::process::exit(optomech::cli::main_exit_code());
}
