fn main() {
    std::process::exit(mfsec::cli::main_with(std::env::args_os()));
}
