fn main() {
    std::process::exit(decay_lab::cli::main_with(std::env::args_os()));
}
