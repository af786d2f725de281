fn main() {
    std::process::exit(spellbench::cli::run(std::env::args_os()));
}
