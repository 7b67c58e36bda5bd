fn main() {
    std::process::exit(lln::cli::run(std::env::args_os()));
}
