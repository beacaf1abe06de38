fn main() {
    std::process::exit(gaussref::cli::run(std::env::args_os()));
}
