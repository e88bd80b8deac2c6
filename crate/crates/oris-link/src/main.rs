fn main() {
    std::process::exit(oris_link::cli::run(std::env::args_os()));
}
