fn main() {
    std::process::exit(hodge_virasoro::cli::run(std::env::args_os()));
}
