fn main() {
    std::process::exit(sesim_cli::run(std::env::args_os()));
}
