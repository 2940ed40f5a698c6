fn main() {
    std::process::exit(dampwave_cli::dispatch(std::env::args_os()));
}
