fn main() {
    std::process::exit(localfeat_cli::dispatch(std::env::args_os()));
}
