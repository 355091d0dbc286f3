fn main() {
    std::process::exit(aoi_cli::main_with(std::env::args_os()));
}
