fn main() {
    std::process::exit(bmtk_cli::run(std::env::args_os()));
}
