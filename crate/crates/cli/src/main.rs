fn main() {
    std::process::exit(opgeom_cli::run_command(std::env::args_os()));
}
