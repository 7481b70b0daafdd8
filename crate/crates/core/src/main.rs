fn main() {
    std::process::exit(svgstein::cli::main_exit_code());
}
