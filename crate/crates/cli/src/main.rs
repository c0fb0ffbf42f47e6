fn main() {
    let code = veriodd_cli::commands::main_with_args(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
