fn main() {
    let dir = navtest_cli::config_dir();
    let code = navtest_cli::run(std::env::args_os(), &dir, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
