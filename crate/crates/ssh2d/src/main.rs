fn main() {
    std::process::exit(ssh2d::cli::run(std::env::args_os()));
}
