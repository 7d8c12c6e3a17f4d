fn main() {
    std::process::exit(namebench::commands::run(std::env::args_os()));
}
