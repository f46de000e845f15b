fn main() {
    std::process::exit(hhga::run(std::env::args_os()));
}
