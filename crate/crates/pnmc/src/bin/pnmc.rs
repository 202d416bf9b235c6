fn main() {
    std::process::exit(pnmc::run(std::env::args_os()));
}
