fn main() {
    std::process::exit(qdlab::run(std::env::args_os()));
}
