fn main() {
    std::process::exit(decigibbs::run(std::env::args_os().collect()));
}
