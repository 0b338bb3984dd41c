fn main() {
    std::process::exit(qclab::explorer::run_cli(std::env::args_os()));
}
