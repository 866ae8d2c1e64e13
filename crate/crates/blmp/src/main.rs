fn main() {
    std::process::exit(blmp::cli_main());
}
