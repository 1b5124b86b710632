fn main() {
    std::process::exit(ecd_lab::cli::run());
}
