fn main() {
    std::process::exit(measure_duality::cli::main());
}
