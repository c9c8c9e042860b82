fn main() {
    std::process::exit(nfvplace::experiment::main());
}
