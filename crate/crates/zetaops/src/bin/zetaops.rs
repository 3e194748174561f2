fn main() {
    std::process::exit(zetaops::cli::main_entry());
}
