fn main() { std::process::exit(csrk::cli::main()); }
