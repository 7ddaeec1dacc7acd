fn main() {
    std::process::exit(root_ident::cli::run());
}
