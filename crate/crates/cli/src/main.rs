fn main() {
    std::process::exit(treepack_cli::run(std::env::args_os()));
}
