use std::process::exit;

fn main() {
    exit(qclust::cli::run(std::env::args_os()));
}
