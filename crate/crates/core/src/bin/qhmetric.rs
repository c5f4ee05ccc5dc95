use clap::Parser;
use qhmetric::cli::{main_with_args, Args};

fn main() {
    std::process::exit(main_with_args(Args::parse()));
}
