//! Command-line front end: build, verify and serialize p-adic dynamical
//! systems. JSON in, JSON out; see `--help` for the command list and the
//! exit-code contract.

mod jobs;
mod parse;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(jobs::run(&args));
}
