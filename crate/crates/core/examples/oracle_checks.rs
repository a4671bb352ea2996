//! Run the numerical self-checks that the `verify` subcommand runs.
use rectmaxvol::verify::{run_verify, VerifyOptions};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let summary = run_verify(&VerifyOptions { seed, fault: None });
    println!("{summary}");
    if !summary.all_passed() {
        std::process::exit(1);
    }
}
