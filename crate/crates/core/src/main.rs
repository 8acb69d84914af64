use clap::Parser;

fn main() {
    let args = widomlab::cli::Args::parse();
    std::process::exit(widomlab::cli::execute(&args));
}
