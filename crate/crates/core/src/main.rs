use clap::Parser;

fn main() {
    let cli = rbf_bernstein::cli::Cli::parse();
    std::process::exit(rbf_bernstein::cli::run(&cli));
}
