use clap::Parser;

fn main() {
    let cli = foliage_cli::Cli::parse();
    std::process::exit(foliage_cli::run(&cli));
}
