use clap::Parser;

fn main() {
    let cli = gaudin_kp::cli::Cli::parse();
    std::process::exit(gaudin_kp::cli::run(&cli));
}
