use clap::Parser;

use quasimetric::cli::{run, write_report, Cli, Status};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let json = serde_json::to_string_pretty(&outcome.report).expect("JSON values always serialize");

    if outcome.status == Status::Usage {
        eprintln!("{}", outcome.summary);
        std::process::exit(outcome.status.code());
    }
    if let Some(path) = &cli.out {
        if let Err(e) = write_report(path, &outcome.report) {
            eprintln!("error: {}: {e}", path.display());
            std::process::exit(Status::Usage.code());
        }
    }
    if cli.out.is_none() || cli.json {
        println!("{json}");
        eprintln!("{}", outcome.summary);
    } else {
        println!("{}", outcome.summary);
    }
    std::process::exit(outcome.status.code());
}
