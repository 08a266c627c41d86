use clap::Parser;
use heisenfan::cli::{exit_code, run, Cli};
use heisenfan::Error;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = cli.resolve().and_then(|cfg| run(&cfg, cli.threads, cli.emit_plots_data));
    match &result {
        Ok(r) => {
            for v in &r.verdicts {
                println!("{} {} statistic={:.6e} threshold={:.6e}", if v.pass { "PASS" } else { "FAIL" }, v.test, v.statistic, v.threshold);
            }
            for s in &r.skipped {
                println!("SKIP {s}");
            }
            println!("output: {}", r.dir.display());
        }
        Err(Error::Config(m)) => eprintln!("invalid configuration: {m}"),
        Err(e) => eprintln!("error: {e}"),
    }
    std::process::exit(exit_code(&result));
}
