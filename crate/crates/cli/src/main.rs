use clap::Parser;
use topokit_cli::{exit, run, Cli};

/// Caps the worker pool when `TOPOKIT_THREADS` is set.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("TOPOKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or(format!("TOPOKIT_THREADS must be a positive integer, got {v:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("topokit: {msg}");
        std::process::exit(exit::PARSE);
    }
    match run(&cli) {
        Ok(summary) => println!("{summary}"),
        Err(e) => {
            eprintln!("topokit: {e}");
            std::process::exit(e.code);
        }
    }
}
