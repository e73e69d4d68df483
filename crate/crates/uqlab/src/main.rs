//! Thin command-line front end over [`uqlab::run_experiment`].

fn usage() -> String {
    let mut text = String::from(
        "Usage: uqlab --use-case <name> [--seed N] [--out-dir DIR] [--config FILE] [--key value ...]\n\
         \n\
         Runs one uncertainty-quantification experiment and writes its artifacts\n\
         (<use-case>-<seed>.csv, .config, .summary) into the output directory.\n\
         \n\
         Use cases:\n",
    );
    let blurb = |uc: uqlab::UseCase| match uc {
        uqlab::UseCase::RegressionBaseline => "mean-only fit of the noisy sine task",
        uqlab::UseCase::RegressionEnsemble => "deep ensemble with aleatoric/epistemic bands",
        uqlab::UseCase::BnnSample => "curves drawn from a stochastic-weight network",
        uqlab::UseCase::BnnScaling => "Monte-Carlo prediction cost across network sizes",
        uqlab::UseCase::Decompose => "checks on the variance decomposition itself",
        uqlab::UseCase::OodRegression => "ensemble confronted with out-of-range inputs",
        uqlab::UseCase::OodClassify => "entropy-based OOD detection for a classifier",
    };
    for uc in uqlab::UseCase::ALL {
        text.push_str(&format!("  {:<21} {}\n", uc.id(), blurb(uc)));
    }
    text.push_str(&format!(
        "\nEvery configuration key is also a flag (--epochs 50, --mc-samples 200, ...);\n\
         flags win over the --config file, and {} overrides\n\
         the bench_budget_seconds key. A run's .config echo can be passed back via\n\
         --config to reproduce it exactly.\n",
        uqlab::BENCH_BUDGET_ENV_VAR
    ));
    text
}

fn main() -> std::process::ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        eprint!("{}", usage());
        return std::process::ExitCode::from(2);
    }
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{}", usage());
        return std::process::ExitCode::SUCCESS;
    }
    match uqlab::config_from_args(&args).and_then(|cfg| uqlab::run_experiment(&cfg)) {
        Ok(artifacts) => {
            println!("wrote {}", artifacts.csv_path.display());
            for path in &artifacts.extra_csv_paths {
                println!("wrote {}", path.display());
            }
            println!("wrote {}", artifacts.config_path.display());
            println!("wrote {}", artifacts.summary_path.display());
            std::process::ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::ExitCode::from(err.exit_code() as u8)
        }
    }
}
