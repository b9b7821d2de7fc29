use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use rarz::Scheme;

use crate::commands;
use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "rarz", version, about = "Traffic-flow experiments with velocity and density constraints")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fundamental diagrams of the three closures
    Fd(RunArgs),
    /// Exact Riemann solution at t_end
    Riemann(RunArgs),
    /// One-dimensional Riemann problem with the finite-volume schemes
    Sim1d(RunArgs),
    /// Four-quadrant problem on the plane
    Sim2d(RunArgs),
    /// Follow-the-leader platoon
    Micro(RunArgs),
    /// Two schemes on the same data
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    scheme: Option<Scheme>,
}

fn execute(command: Command, args: RunArgs) -> Result<String, CliError> {
    let mut config = ExperimentConfig::load(&args.config, command)?;
    if let Some(n) = args.resolution {
        config = config.with_resolution(n)?;
    }
    if let Some(s) = args.scheme {
        config = config.with_scheme(s);
    }
    Ok(commands::run(&config, &args.out)?.render())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 I/O, 2 usage or config, 3 numerical.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, args) = match cli.command {
        Cmd::Fd(a) => (Command::Fd, a),
        Cmd::Riemann(a) => (Command::Riemann, a),
        Cmd::Sim1d(a) => (Command::Sim1d, a),
        Cmd::Sim2d(a) => (Command::Sim2d, a),
        Cmd::Micro(a) => (Command::Micro, a),
        Cmd::Compare(a) => (Command::Compare, a),
    };
    match execute(command, args) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("rarz: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::{parse_metrics, read_file};

    fn write_config(dir: &std::path::Path, text: &str) -> PathBuf {
        let path = dir.join("case.toml");
        std::fs::write(&path, text).unwrap();
        path
    }

    const TEST4: &str = "[run]\nt_end = 0.02\nresolution = 50\n[riemann]\nrho_left = 0.8\nu_left = 15.0\nrho_right = 0.7\nu_right = 15.0\n";

    fn exit(args: &[&std::ffi::OsStr]) -> i32 {
        run_cli(std::iter::once(std::ffi::OsStr::new("rarz")).chain(args.iter().copied()))
    }

    #[test]
    fn successful_run_writes_metrics() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), TEST4);
        let out = tmp.path().join("out");
        let code = exit(&["compare".as_ref(), "--config".as_ref(), cfg.as_os_str(), "--out".as_ref(), out.as_os_str()]);
        assert_eq!(code, 0);
        let metrics = parse_metrics(&read_file(&out.join("metrics.txt")).unwrap()).unwrap();
        assert_eq!(metrics["command"], "compare");
        assert!(metrics.contains_key("hybrid_rarz.l1_rho"));
    }

    #[test]
    fn bad_config_exits_with_two() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), &TEST4.replace("u_left = 15.0", "u_left = 40.0"));
        let out = tmp.path().join("out");
        let code = exit(&["sim1d".as_ref(), "--config".as_ref(), cfg.as_os_str(), "--out".as_ref(), out.as_os_str()]);
        assert_eq!(code, 2);
        let missing = tmp.path().join("missing.toml");
        assert_eq!(exit(&["sim1d".as_ref(), "--config".as_ref(), missing.as_os_str()]), 2);
    }

    #[test]
    fn unknown_flags_exit_with_two() {
        assert_eq!(exit(&["sim1d".as_ref(), "--bogus".as_ref()]), 2);
        assert_eq!(exit(&["teleport".as_ref()]), 2);
    }

    #[test]
    fn numerical_failure_exits_with_three() {
        // the comparison closure leaves the constrained state space here
        let tmp = tempfile::tempdir().unwrap();
        let text = "[params]\nrho_star = 1.0\nu_star = 25.0\ngamma = 2.0\n[run]\nmodel = \"mar\"\nt_end = 0.05\nresolution = 40\n[riemann]\nrho_left = 1.5\nu_left = 20.0\nrho_right = 0.8\nu_right = 16.0\n";
        let cfg = write_config(tmp.path(), text);
        let out = tmp.path().join("out");
        let code = exit(&["sim1d".as_ref(), "--config".as_ref(), cfg.as_os_str(), "--out".as_ref(), out.as_os_str()]);
        assert_eq!(code, 3);
    }

    #[test]
    fn scheme_flag_overrides_config() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), TEST4);
        let out = tmp.path().join("out");
        let args = ["sim1d".as_ref(), "--config".as_ref(), cfg.as_os_str(), "--out".as_ref(), out.as_os_str(), "--scheme".as_ref(), "hll".as_ref(), "--resolution".as_ref(), "30".as_ref()];
        assert_eq!(exit(&args), 0);
        let metrics = parse_metrics(&read_file(&out.join("metrics.txt")).unwrap()).unwrap();
        assert_eq!(metrics["resolution"], "30");
        assert!(metrics.contains_key("hll_rarz.steps"));
        assert!(!metrics.contains_key("godunov_rarz.steps"));
    }
}
