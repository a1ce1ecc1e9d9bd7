#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::{read_config, Format, Knobs};
use tunnelsplit::{Error, ExecPolicy, Result, Table};

#[derive(Debug, Parser)]
#[command(name = "tunnelsplit", version, about = "Subprocess decomposition of 1D scattering and two-slit fields")]
struct Cli {
    /// TOML file; its values override the corresponding flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "TUNNELSPLIT_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Omit the timestamp comment line from CSV output.
    #[arg(long, global = true)]
    no_header_meta: bool,
    /// Also write a gnuplot script next to each CSV file.
    #[arg(long, global = true)]
    gnuplot: bool,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission, reflection and splitting amplitudes at one energy or over an energy sweep.
    Stationary(Knobs),
    /// Profiles of the transmission and reflection channel wavefunctions.
    Subprocess(Knobs),
    /// Subprocess and conventional dwell times at one energy.
    Dwell(Knobs),
    /// Dwell times over a width, gap or kappa0 sweep.
    Hartman(Knobs),
    /// Time-dependent packet norms and expectation values.
    Packet(Knobs),
    /// Two-slit field and its midplane decomposition.
    Twoslit(Knobs),
}

pub struct Output {
    dir: PathBuf,
    format: Format,
    meta: bool,
    gnuplot: bool,
    pub policy: ExecPolicy,
}

impl Output {
    /// Writes `table` as `<name>.csv` or `<name>.json` and prints the path.
    pub fn emit(&self, name: &str, table: &Table) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = self.dir.join(format!("{name}.{ext}"));
        let mut file = BufWriter::new(File::create(&path)?);
        match self.format {
            Format::Csv => table.write_csv(&mut file, self.meta)?,
            Format::Json => table.write_json(&mut file)?,
        }
        file.flush()?;
        if self.gnuplot && self.format == Format::Csv {
            write_gnuplot(&self.dir, name, table)?;
        }
        println!("{}", path.display());
        Ok(())
    }
}

fn write_gnuplot(dir: &Path, name: &str, table: &Table) -> Result<()> {
    let mut f = BufWriter::new(File::create(dir.join(format!("{name}.gp")))?);
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set key autotitle columnhead")?;
    writeln!(f, "set xlabel '{}'", table.columns[0].name)?;
    writeln!(f, "plot for [i=2:{}] '{name}.csv' using 1:i with lines", table.columns.len())?;
    f.flush()?;
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        e if e.is_config() => 2,
        _ => 3,
    }
}

type Handler = fn(&Knobs, &Output) -> Result<()>;

fn run(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref().map(read_config).transpose()?.unwrap_or_default();
    let out = &file.output;
    let output = Output {
        dir: out.out_dir.clone().unwrap_or(cli.out_dir),
        format: out.format.unwrap_or(cli.format),
        meta: !out.no_header_meta.unwrap_or(cli.no_header_meta),
        gnuplot: out.gnuplot.unwrap_or(cli.gnuplot),
        policy: if out.sequential.unwrap_or(cli.sequential) {
            ExecPolicy::Sequential
        } else {
            ExecPolicy::Parallel
        },
    };
    let (run, mut knobs): (Handler, Knobs) = match cli.command {
        Command::Stationary(k) => (commands::stationary, k),
        Command::Subprocess(k) => (commands::subprocess, k),
        Command::Dwell(k) => (commands::dwell, k),
        Command::Hartman(k) => (commands::hartman, k),
        Command::Packet(k) => (commands::packet, k),
        Command::Twoslit(k) => (commands::twoslit, k),
    };
    knobs.overlay(&file.knobs);
    run(&knobs, &output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
