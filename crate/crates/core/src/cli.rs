//! The `tfs` command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::fstruct::FeatureStructure;
use crate::interp::{self, FiniteInterpretation};
use crate::morph::{self, MorphAutomaton};
use crate::resolve;
use crate::signature::Signature;
use crate::unify;

/// Process exit status: 0 success/sat/true, 1 unsat/false/failed check,
/// 2 usage or input error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitStatus(pub u8);

impl ExitStatus {
    pub const SUCCESS: ExitStatus = ExitStatus(0);
    pub const FAILURE: ExitStatus = ExitStatus(1);
    pub const ERROR: ExitStatus = ExitStatus(2);

    pub fn code(self) -> i32 {
        self.0 as i32
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::SUCCESS
        } else {
            Self::FAILURE
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tfs",
    version,
    about = "Typed feature structure satisfiability toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a signature and print a summary
    CheckSig { sig: PathBuf },
    /// Print every resolvant of a feature structure
    Resolve {
        /// Use generate-and-test instead of the propagating search
        #[arg(long)]
        naive: bool,
        sig: PathBuf,
        fs: PathBuf,
    },
    /// Decide satisfiability
    Sat { sig: PathBuf, fs: PathBuf },
    /// Print a morph witnessing satisfiability
    Witness {
        /// Also print the finite model induced by the morph
        #[arg(long)]
        model: bool,
        sig: PathBuf,
        fs: PathBuf,
    },
    /// Check that a machine file is a morph
    CheckMorph { sig: PathBuf, morph: PathBuf },
    /// Unify two feature structures root-to-root
    Unify {
        sig: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Decide whether a feature structure is true of an object
    Truth {
        sig: PathBuf,
        interp: PathBuf,
        object: String,
        fs: PathBuf,
    },
}

#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<ExitStatus, Failure>;

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() {
                ExitStatus::ERROR
            } else {
                ExitStatus::SUCCESS
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return status;
        }
    };

    let mut buf = String::new();
    let result = dispatch(cli.command, &mut buf);
    let _ = out.write_all(buf.as_bytes());
    match result {
        Ok(status) => status,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            ExitStatus::ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut String) -> CmdResult {
    match command {
        Command::CheckSig { sig } => check_sig(&sig, out),
        Command::Resolve { naive, sig, fs } => resolve_cmd(&sig, &fs, naive, out),
        Command::Sat { sig, fs } => sat_cmd(&sig, &fs, out),
        Command::Witness { model, sig, fs } => witness_cmd(&sig, &fs, model, out),
        Command::CheckMorph { sig, morph } => check_morph_cmd(&sig, &morph, out),
        Command::Unify { sig, a, b } => unify_cmd(&sig, &a, &b, out),
        Command::Truth {
            sig,
            interp,
            object,
            fs,
        } => truth_cmd(&sig, &interp, &object, &fs, out),
    }
}

fn read(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &FsPath, r: crate::error::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_sig(path: &FsPath) -> Result<Signature, Failure> {
    let sig = in_file(path, Signature::parse(&read(path)?))?;
    if let Some(e) = sig.rationality_violation() {
        return Err(Failure(format!("{}: {e}", path.display())));
    }
    Ok(sig)
}

fn load_fs(path: &FsPath, sig: &Signature) -> Result<FeatureStructure, Failure> {
    in_file(path, FeatureStructure::parse(&read(path)?, sig))
}

fn check_sig(path: &FsPath, out: &mut String) -> CmdResult {
    let sig = load_sig(path)?;
    let species: Vec<&str> = sig.species().iter().map(|&s| sig.type_name(s)).collect();
    out.push_str(&format!("types: {}\n", sig.type_count()));
    out.push_str(&format!("attrs: {}\n", sig.attr_count()));
    out.push_str(&format!("species: {}\n", species.join(" ")));
    for (t, a, v) in sig.approp_entries() {
        out.push_str(&format!(
            "approp {} {} {}\n",
            sig.type_name(t),
            sig.attr_name(a),
            sig.type_name(v)
        ));
    }
    out.push_str(&format!("rational: {}\n", sig.check_rational()));
    Ok(ExitStatus::SUCCESS)
}

fn resolve_cmd(sig_path: &FsPath, fs_path: &FsPath, naive: bool, out: &mut String) -> CmdResult {
    let sig = load_sig(sig_path)?;
    let f = load_fs(fs_path, &sig)?;
    let set = if naive {
        resolve::res_naive(&f, &sig)?
    } else {
        resolve::res_refined(&f, &sig)
    };
    out.push_str(&set.render(&sig));
    Ok(ExitStatus::from_bool(!set.is_empty()))
}

fn sat_cmd(sig_path: &FsPath, fs_path: &FsPath, out: &mut String) -> CmdResult {
    let sig = load_sig(sig_path)?;
    let f = load_fs(fs_path, &sig)?;
    let sat = resolve::sat(&f, &sig);
    out.push_str(if sat { "sat\n" } else { "unsat\n" });
    Ok(ExitStatus::from_bool(sat))
}

fn witness_cmd(sig_path: &FsPath, fs_path: &FsPath, model: bool, out: &mut String) -> CmdResult {
    let sig = load_sig(sig_path)?;
    let f = load_fs(fs_path, &sig)?;
    let Some(first) = resolve::res_refined(&f, &sig).first() else {
        out.push_str("unsat\n");
        return Ok(ExitStatus::FAILURE);
    };
    let m = morph::witness(&first, &sig);
    out.push_str(&m.render(&sig));
    if model {
        let i = morph::morph_to_interpretation(&m, &sig)?;
        out.push_str("---\n");
        out.push_str(&i.render(&sig));
        out.push_str(&format!(
            "# designated {}\n",
            m.skeleton().name(m.skeleton().root())
        ));
    }
    Ok(ExitStatus::SUCCESS)
}

fn check_morph_cmd(sig_path: &FsPath, morph_path: &FsPath, out: &mut String) -> CmdResult {
    let sig = load_sig(sig_path)?;
    let m = in_file(morph_path, MorphAutomaton::parse(&read(morph_path)?, &sig))?;
    match morph::morph_violation(&m, &sig) {
        None => {
            out.push_str("morph\n");
            Ok(ExitStatus::SUCCESS)
        }
        Some(reason) => {
            out.push_str(&format!("not a morph: {reason}\n"));
            Ok(ExitStatus::FAILURE)
        }
    }
}

fn unify_cmd(sig_path: &FsPath, a: &FsPath, b: &FsPath, out: &mut String) -> CmdResult {
    let sig = load_sig(sig_path)?;
    let fa = load_fs(a, &sig)?;
    let fb = load_fs(b, &sig)?;
    let ra = resolve::res_refined(&fa, &sig);
    let rb = resolve::res_refined(&fb, &sig);
    let set = unify::unify_representations(&ra, &rb, &sig)?;
    out.push_str(&set.render(&sig));
    Ok(ExitStatus::from_bool(!set.is_empty()))
}

fn truth_cmd(
    sig_path: &FsPath,
    interp_path: &FsPath,
    object: &str,
    fs_path: &FsPath,
    out: &mut String,
) -> CmdResult {
    let sig = load_sig(sig_path)?;
    let i = in_file(
        interp_path,
        FiniteInterpretation::parse(&read(interp_path)?, &sig),
    )?;
    let u = i.object_id(object)?;
    let f = load_fs(fs_path, &sig)?;
    let truth = interp::truth_of(&f, &i, u, &sig);
    out.push_str(if truth { "true\n" } else { "false\n" });
    Ok(ExitStatus::from_bool(truth))
}
