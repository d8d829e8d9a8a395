//! File-to-file adapters for command-line compressors.
//!
//! A template is a whitespace-separated argument vector containing the
//! placeholders `{in}` and `{out}`. A trailing `> {out}` redirects the
//! tool's stdout into the output file instead of passing a path. No shell
//! is involved.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use super::CodecError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalTemplate {
    pub compress: String,
    pub decompress: String,
    /// Extension of the compressed file; some tools insist on one.
    pub suffix: String,
    /// The tool only accepts FASTA, so dictionary text must be wrapped.
    #[serde(default)]
    pub fasta_input: bool,
}

impl ExternalTemplate {
    pub fn new(
        compress: &str,
        decompress: &str,
        suffix: &str,
        fasta_input: bool,
    ) -> Result<Self, CodecError> {
        let t = ExternalTemplate {
            compress: compress.to_string(),
            decompress: decompress.to_string(),
            suffix: suffix.to_string(),
            fasta_input,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        for tpl in [&self.compress, &self.decompress] {
            if !tpl.contains("{in}") || !tpl.contains("{out}") {
                return Err(CodecError::Config(format!(
                    "template {tpl:?} lacks {{in}} or {{out}}"
                )));
            }
            if tpl.split_whitespace().next().is_none() {
                return Err(CodecError::Config("empty template".into()));
            }
        }
        Ok(())
    }

    pub fn program(&self) -> &str {
        self.compress.split_whitespace().next().unwrap_or_default()
    }

    /// Default invocations for the tools the workbench knows by name.
    pub fn known(id: &str) -> Option<ExternalTemplate> {
        let (c, d, s, fasta) = match id {
            "bzip2" => (
                "bzip2 -c {in} > {out}",
                "bzip2 -d -c {in} > {out}",
                ".bz2",
                false,
            ),
            "gzip" => (
                "gzip -c {in} > {out}",
                "gzip -d -c {in} > {out}",
                ".gz",
                false,
            ),
            "xz" => ("xz -c {in} > {out}", "xz -d -c {in} > {out}", ".xz", false),
            "zstd" => (
                "zstd -q -f {in} -o {out}",
                "zstd -d -q -f {in} -o {out}",
                ".zst",
                false,
            ),
            "lz4" => (
                "lz4 -q -f {in} {out}",
                "lz4 -d -q -f {in} {out}",
                ".lz4",
                false,
            ),
            "mfc" => (
                "MFCompressC -o {out} {in}",
                "MFCompressD -o {out} {in}",
                ".mfc",
                true,
            ),
            "spring" => (
                "spring -c --fasta-input -i {in} -o {out}",
                "spring -d -i {in} -o {out}",
                ".spring",
                true,
            ),
            _ => return None,
        };
        Some(ExternalTemplate::new(c, d, s, fasta).expect("built-in templates are valid"))
    }

    pub fn is_available(&self) -> bool {
        [&self.compress, &self.decompress]
            .iter()
            .all(|t| t.split_whitespace().next().is_some_and(resolve_program))
    }

    pub(crate) fn compress_file(&self, id: &str, data: &[u8]) -> Result<Vec<u8>, CodecError> {
        let input_name = if self.fasta_input {
            "input.fa"
        } else {
            "input.dat"
        };
        self.run_in_tempdir(
            id,
            &self.compress,
            data,
            input_name,
            &format!("output{}", self.suffix),
        )
    }

    pub(crate) fn decompress_file(&self, id: &str, payload: &[u8]) -> Result<Vec<u8>, CodecError> {
        let output_name = if self.fasta_input {
            "output.fa"
        } else {
            "output.dat"
        };
        self.run_in_tempdir(
            id,
            &self.decompress,
            payload,
            &format!("input{}", self.suffix),
            output_name,
        )
    }

    fn run_in_tempdir(
        &self,
        id: &str,
        template: &str,
        data: &[u8],
        input_name: &str,
        output_name: &str,
    ) -> Result<Vec<u8>, CodecError> {
        let dir = tempfile::tempdir()?;
        let input = dir.path().join(input_name);
        let output = dir.path().join(output_name);
        fs::write(&input, data)?;
        run_template(id, template, &input, &output)?;
        Ok(fs::read(&output)?)
    }
}

fn resolve_program(program: &str) -> bool {
    let p = Path::new(program);
    if p.components().count() > 1 {
        return p.is_file();
    }
    std::env::var_os("PATH")
        .map(|paths| std::env::split_paths(&paths).any(|d| d.join(program).is_file()))
        .unwrap_or(false)
}

fn run_template(id: &str, template: &str, input: &Path, output: &Path) -> Result<(), CodecError> {
    let substitute = |tok: &str| {
        tok.replace("{in}", &input.to_string_lossy())
            .replace("{out}", &output.to_string_lossy())
    };
    let mut tokens: Vec<&str> = template.split_whitespace().collect();
    let mut redirect: Option<PathBuf> = None;
    if tokens.len() >= 2 && tokens[tokens.len() - 2] == ">" {
        redirect = Some(PathBuf::from(substitute(tokens[tokens.len() - 1])));
        tokens.truncate(tokens.len() - 2);
    }
    let (program, args) = tokens
        .split_first()
        .ok_or_else(|| CodecError::Config("empty template".into()))?;
    let mut cmd = Command::new(program);
    cmd.args(args.iter().map(|a| substitute(a)))
        .stdin(Stdio::null())
        .stderr(Stdio::piped());
    match &redirect {
        Some(path) => cmd.stdout(fs::File::create(path)?),
        None => cmd.stdout(Stdio::piped()),
    };
    let out = cmd.output().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CodecError::Unavailable(id.to_string()),
        _ => CodecError::Io(e.to_string()),
    })?;
    if !out.status.success() {
        return Err(CodecError::ExternalFailed {
            id: id.to_string(),
            status: out.status.code(),
            stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    if !output.is_file() {
        return Err(CodecError::ExternalFailed {
            id: id.to_string(),
            status: out.status.code(),
            stderr: format!("no output written to {}", output.display()),
        });
    }
    Ok(())
}
