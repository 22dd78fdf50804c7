//! Reading programs and writing artefacts.

use std::fs;
use std::path::Path;

use pasp_core::{parse_program, parse_query, Program, Query};

use crate::error::CliError;

pub fn read_program(path: &Path) -> Result<Program, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_program(&text)?)
}

pub fn read_query(text: &str) -> Result<Query, CliError> {
    Ok(parse_query(text)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
