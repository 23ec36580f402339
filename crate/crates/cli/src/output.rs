use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::pipeline::PipelineRun;

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn distribution_file_name(epsilon: f64, k: usize) -> String {
    format!("dist_eps{epsilon}_k{k}.tsv")
}

/// `report.json`, `config.json`, `timing.json` and one density table per
/// populated `(ε, k)`. Returns the paths written.
pub fn write_outputs(run: &PipelineRun, dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut put = |name: &str, contents: String| -> CliResult<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    put("report.json", to_json(&run.report))?;
    put("config.json", to_json(&run.report.config))?;
    put("timing.json", to_json(&run.timing))?;
    for (eps, k, dist) in &run.distributions {
        put(&distribution_file_name(*eps, *k), dist.to_tsv())?;
    }
    Ok(written)
}
