//! `--config FILE` support: `key = value` lines become `--key value` flags
//! placed before the user's own flags, so explicit flags take precedence.

use std::ffi::OsString;

use crate::output::CliError;

pub const SEED_ENV: &str = "HOMEMEG_SEED";

/// Parses `key = value` lines. `#` starts a comment, `[section]` lines are ignored,
/// values may be quoted.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('[') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value",
                i + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').trim_matches('\'').to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((key, value));
    }
    Ok(out)
}

fn to_flags(pairs: Vec<(String, String)>) -> Vec<OsString> {
    let mut flags = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => flags.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                flags.push(format!("--{k}").into());
                flags.push(v.into());
            }
        }
    }
    flags
}

/// Removes `--config FILE` from `argv` and splices the file's flags in right
/// after the subcommand name.
pub fn expand_args(mut argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            let Some(p) = argv.get(i + 1).cloned() else {
                return Err(CliError::Usage("--config needs a file".into()));
            };
            path = Some(p);
            argv.drain(i..i + 2);
            continue;
        }
        if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(OsString::from(p));
            argv.remove(i);
            continue;
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.to_string_lossy())))?;
    let flags = to_flags(parse_config(&text)?);
    let sub = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(argv.len());
    argv.splice(sub..sub, flags);
    Ok(argv)
}

/// `HOMEMEG_SEED` wins over `--seed`.
pub fn resolve_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_lines() {
        let pairs =
            parse_config("# c\n[flood]\nseed = 7\ncorollary_eps = \"0.5\"\nall-sources = true\n")
                .unwrap();
        assert_eq!(
            pairs,
            vec![
                ("seed".into(), "7".into()),
                ("corollary-eps".into(), "0.5".into()),
                ("all-sources".into(), "true".into())
            ]
        );
        assert!(parse_config("oops\n").is_err());
    }

    #[test]
    fn no_config_untouched() {
        let argv = os(&["homemeg", "flood", "--n", "4"]);
        assert_eq!(expand_args(argv.clone()).unwrap(), argv);
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("homemeg-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.cfg");
        std::fs::write(&path, "seed = 3\nquiet = false\nall_sources = true\n").unwrap();
        let argv = os(&[
            "homemeg",
            "--config",
            path.to_str().unwrap(),
            "flood",
            "--seed",
            "9",
        ]);
        assert_eq!(
            expand_args(argv).unwrap(),
            os(&[
                "homemeg",
                "flood",
                "--seed",
                "3",
                "--all-sources",
                "--seed",
                "9"
            ])
        );
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
