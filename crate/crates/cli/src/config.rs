//! `key = value` run configuration.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use nozzleflow_core::initial::InitialData;
use nozzleflow_core::scheme::{default_delta, exponent_violations, DEFAULT_ALPHA, DEFAULT_BETA};
use nozzleflow_core::GasConstants;

/// One problem found while reading a config, tied to its line (1-based; 0
/// when the problem is a missing key).
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NozzleSpec {
    Constant,
    Laval { h: f64, x_cut: f64 },
    WindTunnel { h: f64, x_cut: f64 },
    /// Two-column `x A(x)` file.
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MajorantSpec {
    /// Built from `|a| / mu` on the run's mesh.
    Derived,
    Zero,
    /// Two-column `x b(x)` file.
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Preset(InitialData),
    /// Three-column `x rho v` file.
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub t_final: f64,
    pub dx: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nozzle: NozzleSpec,
    pub majorant: MajorantSpec,
    pub init: InitSpec,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    /// `None`: computed from the initial data.
    pub m_amp: Option<f64>,
    pub epsilon: f64,
    pub out: Option<PathBuf>,
    pub snapshots: Vec<f64>,
    pub force: bool,
    /// Multiplies `a`; anything but 1 needs `force`.
    pub source_scale: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

const KEYS: &[&str] = &[
    "gamma",
    "T",
    "dx",
    "x_min",
    "x_max",
    "nozzle",
    "b",
    "init",
    "alpha",
    "beta",
    "delta",
    "M",
    "epsilon",
    "out",
    "snapshots",
    "force",
    "source_scale",
    "newton_tol",
    "newton_max_iter",
];

struct Entries<'a> {
    map: HashMap<&'a str, (usize, &'a str)>,
    issues: Vec<ConfigIssue>,
}

impl<'a> Entries<'a> {
    fn issue(&mut self, line: usize, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            line,
            message: message.into(),
        });
    }

    fn line_of(&self, key: &str) -> usize {
        self.map.get(key).map(|e| e.0).unwrap_or(0)
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let (line, raw) = *self.map.get(key)?;
        match parse_number(raw) {
            Some(v) => Some(v),
            None => {
                self.issue(line, format!("`{key}`: malformed number {raw:?}"));
                None
            }
        }
    }

    fn required(&mut self, key: &str) -> Option<f64> {
        if !self.map.contains_key(key) {
            self.issue(0, format!("missing required key `{key}`"));
            return None;
        }
        self.number(key)
    }
}

fn parse_number(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// `name:k=v,k=v` into the name and its parameters.
fn split_preset(raw: &str) -> (&str, Vec<(&str, &str)>) {
    let (name, rest) = raw.split_once(':').unwrap_or((raw, ""));
    let params = rest
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())).unwrap_or((kv, "")))
        .collect();
    (name.trim(), params)
}

/// Look up the named parameters of a preset; unknown or malformed ones are
/// reported. Missing names fall back to `defaults`.
fn preset_numbers(
    e: &mut Entries,
    key: &str,
    params: &[(&str, &str)],
    names: &[(&str, Option<f64>)],
) -> Option<Vec<f64>> {
    let line = e.line_of(key);
    let mut out = Vec::with_capacity(names.len());
    let mut ok = true;
    for (k, _) in params {
        if !names.iter().any(|(n, _)| n == k) {
            let known: Vec<&str> = names.iter().map(|n| n.0).collect();
            e.issue(line, format!("`{key}`: unknown parameter `{k}` (expected {})", known.join(", ")));
            ok = false;
        }
    }
    for (name, default) in names {
        match params.iter().find(|(k, _)| k == name) {
            Some((_, raw)) => match parse_number(raw) {
                Some(v) => out.push(v),
                None => {
                    e.issue(line, format!("`{key}`: malformed number {raw:?} for `{name}`"));
                    ok = false;
                }
            },
            None => match default {
                Some(v) => out.push(*v),
                None => {
                    e.issue(line, format!("`{key}`: missing parameter `{name}`"));
                    ok = false;
                }
            },
        }
    }
    ok.then_some(out)
}

fn parse_nozzle(e: &mut Entries) -> Option<NozzleSpec> {
    let Some(&(line, raw)) = e.map.get("nozzle") else {
        return Some(NozzleSpec::Constant);
    };
    let (name, params) = split_preset(raw);
    match name {
        "constant" => Some(NozzleSpec::Constant),
        "laval" | "windtunnel" => {
            let v = preset_numbers(e, "nozzle", &params, &[("h", None), ("X", Some(0.5))])?;
            if !(v[1] > 0.0) {
                e.issue(line, format!("`nozzle`: need X > 0 (X = {})", v[1]));
                return None;
            }
            Some(if name == "laval" {
                NozzleSpec::Laval { h: v[0], x_cut: v[1] }
            } else {
                NozzleSpec::WindTunnel { h: v[0], x_cut: v[1] }
            })
        }
        "table" => table_path(e, "nozzle", raw).map(NozzleSpec::Table),
        other => {
            e.issue(line, format!("`nozzle`: unknown preset `{other}` (constant, laval, windtunnel, table)"));
            None
        }
    }
}

fn table_path(e: &mut Entries, key: &str, raw: &str) -> Option<PathBuf> {
    let path = raw.split_once(':').map(|(_, p)| p.trim()).unwrap_or("");
    if path.is_empty() {
        let line = e.line_of(key);
        e.issue(line, format!("`{key}`: table needs a path (table:FILE)"));
        return None;
    }
    Some(PathBuf::from(path))
}

fn parse_majorant(e: &mut Entries) -> Option<MajorantSpec> {
    let Some(&(line, raw)) = e.map.get("b") else {
        return Some(MajorantSpec::Derived);
    };
    match split_preset(raw).0 {
        "derived" => Some(MajorantSpec::Derived),
        "zero" => Some(MajorantSpec::Zero),
        "table" => table_path(e, "b", raw).map(MajorantSpec::Table),
        other => {
            e.issue(line, format!("`b`: unknown choice `{other}` (derived, zero, table)"));
            None
        }
    }
}

fn parse_init(e: &mut Entries) -> Option<InitSpec> {
    let Some(&(line, raw)) = e.map.get("init") else {
        e.issue(0, "missing required key `init`");
        return None;
    };
    let (name, params) = split_preset(raw);
    let data = match name {
        "constant" => {
            let v = preset_numbers(e, "init", &params, &[("rho", None), ("v", Some(0.0))])?;
            InitialData::Constant { rho: v[0], v: v[1] }
        }
        "riemann" => {
            let v = preset_numbers(
                e,
                "init",
                &params,
                &[("x0", Some(0.0)), ("rho_l", None), ("v_l", Some(0.0)), ("rho_r", None), ("v_r", Some(0.0))],
            )?;
            InitialData::Riemann {
                x0: v[0],
                left: (v[1], v[2]),
                right: (v[3], v[4]),
            }
        }
        "wave" => {
            let v = preset_numbers(
                e,
                "init",
                &params,
                &[
                    ("rho0", None),
                    ("drho", Some(0.0)),
                    ("v0", Some(0.0)),
                    ("dv", Some(0.0)),
                    ("x0", Some(0.0)),
                    ("wavelength", Some(1.0)),
                ],
            )?;
            if !(v[5] > 0.0) {
                e.issue(line, "`init`: wavelength must be positive");
                return None;
            }
            if v[0] - v[1].abs() < 0.0 {
                e.issue(line, "`init`: rho0 - |drho| must be nonnegative");
                return None;
            }
            InitialData::Wave {
                rho0: v[0],
                drho: v[1],
                v0: v[2],
                dv: v[3],
                x0: v[4],
                wavelength: v[5],
            }
        }
        "table" => return table_path(e, "init", raw).map(InitSpec::Table),
        other => {
            e.issue(line, format!("`init`: unknown preset `{other}` (constant, riemann, wave, table)"));
            return None;
        }
    };
    let negative = match &data {
        InitialData::Constant { rho, .. } => *rho < 0.0,
        InitialData::Riemann { left, right, .. } => left.0 < 0.0 || right.0 < 0.0,
        _ => false,
    };
    if negative {
        e.issue(line, "`init`: density must be nonnegative");
        return None;
    }
    Some(InitSpec::Preset(data))
}

fn parse_bool(e: &mut Entries, key: &str) -> bool {
    let Some(&(line, raw)) = e.map.get(key) else {
        return false;
    };
    match raw {
        "true" | "yes" | "1" => true,
        "false" | "no" | "0" => false,
        _ => {
            e.issue(line, format!("`{key}`: expected true or false, got {raw:?}"));
            false
        }
    }
}

/// Parse and validate a config; on failure, every problem found.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigIssue>> {
    let mut e = Entries {
        map: HashMap::new(),
        issues: Vec::new(),
    };
    for (n, raw_line) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw_line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            e.issue(line, format!("expected `key = value`, got {body:?}"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            e.issue(line, format!("unknown key `{key}`"));
            continue;
        }
        if let Some(&(first, _)) = e.map.get(key) {
            e.issue(line, format!("duplicate key `{key}` (first set on line {first})"));
            continue;
        }
        e.map.insert(key, (line, value));
    }

    let gamma = e.required("gamma");
    let t_final = e.required("T");
    let dx = e.required("dx");
    let x_min = e.number("x_min").unwrap_or(-1.0);
    let x_max = e.number("x_max").unwrap_or(1.0);
    let nozzle = parse_nozzle(&mut e);
    let majorant = parse_majorant(&mut e);
    let init = parse_init(&mut e);
    let alpha = e.number("alpha").unwrap_or(DEFAULT_ALPHA);
    let beta = e.number("beta").unwrap_or(DEFAULT_BETA);
    let delta = e.number("delta");
    let m_amp = e.number("M");
    let epsilon = e.number("epsilon").unwrap_or(0.0);
    let source_scale = e.number("source_scale").unwrap_or(1.0);
    let newton_tol = e.number("newton_tol").unwrap_or(1e-12);
    let newton_max_iter = match e.number("newton_max_iter") {
        Some(v) if v >= 1.0 && v.fract() == 0.0 => v as usize,
        Some(v) => {
            let line = e.line_of("newton_max_iter");
            e.issue(line, format!("`newton_max_iter`: need a positive integer, got {v}"));
            0
        }
        None => 50,
    };
    let force = parse_bool(&mut e, "force");
    let out = e.map.get("out").map(|&(_, v)| PathBuf::from(v));
    let mut snapshots = Vec::new();
    if let Some(&(line, raw)) = e.map.get("snapshots") {
        for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match parse_number(part) {
                Some(v) => snapshots.push(v),
                None => e.issue(line, format!("`snapshots`: malformed number {part:?}")),
            }
        }
    }

    let constants = gamma.and_then(|g| match GasConstants::new(g) {
        Ok(c) => Some(c),
        Err(_) => {
            let line = e.line_of("gamma");
            e.issue(line, format!("`gamma`: need 1 < gamma <= 5/3 (gamma = {g})"));
            None
        }
    });
    if let Some(t) = t_final {
        if t < 0.0 {
            let line = e.line_of("T");
            e.issue(line, format!("`T`: must be >= 0 (T = {t})"));
        }
        for &s in &snapshots {
            if !(0.0..=t).contains(&s) {
                let line = e.line_of("snapshots");
                e.issue(line, format!("`snapshots`: time {s} outside [0, T]"));
            }
        }
    }
    if let Some(d) = dx {
        if !(d > 0.0) {
            let line = e.line_of("dx");
            e.issue(line, format!("`dx`: must be > 0 (dx = {d})"));
        } else if x_max > x_min && (x_max - x_min) < 2.0 * d {
            let line = e.line_of("dx");
            e.issue(line, "`dx`: domain shorter than two cells");
        }
    }
    if !(x_max > x_min) {
        let line = e.line_of("x_max").max(e.line_of("x_min"));
        e.issue(line, format!("need x_max > x_min ({x_min} >= {x_max})"));
    }
    if let Some(m) = m_amp {
        if !(m > 0.0) {
            let line = e.line_of("M");
            e.issue(line, format!("`M`: must be > 0 (M = {m})"));
        }
    }
    if !(epsilon >= 0.0) {
        let line = e.line_of("epsilon");
        e.issue(line, format!("`epsilon`: must be >= 0 (epsilon = {epsilon})"));
    }
    if !(newton_tol > 0.0) {
        let line = e.line_of("newton_tol");
        e.issue(line, format!("`newton_tol`: must be > 0 (newton_tol = {newton_tol})"));
    }
    if !(source_scale >= 0.0) {
        let line = e.line_of("source_scale");
        e.issue(line, format!("`source_scale`: must be >= 0 (source_scale = {source_scale})"));
    }
    let mut delta_final = delta.unwrap_or(f64::NAN);
    if let Some(c) = constants {
        delta_final = delta.unwrap_or_else(|| default_delta(&c));
        let line = ["alpha", "beta", "delta"]
            .iter()
            .map(|k| e.line_of(k))
            .find(|&l| l > 0)
            .unwrap_or_else(|| e.line_of("gamma"));
        for v in exponent_violations(alpha, beta, delta_final, &c) {
            e.issue(line, format!("exponents: {v}"));
        }
    }

    let issues = std::mem::take(&mut e.issues);
    if !issues.is_empty() {
        let mut issues = issues;
        issues.sort_by_key(|i| i.line);
        return Err(issues);
    }
    Ok(RunConfig {
        gamma: gamma.unwrap(),
        t_final: t_final.unwrap(),
        dx: dx.unwrap(),
        x_min,
        x_max,
        nozzle: nozzle.unwrap(),
        majorant: majorant.unwrap(),
        init: init.unwrap(),
        alpha,
        beta,
        delta: delta_final,
        m_amp,
        epsilon,
        out,
        snapshots,
        force,
        source_scale,
        newton_tol,
        newton_max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "gamma = 1.4\nT = 0.2\ndx = 0.01\nnozzle = constant\ninit = riemann:x0=0,rho_l=1,rho_r=0.5\n";

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.gamma, 1.4);
        assert_eq!(c.nozzle, NozzleSpec::Constant);
        assert_eq!(c.majorant, MajorantSpec::Derived);
        assert_eq!(
            c.init,
            InitSpec::Preset(InitialData::Riemann {
                x0: 0.0,
                left: (1.0, 0.0),
                right: (0.5, 0.0)
            })
        );
        assert_eq!((c.alpha, c.beta), (DEFAULT_ALPHA, DEFAULT_BETA));
    }

    #[test]
    fn alpha_too_large_is_rejected_on_its_line() {
        let text = format!("{MINIMAL}alpha = 0.95\nbeta = 0.1\n");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.len(), 1, "{err:?}");
        assert_eq!(err[0].line, 6);
        assert!(err[0].message.contains("1 - 2 beta"));
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let text = format!("{MINIMAL}dx = 0.02\n");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].line, 6);
        assert!(err[0].to_string().contains("first set on line 3"), "{}", err[0]);
    }

    #[test]
    fn all_errors_are_collected() {
        let text = "gamma = 3\nT = abc\nfoo = 1\ninit = wave:rho0=1,bogus=2\ndx = -1\n";
        let err = parse_config(text).unwrap_err();
        let lines: Vec<usize> = err.iter().map(|i| i.line).collect();
        assert!(lines.contains(&1) && lines.contains(&2) && lines.contains(&3));
        assert!(lines.contains(&4) && lines.contains(&5), "{err:?}");
    }

    #[test]
    fn missing_keys_are_reported() {
        let err = parse_config("# nothing\n").unwrap_err();
        let msgs: Vec<String> = err.iter().map(|i| i.to_string()).collect();
        for k in ["gamma", "T", "dx", "init"] {
            assert!(msgs.iter().any(|m| m.contains(&format!("`{k}`"))), "{msgs:?}");
        }
    }

    #[test]
    fn presets_and_lists() {
        let text = "gamma = 1.4\nT = 0.2\ndx = 0.01\nnozzle = laval:h=2\nb = zero\ninit = table:data/u0.txt\nsnapshots = 0, 0.1\nforce = true\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.nozzle, NozzleSpec::Laval { h: 2.0, x_cut: 0.5 });
        assert_eq!(c.majorant, MajorantSpec::Zero);
        assert_eq!(c.init, InitSpec::Table(PathBuf::from("data/u0.txt")));
        assert_eq!(c.snapshots, vec![0.0, 0.1]);
        assert!(c.force);
    }
}
