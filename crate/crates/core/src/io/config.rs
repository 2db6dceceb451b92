//! `key = value` run configuration.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use log::LevelFilter;

use crate::assembly::PenaltyTensor;
use crate::error::{Error, Result};
use crate::mesh::TerrainKind;
use crate::mgsolver::CycleParams;

/// Where the ground elevations come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TerrainSource {
    /// ESRI ASCII grid; node spacing is the file's cell size.
    File(PathBuf),
    Synthetic { kind: TerrainKind, d1: f64, d2: f64 },
}

/// Initial wind as configured.
#[derive(Debug, Clone, PartialEq)]
pub enum WindSource {
    Uniform([f64; 3]),
    LogProfile {
        speed: f64,
        direction: f64,
        roughness_length: f64,
        reference_height: f64,
    },
    /// Cell-center text file, see [`crate::io::read_wind_cells`].
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub terrain: TerrainSource,
    /// Terrain nodes along `x` and `y`.
    pub n1: usize,
    pub n2: usize,
    /// Cell layers.
    pub n3: usize,
    pub top_height: f64,
    pub stretch_ratio: f64,
    pub penalty: PenaltyTensor,
    pub wind: WindSource,
    pub params: CycleParams,
    pub wind_output: PathBuf,
    pub diagnostics_output: Option<PathBuf>,
    pub mesh_output: Option<PathBuf>,
    pub log_level: LevelFilter,
    /// Worker threads, `0` for one per core.
    pub threads: usize,
}

const KEYS: &[&str] = &[
    "terrain_file",
    "terrain_kind",
    "terrain_amplitude",
    "terrain_width",
    "terrain_center_x",
    "terrain_center_y",
    "n1",
    "n2",
    "n3",
    "d1",
    "d2",
    "top_height",
    "stretch_ratio",
    "a1",
    "a2",
    "a3",
    "wind",
    "wind_u",
    "wind_v",
    "wind_w",
    "wind_speed",
    "wind_direction",
    "roughness_length",
    "reference_height",
    "wind_file",
    "pre_smooth",
    "post_smooth",
    "max_cycles",
    "rel_tol",
    "coarsest_max_nodes",
    "coarsest_iters",
    "wind_output",
    "diagnostics_output",
    "mesh_output",
    "log_level",
    "threads",
];

/// Every key accepted by [`parse_config`].
pub fn config_keys() -> &'static [&'static str] {
    KEYS
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// Raw `key = value` entries with their line numbers.
#[derive(Debug, Clone, Default)]
pub struct ConfigEntries {
    entries: HashMap<String, Entry>,
    last_line: usize,
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl ConfigEntries {
    /// Split `text` into entries; unknown and duplicate keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ConfigEntries::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            out.last_line = line;
            let body = match raw.find('#') {
                Some(c) => &raw[..c],
                None => raw,
            };
            let body = body.trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{body}`")))?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(config_err(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(config_err(line, format!("`{key}` has no value")));
            }
            if let Some(prev) = out.entries.get(key) {
                return Err(config_err(
                    line,
                    format!("duplicate key `{key}` (first set on line {})", prev.line),
                ));
            }
            out.entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        Ok(out)
    }

    /// Apply a `key=value` override. Overrides replace file entries and are
    /// numbered as lines following the file.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        self.last_line += 1;
        let line = self.last_line;
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("override `{assignment}` is not `key=value`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(config_err(line, format!("unknown key `{key}` in override")));
        }
        if value.is_empty() {
            return Err(config_err(line, format!("override for `{key}` has no value")));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    /// Line that missing-key errors point at: the last one, or 1 when empty.
    fn end_line(&self) -> usize {
        self.last_line.max(1)
    }

    fn line_of(&self, key: &str) -> usize {
        self.get(key).map_or(self.end_line(), |e| e.line)
    }

    fn require(&self, key: &str) -> Result<&Entry> {
        self.get(key)
            .ok_or_else(|| config_err(self.end_line(), format!("missing required key `{key}`")))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| {
                config_err(e.line, format!("cannot parse `{}` as a value for `{key}`", e.value))
            }),
        }
    }

    fn number(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = match (self.parsed::<f64>(key)?, default) {
            (Some(v), _) => v,
            (None, Some(d)) => d,
            (None, None) => {
                self.require(key)?;
                unreachable!("require fails for a missing key")
            }
        };
        if !v.is_finite() {
            return Err(config_err(self.line_of(key), format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: Option<usize>) -> Result<usize> {
        match (self.parsed::<usize>(key)?, default) {
            (Some(v), _) => Ok(v),
            (None, Some(d)) => Ok(d),
            (None, None) => {
                self.require(key)?;
                unreachable!("require fails for a missing key")
            }
        }
    }

    fn path(&self, key: &str, base: &Path) -> Option<PathBuf> {
        self.get(key).map(|e| base.join(&e.value))
    }

    fn check(&self, key: &str, ok: bool, what: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(config_err(self.line_of(key), format!("`{key}` {what}")))
        }
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = self.number(key, default)?;
        self.check(key, v > 0.0, &format!("must be positive, got {v}"))?;
        Ok(v)
    }

    /// Validate and build a [`RunConfig`]; relative paths are joined to `base`.
    pub fn resolve(&self, base: &Path) -> Result<RunConfig> {
        let terrain = match (self.get("terrain_file"), self.get("terrain_kind")) {
            (Some(_), Some(e)) => {
                return Err(config_err(
                    e.line,
                    "`terrain_kind` and `terrain_file` are mutually exclusive",
                ))
            }
            (Some(_), None) => {
                for key in ["terrain_amplitude", "terrain_width", "terrain_center_x", "terrain_center_y"] {
                    if let Some(e) = self.get(key) {
                        return Err(config_err(e.line, format!("`{key}` needs `terrain_kind`")));
                    }
                }
                TerrainSource::File(self.path("terrain_file", base).expect("present"))
            }
            (None, Some(e)) => {
                let d1 = self.positive("d1", None)?;
                let d2 = self.positive("d2", None)?;
                let kind = match e.value.as_str() {
                    "flat" => TerrainKind::Flat,
                    "hill" | "ridge" => {
                        let amplitude = self.number("terrain_amplitude", None)?;
                        self.check("terrain_amplitude", amplitude >= 0.0, "must be non-negative")?;
                        let sigma = self.positive("terrain_width", None)?;
                        let cx = self.parsed::<f64>("terrain_center_x")?;
                        let cy = self.parsed::<f64>("terrain_center_y")?;
                        if e.value == "hill" {
                            let center = match (cx, cy) {
                                (Some(x), Some(y)) => Some((x, y)),
                                (None, None) => None,
                                _ => {
                                    return Err(config_err(
                                        self.line_of(if cx.is_some() { "terrain_center_x" } else { "terrain_center_y" }),
                                        "`terrain_center_x` and `terrain_center_y` must be given together",
                                    ))
                                }
                            };
                            TerrainKind::GaussianHill {
                                amplitude,
                                sigma,
                                center,
                            }
                        } else {
                            if let Some(l) = self.get("terrain_center_y") {
                                return Err(config_err(l.line, "`terrain_center_y` does not apply to a ridge"));
                            }
                            TerrainKind::Ridge {
                                amplitude,
                                sigma,
                                center_x: cx,
                            }
                        }
                    }
                    other => {
                        return Err(config_err(
                            e.line,
                            format!("`terrain_kind` must be flat, hill or ridge, got `{other}`"),
                        ))
                    }
                };
                TerrainSource::Synthetic { kind, d1, d2 }
            }
            (None, None) => {
                return Err(config_err(
                    self.end_line(),
                    "missing required key `terrain_file` (or `terrain_kind`)",
                ))
            }
        };
        if let TerrainSource::File(_) = terrain {
            for key in ["d1", "d2"] {
                if self.get(key).is_some() {
                    self.positive(key, None)?;
                }
            }
        }

        let n1 = self.count("n1", None)?;
        let n2 = self.count("n2", None)?;
        let n3 = self.count("n3", None)?;
        self.check("n1", n1 >= 2, "must be at least 2")?;
        self.check("n2", n2 >= 2, "must be at least 2")?;
        self.check("n3", n3 >= 1, "must be at least 1")?;
        let top_height = self.positive("top_height", None)?;
        let stretch_ratio = self.number("stretch_ratio", Some(1.3))?;
        self.check("stretch_ratio", stretch_ratio >= 1.0, &format!("must be at least 1, got {stretch_ratio}"))?;

        let a1 = self.positive("a1", Some(1.0))?;
        let a2 = self.positive("a2", Some(1.0))?;
        let a3 = self.positive("a3", Some(1.0))?;
        let penalty = PenaltyTensor::new(a1, a2, a3)?;

        let wind_keys: &[(&str, &[&str])] = &[
            ("uniform", &["wind_u", "wind_v", "wind_w"]),
            ("log", &["wind_speed", "wind_direction", "roughness_length", "reference_height"]),
            ("file", &["wind_file"]),
        ];
        let mode = self.get("wind").map_or("uniform", |e| e.value.as_str());
        let Some((_, own)) = wind_keys.iter().find(|(m, _)| *m == mode) else {
            return Err(config_err(
                self.line_of("wind"),
                format!("`wind` must be uniform, log or file, got `{mode}`"),
            ));
        };
        for (_, keys) in wind_keys {
            for key in *keys {
                if !own.contains(key) {
                    if let Some(e) = self.get(key) {
                        return Err(config_err(e.line, format!("`{key}` does not apply to wind = {mode}")));
                    }
                }
            }
        }
        let wind = match mode {
            "uniform" => WindSource::Uniform([
                self.number("wind_u", Some(0.0))?,
                self.number("wind_v", Some(0.0))?,
                self.number("wind_w", Some(0.0))?,
            ]),
            "log" => {
                let speed = self.number("wind_speed", None)?;
                let direction = self.number("wind_direction", None)?;
                let roughness_length = self.positive("roughness_length", None)?;
                let reference_height = self.positive("reference_height", None)?;
                self.check(
                    "reference_height",
                    reference_height > roughness_length,
                    "must exceed roughness_length",
                )?;
                WindSource::LogProfile {
                    speed,
                    direction,
                    roughness_length,
                    reference_height,
                }
            }
            _ => WindSource::File(
                self.path("wind_file", base)
                    .ok_or_else(|| config_err(self.line_of("wind"), "missing required key `wind_file`"))?,
            ),
        };

        let defaults = CycleParams::default();
        let params = CycleParams {
            pre_smooth: self.count("pre_smooth", Some(defaults.pre_smooth))?,
            post_smooth: self.count("post_smooth", Some(defaults.post_smooth))?,
            max_cycles: self.count("max_cycles", Some(defaults.max_cycles))?,
            rel_tol: self.number("rel_tol", Some(defaults.rel_tol))?,
            coarsest_max_nodes: self.count("coarsest_max_nodes", Some(defaults.coarsest_max_nodes))?,
            coarsest_iters: self.count("coarsest_iters", Some(defaults.coarsest_iters))?,
        };
        self.check(
            "rel_tol",
            params.rel_tol > 0.0 && params.rel_tol < 1.0,
            &format!("must lie in (0, 1), got {}", params.rel_tol),
        )?;
        self.check("max_cycles", params.max_cycles >= 1, "must be at least 1")?;
        if params.pre_smooth + params.post_smooth == 0 {
            let key = if self.get("post_smooth").is_some() { "post_smooth" } else { "pre_smooth" };
            return Err(config_err(self.line_of(key), "pre_smooth + post_smooth must be at least 1"));
        }

        let wind_output = self
            .path("wind_output", base)
            .ok_or_else(|| config_err(self.end_line(), "missing required key `wind_output`"))?;
        let log_level = match self.get("log_level").map_or("warn", |e| e.value.as_str()) {
            "off" => LevelFilter::Off,
            "error" => LevelFilter::Error,
            "warn" => LevelFilter::Warn,
            "info" => LevelFilter::Info,
            "debug" => LevelFilter::Debug,
            "trace" => LevelFilter::Trace,
            other => {
                return Err(config_err(
                    self.line_of("log_level"),
                    format!("`log_level` must be off, error, warn, info, debug or trace, got `{other}`"),
                ))
            }
        };

        Ok(RunConfig {
            terrain,
            n1,
            n2,
            n3,
            top_height,
            stretch_ratio,
            penalty,
            wind,
            params,
            wind_output,
            diagnostics_output: self.path("diagnostics_output", base),
            mesh_output: self.path("mesh_output", base),
            log_level,
            threads: self.count("threads", Some(0))?,
        })
    }
}

/// Parse and validate configuration text. Relative paths stay relative.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    ConfigEntries::parse(text)?.resolve(Path::new(""))
}

/// [`parse_config`] on raw bytes; invalid UTF-8 is reported on its line.
pub fn parse_config_bytes(bytes: &[u8]) -> Result<RunConfig> {
    parse_config(utf8_text(bytes)?)
}

pub(crate) fn utf8_text(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = 1 + bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count();
        config_err(line, "invalid UTF-8")
    })
}

/// Read `path`, apply `overrides` (`key=value`), and validate. Relative paths
/// in the file are taken relative to the file's directory.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut entries = ConfigEntries::parse(utf8_text(&bytes)?)?;
    for o in overrides {
        entries.set(o)?;
    }
    entries.resolve(path.parent().unwrap_or(Path::new("")))
}
