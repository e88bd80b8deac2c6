//! Flat `key = value` scenario files.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use oris_link_core::beam::PhaseProfile;
use oris_link_core::link::{Link, LinkParams};
use oris_link_core::numerics::MAX_ORDER;
use oris_link_core::{deg_to_rad, Error as CoreError, HoverStats};

/// Pointing-error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PePreset {
    None,
    Weak,
    Moderate,
    Strong,
    Custom(HoverStats),
}

impl PePreset {
    pub const PRESETS: [PePreset; 4] = [PePreset::None, PePreset::Weak, PePreset::Moderate, PePreset::Strong];

    pub fn hover(&self) -> HoverStats {
        match self {
            PePreset::None => HoverStats::NONE,
            PePreset::Weak => HoverStats::WEAK,
            PePreset::Moderate => HoverStats::MODERATE,
            PePreset::Strong => HoverStats::STRONG,
            PePreset::Custom(h) => *h,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PePreset::None => "none",
            PePreset::Weak => "weak",
            PePreset::Moderate => "moderate",
            PePreset::Strong => "strong",
            PePreset::Custom(_) => "custom",
        }
    }

    /// `none`, `weak`, `moderate`, `strong`, or `custom(mu_x, mu_y, sigma_x, sigma_y)`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "none" => return Ok(PePreset::None),
            "weak" => return Ok(PePreset::Weak),
            "moderate" => return Ok(PePreset::Moderate),
            "strong" => return Ok(PePreset::Strong),
            _ => {}
        }
        let inner = s
            .strip_prefix("custom(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("unknown PE preset `{s}` (none|weak|moderate|strong|custom(mx,my,sx,sy))"))?;
        let v: Vec<f64> = inner
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("custom PE values: {e}"))?;
        if v.len() != 4 {
            return Err("custom PE needs four values: mu_x, mu_y, sigma_x, sigma_y".into());
        }
        let h = HoverStats { mu_x: v[0], mu_y: v[1], sigma_x: v[2], sigma_y: v[3] };
        h.validate().map_err(|e| e.to_string())?;
        Ok(PePreset::Custom(h))
    }
}

/// `lps`, `fps`, or `qps:<focus_m>`.
pub fn parse_profile(s: &str) -> Result<PhaseProfile, String> {
    let s = s.trim();
    match s.to_ascii_lowercase().as_str() {
        "lps" => Ok(PhaseProfile::Lps),
        "fps" => Ok(PhaseProfile::Fps),
        other => {
            let f = other
                .strip_prefix("qps:")
                .ok_or_else(|| format!("unknown profile `{s}` (lps|fps|qps:<f_m>)"))?
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("QPS focus: {e}"))?;
            if !(f > 0.0) || !f.is_finite() {
                return Err("QPS focus must be finite and > 0".into());
            }
            Ok(PhaseProfile::Qps { focus: f })
        }
    }
}

/// Validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub link: LinkParams,
    /// `None` runs every preset.
    pub pe: Option<PePreset>,
    /// `None` runs LPS, QPS at `f = d2`, and FPS.
    pub profile: Option<PhaseProfile>,
    /// Gauss-Laguerre order.
    pub g: usize,
    pub mc_samples: u64,
    pub mc_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self { link: LinkParams::default(), pe: None, profile: None, g: 180, mc_samples: 1_000_000, mc_seed: 1 }
    }
}

impl ScenarioConfig {
    pub fn vacuum_mode(&self) -> bool {
        self.link.atmosphere.vacuum_mode
    }

    /// Re-checks the physical parameters after command-line overrides.
    pub fn validate(&self) -> Result<Link, ConfigError> {
        Link::new(self.link).map_err(|e| ConfigError::from_core(None, &HashMap::new(), e))
    }
}

/// Rejected configuration, located as precisely as possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(file: Option<&Path>, line: usize, key: &str, message: impl Into<String>) -> Self {
        Self { file: file.map(Path::to_path_buf), line: Some(line), key: Some(key.into()), message: message.into() }
    }

    fn from_core(file: Option<&Path>, lines: &HashMap<String, usize>, e: CoreError) -> Self {
        let key = match &e {
            CoreError::InvalidConfig { field, .. } => Some((*field).to_string()),
            _ => None,
        };
        let message = match e {
            CoreError::InvalidConfig { reason, .. } => reason,
            other => other.to_string(),
        };
        Self { file: file.map(Path::to_path_buf), line: key.as_ref().and_then(|k| lines.get(k).copied()), key, message }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}", p.display())?,
            None => write!(f, "<config>")?,
        }
        if let Some(l) = self.line {
            write!(f, ":{l}")?;
        }
        if let Some(k) = &self.key {
            write!(f, ": {k}")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: Some(path.to_path_buf()),
        line: None,
        key: None,
        message: format!("cannot read file: {e}"),
    })?;
    parse_str(&text, Some(path))
}

/// Parses config text; `file` is only used in error messages.
pub fn parse_str(text: &str, file: Option<&Path>) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut lines: HashMap<String, usize> = HashMap::new();
    let mut h_lap_given = false;
    let mut geometry_changed = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::at(file, lineno, content, "expected `key = value`"))?;
        if lines.insert(key.to_string(), lineno).is_some() {
            return Err(ConfigError::at(file, lineno, key, "duplicate key"));
        }
        let err = |msg: String| ConfigError::at(file, lineno, key, msg);
        let num = || value.parse::<f64>().map_err(|e| err(format!("`{value}` is not a number: {e}")));
        let int = || value.parse::<u64>().map_err(|e| err(format!("`{value}` is not a non-negative integer: {e}")));
        let p = &mut cfg.link;
        match key {
            "lambda_nm" => p.lambda_m = num()? * 1e-9,
            "tau_zen" => p.atmosphere.tau_zen = num()?,
            "beta_l_db_per_km" => p.atmosphere.beta_l_db_per_km = num()?,
            "theta_div_urad" => p.theta_div_rad = num()? * 1e-6,
            "A" => p.atmosphere.a = num()?,
            "v_g" => p.atmosphere.v_g = num()?,
            "h_oris_m" => {
                p.geometry.h_oris = num()?;
                geometry_changed = true;
            }
            "h_hap_m" => p.geometry.h_hap = num()?,
            "h_lap_m" => {
                p.geometry.h_lap = num()?;
                h_lap_given = true;
            }
            "d_lap_m" => {
                p.geometry.d_lap = num()?;
                geometry_changed = true;
            }
            "phi_r_deg" => {
                let deg = num()?;
                if !(0.0..90.0).contains(&deg) {
                    return Err(err("phi_r must be < 90 and >= 0".into()));
                }
                p.geometry.phi_r = deg_to_rad(deg);
                geometry_changed = true;
            }
            "aperture_radius_m" => p.aperture_radius_m = num()?,
            "tau_eff" => p.tau_eff = num()?,
            "R_E_m" => p.geometry.r_e = num()?,
            "oris_side_m" => {
                let side = num()?;
                p.surface.side_x = side;
                p.surface.side_y = side;
            }
            "d_n_threshold_m" => p.geometry.d_n_threshold = Some(num()?),
            "vacuum_mode" => {
                p.atmosphere.vacuum_mode = match value.to_ascii_lowercase().as_str() {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(err(format!("`{value}` is not a boolean"))),
                }
            }
            "pe_preset" => cfg.pe = Some(PePreset::parse(value).map_err(err)?),
            "profile" => cfg.profile = Some(parse_profile(value).map_err(err)?),
            "G" => {
                let g = int()?;
                if g == 0 || g > MAX_ORDER as u64 {
                    return Err(err(format!("G must be in 1..={MAX_ORDER}")));
                }
                cfg.g = g as usize;
            }
            "mc_samples" => {
                let n = int()?;
                if n < oris_link_core::montecarlo::MIN_SAMPLES {
                    return Err(err("mc_samples must be >= 1000".into()));
                }
                cfg.mc_samples = n;
            }
            "mc_seed" => cfg.mc_seed = int()?,
            _ => return Err(err("unknown key".into())),
        }
    }

    // An omitted LAP altitude follows the ORIS-LAP geometry.
    if geometry_changed && !h_lap_given {
        let g = &mut cfg.link.geometry;
        if g.d_lap > 0.0 && g.phi_r > 0.0 {
            g.h_lap = g.d_lap * (std::f64::consts::FRAC_PI_2 - g.phi_r).tan() + g.h_oris;
        }
    }

    Link::new(cfg.link).map_err(|e| ConfigError::from_core(file, &lines, e))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_scenario() {
        let c = parse_str("", None).unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(c.link.lambda_m, 810e-9);
        assert_eq!(c.link.atmosphere.tau_zen, 0.78);
        assert_eq!(c.link.aperture_radius_m, 0.045);
        assert_eq!(c.g, 180);
    }

    #[test]
    fn comments_and_spacing() {
        let c = parse_str("# header\n  tau_eff = 0.6   # receiver\n\nG=64\n", None).unwrap();
        assert_eq!(c.link.tau_eff, 0.6);
        assert_eq!(c.g, 64);
    }

    #[test]
    fn phi_r_out_of_range() {
        let e = parse_str("tau_eff = 0.5\nphi_r_deg = 95\n", Some(Path::new("s.cfg"))).unwrap_err();
        assert_eq!(e.line, Some(2));
        assert_eq!(e.key.as_deref(), Some("phi_r_deg"));
        assert!(e.to_string().contains("phi_r must be < 90"), "{e}");
        assert!(e.to_string().starts_with("s.cfg:2"));
    }

    #[test]
    fn presets_and_profiles() {
        let c = parse_str("pe_preset = weak\nprofile = qps:300\n", None).unwrap();
        let h = c.pe.unwrap().hover();
        assert_eq!((h.mu_x, h.mu_y, h.sigma_x, h.sigma_y), (0.3, 0.2, 0.2, 0.1));
        assert_eq!(c.profile, Some(PhaseProfile::Qps { focus: 300.0 }));
        let c = parse_str("pe_preset = custom(0.1, 0, 0.05, 0.02)\n", None).unwrap();
        assert_eq!(c.pe.unwrap().hover().sigma_x, 0.05);
        assert!(parse_str("pe_preset = custom(1,2,3)\n", None).is_err());
        assert!(parse_str("profile = qps:-3\n", None).is_err());
    }

    #[test]
    fn physical_errors_are_located() {
        let e = parse_str("\n\ntau_zen = 1.5\n", None).unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(3), Some("tau_zen")));
        let e = parse_str("bogus = 1\n", None).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("bogus"));
        let e = parse_str("G = 600\n", None).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("G"));
        let e = parse_str("tau_eff = 0.5\ntau_eff = 0.4\n", None).unwrap_err();
        assert_eq!(e.message, "duplicate key");
        let e = parse_str("d_n_threshold_m = 500\n", None).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("d_n_threshold_m"));
    }

    #[test]
    fn lap_altitude_follows_geometry() {
        let c = parse_str("phi_r_deg = 60\n", None).unwrap();
        let g = c.link.geometry;
        assert!((g.h_lap - (250.0 * (30f64).to_radians().tan() + 50.0)).abs() < 1e-9);
        assert!(parse_str("phi_r_deg = 60\nh_lap_m = 300\n", None).is_err());
    }
}
