//! The `gen`, `cover`, `marstrand` and `density` runs behind the binary.
//!
//! Each run reads a [`RunConfig`], works through the configured depth range
//! and writes flat files under the output directory:
//!
//! | run         | files                                                        |
//! |-------------|--------------------------------------------------------------|
//! | `gen`       | `set_<depth>.csv`, `set_<depth>.json`                        |
//! | `cover`     | `cover_<depth>.csv`, `cover_<depth>.json`                    |
//! | `marstrand` | `sweep_<depth>.csv`, `plot_<depth>.svg`, `summary.json`      |
//! | `density`   | `density_<depth>.csv`, `domination.json`                     |

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::cover::{build_good_cover_scoped, goodness_bound, DyadicCover, MergeScope};
use crate::density::{domination_check, pushforward_density, Domination, Quadrature};
use crate::error::{Error, Result};
use crate::estimates::{
    evaluate_angle, good_angle_sets, pair_sums, shell_summary, sweep, SweepReport, ThetaGrid,
    DEFAULT_PAIR_CAP, MIN_GRID,
};
use crate::fractal::{regularity_scan, DiscretizedSet, FractalSpec};
use crate::io::{create, fmt_f64, write_json, write_squares_csv, write_step_rows, write_sweep_csv};
use crate::projection::Angle;
use crate::svg::{line_plot, Series};

/// Where the fractal comes from: inline, a built-in name (`carpet`,
/// `diagonal`, `full`), or a path to a spec JSON file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SpecSource {
    Inline(FractalSpec),
    Named(String),
}

impl<'de> Deserialize<'de> for SpecSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // Not `untagged`: an invalid inline spec must report why it is invalid.
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(name) => Ok(SpecSource::Named(name)),
            other => serde_json::from_value(other)
                .map(SpecSource::Inline)
                .map_err(D::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub spec: SpecSource,
    /// Inclusive depth range `[first, last]`.
    pub depths: (u32, u32),
    /// Exponent; the similarity dimension when absent.
    pub s: Option<f64>,
    pub tau: f64,
    /// Levels allowed to merge: `all` or `fine`.
    pub merge: MergeScope,
    /// Number of theta nodes.
    pub grid: usize,
    /// Window half-widths for `density`; `2 * diam` and `4 * diam` of each
    /// cover when absent.
    pub eps: Option<Vec<f64>>,
    /// Thresholds `eps` for the good-angle sets `{∫f² < 1/eps}`; when absent,
    /// the single Markov level `eps = π / (2 I_numeric(first depth))`.
    pub good_angle_eps: Option<Vec<f64>>,
    pub out: PathBuf,
    pub seed: u64,
    pub pair_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spec: SpecSource::Named("carpet".into()),
            depths: (1, 3),
            s: None,
            tau: 1.0,
            merge: MergeScope::All,
            grid: 256,
            eps: None,
            good_angle_eps: None,
            out: PathBuf::from("out"),
            seed: 0,
            pair_cap: DEFAULT_PAIR_CAP,
        }
    }
}

impl RunConfig {
    /// Reads a config file; relative spec paths resolve against its directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let SpecSource::Named(name) = &cfg.spec {
            if builtin(name).is_none() {
                let p = Path::new(name);
                if p.is_relative() {
                    if let Some(dir) = path.parent() {
                        cfg.spec = SpecSource::Named(dir.join(p).to_string_lossy().into_owned());
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.depths;
        if a == 0 || a > b {
            return Err(Error::Config(format!(
                "depth range {a}..{b} is empty or starts at 0"
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.grid < MIN_GRID {
            return Err(Error::Config(format!(
                "grid must be at least {MIN_GRID}, got {}",
                self.grid
            )));
        }
        if let Some(s) = self.s {
            if !(s > 0.0 && s <= 2.0) {
                return Err(Error::Config(format!("s must lie in (0, 2], got {s}")));
            }
        }
        if let Some(eps) = &self.eps {
            if eps.iter().any(|&e| !(e > 0.0)) {
                return Err(Error::Config("eps values must be positive".into()));
            }
        }
        if let Some(eps) = &self.good_angle_eps {
            if eps.iter().any(|&e| !(e > 0.0)) {
                return Err(Error::Config(
                    "good_angle_eps values must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn fractal(&self) -> Result<FractalSpec> {
        match &self.spec {
            SpecSource::Inline(spec) => Ok(spec.clone()),
            SpecSource::Named(name) => match builtin(name) {
                Some(spec) => Ok(spec),
                None => {
                    let text = fs::read_to_string(name)
                        .map_err(|e| Error::Config(format!("spec {name}: {e}")))?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Config(format!("spec {name}: {e}")))
                }
            },
        }
    }

    fn depth_range(&self) -> std::ops::RangeInclusive<u32> {
        self.depths.0..=self.depths.1
    }

    fn exponent(&self, spec: &FractalSpec) -> f64 {
        self.s.unwrap_or_else(|| spec.similarity_dimension())
    }
}

fn builtin(name: &str) -> Option<FractalSpec> {
    match name {
        "carpet" => Some(FractalSpec::carpet()),
        "diagonal" => Some(FractalSpec::diagonal()),
        "full" => FractalSpec::full(2).ok(),
        _ => None,
    }
}

/// Parses `a..b` (inclusive) or a single depth `n`.
pub fn parse_depths(text: &str) -> Result<(u32, u32)> {
    let bad = || Error::Config(format!("depth range must look like 1..5, got {text:?}"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (text, text),
    };
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn prepare(cfg: &RunConfig) -> Result<FractalSpec> {
    cfg.validate()?;
    let spec = cfg.fractal()?;
    for depth in cfg.depth_range() {
        let level = spec.level_at_depth(depth);
        if level > crate::dyadic::MAX_LEVEL {
            return Err(Error::DepthOverflow {
                depth,
                level,
                max: crate::dyadic::MAX_LEVEL,
            });
        }
    }
    fs::create_dir_all(&cfg.out)?;
    Ok(spec)
}

const REGULARITY_RADII: [f64; 4] = [0.5, 0.25, 0.125, 0.0625];
const REGULARITY_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub name: String,
    pub depth: u32,
    pub level: u32,
    pub count: usize,
    pub s: f64,
    pub hausdorff_sum: f64,
    /// `Σ|Q|^s`, the normalization of the discretized measure.
    pub eq4_constant: f64,
    /// Empirical `b` in `mass(B_r(x)) <= b r^s`, relative to total mass.
    pub regularity_constant: f64,
    pub regularity_radii: Vec<f64>,
    pub regularity_samples: usize,
    pub seed: u64,
}

pub fn cmd_gen(cfg: &RunConfig) -> Result<Vec<SetSummary>> {
    let spec = prepare(cfg)?;
    let s = cfg.exponent(&spec);
    let mut out = Vec::new();
    for depth in cfg.depth_range() {
        let ds = spec.squares_at_depth(depth)?;
        write_squares_csv(
            create(&cfg.out.join(format!("set_{depth}.csv")))?,
            &ds.squares,
        )?;
        let reg = regularity_scan(&ds, s, &REGULARITY_RADII, REGULARITY_SAMPLES, cfg.seed)?;
        let h = ds.hausdorff_sum(s);
        let summary = SetSummary {
            name: spec.name().to_string(),
            depth,
            level: ds.level(),
            count: ds.squares.len(),
            s,
            hausdorff_sum: h,
            eq4_constant: h,
            regularity_constant: reg.constant,
            regularity_radii: REGULARITY_RADII.to_vec(),
            regularity_samples: REGULARITY_SAMPLES,
            seed: cfg.seed,
        };
        write_json(&cfg.out.join(format!("set_{depth}.json")), &summary)?;
        out.push(summary);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSummary {
    pub depth: u32,
    pub count: usize,
    pub merges: usize,
    pub s: f64,
    pub tau: f64,
    pub merge: MergeScope,
    pub diameter: f64,
    pub goodness_constant: f64,
    pub goodness_bound: f64,
    pub hausdorff_sum: f64,
    pub eq4_constant: f64,
    pub eq7_constant: f64,
}

fn build_cover(
    cfg: &RunConfig,
    spec: &FractalSpec,
    depth: u32,
    s: f64,
) -> Result<(DiscretizedSet, DyadicCover, usize)> {
    let ds = spec.squares_at_depth(depth)?;
    let (cover, merges) = build_good_cover_scoped(&ds, s, cfg.tau, cfg.merge)?;
    Ok((ds, cover, merges.len()))
}

fn cover_summary(
    depth: u32,
    cover: &DyadicCover,
    merges: usize,
    merge: MergeScope,
) -> CoverSummary {
    let g = cover.goodness_constant();
    let h = cover.hausdorff_sum();
    CoverSummary {
        depth,
        count: cover.len(),
        merges,
        s: cover.s,
        tau: cover.tau,
        merge,
        diameter: cover.diameter(),
        goodness_constant: g,
        goodness_bound: goodness_bound(cover.s, cover.tau),
        hausdorff_sum: h,
        eq4_constant: h,
        eq7_constant: g,
    }
}

pub fn cmd_cover(cfg: &RunConfig) -> Result<Vec<CoverSummary>> {
    let spec = prepare(cfg)?;
    let s = cfg.exponent(&spec);
    let mut out = Vec::new();
    for depth in cfg.depth_range() {
        let (_, cover, merges) = build_cover(cfg, &spec, depth, s)?;
        write_squares_csv(
            create(&cfg.out.join(format!("cover_{depth}.csv")))?,
            &cover.squares,
        )?;
        let summary = cover_summary(depth, &cover, merges, cfg.merge);
        write_json(&cfg.out.join(format!("cover_{depth}.json")), &summary)?;
        out.push(summary);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct DepthEstimates {
    pub depth: u32,
    pub count: usize,
    pub I_numeric: f64,
    pub I_pair_bound: f64,
    pub I_transversal_capped: f64,
    pub I_transversal_literal: f64,
    /// `I_numeric <= I_pair_bound <= I_transversal_capped`.
    pub chain_holds: bool,
    pub goodness_constant: f64,
    pub hausdorff_sum: f64,
    pub eq4_constant: f64,
    pub eq7_constant: f64,
    pub min_cs_lower: f64,
    pub min_m_proj: f64,
    pub fraction_cs_lower_ge_0_05: f64,
    pub m_proj_at_minus_quarter_pi: f64,
    /// Largest normalized shell mass over every square and shell.
    pub shell_constant: f64,
    /// Per shell index, the largest normalized mass over squares.
    pub shells: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodAngleSummary {
    pub eps: f64,
    /// Fraction of nodes in each depth's set, in depth order.
    pub fractions: Vec<f64>,
    pub limit_fraction: f64,
    /// `π/M` times the nodes outside the last depth's set.
    pub excluded_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarstrandSummary {
    pub spec: String,
    pub s: f64,
    pub tau: f64,
    pub merge: MergeScope,
    pub grid: usize,
    pub depths: Vec<DepthEstimates>,
    /// Good-angle sets over the finite list of covers; the limit mask is the
    /// tail-union surrogate for "infinitely many covers".
    pub good_angles: Vec<GoodAngleSummary>,
}

pub fn cmd_marstrand(cfg: &RunConfig) -> Result<MarstrandSummary> {
    let spec = prepare(cfg)?;
    let s = cfg.exponent(&spec);
    let grid = ThetaGrid::new(cfg.grid)?;

    let mut covers = Vec::new();
    for depth in cfg.depth_range() {
        let (_, cover, _) = build_cover(cfg, &spec, depth, s)?;
        if cover.len() > cfg.pair_cap {
            return Err(Error::PairCapExceeded {
                count: cover.len(),
                cap: cfg.pair_cap,
            });
        }
        covers.push((depth, cover));
    }

    let quarter = Angle::new(-std::f64::consts::FRAC_PI_4)?;
    let mut depths = Vec::new();
    let mut reports: Vec<SweepReport> = Vec::new();
    for (depth, cover) in &covers {
        let report = sweep(cover, &grid);
        write_sweep_csv(
            create(&cfg.out.join(format!("sweep_{depth}.csv")))?,
            &report,
        )?;
        let m_pts: Vec<_> = report.rows.iter().map(|r| (r.theta, r.m_proj)).collect();
        let cs_pts: Vec<_> = report.rows.iter().map(|r| (r.theta, r.cs_lower)).collect();
        let svg = line_plot(
            &format!("{} depth {depth}: projected measure", spec.name()),
            "theta",
            &[
                Series {
                    label: "m(proj C)",
                    color: "#1f77b4",
                    points: &m_pts,
                },
                Series {
                    label: "(int f)^2 / int f^2",
                    color: "#d62728",
                    points: &cs_pts,
                },
            ],
        );
        fs::write(cfg.out.join(format!("plot_{depth}.svg")), svg)?;

        let sums = pair_sums(cover, cfg.pair_cap)?;
        let shells = shell_summary(cover, cfg.pair_cap)?;
        let i_numeric = report.i_numeric();
        let h = cover.hausdorff_sum();
        let g = cover.goodness_constant();
        depths.push(DepthEstimates {
            depth: *depth,
            count: cover.len(),
            I_numeric: i_numeric,
            I_pair_bound: sums.pair_bound,
            I_transversal_capped: sums.transversal_capped,
            I_transversal_literal: sums.transversal_literal,
            chain_holds: i_numeric <= sums.pair_bound && sums.pair_bound <= sums.transversal_capped,
            goodness_constant: g,
            hausdorff_sum: h,
            eq4_constant: h,
            eq7_constant: g,
            min_cs_lower: report
                .rows
                .iter()
                .map(|r| r.cs_lower)
                .fold(f64::INFINITY, f64::min),
            min_m_proj: report
                .rows
                .iter()
                .map(|r| r.m_proj)
                .fold(f64::INFINITY, f64::min),
            fraction_cs_lower_ge_0_05: report.fraction_cs_at_least(0.05),
            m_proj_at_minus_quarter_pi: evaluate_angle(cover, quarter).m_proj,
            shell_constant: shells.max_normalized,
            shells: shells.per_j,
        });
        reports.push(report);
    }

    let eps_list = match &cfg.good_angle_eps {
        Some(list) => list.clone(),
        None => vec![std::f64::consts::PI / (2.0 * depths[0].I_numeric)],
    };
    let mut good_angles = Vec::new();
    for eps in eps_list {
        let sets = good_angle_sets(&reports, eps)?;
        let last = sets.masks.last().map(Vec::as_slice).unwrap_or(&[]);
        good_angles.push(GoodAngleSummary {
            eps,
            fractions: sets
                .masks
                .iter()
                .map(|m| crate::estimates::GoodAngleSets::fraction(m))
                .collect(),
            limit_fraction: crate::estimates::GoodAngleSets::fraction(&sets.limit),
            excluded_measure: grid.weight() * last.iter().filter(|&&b| !b).count() as f64,
        });
    }

    let summary = MarstrandSummary {
        spec: spec.name().to_string(),
        s,
        tau: cfg.tau,
        merge: cfg.merge,
        grid: cfg.grid,
        depths,
        good_angles,
    };
    write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationRecord {
    pub depth: u32,
    #[serde(flatten)]
    pub domination: Domination,
    pub mass: f64,
    pub hausdorff_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySummary {
    pub records: Vec<DominationRecord>,
    /// `(depth, eps)` pairs skipped because `eps` is below the cover diameter.
    pub skipped: Vec<(u32, f64)>,
    pub max_ratio: f64,
}

pub fn cmd_density(cfg: &RunConfig) -> Result<DensitySummary> {
    let spec = prepare(cfg)?;
    let s = cfg.exponent(&spec);
    let grid = ThetaGrid::new(cfg.grid)?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for depth in cfg.depth_range() {
        let (_, cover, _) = build_cover(cfg, &spec, depth, s)?;
        let diameter = cover.diameter();
        let eps_list = cfg
            .eps
            .clone()
            .unwrap_or_else(|| vec![2.0 * diameter, 4.0 * diameter]);
        let h = cover.hausdorff_sum();

        let mut w =
            csv::Writer::from_writer(create(&cfg.out.join(format!("density_{depth}.csv")))?);
        w.write_record(["theta_index", "theta", "breakpoint", "value"])?;
        for (k, &theta) in grid.nodes().iter().enumerate() {
            let d = pushforward_density(&cover, theta);
            write_step_rows(
                &mut w,
                &d.density,
                &[k.to_string(), fmt_f64(theta.radians())],
            )?;
            for &eps in &eps_list {
                if eps < diameter {
                    if k == 0 {
                        eprintln!(
                            "warning: depth {depth}: eps {eps} below cover diameter {diameter}, skipped"
                        );
                        skipped.push((depth, eps));
                    }
                    continue;
                }
                let domination = domination_check(&cover, theta, eps, Quadrature::Exact)?;
                records.push(DominationRecord {
                    depth,
                    domination,
                    mass: d.mass,
                    hausdorff_sum: h,
                });
            }
        }
        w.flush()?;
    }
    let max_ratio = records
        .iter()
        .map(|r| r.domination.ratio)
        .fold(0.0, f64::max);
    let summary = DensitySummary {
        records,
        skipped,
        max_ratio,
    };
    write_json(&cfg.out.join("domination.json"), &summary)?;
    Ok(summary)
}
