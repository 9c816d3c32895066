//! Text formats and command implementations behind the `wavemod` binary.
//!
//! * bit files: one `0` or `1` per line,
//! * sample files: one decimal value per line,
//! * sweep configs: `key = value` lines, `#` starts a comment,
//! * sweep results: CSV with a fixed header plus an optional SVG plot.

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::ber_lab::{run_monte_carlo, BerPoint, ExperimentConfig, Scheme, SPECTRAL_EFFICIENCY};
use crate::channel::{add_awgn_in_place, NoiseSpec};
use crate::detector::detect_block;
use crate::error::{Error, Result};
use crate::filterbank::{analyze_pyramid, synthesize_pyramid, SampleBlock};
use crate::wavelet_filters::{make_daubechies, validate_filter_pair};
use crate::wm_codec::{place, MessageBlock, Method, PlacementSpec};

pub const CSV_HEADER: &str = "method,snr_db_per_copy,snr_db_per_message_energy,ber_theory,\
ber_theory_ideal,ber_sim,trials,errors,seed";

/// Formats `x` positionally with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.16}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-30..=30).contains(&magnitude) {
        return format!("{x:.16e}");
    }
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Scaling filter taps, one per line; fails if the pair is not valid.
pub fn cmd_filters(taps: usize) -> Result<String> {
    let fp = make_daubechies(taps)?;
    let violations = validate_filter_pair(&fp);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Config(format!(
            "filter with {taps} taps failed validation: {}",
            list.join("; ")
        )));
    }
    let mut out = String::new();
    for &v in fp.h() {
        out.push_str(&format_sig17(v));
        out.push('\n');
    }
    Ok(out)
}

/// `a:b:step`, inclusive of `b` when it lands on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for SnrGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let parse = |p: &str| p.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let bad = || Error::Config(format!("snr_grid '{s}' is not of the form start:stop:step"));
        let grid = match parts.as_slice() {
            [a] => {
                let v = parse(a).ok_or_else(bad)?;
                SnrGrid {
                    start: v,
                    stop: v,
                    step: 1.0,
                }
            }
            [a, b, c] => SnrGrid {
                start: parse(a).ok_or_else(bad)?,
                stop: parse(b).ok_or_else(bad)?,
                step: parse(c).ok_or_else(bad)?,
            },
            _ => return Err(bad()),
        };
        if grid.step.is_nan() || grid.step <= 0.0 || grid.stop < grid.start {
            return Err(Error::Config(format!(
                "snr_grid '{s}' needs step > 0 and stop >= start"
            )));
        }
        if grid.values().len() > 100_000 {
            return Err(Error::Config(format!("snr_grid '{s}' has too many points")));
        }
        Ok(grid)
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Everything `ber-sweep` needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub methods: Vec<Scheme>,
    pub num_scales: usize,
    pub message_len: usize,
    pub symbol_energy: f64,
    pub snr_grid: SnrGrid,
    pub min_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    pub taps: usize,
    pub csv_path: PathBuf,
    pub emit_plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let base = ExperimentConfig::default();
        RunConfig {
            methods: vec![
                Scheme::Wavelet(Method::Wm1),
                Scheme::Wavelet(Method::Wm2),
                Scheme::Pam,
            ],
            num_scales: base.num_scales,
            message_len: base.message_len,
            symbol_energy: base.symbol_energy,
            snr_grid: SnrGrid {
                start: -20.0,
                stop: 4.0,
                step: 1.0,
            },
            min_errors: base.min_errors,
            max_trials: base.max_trials,
            seed: base.seed,
            taps: base.wavelet_taps,
            csv_path: PathBuf::from("ber.csv"),
            emit_plot: false,
        }
    }
}

fn parse_key<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{}' for key '{key}'", value.trim())))
}

pub fn parse_methods(value: &str) -> Result<Vec<Scheme>> {
    let methods = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Scheme>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(format!("key 'methods': {e}")))?;
    if methods.is_empty() {
        return Err(Error::Config("key 'methods' lists no method".into()));
    }
    Ok(methods)
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "methods" | "method" => self.methods = parse_methods(value)?,
            "scales" => self.num_scales = parse_key(key, value)?,
            "message_len" => self.message_len = parse_key(key, value)?,
            "e0" => self.symbol_energy = parse_key(key, value)?,
            "snr_grid" => {
                self.snr_grid = value
                    .parse()
                    .map_err(|e| Error::Config(format!("key '{key}': {e}")))?
            }
            "min_errors" => self.min_errors = parse_key(key, value)?,
            "max_trials" => self.max_trials = parse_key(key, value)?,
            "seed" => self.seed = parse_key(key, value)?,
            "taps" => self.taps = parse_key(key, value)?,
            "out" => self.csv_path = PathBuf::from(value.trim()),
            "plot" => self.emit_plot = parse_key(key, value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {}: expected key = value", idx + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_config_string(&self) -> String {
        let methods: Vec<String> = self.methods.iter().map(ToString::to_string).collect();
        format!(
            "methods = {}\nscales = {}\nmessage_len = {}\ne0 = {}\nsnr_grid = {}\n\
             min_errors = {}\nmax_trials = {}\nseed = {}\ntaps = {}\nout = {}\nplot = {}\n",
            methods.join(","),
            self.num_scales,
            self.message_len,
            self.symbol_energy,
            self.snr_grid,
            self.min_errors,
            self.max_trials,
            self.seed,
            self.taps,
            self.csv_path.display(),
            self.emit_plot
        )
    }

    pub fn experiment(&self, scheme: Scheme) -> ExperimentConfig {
        ExperimentConfig {
            scheme,
            num_scales: self.num_scales,
            message_len: self.message_len,
            symbol_energy: self.symbol_energy,
            snr_grid_db: self.snr_grid.values(),
            min_errors: self.min_errors,
            max_trials: self.max_trials,
            seed: self.seed,
            wavelet_taps: self.taps,
        }
    }

    pub fn plot_path(&self) -> PathBuf {
        self.csv_path.with_extension("svg")
    }
}

/// Settings shared by `modulate` and `demodulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModemConfig {
    pub method: Method,
    pub num_scales: usize,
    pub taps: usize,
    pub symbol_energy: f64,
    /// Channel noise added after modulation; the detector's `sigma^2` on
    /// demodulation (1 when zero).
    pub sigma: f64,
    pub seed: u64,
}

impl Default for ModemConfig {
    fn default() -> Self {
        ModemConfig {
            method: Method::Wm1,
            num_scales: 6,
            taps: 4,
            symbol_energy: 1.0,
            sigma: 0.0,
            seed: 0,
        }
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_bits(text: &str, source: &str) -> Result<Vec<u8>> {
    let bits = numbered_lines(text)
        .map(|(line, l)| match l {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(Error::Parse {
                path: source.to_string(),
                line,
                message: format!("expected 0 or 1, found '{l}'"),
            }),
        })
        .collect::<Result<Vec<u8>>>()?;
    if bits.is_empty() {
        return Err(Error::Config(format!("{source}: no bits in input")));
    }
    Ok(bits)
}

pub fn parse_samples(text: &str, source: &str) -> Result<Vec<f64>> {
    let samples = numbered_lines(text)
        .map(|(line, l)| {
            l.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    path: source.to_string(),
                    line,
                    message: format!("expected a finite decimal number, found '{l}'"),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    if samples.is_empty() {
        return Err(Error::Config(format!("{source}: no samples in input")));
    }
    Ok(samples)
}

/// Bits to time-domain samples, with optional channel noise.
pub fn modulate_bits(bits: &[u8], cfg: &ModemConfig) -> Result<Vec<f64>> {
    let fp = make_daubechies(cfg.taps)?;
    let msg = MessageBlock::new(bits.to_vec(), cfg.symbol_energy)?;
    let frame = place(&msg, cfg.method, cfg.num_scales)?;
    let mut block = synthesize_pyramid(&frame, &fp)?;
    let noise = NoiseSpec::new(cfg.sigma, cfg.seed, 0)?;
    add_awgn_in_place(&mut block.samples, &noise);
    Ok(block.samples)
}

/// Samples back to bits; the message length follows from the sample count.
pub fn demodulate_samples(samples: &[f64], cfg: &ModemConfig) -> Result<Vec<u8>> {
    let fp = make_daubechies(cfg.taps)?;
    let spec = PlacementSpec::for_block_len(cfg.method, cfg.num_scales, samples.len())?;
    let block = SampleBlock::new(samples.to_vec(), cfg.num_scales as i32);
    let frame = analyze_pyramid(&block, cfg.num_scales, &fp)?;
    let sigma2 = if cfg.sigma > 0.0 {
        cfg.sigma * cfg.sigma
    } else {
        1.0
    };
    detect_block(&frame, &spec, cfg.symbol_energy, sigma2)
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_output(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// One value per line in shortest round-trip decimal form.
pub fn samples_to_text(samples: &[f64]) -> String {
    let mut body = String::with_capacity(samples.len() * 24);
    for v in samples {
        let _ = writeln!(body, "{v}");
    }
    body
}

pub fn bits_to_text(bits: &[u8]) -> String {
    let mut body = String::with_capacity(bits.len() * 2);
    for b in bits {
        let _ = writeln!(body, "{b}");
    }
    body
}

pub fn cmd_modulate(input: &Path, output: &Path, cfg: &ModemConfig) -> Result<usize> {
    let bits = parse_bits(&read_input(input)?, &input.display().to_string())?;
    let samples = modulate_bits(&bits, cfg)?;
    write_output(output, &samples_to_text(&samples))?;
    Ok(samples.len())
}

pub fn cmd_demodulate(input: &Path, output: &Path, cfg: &ModemConfig) -> Result<usize> {
    let samples = parse_samples(&read_input(input)?, &input.display().to_string())?;
    let bits = demodulate_samples(&samples, cfg)?;
    write_output(output, &bits_to_text(&bits))?;
    Ok(bits.len())
}

/// One simulated curve per method.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub curves: Vec<(Scheme, Vec<BerPoint>)>,
    pub seed: u64,
    pub num_scales: usize,
}

fn opt_float(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut out: W, result: &SweepResult) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (scheme, points) in &result.curves {
        for p in points {
            writeln!(
                out,
                "{},{},{},{:e},{},{},{},{},{}",
                scheme,
                p.snr_db,
                p.snr_db_per_message_energy,
                p.ber_theory,
                opt_float(p.ber_theory_ideal),
                opt_float(p.ber_sim),
                p.trials,
                p.errors,
                result.seed
            )?;
        }
    }
    out.flush()
}

fn scheme_color(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Wavelet(Method::Wm1) => "#1f77b4",
        Scheme::Wavelet(Method::Wm2) => "#d62728",
        Scheme::Pam => "#2ca02c",
    }
}

/// BER vs per-copy SNR with a logarithmic BER axis.
pub fn render_svg(result: &SweepResult) -> String {
    const W: f64 = 800.0;
    const H: f64 = 560.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 180.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;

    let all = result.curves.iter().flat_map(|(_, pts)| pts.iter());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y_floor = 0.5f64;
    for p in all {
        x_min = x_min.min(p.snr_db);
        x_max = x_max.max(p.snr_db);
        for v in [Some(p.ber_theory), p.ber_theory_ideal, p.ber_sim]
            .into_iter()
            .flatten()
        {
            if v > 0.0 {
                y_floor = y_floor.min(v);
            }
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let decade_lo = y_floor.max(1e-12).log10().floor().min(-1.0);
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| TOP + (0.0 - y.log10()) / (0.0 - decade_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        "<desc>BER vs per-copy SNR, {} scales, seed {}, spectral efficiency {}</desc>",
        result.num_scales, result.seed, SPECTRAL_EFFICIENCY
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let mut decade = decade_lo as i32;
    while decade <= 0 {
        let y = py(10f64.powi(decade));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{decade}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
        decade += 1;
    }
    let x_step = ((x_max - x_min) / 10.0).max(1.0).ceil();
    let mut tick = (x_min / x_step).ceil() * x_step;
    while tick <= x_max + 1e-9 {
        let x = px(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#eee"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{tick}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0
        );
        tick += x_step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">SNR per copy E0/σ² (dB)</text>"#,
        LEFT + plot_w / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">bit error rate</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let polyline = |svg: &mut String, pts: &[(f64, f64)], color: &str, dash: &str| {
        let coords: Vec<String> = pts
            .iter()
            .filter(|(_, y)| *y > 0.0 && y.log10() >= decade_lo)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if coords.len() >= 2 {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                coords.join(" ")
            );
        }
    };

    let mut legend_y = TOP + 10.0;
    let legend_x = LEFT + plot_w + 15.0;
    let mut legend = |svg: &mut String, label: &str, color: &str, dash: &str| {
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            legend_x + 25.0,
            legend_x + 30.0,
            legend_y + 4.0
        );
        legend_y += 18.0;
    };

    let dashed = r#" stroke-dasharray="6 4""#;
    let dotted = r#" stroke-dasharray="2 3""#;
    for (scheme, points) in &result.curves {
        let color = scheme_color(*scheme);
        let theory: Vec<(f64, f64)> = points.iter().map(|p| (p.snr_db, p.ber_theory)).collect();
        polyline(&mut svg, &theory, color, dashed);
        legend(&mut svg, &format!("{scheme} theory"), color, dashed);

        let ideal: Vec<(f64, f64)> = points
            .iter()
            .filter_map(|p| p.ber_theory_ideal.map(|v| (p.snr_db, v)))
            .collect();
        if !ideal.is_empty() {
            polyline(&mut svg, &ideal, color, dotted);
            legend(&mut svg, &format!("{scheme} ideal"), color, dotted);
        }

        let sim: Vec<(f64, f64)> = points
            .iter()
            .filter_map(|p| p.ber_sim.map(|v| (p.snr_db, v)))
            .collect();
        polyline(&mut svg, &sim, color, "");
        for &(x, y) in sim
            .iter()
            .filter(|(_, y)| *y > 0.0 && y.log10() >= decade_lo)
        {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        legend(&mut svg, &format!("{scheme} simulated"), color, "");
    }
    svg.push_str("</svg>\n");
    svg
}

fn create_output(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

/// Runs every configured method and writes the CSV (and SVG when enabled).
///
/// Output files are opened before any simulation starts so an unwritable
/// path fails fast.
pub fn cmd_ber_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    let experiments: Vec<ExperimentConfig> =
        cfg.methods.iter().map(|&m| cfg.experiment(m)).collect();
    for e in &experiments {
        e.validate()?;
    }

    let csv_file = create_output(&cfg.csv_path)?;
    let plot_file = if cfg.emit_plot {
        Some((cfg.plot_path(), create_output(&cfg.plot_path())?))
    } else {
        None
    };

    let curves = experiments
        .iter()
        .map(|e| Ok((e.scheme, run_monte_carlo(e)?)))
        .collect::<Result<Vec<_>>>()?;
    let result = SweepResult {
        curves,
        seed: cfg.seed,
        num_scales: cfg.num_scales,
    };

    write_csv(BufWriter::new(csv_file), &result).map_err(|e| Error::io(&cfg.csv_path, e))?;
    if let Some((path, mut file)) = plot_file {
        file.write_all(render_svg(&result).as_bytes())
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(result)
}
