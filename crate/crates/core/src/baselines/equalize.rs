//! Spectrogram contrast methods: global min-max scaling, per-bin histogram
//! equalisation along time, and a contrast-limited adaptive variant.

use crate::audio_io::AudioBuffer;
use crate::matrix::Matrix;
use crate::par;
use crate::pcs::{post_process, stretch_magnitude, GammaSchedule};
use crate::stft::StftConfig;

use super::BaselineError;

/// Histogram resolution used when callers have no preference.
pub const DEFAULT_LEVELS: usize = 1024;

/// `(m − min) / (max − min)` over the whole matrix; a constant matrix maps to
/// zeros.
pub fn minmax_normalize(mag: &Matrix<f64>) -> Matrix<f64> {
    let (lo, hi) = extremes(mag.as_slice());
    if !(hi > lo) {
        return mag.map(|_| 0.0);
    }
    let span = hi - lo;
    mag.map(|&m| (m - lo) / span)
}

fn extremes(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Monotone value map built from one histogram over `[lo, hi]`.
struct LevelMap {
    lo: f64,
    hi: f64,
    cdf: Vec<f64>,
    cdf_min: f64,
    cdf_max: f64,
}

impl LevelMap {
    /// `clip` is the histogram ceiling as a multiple of the uniform height;
    /// clipped mass is spread evenly over all levels.
    fn new(samples: &[f64], lo: f64, hi: f64, n_levels: usize, clip: Option<f64>) -> Self {
        let level = |v: f64| level_of(v, lo, hi, n_levels);
        let mut hist = vec![0.0; n_levels];
        for &v in samples {
            hist[level(v)] += 1.0;
        }
        if let Some(clip) = clip {
            let limit = clip * samples.len() as f64 / n_levels as f64;
            let excess: f64 = hist.iter().map(|&h| (h - limit).max(0.0)).sum();
            if excess > 0.0 {
                let share = excess / n_levels as f64;
                hist.iter_mut().for_each(|h| *h = h.min(limit) + share);
            }
        }
        let total: f64 = hist.iter().sum();
        // Midpoint convention: values sharing a level sit at the centre of
        // that level's probability mass.
        let mut cdf = Vec::with_capacity(n_levels);
        let mut before = 0.0;
        for &h in &hist {
            cdf.push((before + 0.5 * h) / total);
            before += h;
        }
        let (s_lo, s_hi) = extremes(samples);
        Self { lo, hi, cdf_min: cdf[level(s_lo)], cdf_max: cdf[level(s_hi)], cdf }
    }

    fn apply(&self, v: f64) -> f64 {
        if !(self.cdf_max > self.cdf_min) {
            return v;
        }
        let c = self.cdf[level_of(v, self.lo, self.hi, self.cdf.len())];
        let unit = ((c - self.cdf_min) / (self.cdf_max - self.cdf_min)).clamp(0.0, 1.0);
        self.lo + unit * (self.hi - self.lo)
    }
}

fn level_of(v: f64, lo: f64, hi: f64, n_levels: usize) -> usize {
    if !(hi > lo) {
        return 0;
    }
    let pos = ((v - lo) / (hi - lo) * n_levels as f64).floor();
    (pos.max(0.0) as usize).min(n_levels - 1)
}

fn check_levels(n_levels: usize) -> Result<(), BaselineError> {
    if n_levels < 2 {
        return Err(BaselineError::InvalidParameter(format!("n_levels must be >= 2, got {n_levels}")));
    }
    Ok(())
}

/// Applies `f(column) -> column` to every bin, in parallel when enabled.
fn map_columns<F>(mag: &Matrix<f64>, f: F) -> Matrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    let columns = par::map_range(mag.cols(), |b| f(&mag.column(b)));
    let mut out = mag.clone();
    for (b, col) in columns.into_iter().enumerate() {
        for (t, v) in col.into_iter().enumerate() {
            out[(t, b)] = v;
        }
    }
    out
}

/// Equalises each frequency bin's time series through its own empirical CDF,
/// then rescales the result back onto that bin's `[min, max]`. Constant bins
/// pass through unchanged.
pub fn histogram_equalize(mag: &Matrix<f64>, n_levels: usize) -> Result<Matrix<f64>, BaselineError> {
    check_levels(n_levels)?;
    Ok(map_columns(mag, |col| equalize_column(col, n_levels)))
}

fn equalize_column(col: &[f64], n_levels: usize) -> Vec<f64> {
    let (lo, hi) = extremes(col);
    if !(hi > lo) {
        return col.to_vec();
    }
    let map = LevelMap::new(col, lo, hi, n_levels, None);
    col.iter().map(|&v| map.apply(v)).collect()
}

/// Contrast-limited adaptive equalisation along time, per bin.
///
/// Each bin is cut into tiles of `tile_frames` frames at half-tile hops. Every
/// tile gets its own clipped-histogram map over the bin's global range, and a
/// frame's output blends the maps of the two tiles whose centres bracket it.
/// Tiles at least as long as the utterance reduce to [`histogram_equalize`].
pub fn adaptive_equalize(
    mag: &Matrix<f64>,
    tile_frames: usize,
    clip_limit: f64,
    n_levels: usize,
) -> Result<Matrix<f64>, BaselineError> {
    check_levels(n_levels)?;
    if tile_frames == 0 {
        return Err(BaselineError::InvalidParameter("tile_frames must be positive".into()));
    }
    if !(clip_limit > 0.0) {
        return Err(BaselineError::InvalidParameter(format!("clip_limit must be > 0, got {clip_limit}")));
    }
    if tile_frames >= mag.rows() {
        return histogram_equalize(mag, n_levels);
    }
    let clip = clip_limit.is_finite().then_some(clip_limit);
    let tiles = tile_bounds(mag.rows(), tile_frames);
    Ok(map_columns(mag, |col| adaptive_column(col, &tiles, clip, n_levels)))
}

/// Half-open `[start, end)` tiles at half-tile hops, the last one reaching
/// the final frame.
fn tile_bounds(n_frames: usize, tile: usize) -> Vec<(usize, usize)> {
    let hop = (tile / 2).max(1);
    let mut tiles = Vec::new();
    let mut start = 0;
    loop {
        let end = (start + tile).min(n_frames);
        tiles.push((start, end));
        if end == n_frames {
            break;
        }
        start += hop;
    }
    tiles
}

fn adaptive_column(col: &[f64], tiles: &[(usize, usize)], clip: Option<f64>, n_levels: usize) -> Vec<f64> {
    let (lo, hi) = extremes(col);
    if !(hi > lo) {
        return col.to_vec();
    }
    let maps: Vec<LevelMap> = tiles.iter().map(|&(s, e)| LevelMap::new(&col[s..e], lo, hi, n_levels, clip)).collect();
    let centres: Vec<f64> = tiles.iter().map(|&(s, e)| (s + e - 1) as f64 / 2.0).collect();
    let last = centres.len() - 1;
    col.iter()
        .enumerate()
        .map(|(t, &v)| {
            let t = t as f64;
            if t <= centres[0] {
                return maps[0].apply(v);
            }
            if t >= centres[last] {
                return maps[last].apply(v);
            }
            let k = centres.partition_point(|&c| c <= t) - 1;
            let w = (t - centres[k]) / (centres[k + 1] - centres[k]);
            (1.0 - w) * maps[k].apply(v) + w * maps[k + 1].apply(v)
        })
        .collect()
}

/// A magnitude-matrix transform usable in place of the PCS stretch inside the
/// post-processing pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureEnhancer {
    Stretch(GammaSchedule),
    MinMax,
    HistogramEqualization { n_levels: usize },
    AdaptiveEqualization { tile_frames: usize, clip_limit: f64, n_levels: usize },
}

impl FeatureEnhancer {
    pub fn apply(&self, mag: &Matrix<f64>) -> Result<Matrix<f64>, BaselineError> {
        match self {
            FeatureEnhancer::Stretch(schedule) => Ok(stretch_magnitude(mag, schedule)?),
            FeatureEnhancer::MinMax => Ok(minmax_normalize(mag)),
            FeatureEnhancer::HistogramEqualization { n_levels } => histogram_equalize(mag, *n_levels),
            FeatureEnhancer::AdaptiveEqualization { tile_frames, clip_limit, n_levels } => {
                adaptive_equalize(mag, *tile_frames, *clip_limit, *n_levels)
            }
        }
    }
}

/// [`crate::pcs::post_process`] with a [`FeatureEnhancer`] as the transform.
pub fn pp_feature_enhance(
    input: &AudioBuffer,
    config: &StftConfig,
    enhancer: &FeatureEnhancer,
) -> Result<AudioBuffer, BaselineError> {
    post_process(input, config, |mag| enhancer.apply(mag))
}
