use crate::stft::StftConfig;

use super::PcsError;

/// Default upper exponent of the PCS schedule.
pub const DEFAULT_GAMMA_MAX: f64 = 1.4;
/// Exponent assigned to the least important band (no stretching).
pub const DEFAULT_GAMMA_MIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow {
    pub f_low: f64,
    pub f_high: f64,
    pub bif: f64,
}

/// Contiguous frequency bands with their band-importance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BandImportanceTable {
    rows: Vec<BandRow>,
}

impl Default for BandImportanceTable {
    /// Critical-band importance weights, 0 to 9.5 kHz.
    fn default() -> Self {
        const ROWS: [(f64, f64, f64); 9] = [
            (0.0, 100.0, 0.000),
            (100.0, 200.0, 0.010),
            (200.0, 300.0, 0.026),
            (300.0, 400.0, 0.041),
            (400.0, 4400.0, 0.057),
            (4400.0, 5300.0, 0.046),
            (5300.0, 6400.0, 0.034),
            (6400.0, 7700.0, 0.023),
            (7700.0, 9500.0, 0.011),
        ];
        Self { rows: ROWS.iter().map(|&(f_low, f_high, bif)| BandRow { f_low, f_high, bif }).collect() }
    }
}

impl BandImportanceTable {
    pub fn new(rows: Vec<BandRow>) -> Result<Self, PcsError> {
        if rows.is_empty() {
            return Err(PcsError::InvalidTable("no rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if !(row.f_low >= 0.0 && row.f_low < row.f_high) {
                return Err(PcsError::InvalidTable(format!("row {i}: need 0 <= f_low < f_high")));
            }
            if !(0.0..=1.0).contains(&row.bif) {
                return Err(PcsError::InvalidTable(format!("row {i}: bif {} outside [0, 1]", row.bif)));
            }
        }
        if let Some(i) = rows.windows(2).position(|w| w[0].f_high != w[1].f_low) {
            return Err(PcsError::InvalidTable(format!("rows {i} and {} are not contiguous", i + 1)));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[BandRow] {
        &self.rows
    }

    fn bif_extremes(&self) -> (f64, f64) {
        self.rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.bif), hi.max(r.bif)))
    }

    /// Row whose half-open range `[f_low, f_high)` contains `freq`.
    pub fn row_index(&self, freq: f64) -> Option<usize> {
        self.rows.iter().position(|r| r.f_low <= freq && freq < r.f_high)
    }
}

/// Maps each band's importance linearly onto `[gamma_min, gamma_max]`:
/// `γ[k] = (gamma_max − gamma_min) / (BIF_max − BIF_min) · BIF[k] + gamma_min`.
///
/// Note the map is anchored at `BIF = 0`, not at `BIF_min`; with the default
/// table the two coincide.
pub fn rescale_bif(table: &BandImportanceTable, gamma_max: f64, gamma_min: f64) -> Result<Vec<f64>, PcsError> {
    if !(gamma_min > 0.0 && gamma_max > gamma_min && gamma_max.is_finite()) {
        return Err(PcsError::InvalidRange(format!(
            "need gamma_max > gamma_min > 0, got gamma_max={gamma_max}, gamma_min={gamma_min}"
        )));
    }
    let (bif_min, bif_max) = table.bif_extremes();
    if bif_max == bif_min {
        return Err(PcsError::DegenerateTable);
    }
    let slope = (gamma_max - gamma_min) / (bif_max - bif_min);
    Ok(table.rows.iter().map(|r| slope * r.bif + gamma_min).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    Fixed(f64),
    Pcs { gamma_max: f64 },
}

/// One exponent per FFT bin.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSchedule {
    gamma_per_bin: Vec<f64>,
    fft_size: usize,
    sample_rate: u32,
    kind: ScheduleKind,
}

impl GammaSchedule {
    /// The same exponent on every bin.
    pub fn fixed(gamma: f64, config: &StftConfig, sample_rate: u32) -> Result<Self, PcsError> {
        config.validate()?;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(PcsError::InvalidRange(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self {
            gamma_per_bin: vec![gamma; config.n_bins()],
            fft_size: config.fft_size,
            sample_rate,
            kind: ScheduleKind::Fixed(gamma),
        })
    }

    /// The band-importance schedule from the default table.
    pub fn pcs(config: &StftConfig, sample_rate: u32, gamma_max: f64) -> Result<Self, PcsError> {
        build_schedule(&BandImportanceTable::default(), config, sample_rate, gamma_max)
    }

    pub fn gamma_per_bin(&self) -> &[f64] {
        &self.gamma_per_bin
    }

    pub fn len(&self) -> usize {
        self.gamma_per_bin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_per_bin.is_empty()
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }
}

/// Assigns each bin the rescaled exponent of the band containing its centre
/// frequency `b · sample_rate / fft_size`; bins outside every band get 1.0.
pub fn build_schedule(
    table: &BandImportanceTable,
    config: &StftConfig,
    sample_rate: u32,
    gamma_max: f64,
) -> Result<GammaSchedule, PcsError> {
    config.validate()?;
    if sample_rate == 0 {
        return Err(PcsError::InvalidRange("sample rate must be positive".into()));
    }
    let band_gamma = rescale_bif(table, gamma_max, DEFAULT_GAMMA_MIN)?;
    let gamma_per_bin = (0..config.n_bins())
        .map(|b| {
            let freq = b as f64 * sample_rate as f64 / config.fft_size as f64;
            table.row_index(freq).map_or(1.0, |k| band_gamma[k])
        })
        .collect();
    Ok(GammaSchedule {
        gamma_per_bin,
        fft_size: config.fft_size,
        sample_rate,
        kind: ScheduleKind::Pcs { gamma_max },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stft::Window;

    fn gamma_for_bif(bif: f64) -> f64 {
        let table = BandImportanceTable::new(vec![
            BandRow { f_low: 0.0, f_high: 1.0, bif: 0.0 },
            BandRow { f_low: 1.0, f_high: 2.0, bif: 0.057 },
            BandRow { f_low: 2.0, f_high: 3.0, bif },
        ])
        .unwrap();
        rescale_bif(&table, 1.4, 1.0).unwrap()[2]
    }

    #[test]
    fn rescale_examples() {
        assert!((gamma_for_bif(0.057) - 1.4).abs() < 1e-12);
        assert!((gamma_for_bif(0.0) - 1.0).abs() < 1e-12);
        assert!((gamma_for_bif(0.026) - 1.1825).abs() < 1e-3);
        assert!((gamma_for_bif(0.026) - (0.4 / 0.057 * 0.026 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn rescale_errors() {
        let flat = BandImportanceTable::new(vec![
            BandRow { f_low: 0.0, f_high: 1.0, bif: 0.02 },
            BandRow { f_low: 1.0, f_high: 2.0, bif: 0.02 },
        ])
        .unwrap();
        assert!(matches!(rescale_bif(&flat, 1.4, 1.0), Err(PcsError::DegenerateTable)));
        let table = BandImportanceTable::default();
        assert!(matches!(rescale_bif(&table, 1.0, 1.0), Err(PcsError::InvalidRange(_))));
        assert!(matches!(rescale_bif(&table, 1.4, 0.0), Err(PcsError::InvalidRange(_))));
    }

    #[test]
    fn table_validation() {
        let gap = vec![
            BandRow { f_low: 0.0, f_high: 100.0, bif: 0.0 },
            BandRow { f_low: 150.0, f_high: 200.0, bif: 0.1 },
        ];
        assert!(BandImportanceTable::new(gap).is_err());
        let bad_bif = vec![BandRow { f_low: 0.0, f_high: 100.0, bif: 1.5 }];
        assert!(BandImportanceTable::new(bad_bif).is_err());
        assert!(BandImportanceTable::new(BandImportanceTable::default().rows().to_vec()).is_ok());
    }

    #[test]
    fn default_table_max_bif() {
        let (lo, hi) = BandImportanceTable::default().bif_extremes();
        assert_eq!((lo, hi), (0.0, 0.057));
    }

    #[test]
    fn schedule_at_16k_512() {
        let s = GammaSchedule::pcs(&StftConfig::default(), 16000, 1.4).unwrap();
        let g = s.gamma_per_bin();
        assert_eq!(g.len(), 257);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[32], 1.4);
        assert!((g[250] - (0.4 / 0.057 * 0.011 + 1.0)).abs() < 1e-12);
        assert!((g[250] - 1.0772).abs() < 1e-4);
        // Bins 13..=140 span [406.25, 4375] Hz.
        assert!(g[13..=140].iter().all(|&v| v == 1.4));
        assert_ne!(g[12], 1.4);
        assert_ne!(g[141], 1.4);
    }

    #[test]
    fn bins_above_table_are_unstretched() {
        let config = StftConfig::new(1024, 256, Window::Hann).unwrap();
        let s = GammaSchedule::pcs(&config, 48000, 1.4).unwrap();
        for (b, &g) in s.gamma_per_bin().iter().enumerate() {
            let f = b as f64 * 48000.0 / 1024.0;
            if f >= 9500.0 {
                assert_eq!(g, 1.0, "bin {b} at {f} Hz");
            }
            assert!((1.0..=1.4).contains(&g));
        }
    }

    #[test]
    fn fixed_schedule() {
        let s = GammaSchedule::fixed(0.7, &StftConfig::default(), 16000).unwrap();
        assert!(s.gamma_per_bin().iter().all(|&g| g == 0.7));
        assert_eq!(s.kind(), ScheduleKind::Fixed(0.7));
        assert!(GammaSchedule::fixed(-1.0, &StftConfig::default(), 16000).is_err());
        assert!(GammaSchedule::fixed(f64::NAN, &StftConfig::default(), 16000).is_err());
    }
}
