//! Scenario description and snapshot synthesis: draws the complex baseband
//! array output `Y` (3N x K) for a configured mixture of SST and DST sources
//! plus sensor noise, and builds the exact asymptotic covariance used as a
//! test oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::manifold::{joint_steering_vector, polarization_vector, ArrayGeometry, Dir, Pol};
use crate::{db_to_linear, Error, Result, SourceKind};

/// Distribution of the emitted sub-signal samples.
///
/// The estimators are second-order methods, so circular Gaussian signals
/// match the covariance model exactly; the constant-modulus variant exists
/// for robustness experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalModel {
    #[default]
    Gaussian,
    /// Constant-modulus QPSK-style symbols with the same per-signal power.
    Qpsk,
}

/// One emitter: direction plus one (SST) or two (DST) polarization states,
/// with per-(sub)signal power on linear scale.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceDescriptor {
    Sst { dir: Dir, pol: Pol, power: f64 },
    Dst { dir: Dir, pols: [Pol; 2], power: f64 },
}

impl SourceDescriptor {
    pub fn kind(&self) -> SourceKind {
        match self {
            SourceDescriptor::Sst { .. } => SourceKind::Sst,
            SourceDescriptor::Dst { .. } => SourceKind::Dst,
        }
    }

    pub fn dir(&self) -> Dir {
        match self {
            SourceDescriptor::Sst { dir, .. } | SourceDescriptor::Dst { dir, .. } => *dir,
        }
    }

    /// Per-(sub)signal power, linear scale.
    pub fn power(&self) -> f64 {
        match self {
            SourceDescriptor::Sst { power, .. } | SourceDescriptor::Dst { power, .. } => *power,
        }
    }

    /// Contribution to the signal-subspace dimension: 1 for SST, 2 for DST.
    pub fn signal_dims(&self) -> usize {
        match self {
            SourceDescriptor::Sst { .. } => 1,
            SourceDescriptor::Dst { .. } => 2,
        }
    }

    fn with_power(&self, power: f64) -> SourceDescriptor {
        match self {
            SourceDescriptor::Sst { dir, pol, .. } => SourceDescriptor::Sst {
                dir: *dir,
                pol: *pol,
                power,
            },
            SourceDescriptor::Dst { dir, pols, .. } => SourceDescriptor::Dst {
                dir: *dir,
                pols: *pols,
                power,
            },
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !self.power().is_finite() || self.power() <= 0.0 {
            return Err(Error::Config(format!(
                "sources[{index}]: power must be positive, got {}",
                self.power()
            )));
        }
        match self {
            SourceDescriptor::Sst { pol, .. } => {
                if pol.is_linear() {
                    log::warn!(
                        "sources[{index}]: exactly linear polarization {pol}; \
                         subspace search has known steering ambiguities there"
                    );
                }
            }
            SourceDescriptor::Dst { pols, .. } => {
                let ga = polarization_vector(&pols[0]);
                let gb = polarization_vector(&pols[1]);
                let det = ga[0] * gb[1] - ga[1] * gb[0];
                if det.norm() < 1e-12 {
                    return Err(Error::DegenerateDst(format!(
                        "sources[{index}]: polarization vectors of {} and {} are parallel",
                        pols[0], pols[1]
                    )));
                }
                for pol in pols {
                    if pol.is_linear() {
                        log::warn!(
                            "sources[{index}]: exactly linear polarization {pol}; \
                             subspace search has known steering ambiguities there"
                        );
                    }
                }
            }
        }
        Ok(())
    }
}

/// Full simulation scenario: array geometry, source mixture, and noise power
/// (linear scale).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: ArrayGeometry,
    pub sources: Vec<SourceDescriptor>,
    /// Sensor noise variance per output element, linear scale.
    pub noise_power: f64,
    pub signal_model: SignalModel,
    /// Correlation coefficient between the two sub-signals of each DST
    /// source. The default 0 keeps the rank-2 DST signature the norm
    /// estimator relies on; |rho| must stay below 1.
    pub dst_correlation: f64,
}

impl Scenario {
    pub fn new(
        geometry: ArrayGeometry,
        sources: Vec<SourceDescriptor>,
        noise_power: f64,
    ) -> Result<Self> {
        let scenario = Self {
            geometry,
            sources,
            noise_power,
            signal_model: SignalModel::default(),
            dst_correlation: 0.0,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn num_sst(&self) -> usize {
        self.sources.iter().filter(|s| s.kind() == SourceKind::Sst).count()
    }

    pub fn num_dst(&self) -> usize {
        self.sources.iter().filter(|s| s.kind() == SourceKind::Dst).count()
    }

    /// Total signal-subspace dimension `M1 + 2 M2`.
    pub fn signal_dims(&self) -> usize {
        self.sources.iter().map(|s| s.signal_dims()).sum()
    }

    /// Copy of the scenario with every per-(sub)signal power set to the given
    /// SNR relative to the noise power. SNR is defined per sub-signal, so a
    /// DST source carries twice the total power of an SST source at the same
    /// setting.
    pub fn with_snr_db(&self, snr_db: f64) -> Scenario {
        let power = self.noise_power * db_to_linear(snr_db);
        Scenario {
            geometry: self.geometry,
            sources: self.sources.iter().map(|s| s.with_power(power)).collect(),
            noise_power: self.noise_power,
            signal_model: self.signal_model,
            dst_correlation: self.dst_correlation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.noise_power.is_finite() || self.noise_power < 0.0 {
            return Err(Error::Config(format!(
                "noise power must be nonnegative, got {}",
                self.noise_power
            )));
        }
        if self.signal_dims() >= self.geometry.output_dim() {
            return Err(Error::Config(format!(
                "identifiability requires M1 + 2*M2 < 3N, got {} >= {}",
                self.signal_dims(),
                self.geometry.output_dim()
            )));
        }
        if !self.dst_correlation.is_finite() || self.dst_correlation.abs() >= 1.0 {
            return Err(Error::Config(format!(
                "DST sub-signal correlation must satisfy |rho| < 1, got {}",
                self.dst_correlation
            )));
        }
        for (i, s) in self.sources.iter().enumerate() {
            s.validate(i)?;
        }
        Ok(())
    }
}

/// Complex 3N x K block of received snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: DMatrix<Complex64>,
}

impl SnapshotMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() == 0 || data.nrows() % 3 != 0 {
            return Err(Error::Config(format!(
                "snapshot matrix must have 3N rows, got {}",
                data.nrows()
            )));
        }
        if data.ncols() == 0 {
            return Err(Error::Config("snapshot matrix needs at least one snapshot".into()));
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn num_sensors(&self) -> usize {
        self.data.nrows() / 3
    }

    pub fn output_dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn num_snapshots(&self) -> usize {
        self.data.ncols()
    }
}

/// Draw one signal sample with the given power under the chosen model.
fn sample_signal<R: Rng>(rng: &mut R, power: f64, model: SignalModel) -> Complex64 {
    match model {
        SignalModel::Gaussian => {
            let scale = (power / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(scale * re, scale * im)
        }
        SignalModel::Qpsk => {
            let amp = (power / 2.0).sqrt();
            let sym = rng.random_range(0..4u8);
            let re = if sym & 1 == 0 { amp } else { -amp };
            let im = if sym & 2 == 0 { amp } else { -amp };
            Complex64::new(re, im)
        }
    }
}

/// Generate `k` snapshots of the scenario. Deterministic in `seed`: the same
/// seed yields a bit-identical matrix.
///
/// Sub-signals are i.i.d. across snapshots; DST sub-signal pairs are mutually
/// uncorrelated unless `dst_correlation` says otherwise; sensor noise is
/// i.i.d. circular complex Gaussian with variance `noise_power` per output
/// element.
pub fn generate_snapshots(scenario: &Scenario, k: usize, seed: u64) -> Result<SnapshotMatrix> {
    scenario.validate()?;
    if k == 0 {
        return Err(Error::Config("snapshot count K must be at least 1".into()));
    }

    let dim = scenario.geometry.output_dim();
    let geom = &scenario.geometry;

    // Steering vectors are fixed over the block; draw order per snapshot is
    // sources (in declaration order) then noise, which pins the stream layout
    // for reproducibility.
    enum Emitter {
        Single(DVector<Complex64>),
        Pair(DVector<Complex64>, DVector<Complex64>),
    }
    let emitters: Vec<(Emitter, f64)> = scenario
        .sources
        .iter()
        .map(|s| match s {
            SourceDescriptor::Sst { dir, pol, power } => {
                (Emitter::Single(joint_steering_vector(dir, pol, geom)), *power)
            }
            SourceDescriptor::Dst { dir, pols, power } => (
                Emitter::Pair(
                    joint_steering_vector(dir, &pols[0], geom),
                    joint_steering_vector(dir, &pols[1], geom),
                ),
                *power,
            ),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = scenario.dst_correlation;
    let mix = (1.0 - rho * rho).sqrt();
    let noise_scale = (scenario.noise_power / 2.0).sqrt();

    let mut y = DMatrix::zeros(dim, k);
    for col in 0..k {
        let mut column = y.column_mut(col);
        for (emitter, power) in &emitters {
            match emitter {
                Emitter::Single(q) => {
                    let s = sample_signal(&mut rng, *power, scenario.signal_model);
                    column.axpy(s, q, Complex64::new(1.0, 0.0));
                }
                Emitter::Pair(qa, qb) => {
                    let s1 = sample_signal(&mut rng, *power, scenario.signal_model);
                    let s2 = sample_signal(&mut rng, *power, scenario.signal_model);
                    let s2 = s1.scale(rho) + s2.scale(mix);
                    column.axpy(s1, qa, Complex64::new(1.0, 0.0));
                    column.axpy(s2, qb, Complex64::new(1.0, 0.0));
                }
            }
        }
        for i in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            column[i] += Complex64::new(noise_scale * re, noise_scale * im);
        }
    }
    SnapshotMatrix::new(y)
}

/// Exact asymptotic covariance `R = sum sigma^2 q q^H + sum sigma^2 Q C Q^H
/// + sigma_n^2 I`, with `C` the 2x2 sub-signal correlation of each DST
/// source. Hermitian positive semidefinite by construction.
pub fn exact_covariance(scenario: &Scenario) -> DMatrix<Complex64> {
    let dim = scenario.geometry.output_dim();
    let geom = &scenario.geometry;
    let mut r = DMatrix::from_diagonal_element(
        dim,
        dim,
        Complex64::new(scenario.noise_power, 0.0),
    );
    let rho = scenario.dst_correlation;
    for source in &scenario.sources {
        match source {
            SourceDescriptor::Sst { dir, pol, power } => {
                let q = joint_steering_vector(dir, pol, geom);
                rank_one_update(&mut r, &q, &q, *power);
            }
            SourceDescriptor::Dst { dir, pols, power } => {
                let qa = joint_steering_vector(dir, &pols[0], geom);
                let qb = joint_steering_vector(dir, &pols[1], geom);
                rank_one_update(&mut r, &qa, &qa, *power);
                rank_one_update(&mut r, &qb, &qb, *power);
                if rho != 0.0 {
                    rank_one_update(&mut r, &qa, &qb, power * rho);
                    rank_one_update(&mut r, &qb, &qa, power * rho);
                }
            }
        }
    }
    r
}

/// `r += scale * u v^H`
fn rank_one_update(
    r: &mut DMatrix<Complex64>,
    u: &DVector<Complex64>,
    v: &DVector<Complex64>,
    scale: f64,
) {
    for j in 0..r.ncols() {
        let vj = v[j].conj().scale(scale);
        for i in 0..r.nrows() {
            r[(i, j)] += u[i] * vj;
        }
    }
}
