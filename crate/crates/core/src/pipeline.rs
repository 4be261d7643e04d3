//! End-to-end runs: assemble `τ`, diagonalize, build `D_log^(λ,N)`, compute its
//! spectrum and compare it with the zeta zeros. Intermediate results can be
//! cached on disk under a key of `(λ, N, digits, format version)`.

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, ErrorKind};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rug::Float;
use serde::Serialize;

use crate::dirac_pert::{PerturbedOperator, SpectrumResult};
use crate::error::{Error, Result};
use crate::io;
use crate::par::Execution;
use crate::precision::{log2_abs, to_decimal, PrecisionContext};
use crate::spectral::{even_simple_report, jacobi_eig, EigenDecomposition, EvenSimpleReport};
use crate::weil_form::{assemble, LambdaSpec, WeilMatrix, WeilParams};
use crate::xi_oracle::{zeta_zeros, ZeroTable};

/// Smallest accepted decimal precision.
pub const MIN_DIGITS: u32 = 40;

/// How long to wait for another process holding the cache lock.
const LOCK_TIMEOUT: Duration = Duration::from_secs(3600);

/// Parameters of one `(λ, N, digits)` run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub lambda: LambdaSpec,
    pub n: usize,
    pub digits: u32,
    pub cache: Option<PathBuf>,
    pub exec: Execution,
}

impl RunConfig {
    pub fn new(lambda: LambdaSpec, n: usize, digits: u32) -> Self {
        RunConfig {
            lambda,
            n,
            digits,
            cache: None,
            exec: Execution::default(),
        }
    }

    pub fn with_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache = Some(dir.into());
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn params(&self) -> Result<WeilParams> {
        if self.digits < MIN_DIGITS {
            return Err(Error::InvalidParams(format!(
                "digits = {} is below the minimum of {MIN_DIGITS}",
                self.digits
            )));
        }
        let ctx = PrecisionContext::from_digits(self.digits)?;
        WeilParams::new(self.lambda.clone(), self.n, ctx)
    }

    /// Cache file stem for this run.
    pub fn cache_key(&self) -> String {
        let lambda: String = self
            .lambda
            .to_string()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
            .collect();
        format!(
            "lambda-{lambda}_N{}_d{}_{}",
            self.n,
            self.digits,
            io::FORMAT_VERSION
        )
    }
}

/// Exclusive lock on a cache directory, released on drop.
pub struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        Self::acquire_within(dir, LOCK_TIMEOUT)
    }

    pub fn acquire_within(dir: &Path, timeout: Duration) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".lock");
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(CacheLock { path }),
                Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                    if start.elapsed() >= timeout {
                        return Err(Error::CacheMismatch(format!(
                            "cache directory {} is locked by another run",
                            dir.display()
                        )));
                    }
                    std::thread::sleep(Duration::from_millis(200));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_atomic(path: &Path, write: impl FnOnce(BufWriter<File>) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    write(BufWriter::new(File::create(&tmp)?))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn check_params(found: &WeilParams, expected: &WeilParams, path: &Path) -> Result<()> {
    if found.lambda_spec != expected.lambda_spec
        || found.n != expected.n
        || found.ctx.bits() != expected.ctx.bits()
    {
        return Err(Error::CacheMismatch(format!(
            "{} holds lambda={} N={} bits={}, expected lambda={} N={} bits={}",
            path.display(),
            found.lambda_spec,
            found.n,
            found.ctx.bits(),
            expected.lambda_spec,
            expected.n,
            expected.ctx.bits()
        )));
    }
    Ok(())
}

/// Assembles `τ`, reading and writing the cache when configured.
pub fn weil_matrix(config: &RunConfig) -> Result<WeilMatrix> {
    let params = config.params()?;
    let Some(dir) = &config.cache else {
        return assemble(&params, config.exec);
    };
    let _lock = CacheLock::acquire(dir)?;
    let path = dir.join(format!("{}.matrix", config.cache_key()));
    if path.exists() {
        let m = io::read_matrix(BufReader::new(File::open(&path)?))?;
        check_params(&m.params, &params, &path)?;
        return Ok(m);
    }
    let m = assemble(&params, config.exec)?;
    write_atomic(&path, |w| io::write_matrix(w, &m))?;
    Ok(m)
}

/// Diagonalizes `τ`, reading and writing the cache when configured.
pub fn eigen(config: &RunConfig, m: &WeilMatrix) -> Result<EigenDecomposition> {
    let ctx = m.params.ctx;
    let Some(dir) = &config.cache else {
        return jacobi_eig(&m.tau, &ctx);
    };
    let _lock = CacheLock::acquire(dir)?;
    let path = dir.join(format!("{}.eig", config.cache_key()));
    if path.exists() {
        let (header, d) = io::read_eigen(BufReader::new(File::open(&path)?))?;
        if header.lambda != m.params.lambda_spec || header.n != m.params.n || header.bits != ctx.bits()
        {
            return Err(Error::CacheMismatch(format!(
                "{} does not match the requested run",
                path.display()
            )));
        }
        return Ok(d);
    }
    let d = jacobi_eig(&m.tau, &ctx)?;
    write_atomic(&path, |w| io::write_eigen(w, &m.params, &d))?;
    Ok(d)
}

/// Zeta zeros at `digits`, reading and writing the cache when configured.
pub fn zeros(count: usize, digits: u32, cache: Option<&Path>, exec: Execution) -> Result<ZeroTable> {
    let ctx = PrecisionContext::from_digits(digits)?;
    let Some(dir) = cache else {
        return zeta_zeros(count, &ctx, exec);
    };
    let _lock = CacheLock::acquire(dir)?;
    let path = dir.join(format!(
        "zeros_c{count}_d{digits}_{}.zeros",
        io::FORMAT_VERSION
    ));
    if path.exists() {
        let t = io::read_zeros(BufReader::new(File::open(&path)?))?;
        if t.len() != count || t.meta.bits != ctx.bits() {
            return Err(Error::CacheMismatch(format!(
                "{} does not match the requested table",
                path.display()
            )));
        }
        return Ok(t);
    }
    let t = zeta_zeros(count, &ctx, exec)?;
    write_atomic(&path, |w| io::write_zeros(w, &t))?;
    Ok(t)
}

/// Everything produced by one `(λ, N, digits)` run.
#[derive(Clone, Debug)]
pub struct SpectrumRun {
    pub matrix: WeilMatrix,
    pub eigen: EigenDecomposition,
    pub report: EvenSimpleReport,
    pub operator: PerturbedOperator,
    pub spectrum: SpectrumResult,
}

/// Runs the construction up to the spectrum. Fails with
/// [`Error::EvenSimpleViolation`] before building the operator if the check fails.
pub fn spectrum_run(config: &RunConfig) -> Result<SpectrumRun> {
    let matrix = weil_matrix(config)?;
    let eigen = eigen(config, &matrix)?;
    let report = even_simple_report(&eigen, &matrix.params.ctx);
    let operator = PerturbedOperator::from_decomposition(matrix.params.clone(), &eigen)?;
    let spectrum = operator.secular_roots(config.exec)?;
    Ok(SpectrumRun {
        matrix,
        eigen,
        report,
        operator,
        spectrum,
    })
}

/// Outcome of one invariant check.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: &Float, bound: &Float) -> InvariantCheck {
    InvariantCheck {
        name,
        passed: value <= bound,
        detail: format!("{} <= {}", sci3(value), sci3(bound)),
    }
}

/// Runs the structural, spectral and determinant invariants on a finished run.
pub fn verify_run(run: &SpectrumRun) -> Vec<InvariantCheck> {
    let m = &run.matrix;
    let ctx = m.params.ctx;
    let prec = ctx.bits();
    let half = ctx.tol_half();
    let quarter = ctx.tol_quarter();
    let norm = m.tau.frobenius_norm();
    let scaled_half = Float::with_val(prec, &half * &norm);
    let mut out = vec![
        check("matrix parity", &m.parity_defect(), &half),
        check("difference-quotient structure", &m.structure_defect(), &half),
        check("telescoping identity", &m.telescoping_defect(), &half),
        check("eigenpair residuals", &run.eigen.max_residual(&m.tau), &scaled_half),
        check("eigenvector orthonormality", &run.eigen.orthogonality_defect(), &half),
    ];
    out.push(InvariantCheck {
        name: "even-simple",
        passed: run.report.passed(),
        detail: format!(
            "gap {} > {}, parity {} < {}",
            sci3(&run.report.gap),
            sci3(&run.report.threshold_gap),
            sci3(&run.report.parity_defect),
            sci3(&run.report.threshold_parity)
        ),
    });
    let expected = 2 * m.params.n;
    out.push(InvariantCheck {
        name: "secular root count",
        passed: run.spectrum.roots.len() == expected,
        detail: format!("{} roots, expected {expected}", run.spectrum.roots.len()),
    });
    let mut mass = Float::new(prec);
    for v in &run.operator.xi {
        mass += Float::with_val(prec, v.abs_ref());
    }
    let residual_bound = Float::with_val(prec, &quarter * &mass);
    let worst_residual = run
        .spectrum
        .residuals
        .iter()
        .fold(Float::new(prec), |acc, r| acc.max(r));
    out.push(check("secular residuals", &worst_residual, &residual_bound));
    out.push(check(
        "spectrum symmetry",
        &run.spectrum.symmetry_defect(),
        &quarter,
    ));
    let mut worst_identity = Float::new(prec);
    for k in 0..8u32 {
        let re = Float::with_val(prec, k) * 0.7f64 - 3.1f64;
        let im = Float::with_val(prec, k) * 0.3f64 - 1.05f64;
        let z = rug::Complex::with_val(prec, (re, im));
        let a = run.operator.det_reg(&z);
        let b = run.operator.det_reg_product(&z);
        let scale = crate::precision::cabs(&a).max(&Float::with_val(prec, 1));
        let rel = crate::precision::cabs(&(a - b)) / scale;
        worst_identity = worst_identity.max(&rel);
    }
    out.push(check("determinant identity", &worst_identity, &half));
    let det_check = match run
        .operator
        .verify_det_spectrum(&run.spectrum, m.params.n)
    {
        Ok(r) => InvariantCheck {
            name: "xi-hat zeros match spectrum",
            passed: true,
            detail: format!(
                "{} zeros, worst relative |xi_hat| {}",
                r.zeros_checked,
                sci3(&r.max_relative_residual)
            ),
        },
        Err(e) => InvariantCheck {
            name: "xi-hat zeros match spectrum",
            passed: false,
            detail: e.to_string(),
        },
    };
    out.push(det_check);
    out
}

/// `|eig_k − zero_k|` for one row.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub k: usize,
    pub eigenvalue: Float,
    pub zero: Float,
    pub diff: Float,
}

impl ComparisonRow {
    /// The difference in 3-significant-digit scientific notation, e.g. `2.44e-55`.
    pub fn diff_sci(&self) -> String {
        sci3(&self.diff)
    }

    pub fn log10_diff(&self) -> f64 {
        log2_abs(&self.diff) * std::f64::consts::LOG10_2
    }
}

/// `x` rendered as `d.dde±n`.
pub fn sci3(x: &Float) -> String {
    if x.is_zero() {
        return "0.00e0".into();
    }
    let text = x.to_string_radix(10, Some(3));
    match text.split_once('e') {
        Some((m, e)) => format!("{m}e{}", e.parse::<i64>().unwrap_or(0)),
        None => format!("{text}e0"),
    }
}

/// Pairs the k-th positive spectrum point with the k-th zero for each requested row.
pub fn compare(spectrum: &SpectrumResult, zeros: &ZeroTable, rows: &[usize]) -> Vec<ComparisonRow> {
    let positive = spectrum.positive();
    rows.iter()
        .filter_map(|&k| {
            let eig = positive.get(k.checked_sub(1)?)?;
            let zero = &zeros.get(k)?.value;
            let diff = Float::with_val(eig.prec(), eig - zero).abs();
            Some(ComparisonRow {
                k,
                eigenvalue: eig.clone(),
                zero: zero.clone(),
                diff,
            })
        })
        .collect()
}

/// Machine-readable comparison row.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRecord {
    pub k: usize,
    pub eigenvalue: String,
    pub zero: String,
    pub diff: String,
    pub log10_diff: f64,
}

impl From<&ComparisonRow> for ComparisonRecord {
    fn from(r: &ComparisonRow) -> Self {
        ComparisonRecord {
            k: r.k,
            eigenvalue: to_decimal(&r.eigenvalue, 40),
            zero: to_decimal(&r.zero, 40),
            diff: r.diff_sci(),
            log10_diff: r.log10_diff(),
        }
    }
}

/// `k,log10_diff` rows for plotting the error profile.
pub fn figure_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("k,log10_diff\n");
    for r in rows {
        out.push_str(&format!("{},{:.4}\n", r.k, r.log10_diff()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci3_formats() {
        assert_eq!(sci3(&Float::with_val(64, 2.4449e-5)), "2.44e-5");
        let tiny = Float::with_val(128, Float::parse("2.44e-400").unwrap());
        assert_eq!(sci3(&tiny), "2.44e-400");
        assert_eq!(sci3(&Float::new(64)), "0.00e0");
    }

    #[test]
    fn cache_key_is_filesystem_safe() {
        let c = RunConfig::new(LambdaSpec::Sqrt(13), 120, 200);
        assert_eq!(c.cache_key(), "lambda-sqrt_13_N120_d200_v1");
    }

    #[test]
    fn lock_excludes_second_holder() {
        let dir = tempfile::tempdir().unwrap();
        let first = CacheLock::acquire(dir.path()).unwrap();
        assert!(CacheLock::acquire_within(dir.path(), Duration::from_millis(300)).is_err());
        drop(first);
        assert!(CacheLock::acquire_within(dir.path(), Duration::from_millis(300)).is_ok());
    }

    #[test]
    fn cached_run_matches_fresh_run() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig::new(LambdaSpec::Decimal("2".into()), 3, 45)
            .with_cache(dir.path())
            .with_execution(Execution::Sequential);
        let first = weil_matrix(&config).unwrap();
        let second = weil_matrix(&config).unwrap();
        assert_eq!(first.tau, second.tau);
        let e1 = eigen(&config, &first).unwrap();
        let e2 = eigen(&config, &first).unwrap();
        assert_eq!(e1.values, e2.values);
    }

    #[test]
    fn mismatched_cache_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = RunConfig::new(LambdaSpec::Decimal("2".into()), 2, 45).with_cache(dir.path());
        let m = weil_matrix(&a).unwrap();
        let b = RunConfig::new(LambdaSpec::Decimal("2".into()), 3, 45).with_cache(dir.path());
        let wrong = dir.path().join(format!("{}.matrix", b.cache_key()));
        let mut buf = Vec::new();
        io::write_matrix(&mut buf, &m).unwrap();
        fs::write(&wrong, buf).unwrap();
        assert!(matches!(weil_matrix(&b), Err(Error::CacheMismatch(_))));
    }
}
