//! Command-line front end: subcommands, run configuration, report output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::{index_report, IndexConfig, RangeMode, Subdiagonal};
use crate::jlo::chern::{cocycle_residual, default_samples, MAX_PAIRING_TERMS};
use crate::jlo::{pairing, pairing_oracle, Jlo};
use crate::pw::{build_u, build_u_margin, spectral_data_check, SpectralData, UnitaryU};
use crate::qalgebra::{
    algebra_check, haar_check, invariance_check, lemma_check, AlgebraCheckConfig, Functional, LemmaConfig, Monomial,
    MultiFunctional,
};
use crate::report::{CheckRecord, Report, Status};
use crate::scalar::{parse_rational, rat_to_f64, Rat};
use crate::twisted::{check_identities, CheckConfig, MatrixHandle, SymbolicHandle};

#[derive(Parser, Debug)]
#[command(name = "suq2", version, about = "Verification pipelines for the twisted JLO cocycle on SU_q(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Relations, associativity, coproduct and counit identities.
    AlgebraCheck,
    /// Invariance, modular property and positivity of the Haar state.
    HaarCheck,
    /// Convolution invariance of h and the coboundary/convolution lemma.
    InvarianceCheck,
    /// b^2 = 0, B^2 = 0, bB + Bb = 0 on test algebras.
    ComplexCheck,
    /// Peter-Weyl representation and the unitary u.
    RepBuild,
    /// Conditions on the twisted spectral data.
    SpectralCheck,
    /// JLO cocycle residual, pairing series and oracle agreement.
    JloPair,
    /// Cokernel, p_n and the twisted index.
    Index,
    /// Every check above.
    All,
}

impl Command {
    pub const SINGLE: [Command; 8] = [
        Command::AlgebraCheck,
        Command::HaarCheck,
        Command::InvarianceCheck,
        Command::ComplexCheck,
        Command::RepBuild,
        Command::SpectralCheck,
        Command::JloPair,
        Command::Index,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::HaarCheck => "haar-check",
            Command::InvarianceCheck => "invariance-check",
            Command::ComplexCheck => "complex-check",
            Command::RepBuild => "rep-build",
            Command::SpectralCheck => "spectral-check",
            Command::JloPair => "jlo-pair",
            Command::Index => "index",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Deformation parameter, 0 < q < 1 ("1/2", "0.3"; exponent notation only with --mode float).
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub n2max: Option<u32>,
    /// Highest pairing term N.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Extra shells used when building u.
    #[arg(long, global = true)]
    pub u_margin: Option<u32>,
    /// Plain key=value file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run every pipeline on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

/// Resolved configuration, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub q: String,
    #[serde(skip)]
    pub q_exact: Rat,
    pub q_value: f64,
    pub n2max: u32,
    pub terms: usize,
    pub tol: f64,
    pub seed: u64,
    pub mode: Mode,
    pub format: Format,
    pub out_dir: PathBuf,
    pub u_margin: u32,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q_exact = Rat::new(1.into(), 2.into());
        RunConfig {
            q: "1/2".into(),
            q_exact,
            q_value: 0.5,
            n2max: 8,
            terms: 3,
            tol: 1e-8,
            seed: 42,
            mode: Mode::Exact,
            format: Format::Json,
            out_dir: PathBuf::from("reports"),
            u_margin: 6,
            exec: Exec::default(),
        }
    }
}

/// Reads `q` according to the mode: exact mode takes fractions and plain
/// decimals read exactly, float mode any float literal or fraction.
pub fn parse_q(text: &str, mode: Mode) -> Result<(Rat, f64)> {
    let t = text.trim();
    let q = match mode {
        Mode::Exact => {
            if t.contains(['e', 'E']) {
                return Err(Error::Config(format!("q = {t:?}: exponent notation needs --mode float")));
            }
            parse_rational(t)?
        }
        Mode::Float => {
            if t.contains('/') {
                parse_rational(t)?
            } else {
                let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a float: {t:?}")))?;
                if !v.is_finite() {
                    return Err(Error::Config(format!("q must be finite, got {t:?}")));
                }
                crate::scalar::rational_from_f64(v)
            }
        }
    };
    if q <= Rat::zero() || q >= Rat::one() {
        return Err(Error::Config(format!("q must satisfy 0 < q < 1, got {t}")));
    }
    let v = rat_to_f64(&q);
    Ok((q, v))
}

/// `key = value` lines; `#` starts a comment; keys are flag names with `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value for {key}: {v:?}")))
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let file = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let mut q_text = None;
        for (k, v) in &file {
            match k.as_str() {
                "q" => q_text = Some(v.clone()),
                "n2max" => cfg.n2max = parse_value(k, v)?,
                "terms" => cfg.terms = parse_value(k, v)?,
                "tol" => cfg.tol = parse_value(k, v)?,
                "seed" => cfg.seed = parse_value(k, v)?,
                "u-margin" => cfg.u_margin = parse_value(k, v)?,
                "out-dir" => cfg.out_dir = PathBuf::from(v),
                "mode" => cfg.mode = Mode::from_str(v, true).map_err(Error::Config)?,
                "format" => cfg.format = Format::from_str(v, true).map_err(Error::Config)?,
                "sequential" => {
                    if parse_value::<bool>(k, v)? {
                        cfg.exec = Exec::Sequential;
                    }
                }
                other => return Err(Error::Config(format!("unknown config key {other:?}"))),
            }
        }
        if let Some(v) = &flags.q {
            q_text = Some(v.clone());
        }
        cfg.n2max = flags.n2max.unwrap_or(cfg.n2max);
        cfg.terms = flags.terms.unwrap_or(cfg.terms);
        cfg.tol = flags.tol.unwrap_or(cfg.tol);
        cfg.seed = flags.seed.unwrap_or(cfg.seed);
        cfg.u_margin = flags.u_margin.unwrap_or(cfg.u_margin);
        cfg.mode = flags.mode.unwrap_or(cfg.mode);
        cfg.format = flags.format.unwrap_or(cfg.format);
        if let Some(d) = &flags.out_dir {
            cfg.out_dir = d.clone();
        }
        if flags.sequential {
            cfg.exec = Exec::Sequential;
        }
        if let Some(t) = q_text {
            let (exact, value) = parse_q(&t, cfg.mode)?;
            cfg.q = exact.to_string();
            cfg.q_exact = exact;
            cfg.q_value = value;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.terms > MAX_PAIRING_TERMS {
            return Err(Error::Config(format!("terms must be at most {MAX_PAIRING_TERMS}, got {}", self.terms)));
        }
        Ok(())
    }

    /// Limits that depend on which pipelines run.
    pub fn validate_for(&self, command: Command) -> Result<()> {
        let engine = matches!(command, Command::JloPair | Command::All);
        if engine && self.n2max > MAX_ENGINE_N2MAX {
            return Err(Error::Config(format!("jlo-pair needs n2max ≤ {MAX_ENGINE_N2MAX}, got {}", self.n2max)));
        }
        if command == Command::Index && self.n2max == 0 {
            return Err(Error::Config("index needs n2max ≥ 1".into()));
        }
        Ok(())
    }
}

/// Shell limit of the trace-chain engine.
pub const MAX_ENGINE_N2MAX: u32 = 15;

/// Shared state across the pipelines of one run.
pub struct Pipelines {
    pub cfg: RunConfig,
    sd: Option<Arc<SpectralData>>,
    u: Option<UnitaryU>,
}

fn error_check(name: &str, e: &Error) -> CheckRecord {
    CheckRecord::new(format!("{name}: pipeline error"), Status::Fail).with("error", e.to_string())
}

impl Pipelines {
    pub fn new(cfg: RunConfig) -> Self {
        Pipelines { cfg, sd: None, u: None }
    }

    fn exec(&self) -> Exec {
        self.cfg.exec
    }

    pub fn spectral(&mut self) -> Result<Arc<SpectralData>> {
        if self.sd.is_none() {
            let basis = crate::pw::PWBasis::build_exact(self.cfg.q_exact.clone(), self.cfg.n2max, self.exec())?;
            self.sd = Some(Arc::new(SpectralData::new(Arc::new(basis), self.exec())));
        }
        Ok(self.sd.clone().expect("just built"))
    }

    pub fn unitary(&mut self) -> Result<UnitaryU> {
        if self.u.is_none() {
            let sd = self.spectral()?;
            self.u = Some(build_u_margin(&sd, self.cfg.tol, self.cfg.u_margin, self.exec())?);
        }
        Ok(self.u.clone().expect("just built"))
    }

    fn algebra_cfg(&self) -> AlgebraCheckConfig {
        AlgebraCheckConfig {
            q: self.cfg.q_value,
            seed: self.cfg.seed,
            exact: self.cfg.mode == Mode::Exact,
            tol: self.cfg.tol,
            ..Default::default()
        }
    }

    /// Runs one subcommand. Pipeline errors become failing checks.
    pub fn run(&mut self, command: Command) -> Report {
        let mut report = match command {
            Command::All => {
                let mut all = Report::new("all");
                for c in Command::SINGLE {
                    all.extend(self.run(c));
                }
                all
            }
            Command::AlgebraCheck => algebra_check(&self.algebra_cfg(), self.exec()),
            Command::HaarCheck => haar_check(&self.algebra_cfg(), 200, self.exec()),
            Command::InvarianceCheck => self.invariance(),
            Command::ComplexCheck => self.complex(),
            Command::RepBuild => self.guard(command, Self::rep_build),
            Command::SpectralCheck => {
                self.guard(command, |p| -> Result<Report> { Ok(spectral_data_check(&*p.spectral()?, p.exec())) })
            }
            Command::JloPair => self.guard(command, Self::jlo_pair),
            Command::Index => self.guard(command, |p| {
                let cfg = IndexConfig {
                    q: p.cfg.q_value,
                    n2max: p.cfg.n2max,
                    convention: Subdiagonal::Corrected,
                    range_mode: RangeMode::Consecutive,
                };
                index_report(&cfg, p.exec())
            }),
        };
        report.command = command.name().to_string();
        report.config = serde_json::to_value(&self.cfg).unwrap_or_default();
        report
    }

    fn guard(&mut self, command: Command, f: impl FnOnce(&mut Self) -> Result<Report>) -> Report {
        match f(self) {
            Ok(r) => r,
            Err(e) => {
                let mut r = Report::new(command.name());
                r.push(error_check(command.name(), &e));
                r
            }
        }
    }

    fn invariance(&self) -> Report {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut witnesses =
            vec![Functional::Counit, Functional::delta(Monomial::ALPHA), Functional::delta(Monomial::new(0, 1, 1))];
        witnesses.extend((0..3).map(|_| Functional::random(&mut rng, 3, 5)));
        let h = MultiFunctional::Single(Functional::Haar);
        let mut report = Report::new("invariance-check");
        let exec = self.exec();
        report.timed("haar_invariance", || invariance_check(&h, &witnesses, 6, exec).checks);
        let lemma = LemmaConfig { q: self.cfg.q_value, seed: self.cfg.seed, ..Default::default() };
        report.timed("lemma", || lemma_check(&lemma, exec));
        report
    }

    fn complex(&self) -> Report {
        let cc = CheckConfig { seed: self.cfg.seed, float_tol: self.cfg.tol, exec: self.exec(), ..Default::default() };
        let mut report = Report::new("complex-check");
        let exact = self.cfg.mode == Mode::Exact;
        report.timed("matrices", || {
            let mut checks = Vec::new();
            if exact {
                checks.extend(check_identities(Arc::new(MatrixHandle::diagonal_twist(3)), &cc).checks);
                checks.extend(check_identities(Arc::new(MatrixHandle::<Rat>::untwisted(2)), &cc).checks);
            } else {
                checks.extend(check_identities(Arc::new(MatrixHandle::with_weights(&[1.0, 3.0])), &cc).checks);
                let plain = MatrixHandle::<num_complex::Complex64>::untwisted(2);
                checks.extend(check_identities(Arc::new(plain), &cc).checks);
            }
            checks
        });
        report.timed("symbolic", || {
            let mut checks = check_identities(Arc::new(SymbolicHandle::new(2, 1)), &cc).checks;
            checks.extend(check_identities(Arc::new(SymbolicHandle::new(2, 0)), &cc).checks);
            checks
        });
        report
    }
}

/// Truncation at which pairing terms are compared with the dense oracles.
pub const ORACLE_N2MAX: u32 = 2;
/// Terms also checked by nested quadrature; its cost grows like `15^(2n+1)`.
pub const QUADRATURE_TERMS: usize = 1;
/// Cocycle residual gate and the truncation from which it applies.
pub const COCYCLE_TOL: f64 = 1e-6;
pub const COCYCLE_GATE_N2MAX: u32 = 8;
pub const ORACLE_TOL: f64 = 1e-8;

impl Pipelines {
    fn rep_build(&mut self) -> Result<Report> {
        let mut report = Report::new("rep-build");
        let tol = self.cfg.tol;
        let exec = self.exec();
        let mut sd = None;
        let mut err = None;
        report.timed("basis", || match self.spectral() {
            Ok(s) => {
                let mut out = vec![CheckRecord::info("dim H", s.basis.dim() as f64)];
                out.push(CheckRecord::below("orthonormality", s.basis.orthonormality_residual(), tol));
                for (name, r) in s.relation_residuals() {
                    out.push(CheckRecord::below(format!("relation on interior: {name}"), r, tol));
                }
                sd = Some(s);
                out
            }
            Err(e) => {
                err = Some(e);
                Vec::new()
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let sd = sd.expect("set above");
        report.timed("u_strict", || {
            let c = match build_u(&sd, tol, exec) {
                Ok(u) => CheckRecord::info("u strict separation: unitarity residual", u.unitarity_residual),
                Err(e) => CheckRecord::new("u strict separation", Status::Info).with("error", e.to_string()),
            };
            vec![c]
        });
        let t = std::time::Instant::now();
        let u = self.unitary()?;
        report.timing.runtimes_ms.insert("u_margin".into(), t.elapsed().as_secs_f64() * 1e3);
        report
            .push(CheckRecord::info("u projection rank", u.projection_rank as f64).with("u_margin", self.cfg.u_margin));
        report.push(CheckRecord::info("u nearest eigenvalue outside cluster", u.nearest_outside));
        report.push(CheckRecord::info("||u* u - I|| on interior", u.unitarity_residual));
        report.push(CheckRecord::below("||[R, u]||", u.twist_commutator, tol));
        Ok(report)
    }

    fn jlo_pair(&mut self) -> Result<Report> {
        let mut report = Report::new("jlo-pair");
        let exec = self.exec();
        let sd = self.spectral()?;
        let jlo = Arc::new(Jlo::new(sd.clone(), exec)?);

        let t = std::time::Instant::now();
        let res = cocycle_residual(&jlo, 1, &default_samples(1))?;
        report.timing.runtimes_ms.insert("cocycle".into(), t.elapsed().as_secs_f64() * 1e3);
        let name = "(b+B)phi: |b phi_1 + B phi_3|";
        let c = if self.cfg.n2max >= COCYCLE_GATE_N2MAX {
            CheckRecord::below(name, res.residual, COCYCLE_TOL)
        } else {
            CheckRecord::info(name, res.residual).with("gated_from_n2max", COCYCLE_GATE_N2MAX)
        };
        report.push(c.with("scale", res.scale).with("tuples", res.tuples).with("tail_bound", res.tail_bound));

        let t = std::time::Instant::now();
        let u = self.unitary()?;
        let rec = pairing(&jlo, &u.u, self.cfg.terms)?;
        report.timing.runtimes_ms.insert("pairing".into(), t.elapsed().as_secs_f64() * 1e3);
        for (n, s) in rec.partial_sums.iter().enumerate() {
            report.push(CheckRecord::info(format!("S_{n}"), s[0]).with("imag", s[1]).with("term", rec.term_values[n]));
        }
        let last = rec.partial_sums.last().copied().unwrap_or([0.0, 0.0]);
        report.push(CheckRecord::info("|S_N - 1|", (last[0] - 1.0).hypot(last[1])).with("N", rec.terms));
        report.push(
            CheckRecord::new("term magnitudes decrease", Status::Info)
                .with_value(if rec.magnitudes_decrease() { 1.0 } else { 0.0 })
                .with("magnitudes", rec.term_magnitudes()),
        );
        report.push(CheckRecord::info("||u* u - I|| on interior", rec.unitarity_defect));
        report.push(CheckRecord::info("||(u - I) P_top||", rec.tail_estimate));
        report.push(CheckRecord::new("prefactor n!/sqrt(pi) exact", Status::from_bool(rec.prefactor_identity)));

        let t = std::time::Instant::now();
        let n_oracle = self.cfg.terms.min(3);
        let oracle = if self.cfg.n2max <= ORACLE_N2MAX {
            pairing_oracle(&jlo, &u.u, n_oracle, QUADRATURE_TERMS)?
        } else {
            let basis = crate::pw::PWBasis::build_exact(self.cfg.q_exact.clone(), ORACLE_N2MAX, exec)?;
            let small = Arc::new(SpectralData::new(Arc::new(basis), exec));
            let u_small = build_u_margin(&small, self.cfg.tol, self.cfg.u_margin, exec)?;
            let j = Jlo::new(small, exec)?;
            pairing_oracle(&j, &u_small.u, n_oracle, QUADRATURE_TERMS)?
        };
        report.timing.runtimes_ms.insert("oracle".into(), t.elapsed().as_secs_f64() * 1e3);
        report.push(
            CheckRecord::below("oracle: engine S_N vs dense oracles", oracle.max_abs_diff, ORACLE_TOL)
                .with("n2max", oracle.n2max)
                .with("rows", &oracle.rows),
        );
        Ok(report)
    }
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("{secs}")
}

/// Parses arguments, runs, writes the report and returns the exit code:
/// 0 all checks pass, 1 a check failed, 2 usage error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match RunConfig::resolve(&cli.flags).and_then(|c| c.validate_for(cli.command).map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let (out_dir, csv) = (cfg.out_dir.clone(), cfg.format == Format::Csv);
    let mut p = Pipelines::new(cfg);
    let mut report = p.run(cli.command);
    report.timing.timestamp = timestamp();
    for c in &report.checks {
        let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let num =
            c.residual.or(c.value).map(|v| format!(" {:.3e}", if v == 0.0 { 0.0 } else { v })).unwrap_or_default();
        println!("{status:<4} {}{num}", c.name);
    }
    match report.write(&out_dir, csv) {
        Ok(path) => println!("report: {}", path.display()),
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            return 1;
        }
    }
    if report.passed() {
        println!("status: PASS");
        0
    } else {
        println!("status: FAIL ({})", report.failing().join("; "));
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_parsing_by_mode() {
        let (q, v) = parse_q("1/2", Mode::Exact).unwrap();
        assert_eq!(q, Rat::new(1.into(), 2.into()));
        assert_eq!(v, 0.5);
        assert_eq!(parse_q("0.3", Mode::Exact).unwrap().0, Rat::new(3.into(), 10.into()));
        assert!(parse_q("3e-1", Mode::Exact).is_err());
        assert_eq!(parse_q("3e-1", Mode::Float).unwrap().1, 0.3);
        assert_eq!(parse_q("1/4", Mode::Float).unwrap().1, 0.25);
        for bad in ["0", "1", "3/2", "-0.5", "abc", "nan"] {
            assert!(parse_q(bad, Mode::Float).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\nq = 3/10\nn2max=6\nterms = 2 # trailing\nu_margin = 4\nformat = csv\n")
            .unwrap();
        let flags = Flags { config: Some(path.clone()), n2max: Some(4), ..Default::default() };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.q, "3/10");
        assert_eq!(cfg.n2max, 4);
        assert_eq!(cfg.terms, 2);
        assert_eq!(cfg.u_margin, 4);
        assert_eq!(cfg.format, Format::Csv);
        std::fs::write(&path, "colour = blue\n").unwrap();
        assert!(RunConfig::resolve(&flags).is_err());
    }

    #[test]
    fn validation() {
        let cfg = RunConfig::default();
        assert!(cfg.validate().is_ok());
        assert!(RunConfig { tol: 0.0, ..cfg.clone() }.validate().is_err());
        assert!(RunConfig { terms: 7, ..cfg.clone() }.validate().is_err());
        let big = RunConfig { n2max: 16, ..cfg };
        assert!(big.validate_for(Command::Index).is_ok());
        assert!(big.validate_for(Command::JloPair).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_cli(["suq2", "nonsense"]), 2);
        assert_eq!(run_cli(["suq2", "index", "--q", "1.5"]), 2);
        assert_eq!(run_cli(["suq2", "index", "--tol=-1"]), 2);
    }

    #[test]
    fn all_lists_every_subcommand() {
        assert_eq!(Command::SINGLE.len(), 8);
        assert!(!Command::SINGLE.contains(&Command::All));
    }
}
