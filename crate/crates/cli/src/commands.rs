use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context};
use serde::Serialize;

use qsinn::bruteforce::{call_report, exhaustive_search, CallReport};
use qsinn::harness::{
    classify_bad_minimum, run_sweep, toy_dataset, toy_init, toy_landscape, train_gd, write_heatmap_csv,
    write_sweep_csv, GridSpec, SweepConfig, SweepResult,
};
use qsinn::nets::NetworkConfig;
use qsinn::quantum::blocks::{verify_plus, verify_sine, VerifyReport};
use qsinn::quantum::train::{default_phase_bits, run_fixed_pipeline, threshold_for_count, Backend, PipelineSnapshots};
use qsinn::quantum::{grover_train, GroverCircuits, QDataset, QTrainConfig, QTrainResult, QsinnCircuit};
use qsinn::rng::derive_seed;
use qsinn::sim::{SparseState, StateVector, MAX_DENSE_QUBITS};
use qsinn::{fmt_f64, Parallelism};

use crate::config::{config_error, load_config, render_config, List, Resolver};
use crate::manifest::RunManifest;
use crate::{
    BruteForceArgs, Command, GlobalArgs, LandscapeArgs, SweepArgs, TrainClassicalArgs, TrainQuantumArgs, VerifyArgs,
};

macro_rules! choice_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $($name::$variant => $text),+
                })
            }
        }
    };
}

choice_enum!(Model {
    Toy => "toy",
    ToyDiscrete => "toy-discrete",
    Sinnn => "sinnn",
    Dsinnn => "dsinnn",
});

choice_enum!(DumpTarget {
    Phase => "phase",
    Weight => "weight",
    Final => "final",
});

choice_enum!(BackendArg {
    Dense => "dense",
    Sparse => "sparse",
    Auto => "auto",
});

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Dense => Backend::Dense,
            BackendArg::Sparse => Backend::Sparse,
            BackendArg::Auto => Backend::Auto,
        }
    }
}

struct Ctx {
    name: &'static str,
    out: PathBuf,
    seed: u64,
    resolver: Resolver,
    started: Instant,
    artifacts: Vec<PathBuf>,
    /// Set when the run completed but its checks failed (exit code 2).
    failure: Option<String>,
}

impl Ctx {
    fn path(&mut self, file: &str) -> PathBuf {
        let p = self.out.join(file);
        self.artifacts.push(p.clone());
        p
    }

    fn create(&mut self, file: &str) -> anyhow::Result<BufWriter<File>> {
        let p = self.path(file);
        let f = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
        Ok(BufWriter::new(f))
    }

    fn write_json<T: Serialize>(&mut self, file: &str, value: &T) -> anyhow::Result<()> {
        let mut w = self.create(file)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Validate leftover config keys, then create the output directory.
    fn start(&mut self) -> anyhow::Result<std::collections::BTreeMap<String, String>> {
        let resolver = std::mem::replace(&mut self.resolver, Resolver::new(Default::default()));
        let settings = resolver.finish()?;
        std::fs::create_dir_all(&self.out).with_context(|| format!("cannot create {}", self.out.display()))?;
        Ok(settings)
    }

    fn finish(mut self, settings: std::collections::BTreeMap<String, String>) -> anyhow::Result<()> {
        let cfg_path = self.path(&format!("{}.config", self.name));
        std::fs::write(&cfg_path, render_config(&settings))?;
        let manifest = RunManifest {
            subcommand: self.name.to_string(),
            config: settings,
            seed: self.seed,
            artifacts: self.artifacts,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let path = manifest.write(&self.out)?;
        println!("manifest: {}", path.display());
        match self.failure {
            Some(msg) => bail!(msg),
            None => Ok(()),
        }
    }
}

pub fn run(global: GlobalArgs, command: Command) -> anyhow::Result<()> {
    let started = Instant::now();
    let file = match &global.config {
        Some(p) => load_config(p)?,
        None => Default::default(),
    };
    let mut resolver = Resolver::new(file);
    if let Some(t) = resolver.get_opt("threads", global.threads)? {
        if t == 0 {
            return Err(config_error("threads must be at least 1"));
        }
        qsinn::par::init_thread_pool(t).map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    }
    let seed = resolver.get("seed", global.seed, 0u64)?;
    let out = resolver.get("out", global.out.map(|p| p.display().to_string()), "out".to_string())?;
    let name = match &command {
        Command::Landscape(_) => "landscape",
        Command::TrainClassical(_) => "train-classical",
        Command::Sweep(_) => "sweep",
        Command::BruteForce(_) => "brute-force",
        Command::TrainQuantum(_) => "train-quantum",
        Command::VerifyCircuits(_) => "verify-circuits",
    };
    let mut ctx = Ctx {
        name,
        out: PathBuf::from(out),
        seed,
        resolver,
        started,
        artifacts: Vec::new(),
        failure: None,
    };
    match command {
        Command::Landscape(a) => landscape(&mut ctx, a),
        Command::TrainClassical(a) => train_classical(&mut ctx, a),
        Command::Sweep(a) => sweep(&mut ctx, a),
        Command::BruteForce(a) => brute_force(&mut ctx, a),
        Command::TrainQuantum(a) => train_quantum(&mut ctx, a),
        Command::VerifyCircuits(a) => verify(&mut ctx, a),
    }
    .and_then(|settings| ctx.finish(settings))
}

type Settings = std::collections::BTreeMap<String, String>;

fn landscape(ctx: &mut Ctx, a: LandscapeArgs) -> anyhow::Result<Settings> {
    let lo = ctx.resolver.get("lo", a.lo, -3.0)?;
    let hi = ctx.resolver.get("hi", a.hi, 3.0)?;
    let step = ctx.resolver.get("step", a.step, 0.05)?;
    let settings = ctx.start()?;
    let l = toy_landscape(GridSpec::with_step(lo, hi, step)?)?;
    let mut w = ctx.create("landscape.csv")?;
    l.write_csv(&mut w)?;
    w.flush()?;
    let minima = l.local_minima();
    println!("{} strict local minima on a {}x{} grid", minima.len(), l.grid.points, l.grid.points);
    for m in &minima {
        println!("  w1 = {:>6.2}  w2 = {:>6.2}  loss = {}", m.w1, m.w2, fmt_f64(m.loss));
    }
    Ok(settings)
}

fn write_histories<'a>(ctx: &mut Ctx, runs: impl Iterator<Item = (usize, &'a [f64])>) -> anyhow::Result<()> {
    let mut w = ctx.create("history.csv")?;
    writeln!(w, "seed,epoch,train_loss")?;
    for (seed, hist) in runs {
        for (e, l) in hist.iter().enumerate() {
            writeln!(w, "{seed},{},{}", e + 1, fmt_f64(*l))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn train_classical(ctx: &mut Ctx, a: TrainClassicalArgs) -> anyhow::Result<Settings> {
    let model = ctx.resolver.get("model", a.model, Model::Toy)?;
    let toy = matches!(model, Model::Toy | Model::ToyDiscrete);
    let seeds = ctx.resolver.get("seeds", a.seeds, 20)?;
    let lr = ctx.resolver.get("lr", a.lr, if toy { 0.05 } else { 0.002 })?;
    let epochs = ctx.resolver.get("epochs", a.epochs, if toy { 500 } else { 300 })?;
    if seeds == 0 {
        return Err(config_error("seeds must be at least 1"));
    }
    if toy {
        let lo = ctx.resolver.get("init-lo", a.init_lo, -3.0)?;
        let hi = ctx.resolver.get("init-hi", a.init_hi, 3.0)?;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(config_error("init-lo must be below init-hi"));
        }
        let settings = ctx.start()?;
        let cfg = match model {
            Model::Toy => NetworkConfig::toy_continuous(),
            _ => NetworkConfig::toy_discrete(),
        };
        let data = toy_dataset();
        // (1, 1) fits every pair, so the sign search gives the global minimum
        let gmin = exhaustive_search(&NetworkConfig::toy_discrete(), &data, Parallelism::Auto)?.branches[0].mse;
        let mut runs = Vec::with_capacity(seeds);
        for i in 0..seeds {
            let w0 = toy_init(derive_seed(ctx.seed, i as u64), lo, hi);
            runs.push((w0.clone(), train_gd(&cfg, w0, &data, lr, epochs)?));
        }
        let mut w = ctx.create("runs.csv")?;
        writeln!(w, "seed,w1_init,w2_init,w1,w2,final_loss,bad")?;
        let mut bad = 0;
        for (i, (w0, r)) in runs.iter().enumerate() {
            let is_bad = classify_bad_minimum(r.final_loss, gmin, 2.0, 1e-4);
            bad += is_bad as usize;
            let v: Vec<String> = w0.values.iter().chain(&r.weights.values).map(|x| fmt_f64(*x)).collect();
            writeln!(w, "{i},{},{},{}", v.join(","), fmt_f64(r.final_loss), is_bad as u8)?;
        }
        w.flush()?;
        write_histories(ctx, runs.iter().enumerate().map(|(i, (_, r))| (i, r.history.as_slice())))?;
        println!("{bad}/{seeds} runs end in a bad minimum (global minimum {})", fmt_f64(gmin));
        return Ok(settings);
    }
    let width = ctx.resolver.get("width", a.width, 10)?;
    let layers = ctx.resolver.get("layers", a.layers, 3)?;
    let mut cfg = sweep_defaults(model, vec![(width, layers)], seeds)?;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.master_seed = ctx.seed;
    cfg.data_seed = ctx.seed;
    let settings = ctx.start()?;
    let r = run_sweep(&cfg, Parallelism::Auto)?;
    let mut w = ctx.create("runs.csv")?;
    write_sweep_csv(&r, &mut w)?;
    w.flush()?;
    write_histories(ctx, r.runs.iter().map(|x| (x.seed, x.loss_history.as_slice())))?;
    print_aggregates(&r);
    Ok(settings)
}

fn sweep_defaults(model: Model, archs: Vec<(usize, usize)>, seeds: usize) -> anyhow::Result<SweepConfig> {
    match model {
        Model::Sinnn => Ok(SweepConfig::sinnn(archs, seeds)),
        Model::Dsinnn => Ok(SweepConfig::dsinnn(archs, seeds)),
        m => Err(config_error(format!("model `{m}` has no sweep; use sinnn or dsinnn"))),
    }
}

fn print_aggregates(r: &SweepResult) {
    println!("width layers frac_bad_train frac_bad_test frac_good_generalize global_min_train");
    for a in &r.aggregates {
        println!(
            "{:>5} {:>6} {:>14.3} {:>13.3} {:>20.3} {:>16.6}",
            a.first_width, a.layers, a.frac_bad_train, a.frac_bad_test, a.frac_good_generalize, a.global_min_train
        );
    }
}

fn sweep(ctx: &mut Ctx, a: SweepArgs) -> anyhow::Result<Settings> {
    let model = ctx.resolver.get("model", a.model, Model::Sinnn)?;
    let widths = ctx.resolver.get("widths", a.widths, List(vec![5, 10, 15, 20]))?;
    let layers = ctx.resolver.get("layers", a.layers, List(vec![1, 2, 3, 4, 5]))?;
    let seeds = ctx.resolver.get("seeds", a.seeds, 200)?;
    let archs = widths.0.iter().flat_map(|&w| layers.0.iter().map(move |&l| (w, l))).collect();
    let mut cfg = sweep_defaults(model, archs, seeds)?;
    cfg.learning_rate = ctx.resolver.get("lr", a.lr, cfg.learning_rate)?;
    cfg.epochs = ctx.resolver.get("epochs", a.epochs, cfg.epochs)?;
    cfg.master_seed = ctx.seed;
    cfg.data_seed = ctx.resolver.get("data-seed", a.data_seed, ctx.seed)?;
    cfg.dataset.count = ctx.resolver.get("samples", a.samples, cfg.dataset.count)?;
    cfg.bad_minimum_factor = ctx.resolver.get("bad-factor", a.bad_factor, cfg.bad_minimum_factor)?;
    cfg.bad_minimum_margin = ctx.resolver.get("bad-margin", a.bad_margin, cfg.bad_minimum_margin)?;
    cfg.validate()?;
    let settings = ctx.start()?;
    let r = run_sweep(&cfg, Parallelism::Auto)?;
    let mut w = ctx.create("sweep.csv")?;
    write_sweep_csv(&r, &mut w)?;
    w.flush()?;
    let mut w = ctx.create("heatmap.csv")?;
    write_heatmap_csv(&r, &mut w)?;
    w.flush()?;
    print_aggregates(&r);
    Ok(settings)
}

fn load_dataset(spec: &str) -> anyhow::Result<QDataset> {
    if spec == "toy" {
        return Ok(QDataset::toy());
    }
    QDataset::load(Path::new(spec)).map_err(|e| config_error(format!("dataset {spec}: {e}")))
}

#[derive(Serialize)]
struct QuantumSummary<'a> {
    bitstring: Option<String>,
    result: &'a QTrainResult,
    calls: Option<CallReport>,
}

fn bitstring(bits: u64, m: usize) -> String {
    (0..m).map(|i| if (bits >> (m - 1 - i)) & 1 == 1 { '1' } else { '0' }).collect()
}

fn brute_force(ctx: &mut Ctx, a: BruteForceArgs) -> anyhow::Result<Settings> {
    let dataset = ctx.resolver.get("dataset", a.dataset, "toy".to_string())?;
    let hidden = ctx.resolver.get("hidden", a.hidden, List(vec![2]))?;
    let with_quantum = ctx.resolver.get("with-quantum", a.with_quantum, false)?;
    let data = load_dataset(&dataset)?;
    let cfg = NetworkConfig::dsinnn(&hidden.0, 0.0);
    cfg.validate()?;
    let settings = ctx.start()?;
    let search = exhaustive_search(&cfg, &data.classical_pairs(), Parallelism::Auto)?;
    let mut w = ctx.create("bruteforce.csv")?;
    search.write_csv(&mut w)?;
    w.flush()?;
    let m = cfg.num_weights();
    let best: Vec<String> = search.maximizers().iter().map(|&b| bitstring(b, m)).collect();
    println!(
        "best correct count {}/{} reached by {}; {} classical calls",
        search.best_count(),
        data.len(),
        best.join(" "),
        search.classical_calls
    );
    if with_quantum {
        let qcfg = QTrainConfig {
            hidden: hidden.0.clone(),
            ..Default::default()
        };
        let r = grover_train(data, &qcfg)?;
        let calls = call_report(&search, &r.diagnostics);
        println!(
            "Grover: {:?}, {} iterations, {} phase estimations; classical/quantum ratio {:.3}",
            r.outcome, calls.grover_iterations, calls.pe_invocations, calls.ratio
        );
        ctx.write_json(
            "quantum.json",
            &QuantumSummary {
                bitstring: r.bits.map(|b| bitstring(b, m)),
                result: &r,
                calls: Some(calls),
            },
        )?;
    }
    Ok(settings)
}

fn dump(ctx: &mut Ctx, snap: &PipelineSnapshots, targets: &[DumpTarget]) -> anyhow::Result<()> {
    for t in targets {
        let rho = match t {
            DumpTarget::Phase => &snap.phase,
            DumpTarget::Weight => &snap.weight,
            DumpTarget::Final => &snap.final_weight,
        };
        rho.validate()?;
        let path = ctx.path(&format!("density_{t}.json"));
        std::fs::write(&path, rho.dump().to_json() + "\n")?;
        println!("{t} register diagonal: {:?}", rho.diagonal().iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>());
    }
    Ok(())
}

fn train_quantum(ctx: &mut Ctx, a: TrainQuantumArgs) -> anyhow::Result<Settings> {
    let dataset = ctx.resolver.get("dataset", a.dataset, "toy".to_string())?;
    let hidden = ctx.resolver.get("hidden", a.hidden, List(vec![2]))?;
    let data = load_dataset(&dataset)?;
    if data.is_empty() {
        return Err(config_error("dataset has no pairs"));
    }
    let n = data.len();
    let phase_bits = ctx.resolver.get("phase-bits", a.phase_bits, default_phase_bits(n))?;
    let threshold = ctx.resolver.get("threshold", a.threshold, threshold_for_count(n, n))?;
    let iterations = ctx.resolver.get("iterations", a.iterations, 1)?;
    let dumps = ctx.resolver.get_opt("dump-density", a.dump_density)?;
    let backend: Backend = ctx.resolver.get("backend", a.backend, BackendArg::Auto)?.into();
    let delta = ctx.resolver.get("delta", a.delta, 0.1)?;
    let carrier = ctx.resolver.get("phase-carrier", a.phase_carrier, 0)?;
    if phase_bits == 0 {
        return Err(config_error("phase-bits must be at least 1"));
    }
    let settings = ctx.start()?;

    let qcfg = QTrainConfig {
        hidden: hidden.0.clone(),
        phase_bits: Some(phase_bits),
        delta,
        backend,
        phase_carrier: carrier,
        ..Default::default()
    };
    let r = grover_train(data.clone(), &qcfg)?;
    let m = r.weight_distribution.len().trailing_zeros() as usize;
    println!(
        "{} qubits; outcome {:?}; weights {}; correct {}/{}; {} Grover iterations over {} rounds",
        r.diagnostics.num_qubits,
        r.outcome,
        r.bits.map_or("-".into(), |b| bitstring(b, m)),
        r.correct_count.map_or("-".into(), |c| c.to_string()),
        n,
        r.diagnostics.grover_iterations,
        r.diagnostics.rounds.len()
    );
    ctx.write_json(
        "quantum_result.json",
        &QuantumSummary {
            bitstring: r.bits.map(|b| bitstring(b, m)),
            result: &r,
            calls: None,
        },
    )?;

    if let Some(List(targets)) = dumps {
        let net = QsinnCircuit::new(&hidden.0, data, phase_bits, carrier)?;
        let q = net.num_qubits();
        let g = GroverCircuits::new(net)?;
        let snap = match backend {
            Backend::Dense if q <= MAX_DENSE_QUBITS => run_fixed_pipeline(&g, threshold, iterations, StateVector::new(q)?)?,
            Backend::Dense => bail!(qsinn::Error::TooManyQubits {
                requested: q,
                limit: MAX_DENSE_QUBITS
            }),
            _ => run_fixed_pipeline(&g, threshold, iterations, SparseState::new(q)?)?,
        };
        println!(
            "fixed run: tau {threshold}, {iterations} iteration(s), work register clean with p = {:.12}",
            snap.work_clean_probability
        );
        dump(ctx, &snap, &targets)?;
    }
    Ok(settings)
}

#[derive(Serialize)]
struct VerifySummary {
    sine: VerifyReport,
    plus: VerifyReport,
}

fn verify(ctx: &mut Ctx, a: VerifyArgs) -> anyhow::Result<Settings> {
    let max_n = ctx.resolver.get("max-n", a.max_n, 4)?;
    let max_m = ctx.resolver.get("max-m", a.max_m, 6)?;
    let max_fan_in = ctx.resolver.get("max-fan-in", a.max_fan_in, 4)?;
    if max_n == 0 || max_m < max_n || max_fan_in == 0 {
        return Err(config_error("need 1 <= max-n <= max-m and max-fan-in >= 1"));
    }
    let settings = ctx.start()?;
    let summary = VerifySummary {
        sine: verify_sine(max_n, max_m)?,
        plus: verify_plus(max_fan_in)?,
    };
    for r in [&summary.sine, &summary.plus] {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {}: {} cases, {} failures", r.name, r.cases, r.failures);
    }
    ctx.write_json("verify.json", &summary)?;
    if !(summary.sine.passed() && summary.plus.passed()) {
        ctx.failure = Some("circuit verification failed".into());
    }
    Ok(settings)
}
