use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use storyrec_core::latent::{adjust_ratings, factorize};
use storyrec_core::lsm::{validate_model, ValidationReport, ValidationSummary};
use storyrec_core::snapshot::{load_snapshot, save_snapshot, Snapshot};
use storyrec_core::{load_movielens, Engine, SessionState, UserId};
use storyrec_service::AppState;

use crate::config::{Command, ConfigArgs, EffectiveConfig, DEFAULT_K};
use crate::InputError;

/// Column order of the validation CSV.
pub const VALIDATION_HEADER: [&str; 7] = [
    "user_id",
    "best_dim",
    "case",
    "sum_R+",
    "sum_R\u{2212}",
    "sum_R+_minus_Ro",
    "sum_R\u{2212}_minus_Ro",
];

fn echo(cfg: &ConfigArgs, command: &'static str, k: usize, extra: serde_json::Value) {
    let model = cfg.model_params(k);
    let story = cfg.story_params();
    let effective = EffectiveConfig {
        command,
        data_dir: &cfg.data_dir,
        snapshot: &cfg.snapshot,
        seed: cfg.seed,
        allow_new_users: cfg.allow_new_users,
        model: &model,
        story: &story,
        extra,
    };
    eprintln!("effective config: {}", serde_json::to_string(&effective).unwrap_or_default());
}

fn require_snapshot(cfg: &ConfigArgs) -> Result<Snapshot> {
    if !cfg.snapshot.exists() {
        return Err(InputError(format!(
            "snapshot {} not found; run preprocess first",
            cfg.snapshot.display()
        ))
        .into());
    }
    let snap = load_snapshot(&cfg.snapshot)?;
    if let Some(k) = cfg.k {
        if k != snap.space.k {
            return Err(InputError(format!(
                "snapshot {} was built with k = {}, not {k}; rerun preprocess",
                cfg.snapshot.display(),
                snap.space.k
            ))
            .into());
        }
    }
    Ok(snap)
}

/// Engine from the snapshot with the runtime parameters from `cfg`.
pub fn load_engine(cfg: &ConfigArgs) -> Result<Engine> {
    let snap = require_snapshot(cfg)?;
    let k = snap.space.k;
    let mut engine = Engine::from_parts(snap.dataset, snap.space, cfg.model_params(k), cfg.story_params())?;
    engine.strict_users = !cfg.allow_new_users;
    Ok(engine)
}

pub fn run(cfg: &ConfigArgs, command: &Command) -> Result<()> {
    match command {
        Command::Preprocess => preprocess(cfg),
        Command::Validate { out } => validate(cfg, out),
        Command::Recommend {
            user,
            stories,
            familiar,
            typical,
        } => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            recommend(cfg, UserId(*user), *stories, *familiar, *typical, &mut lock)
        }
        Command::Serve { listen } => serve(cfg, listen),
    }
}

pub fn preprocess(cfg: &ConfigArgs) -> Result<()> {
    let k = cfg.k.unwrap_or(DEFAULT_K);
    echo(cfg, "preprocess", k, serde_json::Value::Null);
    let params = cfg.model_params(k);
    params.validate()?;
    let start = Instant::now();
    let ds = load_movielens(&cfg.data_dir)?;
    let adj = adjust_ratings(&ds);
    let space = factorize(&adj, k)?;
    save_snapshot(&cfg.snapshot, &ds, &space, &params)?;
    let elapsed = start.elapsed();
    let head: Vec<String> = space.singular_values.iter().take(5).map(|s| format!("{s:.3}")).collect();
    println!(
        "preprocessed {} users, {} movies, {} ratings with k = {} in {:.2}s; leading singular values {}",
        ds.user_count(),
        ds.movie_count(),
        ds.rating_count(),
        k,
        elapsed.as_secs_f64(),
        head.join(", ")
    );
    println!("snapshot written to {}", cfg.snapshot.display());
    Ok(())
}

/// Fixed thresholds for validation, whatever `--fixed-thresholds` says, so
/// every user is measured against the same `τ` values.
pub fn validation_report(engine: &Engine) -> ValidationReport {
    let mut params = engine.model_params.clone();
    params.adaptive_thresholds = false;
    validate_model(engine.dataset(), engine.adjusted(), engine.space(), &params)
}

pub fn write_validation_csv(report: &ValidationReport, w: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(VALIDATION_HEADER)?;
    for r in &report.rows {
        let case = r.case.number().map_or_else(|| "none".to_string(), |c| c.to_string());
        csv.write_record([
            r.user_id.to_string(),
            r.best_dim.to_string(),
            case,
            r.sum_like.to_string(),
            r.sum_dislike.to_string(),
            r.sum_like_minus_overlap.to_string(),
            r.sum_dislike_minus_overlap.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), |v| format!("{v:.4}"))
}

pub fn summary_text(s: &ValidationSummary) -> String {
    let ratio = |a: f64, b: f64| if b > 0.0 { format!("{:.2}", a / b) } else { "undefined".into() };
    format!(
        "users: {}\n\
         avg sum R+: {:.3}\navg sum R-: {:.3}\nratio: {}\npearson: {}\n\
         avg sum R+ minus Ro: {:.3}\navg sum R- minus Ro: {:.3}\nratio minus Ro: {}\npearson minus Ro: {}\n\
         best dimension cases 1/2/3/4/degenerate: {}/{}/{}/{}/{}\nusers in case 1 or 2: {:.1}%",
        s.users,
        s.avg_like,
        s.avg_dislike,
        ratio(s.avg_like, s.avg_dislike),
        fmt_opt(s.pearson),
        s.avg_like_minus_overlap,
        s.avg_dislike_minus_overlap,
        ratio(s.avg_like_minus_overlap, s.avg_dislike_minus_overlap),
        fmt_opt(s.pearson_minus_overlap),
        s.case_counts[0],
        s.case_counts[1],
        s.case_counts[2],
        s.case_counts[3],
        s.case_counts[4],
        100.0 * s.ideal_fraction(),
    )
}

pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn validate(cfg: &ConfigArgs, out: &Path) -> Result<()> {
    let engine = load_engine(cfg)?;
    echo(cfg, "validate", engine.space().k, serde_json::json!({ "out": out }));
    let start = Instant::now();
    let report = validation_report(&engine);
    let file = fs::File::create(out).with_context(|| format!("cannot write {}", out.display()))?;
    write_validation_csv(&report, BufWriter::new(file))?;
    let summary = summary_path(out);
    fs::write(&summary, serde_json::to_string_pretty(&report.summary)? + "\n")
        .with_context(|| format!("cannot write {}", summary.display()))?;
    println!("{}", summary_text(&report.summary));
    println!(
        "rows written to {}, summary to {} ({:.2}s)",
        out.display(),
        summary.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

pub fn recommend(cfg: &ConfigArgs, user: UserId, stories: usize, f: f64, t: f64, out: &mut impl Write) -> Result<()> {
    let engine = load_engine(cfg)?;
    #[derive(Serialize)]
    struct Extra {
        user: u32,
        stories: usize,
        f: f64,
        t: f64,
    }
    let extra = serde_json::to_value(Extra {
        user: user.0,
        stories,
        f,
        t,
    })?;
    echo(cfg, "recommend", engine.space().k, extra);
    let mut session = SessionState::create(&engine, user, cfg.seed)?;
    session.set_preferences(f, t)?;
    for _ in 0..stories {
        let story = session.next_story(&engine)?;
        serde_json::to_writer(&mut *out, &story)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}

pub fn serve(cfg: &ConfigArgs, listen: &str) -> Result<()> {
    let engine = load_engine(cfg)?;
    echo(cfg, "serve", engine.space().k, serde_json::json!({ "listen": listen }));
    let runtime = tokio::runtime::Runtime::new().context("cannot start the async runtime")?;
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind(listen).await {
            Ok(l) => l,
            Err(e) => bail!(InputError(format!("cannot listen on {listen}: {e}"))),
        };
        let addr = listener.local_addr()?;
        tracing::info!(%addr, users = engine.dataset().user_count(), movies = engine.dataset().movie_count(), "listening");
        println!("listening on http://{addr}");
        storyrec_service::serve(listener, AppState::new(engine), shutdown_signal()).await?;
        Ok(())
    })
}
