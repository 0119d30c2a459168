use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sonoplane_cli::serve::{serve_on, ServeOptions};
use sonoplane_cli::{
    bot_params, read_text, render_audio, report_json, simulate, strips, to_json_text, write_text,
    CliError, Player,
};
use sonoplane_core::io::{load_config, read_wav, write_pgm, write_wav, ConfigDocument};

#[derive(Debug, Parser)]
#[command(name = "sonoplane", version, about = "Audio-only target game, sonification and visual strips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Play a headless bot session and write its report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seconds: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
        /// Also write the bot's touch trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Bot extrapolation horizon, seconds.
        #[arg(long, default_value_t = 0.0)]
        lead: f64,
        /// Round pitch heard by the bot to this many semitones.
        #[arg(long)]
        quantize_semitones: Option<f64>,
    },
    /// Render a game trajectory to a 16-bit WAV file.
    RenderAudio {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seconds: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Player::None)]
        player: Player,
        /// Also write the attribute frames as JSON.
        #[arg(long)]
        frames: Option<PathBuf>,
    },
    /// Turn a WAV file into left/right strip images and a decoded report.
    Strips {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Serve live sessions over WebSocket.
    Serve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Session length, simulated seconds.
        #[arg(long, default_value_t = 300.0)]
        seconds: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Wall-clock seconds per simulated second.
        #[arg(long, default_value_t = 1.0)]
        time_scale: f64,
    },
    /// Check a config document.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            config,
            seconds,
            seed,
            report,
            trace,
            lead,
            quantize_semitones,
        } => {
            let doc = load_config(&config)?;
            let mut params = bot_params(&doc);
            params.lead_time_s = lead;
            params.pitch_quantization_semitones = quantize_semitones;
            let run = simulate(&doc, seconds, seed, &params)?;
            write_text(&report, &report_json(&run.report))?;
            if let Some(path) = trace {
                write_text(&path, &to_json_text(&run.touches))?;
            }
        }
        Command::RenderAudio {
            config,
            seconds,
            seed,
            out,
            player,
            frames,
        } => {
            let doc = load_config(&config)?;
            let (pcm, trace) = render_audio(&doc, seconds, seed, player)?;
            write_wav(&pcm, &out)?;
            if let Some(path) = frames {
                write_text(&path, &to_json_text(&trace))?;
            }
        }
        Command::Strips {
            input,
            config,
            out_dir,
        } => {
            let doc = load_config(&config)?;
            let pcm = read_wav(&input)?;
            let out = strips(&pcm, &doc)?;
            fs::create_dir_all(&out_dir).map_err(|source| CliError::Io {
                path: out_dir.clone(),
                source,
            })?;
            write_pgm(&out.left, out_dir.join("left.pgm"))?;
            write_pgm(&out.right, out_dir.join("right.pgm"))?;
            write_text(&out_dir.join("decoded.json"), &to_json_text(&out.decoded))?;
        }
        Command::Serve {
            config,
            port,
            host,
            seconds,
            seed,
            time_scale,
        } => {
            let doc = load_config(&config)?;
            let options = ServeOptions {
                duration_s: sonoplane_cli::check_seconds(seconds)?,
                seed,
                time_scale,
            };
            if !(time_scale.is_finite() && time_scale > 0.0) {
                return Err(CliError::Usage(format!("--time-scale must be positive, got {time_scale}")));
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
                path: PathBuf::from("<runtime>"),
                source,
            })?;
            runtime
                .block_on(serve_on(SocketAddr::new(host, port), doc, options))
                .map_err(|source| CliError::Io {
                    path: PathBuf::from(format!("{host}:{port}")),
                    source,
                })?;
        }
        Command::Validate { config } => {
            let text = read_text(&config)?;
            ConfigDocument::from_json(&text)?;
            println!("{}: ok", config.display());
        }
    }
    Ok(())
}
