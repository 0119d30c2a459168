//! Files and wire formats: config documents, WAV, PGM, protocol messages.

mod config;
mod pgm;
mod protocol;
mod wav;

pub use config::{load_config, save_config, ConfigDocument, ConfigError, CONFIG_VERSION};
pub use pgm::{decode_pgm, encode_pgm, write_pgm, PgmError};
pub use protocol::{ProtocolError, ProtocolMessage, TouchOutcomeKind, TouchResultMessage};
pub use wav::{decode_wav, encode_wav, read_wav, wav_bytes, write_wav, WavError};
