use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("payoff of player {player} is not finite at {point:?}")]
    Domain { player: usize, point: Vec<f64> },

    #[error("invalid action profile: {0}")]
    InvalidProfile(String),

    #[error("invalid game definition: {0}")]
    InvalidGame(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "start condition violated at step {step}: exploration reaches {coordinate} for player {player}; \
         raise the start index or the initial point"
    )]
    StartCondition { step: u64, player: usize, coordinate: f64 },

    #[error("positivity violated at step {step}: player {player} moved to {value}")]
    Positivity { step: u64, player: usize, value: f64 },

    #[error("trajectory left the bounding box at t = {time} (step {step})")]
    Diverged { time: f64, step: u64, state: Vec<f64> },

    #[error("no sign change of the own gradient of player {player} found up to {limit}")]
    UnboundedBestResponse { player: usize, limit: f64 },

    #[error("point is not a zero of the mean field: |F|_inf = {residual:e}")]
    NotAZero { residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown preset `{name}`; known presets: {known}")]
    UnknownPreset { name: String, known: String },

    #[error("unknown builtin game `{name}`; known games: {known}")]
    UnknownGame { name: String, known: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::StartCondition { .. }
                | Error::Positivity { .. }
                | Error::Diverged { .. }
                | Error::UnboundedBestResponse { .. }
                | Error::NotAZero { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
