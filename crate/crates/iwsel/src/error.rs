use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("degenerate dataset: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Slot(#[from] iwsel_core::slot::SlotError),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(err) => Error::Io(err),
                _ => unreachable!(),
            }
        } else {
            Error::Format(e.to_string())
        }
    }
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Slot(_) => 2,
            Error::Io(_) | Error::Format(_) => 3,
            Error::Degenerate(_) => 4,
        }
    }
}
