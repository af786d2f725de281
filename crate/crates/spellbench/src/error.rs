use std::fmt;

/// Failure of a command. The variant decides the exit status: user and
/// configuration problems exit 1, everything else 2.
#[derive(Debug)]
pub enum AppError {
    User(anyhow::Error),
    Internal(anyhow::Error),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn user(msg: impl fmt::Display) -> Self {
        AppError::User(anyhow::anyhow!("{msg}"))
    }

    pub fn internal(msg: impl fmt::Display) -> Self {
        AppError::Internal(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::User(_) => 1,
            AppError::Internal(_) => 2,
        }
    }

    pub fn context(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        match self {
            AppError::User(e) => AppError::User(e.context(ctx)),
            AppError::Internal(e) => AppError::Internal(e.context(ctx)),
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (AppError::User(e) | AppError::Internal(e)) = self;
        write!(f, "{e:#}")
    }
}

impl std::error::Error for AppError {}

/// Errors raised by the core library are about the inputs or settings.
impl From<spellbench_core::Error> for AppError {
    fn from(e: spellbench_core::Error) -> Self {
        AppError::User(e.into())
    }
}

pub trait ResultExt<T> {
    /// Tags an error as the user's (bad input file, bad flag).
    fn user_err(self, ctx: impl fmt::Display) -> AppResult<T>;
    /// Tags an error as ours or the environment's.
    fn internal_err(self, ctx: impl fmt::Display) -> AppResult<T>;
}

impl<T, E> ResultExt<T> for Result<T, E>
where
    E: Into<anyhow::Error>,
{
    fn user_err(self, ctx: impl fmt::Display) -> AppResult<T> {
        self.map_err(|e| AppError::User(e.into().context(ctx.to_string())))
    }

    fn internal_err(self, ctx: impl fmt::Display) -> AppResult<T> {
        self.map_err(|e| AppError::Internal(e.into().context(ctx.to_string())))
    }
}
