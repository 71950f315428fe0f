use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value is outside its domain. `name` is the field name
    /// inside its owning section (for example `p_max`).
    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "CFL condition violated in {sweep} sweep: dt/dq ratio {ratio:.4} at time node {node} \
         needs {required} sub-steps but at most {limit} are allowed"
    )]
    Cfl {
        sweep: &'static str,
        ratio: f64,
        node: usize,
        required: usize,
        limit: usize,
    },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("cannot place {n_sbs} SBSs at ISD {isd} with minimum separation {min_distance} after {attempts} attempts")]
    InfeasibleTopology {
        n_sbs: usize,
        isd: f64,
        min_distance: f64,
        attempts: usize,
    },

    #[error("the proposed policy needs a mean-field solution")]
    MissingSolution,

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn ensure(
    cond: bool,
    name: &'static str,
    reason: impl FnOnce() -> String,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason(),
        })
    }
}
