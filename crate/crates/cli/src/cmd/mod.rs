pub mod bounds;
pub mod couple;
pub mod fit;
pub mod flood;
pub mod ic;
pub mod verify;

use serde::Serialize;

/// Fields shared by every JSON output.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, B: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub config: &'a C,
    #[serde(flatten)]
    pub body: B,
}

pub fn envelope<'a, C: Serialize, B: Serialize>(
    command: &'static str,
    seed: Option<u64>,
    config: &'a C,
    body: B,
) -> Envelope<'a, C, B> {
    Envelope {
        schema_version: homemeg::SCHEMA_VERSION,
        command,
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        config,
        body,
    }
}
