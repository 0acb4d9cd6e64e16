//! Scenarios shipped with the library.

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// A bundled scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

pub const BUNDLED: [Bundled; 7] = [
    Bundled {
        name: "fig1",
        text: include_str!("../scenarios/fig1.scn"),
    },
    Bundled {
        name: "fig2",
        text: include_str!("../scenarios/fig2.scn"),
    },
    Bundled {
        name: "fig3",
        text: include_str!("../scenarios/fig3.scn"),
    },
    Bundled {
        name: "fig4",
        text: include_str!("../scenarios/fig4.scn"),
    },
    Bundled {
        name: "blayer-ref",
        text: include_str!("../scenarios/blayer-ref.scn"),
    },
    Bundled {
        name: "plume-case1",
        text: include_str!("../scenarios/plume-case1.scn"),
    },
    Bundled {
        name: "plume-case2",
        text: include_str!("../scenarios/plume-case2.scn"),
    },
];

impl Bundled {
    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::from_toml_str(self.text)
    }

    /// The `description` line of the file.
    pub fn description(&self) -> String {
        self.scenario().map(|s| s.description).unwrap_or_default()
    }
}

/// Looks a bundled scenario up by name, with or without the `.scn` suffix.
pub fn find(name: &str) -> Result<Bundled> {
    let stem = name.strip_suffix(".scn").unwrap_or(name);
    BUNDLED
        .iter()
        .copied()
        .find(|b| b.name == stem)
        .ok_or_else(|| Error::arg(format!("no bundled scenario named `{name}`")))
}
