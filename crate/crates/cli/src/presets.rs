//! Checked-in configs reproducing the published figure setups.

use crate::config::{ConfigError, Document};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub id: &'static str,
    pub text: &'static str,
}

impl Preset {
    pub fn document(&self) -> Result<Document, ConfigError> {
        Document::parse(self.text)
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        id: "fig1b",
        text: include_str!("../presets/fig1b.toml"),
    },
    Preset {
        id: "fig1c",
        text: include_str!("../presets/fig1c.toml"),
    },
    Preset {
        id: "fig1d",
        text: include_str!("../presets/fig1d.toml"),
    },
    Preset {
        id: "fig2",
        text: include_str!("../presets/fig2.toml"),
    },
    Preset {
        id: "fig4a",
        text: include_str!("../presets/fig4a.toml"),
    },
    Preset {
        id: "fig4b",
        text: include_str!("../presets/fig4b.toml"),
    },
    Preset {
        id: "fig4c",
        text: include_str!("../presets/fig4c.toml"),
    },
    Preset {
        id: "fig5a",
        text: include_str!("../presets/fig5a.toml"),
    },
    Preset {
        id: "fig5b",
        text: include_str!("../presets/fig5b.toml"),
    },
    Preset {
        id: "fig5c",
        text: include_str!("../presets/fig5c.toml"),
    },
    Preset {
        id: "fig5d",
        text: include_str!("../presets/fig5d.toml"),
    },
    Preset {
        id: "fig8",
        text: include_str!("../presets/fig8.toml"),
    },
    Preset {
        id: "fig9",
        text: include_str!("../presets/fig9.toml"),
    },
    Preset {
        id: "fig10a",
        text: include_str!("../presets/fig10a.toml"),
    },
    Preset {
        id: "fig10b",
        text: include_str!("../presets/fig10b.toml"),
    },
    Preset {
        id: "fig11",
        text: include_str!("../presets/fig11.toml"),
    },
    Preset {
        id: "fig13",
        text: include_str!("../presets/fig13.toml"),
    },
    Preset {
        id: "rwa",
        text: include_str!("../presets/rwa.toml"),
    },
    Preset {
        id: "perturbation",
        text: include_str!("../presets/perturbation.toml"),
    },
];

pub fn get(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}
