//! Built-in experiment presets, stored as TOML so that a config file can name
//! one and override any field.

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "tabular-desk",
        summary: "ORLC, 10 random tabular MDPs (S=5, A=3, H=4), 20k episodes",
        toml: r#"
episodes = 20000
seeds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
thresholds = [2.0, 1.0, 0.5, 0.25]
pac_levels = [2.0, 1.0, 0.5]
[environment]
kind = "random-tabular"
states = 5
actions = 3
horizon = 4
[algorithm]
kind = "orlc"
delta = 0.1
"#,
    },
    Preset {
        name: "tabular-full",
        summary: "ORLC, random tabular MDP (S=20, A=4, H=10), 200k episodes",
        toml: r#"
episodes = 200000
seeds = [1]
thresholds = [5.0, 2.0, 1.0, 0.5]
pac_levels = [5.0, 2.0, 1.0]
[environment]
kind = "random-tabular"
states = 20
actions = 4
horizon = 10
[algorithm]
kind = "orlc"
delta = 0.1
"#,
    },
    Preset {
        name: "contextual-desk",
        summary: "ORLC-SI, 5 contextual MDPs (S=4, A=5, H=3, dR=4), 20k episodes",
        toml: r#"
episodes = 20000
seeds = [1, 2, 3, 4, 5]
thresholds = [1.5, 1.0, 0.5]
pac_levels = [1.5, 1.0]
[environment]
kind = "random-contextual"
states = 4
actions = 5
horizon = 3
dim_r = 4
context_alpha = 0.7
[algorithm]
kind = "orlc-si"
delta = 0.1
lambda = 1.0
"#,
    },
    Preset {
        name: "shift-desk",
        summary: "ORLC-SI, context shift at 50k of 100k episodes (S=3, A=5, H=2, dR=10)",
        toml: r#"
episodes = 100000
seeds = [1]
thresholds = [1.0, 0.5, 0.25]
pac_levels = [1.0, 0.5]
[environment]
kind = "random-contextual"
states = 3
actions = 5
horizon = 2
dim_r = 10
shift_episode = 50001
[algorithm]
kind = "orlc-si"
delta = 0.1
lambda = 1.0
"#,
    },
    Preset {
        name: "shift-full",
        summary: "ORLC-SI, context shift at 2M of 4M episodes (S=10, A=40, H=5, dR=10)",
        toml: r#"
episodes = 4000000
seeds = [1]
thresholds = [2.0, 1.0, 0.5]
pac_levels = [2.0, 1.0]
[environment]
kind = "random-contextual"
states = 10
actions = 40
horizon = 5
dim_r = 10
shift_episode = 2000001
[algorithm]
kind = "orlc-si"
delta = 0.1
lambda = 1.0
[output]
stride = 1000
"#,
    },
    Preset {
        name: "bandit-desk",
        summary: "ORLC, 20-armed bandit without context, 50k episodes",
        toml: r#"
episodes = 50000
seeds = [1]
thresholds = [0.5, 0.2, 0.1]
pac_levels = [0.5, 0.2, 0.1]
[environment]
kind = "bandit"
arms = 20
dim_r = 1
[algorithm]
kind = "orlc"
delta = 0.1
"#,
    },
    Preset {
        name: "bandit-full",
        summary: "ORLC, 100-armed bandit without context, 1M episodes",
        toml: r#"
episodes = 1000000
seeds = [1]
thresholds = [0.5, 0.2, 0.1]
pac_levels = [0.5, 0.2, 0.1]
[environment]
kind = "bandit"
arms = 100
dim_r = 1
[algorithm]
kind = "orlc"
delta = 0.1
[output]
stride = 1000
"#,
    },
];

pub fn preset_toml(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.name == name).map(|p| p.toml)
}
