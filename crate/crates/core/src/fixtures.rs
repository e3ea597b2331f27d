//! Example programs shipped with the crate.

/// A named example program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub title: &'static str,
    pub source: &'static str,
}

macro_rules! fixture {
    ($name:literal, $title:literal) => {
        Fixture {
            name: $name,
            title: $title,
            source: include_str!(concat!("../fixtures/", $name, ".calc")),
        }
    };
}

pub const ALL: &[Fixture] = &[
    fixture!("cherries", "A bowl of cherries"),
    fixture!("cherries_formula", "A bowl of cherries, in one step"),
    fixture!("cherries_ratio", "A bowl of cherries, by speed ratio"),
    fixture!("kevin", "Kevin eats the cherries"),
    fixture!("rabbits", "Rabbits and chickens"),
    fixture!("rabbits_alt", "Rabbits and chickens, from the chickens' side"),
    fixture!("taps", "Two taps"),
    fixture!("average_speed", "Average speed"),
    fixture!("sunrise", "Sunrise"),
    fixture!("raft", "The raft"),
];

pub fn get(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

impl Fixture {
    /// The leading `%` comment lines, joined: the problem statement.
    pub fn problem(&self) -> String {
        self.source
            .lines()
            .map_while(|l| l.strip_prefix('%'))
            .map(str::trim)
            .collect::<Vec<_>>()
            .join(" ")
    }
}
