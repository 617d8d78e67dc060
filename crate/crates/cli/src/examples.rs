//! Bundled instance files.

/// Four agents, total rent 4, room 4 pinned at 2 and every room capped at 2.
pub const APPENDIX_EXAMPLE: &str = r#"{
  "agents": ["1", "2", "3", "4"],
  "rooms": ["1", "2", "3", "4"],
  "valuations": [
    ["20", "0", "20", "0"],
    ["0", "19", "0", "0"],
    ["5", "0", "5", "0"],
    ["0", "0", "0", "2"]
  ],
  "total_rent": "4",
  "lower_bounds": ["0", "0", "0", "2"],
  "upper_bounds": ["2", "2", "2", "2"]
}
"#;

/// Two agents and two rooms with total rent 8.
pub const TWO_ROOMS: &str = r#"{
  "agents": ["ann", "bo"],
  "rooms": ["big", "small"],
  "valuations": [["10", "2"], ["4", "6"]],
  "total_rent": "8"
}
"#;
