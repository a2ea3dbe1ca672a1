//! Constraint typology: the named building-block types, the modelling-tree
//! leaf each one lives at, and its specificity rank.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown typology tag `{0}`")]
pub struct UnknownTag(pub String);

macro_rules! tags {
    ($($name:ident => ($node:expr, $rank:expr)),+ $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum TagName { $($name),+ }

        impl TagName {
            pub const ALL: &'static [TagName] = &[$(TagName::$name),+];

            pub fn as_str(self) -> &'static str {
                match self { $(TagName::$name => stringify!($name)),+ }
            }

            /// Leaf of the modelling tree that elicits this constraint type.
            pub fn omt_node_id(self) -> u32 {
                match self { $(TagName::$name => $node),+ }
            }

            /// Higher is more specific; the catch-alls are 0.
            pub fn specificity(self) -> u32 {
                match self { $(TagName::$name => $rank),+ }
            }
        }

        impl FromStr for TagName {
            type Err = UnknownTag;
            fn from_str(s: &str) -> Result<Self, UnknownTag> {
                match s {
                    $(stringify!($name) => Ok(TagName::$name),)+
                    _ => Err(UnknownTag(s.to_string())),
                }
            }
        }
    };
}

tags! {
    SetCovering => (22, 100),
    SetPartitioning => (17, 100),
    SetPacking => (11, 100),
    FixToZero => (19, 95),
    ImpliesBinary => (29, 90),
    IfAllThen => (24, 90),
    WeightedSetCovering => (23, 85),
    WeightedSetPartitioning => (25, 85),
    GeneralizedSetCovering => (26, 80),
    GeneralizedSetPartitioning => (27, 80),
    ConditionalBound => (9, 72),
    IfThenBigM => (3, 70),
    OnlyIfAll => (30, 68),
    IffAll => (31, 68),
    EitherOr => (32, 68),
    FixValueIf => (33, 68),
    VariableUpperBound => (2, 60),
    VariableLowerBound => (8, 60),
    FixedUpperBound => (7, 55),
    FixedLowerBound => (16, 55),
    InventoryBalance => (14, 50),
    PeriodLink => (12, 50),
    IOBalance => (20, 50),
    AssignValue => (13, 50),
    Knapsack => (10, 40),
    ZeroOneKnapsack => (15, 40),
    GeneralLE => (35, 0),
    GeneralEQ => (36, 0),
    GeneralGE => (37, 0),
}

impl fmt::Display for TagName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TagName {
    pub fn is_catch_all(self) -> bool {
        matches!(self, TagName::GeneralLE | TagName::GeneralEQ | TagName::GeneralGE)
    }

    pub fn tag(self) -> TypologyTag {
        TypologyTag::from(self)
    }

    /// snake_case form used for generated constraint names.
    pub fn snake(self) -> String {
        let mut out = String::new();
        let s = self.as_str();
        let chars: Vec<char> = s.chars().collect();
        for (i, c) in chars.iter().enumerate() {
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            let prev_lower = i > 0 && chars[i - 1].is_ascii_lowercase();
            if c.is_ascii_uppercase() && i > 0 && (prev_lower || next_lower) {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        }
        out
    }
}

/// A typology leaf assigned to a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypologyTag {
    pub omt_node_id: u32,
    pub name: TagName,
    pub specificity: u32,
}

impl From<TagName> for TypologyTag {
    fn from(name: TagName) -> Self {
        TypologyTag { omt_node_id: name.omt_node_id(), name, specificity: name.specificity() }
    }
}

impl fmt::Display for TypologyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (node {})", self.name, self.omt_node_id)
    }
}

/// One-paragraph description of a constraint type.
pub fn explain(tag: TagName) -> &'static str {
    use TagName::*;
    match tag {
        SetCovering => "Set covering (a·x >= 1 over binaries with unit coefficients): the choice of at least one out of many, \
            e.g. every demand point must be served by at least one selected facility.",
        SetPartitioning => "Set partitioning (a·x = 1 over binaries with unit coefficients): the choice of exactly one out of many, \
            e.g. every course section is assigned to exactly one professor and time slot.",
        SetPacking => "Set packing (a·x <= 1 over binaries with unit coefficients): the choice of at most one out of many, \
            e.g. a processing unit starts at most one task at a time.",
        WeightedSetCovering => "Weighted set covering: unit coefficients over binaries with an integer right-hand side n > 1, \
            the choice of at least n out of many.",
        WeightedSetPartitioning => "Weighted set partitioning: unit coefficients over binaries with an integer right-hand side n > 1, \
            the choice of exactly n out of many.",
        GeneralizedSetCovering => "Generalized set covering: coefficients in {-1, 0, 1} over binaries with an integer right-hand side, \
            a covering requirement in which some selections count against the total.",
        GeneralizedSetPartitioning => "Generalized set partitioning: coefficients in {-1, 0, 1} over binaries with an integer \
            right-hand side, an exact-count requirement in which some selections count against the total.",
        Knapsack => "Knapsack constraint: positive rational weights on nonnegative quantities must not exceed a capacity, \
            a resource-limit (supply) bound shared by several activities.",
        ZeroOneKnapsack => "0-1 knapsack constraint: positive weights on yes/no decisions must not exceed a capacity, \
            e.g. the selected items must fit in the available budget.",
        FixedUpperBound => "Fixed upper bound (Type I, supply): a quantity may not exceed a constant limit, \
            e.g. the stored amount of a material is capped by the storage limit.",
        VariableUpperBound => "Variable upper bound (Type I, supply): a quantity may not exceed a limit that is itself a decision \
            variable, e.g. time used on every route is bounded by the total time variable.",
        FixedLowerBound => "Fixed lower bound (Type I, demand): a quantity must reach a constant requirement, \
            e.g. total production must satisfy demand.",
        VariableLowerBound => "Variable lower bound (Type I, demand): a quantity must reach a level that is itself a decision \
            variable.",
        ConditionalBound => "Conditional bounds: l·y <= quantity <= u·y for an indicator y, so the capacity limits apply only when \
            the indicator is on and the quantity is forced to zero otherwise (the lower half is a conditional lower bound).",
        IfThenBigM => "Conditional (big-M) upper bound: a quantity is bounded by a multiple of a binary indicator, or a logic \
            condition is switched on and off by a large constant M; if the condition holds then the bound applies.",
        IOBalance => "Input/output balance (Type II): an equality that equates inflow and outflow quantities, \
            e.g. material consumed equals material supplied.",
        PeriodLink => "Period link (Type II): an equality that balances quantities between two consecutive time periods.",
        AssignValue => "Value assignment (Type II): an equality that assigns a quantity, such as an initial condition or a \
            required total.",
        InventoryBalance => "Inventory balance (Type II): the inventory at a time slot equals the inventory of the previous time \
            slot plus the new production minus the consumption. The same flow-balance shape expresses route continuity in \
            routing models, where a visited customer needs a predecessor and a successor; that mapping is implicit.",
        FixToZero => "Fix to zero: variables that represent impossible decisions are set to zero, \
            e.g. travelling from a location to itself.",
        EitherOr => "Either-or condition: at least one of f(x) <= 0 and g(x) <= 0 holds, encoded with f(x) <= M·t and \
            g(x) <= M·(1 - t) for a fresh binary t and a sufficiently large M.",
        ImpliesBinary => "Binary implication: if f(x) occurs then g(x) occurs, for 0/1-valued f and g, encoded as f(x) <= g(x).",
        IfAllThen => "If-then over a conjunction: A occurs if all of B1..Bn occur, encoded as xB1 + ... + xBn <= n - 1 + xA; \
            the same leaf covers the aggregated single-constraint form n·xA <= xB1 + ... + xBn.",
        OnlyIfAll => "Only-if over a conjunction: A occurs only if all of B1..Bn occur, encoded as xA <= xBj for every j, the \
            stronger per-term form of n·xA <= xB1 + ... + xBn.",
        IffAll => "If-and-only-if over a conjunction: A occurs exactly when all of B1..Bn occur, using both the if and the \
            only-if encodings together.",
        FixValueIf => "Conditional value: if event A occurs (z = 1) then f(x) = C, encoded with -M(1 - z) + f(x) <= C and \
            M(1 - z) + f(x) >= C.",
        GeneralLE => "General resource-limit (Type I, supply) constraint a·x <= b with no more specific building block.",
        GeneralEQ => "General balancing (Type II) equality a·x = b with no more specific building block.",
        GeneralGE => "General demand (Type I) constraint a·x >= b with no more specific building block.",
    }
}

/// Same as [`explain`] but looked up by name.
pub fn explain_named(name: &str) -> Result<&'static str, UnknownTag> {
    name.parse::<TagName>().map(explain)
}
