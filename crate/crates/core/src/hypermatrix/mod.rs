//! Hypermatrices, decks and deck sums.

pub mod array;
pub mod basis;
pub mod deck;

pub use array::{flat_index, index_tuples, DifferenceMatrix, Hypermatrix, IntArray};
pub use basis::{beta_eval, beta_table, gamma_eval, pattern_of, sum_deck_via_beta, sum_deck_via_gamma, TauPattern};
pub use deck::{combinations, deck, member_count, sum_deck_direct, sum_deck_direct_with, Deck, DeckMode, SumDeck};
