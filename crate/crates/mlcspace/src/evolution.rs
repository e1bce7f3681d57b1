//! Grammar-guided genetic programming.
