//! Shape-based low-thrust transfer model.
