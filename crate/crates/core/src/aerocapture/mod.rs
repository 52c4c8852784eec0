//! Atmospheric entry and aerocapture model.
