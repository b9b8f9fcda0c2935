"""Core engines: model, symmetry blocks, spectral analysis, dynamics, continuation."""
