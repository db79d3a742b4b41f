"""Frequency-domain simulator and noise budget for a piezo-opto-electro-
mechanical RF receiver: film physics, interferometric readout, coupled
transfer function, sensitivity analysis and an OOK link Monte Carlo."""

__version__ = "0.1.0"
