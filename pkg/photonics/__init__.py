"""
Numerical library for path-entangled photon-number states under loss.

Modules:
    fock: truncated two-mode Fock basis, states, operators, gamma coefficients
    loss_channel: closed-form reduced density matrix after arm losses
    oracle: brute-force four-mode simulation used as ground truth
    metrology: detection operators, visibilities, phase sensitivity, thresholds
"""
