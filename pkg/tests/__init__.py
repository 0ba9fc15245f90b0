"""
Tests for the coherent-state position-verification lab

This package covers photon statistics, the finite-size threshold, planning,
protocol sessions, spacetime localization, configuration parsing and the
qpv command.
"""
