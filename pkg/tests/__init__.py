"""
Tests for the UPIF simulator.
"""
