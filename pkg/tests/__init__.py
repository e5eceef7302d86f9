"""Tests for impulse-ser."""
