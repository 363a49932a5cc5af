"""Tests for nemsim."""
