"""Tests for the topology app."""
