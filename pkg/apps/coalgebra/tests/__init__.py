"""Tests for the coalgebra app."""
